//! Exact maximum-likelihood decoding of Z syndromes under i.i.d. flips.
//!
//! With flip probability `p < 1/2` the likelihood of a fault pattern falls
//! with its weight, so ML decoding is minimum-weight decoding. Among several
//! minimum-weight solutions every decoder here returns the lexicographically
//! smallest pattern, reading fault 0 as the most significant position (see
//! [`BitVector::lex_cmp`]). Because all decoders share this rule, the
//! strip-wise and monolithic decoders return identical vectors.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};
use crate::model::{BlockDecomposition, DetectorModel, FaultStrip, ModelError};

/// Column limit for [`ml_exhaustive`].
pub const MAX_EXHAUSTIVE_COLS: usize = 25;
/// Kernel-dimension limit for [`MonolithicDecoder`].
pub const MAX_KERNEL_DIM: usize = 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("syndrome is not in the column space of the check matrix")]
    NoSolution,
    #[error("syndrome has length {got}, expected {expected}")]
    SyndromeLength { expected: usize, got: usize },
    #[error("exhaustive search over {cols} columns exceeds the limit of {limit}")]
    TooManyColumns { cols: usize, limit: usize },
    #[error("coset of dimension {dim} exceeds the limit of {limit}")]
    KernelTooLarge { dim: usize, limit: usize },
    #[error("not a chain: {0}")]
    NotAChain(String),
    #[error("flip probability must lie in [0, 0.5), got {0}")]
    InvalidProbability(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Independent Z flips with probability `p` per fault.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self, DecodeError> {
        if !(0.0..0.5).contains(&p) {
            return Err(DecodeError::InvalidProbability(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub correction: BitVector,
    pub weight: usize,
    /// Correction weight on each strip; empty for bare-matrix decoders.
    pub per_strip_weights: Vec<usize>,
    /// Correction parity on each strip's faults; empty for bare-matrix
    /// decoders.
    pub strip_parities: Vec<bool>,
}

impl DecodeResult {
    fn bare(correction: BitVector) -> Self {
        Self {
            weight: correction.count_ones(),
            correction,
            per_strip_weights: Vec::new(),
            strip_parities: Vec::new(),
        }
    }

    fn annotate(mut self, model: &DetectorModel) -> Self {
        let mut weights = vec![0; model.n_strips()];
        for (f, fs) in model.fault_strips().into_iter().enumerate() {
            if let FaultStrip::Strip(s) = fs {
                if self.correction.bit(f) {
                    weights[s] += 1;
                }
            }
        }
        self.strip_parities = weights.iter().map(|w| w % 2 == 1).collect();
        self.per_strip_weights = weights;
        self
    }

    /// Parity of the correction restricted to `faults`.
    pub fn parity_on(&self, faults: &[usize]) -> bool {
        faults.iter().filter(|&&f| self.correction.bit(f)).count() % 2 == 1
    }
}

fn check_syndrome(h: &BitMatrix, s: &BitVector) -> Result<(), DecodeError> {
    if s.len() != h.rows() {
        return Err(DecodeError::SyndromeLength {
            expected: h.rows(),
            got: s.len(),
        });
    }
    Ok(())
}

/// True when `a` should replace `b` as the decoder's choice.
#[inline]
fn better(a_weight: usize, a: &BitVector, b_weight: usize, b: &BitVector) -> bool {
    match a_weight.cmp(&b_weight) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.lex_cmp(b) == Ordering::Less,
    }
}

/// Reference decoder: scans fault patterns by increasing weight and stops at
/// the first weight with a consistent pattern.
pub fn ml_exhaustive(
    h: &BitMatrix,
    s: &BitVector,
    _noise: &NoiseModel,
) -> Result<DecodeResult, DecodeError> {
    check_syndrome(h, s)?;
    let n = h.cols();
    if n > MAX_EXHAUSTIVE_COLS {
        return Err(DecodeError::TooManyColumns {
            cols: n,
            limit: MAX_EXHAUSTIVE_COLS,
        });
    }
    if s.is_zero() {
        return Ok(DecodeResult::bare(BitVector::zeros(n)));
    }
    let columns: Vec<BitVector> = (0..n).map(|j| h.column(j)).collect();
    for w in 1..=n {
        let mut best: Option<BitVector> = None;
        // combination as strictly increasing indices
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            let mut syn = BitVector::zeros(h.rows());
            for &j in &idx {
                syn.xor_assign(&columns[j]).expect("column length");
            }
            if syn == *s {
                let cand = BitVector::from_indices(n, &idx).expect("in range");
                if best
                    .as_ref()
                    .is_none_or(|b| cand.lex_cmp(b) == Ordering::Less)
                {
                    best = Some(cand);
                }
            }
            // next combination
            let mut k = w;
            while k > 0 && idx[k - 1] == n - w + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for t in k..w {
                idx[t] = idx[t - 1] + 1;
            }
        }
        if let Some(best) = best {
            return Ok(DecodeResult::bare(best));
        }
    }
    Err(DecodeError::NoSolution)
}

#[derive(Debug, Clone)]
enum ChainShape {
    /// Slots `0..=k` around detectors `1..=k`; `None` slots are absent
    /// boundary faults and are fixed to zero.
    Path,
    /// Slot 0 is the edge closing the ring.
    Cycle,
}

#[derive(Debug, Clone)]
struct ChainComponent {
    shape: ChainShape,
    detectors: Vec<usize>,
    slots: Vec<Option<usize>>,
}

/// Decoder for blocks whose detectors and faults form 1D chains: every fault
/// flips at most two detectors and every detector is flipped by at most two
/// faults.
///
/// Each connected piece is a path (possibly with boundary faults at its ends)
/// or a ring. Fault values along it are prefix parities of the syndrome, up
/// to one global flip, so there are at most two candidates per piece.
#[derive(Debug, Clone)]
pub struct ChainDecoder {
    rows: usize,
    cols: usize,
    components: Vec<ChainComponent>,
}

impl ChainDecoder {
    pub fn new(h: &BitMatrix) -> Result<Self, DecodeError> {
        let (rows, cols) = (h.rows(), h.cols());
        // per detector: (fault, other detector or None for a boundary fault)
        let mut incident: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); rows];
        for f in 0..cols {
            match h.column_support(f)[..] {
                [] => {}
                [d] => incident[d].push((f, None)),
                [a, b] => {
                    incident[a].push((f, Some(b)));
                    incident[b].push((f, Some(a)));
                }
                ref more => {
                    return Err(DecodeError::NotAChain(format!(
                        "fault {f} flips {} detectors",
                        more.len()
                    )))
                }
            }
        }
        if let Some(d) = (0..rows).find(|&d| incident[d].len() > 2) {
            return Err(DecodeError::NotAChain(format!(
                "detector {d} is flipped by {} faults",
                incident[d].len()
            )));
        }

        let inner_degree = |d: usize| incident[d].iter().filter(|(_, o)| o.is_some()).count();
        let mut visited = vec![false; rows];
        let mut components = Vec::new();

        // paths first, starting from an end
        for start in 0..rows {
            if visited[start] || inner_degree(start) == 2 {
                continue;
            }
            let boundary = |d: usize| -> Vec<usize> {
                incident[d]
                    .iter()
                    .filter(|(_, o)| o.is_none())
                    .map(|(f, _)| *f)
                    .collect()
            };
            let mut detectors = vec![start];
            let mut slots = Vec::new();
            let start_boundary = boundary(start);
            slots.push(start_boundary.first().copied());
            visited[start] = true;
            let mut prev_fault = None;
            let mut cur = start;
            loop {
                let next = incident[cur]
                    .iter()
                    .find(|(f, o)| o.is_some() && Some(*f) != prev_fault);
                match next {
                    Some(&(f, Some(d))) => {
                        slots.push(Some(f));
                        detectors.push(d);
                        visited[d] = true;
                        prev_fault = Some(f);
                        cur = d;
                    }
                    _ => break,
                }
            }
            let end_boundary = if detectors.len() == 1 {
                start_boundary.get(1).copied()
            } else {
                boundary(cur).first().copied()
            };
            slots.push(end_boundary);
            components.push(ChainComponent {
                shape: ChainShape::Path,
                detectors,
                slots,
            });
        }

        // whatever is left lies on rings
        for start in 0..rows {
            if visited[start] {
                continue;
            }
            let (closing, _) = incident[start][1];
            let mut detectors = vec![start];
            let mut slots = vec![Some(closing)];
            visited[start] = true;
            let mut prev_fault = closing;
            let mut cur = start;
            loop {
                let &(f, other) = incident[cur]
                    .iter()
                    .find(|(f, _)| *f != prev_fault)
                    .expect("ring detectors have two faults");
                let d = other.expect("ring faults are edges");
                if f == closing || d == start {
                    break;
                }
                slots.push(Some(f));
                detectors.push(d);
                visited[d] = true;
                prev_fault = f;
                cur = d;
            }
            components.push(ChainComponent {
                shape: ChainShape::Cycle,
                detectors,
                slots,
            });
        }

        Ok(Self {
            rows,
            cols,
            components,
        })
    }

    pub fn decode(&self, s: &BitVector) -> Result<DecodeResult, DecodeError> {
        if s.len() != self.rows {
            return Err(DecodeError::SyndromeLength {
                expected: self.rows,
                got: s.len(),
            });
        }
        let mut correction = BitVector::zeros(self.cols);
        for comp in &self.components {
            // prefix[i] = parity of the first i detectors of the component
            let mut prefix = Vec::with_capacity(comp.detectors.len() + 1);
            let mut acc = false;
            prefix.push(acc);
            for &d in &comp.detectors {
                acc ^= s.bit(d);
                prefix.push(acc);
            }
            let total = acc;
            let k = comp.detectors.len();

            let offsets: Vec<bool> = match comp.shape {
                ChainShape::Path => {
                    let (left, right) = (comp.slots[0].is_some(), comp.slots[k].is_some());
                    match (left, right) {
                        (true, true) => vec![false, true],
                        (true, false) => vec![total],
                        (false, true) => vec![false],
                        (false, false) if !total => vec![false],
                        (false, false) => return Err(DecodeError::NoSolution),
                    }
                }
                ChainShape::Cycle => {
                    if total {
                        return Err(DecodeError::NoSolution);
                    }
                    vec![false, true]
                }
            };

            let value = |x: bool, i: usize| x ^ prefix[i];
            let weight_of = |x: bool| {
                comp.slots
                    .iter()
                    .enumerate()
                    .filter(|(i, f)| f.is_some() && value(x, *i))
                    .count()
            };
            let chosen = if let [a, b] = offsets[..] {
                let (wa, wb) = (weight_of(a), weight_of(b));
                if wa != wb {
                    if wa < wb {
                        a
                    } else {
                        b
                    }
                } else {
                    // the candidates are complements: keep the one that leaves
                    // the lowest-indexed fault unflipped
                    let (first_slot, _) = comp
                        .slots
                        .iter()
                        .enumerate()
                        .filter_map(|(i, f)| f.map(|f| (i, f)))
                        .min_by_key(|&(_, f)| f)
                        .expect("two candidates imply at least one fault");
                    if !value(a, first_slot) {
                        a
                    } else {
                        b
                    }
                }
            } else {
                offsets[0]
            };
            for (i, f) in comp.slots.iter().enumerate() {
                if let Some(f) = f {
                    if value(chosen, i) {
                        correction.set(*f, true).expect("fault in range");
                    }
                }
            }
        }
        Ok(DecodeResult::bare(correction))
    }
}

/// Minimum-weight decoding of a chain-shaped block.
pub fn ml_chain(block: &BitMatrix, s: &BitVector) -> Result<DecodeResult, DecodeError> {
    ChainDecoder::new(block)?.decode(s)
}

/// Exact decoder over a whole check matrix by enumerating the solution coset
/// `e0 + ker(H)`. All-zero columns are left out of the search since flipping
/// them only adds weight.
#[derive(Debug, Clone)]
pub struct MonolithicDecoder {
    rows: usize,
    cols: usize,
    active: Vec<usize>,
    /// Row transform `T` with `T H_active` in reduced echelon form.
    transform: BitMatrix,
    pivots: Vec<usize>,
    rank: usize,
    kernel: Vec<BitVector>,
}

impl MonolithicDecoder {
    pub fn new(h: &BitMatrix) -> Result<Self, DecodeError> {
        let (rows, cols) = (h.rows(), h.cols());
        let active: Vec<usize> = (0..cols).filter(|&j| !h.column(j).is_zero()).collect();
        let n = active.len();

        // [H_active | I] reduced on the left part only
        let mut aug = BitMatrix::zeros(rows, n + rows);
        aug.paste(0, 0, &h.select(&(0..rows).collect::<Vec<_>>(), &active))
            .expect("fits");
        aug.paste(0, n, &BitMatrix::identity(rows)).expect("fits");
        let pivots = aug.row_reduce_leading(n);
        let rank = pivots.len();
        let all_rows: Vec<usize> = (0..rows).collect();
        let transform = aug.select(&all_rows, &(n..n + rows).collect::<Vec<_>>());

        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let kernel: Vec<BitVector> = (0..n)
            .filter(|&j| !is_pivot[j])
            .map(|free| {
                let mut v = BitVector::zeros(n);
                v.set(free, true).expect("in range");
                for (r, &p) in pivots.iter().enumerate() {
                    if aug.at(r, free) {
                        v.set(p, true).expect("in range");
                    }
                }
                v
            })
            .collect();
        if kernel.len() > MAX_KERNEL_DIM {
            return Err(DecodeError::KernelTooLarge {
                dim: kernel.len(),
                limit: MAX_KERNEL_DIM,
            });
        }
        Ok(Self {
            rows,
            cols,
            active,
            transform,
            pivots,
            rank,
            kernel,
        })
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn decode(&self, s: &BitVector) -> Result<DecodeResult, DecodeError> {
        if s.len() != self.rows {
            return Err(DecodeError::SyndromeLength {
                expected: self.rows,
                got: s.len(),
            });
        }
        let y = self.transform.mat_vec(s).expect("square transform");
        if (self.rank..self.rows).any(|r| y.bit(r)) {
            return Err(DecodeError::NoSolution);
        }
        let n = self.active.len();
        let mut current = BitVector::zeros(n);
        for (r, &p) in self.pivots.iter().enumerate() {
            if y.bit(r) {
                current.set(p, true).expect("in range");
            }
        }

        // Gray-code walk through the coset
        let mut best = current.clone();
        let mut best_weight = best.count_ones();
        let steps: u64 = 1 << self.kernel.len();
        for i in 1..steps {
            let flip = i.trailing_zeros() as usize;
            current
                .xor_assign(&self.kernel[flip])
                .expect("kernel vectors match");
            let w = current.count_ones();
            if w <= best_weight && better(w, &current, best_weight, &best) {
                best.clone_from(&current);
                best_weight = w;
            }
        }

        let mut correction = BitVector::zeros(self.cols);
        correction.scatter(&self.active, &best);
        Ok(DecodeResult::bare(correction))
    }
}

/// ML decoding over the full incidence matrix.
pub fn decode_monolithic(
    model: &DetectorModel,
    s: &BitVector,
    _noise: &NoiseModel,
) -> Result<DecodeResult, DecodeError> {
    Ok(MonolithicDecoder::new(&model.incidence_matrix())?
        .decode(s)?
        .annotate(model))
}

#[derive(Debug, Clone)]
enum BlockSolver {
    Chain(ChainDecoder),
    Exhaustive(BitMatrix),
}

/// Decodes each strip block on its own and stitches the results together.
#[derive(Debug, Clone)]
pub struct StripwiseDecoder {
    model: DetectorModel,
    decomposition: BlockDecomposition,
    solvers: Vec<BlockSolver>,
}

impl StripwiseDecoder {
    pub fn new(model: &DetectorModel) -> Result<Self, DecodeError> {
        let decomposition = model.block_decompose()?;
        let solvers = decomposition
            .blocks
            .iter()
            .map(|b| match ChainDecoder::new(&b.matrix) {
                Ok(chain) => Ok(BlockSolver::Chain(chain)),
                Err(DecodeError::NotAChain(_)) => {
                    if b.matrix.cols() > MAX_EXHAUSTIVE_COLS {
                        Err(DecodeError::TooManyColumns {
                            cols: b.matrix.cols(),
                            limit: MAX_EXHAUSTIVE_COLS,
                        })
                    } else {
                        Ok(BlockSolver::Exhaustive(b.matrix.clone()))
                    }
                }
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            model: model.clone(),
            decomposition,
            solvers,
        })
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.decomposition
    }

    pub fn decode(&self, s: &BitVector) -> Result<DecodeResult, DecodeError> {
        if s.len() != self.model.n_det() {
            return Err(DecodeError::SyndromeLength {
                expected: self.model.n_det(),
                got: s.len(),
            });
        }
        let noise = NoiseModel { p: 0.0 };
        let mut correction = BitVector::zeros(self.model.n_fault());
        for (block, solver) in self.decomposition.blocks.iter().zip(&self.solvers) {
            let local = s.gather(&block.detectors);
            let part = match solver {
                BlockSolver::Chain(chain) => chain.decode(&local)?,
                BlockSolver::Exhaustive(h) => ml_exhaustive(h, &local, &noise)?,
            };
            correction.scatter(&block.faults, &part.correction);
        }
        Ok(DecodeResult::bare(correction).annotate(&self.model))
    }
}

/// ML decoding block by block. Requires every fault to be strip-local.
pub fn decode_stripwise(
    model: &DetectorModel,
    s: &BitVector,
    _noise: &NoiseModel,
) -> Result<DecodeResult, DecodeError> {
    StripwiseDecoder::new(model)?.decode(s)
}

/// Either decoder, prepared once for repeated use.
#[derive(Debug, Clone)]
pub enum PreparedDecoder {
    Monolithic(MonolithicDecoder, DetectorModel),
    Stripwise(StripwiseDecoder),
}

impl PreparedDecoder {
    pub fn decode(&self, s: &BitVector) -> Result<DecodeResult, DecodeError> {
        match self {
            PreparedDecoder::Monolithic(dec, model) => Ok(dec.decode(s)?.annotate(model)),
            PreparedDecoder::Stripwise(dec) => dec.decode(s),
        }
    }
}
