//! Z-detector models: which detectors each elementary Z fault flips, and how
//! detectors are partitioned into strips.
//!
//! A [`DetectorModel`] stores the incidence structure column by column (one
//! sorted detector set per fault) together with a strip index per detector.
//! From it we derive the incidence matrix, per-strip statistics, the
//! strip-grouped block form and the two equivalent strip-symmetry criteria.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, Gf2Error, Permutation};

pub mod format;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("fault {fault} flips detector {detector} but the model has {n_det} detectors")]
    DetectorOutOfRange {
        fault: usize,
        detector: usize,
        n_det: usize,
    },
    #[error("fault {fault} lists detector {detector} more than once")]
    DuplicateDetector { fault: usize, detector: usize },
    #[error(
        "detector {detector} assigned to strip {strip} but only {n_strips} strips are declared"
    )]
    StripOutOfRange {
        detector: usize,
        strip: usize,
        n_strips: usize,
    },
    #[error("expected a strip index for each of {expected} detectors, got {got}")]
    StripMapLength { expected: usize, got: usize },
    #[error("fault index {fault} out of range ({n_fault} faults)")]
    FaultOutOfRange { fault: usize, n_fault: usize },
    #[error("fault {fault} is not strip-local: it flips detectors in strips {strips:?}")]
    NonLocalFault { fault: usize, strips: Vec<usize> },
    #[error("strip-symmetry conditions disagree (block form: {block}, 1-form: {one_form})")]
    InconsistentConditions { block: bool, one_form: bool },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Optional display names for detectors and faults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelLabels {
    pub detectors: Vec<String>,
    pub faults: Vec<String>,
}

/// Incidence structure of elementary Z faults on detectors, with a strip
/// partition of the detectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorModel {
    n_det: usize,
    n_strips: usize,
    fault_supports: Vec<Vec<usize>>,
    strip_of_detector: Vec<usize>,
    labels: Option<ModelLabels>,
}

/// Where a fault lives relative to the strip partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultStrip {
    Strip(usize),
    /// Flips no detector.
    Orphan,
    /// Flips detectors in two or more strips.
    NonLocal,
}

impl DetectorModel {
    /// Validates and builds a model. Supports are sorted; `n_strips` must
    /// exceed every strip index in `strip_of_detector` and may include strips
    /// without detectors.
    pub fn new(
        n_det: usize,
        n_strips: usize,
        mut fault_supports: Vec<Vec<usize>>,
        strip_of_detector: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if strip_of_detector.len() != n_det {
            return Err(ModelError::StripMapLength {
                expected: n_det,
                got: strip_of_detector.len(),
            });
        }
        for (detector, &strip) in strip_of_detector.iter().enumerate() {
            if strip >= n_strips {
                return Err(ModelError::StripOutOfRange {
                    detector,
                    strip,
                    n_strips,
                });
            }
        }
        for (fault, support) in fault_supports.iter_mut().enumerate() {
            support.sort_unstable();
            for w in support.windows(2) {
                if w[0] == w[1] {
                    return Err(ModelError::DuplicateDetector {
                        fault,
                        detector: w[0],
                    });
                }
            }
            if let Some(&detector) = support.last() {
                if detector >= n_det {
                    return Err(ModelError::DetectorOutOfRange {
                        fault,
                        detector,
                        n_det,
                    });
                }
            }
        }
        Ok(Self {
            n_det,
            n_strips,
            fault_supports,
            strip_of_detector,
            labels: None,
        })
    }

    /// Builds a model from a dense incidence matrix.
    pub fn from_matrix(
        h: &BitMatrix,
        n_strips: usize,
        strip_of_detector: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let supports = (0..h.cols()).map(|j| h.column_support(j)).collect();
        Self::new(h.rows(), n_strips, supports, strip_of_detector)
    }

    pub fn with_labels(mut self, labels: ModelLabels) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn n_fault(&self) -> usize {
        self.fault_supports.len()
    }

    /// Number of declared strips, including any without detectors.
    pub fn n_strips(&self) -> usize {
        self.n_strips
    }

    pub fn support(&self, fault: usize) -> &[usize] {
        &self.fault_supports[fault]
    }

    pub fn fault_supports(&self) -> &[Vec<usize>] {
        &self.fault_supports
    }

    pub fn strip_of_detector(&self) -> &[usize] {
        &self.strip_of_detector
    }

    pub fn labels(&self) -> Option<&ModelLabels> {
        self.labels.as_ref()
    }

    /// Detector indices of each strip, ascending.
    pub fn detectors_by_strip(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_strips];
        for (d, &s) in self.strip_of_detector.iter().enumerate() {
            out[s].push(d);
        }
        out
    }

    /// The `n_det x n_fault` incidence matrix.
    pub fn incidence_matrix(&self) -> BitMatrix {
        BitMatrix::from_column_supports(self.n_det, &self.fault_supports)
            .expect("supports validated on construction")
    }

    pub fn fault_strip(&self, fault: usize) -> Result<FaultStrip, ModelError> {
        let support = self
            .fault_supports
            .get(fault)
            .ok_or(ModelError::FaultOutOfRange {
                fault,
                n_fault: self.n_fault(),
            })?;
        Ok(self.classify(support))
    }

    fn classify(&self, support: &[usize]) -> FaultStrip {
        let Some((&first, rest)) = support.split_first() else {
            return FaultStrip::Orphan;
        };
        let strip = self.strip_of_detector[first];
        if rest.iter().all(|&d| self.strip_of_detector[d] == strip) {
            FaultStrip::Strip(strip)
        } else {
            FaultStrip::NonLocal
        }
    }

    /// Strip classification of every fault.
    pub fn fault_strips(&self) -> Vec<FaultStrip> {
        self.fault_supports
            .iter()
            .map(|s| self.classify(s))
            .collect()
    }

    /// Faults assigned to each strip (strip-local faults only), ascending.
    pub fn faults_by_strip(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_strips];
        for (f, fs) in self.fault_strips().into_iter().enumerate() {
            if let FaultStrip::Strip(s) = fs {
                out[s].push(f);
            }
        }
        out
    }

    fn first_non_local(&self) -> Option<(usize, Vec<usize>)> {
        self.fault_supports
            .iter()
            .enumerate()
            .find_map(|(f, support)| {
                (self.classify(support) == FaultStrip::NonLocal).then(|| {
                    let strips: BTreeSet<usize> =
                        support.iter().map(|&d| self.strip_of_detector[d]).collect();
                    (f, strips.into_iter().collect())
                })
            })
    }

    pub fn strip_stats(&self) -> StripStats {
        let mut sizes = vec![0usize; self.n_strips];
        for &s in &self.strip_of_detector {
            sizes[s] += 1;
        }
        let nonempty: Vec<usize> = sizes.iter().copied().filter(|&n| n > 0).collect();

        let mut off_block = 0;
        let mut non_local = 0;
        for support in &self.fault_supports {
            let Some(&first) = support.first() else {
                continue;
            };
            let home = self.strip_of_detector[first];
            let outside = support
                .iter()
                .filter(|&&d| self.strip_of_detector[d] != home)
                .count();
            off_block += outside;
            if outside > 0 {
                non_local += 1;
            }
        }

        StripStats {
            m: nonempty.len(),
            min_dets: nonempty.iter().copied().min().unwrap_or(0),
            max_dets: nonempty.iter().copied().max().unwrap_or(0),
            off_block,
            non_local,
            n_det: self.n_det,
            n_fault: self.n_fault(),
        }
    }

    /// Groups detectors and faults by strip. Fails on the first fault that is
    /// not strip-local.
    pub fn block_decompose(&self) -> Result<BlockDecomposition, ModelError> {
        if let Some((fault, strips)) = self.first_non_local() {
            return Err(ModelError::NonLocalFault { fault, strips });
        }
        let h = self.incidence_matrix();
        let detectors = self.detectors_by_strip();
        let faults = self.faults_by_strip();
        let orphan_faults: Vec<usize> = (0..self.n_fault())
            .filter(|&f| self.fault_supports[f].is_empty())
            .collect();

        let mut row_order = Vec::with_capacity(self.n_det);
        let mut col_order = Vec::with_capacity(self.n_fault());
        let mut blocks = Vec::new();
        for (strip, (dets, fs)) in detectors.into_iter().zip(faults).enumerate() {
            if dets.is_empty() {
                continue;
            }
            row_order.extend_from_slice(&dets);
            col_order.extend_from_slice(&fs);
            blocks.push(Block {
                strip,
                matrix: h.select(&dets, &fs),
                detectors: dets,
                faults: fs,
            });
        }
        col_order.extend_from_slice(&orphan_faults);

        Ok(BlockDecomposition {
            n_det: self.n_det,
            n_fault: self.n_fault(),
            row_perm: Permutation::new(row_order)?,
            col_perm: Permutation::new(col_order)?,
            blocks,
            orphan_faults,
        })
    }

    /// Entry `j` is true iff every fault flips an even number of detectors in
    /// strip `j`, i.e. the strip indicator is in the left kernel of `H_Z`.
    pub fn check_one_form(&self) -> Vec<bool> {
        let mut ok = vec![true; self.n_strips];
        let mut counts = vec![0usize; self.n_strips];
        for support in &self.fault_supports {
            for &d in support {
                counts[self.strip_of_detector[d]] += 1;
            }
            for &d in support {
                let s = self.strip_of_detector[d];
                if counts[s] % 2 == 1 {
                    ok[s] = false;
                }
                counts[s] = 0;
            }
        }
        ok
    }

    /// Adds one virtual detector to each strip that has weight-1 faults and
    /// attaches it to all of them. Virtual detectors are appended after the
    /// existing ones in strip order.
    pub fn augment_virtual_boundaries(&self) -> Result<DetectorModel, ModelError> {
        if let Some((fault, strips)) = self.first_non_local() {
            return Err(ModelError::NonLocalFault { fault, strips });
        }
        let mut needs_virtual = vec![false; self.n_strips];
        for support in &self.fault_supports {
            if let [d] = support[..] {
                needs_virtual[self.strip_of_detector[d]] = true;
            }
        }
        let mut strip_of_detector = self.strip_of_detector.clone();
        let mut virtual_index = vec![usize::MAX; self.n_strips];
        for (s, _) in needs_virtual.iter().enumerate().filter(|(_, &b)| b) {
            virtual_index[s] = strip_of_detector.len();
            strip_of_detector.push(s);
        }
        let supports = self
            .fault_supports
            .iter()
            .map(|support| match support[..] {
                [d] => vec![d, virtual_index[self.strip_of_detector[d]]],
                _ => support.clone(),
            })
            .collect();
        let mut out = DetectorModel::new(
            strip_of_detector.len(),
            self.n_strips,
            supports,
            strip_of_detector,
        )?;
        if let Some(labels) = &self.labels {
            let mut labels = labels.clone();
            for (s, &v) in virtual_index.iter().enumerate() {
                if v != usize::MAX {
                    labels.detectors.push(format!("virtual[{s}]"));
                }
            }
            out.labels = Some(labels);
        }
        Ok(out)
    }

    /// Evaluates both strip-symmetry criteria. With `use_virtual_boundaries`,
    /// strip-local models are first augmented with virtual boundary detectors.
    ///
    /// Returns an error only if the two criteria disagree.
    pub fn check_strip_symmetric(
        &self,
        use_virtual_boundaries: bool,
    ) -> Result<StripSymmetryReport, ModelError> {
        let augmented = use_virtual_boundaries && self.first_non_local().is_none();
        let owned;
        let model = if augmented {
            owned = self.augment_virtual_boundaries()?;
            &owned
        } else {
            self
        };

        // Block criterion: every fault strip-local, the strip-grouped
        // permutation is block diagonal, and faults create defects in pairs.
        let strip_local = model.first_non_local().is_none();
        let block_diagonal = strip_local
            && model
                .block_decompose()
                .map(|b| b.assemble() == model.incidence_matrix())
                .unwrap_or(false);
        let pair_creating = model
            .fault_supports
            .iter()
            .all(|s| s.is_empty() || s.len() == 2);
        let condition_block = strip_local && block_diagonal && pair_creating;

        // 1-form criterion: strip parities conserved and every fault flips 0
        // or 2 detectors of one strip.
        let one_form = model.check_one_form();
        let zero_or_two = model
            .fault_supports
            .iter()
            .all(|support| match support[..] {
                [] => true,
                [a, b] => model.strip_of_detector[a] == model.strip_of_detector[b],
                _ => false,
            });
        let condition_one_form = one_form.iter().all(|&b| b) && zero_or_two;

        if condition_block != condition_one_form {
            return Err(ModelError::InconsistentConditions {
                block: condition_block,
                one_form: condition_one_form,
            });
        }
        Ok(StripSymmetryReport {
            augmented,
            virtual_detectors: model.n_det - self.n_det,
            strip_local,
            block_diagonal,
            pair_creating,
            condition_block,
            condition_one_form,
            one_form,
            strip_symmetric: condition_block,
        })
    }
}

/// One row of strip statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripStats {
    /// Strips with at least one detector.
    pub m: usize,
    pub min_dets: usize,
    pub max_dets: usize,
    /// Nonzeros of `H_Z` outside the strip-diagonal blocks, with each fault
    /// assigned to the strip of its lowest-indexed detector.
    pub off_block: usize,
    /// Faults flipping detectors in two or more strips.
    pub non_local: usize,
    pub n_det: usize,
    pub n_fault: usize,
}

impl StripStats {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize, usize, usize) {
        (
            self.m,
            self.min_dets,
            self.max_dets,
            self.off_block,
            self.non_local,
            self.n_det,
            self.n_fault,
        )
    }
}

impl fmt::Display for StripStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} min={} max={} off_block={} non_local={} n_det={} n_fault={}",
            self.m,
            self.min_dets,
            self.max_dets,
            self.off_block,
            self.non_local,
            self.n_det,
            self.n_fault
        )
    }
}

/// The sub-matrix of one strip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub strip: usize,
    pub matrix: BitMatrix,
    /// Original detector indices, one per block row.
    pub detectors: Vec<usize>,
    /// Original fault indices, one per block column.
    pub faults: Vec<usize>,
}

/// `H_Z` regrouped by strip.
///
/// Rows are ordered strip by strip, columns likewise with orphan faults last,
/// so `H_Z.permute(row_perm, col_perm)` is block diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub n_det: usize,
    pub n_fault: usize,
    pub row_perm: Permutation,
    pub col_perm: Permutation,
    pub blocks: Vec<Block>,
    pub orphan_faults: Vec<usize>,
}

impl BlockDecomposition {
    /// Block-diagonal matrix in the permuted coordinates.
    pub fn block_diagonal(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.n_det, self.n_fault);
        let (mut r, mut c) = (0, 0);
        for block in &self.blocks {
            out.paste(r, c, &block.matrix)
                .expect("blocks fit by construction");
            r += block.matrix.rows();
            c += block.matrix.cols();
        }
        out
    }

    /// Undoes the permutations, reproducing `H_Z`.
    pub fn assemble(&self) -> BitMatrix {
        self.block_diagonal()
            .permute(&self.row_perm.inverse(), &self.col_perm.inverse())
            .expect("permutation sizes match by construction")
    }

    /// `(rows, cols)` of every block, followed by the orphan count.
    pub fn shape_signature(&self) -> (Vec<(usize, usize)>, usize) {
        let mut shapes: Vec<(usize, usize)> = self
            .blocks
            .iter()
            .map(|b| (b.matrix.rows(), b.matrix.cols()))
            .collect();
        shapes.sort_unstable();
        (shapes, self.orphan_faults.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripSymmetryReport {
    /// Whether virtual boundary detectors were added before checking.
    pub augmented: bool,
    pub virtual_detectors: usize,
    pub strip_local: bool,
    pub block_diagonal: bool,
    /// Every fault flips zero or two detectors.
    pub pair_creating: bool,
    pub condition_block: bool,
    pub condition_one_form: bool,
    /// Per-strip parity conservation.
    pub one_form: Vec<bool>,
    pub strip_symmetric: bool,
}

/// Checks that the columns of `h` are orthogonal to every strip indicator,
/// computed as `H_Z^T u_j`.
pub fn one_form_by_transpose(model: &DetectorModel) -> Vec<bool> {
    let ht = model.incidence_matrix().transpose();
    model
        .detectors_by_strip()
        .iter()
        .map(|dets| {
            let indicator = BitVector::from_indices(model.n_det(), dets).expect("in range");
            ht.mat_vec(&indicator).expect("sizes match").is_zero()
        })
        .collect()
}
