//! Z-detector shadows of the benchmark code families on an `L x L` grid of
//! qubits.
//!
//! Faults are single-qubit Z errors indexed row-major by grid position
//! `(r, c) -> r * L + c`. Each strip carries a 1D chain of detectors between
//! consecutive qubits, so interior faults flip two detectors, strip-end faults
//! flip one, and faults on strips without detectors flip none.
//!
//! The XZZX, DWCC and X3Z3 shadows are derived from Pauli detector operators
//! on the lattice; DSR, CSR and HCSR are written directly as chain stacks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DetectorModel, ModelError, ModelLabels, StripStats};
use crate::pauli::{
    deform_and_check, incidence_from_paulis, DomainAssignment, Pauli, PauliError, PauliString,
    SingleQubitClifford,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (expected one of XZZX, DWCC, X3Z3, DSR, CSR, HCSR)")]
    UnknownFamily(String),
    #[error("linear size must be at least 2, got {0}")]
    SizeTooSmall(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "XZZX")]
    Xzzx,
    #[serde(rename = "DWCC")]
    Dwcc,
    #[serde(rename = "X3Z3")]
    X3z3,
    #[serde(rename = "DSR")]
    Dsr,
    #[serde(rename = "CSR")]
    Csr,
    #[serde(rename = "HCSR")]
    Hcsr,
}

impl FamilyId {
    /// Table order: physical shadows first, then the synthetic stacks.
    pub const ALL: [FamilyId; 6] = [
        FamilyId::Xzzx,
        FamilyId::Dwcc,
        FamilyId::X3z3,
        FamilyId::Dsr,
        FamilyId::Csr,
        FamilyId::Hcsr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Xzzx => "XZZX",
            FamilyId::Dwcc => "DWCC",
            FamilyId::X3z3 => "X3Z3",
            FamilyId::Dsr => "DSR",
            FamilyId::Csr => "CSR",
            FamilyId::Hcsr => "HCSR",
        }
    }

    /// The synthetic family with the same strip pattern.
    pub fn synthetic_partner(self) -> FamilyId {
        match self {
            FamilyId::Xzzx | FamilyId::Dsr => FamilyId::Dsr,
            FamilyId::Dwcc | FamilyId::Csr => FamilyId::Csr,
            FamilyId::X3z3 | FamilyId::Hcsr => FamilyId::Hcsr,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == upper)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// A built family instance together with its designated logical strip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyModel {
    pub family: FamilyId,
    pub size: usize,
    pub model: DetectorModel,
    pub logical_strips: Vec<usize>,
    /// For each logical strip, the faults whose parity is the logical Z.
    pub logical_faults: Vec<Vec<usize>>,
}

impl FamilyModel {
    fn new(
        family: FamilyId,
        size: usize,
        model: DetectorModel,
        logical_strip: usize,
    ) -> FamilyModel {
        let logical_faults = vec![model.faults_by_strip()[logical_strip].clone()];
        FamilyModel {
            family,
            size,
            model,
            logical_strips: vec![logical_strip],
            logical_faults,
        }
    }

    /// Comment lines used when exporting the model.
    pub fn header_comments(&self) -> Vec<String> {
        vec![format!("family={} L={}", self.family, self.size)]
    }
}

pub fn build(family: FamilyId, size: usize) -> Result<FamilyModel, FamilyError> {
    if size < 2 {
        return Err(FamilyError::SizeTooSmall(size));
    }
    match family {
        FamilyId::Dsr => Ok(dsr(size)),
        FamilyId::Csr => Ok(csr(size)),
        FamilyId::Hcsr => Ok(hcsr(size)),
        FamilyId::Xzzx => xzzx(size),
        FamilyId::Dwcc => dwcc(size),
        FamilyId::X3z3 => x3z3(size),
    }
}

fn fault_labels(size: usize) -> Vec<String> {
    (0..size * size)
        .map(|q| format!("Z({},{})", q / size, q % size))
        .collect()
}

/// Stacks open repetition chains. `strips[j]` lists the qubits of strip `j`
/// in chain order; inactive strips get no detectors.
fn chain_stack(
    n_qubits: usize,
    strips: &[(Vec<usize>, bool)],
    qubit_name: impl Fn(usize) -> String,
) -> DetectorModel {
    let mut supports = vec![Vec::new(); n_qubits];
    let mut strip_of_detector = Vec::new();
    let mut det_labels = Vec::new();
    for (j, (qubits, active)) in strips.iter().enumerate() {
        if !active {
            continue;
        }
        for pair in qubits.windows(2) {
            let d = strip_of_detector.len();
            strip_of_detector.push(j);
            supports[pair[0]].push(d);
            supports[pair[1]].push(d);
            det_labels.push(format!("{}~{}", qubit_name(pair[0]), qubit_name(pair[1])));
        }
    }
    let labels = ModelLabels {
        detectors: det_labels,
        faults: (0..n_qubits).map(&qubit_name).collect(),
    };
    DetectorModel::new(
        strip_of_detector.len(),
        strips.len(),
        supports,
        strip_of_detector,
    )
    .expect("chain stack is well formed")
    .with_labels(labels)
}

fn grid_name(size: usize) -> impl Fn(usize) -> String {
    move |q| format!("({},{})", q / size, q % size)
}

/// Diagonal strips `c - r = k`, strip index `k + L - 1`.
fn dsr(size: usize) -> FamilyModel {
    let strips: Vec<(Vec<usize>, bool)> = (0..2 * size - 1)
        .map(|j| {
            let k = j as isize - (size as isize - 1);
            let qubits = (0..size)
                .filter_map(|r| {
                    let c = r as isize + k;
                    (0..size as isize)
                        .contains(&c)
                        .then(|| r * size + c as usize)
                })
                .collect();
            (qubits, true)
        })
        .collect();
    let model = chain_stack(size * size, &strips, grid_name(size));
    FamilyModel::new(FamilyId::Dsr, size, model, size - 1)
}

fn column_strips(size: usize, active: impl Fn(usize) -> bool) -> Vec<(Vec<usize>, bool)> {
    (0..size)
        .map(|c| ((0..size).map(|r| r * size + c).collect(), active(c)))
        .collect()
}

fn csr(size: usize) -> FamilyModel {
    let model = chain_stack(size * size, &column_strips(size, |_| true), grid_name(size));
    FamilyModel::new(FamilyId::Csr, size, model, 0)
}

/// Every second column carries a chain; even columns are the active ones.
fn hcsr(size: usize) -> FamilyModel {
    let model = chain_stack(
        size * size,
        &column_strips(size, |c| c % 2 == 0),
        grid_name(size),
    );
    FamilyModel::new(FamilyId::Hcsr, size, model, 0)
}

fn physical_z_faults(size: usize) -> Vec<PauliString> {
    let n = size * size;
    (0..n)
        .map(|v| PauliString::single(n, v, Pauli::Z))
        .collect()
}

/// XZZX plaquettes `X(r,c) Z(r,c+1) Z(r+1,c) X(r+1,c+1)` on the faces of the
/// qubit grid. A Z error anticommutes only with the plaquettes holding X on
/// it, which lie on its own diagonal.
fn xzzx(size: usize) -> Result<FamilyModel, FamilyError> {
    let n = size * size;
    let q = |r: usize, c: usize| r * size + c;
    let mut detectors = Vec::new();
    let mut strip_of_detector = Vec::new();
    let mut det_labels = Vec::new();
    for r in 0..size - 1 {
        for c in 0..size - 1 {
            let mut p = PauliString::identity(n);
            p.set(q(r, c), Pauli::X);
            p.set(q(r, c + 1), Pauli::Z);
            p.set(q(r + 1, c), Pauli::Z);
            p.set(q(r + 1, c + 1), Pauli::X);
            detectors.push(p);
            strip_of_detector.push(c + size - 1 - r);
            det_labels.push(format!("plaquette({r},{c})"));
        }
    }
    let model = incidence_from_paulis(
        &detectors,
        &physical_z_faults(size),
        2 * size - 1,
        strip_of_detector,
    )?
    .with_labels(ModelLabels {
        detectors: det_labels,
        faults: fault_labels(size),
    });
    Ok(FamilyModel::new(FamilyId::Xzzx, size, model, size - 1))
}

/// Face detectors along vertical domain-wall lines. Only their X-type part
/// on the line, `X(r,c) X(r+1,c)`, is seen by Z errors.
fn dwcc(size: usize) -> Result<FamilyModel, FamilyError> {
    let n = size * size;
    let mut detectors = Vec::new();
    let mut strip_of_detector = Vec::new();
    let mut det_labels = Vec::new();
    for r in 0..size - 1 {
        for c in 0..size {
            detectors.push(PauliString::on(
                n,
                &[r * size + c, (r + 1) * size + c],
                Pauli::X,
            ));
            strip_of_detector.push(c);
            det_labels.push(format!("face({r},{c})"));
        }
    }
    let model = incidence_from_paulis(
        &detectors,
        &physical_z_faults(size),
        size,
        strip_of_detector,
    )?
    .with_labels(ModelLabels {
        detectors: det_labels,
        faults: fault_labels(size),
    });
    Ok(FamilyModel::new(FamilyId::Dwcc, size, model, 0))
}

/// A-type detectors of a CSS parent, `Z(r,c) Z(r+1,c)` on the unshaded
/// (even) vertical domains, deformed by H on unshaded domains and I on shaded
/// ones.
fn x3z3(size: usize) -> Result<FamilyModel, FamilyError> {
    let n = size * size;
    let mut parent = Vec::new();
    let mut strip_of_detector = Vec::new();
    let mut det_labels = Vec::new();
    for r in 0..size - 1 {
        for c in (0..size).step_by(2) {
            parent.push(PauliString::on(
                n,
                &[r * size + c, (r + 1) * size + c],
                Pauli::Z,
            ));
            strip_of_detector.push(c);
            det_labels.push(format!("A({r},{c})"));
        }
    }
    let strip_of_qubit = (0..n).map(|v| v % size).collect();
    let cliffords = (0..size)
        .map(|c| {
            if c % 2 == 0 {
                SingleQubitClifford::H
            } else {
                SingleQubitClifford::I
            }
        })
        .collect();
    let axes: Vec<Pauli> = (0..size)
        .map(|c| if c % 2 == 0 { Pauli::X } else { Pauli::Z })
        .collect();
    let assignment = DomainAssignment::new(strip_of_qubit, cliffords)?;
    let report = deform_and_check(&parent, strip_of_detector, &assignment, &axes)?;
    let model = report.deformed_model.with_labels(ModelLabels {
        detectors: det_labels,
        faults: fault_labels(size),
    });
    Ok(FamilyModel::new(FamilyId::X3z3, size, model, 0))
}

/// Open repetition chains, strip `j` holding `qubits_per_strip[j]` faults and
/// one fewer detectors. Used for balanced workloads.
pub fn chain_stack_model(qubits_per_strip: &[usize]) -> DetectorModel {
    let mut next = 0;
    let strips: Vec<(Vec<usize>, bool)> = qubits_per_strip
        .iter()
        .map(|&q| {
            let qubits = (next..next + q).collect();
            next += q;
            (qubits, true)
        })
        .collect();
    chain_stack(next, &strips, |q| format!("q{q}"))
}

/// Same multiset of block shapes and the same number of orphan faults.
pub fn blocks_isomorphic(a: &FamilyModel, b: &FamilyModel) -> bool {
    match (a.model.block_decompose(), b.model.block_decompose()) {
        (Ok(x), Ok(y)) => x.shape_signature() == y.shape_signature(),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub family: FamilyId,
    #[serde(rename = "L")]
    pub size: usize,
    #[serde(flatten)]
    pub stats: StripStats,
}

/// Strip statistics for every `(family, size)` pair, families outermost.
pub fn table1(families: &[FamilyId], sizes: &[usize]) -> Result<Vec<StatsRow>, FamilyError> {
    let mut rows = Vec::with_capacity(families.len() * sizes.len());
    for &family in families {
        for &size in sizes {
            rows.push(StatsRow {
                family,
                size,
                stats: build(family, size)?.model.strip_stats(),
            });
        }
    }
    Ok(rows)
}
