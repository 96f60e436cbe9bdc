//! Phase-free Pauli strings in symplectic form and domain-wise Clifford
//! deformations built from `{I, H, HS}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};
use crate::model::{DetectorModel, ModelError, StripSymmetryReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("operators act on {left} and {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit {qubit} has no strip assignment")]
    UncoveredQubit { qubit: usize },
    #[error("strip {strip} has no Clifford assigned")]
    MissingClifford { strip: usize },
    #[error("invalid Pauli letter `{0}`")]
    BadLetter(char),
    #[error("unknown Clifford `{0}` (expected I, H or HS)")]
    BadClifford(String),
    #[error("detector {detector} is supported on more than one strip")]
    DetectorSpansStrips { detector: usize },
    #[error("strip {strip}: {clifford} maps the dominant axis {axis} to {image}, not Z")]
    NotBiasShifting {
        strip: usize,
        clifford: SingleQubitClifford,
        axis: Pauli,
        image: Pauli,
    },
    #[error("parent detector model is not strip-symmetric")]
    ParentNotStripSymmetric,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Single-qubit Pauli up to phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' | '_' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::BadLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An n-qubit Pauli operator, phase discarded. Qubit `v` carries X iff
/// `x[v]`, Z iff `z[v]`, and Y iff both.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PauliString {
    x: BitVector,
    z: BitVector,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            x: BitVector::zeros(n_qubits),
            z: BitVector::zeros(n_qubits),
        }
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Self {
        let mut p = Self::identity(n_qubits);
        p.set(qubit, letter);
        p
    }

    /// Places `letter` on each of `qubits`.
    pub fn on(n_qubits: usize, qubits: &[usize], letter: Pauli) -> Self {
        let mut p = Self::identity(n_qubits);
        for &q in qubits {
            p.set(q, letter);
        }
        p
    }

    pub fn from_parts(x: BitVector, z: BitVector) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::SizeMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        Ok(Self { x, z })
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVector {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVector {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x.bit(qubit), self.z.bit(qubit))
    }

    pub fn set(&mut self, qubit: usize, letter: Pauli) {
        let (x, z) = letter.bits();
        self.x.set(qubit, x).expect("qubit in range");
        self.z.set(qubit, z).expect("qubit in range");
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits())
            .filter(|&q| self.x.bit(q) || self.z.bit(q))
            .collect()
    }

    /// Symplectic product `<x, z'> + <z, x'>` is zero.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(PauliError::SizeMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        let a = self.x.dot(&other.z).expect("same length");
        let b = self.z.dot(&other.x).expect("same length");
        Ok(a == b)
    }

    /// Conjugates qubit by qubit with the Clifford of each qubit's strip.
    pub fn conjugate(&self, assignment: &DomainAssignment) -> Result<PauliString, PauliError> {
        let n = self.n_qubits();
        if assignment.n_qubits() < n {
            return Err(PauliError::UncoveredQubit {
                qubit: assignment.n_qubits(),
            });
        }
        let mut out = self.clone();
        for q in 0..n {
            let letter = self.get(q);
            if letter != Pauli::I {
                out.set(q, assignment.clifford_of_qubit(q).apply(letter));
            }
        }
        Ok(out)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .trim()
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        let mut p = Self::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            p.set(q, l);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for PauliString {
    type Error = PauliError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// The bias-shifting single-qubit Cliffords, acting by conjugation up to
/// phase.
///
/// `HS` means S is applied first and then H, so conjugation cycles
/// X -> Y -> Z -> X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingleQubitClifford {
    I,
    H,
    HS,
}

impl SingleQubitClifford {
    pub const ALL: [SingleQubitClifford; 3] = [Self::I, Self::H, Self::HS];

    /// `U P U^dagger` up to phase.
    pub fn apply(self, p: Pauli) -> Pauli {
        match (self, p) {
            (_, Pauli::I) => Pauli::I,
            (Self::I, p) => p,
            (Self::H, Pauli::X) => Pauli::Z,
            (Self::H, Pauli::Y) => Pauli::Y,
            (Self::H, Pauli::Z) => Pauli::X,
            (Self::HS, Pauli::X) => Pauli::Y,
            (Self::HS, Pauli::Y) => Pauli::Z,
            (Self::HS, Pauli::Z) => Pauli::X,
        }
    }

    /// `U^dagger P U` up to phase.
    pub fn apply_inverse(self, p: Pauli) -> Pauli {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .find(|&q| self.apply(q) == p)
            .expect("action is a bijection")
    }
}

impl fmt::Display for SingleQubitClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::I => "I",
            Self::H => "H",
            Self::HS => "HS",
        })
    }
}

impl FromStr for SingleQubitClifford {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" => Ok(Self::I),
            "H" => Ok(Self::H),
            "HS" => Ok(Self::HS),
            _ => Err(PauliError::BadClifford(s.to_string())),
        }
    }
}

/// Strip partition of the qubits plus one Clifford per strip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainAssignment {
    strip_of_qubit: Vec<usize>,
    clifford_of_strip: Vec<SingleQubitClifford>,
}

impl DomainAssignment {
    pub fn new(
        strip_of_qubit: Vec<usize>,
        clifford_of_strip: Vec<SingleQubitClifford>,
    ) -> Result<Self, PauliError> {
        if let Some(&strip) = strip_of_qubit
            .iter()
            .find(|&&s| s >= clifford_of_strip.len())
        {
            return Err(PauliError::MissingClifford { strip });
        }
        Ok(Self {
            strip_of_qubit,
            clifford_of_strip,
        })
    }

    /// Same Clifford on every strip.
    pub fn uniform(strip_of_qubit: Vec<usize>, clifford: SingleQubitClifford) -> Self {
        let n_strips = strip_of_qubit.iter().max().map_or(0, |m| m + 1);
        Self {
            strip_of_qubit,
            clifford_of_strip: vec![clifford; n_strips],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.strip_of_qubit.len()
    }

    pub fn n_strips(&self) -> usize {
        self.clifford_of_strip.len()
    }

    pub fn strip_of_qubit(&self) -> &[usize] {
        &self.strip_of_qubit
    }

    pub fn clifford_of_strip(&self) -> &[SingleQubitClifford] {
        &self.clifford_of_strip
    }

    pub fn clifford_of_qubit(&self, qubit: usize) -> SingleQubitClifford {
        self.clifford_of_strip[self.strip_of_qubit[qubit]]
    }
}

/// Detector model whose fault `f` flips detector `d` iff they anticommute.
pub fn incidence_from_paulis(
    detectors: &[PauliString],
    faults: &[PauliString],
    n_strips: usize,
    strip_of_detector: Vec<usize>,
) -> Result<DetectorModel, PauliError> {
    let n = detectors
        .first()
        .or(faults.first())
        .map_or(0, PauliString::n_qubits);
    for p in detectors.iter().chain(faults) {
        if p.n_qubits() != n {
            return Err(PauliError::SizeMismatch {
                left: n,
                right: p.n_qubits(),
            });
        }
    }
    let supports = faults
        .iter()
        .map(|f| {
            detectors
                .iter()
                .enumerate()
                .filter(|(_, d)| !f.commutes(d).expect("sizes checked"))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Ok(DetectorModel::new(
        detectors.len(),
        n_strips,
        supports,
        strip_of_detector,
    )?)
}

/// Strip of each detector, read off from the qubits it acts on.
pub fn detector_strips(
    detectors: &[PauliString],
    assignment: &DomainAssignment,
) -> Result<Vec<usize>, PauliError> {
    detectors
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut strips = d.support().into_iter().map(|q| {
                assignment
                    .strip_of_qubit
                    .get(q)
                    .copied()
                    .ok_or(PauliError::UncoveredQubit { qubit: q })
            });
            let first = strips.next().transpose()?.unwrap_or(0);
            for s in strips {
                if s? != first {
                    return Err(PauliError::DetectorSpansStrips { detector: i });
                }
            }
            Ok(first)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformReport {
    pub deformed_detectors: Vec<PauliString>,
    /// Parent detectors against the dominant single-qubit fault on each qubit.
    pub parent_model: DetectorModel,
    /// Deformed detectors against physical `Z_v`.
    pub deformed_model: DetectorModel,
    /// Deformed incidence equals the parent incidence under `Z_v <-> E_v`.
    pub incidence_preserved: bool,
    pub parent_symmetry: StripSymmetryReport,
    pub deformed_symmetry: StripSymmetryReport,
    pub strip_symmetric: bool,
}

/// Applies a domain-wise Clifford to a parent detector family and checks that
/// physical Z noise on the result sees the same strip-symmetric incidence as
/// the parent's dominant faults.
///
/// `dominant_axis[j]` is the parent's dominant single-qubit error on strip
/// `j`; the strip's Clifford must map it to Z.
pub fn deform_and_check(
    parent_detectors: &[PauliString],
    strip_of_detector: Vec<usize>,
    assignment: &DomainAssignment,
    dominant_axis: &[Pauli],
) -> Result<DeformReport, PauliError> {
    let n = assignment.n_qubits();
    let n_strips = assignment.n_strips();
    for (strip, &clifford) in assignment.clifford_of_strip.iter().enumerate() {
        let axis = dominant_axis
            .get(strip)
            .copied()
            .ok_or(PauliError::MissingClifford { strip })?;
        let image = clifford.apply(axis);
        if image != Pauli::Z {
            return Err(PauliError::NotBiasShifting {
                strip,
                clifford,
                axis,
                image,
            });
        }
    }

    let parent_faults: Vec<PauliString> = (0..n)
        .map(|v| PauliString::single(n, v, dominant_axis[assignment.strip_of_qubit[v]]))
        .collect();
    let parent_model = incidence_from_paulis(
        parent_detectors,
        &parent_faults,
        n_strips,
        strip_of_detector.clone(),
    )?;
    let parent_symmetry = parent_model.check_strip_symmetric(true)?;
    if !parent_symmetry.strip_symmetric {
        return Err(PauliError::ParentNotStripSymmetric);
    }

    let deformed_detectors = parent_detectors
        .iter()
        .map(|d| d.conjugate(assignment))
        .collect::<Result<Vec<_>, _>>()?;
    let physical_faults: Vec<PauliString> = (0..n)
        .map(|v| PauliString::single(n, v, Pauli::Z))
        .collect();
    let deformed_model = incidence_from_paulis(
        &deformed_detectors,
        &physical_faults,
        n_strips,
        strip_of_detector,
    )?;
    let deformed_symmetry = deformed_model.check_strip_symmetric(true)?;
    let parent_h: BitMatrix = parent_model.incidence_matrix();
    let incidence_preserved = deformed_model.incidence_matrix() == parent_h;

    Ok(DeformReport {
        deformed_detectors,
        strip_symmetric: deformed_symmetry.strip_symmetric && incidence_preserved,
        parent_model,
        deformed_model,
        incidence_preserved,
        parent_symmetry,
        deformed_symmetry,
    })
}

fn random_pauli(rng: &mut impl Rng, n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(
            q,
            [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)],
        );
    }
    p
}

fn random_assignment(rng: &mut impl Rng, n: usize) -> DomainAssignment {
    let n_strips = rng.gen_range(1..=n.max(1));
    let strips = (0..n).map(|_| rng.gen_range(0..n_strips)).collect();
    let cliffords = (0..n_strips)
        .map(|_| SingleQubitClifford::ALL[rng.gen_range(0..3)])
        .collect();
    DomainAssignment::new(strips, cliffords).expect("strips in range")
}

/// Samples random Pauli pairs and domain assignments and checks that
/// conjugation preserves weight and pairwise commutation.
pub fn weight_preservation_check(trials: usize, n_qubits: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).all(|_| {
        let p = random_pauli(&mut rng, n_qubits);
        let q = random_pauli(&mut rng, n_qubits);
        let a = random_assignment(&mut rng, n_qubits);
        let p2 = p.conjugate(&a).expect("covered");
        let q2 = q.conjugate(&a).expect("covered");
        p.weight() == p2.weight()
            && q.weight() == q2.weight()
            && p.commutes(&q).expect("same size") == p2.commutes(&q2).expect("same size")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
        assert!(ps("III").commutes(&ps("XYZ")).unwrap());
        assert!(ps("XZ").commutes(&ps("X")).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(ps("IIII").weight(), 0);
        assert_eq!(ps("IIYII").weight(), 1);
        assert_eq!(ps("XZY").weight(), 3);
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(ps("IXZY").to_string(), "IXZY");
        assert!("IXQ".parse::<PauliString>().is_err());
        assert_eq!(String::from(ps("XYZ")), "XYZ");
    }

    #[test]
    fn action_tables() {
        use Pauli::*;
        use SingleQubitClifford as C;
        for p in [X, Y, Z] {
            assert_eq!(C::I.apply(p), p);
        }
        assert_eq!((C::H.apply(X), C::H.apply(Y), C::H.apply(Z)), (Z, Y, X));
        assert_eq!((C::HS.apply(X), C::HS.apply(Y), C::HS.apply(Z)), (Y, Z, X));
        for c in C::ALL {
            for p in [I, X, Y, Z] {
                assert_eq!(c.apply_inverse(c.apply(p)), p);
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let a_h = DomainAssignment::new(
            vec![0, 1, 1],
            vec![SingleQubitClifford::I, SingleQubitClifford::H],
        )
        .unwrap();
        assert_eq!(ps("IIZ").conjugate(&a_h).unwrap(), ps("IIX"));
        let a_hs = DomainAssignment::uniform(vec![0, 0, 0], SingleQubitClifford::HS);
        assert_eq!(ps("IZI").conjugate(&a_hs).unwrap(), ps("IXI"));
        let a_i = DomainAssignment::uniform(vec![0, 1, 2], SingleQubitClifford::I);
        assert_eq!(ps("XYZ").conjugate(&a_i).unwrap(), ps("XYZ"));
        let short = DomainAssignment::uniform(vec![0], SingleQubitClifford::H);
        assert!(matches!(
            ps("XX").conjugate(&short),
            Err(PauliError::UncoveredQubit { qubit: 1 })
        ));
        assert!(DomainAssignment::new(vec![0, 2], vec![SingleQubitClifford::I]).is_err());
    }

    #[test]
    fn incidence_examples() {
        let m = incidence_from_paulis(&[ps("XX")], &[ps("ZI")], 1, vec![0]).unwrap();
        assert_eq!(m.support(0), &[0]);
        let m = incidence_from_paulis(&[ps("ZZ")], &[ps("ZI")], 1, vec![0]).unwrap();
        assert!(m.support(0).is_empty());
        let m =
            incidence_from_paulis(&[ps("XXI"), ps("IXX")], &[ps("IZI")], 1, vec![0, 0]).unwrap();
        assert_eq!(m.support(0), &[0, 1]);
        assert!(incidence_from_paulis(&[ps("XX")], &[ps("Z")], 1, vec![0]).is_err());
    }

    #[test]
    fn closed_x_chain_has_one_form() {
        for n in 3..9 {
            let dets: Vec<PauliString> = (0..n)
                .map(|i| PauliString::on(n, &[i, (i + 1) % n], Pauli::X))
                .collect();
            let faults: Vec<PauliString> = (0..n)
                .map(|v| PauliString::single(n, v, Pauli::Z))
                .collect();
            let m = incidence_from_paulis(&dets, &faults, 1, vec![0; n]).unwrap();
            assert_eq!(m.check_one_form(), vec![true]);
        }
    }

    /// X-pair chain detectors on `strips` strips of `len` qubits each.
    fn x_chain(strips: usize, len: usize) -> (Vec<PauliString>, Vec<usize>, Vec<usize>) {
        let n = strips * len;
        let mut dets = Vec::new();
        let mut det_strip = Vec::new();
        for s in 0..strips {
            for i in 0..len - 1 {
                dets.push(PauliString::on(
                    n,
                    &[s * len + i, s * len + i + 1],
                    Pauli::X,
                ));
                det_strip.push(s);
            }
        }
        let qubit_strip = (0..n).map(|q| q / len).collect();
        (dets, det_strip, qubit_strip)
    }

    #[test]
    fn deform_x_chain_with_h() {
        let (dets, det_strip, qubit_strip) = x_chain(2, 4);
        let a = DomainAssignment::uniform(qubit_strip, SingleQubitClifford::H);
        let r = deform_and_check(&dets, det_strip, &a, &[Pauli::X, Pauli::X]).unwrap();
        assert!(r.incidence_preserved);
        assert!(r.strip_symmetric);
        assert_eq!(r.deformed_detectors[0].to_string(), "ZZIIIIII");
        assert_eq!(
            r.parent_model.incidence_matrix(),
            r.deformed_model.incidence_matrix()
        );
    }

    #[test]
    fn deform_identity_on_z_native_parent() {
        let n = 4;
        let dets: Vec<PauliString> = (0..n - 1)
            .map(|i| PauliString::on(n, &[i, i + 1], Pauli::Z))
            .collect();
        let a = DomainAssignment::uniform(vec![0; n], SingleQubitClifford::I);
        let r = deform_and_check(&dets, vec![0; n - 1], &a, &[Pauli::Z]).unwrap();
        assert!(r.strip_symmetric);
        assert_eq!(r.deformed_model.incidence_matrix().count_ones(), 0);
    }

    #[test]
    fn deform_alternating_strips() {
        // strip 0 is X dominant and deformed by H; strip 1 is left alone with
        // Z dominant
        let (dets, det_strip, qubit_strip) = x_chain(2, 5);
        let a = DomainAssignment::new(
            qubit_strip,
            vec![SingleQubitClifford::H, SingleQubitClifford::I],
        )
        .unwrap();
        let err =
            deform_and_check(&dets, det_strip.clone(), &a, &[Pauli::X, Pauli::X]).unwrap_err();
        assert!(matches!(err, PauliError::NotBiasShifting { strip: 1, .. }));

        let r = deform_and_check(&dets, det_strip, &a, &[Pauli::X, Pauli::Z]).unwrap();
        assert!(r.incidence_preserved && r.strip_symmetric);
        let stats = r.deformed_model.strip_stats();
        assert_eq!((stats.off_block, stats.non_local), (0, 0));
    }

    #[test]
    fn deform_rejects_non_symmetric_parent() {
        // a detector spanning both strips makes a boundary fault non-local
        let dets = vec![ps("ZZII"), ps("IZZI")];
        let a = DomainAssignment::uniform(vec![0, 0, 1, 1], SingleQubitClifford::H);
        let err = deform_and_check(&dets, vec![0, 1], &a, &[Pauli::X, Pauli::X]).unwrap_err();
        assert_eq!(err, PauliError::ParentNotStripSymmetric);
    }

    #[test]
    fn weight_preservation_examples() {
        assert!(weight_preservation_check(1000, 8, 1));
        let a = DomainAssignment::uniform(vec![0], SingleQubitClifford::H);
        assert_eq!(ps("Z").conjugate(&a).unwrap().weight(), 1);
        let a = DomainAssignment::uniform(vec![0, 0], SingleQubitClifford::HS);
        let (p, q) = (ps("XX"), ps("ZZ"));
        assert!(p.commutes(&q).unwrap());
        assert!(p
            .conjugate(&a)
            .unwrap()
            .commutes(&q.conjugate(&a).unwrap())
            .unwrap());
    }

    #[test]
    fn detector_strips_from_support() {
        let a = DomainAssignment::uniform(vec![0, 0, 1, 1], SingleQubitClifford::I);
        assert_eq!(
            detector_strips(&[ps("XXII"), ps("IIZZ")], &a).unwrap(),
            vec![0, 1]
        );
        assert!(detector_strips(&[ps("IXXI")], &a).is_err());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        proptest::collection::vec(0usize..4, n).prop_map(|v| {
            let mut p = PauliString::identity(v.len());
            for (q, k) in v.into_iter().enumerate() {
                p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k]);
            }
            p
        })
    }

    fn arb_case() -> impl Strategy<Value = (PauliString, PauliString, DomainAssignment)> {
        (1usize..17).prop_flat_map(|n| {
            (
                arb_pauli(n),
                arb_pauli(n),
                proptest::collection::vec(0usize..4, n),
                proptest::collection::vec(0usize..3, 4),
            )
                .prop_map(|(p, q, strips, cl)| {
                    let cl = cl
                        .into_iter()
                        .map(|k| SingleQubitClifford::ALL[k])
                        .collect();
                    (p, q, DomainAssignment::new(strips, cl).unwrap())
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn conjugation_preserves_weight_and_commutation((p, q, a) in arb_case()) {
            let (p2, q2) = (p.conjugate(&a).unwrap(), q.conjugate(&a).unwrap());
            prop_assert_eq!(p2.weight(), p.weight());
            prop_assert_eq!(p2.commutes(&q2).unwrap(), p.commutes(&q).unwrap());
        }

        #[test]
        fn h_conjugation_is_an_involution((p, _q, a) in arb_case()) {
            let h = DomainAssignment::uniform(a.strip_of_qubit().to_vec(), SingleQubitClifford::H);
            prop_assert_eq!(p.conjugate(&h).unwrap().conjugate(&h).unwrap(), p);
        }
    }
}
