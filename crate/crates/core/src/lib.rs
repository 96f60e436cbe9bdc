//! Strip-symmetric Z-detector models under pure dephasing.
//!
//! Dense GF(2) algebra, detector models with strip partitions and their
//! block structure, symplectic Paulis with domain-wise Clifford deformation,
//! the benchmark code-family shadows, exact ML decoders and a seeded
//! Monte-Carlo harness.

pub mod decode;
pub mod families;
pub mod gf2;
pub mod model;
pub mod pauli;
pub mod sim;

pub use decode::{
    decode_monolithic, decode_stripwise, ml_chain, ml_exhaustive, ChainDecoder, DecodeError,
    DecodeResult, MonolithicDecoder, NoiseModel, PreparedDecoder, StripwiseDecoder,
};
pub use families::{build, FamilyError, FamilyId, FamilyModel, StatsRow};
pub use gf2::{BitMatrix, BitVector, Gf2Error, Permutation};
pub use model::format::{parse_detmodel, write_detmodel};
pub use model::{
    BlockDecomposition, DetectorModel, FaultStrip, ModelError, StripStats, StripSymmetryReport,
};
pub use pauli::{
    deform_and_check, DeformReport, DomainAssignment, Pauli, PauliError, PauliString,
    SingleQubitClifford,
};
pub use sim::{
    analytic_rep, bench, run_sim, BenchReport, DecoderKind, SimConfig, SimError, SimPoint,
};
