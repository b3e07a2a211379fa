//! Pseudo-density operators (PDOs) for open timelike curves.
//!
//! The crate builds the canonical two- and three-event PDOs, simulates a
//! photonic experiment in which one photon is measured twice (with collapse)
//! and its entangled partner once, reconstructs the three-event PDO from a
//! restricted measurement quorum, and evaluates the CHSH monogamy relation
//! `C_mk + C_nk <= 4` on the reconstructed marginals.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices, partial traces, Hermitian Jacobi
//!   eigensolver, pure-state fidelity.
//! * [`pauli`]: Pauli strings and correlation tables.
//! * [`pdo`]: PDO type, canonical constructors and physicality diagnostics.
//! * [`sim`]: sequential projective measurement engine and seeded sampling.
//! * [`tomography`]: measurement quorum, reconstruction, disturbance witness.
//! * [`bell`]: CHSH evaluation, optimal CHSH from the correlation matrix,
//!   monogamy sums.
//! * [`experiment`]: declarative experiment descriptions and the end-to-end
//!   pipeline used by the `pdolab` binary.

pub mod bell;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod linalg;
pub mod pauli;
pub mod pdo;
pub mod sim;
pub mod tomography;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use pauli::{CorrelationTable, Pauli, PauliString};
pub use pdo::{EventLabel, PhysicalityReport, Provenance, PseudoDensityOperator};
