//! Algorithms built on energy measurement and fast-forwarding: solving
//! OEOTL, Grover search as an energy measurement, and cyclic graph
//! automorphism by orbit-length finding.

pub mod cga;
pub mod grover;
pub mod oeotl;

pub use cga::{cga_solve, congruence_solve, permutation_order, CgaAnswer, CgaInstance, Graph, Permutation};
pub use grover::{grover_effective_hamiltonian, grover_via_energy_measurement, GroverInstance, GroverRun};
pub use oeotl::{oeotl_solve, path_seem_oracle, OeotlInstance, OeotlOutcome, OracleMode, SeemOracleConfig};
