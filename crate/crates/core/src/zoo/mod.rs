//! Hamiltonian families that can be fast-forwarded.

pub mod commuting;
pub mod fermion;
pub mod hamming;
pub mod path;

pub use commuting::{commuting_ff, random_commuting, sum_sigma_z, verify_commuting, CommutingEvolution, CommutingLocalHamiltonian, LocalTerm};
pub use fermion::{bogoliubov_diagonalize, fock_matrix, quadratic_ff, BogoliubovFactorization, QuadraticHamiltonian};
pub use hamming::hamming_weight_seem;
pub use path::{path_spectrum, PathHamiltonian};
