/// Every numerical tolerance used by checks and verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Single exact-arithmetic operation (norms, Hermiticity).
    pub exact: f64,
    /// Errors compounded over a chain of operations.
    pub compounded: f64,
    /// Fast-forwarded evolution against the dense oracle.
    pub ff_oracle: f64,
    /// Largest dimension handed to a dense eigendecomposition.
    pub oracle_cap: usize,
    /// Largest mode count for the Bogoliubov solver.
    pub mode_cap: usize,
    /// Eigenvalues below this are treated as zero modes.
    pub zero_mode: f64,
}

impl Tolerances {
    pub const DEFAULT: Self = Self {
        exact: 1e-12,
        compounded: 1e-9,
        ff_oracle: 1e-6,
        oracle_cap: 4096,
        mode_cap: 64,
        zero_mode: 1e-10,
    };

    pub const STRICT: Self = Self {
        exact: 1e-13,
        compounded: 1e-10,
        ff_oracle: 1e-7,
        oracle_cap: 4096,
        mode_cap: 64,
        zero_mode: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
