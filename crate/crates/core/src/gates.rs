//! A handful of fixed single-qubit gates.

use alloc::vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::DenseOperator;

fn op(entries: [C64; 4]) -> DenseOperator {
    DenseOperator::from_rows(2, vec![entries[0], entries[1], entries[2], entries[3]])
        .expect("2x2 gate")
}

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);

pub fn hadamard() -> DenseOperator {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    op([h, h, h, -h])
}

pub fn pauli_x() -> DenseOperator {
    op([O, I1, I1, O])
}

pub fn pauli_y() -> DenseOperator {
    op([O, C64::new(0.0, -1.0), C64::new(0.0, 1.0), O])
}

pub fn pauli_z() -> DenseOperator {
    op([I1, O, O, -I1])
}

/// `diag(1, e^{i phi})`.
pub fn phase(phi: f64) -> DenseOperator {
    op([I1, O, O, C64::new(phi.cos(), phi.sin())])
}
