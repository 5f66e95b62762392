//! Energy measurement of `sum_i sigma_z^{(i)}` by coherently counting ones.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::state::StateVector;

/// `ceil(log2(n + 1))`.
pub fn weight_register_width(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// Writes `w(i)` into a fresh register (`|i>|0> -> |i>|w(i)>`), measures it
/// and returns `n - 2 w` with the system state left behind. Superpositions of
/// equal-weight strings come back unchanged.
pub fn hamming_weight_seem(state: &StateVector, rng: &mut RngStream) -> Result<(i64, StateVector)> {
    let n = state.num_qubits().ok_or(Error::NotQubitBasis)?;
    let a = weight_register_width(n);
    if n + a > crate::pe::fourier::CIRCUIT_QUBITS {
        return Err(Error::invalid("register too wide for the counting circuit"));
    }
    // ancilla on the low qubits; the counting map is a permutation
    let mut joint = vec![C64::new(0.0, 0.0); 1 << (n + a)];
    for (i, z) in state.amplitudes().iter().enumerate() {
        joint[(i << a) | i.count_ones() as usize] = *z;
    }
    let joint = StateVector::from_amplitudes(n + a, joint)?;
    let targets: Vec<usize> = (0..a).collect();
    let (w, post) = joint.measure_qubits(&targets, rng)?;
    let sys: Vec<C64> = (0..state.dim()).map(|i| post.amplitude((i << a) | w as usize)).collect();
    Ok((n as i64 - 2 * w as i64, StateVector::normalized(n, sys)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::state_distance;

    #[test]
    fn extremes() {
        let mut rng = RngStream::new(0, 0);
        let (e, post) = hamming_weight_seem(&StateVector::zero(5), &mut rng).unwrap();
        assert_eq!(e, 5);
        assert_eq!(post, StateVector::zero(5));
        let (e, _) = hamming_weight_seem(&StateVector::basis_state(5, 31).unwrap(), &mut rng).unwrap();
        assert_eq!(e, -5);
    }

    #[test]
    fn fixed_weight_superposition_survives() {
        let s = 1.0 / 2.0f64.sqrt();
        let psi = StateVector::from_amplitudes(2, vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let (e, post) = hamming_weight_seem(&psi, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(e, 0);
        assert!(state_distance(&post, &psi).unwrap() < 1e-15);
    }

    #[test]
    fn widths() {
        assert_eq!(weight_register_width(1), 1);
        assert_eq!(weight_register_width(3), 2);
        assert_eq!(weight_register_width(4), 3);
        assert_eq!(weight_register_width(7), 3);
    }
}
