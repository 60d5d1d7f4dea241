//! Dense complex amplitudes over dubit registers.
//!
//! A [`StateVector`] holds the internal wave of an n-dubit register as
//! 2^n complex amplitudes. Sub-normalized states are first-class (the
//! engine produces them when paths cancel); super-normalized states are
//! rejected at construction. Dubit 0 is the most significant position of
//! the basis index, matching left-to-right ket notation |q0 q1 ... ⟩.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Registers larger than this are refused by the default constructors;
/// 2^26 complex doubles is about 1 GiB.
pub const DEFAULT_DUBIT_CAP: usize = 26;

/// Tolerance on the squared norm: states may exceed 1 by at most this.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_dubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validating constructor: length must be exactly 2^n, all amplitudes
    /// finite, squared norm at most 1 + `NORM_TOLERANCE`.
    pub fn new(n_dubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(n_dubits, DEFAULT_DUBIT_CAP)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        let state = StateVector { n_dubits, amps };
        let norm_sq = state.norm_sq();
        if norm_sq > 1.0 + NORM_TOLERANCE {
            return Err(Error::NormTooLarge { norm_sq });
        }
        Ok(state)
    }

    /// Basis state |index⟩ on `n_dubits` dubits. `(0, 0)` is the scalar
    /// space `[1]`.
    pub fn basis_state(n_dubits: usize, index: usize) -> Result<Self> {
        Self::basis_state_with_cap(n_dubits, index, DEFAULT_DUBIT_CAP)
    }

    /// Same as [`basis_state`](Self::basis_state) with an explicit memory cap.
    pub fn basis_state_with_cap(n_dubits: usize, index: usize, cap: usize) -> Result<Self> {
        let dim = checked_dim(n_dubits, cap)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_dubits, amps })
    }

    /// The null wave: every amplitude zero. Legal (a fully cancelled
    /// register) and useful as an accumulator.
    pub fn zero(n_dubits: usize) -> Result<Self> {
        let dim = checked_dim(n_dubits, DEFAULT_DUBIT_CAP)?;
        Ok(StateVector {
            n_dubits,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    /// Internal constructor for kernels whose arithmetic preserves the
    /// invariants by construction.
    pub(crate) fn from_amps_unchecked(n_dubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_dubits);
        StateVector { n_dubits, amps }
    }

    pub fn n_dubits(&self) -> usize {
        self.n_dubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Σ|amplitude|², summed in ascending index order. The summation order
    /// is fixed so results are bit-identical across runs and thread counts.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩, conjugate-linear in `self`. Ascending index order.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_dubits != other.n_dubits {
            return Err(Error::DimensionMismatch {
                left: self.n_dubits,
                right: other.n_dubits,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(other.amps.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Kronecker product; `self`'s dubits become the most significant.
    /// Amplitude at (i·2^m + j) is `self[i]·other[j]` with m = other.n_dubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        self.tensor_with_cap(other, DEFAULT_DUBIT_CAP)
    }

    pub fn tensor_with_cap(&self, other: &StateVector, cap: usize) -> Result<StateVector> {
        let n = self.n_dubits + other.n_dubits;
        checked_dim(n, cap)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n_dubits: n, amps })
    }

    /// Largest elementwise |difference| against another state of the same size.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n_dubits, other.n_dubits);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn checked_dim(n_dubits: usize, cap: usize) -> Result<usize> {
    if n_dubits > cap {
        return Err(Error::RegisterTooLarge { n_dubits, cap });
    }
    Ok(1usize << n_dubits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_places_single_amplitude() {
        let s = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = StateVector::basis_state(2, 3).unwrap();
        assert_eq!(s.amp(3), c(1.0, 0.0));
        assert_eq!(s.norm_sq(), 1.0);

        // Scalar space: zero dubits, one amplitude.
        let s = StateVector::basis_state(0, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn basis_state_rejects_out_of_range_index() {
        assert_eq!(
            StateVector::basis_state(1, 2),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        );
    }

    #[test]
    fn construction_rejects_super_normalized_and_non_finite() {
        let err = StateVector::new(0, vec![c(1.1, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NormTooLarge { .. }));
        let err = StateVector::new(0, vec![c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFiniteAmplitude);
        let err = StateVector::new(1, vec![c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn memory_cap_is_enforced_and_configurable() {
        assert!(matches!(
            StateVector::basis_state(DEFAULT_DUBIT_CAP + 1, 0),
            Err(Error::RegisterTooLarge { .. })
        ));
        // A smaller explicit cap applies.
        assert!(StateVector::basis_state_with_cap(4, 0, 3).is_err());
        assert!(StateVector::basis_state_with_cap(3, 0, 3).is_ok());

        // Tensor products that would overflow the cap are refused.
        let a = StateVector::basis_state(2, 0).unwrap();
        let b = StateVector::basis_state(2, 0).unwrap();
        assert!(matches!(
            a.tensor_with_cap(&b, 3),
            Err(Error::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn tensor_of_basis_states_is_basis_product() {
        let a = StateVector::basis_state(1, 0).unwrap();
        let b = StateVector::basis_state(1, 1).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(
            t.amplitudes(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn tensor_with_scalar_is_identity() {
        let a = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(0, 0).unwrap();
        assert_eq!(a.tensor(&one).unwrap(), a);
        assert_eq!(one.tensor(&a).unwrap(), a);
    }

    #[test]
    fn tensor_expands_superpositions() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(1, vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        let t = plus.tensor(&zero).unwrap();
        assert_eq!(
            t.amplitudes(),
            &[c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn norm_sq_examples() {
        let s = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(s.norm_sq(), 1.0);
        let s = StateVector::new(1, vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(s.norm_sq(), 0.5);
        // The residual amplitude of a four-item search: norm² = 1/4.
        let s =
            StateVector::new(2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.norm_sq(), 0.25);
    }

    #[test]
    fn inner_product_examples() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(zero.inner_product(&one).unwrap(), c(0.0, 0.0));
        assert_eq!(zero.inner_product(&zero).unwrap(), c(1.0, 0.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(1, vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let minus = StateVector::new(1, vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
        assert!(plus.inner_product(&minus).unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = StateVector::new(0, vec![c(0.0, 0.5)]).unwrap();
        let b = StateVector::new(0, vec![c(0.5, 0.0)]).unwrap();
        // ⟨(i/2)|(1/2)⟩ = conj(i/2)·(1/2) = -i/4
        assert_eq!(a.inner_product(&b).unwrap(), c(0.0, -0.25));
    }

    #[test]
    fn inner_product_rejects_dimension_mismatch() {
        let a = StateVector::basis_state(1, 0).unwrap();
        let b = StateVector::basis_state(2, 0).unwrap();
        assert!(a.inner_product(&b).is_err());
    }

    proptest! {
        #[test]
        fn tensor_norm_is_multiplicative(seed in any::<u64>(), na in 0usize..6, nb in 0usize..5) {
            let mut rng = SplitMix64::new(seed);
            let a = randgen::random_state(&mut rng, na);
            let b = randgen::random_state(&mut rng, nb);
            let t = a.tensor(&b).unwrap();
            let lhs = t.norm_sq();
            let rhs = a.norm_sq() * b.norm_sq();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn self_inner_product_equals_norm_sq(seed in any::<u64>(), n in 0usize..6) {
            let mut rng = SplitMix64::new(seed);
            let a = randgen::random_state(&mut rng, n);
            let ip = a.inner_product(&a).unwrap();
            prop_assert!(ip.im.abs() < 1e-12);
            prop_assert!(ip.re >= 0.0);
            prop_assert!((ip.re - a.norm_sq()).abs() < 1e-12);
        }

        #[test]
        fn tensor_is_associative_up_to_relabeling(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let a = randgen::random_state(&mut rng, 2);
            let b = randgen::random_state(&mut rng, 1);
            let d = randgen::random_state(&mut rng, 2);
            let left = a.tensor(&b).unwrap().tensor(&d).unwrap();
            let right = a.tensor(&b.tensor(&d).unwrap()).unwrap();
            prop_assert!(left.max_abs_diff(&right) < 1e-15);
        }
    }
}
