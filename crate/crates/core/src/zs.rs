//! The Zakharov–Shabat/AKNS system
//!
//! ```text
//! V' = (Q_ZS + iλσ₃) V,   Q_ZS = ((0, ν), (ν̄, 0)),   σ₃ = diag(1, -1),
//! ```
//!
//! reduced to the canonical Dirac system with `p = Im ν`, `q = -Re ν`.
//! Its fundamental matrix is `Z(λ, x) = A^{-1} U_ν(λ, x) A` with
//! `A = ((i, -i), (1, 1))`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dirac::Potential;
use crate::grid::{Grid, SampledMat2Fn, SampledScalar};
use crate::kernel::KernelCoefficients;
use crate::solution::NsbfEvaluator;
use crate::special::spherical_bessel_pair;
use crate::spectral::BoundaryCondition;
use crate::{c64, ComplexMat2, Error, Result};

/// `A = ((i, -i), (1, 1))`.
pub const CONJUGATOR: ComplexMat2 = ComplexMat2::new(c64(0.0, 1.0), c64(0.0, -1.0), c64(1.0, 0.0), c64(1.0, 0.0));

/// `A^{-1} = (1/2) ((-i, 1), (i, 1))`.
pub const CONJUGATOR_INV: ComplexMat2 = ComplexMat2::new(c64(0.0, -0.5), c64(0.5, 0.0), c64(0.0, 0.5), c64(0.5, 0.0));

/// A complex potential `ν` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ZsPotential {
    nu: SampledScalar,
}

impl ZsPotential {
    pub fn new(nu: SampledScalar) -> Result<Self> {
        if let Some(_node) = nu.first_non_finite() {
            return Err(Error::NonFiniteInput("ZS potential"));
        }
        Ok(Self { nu })
    }

    pub fn from_fn(grid: Grid, nu: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(SampledScalar::from_fn(grid, nu))
    }

    pub fn grid(&self) -> &Grid {
        self.nu.grid()
    }

    pub fn nu(&self) -> &SampledScalar {
        &self.nu
    }

    /// `Q_ZS(x_i) = ((0, ν), (ν̄, 0))`.
    pub fn matrix_at(&self, i: usize) -> ComplexMat2 {
        let v = self.nu.value(i);
        ComplexMat2::new(c64(0.0, 0.0), v, v.conj(), c64(0.0, 0.0))
    }
}

/// The canonical potential `Q_ν`: `p = Im ν`, `q = -Re ν`.
pub fn zs_to_dirac(nu: &ZsPotential) -> Result<Potential> {
    let p = nu.nu.map(|_, v| c64(v.im, 0.0));
    let q = nu.nu.map(|_, v| c64(-v.re, 0.0));
    Potential::new(p, q)
}

/// NSBF evaluation of `Z(λ, x)` through the evaluator of `Q_ν`.
#[derive(Clone, Debug)]
pub struct ZsEvaluator {
    inner: NsbfEvaluator,
}

impl ZsEvaluator {
    /// `coeffs` must have been built from [`zs_to_dirac`] of the ZS potential.
    pub fn new(coeffs: &KernelCoefficients) -> Self {
        Self {
            inner: NsbfEvaluator::new(coeffs),
        }
    }

    pub fn from_evaluator(inner: NsbfEvaluator) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &NsbfEvaluator {
        &self.inner
    }

    pub fn grid(&self) -> &Grid {
        self.inner.grid()
    }

    /// `Z(λ, x) = A^{-1} U^N(λ, x) A`.
    pub fn evaluate_z(&self, lambda: Complex64, x: f64) -> Result<ComplexMat2> {
        Ok(conjugate(self.inner.evaluate_u(lambda, x)?))
    }

    /// `Z(λ, x_i)` at every node.
    pub fn evaluate_z_on_grid(&self, lambda: Complex64) -> Result<SampledMat2Fn> {
        Ok(self.inner.evaluate_u_on_grid(lambda)?.map(|_, u| conjugate(u)))
    }

    /// The coefficients of the series for `Z`: `A^{-1} K̃_n(x_i) A`, i.e.
    /// `2(-1)^m A^{-1} K_{2m} A` and `-2(-1)^m A^{-1} K_{2m+1} B A`.
    pub fn conjugated_coefficients(&self) -> Vec<SampledMat2Fn> {
        let grid = *self.grid();
        (0..=self.inner.order())
            .map(|n| SampledMat2Fn::from_indexed(grid, |i| conjugate(self.inner.tilde_at_node(i)[n])))
            .collect()
    }

    /// `Z(λ, x_i)` summed from [`Self::conjugated_coefficients`]:
    /// `A^{-1} U_0 A + Σ A^{-1} K̃_n A j_n(λx)`.
    pub fn evaluate_z_series(
        &self,
        coefficients: &[SampledMat2Fn],
        lambda: Complex64,
        node: usize,
    ) -> Result<ComplexMat2> {
        let x = self.grid().node(node);
        let (j, _) = spherical_bessel_pair(
            lambda * x,
            coefficients.len().saturating_sub(1),
            crate::solution::SMALL_ARGUMENT,
        )?;
        let mut acc = conjugate(crate::dirac::free_solution(lambda, x));
        for (c, jn) in coefficients.iter().zip(j) {
            acc += c.value(node) * jn;
        }
        Ok(acc)
    }
}

/// `A^{-1} M A`.
pub fn conjugate(m: ComplexMat2) -> ComplexMat2 {
    CONJUGATOR_INV * m * CONJUGATOR
}

/// Boundary conditions posed on `V = A^{-1} Y`; the characteristic function
/// becomes `det(A_left + A_right Z(λ, b))`.
pub fn zs_boundary(bc: BoundaryCondition) -> Result<BoundaryCondition> {
    bc.with_gauge(CONJUGATOR_INV, CONJUGATOR_INV)
}

/// `max ‖Z' - (Q_ZS + iλσ₃) Z‖` over interior nodes, `Z'` by finite differences.
pub fn zs_residual(z: &SampledMat2Fn, nu: &ZsPotential, lambda: Complex64) -> Result<f64> {
    if z.grid() != nu.grid() {
        return Err(Error::GridMismatch);
    }
    let dz = z.derivative();
    let i_lambda = c64(0.0, 1.0) * lambda;
    let sigma = ComplexMat2::diag(i_lambda, -i_lambda);
    let mut worst: f64 = 0.0;
    for i in 1..z.len() - 1 {
        let r = dz.value(i) - (nu.matrix_at(i) + sigma) * z.value(i);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::fundamental_solution_zero;
    use crate::kernel::build_coefficients;

    fn unit(m: usize) -> Grid {
        Grid::new(1.0, m).unwrap()
    }

    fn evaluator(nu: &ZsPotential, order: usize) -> ZsEvaluator {
        let q = zs_to_dirac(nu).unwrap();
        let hom = fundamental_solution_zero(&q).unwrap();
        ZsEvaluator::new(&build_coefficients(&q, &hom, order).unwrap())
    }

    #[test]
    fn conjugator_pair() {
        assert!((CONJUGATOR * CONJUGATOR_INV - ComplexMat2::IDENTITY).norm() < 1e-16);
        assert_eq!(CONJUGATOR.inverse().unwrap(), CONJUGATOR_INV);
        // A^{-1} B A = -iσ₃
        let expect = ComplexMat2::diag(c64(0.0, -1.0), c64(0.0, 1.0));
        assert!((conjugate(ComplexMat2::B) - expect).norm() < 1e-16);
    }

    #[test]
    fn potential_map() {
        let g = unit(10);
        for (nu, p, q) in [
            (c64(0.0, 0.0), 0.0, 0.0),
            (c64(0.0, 1.0), 1.0, 0.0),
            (c64(1.0, 2.0), 2.0, -1.0),
        ] {
            let d = zs_to_dirac(&ZsPotential::from_fn(g, |_| nu).unwrap()).unwrap();
            assert_eq!(d.at(3), ComplexMat2::real(p, q, q, -p));
        }
        assert!(ZsPotential::from_fn(g, |_| c64(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn free_system() {
        let ev = evaluator(&ZsPotential::from_fn(unit(50), |_| c64(0.0, 0.0)).unwrap(), 4);
        let lambda = c64(2.5, 0.3);
        for &x in &[0.0, 0.4, 1.0] {
            let z = ev.evaluate_z(lambda, x).unwrap();
            let i = c64(0.0, 1.0);
            let expect = ComplexMat2::diag((i * lambda * x).exp(), (-i * lambda * x).exp());
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_nu_against_exponential() {
        let nu = ZsPotential::from_fn(unit(2000), |_| c64(0.5, 0.0)).unwrap();
        let ev = evaluator(&nu, 20);
        let lambda = c64(3.0, 0.0);
        let m = nu.matrix_at(0) + ComplexMat2::diag(c64(0.0, 3.0), c64(0.0, -3.0));
        let s = (-m.det()).sqrt();
        let expect = ComplexMat2::IDENTITY * s.cosh() + m * (s.sinh() / s);
        assert!((ev.evaluate_z(lambda, 1.0).unwrap() - expect).norm() <= 1e-8);
        assert_eq!(ev.evaluate_z(lambda, 0.0).unwrap(), ComplexMat2::IDENTITY);
    }

    #[test]
    fn series_and_conjugation_agree() {
        let nu = ZsPotential::from_fn(unit(500), |x| c64(0.3, 0.4) * (core::f64::consts::PI * x).sin()).unwrap();
        let ev = evaluator(&nu, 12);
        let coeffs = ev.conjugated_coefficients();
        let lambda = c64(-4.0, 0.5);
        let z = ev.evaluate_z_on_grid(lambda).unwrap();
        for i in (0..=500).step_by(50) {
            let series = ev.evaluate_z_series(&coeffs, lambda, i).unwrap();
            assert!((series - z.value(i)).norm() < 1e-13);
        }
        assert!(zs_residual(&z, &nu, lambda).unwrap() <= 1e-6);
    }
}
