//! Problem data of the canonical system `B Y' + Q Y = λ Y`, the free
//! solution, the fundamental solution at `λ = 0` and the solution operator
//! `S` of the non-homogeneous system.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::{Grid, SampledMat2Fn, SampledScalar};
use crate::{c64, ComplexMat2, Error, Result};

/// Default number of integrator substeps per grid cell.
pub const DEFAULT_SUBSTEPS: usize = 10;

/// Symmetric trace-free potential `Q = ((p, q), (q, -p))` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    p: SampledScalar,
    q: SampledScalar,
    matrix: SampledMat2Fn,
}

impl Potential {
    pub fn new(p: SampledScalar, q: SampledScalar) -> Result<Self> {
        let matrix = p.zip_with(&q, |_, p, q| ComplexMat2::potential(p, q))?;
        if !matrix.is_finite() {
            return Err(Error::NonFiniteInput("potential sample"));
        }
        Ok(Self { p, q, matrix })
    }

    pub fn from_fns(grid: Grid, p: impl Fn(f64) -> Complex64, q: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(SampledScalar::from_fn(grid, p), SampledScalar::from_fn(grid, q))
    }

    pub fn zero(grid: Grid) -> Self {
        let z = SampledScalar::zeros(grid);
        Self {
            p: z.clone(),
            q: z,
            matrix: SampledMat2Fn::zeros(grid),
        }
    }

    pub fn constant(grid: Grid, p: Complex64, q: Complex64) -> Result<Self> {
        Self::from_fns(grid, |_| p, |_| q)
    }

    pub fn grid(&self) -> &Grid {
        self.p.grid()
    }

    pub fn p(&self) -> &SampledScalar {
        &self.p
    }

    pub fn q(&self) -> &SampledScalar {
        &self.q
    }

    pub fn matrix(&self) -> &SampledMat2Fn {
        &self.matrix
    }

    pub fn at(&self, i: usize) -> ComplexMat2 {
        self.matrix.value(i)
    }

    /// `max_i ‖Q(x_i)‖`.
    pub fn sup_norm(&self) -> f64 {
        self.matrix.max_norm()
    }

    /// Whether every sample of `p` and `q` is real.
    pub fn is_real(&self) -> bool {
        self.p.values().iter().chain(self.q.values()).all(|z| z.im == 0.0)
    }
}

/// `U_0(λ, x) = ((cos λx, -sin λx), (sin λx, cos λx))`, the solution of the
/// free system with `U_0(λ, 0) = I`.
pub fn free_solution(lambda: Complex64, x: f64) -> ComplexMat2 {
    ComplexMat2::rotation(lambda * x)
}

/// `∂_λ U_0(λ, x) = x·((-sin λx, -cos λx), (cos λx, -sin λx))`.
pub fn free_solution_dlambda(lambda: Complex64, x: f64) -> ComplexMat2 {
    let z = lambda * x;
    let (s, c) = (z.sin() * x, z.cos() * x);
    ComplexMat2::new(-s, -c, c, -s)
}

/// Inverse of a matrix with unit determinant: `((d, -b), (-c, a))`.
pub fn invert_unimodular(a: ComplexMat2) -> Result<ComplexMat2> {
    let det_error = (a.det() - c64(1.0, 0.0)).norm();
    if !(det_error <= 1e-6) {
        return Err(Error::NotUnimodular { det_error });
    }
    Ok(a.adjugate())
}

/// Settings of the fundamental-solution integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalOptions {
    /// RK4 substeps per grid cell.
    pub substeps: usize,
    /// Residual acceptance level; `None` selects `1e-8·(1 + ‖Q‖_∞·b)`.
    pub residual_tolerance: Option<f64>,
    /// Whether an excessive residual is an error.
    pub check_residual: bool,
}

impl Default for FundamentalOptions {
    fn default() -> Self {
        Self {
            substeps: DEFAULT_SUBSTEPS,
            residual_tolerance: None,
            check_residual: true,
        }
    }
}

/// `U(0, x)` and its inverse sampled on the grid.
#[derive(Clone, Debug)]
pub struct HomogeneousSolution {
    u: SampledMat2Fn,
    u_inv: SampledMat2Fn,
    residual: f64,
    max_det_error: f64,
}

impl HomogeneousSolution {
    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `U(0, x_i)`.
    pub fn u(&self) -> &SampledMat2Fn {
        &self.u
    }

    /// `U^{-1}(0, x_i)`.
    pub fn u_inv(&self) -> &SampledMat2Fn {
        &self.u_inv
    }

    /// Interior-node residual `max ‖B U' + Q U‖`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max_i |det U(0, x_i) - 1|`.
    pub fn max_det_error(&self) -> f64 {
        self.max_det_error
    }
}

/// `U(0, x)` with default settings.
pub fn fundamental_solution_zero(q: &Potential) -> Result<HomogeneousSolution> {
    fundamental_solution_zero_with(q, &FundamentalOptions::default())
}

/// Integrates `U' = B Q U`, `U(0) = I` by classical RK4 on a refined grid,
/// with `Q` between nodes from six-point Lagrange interpolation.
pub fn fundamental_solution_zero_with(q: &Potential, options: &FundamentalOptions) -> Result<HomogeneousSolution> {
    let grid = *q.grid();
    let substeps = options.substeps.max(1);
    let h = grid.step() / substeps as f64;
    let qm = q.matrix();
    let bq_at = |x: f64| -> ComplexMat2 {
        let (start, w) = grid.stencil(x, 6);
        let mut acc = ComplexMat2::ZERO;
        for (j, &wj) in w.iter().enumerate().take(6) {
            acc += qm.value(start + j) * wj;
        }
        ComplexMat2::B * acc
    };

    let mut values = alloc::vec::Vec::with_capacity(grid.len());
    let mut u = ComplexMat2::IDENTITY;
    values.push(u);
    for cell in 0..grid.intervals() {
        let x0 = grid.node(cell);
        let mut a_left = ComplexMat2::B * qm.value(cell);
        for s in 0..substeps {
            let x = x0 + s as f64 * h;
            let a_mid = bq_at(x + 0.5 * h);
            let a_right = if s + 1 == substeps {
                ComplexMat2::B * qm.value(cell + 1)
            } else {
                bq_at(x + h)
            };
            let k1 = a_left * u;
            let k2 = a_mid * (u + k1 * (0.5 * h));
            let k3 = a_mid * (u + k2 * (0.5 * h));
            let k4 = a_right * (u + k3 * h);
            u += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
            a_left = a_right;
        }
        if !u.is_finite() {
            return Err(Error::NonFiniteCoefficient { n: 0, node: cell + 1 });
        }
        values.push(u);
    }
    let u = SampledMat2Fn::from_values(grid, values)?;

    let mut max_det_error: f64 = 0.0;
    for m in u.values() {
        let err = (m.det() - c64(1.0, 0.0)).norm();
        max_det_error = max_det_error.max(err);
        if !(err <= 1e-10 * m.norm_sqr().max(1.0)) {
            return Err(Error::NotUnimodular { det_error: err });
        }
    }
    let u_inv = u.map(|_, m| m.adjugate());
    let residual = dirac_residual(&u, q, c64(0.0, 0.0))?;
    let tolerance = options
        .residual_tolerance
        .unwrap_or(1e-8 * (1.0 + q.sup_norm() * grid.length()));
    if options.check_residual && !(residual <= tolerance) {
        return Err(Error::ResidualTooLarge { residual, tolerance });
    }
    Ok(HomogeneousSolution {
        u,
        u_inv,
        residual,
        max_det_error,
    })
}

/// The solution of `B Y' + Q Y = H`, `Y(0) = 0`:
/// `Y(x) = U(0, x) ∫_0^x U^{-1}(0, t) Bᵀ H(t) dt`.
pub fn apply_s(h: &SampledMat2Fn, hom: &HomogeneousSolution) -> Result<SampledMat2Fn> {
    let integrand = h.zip_with(hom.u_inv(), |_, h, u_inv| u_inv * (ComplexMat2::B_T * h))?;
    integrand.indefinite_integral().left_mul(hom.u())
}

/// `max ‖B Y' + Q Y - λ Y‖` over interior nodes, with `Y'` from six-point
/// finite differences.
pub fn dirac_residual(y: &SampledMat2Fn, q: &Potential, lambda: Complex64) -> Result<f64> {
    let r = dirac_residuals(y, q, lambda)?;
    Ok(r[1..r.len() - 1].iter().fold(0.0, |m: f64, &v| m.max(v)))
}

/// Nodewise `‖B Y' + Q Y - λ Y‖`; the end nodes use one-sided stencils.
pub fn dirac_residuals(y: &SampledMat2Fn, q: &Potential, lambda: Complex64) -> Result<Vec<f64>> {
    if y.grid() != q.grid() {
        return Err(Error::GridMismatch);
    }
    let dy = y.derivative();
    Ok((0..y.len())
        .map(|i| {
            let yi = y.value(i);
            (ComplexMat2::B * dy.value(i) + q.at(i) * yi - yi * lambda).norm()
        })
        .collect())
}
