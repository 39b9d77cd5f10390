//! Evaluation of the truncated series
//!
//! ```text
//! U^N(λ, x) = U_0(λ, x) + Σ_{n=0}^{N} K̃_n(x) j_n(λx),
//! K̃_{2m} = 2(-1)^m K_{2m},   K̃_{2m+1} = 2(-1)^{m+1} K_{2m+1} B,
//! ```
//!
//! its derivative in `λ`, and solutions of initial-value problems.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dirac::{dirac_residuals, free_solution, free_solution_dlambda, Potential};
use crate::grid::{Grid, SampledMat2Fn};
use crate::kernel::KernelCoefficients;
use crate::special::spherical_bessel_pair;
use crate::{c64, CVec2, ComplexMat2, Error, Result};

/// Below this `|λx|` the Bessel values come from their power series.
pub const SMALL_ARGUMENT: f64 = 0.5;

/// Precomputed `K̃_n` at every node, ready for evaluation at many `λ`.
#[derive(Clone, Debug)]
pub struct NsbfEvaluator {
    potential: Potential,
    order: usize,
    // node-major: entry `i * (order + 1) + n`
    tilde: Vec<ComplexMat2>,
}

impl NsbfEvaluator {
    pub fn new(coeffs: &KernelCoefficients) -> Self {
        let order = coeffs.order();
        let ks = coeffs.k_nonnegative();
        let len = coeffs.grid().len();
        let mut tilde = Vec::with_capacity(len * (order + 1));
        for i in 0..len {
            for (n, k) in ks.iter().enumerate() {
                tilde.push(tilde_coefficient(n, k.value(i)));
            }
        }
        Self {
            potential: coeffs.potential().clone(),
            order,
            tilde,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `K̃_0(x_i)..K̃_N(x_i)`.
    pub fn tilde_at_node(&self, i: usize) -> &[ComplexMat2] {
        let w = self.order + 1;
        &self.tilde[i * w..(i + 1) * w]
    }

    /// `K̃_n(x)` for every `n`; off-grid points use cubic interpolation.
    pub fn tilde_at(&self, x: f64) -> Result<Cow<'_, [ComplexMat2]>> {
        let grid = self.grid();
        grid.check_point(x)?;
        if let Some(i) = grid.node_index(x) {
            if (x - grid.node(i)).abs() <= 1e-15 * grid.length() {
                return Ok(Cow::Borrowed(self.tilde_at_node(i)));
            }
        }
        let (start, w) = grid.stencil(x, 4);
        let mut out = alloc::vec![ComplexMat2::ZERO; self.order + 1];
        for (j, &wj) in w.iter().enumerate().take(4) {
            for (o, t) in out.iter_mut().zip(self.tilde_at_node(start + j)) {
                *o += *t * wj;
            }
        }
        Ok(Cow::Owned(out))
    }

    /// `U^N(λ, x)`.
    pub fn evaluate_u(&self, lambda: Complex64, x: f64) -> Result<ComplexMat2> {
        let tilde = self.tilde_at(x)?;
        let (j, _) = bessel(lambda, x, self.order)?;
        Ok(series_u(lambda, x, &tilde, &j))
    }

    /// `U^N(λ, x_i)` at every node.
    pub fn evaluate_u_on_grid(&self, lambda: Complex64) -> Result<SampledMat2Fn> {
        let grid = *self.grid();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let x = grid.node(i);
            let (j, _) = bessel(lambda, x, self.order)?;
            values.push(series_u(lambda, x, self.tilde_at_node(i), &j));
        }
        SampledMat2Fn::from_values(grid, values)
    }

    /// `∂_λ U^N(λ, x)`, finite at `λ = 0`.
    pub fn evaluate_du_dlambda(&self, lambda: Complex64, x: f64) -> Result<ComplexMat2> {
        Ok(self.evaluate_with_derivative(lambda, x)?.1)
    }

    /// `U^N(λ, x)` and `∂_λ U^N(λ, x)` from one Bessel sequence.
    pub fn evaluate_with_derivative(&self, lambda: Complex64, x: f64) -> Result<(ComplexMat2, ComplexMat2)> {
        let tilde = self.tilde_at(x)?;
        let (j, over) = bessel(lambda, x, self.order + 1)?;
        let u = series_u(lambda, x, &tilde, &j);
        let mut du = free_solution_dlambda(lambda, x);
        for (n, t) in tilde.iter().enumerate() {
            // d/dλ j_n(λx) = x (n j_n/z - j_{n+1}) = x (j_{n-1} - (n+1) j_n/z)
            let factor = if n % 2 == 0 {
                (over[n] * n as f64 - j[n + 1]) * x
            } else {
                (j[n - 1] - over[n] * (n + 1) as f64) * x
            };
            du += *t * factor;
        }
        Ok((u, du))
    }

    /// `Y^N(λ, x_i) = U^N(λ, x_i) c` at every node, with nodewise residuals.
    pub fn solve_ivp(&self, lambda: Complex64, c: CVec2) -> Result<IvpSolution> {
        if !(lambda.is_finite() && c.iter().all(|v| v.is_finite())) {
            return Err(Error::NonFiniteInput("initial-value data"));
        }
        let u = self.evaluate_u_on_grid(lambda)?;
        let columns = u.map(|_, m| {
            let y = m * c;
            ComplexMat2::from_columns(y, [c64(0.0, 0.0); 2])
        });
        let residuals = dirac_residuals(&columns, &self.potential, lambda)?;
        let values = columns.values().iter().map(|m| m.column(0)).collect();
        Ok(IvpSolution {
            lambda,
            initial: c,
            grid: *self.grid(),
            values,
            residuals,
        })
    }
}

fn tilde_coefficient(n: usize, k: ComplexMat2) -> ComplexMat2 {
    let m = n / 2;
    if n % 2 == 0 {
        let sign = if m % 2 == 0 { 2.0 } else { -2.0 };
        k * sign
    } else {
        let sign = if m % 2 == 0 { -2.0 } else { 2.0 };
        k * ComplexMat2::B * sign
    }
}

fn bessel(lambda: Complex64, x: f64, n_max: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if !lambda.is_finite() {
        return Err(Error::NonFiniteInput("spectral parameter"));
    }
    spherical_bessel_pair(lambda * x, n_max, SMALL_ARGUMENT)
}

fn series_u(lambda: Complex64, x: f64, tilde: &[ComplexMat2], j: &[Complex64]) -> ComplexMat2 {
    tilde
        .iter()
        .zip(j)
        .fold(free_solution(lambda, x), |acc, (t, &jn)| acc + *t * jn)
}

/// `Y^N(λ, ·)` sampled on the grid.
#[derive(Clone, Debug)]
pub struct IvpSolution {
    lambda: Complex64,
    initial: CVec2,
    grid: Grid,
    values: Vec<CVec2>,
    residuals: Vec<f64>,
}

impl IvpSolution {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn initial_value(&self) -> CVec2 {
        self.initial
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[CVec2] {
        &self.values
    }

    /// `‖B Y' + Q Y - λ Y‖` per node (finite differences).
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Largest residual over interior nodes.
    pub fn max_residual(&self) -> f64 {
        let r = &self.residuals;
        r[1..r.len() - 1].iter().fold(0.0, |m: f64, &v| m.max(v))
    }
}
