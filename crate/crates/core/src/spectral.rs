//! Two-point boundary-value problems
//!
//! ```text
//! A_left Y(0) + A_right Y(b) = 0,
//! ```
//!
//! their characteristic function `Δ(λ) = det(A_left + A_right U^N(λ, b))`,
//! and the search for real eigenvalues by sign-change scanning and
//! safeguarded Newton refinement.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::solution::NsbfEvaluator;
use crate::{c64, ComplexMat2, Error, Result};

type BlockFn = Arc<dyn Fn(Complex64) -> ComplexMat2 + Send + Sync>;

/// One coefficient block of the boundary condition.
#[derive(Clone)]
pub enum Block {
    Constant(ComplexMat2),
    /// A block depending on `λ`, optionally with its derivative.
    Dynamic {
        value: BlockFn,
        derivative: Option<BlockFn>,
    },
}

impl Block {
    pub fn dynamic(
        value: impl Fn(Complex64) -> ComplexMat2 + Send + Sync + 'static,
        derivative: Option<BlockFn>,
    ) -> Self {
        Block::Dynamic {
            value: Arc::new(value),
            derivative,
        }
    }

    pub fn at(&self, lambda: Complex64) -> ComplexMat2 {
        match self {
            Block::Constant(m) => *m,
            Block::Dynamic { value, .. } => value(lambda),
        }
    }

    /// `d/dλ` of the block, `None` when no derivative was supplied.
    pub fn derivative_at(&self, lambda: Complex64) -> Option<ComplexMat2> {
        match self {
            Block::Constant(_) => Some(ComplexMat2::ZERO),
            Block::Dynamic { derivative, .. } => derivative.as_ref().map(|d| d(lambda)),
        }
    }

    pub fn has_derivative(&self) -> bool {
        !matches!(self, Block::Dynamic { derivative: None, .. })
    }

    fn times(self, g: ComplexMat2) -> Self {
        match self {
            Block::Constant(m) => Block::Constant(m * g),
            Block::Dynamic { value, derivative } => Block::Dynamic {
                value: Arc::new(move |l| value(l) * g),
                derivative: derivative.map(|d| Arc::new(move |l| d(l) * g) as BlockFn),
            },
        }
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Block::Dynamic { derivative, .. } => f
                .debug_struct("Dynamic")
                .field("derivative", &derivative.is_some())
                .finish_non_exhaustive(),
        }
    }
}

/// `A_left Y(0) + A_right Y(b) = 0`, possibly stated for a gauge-transformed
/// unknown.
#[derive(Clone, Debug)]
pub struct BoundaryCondition {
    left: Block,
    right: Block,
    scale: Complex64,
}

impl BoundaryCondition {
    pub fn new(left: Block, right: Block) -> Self {
        Self {
            left,
            right,
            scale: c64(1.0, 0.0),
        }
    }

    pub fn constant(left: ComplexMat2, right: ComplexMat2) -> Self {
        Self::new(Block::Constant(left), Block::Constant(right))
    }

    /// `y_1(0) = y_1(b) = 0`.
    pub fn dirichlet() -> Self {
        Self::constant(
            ComplexMat2::real(1.0, 0.0, 0.0, 0.0),
            ComplexMat2::real(0.0, 0.0, 1.0, 0.0),
        )
    }

    /// Conditions stated for `Z(x) = G(x) Y(x)`: the blocks become
    /// `A_left G(0)` and `A_right G(b)`, and `Δ` is divided by `det G(0)` so
    /// that it equals `det(A_left + A_right G(b) U G(0)^{-1})`.
    pub fn with_gauge(self, at_start: ComplexMat2, at_end: ComplexMat2) -> Result<Self> {
        let det = at_start.det();
        if det.norm() <= f64::EPSILON * at_start.norm_sqr().max(1e-300) || at_end.inverse().is_none() {
            return Err(Error::SingularGauge);
        }
        Ok(Self {
            left: self.left.times(at_start),
            right: self.right.times(at_end),
            scale: self.scale / det,
        })
    }

    /// Gauge `Z = R(φ) Y` with the rotation `R(φ) = ((cos φ, -sin φ), (sin φ, cos φ))`.
    pub fn with_rotation_gauge(self, phi_start: f64, phi_end: f64) -> Result<Self> {
        self.with_gauge(
            ComplexMat2::rotation(c64(phi_start, 0.0)),
            ComplexMat2::rotation(c64(phi_end, 0.0)),
        )
    }

    pub fn left(&self) -> &Block {
        &self.left
    }

    pub fn right(&self) -> &Block {
        &self.right
    }

    pub fn has_derivative(&self) -> bool {
        self.left.has_derivative() && self.right.has_derivative()
    }

    fn blocks(&self, lambda: Complex64) -> Result<(ComplexMat2, ComplexMat2)> {
        let (l, r) = (self.left.at(lambda), self.right.at(lambda));
        if l == ComplexMat2::ZERO && r == ComplexMat2::ZERO {
            return Err(Error::DegenerateBoundary);
        }
        Ok((l, r))
    }
}

/// `Δ_N(λ) = det(A_left(λ) + A_right(λ) U^N(λ, b))`.
pub fn char_function(ev: &NsbfEvaluator, bc: &BoundaryCondition, lambda: Complex64) -> Result<Complex64> {
    let (l, r) = bc.blocks(lambda)?;
    let u = ev.evaluate_u(lambda, ev.grid().length())?;
    Ok((l + r * u).det() * bc.scale)
}

/// `dΔ_N/dλ` by Jacobi's formula in adjugate form, `tr(adj(M) dM)`, which
/// stays valid when `M` is singular.
pub fn char_function_derivative(ev: &NsbfEvaluator, bc: &BoundaryCondition, lambda: Complex64) -> Result<Complex64> {
    Ok(char_function_with_derivative(ev, bc, lambda)?.1)
}

/// `Δ_N(λ)` and `dΔ_N/dλ` sharing one Bessel evaluation.
pub fn char_function_with_derivative(
    ev: &NsbfEvaluator,
    bc: &BoundaryCondition,
    lambda: Complex64,
) -> Result<(Complex64, Complex64)> {
    let (l, r) = bc.blocks(lambda)?;
    let (dl, dr) = match (bc.left.derivative_at(lambda), bc.right.derivative_at(lambda)) {
        (Some(dl), Some(dr)) => (dl, dr),
        _ => return Err(Error::DerivativeUnavailable),
    };
    let (u, du) = ev.evaluate_with_derivative(lambda, ev.grid().length())?;
    let m = l + r * u;
    let dm = dl + dr * u + r * du;
    Ok((m.det() * bc.scale, (m.adjugate() * dm).trace() * bc.scale))
}

/// Outcome of a root refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootStatus {
    Converged,
    /// Converged only linearly or hit a vanishing derivative: a multiple
    /// root or a touching minimum, not a simple eigenvalue.
    Flat,
    /// Iteration budget exhausted; the record holds the best point seen.
    NotConverged,
}

/// One eigenvalue found by [`refine_root`] or [`scan_eigenvalues`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueRecord {
    pub index: i64,
    pub lambda: Complex64,
    /// `|Δ_N(λ)|`.
    pub residual: f64,
    pub iterations: usize,
    pub status: RootStatus,
}

/// Controls of the Newton refinement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    /// Acceptance level for `|Δ_N(λ)|`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 100,
        }
    }
}

/// Newton iteration for `Δ_N` from `lambda0` on the real line. When the
/// boundary blocks have no derivative a secant step replaces Newton's.
pub fn refine_root(ev: &NsbfEvaluator, bc: &BoundaryCondition, lambda0: f64, tol: f64) -> Result<EigenvalueRecord> {
    let opts = RefineOptions {
        tol,
        ..RefineOptions::default()
    };
    let mut f = real_restriction(ev, bc);
    newton_unbracketed(&mut f, lambda0, &opts)
}

/// Safeguarded Newton inside `[lo, hi]` where `Re Δ_N` changes sign; never
/// leaves the bracket and falls back to bisection.
pub fn refine_bracketed(
    ev: &NsbfEvaluator,
    bc: &BoundaryCondition,
    lo: f64,
    hi: f64,
    opts: &RefineOptions,
) -> Result<EigenvalueRecord> {
    let mut f = real_restriction(ev, bc);
    newton_bracketed(&mut f, lo, hi, opts)
}

/// `λ ↦ (Re Δ(λ), Re Δ'(λ), |Δ(λ)|)` for real `λ`.
type RealFn<'a> = dyn FnMut(f64) -> Result<(f64, Option<f64>, f64)> + 'a;

fn real_restriction<'a>(
    ev: &'a NsbfEvaluator,
    bc: &'a BoundaryCondition,
) -> impl FnMut(f64) -> Result<(f64, Option<f64>, f64)> + 'a {
    let with_derivative = bc.has_derivative();
    move |l: f64| {
        let lambda = c64(l, 0.0);
        if with_derivative {
            let (d, dd) = char_function_with_derivative(ev, bc, lambda)?;
            Ok((d.re, Some(dd.re), d.norm()))
        } else {
            let d = char_function(ev, bc, lambda)?;
            Ok((d.re, None, d.norm()))
        }
    }
}

fn record(lambda: f64, residual: f64, iterations: usize, status: RootStatus) -> EigenvalueRecord {
    EigenvalueRecord {
        index: 0,
        lambda: c64(lambda, 0.0),
        residual,
        iterations,
        status,
    }
}

fn newton_unbracketed(f: &mut RealFn<'_>, start: f64, opts: &RefineOptions) -> Result<EigenvalueRecord> {
    if !start.is_finite() {
        return Err(Error::NonFiniteInput("root-finder start"));
    }
    let mut x = start;
    let (mut fx, mut dfx, mut res) = f(x)?;
    let mut best = (x, res);
    let mut previous: Option<(f64, f64)> = None;
    let mut last_step: Option<f64> = None;
    let mut ratio = 0.0;
    for iteration in 0..=opts.max_iterations {
        if res <= opts.tol {
            // quadratic convergence shrinks steps far faster than this
            let status = if iteration >= 3 && ratio > 0.25 {
                RootStatus::Flat
            } else {
                RootStatus::Converged
            };
            return Ok(record(x, res, iteration, status));
        }
        if iteration == opts.max_iterations {
            break;
        }
        let slope = match dfx {
            Some(d) => d,
            None => match previous {
                Some((xp, fp)) if xp != x => (fx - fp) / (x - xp),
                _ => {
                    let h = 1e-7 * x.abs().max(1.0);
                    (f(x + h)?.0 - fx) / h
                }
            },
        };
        if !(slope.is_finite() && slope != 0.0) {
            return Ok(record(best.0, best.1, iteration, RootStatus::Flat));
        }
        let step = fx / slope;
        if let Some(s) = last_step {
            ratio = (step / s).abs();
        }
        last_step = Some(step);
        previous = Some((x, fx));
        x -= step;
        (fx, dfx, res) = f(x)?;
        if res < best.1 {
            best = (x, res);
        }
    }
    Ok(record(best.0, best.1, opts.max_iterations, RootStatus::NotConverged))
}

fn newton_bracketed(f: &mut RealFn<'_>, lo: f64, hi: f64, opts: &RefineOptions) -> Result<EigenvalueRecord> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidWindow);
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, _, ra) = f(a)?;
    if ra <= opts.tol {
        return Ok(record(a, ra, 0, RootStatus::Converged));
    }
    let (fb, _, rb) = f(b)?;
    if rb <= opts.tol {
        return Ok(record(b, rb, 0, RootStatus::Converged));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidWindow);
    }
    let sign_a = fa.signum();
    // start from the secant point of the bracket
    let mut x = a - fa * (b - a) / (fb - fa);
    if !(x > a && x < b) {
        x = 0.5 * (a + b);
    }
    let mut best = if ra < rb { (a, ra) } else { (b, rb) };
    let mut width_before = b - a;
    for iteration in 0..opts.max_iterations {
        let (fx, dfx, res) = f(x)?;
        if res < best.1 {
            best = (x, res);
        }
        if res <= opts.tol {
            return Ok(record(x, res, iteration, RootStatus::Converged));
        }
        if fx.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        if b - a <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        let newton = dfx.filter(|d| d.is_finite() && *d != 0.0).map(|d| x - fx / d);
        let width = b - a;
        x = match newton {
            // bisect when Newton leaves the bracket or the bracket shrinks slowly
            Some(n) if n > a && n < b && width <= 0.5 * width_before => n,
            Some(n) if n > a && n < b && iteration == 0 => n,
            _ => 0.5 * (a + b),
        };
        width_before = width;
    }
    Ok(record(best.0, best.1, opts.max_iterations, RootStatus::NotConverged))
}

/// Settings of [`scan_eigenvalues`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    /// Sampling step; `None` selects `π/(10 b)`.
    pub step: Option<f64>,
    pub refine: RefineOptions,
    /// Sampled local minima of `|Δ|` below this level are refined even
    /// without a sign change.
    pub min_threshold: f64,
    /// Report samples where `Δ` is not real.
    pub self_adjoint: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            step: None,
            refine: RefineOptions::default(),
            min_threshold: 1e-3,
            self_adjoint: true,
        }
    }
}

impl ScanOptions {
    pub fn step_for(&self, length: f64) -> f64 {
        self.step.unwrap_or(core::f64::consts::PI / (10.0 * length))
    }
}

/// Diagnostics collected while scanning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanWarning {
    /// `|Im Δ|` exceeded `1e-8 (1 + |Δ|)` on a problem flagged self-adjoint.
    NonRealCharacteristic { lambda: f64, imag: f64 },
    /// A bracketed root failed to converge.
    Unconverged { lambda: f64, residual: f64 },
}

/// Result of a scan: indexed records sorted by `λ` plus diagnostics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanReport {
    pub records: Vec<EigenvalueRecord>,
    pub warnings: Vec<ScanWarning>,
}

/// `λ_min, λ_min + h, …` up to and including `λ_max`.
pub fn sample_points(lambda_min: f64, lambda_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(lambda_min.is_finite() && lambda_max.is_finite() && lambda_min < lambda_max) {
        return Err(Error::InvalidWindow);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange {
            what: "scan step",
            value: step,
        });
    }
    let count = ((lambda_max - lambda_min) / step).ceil() as usize;
    let mut pts: Vec<f64> = (0..count).map(|k| lambda_min + k as f64 * step).collect();
    pts.push(lambda_max);
    Ok(pts)
}

/// Roots owned by the sample intervals `[s_k, s_{k+1}]`, `k ∈ owned`, and by
/// local minima at `s_k`, `k ∈ owned`. Disjoint `owned` ranges may be
/// scanned independently and merged with [`finalize_records`].
pub fn scan_samples(
    ev: &NsbfEvaluator,
    bc: &BoundaryCondition,
    samples: &[f64],
    owned: Range<usize>,
    opts: &ScanOptions,
) -> Result<(Vec<EigenvalueRecord>, Vec<ScanWarning>)> {
    let mut roots = Vec::new();
    let mut warnings = Vec::new();
    if samples.len() < 2 || owned.is_empty() {
        return Ok((roots, warnings));
    }
    let first = owned.start.saturating_sub(1);
    let last = owned.end.min(samples.len() - 1);
    let mut values = Vec::with_capacity(last - first + 1);
    for &l in &samples[first..=last] {
        let d = char_function(ev, bc, c64(l, 0.0))?;
        if opts.self_adjoint && d.im.abs() > 1e-8 * (1.0 + d.norm()) && warnings.is_empty() {
            warnings.push(ScanWarning::NonRealCharacteristic { lambda: l, imag: d.im });
        }
        values.push(d);
    }
    let at = |k: usize| values[k - first];
    let mut f = real_restriction(ev, bc);
    for k in owned.clone() {
        if k + 1 >= samples.len() {
            break;
        }
        let (d0, d1) = (at(k).re, at(k + 1).re);
        if d0 == 0.0 {
            roots.push(record(samples[k], at(k).norm(), 0, RootStatus::Converged));
        } else if d1 != 0.0 && d0.signum() != d1.signum() {
            let r = newton_bracketed(&mut f, samples[k], samples[k + 1], &opts.refine)?;
            if r.status == RootStatus::Converged {
                roots.push(r);
            } else {
                warnings.push(ScanWarning::Unconverged {
                    lambda: r.lambda.re,
                    residual: r.residual,
                });
            }
        } else if k > first {
            let m = at(k).norm();
            if m < opts.min_threshold && m <= at(k - 1).norm() && m <= at(k + 1).norm() {
                let r = newton_unbracketed(&mut f, samples[k], &opts.refine)?;
                let inside = r.lambda.re >= samples[k - 1] && r.lambda.re <= samples[k + 1];
                if inside && r.status != RootStatus::NotConverged {
                    roots.push(r);
                }
            }
        }
    }
    Ok((roots, warnings))
}

/// A computed eigenvalue this close to zero is taken as `λ = 0` when indexing.
pub const ZERO_TOLERANCE: f64 = 1e-8;

/// Sorts, removes duplicates (`|Δλ| ≤ 1e-8 max(1, |λ|)`, keeping the smaller
/// residual) and indexes: the smallest nonnegative eigenvalue gets index 0,
/// where roots within [`ZERO_TOLERANCE`] of zero count as nonnegative.
pub fn finalize_records(mut roots: Vec<EigenvalueRecord>) -> Vec<EigenvalueRecord> {
    roots.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    let mut out: Vec<EigenvalueRecord> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(prev) if (r.lambda.re - prev.lambda.re).abs() <= 1e-8 * r.lambda.re.abs().max(1.0) => {
                if r.residual < prev.residual {
                    *prev = r;
                }
            }
            _ => out.push(r),
        }
    }
    let anchor = out
        .iter()
        .position(|r| r.lambda.re >= -ZERO_TOLERANCE)
        .unwrap_or(out.len());
    for (k, r) in out.iter_mut().enumerate() {
        r.index = k as i64 - anchor as i64;
    }
    out
}

/// Eigenvalues of the boundary-value problem in `[λ_min, λ_max]`.
pub fn scan_eigenvalues(
    ev: &NsbfEvaluator,
    bc: &BoundaryCondition,
    lambda_min: f64,
    lambda_max: f64,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let samples = sample_points(lambda_min, lambda_max, opts.step_for(ev.grid().length()))?;
    let (roots, warnings) = scan_samples(ev, bc, &samples, 0..samples.len() - 1, opts)?;
    Ok(ScanReport {
        records: finalize_records(roots),
        warnings,
    })
}
