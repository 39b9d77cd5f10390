//! Fourier–Legendre coefficients `K_n` of the transmutation kernel,
//!
//! ```text
//! K(x, t) = Σ_n (1/x) K_n(x) P_n(t/x),
//! ```
//!
//! computed through `θ_n = x^n K_n` and the recursion
//!
//! ```text
//! θ_0 = (U(0, x) - I)/2,   θ_{-1} = -θ_0/x,
//! θ_n = (2n+1)/(2n-3) · [x² θ_{n-2} + S[-(2n-1) x B θ_{n-2} + (2n-3) θ_{n-1} B]].
//! ```
//!
//! The Goursat conditions on the characteristics `t = ±x` give two
//! computable residuals that measure the truncation error.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dirac::{apply_s, HomogeneousSolution, Potential};
use crate::grid::{Grid, SampledMat2Fn};
use crate::special::legendre_eval;
use crate::{ComplexMat2, Error, Result};

/// Order used when automatic truncation is disabled.
pub const DEFAULT_ORDER: usize = 16;

/// Orders probed by [`auto_truncation`] (continued by steps of 16 past 64).
pub const PROBE_ORDERS: [usize; 10] = [0, 2, 4, 8, 12, 16, 24, 32, 48, 64];

/// `θ_n` and `K_n` for `n = -1..=N` on a grid.
#[derive(Clone, Debug)]
pub struct KernelCoefficients {
    potential: Potential,
    theta: Vec<SampledMat2Fn>,
    k: Vec<SampledMat2Fn>,
}

impl KernelCoefficients {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.k.len() - 2
    }

    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    fn slot(&self, n: isize) -> Result<usize> {
        if n < -1 || n > self.order() as isize {
            return Err(Error::OrderNotAvailable {
                requested: n,
                available: self.order(),
            });
        }
        Ok((n + 1) as usize)
    }

    /// `θ_n` for `-1 ≤ n ≤ N`.
    pub fn theta(&self, n: isize) -> Result<&SampledMat2Fn> {
        Ok(&self.theta[self.slot(n)?])
    }

    /// `K_n` for `-1 ≤ n ≤ N`.
    pub fn k(&self, n: isize) -> Result<&SampledMat2Fn> {
        Ok(&self.k[self.slot(n)?])
    }

    /// `K_0..K_N`.
    pub fn k_nonnegative(&self) -> &[SampledMat2Fn] {
        &self.k[1..]
    }

    /// Rebuilds the coefficients from stored `θ_{-1}..θ_N`, e.g. read back
    /// from a cache.
    pub fn from_theta(q: &Potential, theta: Vec<SampledMat2Fn>) -> Result<Self> {
        if theta.len() < 2 {
            return Err(Error::LengthMismatch {
                expected: 2,
                found: theta.len(),
            });
        }
        if theta.iter().any(|t| t.grid() != q.grid()) {
            return Err(Error::GridMismatch);
        }
        let k = theta
            .iter()
            .enumerate()
            .map(|(slot, th)| match slot {
                0 => theta[1].scale(crate::c64(-1.0, 0.0)),
                1 => th.clone(),
                _ => divide_by_power(th, slot - 1),
            })
            .collect();
        Ok(Self {
            potential: q.clone(),
            theta,
            k,
        })
    }

    /// `θ_{-1}..θ_N`.
    pub fn thetas(&self) -> &[SampledMat2Fn] {
        &self.theta
    }

    /// The same coefficients cut at order `n ≤ N`.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        self.slot(n as isize)?;
        Ok(Self {
            potential: self.potential.clone(),
            theta: self.theta[..n + 2].to_vec(),
            k: self.k[..n + 2].to_vec(),
        })
    }
}

/// Runs the `θ_n` recursion up to order `order`.
pub fn build_coefficients(q: &Potential, hom: &HomogeneousSolution, order: usize) -> Result<KernelCoefficients> {
    let grid = *q.grid();
    if hom.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let theta0 = hom.u().map(|_, u| (u - ComplexMat2::IDENTITY) * 0.5);
    let q0 = q.at(0);
    let theta_m1 = theta0.map(|x, t| {
        if x == 0.0 {
            ComplexMat2::B * q0 * -0.5
        } else {
            t * (-1.0 / x)
        }
    });

    let mut theta = Vec::with_capacity(order + 2);
    theta.push(theta_m1);
    theta.push(theta0);
    for n in 1..=order {
        let nf = n as f64;
        let prev2 = &theta[n - 1];
        let prev1 = &theta[n];
        let inner = prev2.zip_with(prev1, |x, t2, t1| {
            ComplexMat2::B * t2 * (-(2.0 * nf - 1.0) * x) + t1 * ComplexMat2::B * (2.0 * nf - 3.0)
        })?;
        let s = apply_s(&inner, hom)?;
        let factor = (2.0 * nf + 1.0) / (2.0 * nf - 3.0);
        let mut next = prev2.zip_with(&s, |x, t2, s| (t2 * (x * x) + s) * factor)?;
        next.values_mut()[0] = ComplexMat2::ZERO;
        if let Some(node) = next.first_non_finite() {
            return Err(Error::NonFiniteCoefficient { n: n as isize, node });
        }
        theta.push(next);
    }

    KernelCoefficients::from_theta(q, theta)
}

/// `θ / x^n`, zero at `x = 0`.
///
/// Close to the origin the division amplifies the integration error of `θ_n`
/// like `(h/x)^n`, while the exact coefficient vanishes like `x^{n+1}`. The
/// computed profile `|K_n|` therefore first decreases and then grows; up to
/// its first local minimum the values are replaced by
/// `K_n(x_g)·(x/x_g)^{n+1}` from the first trusted node `x_g`.
fn divide_by_power(theta: &SampledMat2Fn, n: usize) -> SampledMat2Fn {
    let mut out = theta.map(|x, t| if x == 0.0 { t } else { t * x.powi(-(n as i32)) });
    guard_origin(&mut out, n);
    out
}

/// Replaces the unreliable head of a computed `K_n` profile (see
/// [`divide_by_power`]) by the leading-order model `c·x^{n+1}`.
pub(crate) fn guard_origin(k: &mut SampledMat2Fn, n: usize) {
    let grid = *k.grid();
    let values = k.values_mut();
    values[0] = ComplexMat2::ZERO;
    let last = grid.len() - 1;
    let size = |i: usize| values[i].norm_sqr();
    let mut first = 1;
    while first < last && (size(first) > size(first + 1) || size(first) > size((first + 2).min(last))) {
        first += 1;
    }
    let anchor = values[first];
    let x_anchor = grid.node(first);
    for (j, v) in values.iter_mut().enumerate().take(first).skip(1) {
        *v = anchor * (grid.node(j) / x_anchor).powi(n as i32 + 1);
    }
}

/// Pointwise truncated kernel `K^N(x, t) = Σ_{n≤N} (1/x) K_n(x) P_n(t/x)`
/// (cubic interpolation between nodes).
pub fn kernel_eval(coeffs: &KernelCoefficients, x: f64, t: f64) -> Result<ComplexMat2> {
    if !(x > 0.0) || x > coeffs.grid().length() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "kernel abscissa x",
            value: x,
        });
    }
    if !(t.abs() <= x) {
        return Err(Error::OutOfRange {
            what: "kernel argument t",
            value: t,
        });
    }
    let s = (t / x).clamp(-1.0, 1.0);
    let mut acc = ComplexMat2::ZERO;
    for (n, kn) in coeffs.k_nonnegative().iter().enumerate() {
        acc += kn.interpolate(x)? * legendre_eval(n, s)?;
    }
    Ok(acc * (1.0 / x))
}

/// Nodewise Goursat residuals and their suprema.
#[derive(Clone, Debug, PartialEq)]
pub struct GoursatResiduals {
    /// `δ_{Q,N}(x_i)`; the entry at `x = 0` is zero and excluded.
    pub delta_q: Vec<f64>,
    /// `δ_{0,N}(x_i)`; the entry at `x = 0` is zero and excluded.
    pub delta_0: Vec<f64>,
    pub sup_delta_q: f64,
    pub sup_delta_0: f64,
}

impl GoursatResiduals {
    /// `max(sup δ_Q, sup δ_0)`.
    pub fn worst(&self) -> f64 {
        self.sup_delta_q.max(self.sup_delta_0)
    }
}

/// Residuals of the characteristic conditions `B K(x, x) - K(x, x) B = -Q`
/// and `B K(x, -x) + K(x, -x) B = 0` expanded in Legendre polynomials:
///
/// ```text
/// δ_Q(x) = |Q(x) + (1/x) Σ [B K_n - K_n B]|,   δ_0(x) = |(1/x) Σ (-1)^n [B K_n + K_n B]|,
/// ```
///
/// for the full order of `coeffs`.
pub fn goursat_residuals(coeffs: &KernelCoefficients) -> GoursatResiduals {
    goursat_residuals_at(coeffs, coeffs.order()).expect("order within range")
}

/// As [`goursat_residuals`] with the sums cut at `order ≤ N`.
pub fn goursat_residuals_at(coeffs: &KernelCoefficients, order: usize) -> Result<GoursatResiduals> {
    coeffs.slot(order as isize)?;
    let grid = coeffs.grid();
    let len = grid.len();
    let mut delta_q = alloc::vec![0.0; len];
    let mut delta_0 = alloc::vec![0.0; len];
    for i in 1..len {
        let x = grid.node(i);
        let mut plain = ComplexMat2::ZERO;
        let mut alternating = ComplexMat2::ZERO;
        for (n, kn) in coeffs.k_nonnegative()[..=order].iter().enumerate() {
            let k = kn.value(i);
            plain += k.commutator_with_b();
            let a = k.anticommutator_with_b();
            if n % 2 == 0 {
                alternating += a;
            } else {
                alternating -= a;
            }
        }
        delta_q[i] = (coeffs.potential.at(i) + plain * (1.0 / x)).norm();
        delta_0[i] = (alternating * (1.0 / x)).norm();
    }
    let sup = |v: &[f64]| v.iter().fold(0.0, |m: f64, &d| m.max(d));
    Ok(GoursatResiduals {
        sup_delta_q: sup(&delta_q),
        sup_delta_0: sup(&delta_0),
        delta_q,
        delta_0,
    })
}

/// One probe of the automatic truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationProbe {
    pub order: usize,
    pub sup_delta_q: f64,
    pub sup_delta_0: f64,
}

/// Result of [`auto_truncation`].
#[derive(Clone, Debug)]
pub struct Truncation {
    pub coefficients: KernelCoefficients,
    /// Residuals of every order probed, in increasing order.
    pub probes: Vec<TruncationProbe>,
    /// False when no probed order met the tolerance; the coefficients are
    /// then those of the largest order.
    pub converged: bool,
}

/// Probe orders up to `max_order`, always ending with `max_order`.
pub fn probe_orders(max_order: usize) -> Vec<usize> {
    let mut orders: Vec<usize> = PROBE_ORDERS.iter().copied().filter(|&n| n < max_order).collect();
    let mut next = 80;
    while next < max_order {
        orders.push(next);
        next += 16;
    }
    orders.push(max_order);
    orders
}

/// Smallest probed order `N ≤ max_order` with
/// `max(sup δ_{Q,N}, sup δ_{0,N}) ≤ tol`.
pub fn auto_truncation(q: &Potential, hom: &HomogeneousSolution, tol: f64, max_order: usize) -> Result<Truncation> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            what: "truncation tolerance",
            value: tol,
        });
    }
    let full = build_coefficients(q, hom, max_order)?;
    let mut probes = Vec::new();
    for order in probe_orders(max_order) {
        let r = goursat_residuals_at(&full, order)?;
        probes.push(TruncationProbe {
            order,
            sup_delta_q: r.sup_delta_q,
            sup_delta_0: r.sup_delta_0,
        });
        if r.worst() <= tol {
            return Ok(Truncation {
                coefficients: full.truncated(order)?,
                probes,
                converged: true,
            });
        }
    }
    Ok(Truncation {
        coefficients: full,
        probes,
        converged: false,
    })
}

/// Interior-node residual of the differential form of the recursion,
/// `A_Q[θ_n] - (2n+1)/(2n-3)·(x² A_Q[θ_{n-2}] - (2n-3) x B θ_{n-2} + (2n-3) θ_{n-1} B)`
/// with `A_Q[H] = B H' + Q H`, for `1 ≤ n ≤ N`.
pub fn recursion_residual(coeffs: &KernelCoefficients, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OrderNotAvailable {
            requested: 0,
            available: coeffs.order(),
        });
    }
    let q = &coeffs.potential;
    let apply = |h: &SampledMat2Fn| -> SampledMat2Fn {
        let d = h.derivative();
        SampledMat2Fn::from_indexed(*h.grid(), |i| ComplexMat2::B * d.value(i) + q.at(i) * h.value(i))
    };
    let nf = n as f64;
    let th = coeffs.theta(n as isize)?;
    let th1 = coeffs.theta(n as isize - 1)?;
    let th2 = coeffs.theta(n as isize - 2)?;
    let lhs = apply(th);
    let a2 = apply(th2);
    let factor = (2.0 * nf + 1.0) / (2.0 * nf - 3.0);
    let grid = coeffs.grid();
    let mut worst: f64 = 0.0;
    for i in 1..grid.len() - 1 {
        let x = grid.node(i);
        let rhs = (a2.value(i) * (x * x) - ComplexMat2::B * th2.value(i) * ((2.0 * nf - 3.0) * x)
            + th1.value(i) * ComplexMat2::B * (2.0 * nf - 3.0))
            * factor;
        worst = worst.max((lhs.value(i) - rhs).norm());
    }
    Ok(worst)
}
