//! Reference solutions shared by the integration and acceptance tests.
#![allow(dead_code)]

use nsbf_core::{c64, Complex64, ComplexMat2};

/// `exp(x G)` for a traceless `G` with `G² = s I`:
/// `cosh(μx) I + sinh(μx)/μ G`, `μ = √s`.
pub fn exp_traceless(g: ComplexMat2, x: f64) -> ComplexMat2 {
    let s = (g * g).a11;
    let mu = s.sqrt();
    let (c, sinhc) = if mu.norm() * x < 1e-6 {
        (
            c64(1.0, 0.0) + s * x * x / 2.0,
            c64(x, 0.0) * (c64(1.0, 0.0) + s * x * x / 6.0),
        )
    } else {
        ((mu * x).cosh(), (mu * x).sinh() / mu)
    };
    ComplexMat2::scalar(c) + g * sinhc
}

/// Generator `-λB + BQ` of the canonical system with constant `Q`.
pub fn dirac_generator(lambda: f64, q: ComplexMat2) -> ComplexMat2 {
    ComplexMat2::B * ComplexMat2::scalar(c64(-lambda, 0.0)) + ComplexMat2::B * q
}

/// Generator `Q_ZS + iλσ₃` of the Zakharov–Shabat system with constant `ν`.
pub fn zs_generator(lambda: f64, nu: Complex64) -> ComplexMat2 {
    let il = c64(0.0, lambda);
    ComplexMat2::new(il, nu, nu.conj(), -il)
}

/// Dirichlet eigenvalues (`y₁(0) = y₁(1) = 0`) of `Q = ((0, 1), (1, 0))` on
/// `[0, 1]` in `[lo, hi]`: `0` and `±√(1 + n²π²)`.
pub fn constant_q_dirichlet(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    for n in 1..1000 {
        let l = (1.0 + (n as f64 * std::f64::consts::PI).powi(2)).sqrt();
        out.push(l);
        out.push(-l);
    }
    out.retain(|l| (lo..=hi).contains(l));
    out.sort_by(f64::total_cmp);
    out
}

/// Shooting solver for the linear system
///
/// ```text
/// u' = (1 - λ) v,   v' = (λ + x) u,   u(0) = 0, v(0) = 1,
/// ```
///
/// by Taylor series on steps with `ω h ≤ 1/2`, `ω² = |(1 - λ)(λ + x)|`,
/// each series summed until its terms stop contributing.
pub struct TaylorShooting;

impl TaylorShooting {
    /// `(u(1; λ), v(1; λ))`.
    pub fn endpoint(lambda: f64) -> (f64, f64) {
        let omega = ((1.0 - lambda).abs() * (lambda.abs() + 1.0)).sqrt().max(1.0);
        let steps = (2.0 * omega).ceil() as usize + 4;
        let h = 1.0 / steps as f64;
        let (mut u, mut v) = (0.0, 1.0);
        for s in 0..steps {
            let x0 = s as f64 * h;
            (u, v) = Self::step(lambda, x0, h, u, v);
        }
        (u, v)
    }

    fn step(lambda: f64, x0: f64, h: f64, u0: f64, v0: f64) -> (f64, f64) {
        let a = 1.0 - lambda;
        let c = lambda + x0;
        // coefficients of the expansion in s = x - x0, scaled by h^k
        let (mut u_prev, mut u_k, mut v_k) = (0.0, u0, v0);
        let (mut u_sum, mut v_sum) = (u0, v0);
        for k in 0..400 {
            let kp = (k + 1) as f64;
            let u_next = a * v_k * h / kp;
            let v_next = (c * u_k + u_prev * h) * h / kp;
            u_sum += u_next;
            v_sum += v_next;
            let small = |t: f64, sum: f64| t.abs() <= 1e-18 * (1.0 + sum.abs());
            if k > 4 && small(u_next, u_sum) && small(v_next, v_sum) && small(u_k, u_sum) && small(v_k, v_sum) {
                break;
            }
            u_prev = u_k;
            u_k = u_next;
            v_k = v_next;
        }
        (u_sum, v_sum)
    }

    /// Eigenvalues (zeros of `u(1; λ)`) in `[lo, hi]` from sign changes on a
    /// grid of width `step`, refined by bisection to `tol`.
    pub fn eigenvalues(lo: f64, hi: f64, step: f64, tol: f64) -> Vec<f64> {
        let count = ((hi - lo) / step).ceil() as usize;
        let samples: Vec<f64> = (0..=count).map(|k| (lo + k as f64 * step).min(hi)).collect();
        let values: Vec<f64> = samples.iter().map(|&l| Self::endpoint(l).0).collect();
        let mut roots = Vec::new();
        for k in 0..count {
            let (mut a, mut b) = (samples[k], samples[k + 1]);
            let (mut fa, fb) = (values[k], values[k + 1]);
            if fa == 0.0 {
                roots.push(a);
                continue;
            }
            if fb == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            while b - a > tol {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                let fm = Self::endpoint(m).0;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        roots
    }
}
