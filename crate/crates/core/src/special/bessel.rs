//! Spherical Bessel functions of the first kind `j_n(z)` for complex `z`.
//!
//! Sequences `j_0..j_{n_max}` come from a downward (Miller) recurrence
//! normalized against the closed forms of `j_0` or `j_1`; tiny arguments use
//! the Maclaurin series of each order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Below this modulus `spherical_bessel_seq` switches to the Maclaurin series.
pub const SERIES_RADIUS: f64 = 1e-4;

const RESCALE_LIMIT: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;
const SERIES_MAX_TERMS: usize = 200;

/// `j_0(z), …, j_{n_max}(z)` for one argument.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselSequence {
    argument: Complex64,
    values: Vec<Complex64>,
}

impl BesselSequence {
    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n]
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

fn check_argument(z: Complex64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteInput("Bessel argument"))
    }
}

/// `j_0(z)..j_{n_max}(z)`; exact limits at `z = 0`.
pub fn spherical_bessel_seq(z: Complex64, n_max: usize) -> Result<BesselSequence> {
    check_argument(z)?;
    let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if z.norm() < SERIES_RADIUS {
        series_into(z, Some(&mut values), None);
    } else {
        miller_into(z, &mut values);
    }
    Ok(BesselSequence { argument: z, values })
}

/// The Maclaurin series of every order, summed until the terms drop below
/// round-off. Accurate for `|z| ≲ 1`; used by callers that need the series
/// in a wider disc than [`SERIES_RADIUS`].
pub fn spherical_bessel_series(z: Complex64, n_max: usize) -> Result<BesselSequence> {
    check_argument(z)?;
    let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
    series_into(z, Some(&mut values), None);
    Ok(BesselSequence { argument: z, values })
}

/// `j_n(z)/z` for `n = 1..=n_max`, finite at `z = 0` (`1/3` for `n = 1`,
/// zero above). Slot 0 has no finite limit at the origin; it is not
/// computed and holds zero.
pub fn spherical_bessel_over_arg(z: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    let (_, over) = spherical_bessel_pair(z, n_max, SERIES_RADIUS)?;
    Ok(over)
}

/// `(j_n(z), j_n(z)/z)` for `n = 0..=n_max` from one recurrence. Arguments
/// with `|z| < series_radius` use the Maclaurin series for both. Slot 0 of
/// the second vector holds zero (see [`spherical_bessel_over_arg`]).
pub fn spherical_bessel_pair(
    z: Complex64,
    n_max: usize,
    series_radius: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_argument(z)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut values = vec![zero; n_max + 1];
    let mut over = vec![zero; n_max + 1];
    if z.norm() < series_radius.max(SERIES_RADIUS) {
        series_into(z, Some(&mut values), Some(&mut over));
    } else {
        miller_into(z, &mut values);
        let inv = z.inv();
        for (o, v) in over.iter_mut().zip(&values).skip(1) {
            *o = v * inv;
        }
    }
    Ok((values, over))
}

/// `j_n(z) = z^n/(2n+1)!! · Σ_k (-z²/2)^k / (k! (2n+3)(2n+5)…(2n+2k+1))`.
fn series_into(z: Complex64, values: Option<&mut [Complex64]>, over: Option<&mut [Complex64]>) {
    let n_max = values
        .as_ref()
        .map(|v| v.len())
        .or(over.as_ref().map(|v| v.len()))
        .unwrap_or(0)
        .saturating_sub(1);
    let mut values = values;
    let mut over = over;
    let half_z2 = -(z * z) * 0.5;
    // z^n / (2n+1)!! and z^(n-1) / (2n+1)!!
    let mut power = Complex64::new(1.0, 0.0);
    let mut power_over = Complex64::new(0.0, 0.0);
    for n in 0..=n_max {
        if n >= 1 {
            let denom = (2 * n + 1) as f64;
            power_over = if n == 1 {
                Complex64::new(1.0 / 3.0, 0.0)
            } else {
                power_over * z / denom
            };
            power = power * z / denom;
        }
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..SERIES_MAX_TERMS {
            term = term * half_z2 / ((k * (2 * n + 2 * k + 1)) as f64);
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        if let Some(v) = values.as_deref_mut() {
            v[n] = power * sum;
        }
        if let Some(o) = over.as_deref_mut() {
            o[n] = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                power_over * sum
            };
        }
    }
}

/// Order at which the downward recurrence starts. Beyond `n_max + |z|` the
/// margin grows like `|z|^{1/3}`, the width of the turning-point region, so
/// that the minimal solution dominates by many orders of magnitude.
fn start_order(z: Complex64, n_max: usize) -> usize {
    let r = z.norm();
    n_max + 20 + r.ceil() as usize + (10.0 * r.cbrt()).ceil() as usize
}

fn miller_into(z: Complex64, out: &mut [Complex64]) {
    let n_max = out.len() - 1;
    let start = start_order(z, n_max);
    let inv_z = z.inv();
    let mut next = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    let mut f1 = Complex64::new(0.0, 0.0);
    let mut f0 = Complex64::new(0.0, 0.0);
    for n in (1..=start).rev() {
        let mut prev = inv_z * ((2 * n + 1) as f64) * cur - next;
        let order = n - 1;
        if prev.norm() > RESCALE_LIMIT {
            prev *= RESCALE_FACTOR;
            cur *= RESCALE_FACTOR;
            f1 *= RESCALE_FACTOR;
            for v in out[(order + 1).min(n_max + 1)..].iter_mut() {
                *v *= RESCALE_FACTOR;
            }
        }
        next = cur;
        cur = prev;
        if order <= n_max {
            out[order] = cur;
        }
        if order == 1 {
            f1 = cur;
        } else if order == 0 {
            f0 = cur;
        }
    }
    // Anchor on whichever closed form is larger: normalizing against a value
    // near one of its zeros would amplify the recurrence error.
    let (s, c) = (z.sin(), z.cos());
    let j0 = s * inv_z;
    let j1 = (s * inv_z - c) * inv_z;
    let scale = if j0.norm() >= j1.norm() {
        safe_div(j0, f0)
    } else {
        safe_div(j1, f1)
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out[0] = j0;
}

/// Complex quotient that does not square the divisor's modulus.
fn safe_div(a: Complex64, b: Complex64) -> Complex64 {
    let m = b.norm();
    (a / (b / m)) / m
}
