//! Legendre polynomials: values by the Bonnet recurrence and exact monomial
//! coefficients `P_n(x) = Σ_k l_{k,n} x^k`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Largest degree for which monomial coefficients are tabulated.
pub const MAX_MONOMIAL_DEGREE: usize = 64;

/// `P_n(s)` for `|s| ≤ 1` by the three-term recurrence.
pub fn legendre_eval(n: usize, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::NonFiniteInput("Legendre argument"));
    }
    if s.abs() > 1.0 {
        return Err(Error::OutOfRange {
            what: "Legendre argument",
            value: s,
        });
    }
    Ok(legendre_unchecked(n, s))
}

pub(crate) fn legendre_unchecked(n: usize, s: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, s);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * s * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Monomial coefficients of `P_0..P_{n_max}`.
///
/// Internally `2^n P_n` has integer coefficients; these are kept exactly and
/// converted to `f64` once, so every emitted value is correctly rounded.
#[derive(Clone, Debug)]
pub struct LegendreMonomialTable {
    numerators: Vec<Vec<BigInt>>,
    values: Vec<Vec<f64>>,
}

/// Table of `l_{k,n}` for `n ≤ n_max ≤ 64`.
pub fn legendre_monomial_coeffs(n_max: usize) -> Result<LegendreMonomialTable> {
    LegendreMonomialTable::new(n_max)
}

impl LegendreMonomialTable {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max > MAX_MONOMIAL_DEGREE {
            return Err(Error::DegreeTooLarge {
                requested: n_max,
                max: MAX_MONOMIAL_DEGREE,
            });
        }
        // A_n = 2^n P_n:  (n+1) A_{n+1} = 2(2n+1) x A_n − 4n A_{n−1}
        let mut numerators: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        numerators.push(vec![BigInt::from(1)]);
        if n_max >= 1 {
            numerators.push(vec![BigInt::zero(), BigInt::from(2)]);
        }
        for n in 1..n_max {
            let mut next = vec![BigInt::zero(); n + 2];
            for (k, a) in numerators[n].iter().enumerate() {
                next[k + 1] += a * (2 * (2 * n + 1));
            }
            for (k, a) in numerators[n - 1].iter().enumerate() {
                next[k] -= a * (4 * n);
            }
            let divisor = BigInt::from(n + 1);
            for v in next.iter_mut() {
                debug_assert!((&*v % &divisor).is_zero());
                *v = &*v / &divisor;
            }
            numerators.push(next);
        }
        let values = numerators
            .iter()
            .enumerate()
            .map(|(n, row)| {
                let scale = 0.5f64.powi(n as i32);
                row.iter().map(|a| a.to_f64().unwrap_or(f64::NAN) * scale).collect()
            })
            .collect();
        Ok(Self { numerators, values })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `l_{k,n}`, zero for `k > n`.
    pub fn coeff(&self, k: usize, n: usize) -> f64 {
        self.values[n].get(k).copied().unwrap_or(0.0)
    }

    /// Coefficients `l_{0,n}..l_{n,n}`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n]
    }

    /// Exact numerator of `l_{k,n} = numerator / 2^n`.
    pub fn numerator(&self, k: usize, n: usize) -> BigInt {
        self.numerators[n].get(k).cloned().unwrap_or_default()
    }

    /// `P_n(s)` from the monomial form by Horner's rule.
    pub fn eval(&self, n: usize, s: f64) -> f64 {
        self.values[n].iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    /// Both endpoint identities `P_n(1) = 1`, `P_n(-1) = (-1)^n`, checked
    /// in exact arithmetic.
    pub fn endpoint_identities_hold(&self) -> bool {
        self.numerators.iter().enumerate().all(|(n, row)| {
            let two_n = BigInt::from(1) << n;
            let sum: BigInt = row.iter().sum();
            let alt: BigInt = row
                .iter()
                .enumerate()
                .map(|(k, a)| if k % 2 == 0 { a.clone() } else { -a })
                .sum();
            let expected_alt = if n % 2 == 0 { two_n.clone() } else { -two_n.clone() };
            sum == two_n && alt == expected_alt
        })
    }
}
