//! Uniform grids on `[0, b]`, functions sampled on them, and the sixth-order
//! quadrature and differentiation rules used throughout the crate.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{ComplexMat2, Error, Result};

/// Number of intervals per composite Newton–Cotes block.
pub const BLOCK: usize = 5;

/// Smallest admissible number of intervals.
pub const MIN_INTERVALS: usize = 10;

/// Partial integrals of the degree-5 interpolant over one block, times 1440:
/// row `j` integrates from the block start to node `j`.
const PARTIAL_WEIGHTS: [[f64; 6]; 5] = [
    [475.0, 1427.0, -798.0, 482.0, -173.0, 27.0],
    [448.0, 2064.0, 224.0, 224.0, -96.0, 16.0],
    [459.0, 1971.0, 1026.0, 1026.0, -189.0, 27.0],
    [448.0, 2048.0, 768.0, 2048.0, 448.0, 0.0],
    [475.0, 1875.0, 1250.0, 1250.0, 1875.0, 475.0],
];
const PARTIAL_SCALE: f64 = 1.0 / 1440.0;

/// Derivative of the degree-5 interpolant at offset `r` in a six-node
/// window, times 60.
const DERIVATIVE_WEIGHTS: [[f64; 6]; 6] = [
    [-137.0, 300.0, -300.0, 200.0, -75.0, 12.0],
    [-12.0, -65.0, 120.0, -60.0, 20.0, -3.0],
    [3.0, -30.0, -20.0, 60.0, -15.0, 2.0],
    [-2.0, 15.0, -60.0, 20.0, 30.0, -3.0],
    [3.0, -20.0, 60.0, -120.0, 65.0, 12.0],
    [-12.0, 75.0, -200.0, 300.0, -300.0, 137.0],
];
const DERIVATIVE_SCALE: f64 = 1.0 / 60.0;

/// Uniform partition `x_i = i·b/M`, `i = 0..=M`, of `[0, b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    length: f64,
    intervals: usize,
}

impl Grid {
    /// Grid on `[0, length]` with at least `intervals` intervals; the count is
    /// rounded up to a multiple of [`BLOCK`].
    pub fn new(length: f64, intervals: usize) -> Result<Self> {
        if !length.is_finite() {
            return Err(Error::NonFiniteInput("interval length"));
        }
        if length <= 0.0 {
            return Err(Error::InvalidGrid("interval length must be positive"));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::InvalidGrid("at least 10 intervals are required"));
        }
        let intervals = intervals.div_ceil(BLOCK) * BLOCK;
        Ok(Self { length, intervals })
    }

    /// Interval length `b`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, `M + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.length
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Index of `x` if it is a node (to within a relative `1e-9` of a step).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let t = x / self.step();
        let i = t.round();
        if i < 0.0 || i > self.intervals as f64 || (t - i).abs() > 1e-9 {
            None
        } else {
            Some(i as usize)
        }
    }

    pub(crate) fn check_point(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput("evaluation point"));
        }
        let slack = 1e-12 * self.length;
        if x < -slack || x > self.length + slack {
            return Err(Error::OutOfRange {
                what: "evaluation point",
                value: x,
            });
        }
        Ok(())
    }

    /// Start index and Lagrange weights of the `order`-point stencil nearest
    /// to `x` (clamped to the grid).
    pub(crate) fn stencil(&self, x: f64, order: usize) -> (usize, [f64; 8]) {
        debug_assert!((1..=8).contains(&order));
        let h = self.step();
        let t = x / h;
        let centre = t.floor() as isize - (order as isize - 1) / 2;
        let start = centre.clamp(0, (self.intervals + 1 - order) as isize) as usize;
        let mut w = [0.0; 8];
        for (j, wj) in w.iter_mut().enumerate().take(order) {
            let mut v = 1.0;
            for m in 0..order {
                if m != j {
                    v *= (t - (start + m) as f64) / (j as f64 - m as f64);
                }
            }
            *wj = v;
        }
        (start, w)
    }
}

/// Values that can be sampled on a grid and integrated.
pub trait GridValue:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Mul<Complex64, Output = Self>
{
    const ZERO: Self;
    fn is_finite(&self) -> bool;
    /// Squared Euclidean (Frobenius) magnitude.
    fn abs_sqr(&self) -> f64;
}

impl GridValue for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn is_finite(&self) -> bool {
        Complex64::is_finite(*self)
    }
    fn abs_sqr(&self) -> f64 {
        self.norm_sqr()
    }
}

impl GridValue for ComplexMat2 {
    const ZERO: Self = ComplexMat2::ZERO;
    fn is_finite(&self) -> bool {
        ComplexMat2::is_finite(self)
    }
    fn abs_sqr(&self) -> f64 {
        self.norm_sqr()
    }
}

/// A function sampled at every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled<T> {
    grid: Grid,
    values: Vec<T>,
}

/// Complex scalar function on a grid.
pub type SampledScalar = Sampled<Complex64>;
/// Matrix function on a grid.
pub type SampledMat2Fn = Sampled<ComplexMat2>;

impl<T: GridValue> Sampled<T> {
    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> T) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_indexed(grid: Grid, f: impl FnMut(usize) -> T) -> Self {
        let values = (0..grid.len()).map(f).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid, value: T) -> Self {
        Self {
            grid,
            values: alloc::vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, T::ZERO)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    /// Value at the last node, `x = b`.
    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// First node holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    fn check_grid(&self, other: &Grid) -> Result<()> {
        if &self.grid == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Nodewise `f(x_i, value_i)`.
    pub fn map<U: GridValue>(&self, mut f: impl FnMut(f64, T) -> U) -> Sampled<U> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.node(i), v))
            .collect();
        Sampled {
            grid: self.grid,
            values,
        }
    }

    /// Nodewise combination of two functions on the same grid.
    pub fn zip_with<S: GridValue, U: GridValue>(
        &self,
        other: &Sampled<S>,
        mut f: impl FnMut(f64, T, S) -> U,
    ) -> Result<Sampled<U>> {
        self.check_grid(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| f(self.grid.node(i), a, b))
            .collect();
        Ok(Sampled {
            grid: self.grid,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |_, a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |_, a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, v| v * s)
    }

    /// `Σ c_j f_j` over functions sharing one grid.
    pub fn linear_combine(fs: &[&Self], coefficients: &[Complex64]) -> Result<Self> {
        if fs.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: fs.len(),
                found: coefficients.len(),
            });
        }
        let first = fs.first().ok_or(Error::LengthMismatch { expected: 1, found: 0 })?;
        let mut out = Self::zeros(first.grid);
        for (f, &c) in fs.iter().zip(coefficients) {
            first.check_grid(&f.grid)?;
            for (o, &v) in out.values.iter_mut().zip(&f.values) {
                *o = *o + v * c;
            }
        }
        Ok(out)
    }

    /// `F(x_i) = ∫_0^{x_i} f(t) dt` by composite six-point Newton–Cotes
    /// blocks; exact for polynomials of degree five.
    pub fn indefinite_integral(&self) -> Self {
        let h = self.grid.step();
        let mut out = alloc::vec![T::ZERO; self.values.len()];
        let mut base = T::ZERO;
        for start in (0..self.grid.intervals).step_by(BLOCK) {
            let f = &self.values[start..start + BLOCK + 1];
            for (j, w) in PARTIAL_WEIGHTS.iter().enumerate() {
                let mut acc = T::ZERO;
                for (&fi, &wi) in f.iter().zip(w) {
                    acc = acc + fi * wi;
                }
                out[start + j + 1] = base + acc * (h * PARTIAL_SCALE);
            }
            base = out[start + BLOCK];
        }
        Self {
            grid: self.grid,
            values: out,
        }
    }

    /// `∫_0^b f(t) dt`.
    pub fn integral(&self) -> T {
        self.indefinite_integral().last()
    }

    /// Derivative at every node from a six-point finite-difference stencil.
    pub fn derivative(&self) -> Self {
        let m = self.grid.intervals;
        let scale = DERIVATIVE_SCALE / self.grid.step();
        let values = (0..=m)
            .map(|i| {
                let start = i.saturating_sub(2).min(m - BLOCK);
                let w = &DERIVATIVE_WEIGHTS[i - start];
                let mut acc = T::ZERO;
                for (&fi, &wi) in self.values[start..start + BLOCK + 1].iter().zip(w) {
                    acc = acc + fi * wi;
                }
                acc * scale
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Lagrange interpolation with `order` points (at most 8).
    pub fn interpolate_with_order(&self, x: f64, order: usize) -> Result<T> {
        self.grid.check_point(x)?;
        let order = order.clamp(1, 8);
        if let Some(i) = self.grid.node_index(x) {
            if (x - self.grid.node(i)).abs() <= 1e-15 * self.grid.length {
                return Ok(self.values[i]);
            }
        }
        let (start, w) = self.grid.stencil(x, order);
        let mut acc = T::ZERO;
        for (j, &wj) in w.iter().enumerate().take(order) {
            acc = acc + self.values[start + j] * wj;
        }
        Ok(acc)
    }

    /// Piecewise cubic interpolation.
    pub fn interpolate(&self, x: f64) -> Result<T> {
        self.interpolate_with_order(x, 4)
    }

    /// Grid L² norm, `(∫ |f|² dx)^{1/2}` by the same quadrature.
    pub fn l2_norm(&self) -> f64 {
        let sq: Sampled<Complex64> = self.map(|_, v| Complex64::new(v.abs_sqr(), 0.0));
        sq.integral().re.max(0.0).sqrt()
    }

    /// Largest nodal Euclidean (Frobenius) magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs_sqr().sqrt()))
    }
}

impl SampledMat2Fn {
    /// Nodewise `g(x)·f(x)`.
    pub fn left_mul(&self, g: &Self) -> Result<Self> {
        self.zip_with(g, |_, f, g| g * f)
    }

    /// Nodewise `f(x)·g(x)`.
    pub fn right_mul(&self, g: &Self) -> Result<Self> {
        self.zip_with(g, |_, f, g| f * g)
    }

    /// `C·f(x)` for a constant matrix.
    pub fn left_mul_const(&self, c: ComplexMat2) -> Self {
        self.map(|_, f| c * f)
    }

    /// `f(x)·C` for a constant matrix.
    pub fn right_mul_const(&self, c: ComplexMat2) -> Self {
        self.map(|_, f| f * c)
    }

    /// Nodewise `s(x)·f(x)` for a scalar function.
    pub fn mul_scalar_fn(&self, s: &SampledScalar) -> Result<Self> {
        self.zip_with(s, |_, f, s| f * s)
    }

    /// Largest nodal operator norm.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Free-function form of [`Sampled::indefinite_integral`].
pub fn indefinite_integral<T: GridValue>(f: &Sampled<T>) -> Sampled<T> {
    f.indefinite_integral()
}

/// Free-function form of [`Sampled::linear_combine`].
pub fn linear_combine<T: GridValue>(fs: &[&Sampled<T>], coefficients: &[Complex64]) -> Result<Sampled<T>> {
    Sampled::linear_combine(fs, coefficients)
}
