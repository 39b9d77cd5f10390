//! Dense 2×2 complex matrices, the value type of every matrix function in
//! the crate (`U`, `K_n`, `θ_n`, `Q`).

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// A complex column vector of length two.
pub type CVec2 = [Complex64; 2];

/// Shorthand constructor for a complex scalar.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = c64(0.0, 0.0);
const ONE: Complex64 = c64(1.0, 0.0);

/// Row-major 2×2 matrix `((a11, a12), (a21, a22))`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComplexMat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl ComplexMat2 {
    pub const ZERO: Self = Self::new(ZERO, ZERO, ZERO, ZERO);
    pub const IDENTITY: Self = Self::new(ONE, ZERO, ZERO, ONE);
    /// `B = ((0, 1), (-1, 0))`.
    pub const B: Self = Self::new(ZERO, ONE, c64(-1.0, 0.0), ZERO);
    /// `Bᵀ = -B = B⁻¹`.
    pub const B_T: Self = Self::new(ZERO, c64(-1.0, 0.0), ONE, ZERO);

    #[inline]
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    /// Matrix with real entries.
    #[inline]
    pub const fn real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(c64(a11, 0.0), c64(a12, 0.0), c64(a21, 0.0), c64(a22, 0.0))
    }

    #[inline]
    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    #[inline]
    pub fn from_columns(c1: CVec2, c2: CVec2) -> Self {
        Self::new(c1[0], c2[0], c1[1], c2[1])
    }

    #[inline]
    pub fn scalar(s: Complex64) -> Self {
        Self::new(s, ZERO, ZERO, s)
    }

    #[inline]
    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    /// Symmetric trace-free potential matrix `((p, q), (q, -p))`.
    #[inline]
    pub fn potential(p: Complex64, q: Complex64) -> Self {
        Self::new(p, q, q, -p)
    }

    /// Rotation `((cos φ, -sin φ), (sin φ, cos φ))`.
    pub fn rotation(phi: Complex64) -> Self {
        let (s, c) = (phi.sin(), phi.cos());
        Self::new(c, -s, s, c)
    }

    #[inline]
    pub fn column(&self, j: usize) -> CVec2 {
        match j {
            0 => [self.a11, self.a21],
            1 => [self.a12, self.a22],
            _ => panic!("column index {j} out of range"),
        }
    }

    #[inline]
    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    /// `((d, -b), (-c, a))`; equals the inverse when the determinant is one.
    #[inline]
    pub fn adjugate(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// General inverse; `None` for an exactly singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        Some(self.adjugate().scale(det.inv()))
    }

    #[inline]
    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    #[inline]
    pub fn scale_re(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// `B·A - A·B`.
    #[inline]
    pub fn commutator_with_b(&self) -> Self {
        Self::B * *self - *self * Self::B
    }

    /// `B·A + A·B`.
    #[inline]
    pub fn anticommutator_with_b(&self) -> Self {
        Self::B * *self + *self * Self::B
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(f(self.a11), f(self.a12), f(self.a21), f(self.a22))
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    #[inline]
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    /// Squared Frobenius norm.
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Operator norm induced by the Euclidean norm on `C²` (largest
    /// singular value).
    pub fn norm(&self) -> f64 {
        let fro = self.norm_sqr();
        if fro == 0.0 {
            return 0.0;
        }
        let d = self.det().norm_sqr();
        let disc = (fro * fro - 4.0 * d).max(0.0);
        ((fro + disc.sqrt()) * 0.5).sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }
}

impl Add for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.a11 + r.a11, self.a12 + r.a12, self.a21 + r.a21, self.a22 + r.a22)
    }
}

impl Sub for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.a11 - r.a11, self.a12 - r.a12, self.a21 - r.a21, self.a22 - r.a22)
    }
}

impl Neg for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl AddAssign for ComplexMat2 {
    #[inline]
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for ComplexMat2 {
    #[inline]
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl Mul for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.a11 * r.a11 + self.a12 * r.a21,
            self.a11 * r.a12 + self.a12 * r.a22,
            self.a21 * r.a11 + self.a22 * r.a21,
            self.a21 * r.a12 + self.a22 * r.a22,
        )
    }
}

impl Mul<Complex64> for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Mul<f64> for ComplexMat2 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale_re(s)
    }
}

impl Mul<CVec2> for ComplexMat2 {
    type Output = CVec2;
    #[inline]
    fn mul(self, v: CVec2) -> CVec2 {
        [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
    }
}
