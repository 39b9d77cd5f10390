//! Formal powers and the mapping property of the transmutation operator.
//!
//! Given a nonvanishing solution `(f, g)` of `B Y' + Q Y = 0` with
//! `f(0) g(0) = 1`, the recursive integrals
//!
//! ```text
//! X⁰ = -∫ p/f²,    Y⁰ = 1 + ∫ p/g²,
//! Zⁿ = ∫ (f² Xⁿ + g² Yⁿ),
//! Xⁿ⁺¹ = -(n+1) ∫ (g/f Yⁿ + p/f² Zⁿ),
//! Yⁿ⁺¹ =  (n+1) ∫ (f/g Xⁿ + p/g² Zⁿ),
//! ```
//!
//! and the same recursion started from `X̃⁰ = 1 + ∫ p/f²`, `Ỹ⁰ = -∫ p/g²`
//! give the images `Φ_k = T[x^k e₁]`, `Ψ_k = T[x^k e₂]` of monomials under the
//! transmutation operator. Expanding `t^k` in Legendre polynomials then yields
//! an independent formula for the coefficients:
//!
//! ```text
//! K_n(x) = (2n+1)/2 · [-I + Σ_k l_{k,n} x^{-k} (Φ_k  Ψ_k)].
//! ```
//!
//! This path is an oracle for the `θ_n` recursion, not a production method.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dirac::{dirac_residual, fundamental_solution_zero, HomogeneousSolution, Potential};
use crate::grid::{Grid, SampledMat2Fn, SampledScalar};
use crate::kernel::guard_origin;
use crate::special::{LegendreMonomialTable, MAX_MONOMIAL_DEGREE};
use crate::{c64, CVec2, ComplexMat2, Error, Result};

/// Combination `(1, 1)` is kept when `min |f|, |g|` is at least this fraction
/// of their maximum.
const ACCEPT_RATIO: f64 = 0.1;

/// Smallest admissible modulus of a normalised particular solution.
const MIN_MODULUS: f64 = 1e-10;

/// Moduli tried for the second coefficient of the combination sweep.
const SWEEP_MODULI: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// A solution `(f, g)` of the homogeneous system that vanishes nowhere on the
/// grid, normalised by `f(0) g(0) = 1`.
#[derive(Clone, Debug)]
pub struct ParticularSolution {
    f: SampledScalar,
    g: SampledScalar,
    combination: CVec2,
}

impl ParticularSolution {
    /// Builds `U(0, x)·c / sqrt(c₁c₂)` and validates it.
    pub fn from_combination(hom: &HomogeneousSolution, combination: CVec2) -> Result<Self> {
        let candidate = Self::unchecked(hom, combination);
        let min_modulus = candidate.min_modulus();
        if !(min_modulus >= MIN_MODULUS) {
            return Err(Error::VanishingSolution { min_modulus });
        }
        Ok(candidate)
    }

    fn unchecked(hom: &HomogeneousSolution, combination: CVec2) -> Self {
        let norm = (combination[0] * combination[1]).sqrt();
        let scaled = [combination[0] / norm, combination[1] / norm];
        let column = hom.u().map(|_, u| {
            let v = u * scaled;
            ComplexMat2::new(v[0], Complex64::ZERO, v[1], Complex64::ZERO)
        });
        let f = SampledScalar::from_indexed(*hom.grid(), |i| column.value(i).a11);
        let g = SampledScalar::from_indexed(*hom.grid(), |i| column.value(i).a21);
        Self { f, g, combination }
    }

    pub fn f(&self) -> &SampledScalar {
        &self.f
    }

    pub fn g(&self) -> &SampledScalar {
        &self.g
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }

    /// The coefficients `c` before normalisation.
    pub fn combination(&self) -> CVec2 {
        self.combination
    }

    /// `min_i min(|f(x_i)|, |g(x_i)|)`.
    pub fn min_modulus(&self) -> f64 {
        self.f
            .values()
            .iter()
            .chain(self.g.values())
            .fold(f64::INFINITY, |m, v| m.min(v.norm()))
    }

    /// `max_i max(|f(x_i)|, |g(x_i)|)`.
    pub fn max_modulus(&self) -> f64 {
        self.f
            .values()
            .iter()
            .chain(self.g.values())
            .fold(0.0, |m: f64, v| m.max(v.norm()))
    }

    /// `|f(0) g(0) - 1|`.
    pub fn normalization_error(&self) -> f64 {
        (self.f.value(0) * self.g.value(0) - c64(1.0, 0.0)).norm()
    }

    /// Interior finite-difference residual of `B Y' + Q Y = 0`.
    pub fn residual(&self, q: &Potential) -> Result<f64> {
        let as_matrix = self.f.zip_with(&self.g, |_, f, g| {
            ComplexMat2::new(f, Complex64::ZERO, g, Complex64::ZERO)
        })?;
        dirac_residual(&as_matrix, q, Complex64::ZERO)
    }
}

/// Particular solution for `Q`, integrating `U(0, x)` first.
pub fn build_particular_solution(q: &Potential) -> Result<ParticularSolution> {
    particular_solution_from(&fundamental_solution_zero(q)?)
}

/// Chooses `c` such that both components of `U(0, x)·c` stay away from zero.
///
/// `c = (1, 1)` is used when it is well separated from zero; otherwise the
/// candidates `(1, e^{iπm/8} t)`, `m = 0..15`, `t ∈ {1/4, 1/2, 1, 2, 4}` are
/// scored by their normalised minimum modulus and the best one is taken.
pub fn particular_solution_from(hom: &HomogeneousSolution) -> Result<ParticularSolution> {
    let one = c64(1.0, 0.0);
    let default = ParticularSolution::unchecked(hom, [one, one]);
    if default.min_modulus() >= ACCEPT_RATIO * default.max_modulus() {
        return Ok(default);
    }
    let mut best = default;
    let mut best_score = best.min_modulus();
    for m in 0..16 {
        let phase = Complex64::from_polar(1.0, core::f64::consts::PI * m as f64 / 8.0);
        for &t in &SWEEP_MODULI {
            let candidate = ParticularSolution::unchecked(hom, [one, phase * t]);
            let score = candidate.min_modulus();
            if score > best_score {
                best = candidate;
                best_score = score;
            }
        }
    }
    if !(best_score >= MIN_MODULUS) {
        return Err(Error::VanishingSolution {
            min_modulus: best_score,
        });
    }
    Ok(best)
}

/// One chain of formal powers: `Xⁿ`, `Yⁿ`, `Zⁿ` for `n = 0..=N`.
#[derive(Clone, Debug)]
pub struct FormalPowerChain {
    upper: Vec<SampledScalar>,
    lower: Vec<SampledScalar>,
    coupling: Vec<SampledScalar>,
}

impl FormalPowerChain {
    /// `Xⁿ`, the factor of `f` in the first component.
    pub fn upper(&self, n: usize) -> &SampledScalar {
        &self.upper[n]
    }

    /// `Yⁿ`, the factor of `g` in the second component.
    pub fn lower(&self, n: usize) -> &SampledScalar {
        &self.lower[n]
    }

    /// `Zⁿ`.
    pub fn coupling(&self, n: usize) -> &SampledScalar {
        &self.coupling[n]
    }
}

/// The plain and tilded chains of formal powers up to order `N`.
#[derive(Clone, Debug)]
pub struct FormalPowerSet {
    plain: FormalPowerChain,
    tilde: FormalPowerChain,
}

impl FormalPowerSet {
    pub fn order(&self) -> usize {
        self.plain.upper.len() - 1
    }

    pub fn grid(&self) -> &Grid {
        self.plain.upper[0].grid()
    }

    /// `Xⁿ, Yⁿ, Zⁿ`.
    pub fn plain(&self) -> &FormalPowerChain {
        &self.plain
    }

    /// `X̃ⁿ, Ỹⁿ, Z̃ⁿ`.
    pub fn tilde(&self) -> &FormalPowerChain {
        &self.tilde
    }

    pub fn chain(&self, variant: Variant) -> &FormalPowerChain {
        match variant {
            Variant::Plain => &self.plain,
            Variant::Tilde => &self.tilde,
        }
    }
}

/// Which chain of formal powers a mapped vector is assembled from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Tilde,
}

/// Image of `x^k e₁` or `x^k e₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Image {
    Phi,
    Psi,
}

impl Image {
    /// `Φ_k` reads the plain chain for odd `k`, `Ψ_k` for even `k`.
    pub fn source(self, k: usize) -> Variant {
        match (self, k % 2 == 1) {
            (Image::Phi, true) | (Image::Psi, false) => Variant::Plain,
            _ => Variant::Tilde,
        }
    }

    /// The normalising constant, `f(0)` when reading the plain chain and
    /// `g(0)` for the tilded one.
    fn prefactor(self, k: usize, ps: &ParticularSolution) -> Complex64 {
        match self.source(k) {
            Variant::Plain => ps.f.value(0),
            Variant::Tilde => ps.g.value(0),
        }
    }
}

/// Runs both formal-power recursions up to order `order`.
pub fn build_formal_powers(ps: &ParticularSolution, q: &Potential, order: usize) -> Result<FormalPowerSet> {
    if ps.grid() != q.grid() {
        return Err(Error::GridMismatch);
    }
    let (f, g, p) = (&ps.f, &ps.g, q.p());
    let ratio_gf = g.zip_with(f, |_, g, f| g / f)?;
    let ratio_fg = f.zip_with(g, |_, f, g| f / g)?;
    let p_over_f2 = p.zip_with(f, |_, p, f| p / (f * f))?;
    let p_over_g2 = p.zip_with(g, |_, p, g| p / (g * g))?;
    let f2 = f.map(|_, f| f * f);
    let g2 = g.map(|_, g| g * g);

    let int_f = p_over_f2.indefinite_integral();
    let int_g = p_over_g2.indefinite_integral();
    let one = c64(1.0, 0.0);

    let grid = *f.grid();
    let run = |upper0: SampledScalar, lower0: SampledScalar| -> Result<FormalPowerChain> {
        let mut upper = Vec::with_capacity(order + 1);
        let mut lower = Vec::with_capacity(order + 1);
        let mut coupling = Vec::with_capacity(order + 1);
        upper.push(upper0);
        lower.push(lower0);
        for n in 0..=order {
            let (xn, yn) = (&upper[n], &lower[n]);
            let zn = SampledScalar::from_indexed(grid, |i| f2.value(i) * xn.value(i) + g2.value(i) * yn.value(i))
                .indefinite_integral();
            if n < order {
                let factor = (n + 1) as f64;
                let next_upper = SampledScalar::from_indexed(grid, |i| {
                    (ratio_gf.value(i) * yn.value(i) + p_over_f2.value(i) * zn.value(i)) * -factor
                })
                .indefinite_integral();
                let next_lower = SampledScalar::from_indexed(grid, |i| {
                    (ratio_fg.value(i) * xn.value(i) + p_over_g2.value(i) * zn.value(i)) * factor
                })
                .indefinite_integral();
                if let Some(node) = next_upper.first_non_finite().or(next_lower.first_non_finite()) {
                    return Err(Error::NonFiniteCoefficient {
                        n: n as isize + 1,
                        node,
                    });
                }
                upper.push(next_upper);
                lower.push(next_lower);
            }
            coupling.push(zn);
        }
        Ok(FormalPowerChain { upper, lower, coupling })
    };

    let plain = run(int_f.scale(-one), int_g.map(|_, v| one + v))?;
    let tilde = run(int_f.map(|_, v| one + v), int_g.scale(-one))?;
    Ok(FormalPowerSet { plain, tilde })
}

/// Overall signs applied to `Φ_k` and `Ψ_k`, indexed by the parity of `k`
/// (`[even, odd]`).
///
/// Evaluated verbatim, the alternating prefactors of the mapped vectors give
/// `Φ_k = -x^k e₁` for odd `k` in the free case, where the transmutation
/// operator is the identity. [`SignCalibration::calibrate`] measures the
/// signs on that case so the correction is data, not a hidden edit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignCalibration {
    pub phi: [f64; 2],
    pub psi: [f64; 2],
}

impl SignCalibration {
    /// The prefactors exactly as printed.
    pub const VERBATIM: Self = Self {
        phi: [1.0, 1.0],
        psi: [1.0, 1.0],
    };

    /// Compares the verbatim `Φ_k`, `Ψ_k` for `Q ≡ 0` against `x^k e₁`,
    /// `x^k e₂` for `k = 0..=3`.
    pub fn calibrate() -> Result<Self> {
        let grid = Grid::new(1.0, 20)?;
        let q = Potential::zero(grid);
        let ps = build_particular_solution(&q)?;
        let fp = build_formal_powers(&ps, &q, 3)?;
        let mut signs = [[0.0; 2]; 2];
        for k in 0..=3 {
            let (phi, psi) = phi_psi(&fp, &ps, k, &Self::VERBATIM)?;
            let at_end = [phi[grid.intervals()][0], psi[grid.intervals()][1]];
            for (family, value) in at_end.iter().enumerate() {
                let sign = if value.re >= 0.0 { 1.0 } else { -1.0 };
                let slot = &mut signs[family][k % 2];
                if *slot != 0.0 && *slot != sign {
                    return Err(Error::InvalidGrid("inconsistent sign calibration"));
                }
                *slot = sign;
            }
        }
        Ok(Self {
            phi: signs[0],
            psi: signs[1],
        })
    }

    pub fn is_verbatim(&self) -> bool {
        *self == Self::VERBATIM
    }

    fn sign(&self, image: Image, k: usize) -> f64 {
        match image {
            Image::Phi => self.phi[k % 2],
            Image::Psi => self.psi[k % 2],
        }
    }
}

/// `(-1)^{⌊k/2⌋}`, the alternating prefactor of both mapped families.
fn alternating(k: usize) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Nodewise `Φ_k` or `Ψ_k`.
pub fn mapped_vector(
    fp: &FormalPowerSet,
    ps: &ParticularSolution,
    image: Image,
    k: usize,
    calibration: &SignCalibration,
) -> Result<Vec<CVec2>> {
    if k > fp.order() {
        return Err(Error::OrderNotAvailable {
            requested: k as isize,
            available: fp.order(),
        });
    }
    let chain = fp.chain(image.source(k));
    let scale = image.prefactor(k, ps) * (alternating(k) * calibration.sign(image, k));
    let (upper, lower) = (chain.upper(k), chain.lower(k));
    Ok((0..ps.f.len())
        .map(|i| {
            [
                scale * ps.f.value(i) * upper.value(i),
                scale * ps.g.value(i) * lower.value(i),
            ]
        })
        .collect())
}

/// The pair `(Φ_k, Ψ_k)`.
pub fn phi_psi(
    fp: &FormalPowerSet,
    ps: &ParticularSolution,
    k: usize,
    calibration: &SignCalibration,
) -> Result<(Vec<CVec2>, Vec<CVec2>)> {
    Ok((
        mapped_vector(fp, ps, Image::Phi, k, calibration)?,
        mapped_vector(fp, ps, Image::Psi, k, calibration)?,
    ))
}

/// `η_k = (Φ_k  Ψ_k)` as a sampled matrix function.
pub fn eta(
    fp: &FormalPowerSet,
    ps: &ParticularSolution,
    k: usize,
    calibration: &SignCalibration,
) -> Result<SampledMat2Fn> {
    let (phi, psi) = phi_psi(fp, ps, k, calibration)?;
    let values = phi
        .into_iter()
        .zip(psi)
        .map(|(a, b)| ComplexMat2::from_columns(a, b))
        .collect();
    SampledMat2Fn::from_values(*fp.grid(), values)
}

/// `K_n` from the mapping property. The value at `x = 0` is zero and the
/// first nodes are guarded like the recursion's `K_n`.
pub fn kernel_coeffs_via_mapping(
    fp: &FormalPowerSet,
    ps: &ParticularSolution,
    calibration: &SignCalibration,
    legendre: &LegendreMonomialTable,
    n: usize,
) -> Result<SampledMat2Fn> {
    if n > legendre.n_max() {
        return Err(Error::DegreeTooLarge {
            requested: n,
            max: legendre.n_max().min(MAX_MONOMIAL_DEGREE),
        });
    }
    let grid = *fp.grid();
    let half = (2 * n + 1) as f64 / 2.0;
    let mut acc: Vec<ComplexMat2> = (0..grid.len()).map(|_| -ComplexMat2::IDENTITY).collect();
    for k in 0..=n {
        let l = legendre.coeff(k, n);
        if l == 0.0 {
            continue;
        }
        let eta_k = eta(fp, ps, k, calibration)?;
        for (i, a) in acc.iter_mut().enumerate().skip(1) {
            *a += eta_k.value(i) * (l * grid.node(i).powi(-(k as i32)));
        }
    }
    for a in acc.iter_mut() {
        *a = *a * half;
    }
    let mut out = SampledMat2Fn::from_values(grid, acc)?;
    if n == 0 {
        out.values_mut()[0] = ComplexMat2::ZERO;
    } else {
        guard_origin(&mut out, n);
    }
    Ok(out)
}

/// Particular solution, formal powers and sign calibration bundled for
/// repeated `K_n` evaluation.
#[derive(Clone, Debug)]
pub struct MappingOracle {
    particular: ParticularSolution,
    powers: FormalPowerSet,
    calibration: SignCalibration,
    legendre: LegendreMonomialTable,
}

impl MappingOracle {
    /// Builds everything needed for `K_0..K_order` (`order ≤ 64`).
    pub fn new(q: &Potential, hom: &HomogeneousSolution, order: usize) -> Result<Self> {
        let legendre = LegendreMonomialTable::new(order)?;
        let particular = particular_solution_from(hom)?;
        let powers = build_formal_powers(&particular, q, order)?;
        Ok(Self {
            particular,
            powers,
            calibration: SignCalibration::calibrate()?,
            legendre,
        })
    }

    pub fn order(&self) -> usize {
        self.powers.order()
    }

    pub fn particular(&self) -> &ParticularSolution {
        &self.particular
    }

    pub fn powers(&self) -> &FormalPowerSet {
        &self.powers
    }

    pub fn calibration(&self) -> &SignCalibration {
        &self.calibration
    }

    /// `K_n` for `n ≤ order`.
    pub fn kernel_coefficient(&self, n: usize) -> Result<SampledMat2Fn> {
        if n > self.order() {
            return Err(Error::OrderNotAvailable {
                requested: n as isize,
                available: self.order(),
            });
        }
        kernel_coeffs_via_mapping(&self.powers, &self.particular, &self.calibration, &self.legendre, n)
    }
}
