//! Solutions of the one-dimensional Dirac system in canonical form
//!
//! ```text
//! B Y' + Q(x) Y = λ Y,   B = ((0, 1), (-1, 0)),   Q = ((p, q), (q, -p))
//! ```
//!
//! represented as truncated Neumann series of Bessel functions (NSBF). The
//! coefficients of the series are the Fourier–Legendre coefficients `K_n` of
//! the transmutation kernel; they are built from a recursion for
//! `θ_n = x^n K_n` driven by the fundamental solution `U(0, x)`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line front end live in the companion `nsbf` crate.
//!
//! Module map:
//!
//! * [`special`] – spherical Bessel functions and Legendre polynomials
//! * [`grid`] – uniform grids, sampled functions, indefinite integration
//! * [`dirac`] – potentials, `U(0, x)`, the solution operator `S`
//! * [`kernel`] – `θ_n`, `K_n`, Goursat residuals, automatic truncation
//! * [`solution`] – evaluation of `U^N(λ, x)`, `∂_λ U^N`, initial-value problems
//! * [`spectral`] – characteristic function and eigenvalue scanning
//! * [`zs`] – the Zakharov–Shabat/AKNS adapter
//! * [`mapping`] – formal powers and the mapping-property formula for `K_n`
//! * [`expr`] – the expression language used to define potentials
#![no_std]
#![forbid(unsafe_code)]
// `!(x <= limit)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

// `num_traits::Float` provides f64 maths under no_std. Builds where std's
// inherent methods win report those imports as unused, hence the
// `allow(unused_imports)` on each of them.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dirac;
mod error;
pub mod expr;
pub mod grid;
pub mod kernel;
pub mod mapping;
pub mod mat2;
pub mod solution;
pub mod special;
pub mod spectral;
pub mod zs;

pub use error::{Error, Result};
pub use mat2::{c64, CVec2, ComplexMat2};
pub use num_complex::Complex64;
