//! Special functions consumed by the NSBF representation.

mod bessel;
mod legendre;

pub use bessel::{
    spherical_bessel_over_arg, spherical_bessel_pair, spherical_bessel_seq, spherical_bessel_series, BesselSequence,
    SERIES_RADIUS,
};
pub use legendre::{legendre_eval, legendre_monomial_coeffs, LegendreMonomialTable, MAX_MONOMIAL_DEGREE};
