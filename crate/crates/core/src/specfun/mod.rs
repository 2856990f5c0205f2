//! Special functions: complex gamma, complementary error function,
//! Hermite functions and modified Bessel functions of complex order.

mod bessel;
mod erf;
mod gamma;
mod hermite;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_i_schlafli, weber_closed_form, weber_quadrature};
pub use erf::{erfc, erfc_real, erfc_scaled, faddeeva};
pub(crate) use erf::erfcx_any;
pub use gamma::{gamma, gamma_complex, ln_gamma, ln_gamma_abs, pochhammer, rgamma};
pub(crate) use gamma::sin_pi;
pub use hermite::{
    asymptotic_remainder_bound, hermite, hermite_asymptotic, hermite_asymptotic_partial,
    hermite_integral, hermite_polynomial, hermite_real, hermite_scaled, hermite_series,
    HermitePolicy, SeriesEval,
};

pub use num_complex::Complex64;

/// Complex number type used throughout.
pub type ComplexValue = Complex64;
