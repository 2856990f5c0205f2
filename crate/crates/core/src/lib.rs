//! Pricing of arithmetic-average Asian options under Black–Scholes.
//!
//! Four engines compute the same normalized price
//! C(ν, h, q) = E[(∫₀^h e^{2(B_τ+ντ)} dτ − q)⁺]:
//! a Hermite-function closed form ([`pricer_closed`]), numerical inversion
//! of the Geman–Yor Laplace transform ([`laplace_gy`]), Yor's triple
//! integral and Monte Carlo ([`yor_mc`]).

pub mod engines;
pub mod error;
pub mod greeks;
pub mod laplace_gy;
pub mod model;
pub mod pricer_closed;
pub mod quad;
pub mod selftest;
pub mod specfun;
pub mod yor_mc;

pub use error::{Error, Result};
