//! Geman–Yor Laplace transform of the normalized price in h, and its
//! numerical inversion along a vertical Bromwich contour.
//!
//! With the strike frozen at a = q(h),
//!
//!   F_GY(a, z) = D_ν(a, z) / (z·(z − 2(ν+1))),
//!   D_ν(a, z) = (e^{−1/(2a)}/a)·∫₀^∞ e^{−x²/(2a)}·x^{ν+3}·I_{√(2z+ν²)}(x/a) dx.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{expected_a, Engine, PriceEstimate};
use crate::quad::{integrate_points, integrate_semi_infinite, linspace, QuadSpec};
use crate::specfun::{bessel_i_scaled, erfcx_any};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BromwichSettings {
    /// Offset of the contour right of the pole at 2(ν+1).
    pub abscissa_margin: f64,
    pub n_terms: usize,
    pub euler_depth: usize,
    pub quad: QuadSpec,
    /// The contour is moved a further aliasing_log/(2h) to the right, which
    /// damps the trapezoid's aliasing error to about e^{−aliasing_log}.
    pub aliasing_log: f64,
}

impl Default for BromwichSettings {
    fn default() -> Self {
        BromwichSettings {
            abscissa_margin: 1.0,
            n_terms: 64,
            euler_depth: 12,
            quad: QuadSpec::new(1e-15, 1e-12),
            aliasing_log: 20.0,
        }
    }
}

impl BromwichSettings {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.abscissa_margin > 0.0) || self.n_terms == 0 || self.euler_depth == 0 {
            return Err(Error::Domain(format!("invalid Bromwich settings: {self:?}")));
        }
        if !(self.aliasing_log >= 0.0 && self.aliasing_log.is_finite()) {
            return Err(Error::Domain(format!("aliasing_log must be >= 0, got {}", self.aliasing_log)));
        }
        Ok(())
    }

    /// Real part of the contour for a given (ν, h).
    pub fn abscissa(&self, nu: f64, h: f64) -> f64 {
        2.0 * (nu + 1.0) + self.abscissa_margin + self.aliasing_log / (2.0 * h)
    }
}

/// D_ν(a, z).
pub fn d_nu(a: f64, z: Complex64, nu: f64, spec: &QuadSpec) -> Result<Complex64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("d_nu needs a > 0, got {a}")));
    }
    if !(nu > -4.0) {
        return Err(Error::Domain(format!("d_nu needs nu > -4, got {nu}")));
    }
    let w = 2.0 * z + nu * nu;
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::Branch(format!("2z + nu^2 = {w} on the negative real axis")));
    }
    let mu = w.sqrt();
    let failed = std::cell::Cell::new(None);
    // e^{−1/(2a)}·e^{−x²/(2a)}·I(x/a) = e^{−(x−1)²/(2a)}·[e^{−x/a} I(x/a)]
    let f = |x: f64| -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match bessel_i_scaled(mu, Complex64::new(x / a, 0.0)) {
            Ok(i) => i * ((-(x - 1.0).powi(2) / (2.0 * a)).exp() * x.powf(nu + 3.0) / a),
            Err(e) => {
                failed.set(Some(e));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let end = (2.0 * a).sqrt() * ((nu + 4.0).sqrt() + 8.0) + 1.0;
    let mut pts = linspace(0.0, end, 12);
    // the Gaussian peak near x = 1 can be narrow for small a
    let s = a.sqrt();
    for k in -3..=3 {
        let p = 1.0 + k as f64 * s;
        if p > 0.0 && p < end {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let r = integrate_points(f, &pts, spec);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(r?.value)
}

/// F_GY(a, z) = D_ν(a, z)/(z(z − 2(ν+1))).
pub fn f_gy(a: f64, z: Complex64, nu: f64, spec: &QuadSpec) -> Result<Complex64> {
    let pole = 2.0 * (nu + 1.0);
    if z.norm() < 1e-8 || (z - pole).norm() < 1e-8 {
        return Err(Error::PoleProximity(format!("z = {z} within 1e-8 of a pole (0 or {pole})")));
    }
    Ok(d_nu(a, z, nu, spec)? / (z * (z - pole)))
}

/// Euler (binomial) average of the partial sums s[n..=n+m].
fn euler_average(partial: &[f64], n: usize, m: usize) -> f64 {
    let mut c = 1.0;
    let mut acc = 0.0;
    for j in 0..=m {
        acc += c * partial[n + j];
        c *= (m - j) as f64 / (j + 1) as f64;
    }
    acc / 2f64.powi(m as i32)
}

fn check_invert(nu: f64, h: f64, a: f64, settings: &BromwichSettings) -> Result<()> {
    if !(nu > -1.0) {
        return Err(Error::Domain(format!("laplace engine needs nu > -1, got {nu}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("laplace engine needs h > 0, got {h}")));
    }
    if !(a > 0.0) {
        return Err(Error::NonpositiveStrike(format!(
            "frozen strike a = {a} <= 0 belongs to the rigid closed form"
        )));
    }
    settings.validate()
}

/// Terms Re F(x₀ + ikπ/h), k = 0..n_terms+euler_depth, with the
/// trapezoid weights ½ and (−1)^k applied.
fn contour_terms(nu: f64, h: f64, a: f64, settings: &BromwichSettings) -> Result<Vec<f64>> {
    let x0 = settings.abscissa(nu, h);
    let n = settings.n_terms + settings.euler_depth + 1;
    let vals: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let z = Complex64::new(x0, k as f64 * PI / h);
            let f = f_gy(a, z, nu, &settings.quad)?.re;
            let w = if k == 0 {
                0.5
            } else if k % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            Ok(w * f)
        })
        .collect();
    vals.into_iter().collect()
}

/// Normalized price by Bromwich inversion at the frozen strike
/// a = k·h + q_star.
pub fn invert_price(nu: f64, h: f64, k: f64, q_star: f64, settings: &BromwichSettings) -> Result<PriceEstimate> {
    let a = k * h + q_star;
    check_invert(nu, h, a, settings)?;
    let terms = contour_terms(nu, h, a, settings)?;
    let mut partial = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partial.push(acc);
    }
    let (n, m) = (settings.n_terms, settings.euler_depth);
    let x0 = settings.abscissa(nu, h);
    let pre = (x0 * h).exp() / h;
    let value = pre * euler_average(&partial, n, m);
    let tail = pre * (euler_average(&partial, n, m) - euler_average(&partial, n - 1, m)).abs();
    // leading aliased image e^{−2hx₀}·C(3h), with C(3h) ≤ E[A_{3h}]
    let aliasing = 2.0 * (-2.0 * h * x0).exp() * expected_a(nu, 3.0 * h);
    // relative quadrature error of every F value, amplified by e^{x₀h}
    let rounding = pre * terms.iter().map(|t| t.abs()).sum::<f64>() * (settings.quad.rel_tol + 8.0 * f64::EPSILON);
    let err = tail + aliasing + rounding;
    Ok(PriceEstimate::new(value, Engine::Laplace, err)
        .with("abscissa", format!("{x0:.6}"))
        .with("frozen_strike", format!("{a:.16e}"))
        .with("euler_tail", format!("{tail:.3e}"))
        .with("rounding", format!("{rounding:.3e}")))
}

/// Two-sided trapezoid sum Σ_{k=−N}^{N} (−1)^k F(x₀ + ikπ/h) with every
/// F evaluated independently; its imaginary part vanishes only through
/// conjugate symmetry.
pub fn raw_bromwich_sum(nu: f64, h: f64, a: f64, settings: &BromwichSettings) -> Result<Complex64> {
    check_invert(nu, h, a, settings)?;
    let x0 = settings.abscissa(nu, h);
    let n = settings.n_terms as i64;
    let vals: Vec<Result<Complex64>> = (-n..=n)
        .into_par_iter()
        .map(|k| {
            let z = Complex64::new(x0, k as f64 * PI / h);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Ok(f_gy(a, z, nu, &settings.quad)? * sign)
        })
        .collect();
    let mut s = Complex64::new(0.0, 0.0);
    for v in vals {
        s += v?;
    }
    Ok(s)
}

// ---------------------------------------------------------------- transform pairs

/// f_{α,β}(t) = t^{−1/2}e^{−α²/(4t)}/√π − β·e^{αβ+β²t}·Erfc(β√t + α/(2√t)).
pub fn pair_f(alpha: Complex64, beta: Complex64, t: f64) -> Result<Complex64> {
    let st = t.sqrt();
    let g = (-alpha * alpha / (4.0 * t)).exp();
    // e^{αβ+β²t}·Erfc(w) = e^{−α²/(4t)}·erfcx(w)
    let w = beta * st + alpha / (2.0 * st);
    Ok(g * (1.0 / (PI * t).sqrt() - beta * erfcx_any(w)?))
}

/// g_{α,β}(t) = (e^{β²t}/2)(e^{αβ}Erfc(α/(2√t) + β√t) + e^{−αβ}Erfc(α/(2√t) − β√t)).
pub fn pair_g(alpha: Complex64, beta: Complex64, t: f64) -> Result<Complex64> {
    let st = t.sqrt();
    let g = (-alpha * alpha / (4.0 * t)).exp();
    let u = alpha / (2.0 * st);
    Ok(g * 0.5 * (erfcx_any(u + beta * st)? + erfcx_any(u - beta * st)?))
}

fn forward_laplace<F: Fn(f64) -> Result<Complex64>>(
    f: F,
    z: Complex64,
    rate: f64,
    bound: f64,
    spec: &QuadSpec,
) -> Result<Complex64> {
    let failed = std::cell::Cell::new(None);
    let g = |t: f64| -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match f(t) {
            Ok(v) => v * (-z * t).exp(),
            Err(e) => {
                failed.set(Some(e));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    // both functions are O(e^{Re(β²)t}) at infinity; t^{−1/2} near 0 is
    // killed by e^{−α²/(4t)}
    let env = |t: f64| bound * (-rate * t).exp() * (1.0 + t);
    let spec = QuadSpec {
        tail_eps: spec.abs_tol * 1e-2,
        ..*spec
    };
    let r = integrate_semi_infinite(g, 0.0, env, &spec);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(r?.value)
}

/// max over f and g of |∫₀^∞ e^{−zt}·pair(t) dt − closed form|, each pair
/// included where its transform exists.
pub fn transform_pair_residual(alpha: Complex64, beta: Complex64, z: Complex64, spec: &QuadSpec) -> Result<f64> {
    if !(alpha.re > 0.0 && (alpha * alpha).re > 0.0) {
        return Err(Error::Domain(format!("need Re α > 0 and Re α² > 0, got α = {alpha}")));
    }
    let grow = (beta * beta).re.max(0.0);
    let rate = z.re - grow;
    let sz = z.sqrt();
    let bound = 2.0 * ((alpha * beta).re.abs().exp()) * (1.0 + beta.norm()) + 1.0;
    let mut worst: Option<f64> = None;
    if z.re > beta.re.abs() && rate > 0.0 {
        let num = forward_laplace(|t| pair_f(alpha, beta, t), z, rate, bound, spec)?;
        let exact = (-alpha * sz).exp() / (sz + beta);
        worst = Some((num - exact).norm());
    }
    if rate > 0.0 {
        let num = forward_laplace(|t| pair_g(alpha, beta, t), z, rate, bound, spec)?;
        let exact = (-alpha * sz).exp() / (z - beta * beta);
        let r = (num - exact).norm();
        worst = Some(worst.map_or(r, |w| w.max(r)));
    }
    worst.ok_or_else(|| Error::Domain(format!("no transform pair converges at z = {z} for β = {beta}")))
}
