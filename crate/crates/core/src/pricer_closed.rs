//! Hermite-function closed form of the normalized price
//! C(ν, h, q) = E[(A_h − q)⁺], A_h = ∫₀^h e^{2(B_τ+ντ)} dτ.
//!
//! For q > 0 the price is a trigonometric term plus four hyperbolic terms,
//!
//!   C = C_trig + d·e^{−ν²h/2}·(C_{ν+2} + C_{−(ν+2)} − C_ν − C_{−ν}),
//!   d = Γ(ν+4)/(2π(ν+1))·(2q)^{(ν+2)/2}·e^{−1/(2q)},
//!   C_trig = 2d·∫₀^π H_{−(ν+4)}(−cos θ/√(2q))·(e^{2h(ν+1)} cos((ν+2)θ) − cos νθ) dθ,
//!   C_b = (2/√π)·e^{π²/(2h)+b²h/2}·∫₀^∞ H_{−(ν+4)}(cosh y/√(2q))·e^{by}·E_b(y) dy,
//!
//! and for q ≤ 0 it is E[A_h] − q.
//!
//! The exponentials e^{π²/(2h)} and e^{−1/(2q)} are never formed on their
//! own: they are folded into the integrands in log space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{denormalize_price, expected_a, normalize, Engine, MarketQuote, PriceEstimate};
use crate::quad::{integrate_oscillatory, integrate_points, integrate_semi_infinite, linspace, QuadSpec};
use crate::specfun::{erfcx_any, hermite_scaled, ln_gamma_abs, HermitePolicy};

/// Smallest q accepted by the q > 0 branch.
pub const MIN_Q: f64 = 1e-4;
/// Supported ν envelope is (NU_MIN, NU_MAX].
pub const NU_MIN: f64 = -4.0;
pub const NU_MAX: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigRep {
    ThetaIntegral,
    SinhRepresentation,
    /// θ-integral, with the sinh form as a diagnostic cross-check when ν > −1.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosedFormSettings {
    pub quad: QuadSpec,
    pub hermite: HermitePolicy,
    pub trig_rep: TrigRep,
    /// Below this h the hyperbolic terms cancel beyond double precision.
    pub min_h: f64,
}

impl Default for ClosedFormSettings {
    fn default() -> Self {
        ClosedFormSettings {
            quad: QuadSpec::new(1e-13, 1e-11),
            hermite: HermitePolicy::default(),
            trig_rep: TrigRep::Auto,
            min_h: 0.15,
        }
    }
}

impl ClosedFormSettings {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        self.hermite.validate()?;
        if !(self.min_h > 0.0) {
            return Err(Error::Domain(format!("min_h must be positive, got {}", self.min_h)));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- E_b

/// Sign of u inside the sine of E_b: −1 is the form used for pricing,
/// +1 the alternative checked by the self test.
pub type SineSign = f64;

fn beta(b: f64, h: f64, y: f64) -> f64 {
    y / (2.0 * h).sqrt() + 0.5 * b * (2.0 * h).sqrt()
}

/// E_b by oscillatory quadrature,
/// ∫_β^∞ e^{−u²} sin(π(b + s·u√(2h)/h)) du with β = y/√(2h) + (b/2)√(2h).
pub fn e_b_signed(s: SineSign, b: f64, h: f64, y: f64, spec: &QuadSpec) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("E_b needs h > 0, got {h}")));
    }
    let lo = beta(b, h, y);
    let k = (2.0 * h).sqrt() / h;
    let f = |u: f64| (-u * u).exp() * (PI * (b + s * u * k)).sin();
    let env = |u: f64| (-u.max(0.0).powi(2)).exp();
    let r = integrate_oscillatory(f, lo, None, (0.5 * h).sqrt(), env, spec)?;
    Ok(r.value)
}

/// E_b(h)(y) = ∫_β^∞ e^{−u²} sin(π(b − u√(2h)/h)) du by quadrature.
pub fn e_b(b: f64, h: f64, y: f64, spec: &QuadSpec) -> Result<f64> {
    e_b_signed(-1.0, b, h, y, spec)
}

/// e^{−β²}·e^{iφ}·erfcx(β − isc) without forming e^{β²} or e^{c²}, where
/// c = π/√(2h). Returns the real value of Im[…] split as
/// (part carrying e^{−β²}, part carrying e^{−c²}·e^{yb+b²h/2}) so callers
/// can apply their own exponent bookkeeping.
fn erfc_core(s: SineSign, b: f64, h: f64, y: f64, phase: f64) -> Result<(f64, f64)> {
    let c = PI / (2.0 * h).sqrt();
    let be = beta(b, h, y);
    let zeta = Complex64::new(be, -s * c);
    let e = Complex64::from_polar(1.0, phase);
    if be >= 0.0 {
        Ok(((e * erfcx_any(zeta)?).im, 0.0))
    } else {
        // erfcx(ζ) = 2e^{ζ²} − erfcx(−ζ); the first piece has phase πb
        // once combined with e^{iφ}
        let reflected = (e * erfcx_any(-zeta)?).im;
        Ok((-reflected, 2.0 * (PI * b).sin()))
    }
}

/// E_b through the complementary error function,
/// (√π/2)·e^{−π²/(2h)}·e^{−yb}·Im[e^{(y+iπ)b}·Erfc(β + iπ/√(2h))].
pub fn e_b_via_erfc(b: f64, h: f64, y: f64) -> Result<f64> {
    e_b_via_erfc_signed(-1.0, b, h, y)
}

pub fn e_b_via_erfc_signed(s: SineSign, b: f64, h: f64, y: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("E_b needs h > 0, got {h}")));
    }
    let c = PI / (2.0 * h).sqrt();
    let be = beta(b, h, y);
    // Erfc(ζ) = e^{−ζ²} erfcx(ζ), e^{−c²}·e^{−ζ²} = e^{−β²}·e^{2isβc}
    let phase = PI * b + 2.0 * s * be * c;
    let (main, refl) = erfc_core(s, b, h, y, phase)?;
    let half_sqrt_pi = 0.5 * PI.sqrt();
    Ok(half_sqrt_pi * ((-be * be).exp() * main + (-c * c).exp() * refl))
}

/// e^{−c²}·e^{π²/(2h)+b²h/2+by}·E_b(y)·(2/√π) with c² = π²/(2h): the
/// hyperbolic integrand without its Hermite factor, scaled by e^{−c²}.
fn hyp_kernel(s: SineSign, b: f64, h: f64, y: f64) -> Result<f64> {
    let c2 = PI * PI / (2.0 * h);
    let phase = PI * b * (1.0 + s) + s * PI * y / h;
    let (main, refl) = erfc_core(s, b, h, y, phase)?;
    let mut v = (-y * y / (2.0 * h)).exp() * main;
    if refl != 0.0 {
        v += (y * b + b * b * h / 2.0 - c2).exp() * refl;
    }
    Ok(v)
}

// ---------------------------------------------------------------- helpers

fn check_inputs(nu: f64, h: f64, q: f64) -> Result<()> {
    if !(nu > NU_MIN && nu <= NU_MAX) {
        return Err(Error::Domain(format!("nu = {nu} outside the supported range ({NU_MIN}, {NU_MAX}]")));
    }
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("h must be finite and non-negative, got {h}")));
    }
    if !q.is_finite() {
        return Err(Error::Domain(format!("q must be finite, got {q}")));
    }
    Ok(())
}

fn check_positive_branch(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<()> {
    check_inputs(nu, h, q)?;
    if (nu + 1.0).abs() < 1e-8 {
        return Err(Error::NuPole(format!("nu = {nu} is within 1e-8 of -1")));
    }
    if q < MIN_Q {
        return Err(Error::SmallQ(format!("q = {q} is below {MIN_Q}")));
    }
    if h < settings.min_h {
        return Err(Error::Oscillation(format!("h = {h} is below min_h = {}", settings.min_h)));
    }
    Ok(())
}

/// (ln|d|, sign d) for d = Γ(ν+4)/(2π(ν+1))·(2q)^{(ν+2)/2}·e^{−1/(2q)}.
fn log_d(nu: f64, q: f64) -> Result<(f64, f64)> {
    let ln = ln_gamma_abs(nu + 4.0)? - (2.0 * PI).ln() - (nu + 1.0).abs().ln() + 0.5 * (nu + 2.0) * (2.0 * q).ln()
        - 0.5 / q;
    Ok((ln, (nu + 1.0).signum()))
}

/// H_{−(ν+4)}(w) as (mantissa, log scale).
fn hermite_deg(deg: f64, w: f64, policy: &HermitePolicy) -> Result<(f64, f64)> {
    let (m, s) = hermite_scaled(Complex64::new(deg, 0.0), Complex64::new(w, 0.0), policy)?;
    Ok((m.re, s))
}

fn theta_points(q: f64) -> Vec<f64> {
    // the θ integrand is concentrated within ~√(2q) of θ = 0 for small q
    let w = (2.0 * q).sqrt();
    let mut pts = linspace(0.0, PI, 8);
    let mut t = w;
    while t < PI / 2.0 {
        pts.push(t);
        t *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

// ---------------------------------------------------------------- C_trig

/// The trigonometric term with its error estimate.
fn c_trig_theta(nu: f64, h: f64, q: f64, deg: f64, settings: &ClosedFormSettings) -> Result<(f64, f64)> {
    let (ld, sign) = log_d(nu, q)?;
    let growth = (2.0 * h * (nu + 1.0)).exp();
    let s2q = (2.0 * q).sqrt();
    let pol = settings.hermite;
    let failed = std::cell::Cell::new(None);
    let f = |th: f64| -> f64 {
        match hermite_deg(deg, -th.cos() / s2q, &pol) {
            Ok((m, s)) => {
                2.0 * sign * (ld + s).exp() * m * (growth * ((nu + 2.0) * th).cos() - (nu * th).cos())
            }
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let r = integrate_points(f, &theta_points(q), &settings.quad);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let r = r?;
    Ok((r.value, r.err_est))
}

/// The trigonometric term through the sinh representation,
/// E[A_h] − q + sin(νπ)·2d·∫₀^∞ H_{−(ν+4)}(cosh x/√(2q))·(e^{2h(ν+1)}e^{−(ν+2)x} − e^{−νx}) dx.
fn c_trig_sinh(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<(f64, f64)> {
    if !(nu > -1.0) {
        return Err(Error::Domain(format!("sinh representation needs nu > -1, got {nu}")));
    }
    let base = expected_a(nu, h) - q;
    let sn = crate::specfun::sin_pi(Complex64::new(nu, 0.0)).re;
    if sn == 0.0 {
        return Ok((base, 4.0 * f64::EPSILON * base.abs()));
    }
    let (ld, sign) = log_d(nu, q)?;
    let growth = (2.0 * h * (nu + 1.0)).exp();
    let s2q = (2.0 * q).sqrt();
    let deg = -(nu + 4.0);
    let pol = settings.hermite;
    let pre = 2.0 * sign * sn;
    let failed = std::cell::Cell::new(None);
    let f = |x: f64| -> f64 {
        match hermite_deg(deg, x.cosh() / s2q, &pol) {
            Ok((m, s)) => pre * (ld + s).exp() * m * (growth * (-(nu + 2.0) * x).exp() - (-nu * x).exp()),
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    // H_{−(ν+4)}(w) ≤ (2w)^{−(ν+4)}·(1 + O(w^{−2})); factor 2 margin
    let env = |x: f64| {
        let w = x.cosh() / s2q;
        2.0 * pre.abs()
            * (ld + deg * (2.0 * w).ln()).exp()
            * (growth * (-(nu + 2.0) * x).exp() + (-nu * x).exp())
    };
    let spec = QuadSpec {
        tail_eps: settings.quad.abs_tol * 1e-2,
        ..settings.quad
    };
    let r = integrate_semi_infinite(f, 0.0, env, &spec);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let r = r?;
    Ok((base + r.value, r.err_est))
}

/// Trigonometric term C_trig(ν, h, q).
pub fn c_trig(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<f64> {
    check_positive_branch(nu, h, q, settings)?;
    match settings.trig_rep {
        TrigRep::SinhRepresentation => c_trig_sinh(nu, h, q, settings).map(|v| v.0),
        _ => c_trig_theta(nu, h, q, -(nu + 4.0), settings).map(|v| v.0),
    }
}

/// C_trig with the single-frequency bracket c·∫H·cos(νθ)dθ,
/// c = Γ(ν+4)(e^{2h(ν+1)}−1)(2q)^{(ν+2)/2}/((ν+1)π e^{1/(2q)}).
/// Kept only so the self test can show it disagrees with the other
/// engines.
pub fn c_trig_single_frequency(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<f64> {
    check_positive_branch(nu, h, q, settings)?;
    let (ld, sign) = log_d(nu, q)?;
    let factor = 2.0 * sign * (2.0 * h * (nu + 1.0)).exp_m1();
    let s2q = (2.0 * q).sqrt();
    let deg = -(nu + 4.0);
    let pol = settings.hermite;
    let f = |th: f64| -> f64 {
        let (m, s) = hermite_deg(deg, -th.cos() / s2q, &pol).unwrap_or((f64::NAN, 0.0));
        factor * (ld + s).exp() * m * (nu * th).cos()
    };
    Ok(integrate_points(f, &theta_points(q), &settings.quad)?.value)
}

// ---------------------------------------------------------------- C_hyp

fn y_panels(h: f64) -> Vec<f64> {
    let c2 = PI * PI / (2.0 * h);
    // e^{c²−y²/(2h)} has dropped by e^{−40} below the O(1) result here
    let y_max = (2.0 * h * (c2 + 40.0)).sqrt();
    let n = ((y_max / h).ceil() as usize).clamp(4, 4000);
    linspace(0.0, y_max, n)
}

/// ∫₀^∞ H_{−(ν+4)}(cosh y/√(2q))·Σ_b w_b·kernel_b(y) dy, scaled by e^{−c²}.
fn hyp_integral(
    s: SineSign,
    terms: &[(f64, f64)],
    nu: f64,
    h: f64,
    q: f64,
    abs_tol: f64,
    settings: &ClosedFormSettings,
) -> Result<(f64, f64, f64)> {
    let s2q = (2.0 * q).sqrt();
    let deg = -(nu + 4.0);
    let pol = settings.hermite;
    let failed = std::cell::Cell::new(None);
    let f = |y: f64| -> f64 {
        let hm = match hermite_deg(deg, y.cosh() / s2q, &pol) {
            Ok((m, sc)) => m * sc.exp(),
            Err(e) => {
                failed.set(Some(e));
                return f64::NAN;
            }
        };
        let mut k = 0.0;
        for &(b, w) in terms {
            match hyp_kernel(s, b, h, y) {
                Ok(v) => k += w * v,
                Err(e) => {
                    failed.set(Some(e));
                    return f64::NAN;
                }
            }
        }
        hm * k
    };
    let spec = QuadSpec {
        abs_tol: abs_tol.max(1e-300),
        ..settings.quad
    };
    let r = integrate_points(f, &y_panels(h), &spec);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let r = r?;
    Ok((r.value, r.err_est, r.abs_value))
}

/// Hyperbolic term C_{hyp,b}(ν, h, q) on its own.
pub fn c_hyp(b: f64, nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<f64> {
    check_positive_branch(nu, h, q, settings)?;
    let c2 = PI * PI / (2.0 * h);
    if c2 > 700.0 {
        return Err(Error::OverflowGuard(format!("e^(pi^2/(2h)) overflows at h = {h}")));
    }
    let tol = settings.quad.abs_tol * (-c2).exp();
    let (v, _, _) = hyp_integral(-1.0, &[(b, 1.0)], nu, h, q, tol, settings)?;
    Ok(v * c2.exp())
}

// ---------------------------------------------------------------- assembly

struct Parts {
    trig: f64,
    trig_err: f64,
    hyp: f64,
    hyp_err: f64,
    /// ∫|hyp integrand| in price units; measures cancellation.
    hyp_abs: f64,
}

fn assemble(s: SineSign, nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<Parts> {
    let (trig, trig_err) = c_trig_theta(nu, h, q, -(nu + 4.0), settings)?;
    let (ld, sign) = log_d(nu, q)?;
    let c2 = PI * PI / (2.0 * h);
    let log_scale = ld + c2 - nu * nu * h / 2.0;
    if log_scale > 700.0 {
        return Err(Error::OverflowGuard(format!(
            "hyperbolic prefactor e^{log_scale:.1} overflows at h = {h}, q = {q}"
        )));
    }
    let scale = log_scale.exp();
    let terms = [(nu + 2.0, 1.0), (-(nu + 2.0), 1.0), (nu, -1.0), (-nu, -1.0)];
    let (hyp, hyp_err, hyp_abs) = if scale == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        let tol = settings.quad.abs_tol / scale;
        let (v, e, a) = hyp_integral(s, &terms, nu, h, q, tol, settings)?;
        (sign * scale * v, scale * e, scale * a)
    };
    Ok(Parts {
        trig,
        trig_err,
        hyp,
        hyp_err,
        hyp_abs,
    })
}

/// Closed-form price with the sine sign inside E_b chosen by `s`.
pub fn price_normalized_signed(
    s: SineSign,
    nu: f64,
    h: f64,
    q: f64,
    settings: &ClosedFormSettings,
) -> Result<PriceEstimate> {
    check_inputs(nu, h, q)?;
    if h == 0.0 {
        return Ok(PriceEstimate::new((-q).max(0.0), Engine::Closed, 0.0).with("branch", "h=0"));
    }
    if q <= 0.0 {
        let v = expected_a(nu, h) - q;
        return Ok(PriceEstimate::new(v, Engine::Closed, 2.0 * f64::EPSILON * v.abs()).with("branch", "q<=0"));
    }
    check_positive_branch(nu, h, q, settings)?;
    let p = assemble(s, nu, h, q, settings)?;
    let value = p.trig + p.hyp;
    // rounding in the cancelling hyperbolic sum is not seen by the
    // per-panel error estimates
    let rounding = 64.0 * f64::EPSILON * p.hyp_abs;
    let err = p.trig_err + p.hyp_err + rounding;
    let mut est = PriceEstimate::new(value, Engine::Closed, err)
        .with("branch", "q>0")
        .with("c_trig", fmt17(p.trig))
        .with("hyperbolic_sum", fmt17(p.hyp))
        .with("hyperbolic_abs", fmt17(p.hyp_abs));
    if settings.trig_rep != TrigRep::ThetaIntegral && nu > -1.0 {
        match c_trig_sinh(nu, h, q, settings) {
            Ok((alt, alt_err)) => {
                if settings.trig_rep == TrigRep::SinhRepresentation {
                    est.value = alt + p.hyp;
                    est.err_est = alt_err + p.hyp_err + rounding;
                }
                est = est.with("c_trig_sinh", fmt17(alt)).with(
                    "c_trig_rel_diff",
                    format!("{:.3e}", (alt - p.trig).abs() / p.trig.abs().max(1e-300)),
                );
            }
            Err(e) => est = est.with("c_trig_sinh", format!("error: {e}")),
        }
    } else if settings.trig_rep == TrigRep::SinhRepresentation {
        return Err(Error::Domain(format!("sinh representation needs nu > -1, got {nu}")));
    }
    Ok(est)
}

/// Normalized price C(ν, h, q).
pub fn price_normalized(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<PriceEstimate> {
    price_normalized_signed(-1.0, nu, h, q, settings)
}

/// Price in currency.
pub fn price(mq: &MarketQuote, settings: &ClosedFormSettings) -> Result<PriceEstimate> {
    let n = normalize(mq)?;
    let est = price_normalized(n.nu, n.h, n.q, settings)?;
    let factor = denormalize_price(mq, 1.0);
    Ok(est.scaled(factor))
}

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------- ∂/∂q

/// ∂C/∂q. Differentiates d(q) and the Hermite arguments w = x/√(2q) under
/// the integrals: ∂H_{−(ν+4)}(w)/∂q = (ν+4)·w·H_{−(ν+5)}(w)/q.
pub fn dprice_dq(nu: f64, h: f64, q: f64, settings: &ClosedFormSettings) -> Result<(f64, f64)> {
    check_inputs(nu, h, q)?;
    if q <= 0.0 {
        return Ok((-1.0, 0.0));
    }
    check_positive_branch(nu, h, q, settings)?;
    // C = d·J(q) with J = J_trig + e^{−ν²h/2}·Σ; d'/d = (ν+2)/(2q) + 1/(2q²)
    let dlog = (nu + 2.0) / (2.0 * q) + 0.5 / (q * q);
    let p = assemble(-1.0, nu, h, q, settings)?;
    let value_part = dlog * (p.trig + p.hyp);
    let err_value = dlog.abs() * (p.trig_err + p.hyp_err + 64.0 * f64::EPSILON * p.hyp_abs);

    // derivative of the integrals: degree −(ν+5) with the extra factor
    // (ν+4)·w/q folded into the kernels
    let (ld, sign) = log_d(nu, q)?;
    let growth = (2.0 * h * (nu + 1.0)).exp();
    let s2q = (2.0 * q).sqrt();
    let pol = settings.hermite;
    let deg = -(nu + 5.0);
    let k = (nu + 4.0) / q;
    let failed = std::cell::Cell::new(None);
    let ft = |th: f64| -> f64 {
        let w = -th.cos() / s2q;
        match hermite_deg(deg, w, &pol) {
            Ok((m, s)) => {
                2.0 * sign * k * w * (ld + s).exp() * m * (growth * ((nu + 2.0) * th).cos() - (nu * th).cos())
            }
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let rt = integrate_points(ft, &theta_points(q), &settings.quad);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let rt = rt?;

    let c2 = PI * PI / (2.0 * h);
    let log_scale = ld + c2 - nu * nu * h / 2.0;
    let scale = log_scale.exp();
    let terms = [(nu + 2.0, 1.0), (-(nu + 2.0), 1.0), (nu, -1.0), (-nu, -1.0)];
    let fh = |y: f64| -> f64 {
        let w = y.cosh() / s2q;
        let hm = match hermite_deg(deg, w, &pol) {
            Ok((m, sc)) => m * sc.exp(),
            Err(e) => {
                failed.set(Some(e));
                return f64::NAN;
            }
        };
        let mut acc = 0.0;
        for &(b, wt) in &terms {
            match hyp_kernel(-1.0, b, h, y) {
                Ok(v) => acc += wt * v,
                Err(e) => {
                    failed.set(Some(e));
                    return f64::NAN;
                }
            }
        }
        k * w * hm * acc
    };
    let (hv, he, ha) = if scale == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        let spec = QuadSpec {
            abs_tol: (settings.quad.abs_tol / scale).max(1e-300),
            ..settings.quad
        };
        let r = integrate_points(fh, &y_panels(h), &spec);
        if let Some(e) = failed.take() {
            return Err(e);
        }
        let r = r?;
        (sign * scale * r.value, scale * r.err_est, scale * r.abs_value)
    };
    let value = value_part + rt.value + hv;
    let err = err_value + rt.err_est + he + 64.0 * f64::EPSILON * ha;
    Ok((value, err))
}
