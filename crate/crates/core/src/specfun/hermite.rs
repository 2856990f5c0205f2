//! Hermite functions H_ν(z) of complex degree and argument.
//!
//! Evaluation picks, per point, the first method whose own error
//! estimate meets the policy tolerance:
//! the power series near the origin (rejected when its cancellation is
//! too large), the asymptotic expansion far out in the right half-plane,
//! and otherwise Taylor stepping of the differential equation from an
//! anchor where one of the former is accurate. The left half-plane is
//! reduced to the right one by the connection formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::gamma::{ln_gamma, rgamma};
use crate::error::{Error, Result};
use crate::quad::{integrate_points, QuadSpec};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Method selection for [`hermite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HermitePolicy {
    /// Largest |z| at which the power series is attempted.
    pub series_radius: f64,
    pub max_series_terms: u32,
    /// Relative accuracy asked of every path.
    pub asym_target_tol: f64,
    /// The asymptotic expansion with the rigorous remainder bound is used
    /// for |arg z| ≤ π/2 − wedge_delta.
    pub wedge_delta: f64,
}

impl Default for HermitePolicy {
    fn default() -> Self {
        HermitePolicy {
            series_radius: 3.0,
            max_series_terms: 600,
            asym_target_tol: 1e-13,
            wedge_delta: FRAC_PI_4,
        }
    }
}

impl HermitePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_radius > 0.0 && self.series_radius <= 40.0) {
            return Err(Error::Domain(format!("series_radius out of range: {}", self.series_radius)));
        }
        if self.max_series_terms < 16 {
            return Err(Error::Domain("max_series_terms must be at least 16".into()));
        }
        if !(self.asym_target_tol >= 1e-15 && self.asym_target_tol <= 1e-6) {
            return Err(Error::Domain(format!(
                "asym_target_tol must lie in [1e-15, 1e-6], got {}",
                self.asym_target_tol
            )));
        }
        if !(self.wedge_delta > 0.0 && self.wedge_delta <= FRAC_PI_2) {
            return Err(Error::Domain(format!("wedge_delta must lie in (0, π/2], got {}", self.wedge_delta)));
        }
        Ok(())
    }
}

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Degree as a non-negative integer when it lies within 1e-8 of one.
fn integer_degree(nu: Complex64) -> Option<u32> {
    let n = nu.re.round();
    if n >= 0.0 && n < 4096.0 && (nu.re - n).abs() < 1e-8 && nu.im.abs() < 1e-8 {
        Some(n as u32)
    } else {
        None
    }
}

/// Hermite polynomial by the three-term recurrence.
pub fn hermite_polynomial(n: u32, z: Complex64) -> Complex64 {
    let mut h0 = cx(1.0);
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * z;
    for k in 1..n {
        let h2 = 2.0 * z * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Power-series evaluation with its cancellation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub value: Complex64,
    /// Σ|terms| scaled like `value`; the rounding error is about ε times this.
    pub abs_sum: f64,
    pub terms: u32,
}

/// The power series Σ (-1)ⁿ Γ((n-ν)/2)(2z)ⁿ/n! with prefactor 1/(2Γ(-ν)).
pub fn hermite_series(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Result<SeriesEval> {
    if let Some(n) = integer_degree(nu) {
        let v = hermite_polynomial(n, z);
        return Ok(SeriesEval { value: v, abs_sum: v.norm(), terms: n + 1 });
    }
    let pre = rgamma(-nu) * 0.5;
    let z2 = 2.0 * z;
    let zz = z2 * z2;
    // even and odd chains
    let mut te = ln_gamma(-nu * 0.5)?.exp();
    let mut to = -ln_gamma((1.0 - nu) * 0.5)?.exp() * z2;
    let mut sum = te + to;
    let mut abs_sum = te.norm() + to.norm();
    let mut small = 0;
    let mut n = 0u32;
    let tol = 0.25 * f64::EPSILON;
    while n + 2 < policy.max_series_terms {
        // advance both chains by two orders
        let ne = n as f64;
        te = te * zz * ((ne - nu) * 0.5) / ((ne + 1.0) * (ne + 2.0));
        to = to * zz * ((ne + 1.0 - nu) * 0.5) / ((ne + 2.0) * (ne + 3.0));
        n += 2;
        sum += te + to;
        let t = te.norm() + to.norm();
        abs_sum += t;
        if t <= tol * sum.norm() || t == 0.0 {
            small += 1;
            if small >= 3 {
                let value = pre * sum;
                return Ok(SeriesEval {
                    value,
                    abs_sum: abs_sum * pre.norm(),
                    terms: n + 2,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!(
        "hermite series for nu={nu}, z={z} needs more than {} terms",
        policy.max_series_terms
    )))
}

/// Partial sum (2z)^ν Σ_{k=0}^{n} (-1)^k (-ν)_{2k} / (k! (2z)^{2k}).
pub fn hermite_asymptotic_partial(nu: Complex64, z: Complex64, n: u32) -> Complex64 {
    let w = 1.0 / (4.0 * z * z);
    let mut c = cx(1.0);
    let mut s = c;
    for k in 0..n {
        let kf = k as f64;
        c = -c * (-nu + 2.0 * kf) * (-nu + 2.0 * kf + 1.0) * w / (kf + 1.0);
        s += c;
    }
    (2.0 * z).powc(nu) * s
}

/// Remainder bound for the n-term asymptotic sum inside the wedge
/// |arg z| ≤ π/2 − δ; valid for Re ν < 0.
pub fn asymptotic_remainder_bound(nu: Complex64, z: Complex64, n: u32, delta: f64) -> Result<f64> {
    if !(nu.re < 0.0) {
        return Err(Error::Domain(format!("remainder bound needs Re nu < 0, got {nu}")));
    }
    if z.arg().abs() > FRAC_PI_2 - delta + 1e-12 {
        return Err(Error::Wedge(format!("z = {z} outside |arg z| <= pi/2 - {delta}")));
    }
    let m = 2.0 * (n as f64 + 1.0) - nu.re;
    let ln_b = -m * delta.sin().ln() + ln_gamma(cx(m))?.re
        - ln_gamma(cx(n as f64 + 2.0))?.re
        - ln_gamma(-nu)?.re
        - m * (2.0 * z.norm()).ln();
    Ok(ln_b.exp())
}

/// Asymptotic evaluation certified by the remainder bound: the smallest
/// n whose bound is within `asym_target_tol` relative to the leading
/// term. Requires Re ν < 0 and z inside the policy wedge.
pub fn hermite_asymptotic(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Result<(Complex64, f64)> {
    if !(nu.re < 0.0) {
        return Err(Error::Domain(format!("asymptotic path needs Re nu < 0, got {nu}")));
    }
    if z.re <= 0.0 || z.arg().abs() > FRAC_PI_2 - policy.wedge_delta + 1e-12 {
        return Err(Error::Wedge(format!("z = {z} outside the asymptotic wedge")));
    }
    let lead = (2.0 * z).powc(nu).norm();
    let mut best = f64::INFINITY;
    for n in 0..200u32 {
        let b = asymptotic_remainder_bound(nu, z, n, policy.wedge_delta)?;
        if b <= policy.asym_target_tol * lead {
            return Ok((hermite_asymptotic_partial(nu, z, n), b));
        }
        if b > best {
            break;
        }
        best = b;
    }
    Err(Error::Convergence(format!(
        "asymptotic bound for nu={nu}, z={z} cannot reach {:e}",
        policy.asym_target_tol
    )))
}

/// Asymptotic sum stopped at the first term below the tolerance while the
/// terms still decrease. Valid for any degree with |arg z| < 3π/4.
fn asymptotic_terms(nu: Complex64, z: Complex64, tol: f64) -> Option<Complex64> {
    // Past |arg z| = π/4 the companion e^{z²}(2z)^{-ν-1} term is no longer
    // recessive and the truncated sum misses it near the Stokes line.
    if z.arg().abs() > PI / 4.0 {
        let c = rgamma(-nu).norm() * (nu.re + 1.0).exp2() * SQRT_PI;
        if c > 0.0 {
            let zz = z * z;
            let log_ratio = c.ln() + zz.re + (-2.0 * nu.re - 1.0) * (2.0 * z.norm()).ln();
            if log_ratio > (0.1 * tol).ln() {
                return None;
            }
        }
    }
    let w = 1.0 / (4.0 * z * z);
    let mut c = cx(1.0);
    let mut s = c;
    let mut prev = 1.0;
    for k in 0..400u32 {
        let kf = k as f64;
        c = -c * (-nu + 2.0 * kf) * (-nu + 2.0 * kf + 1.0) * w / (kf + 1.0);
        let m = c.norm();
        if m == 0.0 {
            return Some((2.0 * z).powc(nu) * s);
        }
        if m > prev {
            return None;
        }
        s += c;
        if m < 0.1 * tol * s.norm() {
            return Some((2.0 * z).powc(nu) * s);
        }
        prev = m;
    }
    None
}

fn series_if_accurate(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Option<Complex64> {
    if z.norm() > policy.series_radius {
        return None;
    }
    let s = hermite_series(nu, z, policy).ok()?;
    if 8.0 * f64::EPSILON * s.abs_sum <= policy.asym_target_tol * s.value.norm() {
        Some(s.value)
    } else {
        None
    }
}

fn direct(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Option<Complex64> {
    if let Some(v) = series_if_accurate(nu, z, policy) {
        return Some(v);
    }
    if z.norm() >= 2.0 {
        return asymptotic_terms(nu, z, policy.asym_target_tol);
    }
    None
}

/// Value and derivative H' = 2ν H_{ν-1} where a direct method applies.
fn direct_pair(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Option<(Complex64, Complex64)> {
    let h = direct(nu, z, policy)?;
    let d = if nu == cx(0.0) {
        cx(0.0)
    } else {
        2.0 * nu * direct(nu - 1.0, z, policy)?
    };
    Some((h, d))
}

/// Taylor stepping of u'' - 2zu' + 2νu = 0 from z0 to z1 in a straight line.
fn ode_walk(
    nu: Complex64,
    z0: Complex64,
    h0: Complex64,
    d0: Complex64,
    z1: Complex64,
) -> Result<(Complex64, Complex64)> {
    let mut z = z0;
    let (mut h, mut d) = (h0, d0);
    let total = (z1 - z0).norm();
    if total == 0.0 {
        return Ok((h, d));
    }
    let dir = (z1 - z0) / total;
    let mut done = 0.0;
    let mut steps = 0;
    while done < total {
        let len = (0.6 / z.norm().max(1.0)).min(0.5).min(total - done);
        let t = dir * len;
        // a_{k+2} = [2 z (k+1) a_{k+1} + 2 (k - ν) a_k] / ((k+1)(k+2))
        let (mut a0, mut a1) = (h, d);
        let mut tp = t;
        let mut val = a0 + a1 * t;
        let mut der = a1;
        let mut quiet = 0;
        for k in 0..120u32 {
            let kf = k as f64;
            let a2 = (2.0 * z * (kf + 1.0) * a1 + 2.0 * (kf - nu) * a0) / ((kf + 1.0) * (kf + 2.0));
            der += a2 * tp * (kf + 2.0);
            tp *= t;
            let term = a2 * tp;
            val += term;
            if term.norm() <= 1e-18 * val.norm() && (a2 * (kf + 2.0) * tp / t).norm() <= 1e-18 * der.norm().max(val.norm()) {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            a0 = a1;
            a1 = a2;
        }
        h = val;
        d = der;
        z += t;
        done += len;
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Convergence("hermite ODE walk did not finish".into()));
        }
    }
    if !(h.re.is_finite() && h.im.is_finite()) {
        return Err(Error::Overflow(format!("hermite ODE walk produced {h}")));
    }
    Ok((h, d))
}

/// A walk from an anchor with known value and derivative through waypoints.
struct Route {
    waypoints: Vec<Complex64>,
    h: Complex64,
    d: Complex64,
}

impl Route {
    /// Worst growth of an injected error relative to H_ν along the route,
    /// in log units. Rounding excites the second solution e^{z²} z^{-ν-1},
    /// whose size relative to H_ν is exp(G(z)).
    fn amplification(&self, nu: Complex64) -> f64 {
        let p = -2.0 * nu.re - 1.0;
        let g = |z: Complex64| (z * z).re + p * z.norm().max(1e-300).ln();
        let end = *self.waypoints.last().unwrap();
        let mut lo = g(end);
        for pair in self.waypoints.windows(2) {
            for i in 0..32 {
                lo = lo.min(g(pair[0] + (pair[1] - pair[0]) * (i as f64 / 32.0)));
            }
        }
        g(end) - lo
    }

    fn walk(&self, nu: Complex64) -> Result<Complex64> {
        let (mut h, mut d) = (self.h, self.d);
        for pair in self.waypoints.windows(2) {
            let (hn, dn) = ode_walk(nu, pair[0], h, d, pair[1])?;
            h = hn;
            d = dn;
        }
        Ok(h)
    }
}

/// First anchor at radius ≥ `from` along `unit` where the asymptotic sum
/// converges for both ν and ν−1.
fn asymptotic_anchor(
    nu: Complex64,
    unit: Complex64,
    from: f64,
    limit: f64,
    policy: &HermitePolicy,
) -> Option<(Complex64, Complex64, Complex64)> {
    let mut rr = from;
    // far anchors make the walk long and are never the better choice
    while rr <= limit {
        let za = unit * rr;
        if let (Some(h), Some(hm)) = (
            asymptotic_terms(nu, za, policy.asym_target_tol),
            asymptotic_terms(nu - 1.0, za, policy.asym_target_tol),
        ) {
            return Some((za, h, 2.0 * nu * hm));
        }
        rr *= 1.25;
    }
    None
}

/// H_ν(z) for Re z ≥ 0.
fn right_half(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Result<Complex64> {
    if let Some(n) = integer_degree(nu) {
        return Ok(hermite_polynomial(n, z));
    }
    if let Some(v) = direct(nu, z, policy) {
        return Ok(v);
    }
    let r = z.norm();
    let unit = z / r;
    let limit = (3.0 * r).max(30.0);
    let mut routes = Vec::new();
    // inward along the ray
    if let Some((za, h, d)) = asymptotic_anchor(nu, unit, r.max(2.0) * 1.25, limit, policy) {
        routes.push(Route { waypoints: vec![za, z], h, d });
    }
    // outward along the ray from a small-|z| anchor
    let mut rr = r.min(1.0);
    for _ in 0..40 {
        let za = unit * rr;
        if let Some((h, d)) = direct_pair(nu, za, policy) {
            routes.push(Route { waypoints: vec![za, z], h, d });
            break;
        }
        rr *= 0.5;
    }
    // in along the positive real axis, then round the arc |w| = r; the
    // second solution decays relative to H_ν on both legs
    if r >= 2.0 && z.arg().abs() > 0.05 {
        let one = Complex64::new(1.0, 0.0);
        if let Some((za, h, d)) = asymptotic_anchor(nu, one, r * 1.25, limit, policy) {
            let th = z.arg();
            let n = ((th.abs() * r / 0.5).ceil() as usize).max(2);
            let mut waypoints = vec![za];
            for i in 0..=n {
                waypoints.push(Complex64::from_polar(r, th * i as f64 / n as f64));
            }
            *waypoints.last_mut().unwrap() = z;
            routes.push(Route { waypoints, h, d });
        }
    }
    let best = routes
        .iter()
        .map(|rt| (rt.amplification(nu), rt))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((_, rt)) => rt.walk(nu),
        None => Err(Error::Convergence(format!("no evaluation path for H_{nu}({z})"))),
    }
}

/// H_ν(z) as (m, s) with H_ν(z) = m·e^s, s ≥ 0. The scale is non-zero only
/// in the left half-plane where e^{z²} growth would overflow.
pub fn hermite_scaled(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Result<(Complex64, f64)> {
    if !(nu.re.is_finite() && nu.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite hermite input nu={nu}, z={z}")));
    }
    if let Some(n) = integer_degree(nu) {
        return Ok((hermite_polynomial(n, z), 0.0));
    }
    if z.re >= 0.0 {
        return Ok((right_half(nu, z, policy)?, 0.0));
    }
    if let Some(v) = series_if_accurate(nu, z, policy) {
        return Ok((v, 0.0));
    }
    // H_ν(-w) = C e^{±iπ(ν+1)/2} e^{w²} H_{-ν-1}(±iw) - e^{±iπ(ν+1)} H_ν(w)
    let w = -z;
    let s = if w.im <= 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::new(0.0, 1.0);
    let ph = i * s * PI * (nu + 1.0);
    let c = (nu + 1.0).exp2() * SQRT_PI * rgamma(-nu);
    let b = ph.exp() * right_half(nu, w, policy)?;
    if c == cx(0.0) {
        return Ok((-b, 0.0));
    }
    let a = c * (ph * 0.5).exp() * right_half(-nu - 1.0, i * s * w, policy)?;
    let w2 = w * w;
    let scale = w2.re.max(0.0);
    let m = a * (w2 - scale).exp() - b * (-scale).exp();
    Ok((m, scale))
}

/// Hermite function H_ν(z) of complex degree and argument.
pub fn hermite(nu: Complex64, z: Complex64, policy: &HermitePolicy) -> Result<Complex64> {
    let (m, s) = hermite_scaled(nu, z, policy)?;
    if s == 0.0 {
        return Ok(m);
    }
    let v = m * s.exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow(format!("H_{nu}({z}) overflows; use hermite_scaled")));
    }
    Ok(v)
}

/// Real degree and argument.
pub fn hermite_real(nu: f64, x: f64, policy: &HermitePolicy) -> Result<f64> {
    hermite(cx(nu), cx(x), policy).map(|v| v.re)
}

/// (1/Γ(-ν)) ∫₀^∞ e^{-u²-2zu} u^{-(ν+1)} du by adaptive quadrature, for
/// Re ν < 0. Independent of [`hermite`]; used to check it.
pub fn hermite_integral(nu: Complex64, z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    if !(nu.re < 0.0) {
        return Err(Error::Domain(format!("integral representation needs Re nu < 0, got {nu}")));
    }
    // u = t^p removes the endpoint singularity when -1 < Re ν < 0
    let p = if nu.re > -1.0 { 1.0 / (-nu.re) } else { 1.0 };
    let expo = -nu * p - 1.0;
    let near = |t: f64| -> Complex64 {
        if t == 0.0 {
            return cx(0.0);
        }
        let u = t.powf(p);
        let e = cx(-u * u) - 2.0 * z * u + expo * t.ln();
        p * e.exp()
    };
    let far = |u: f64| -> Complex64 {
        let e = cx(-u * u) - 2.0 * z * u - (nu + 1.0) * u.ln();
        e.exp()
    };
    // peak of e^{-u² - 2 Re z u} sits at u = -Re z
    let peak = (-z.re).max(0.0);
    let width = 12.0;
    let end = peak + width + 2.0 * z.im.abs().sqrt() + 6.0;
    let mut pts: Vec<f64> = Vec::new();
    let panels = ((end - 1.0) / 0.5).ceil().max(4.0) as usize;
    for i in 0..=panels {
        pts.push(1.0 + (end - 1.0) * i as f64 / panels as f64);
    }
    let inner = integrate_points(near, &[0.0, 0.25, 0.5, 1.0], spec)?;
    let outer = integrate_points(far, &pts, spec)?;
    Ok((inner.value + outer.value) * rgamma(-nu))
}
