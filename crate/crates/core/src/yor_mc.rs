//! Yor's triple-integral formula and a Monte Carlo simulator of
//! A_h = ∫₀^h e^{2(B_τ+ντ)} dτ, plus moment checks.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Engine, PriceEstimate};
use crate::quad::{integrate_oscillatory, integrate_points, QuadSpec};
use crate::specfun::gamma;

pub use crate::model::expected_a;

/// Smallest h accepted by the quadrature engines in this module.
pub const MIN_H: f64 = 0.02;

// ---------------------------------------------------------------- ψ

/// Log-magnitude of the ψ integrand on the line Im w = v, scaled by
/// e^{π²/(2h)}.
fn log_scale(a: f64, h: f64, u: f64, v: f64) -> f64 {
    let s = u.sinh();
    let sv = v.sin();
    -(u * u - v * v) / (2.0 * h) - PI * v / h + PI * PI / (2.0 * h) - a * u.cosh() * v.cos()
        + 0.5 * (s * s + sv * sv).max(1e-300).ln()
}

/// Contour height in [0, π/2] with the smallest peak integrand.
fn pick_height(a: f64, h: f64) -> f64 {
    let u_max = 6.0 * h.sqrt() + 2.0 * h + 1.0;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..=4 {
        let v = j as f64 * PI / 8.0;
        let peak = (0..=64)
            .map(|i| log_scale(a, h, u_max * i as f64 / 64.0, v))
            .fold(f64::NEG_INFINITY, f64::max);
        if peak < best.0 {
            best = (peak, v);
        }
    }
    best.1
}

/// e^{π²/(2h)}·ψ_a(h), ψ_a(h) = ∫₀^∞ e^{−w²/(2h)}e^{−a cosh w} sinh w sin(πw/h) dw.
///
/// The integrand is entire and the integral equals ∫₀^∞ Im g(u + iv) du for
/// g(w) = e^{−w²/(2h) + iπw/h − a cosh w} sinh w and any 0 ≤ v ≤ π/2.
/// Raising v trades the e^{π²/(2h)} cancellation of the real-axis form for
/// oscillation in e^{−ia sinh u sin v}.
pub fn psi_scaled(a: f64, h: f64, spec: &QuadSpec) -> Result<(f64, f64)> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("psi needs a >= 0, got {a}")));
    }
    if !(h >= MIN_H && h.is_finite()) {
        return Err(Error::Oscillation(format!("psi needs h >= {MIN_H}, got {h}")));
    }
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let v = pick_height(a, h);
    let shift = PI * PI / (2.0 * h);
    let f = |u: f64| -> f64 {
        let w = Complex64::new(u, v);
        let e = -w * w / (2.0 * h) + Complex64::new(0.0, PI / h) * w - a * w.cosh() + shift;
        (e.exp() * w.sinh()).im
    };
    let env = |u: f64| log_scale(a, h, u, v).exp() * 2.0;
    let half_period = PI * h / (PI - v);
    let r = integrate_oscillatory(f, 0.0, None, half_period, env, spec)?;
    Ok((r.value, r.err_est))
}

/// ψ_a(h) itself; underflows for small h, where only the scaled form is
/// usable.
pub fn psi_a(a: f64, h: f64, spec: &QuadSpec) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("psi_a needs a > 0, got {a}")));
    }
    let spec = QuadSpec {
        abs_tol: spec.abs_tol * (PI * PI / (2.0 * h)).exp(),
        ..*spec
    };
    let (v, _) = psi_scaled(a, h, &spec)?;
    Ok(v * (-PI * PI / (2.0 * h)).exp())
}

// ---------------------------------------------------------------- triple integral

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YorSettings {
    /// Outer x and inner y integrals.
    pub quad: QuadSpec,
    /// ψ evaluations.
    pub psi: QuadSpec,
}

impl Default for YorSettings {
    fn default() -> Self {
        YorSettings {
            quad: QuadSpec::new(1e-12, 1e-7),
            psi: QuadSpec::new(1e-14, 1e-9),
        }
    }
}

/// K(a) = ∫_{ln(qa)}^∞ e^{νs}(e^s/a − q)e^{−a cosh s} ds, the x-integral
/// left after substituting a = xy, x = e^s.
fn yor_kernel(a: f64, nu: f64, q: f64, spec: &QuadSpec) -> Result<f64> {
    let lo = (q * a).ln();
    let log_f = |s: f64| nu * s + (s.exp() / a - q).max(1e-300).ln() - a * s.cosh();
    // past e^s ≈ 2(|ν|+1)/a the integrand falls double-exponentially
    let mut hi = (lo + 1.0).max((2.0 * (nu.abs() + 1.0) / a).ln() + 1.0);
    let mut top = f64::NEG_INFINITY;
    let mut s = lo + 0.5;
    while s < hi {
        top = top.max(log_f(s));
        s += 0.5;
    }
    while log_f(hi) > top - 45.0 {
        top = top.max(log_f(hi));
        hi += 1.0;
    }
    let f = |s: f64| (nu * s).exp() * (s.exp() / a - q).max(0.0) * (-a * s.cosh()).exp();
    let n = ((hi - lo).ceil() as usize).clamp(4, 400);
    Ok(integrate_points(f, &crate::quad::linspace(lo, hi, n), spec)?.value)
}

/// Normalized price from Yor's triple integral,
/// (e^{π²/(2h)−ν²h/2}/(π√(2πh)))·∫₀^∞ x^ν ∫₀^{1/q} e^{−(1+x²)y/2}(1/y − q)ψ_{xy}(h) dy dx.
///
/// Evaluated as ∫ ψ_a(h)·K(a) da over r = ln a, with both factors
/// positive. The range in r is cut where the integrand has fallen 1e-12
/// below its peak or where ψ can no longer be resolved against its own
/// rounding floor, whichever comes first.
pub fn price_yor(nu: f64, h: f64, q: f64, settings: &YorSettings) -> Result<PriceEstimate> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("yor engine needs q > 0, got {q}")));
    }
    if !(h >= MIN_H && h.is_finite()) {
        return Err(Error::Oscillation(format!("yor engine needs h >= {MIN_H}, got {h}")));
    }
    if !(nu > -4.0 && nu <= 8.0) {
        return Err(Error::Domain(format!("nu = {nu} outside the supported range (-4, 8]")));
    }
    let psi_spec = QuadSpec {
        abs_tol: 1e-300,
        ..settings.psi
    };
    let eval = |r: f64| -> Result<(f64, f64)> {
        let a = r.exp();
        let (p, pe) = psi_scaled(a, h, &psi_spec)?;
        let k = yor_kernel(a, nu, q, &settings.quad)?;
        Ok((p * k * a, pe * k * a))
    };
    // scan outwards from r = 0 in unit steps
    let mut samples = vec![(0.0, eval(0.0)?)];
    let mut peak = samples[0].1 .0.abs();
    let mut r = 0.0;
    loop {
        r += 1.0;
        let v = eval(r)?;
        peak = peak.max(v.0.abs());
        samples.push((r, v));
        if v.0.abs() < 1e-16 * peak || r > 60.0 {
            break;
        }
    }
    let r_hi = r;
    let mut r = 0.0;
    let mut unresolved = 0.0;
    loop {
        r -= 1.0;
        let v = eval(r)?;
        peak = peak.max(v.0.abs());
        samples.push((r, v));
        if v.1 > 1e-3 * v.0.abs() {
            // beyond here ψ is rounding noise; count what is left as error
            unresolved = v.0.abs() + v.1;
            break;
        }
        if v.0.abs() < 1e-12 * peak || r < -200.0 {
            break;
        }
    }
    let r_lo = r;
    let psi_err = std::cell::Cell::new(0.0f64);
    let failed = std::cell::Cell::new(None);
    let f = |r: f64| -> f64 {
        match eval(r) {
            Ok((v, e)) => {
                psi_err.set(psi_err.get() + e);
                v
            }
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let n = (r_hi - r_lo).round() as usize;
    let res = integrate_points(f, &crate::quad::linspace(r_lo, r_hi, n), &settings.quad);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let res = res?;
    let pre = (-nu * nu * h / 2.0).exp() / (PI * (2.0 * PI * h).sqrt());
    let value = pre * res.value;
    // ψ errors averaged over nodes times the range, plus the cut tail
    let nodes = res.evals.max(1) as f64;
    let err = pre * (res.err_est + psi_err.get() / nodes * (r_hi - r_lo) + 2.0 * unresolved);
    Ok(PriceEstimate::new(value, Engine::Yor, err)
        .with("log_a_range", format!("[{r_lo}, {r_hi}]")))
}

// ---------------------------------------------------------------- Monte Carlo

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub paths: u64,
    pub steps: u32,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            paths: 1_000_000,
            steps: 2000,
            seed: 20240917,
            antithetic: true,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 || self.steps < 2 {
            return Err(Error::Domain(format!("need paths >= 2 and steps >= 2, got {self:?}")));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(Error::Domain(format!("antithetic sampling needs an even path count, got {}", self.paths)));
        }
        Ok(())
    }
}

/// Paths per parallel block; blocks are reduced in index order.
const BLOCK: u64 = 512;

/// Mean and standard error of several statistics of the same paths.
#[derive(Debug, Clone, PartialEq)]
pub struct McStats {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Independent samples: paths, or path pairs under antithetic sampling.
    pub samples: u64,
}

/// Simulates one standard Brownian path W on [0, 1] per sample (two for an
/// antithetic pair) and evaluates, for every h in `hs` and ν in `nus` and
/// every stride in `strides`, the trapezoid approximation of
/// A = ∫₀^h e^{2(B_τ+ντ)} dτ with B_{hs} = √h·W_s on the grid of
/// steps/stride intervals. `stat` maps those A values (indexed
/// [stride][h][ν]) to `n_out` statistics.
///
/// Every sample draws from its own ChaCha8 stream, so results do not depend
/// on scheduling, and a (h, ν) pair computes identical bits whatever else is
/// in the batch.
pub fn simulate<F>(hs: &[f64], nus: &[f64], strides: &[u32], mc: &McSettings, n_out: usize, stat: F) -> Result<McStats>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    mc.validate()?;
    let n = mc.steps as usize;
    for &s in strides {
        if s == 0 || n % s as usize != 0 {
            return Err(Error::Domain(format!("stride {s} does not divide {n} steps")));
        }
    }
    // weight tables: (h/N)·trapezoid weight·e^{2νh k/N}, per (stride, h, ν)
    let mut tables: Vec<Vec<f64>> = Vec::new();
    for &s in strides {
        let m = n / s as usize;
        for &h in hs {
            for &nu in nus {
                let dt = h / m as f64;
                tables.push(
                    (0..=m)
                        .map(|k| {
                            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
                            dt * w * (2.0 * nu * h * k as f64 / m as f64).exp()
                        })
                        .collect(),
                );
            }
        }
    }
    let n_a = tables.len();
    let samples = if mc.antithetic { mc.paths / 2 } else { mc.paths };
    let blocks = samples.div_ceil(BLOCK);
    let sqrt_hs: Vec<f64> = hs.iter().map(|h| 2.0 * h.sqrt()).collect();
    let sdt = 1.0 / (n as f64).sqrt();

    let run_block = |b: u64| -> (Vec<f64>, Vec<f64>) {
        let mut sum = vec![0.0; n_out];
        let mut sum2 = vec![0.0; n_out];
        let mut w = vec![0.0; n + 1];
        let mut a = vec![0.0; n_a];
        let mut a_anti = vec![0.0; n_a];
        let mut out = vec![0.0; n_out];
        let mut out_anti = vec![0.0; n_out];
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(samples);
        for i in lo..hi {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(i);
            for k in 1..=n {
                let z: f64 = StandardNormal.sample(&mut rng);
                w[k] = w[k - 1] + z * sdt;
            }
            a.iter_mut().for_each(|x| *x = 0.0);
            a_anti.iter_mut().for_each(|x| *x = 0.0);
            let mut idx = 0;
            for &s in strides {
                let s = s as usize;
                for &c in &sqrt_hs {
                    let group = idx..idx + nus.len();
                    for (j, k) in (0..=n).step_by(s).enumerate() {
                        let e = (c * w[k]).exp();
                        let ea = 1.0 / e;
                        for t in group.clone() {
                            let wt = tables[t][j];
                            a[t] += wt * e;
                            if mc.antithetic {
                                a_anti[t] += wt * ea;
                            }
                        }
                    }
                    idx += nus.len();
                }
            }
            stat(&a, &mut out);
            if mc.antithetic {
                stat(&a_anti, &mut out_anti);
                for o in 0..n_out {
                    out[o] = 0.5 * (out[o] + out_anti[o]);
                }
            }
            for o in 0..n_out {
                sum[o] += out[o];
                sum2[o] += out[o] * out[o];
            }
        }
        (sum, sum2)
    };

    let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks).into_par_iter().map(run_block).collect();
    let mut sum = vec![0.0; n_out];
    let mut sum2 = vec![0.0; n_out];
    for (s, s2) in parts {
        for o in 0..n_out {
            sum[o] += s[o];
            sum2[o] += s2[o];
        }
    }
    let m = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_error = sum2
        .iter()
        .zip(&mean)
        .map(|(s2, mu)| {
            if samples < 2 {
                // one sample carries no spread information
                return f64::INFINITY;
            }
            ((s2 / m - mu * mu).max(0.0) / (m - 1.0)).sqrt()
        })
        .collect();
    Ok(McStats {
        mean,
        std_error,
        samples,
    })
}

/// Prices for every (h, ν, q) combination from one set of paths, indexed
/// [h][ν][q].
pub fn mc_price_batch(hs: &[f64], nus: &[f64], qs: &[f64], mc: &McSettings) -> Result<Vec<PriceEstimate>> {
    for &h in hs {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("mc batch needs h > 0, got {h}")));
        }
    }
    let nq = qs.len();
    let stats = simulate(hs, nus, &[1], mc, hs.len() * nus.len() * nq, |a, out| {
        for (i, &av) in a.iter().enumerate() {
            for (j, &q) in qs.iter().enumerate() {
                out[i * nq + j] = (av - q).max(0.0);
            }
        }
    })?;
    Ok(stats
        .mean
        .iter()
        .zip(&stats.std_error)
        .map(|(&m, &se)| {
            PriceEstimate::new(m, Engine::Mc, se)
                .with("paths", mc.paths)
                .with("steps", mc.steps)
                .with("seed", mc.seed)
                .with("antithetic", mc.antithetic)
        })
        .collect())
}

/// Monte Carlo estimate of C(ν, h, q); err_est is the standard error.
pub fn mc_price(nu: f64, h: f64, q: f64, mc: &McSettings) -> Result<PriceEstimate> {
    mc.validate()?;
    if !(h >= 0.0 && h.is_finite()) || !q.is_finite() || !nu.is_finite() {
        return Err(Error::Domain(format!("invalid mc input nu={nu}, h={h}, q={q}")));
    }
    if h == 0.0 {
        return Ok(PriceEstimate::new((-q).max(0.0), Engine::Mc, 0.0).with("branch", "h=0"));
    }
    Ok(mc_price_batch(&[h], &[nu], &[q], mc)?.remove(0))
}

/// Sample mean of A_h with standard error.
pub fn mc_mean_a(nu: f64, h: f64, mc: &McSettings) -> Result<(f64, f64)> {
    let s = simulate(&[h], &[nu], &[1], mc, 1, |a, out| out[0] = a[0])?;
    Ok((s.mean[0], s.std_error[0]))
}

/// Sample moments E[A_h^n], n = 1..=n_max, for ν = 0.
pub fn mc_moments_a(h: f64, n_max: u32, mc: &McSettings) -> Result<McStats> {
    simulate(&[h], &[0.0], &[1], mc, n_max as usize, |a, out| {
        let mut p = 1.0;
        for o in out.iter_mut() {
            p *= a[0];
            *o = p;
        }
    })
}

/// Result of the discretization check: one path set at `steps`, subsampled
/// to steps/4 and steps/16.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBias {
    /// Step counts, coarse to fine.
    pub steps: [u32; 3],
    pub means: [f64; 3],
    pub std_errors: [f64; 3],
    /// Mean and standard error of (coarse − finest) per path, for the two
    /// coarse grids.
    pub diffs: [(f64, f64); 2],
}

impl GridBias {
    /// Differences to the finest grid shrink and keep their sign, as an
    /// O(steps⁻²) bias does.
    pub fn converges(&self) -> bool {
        let (d0, d1) = (self.diffs[0].0, self.diffs[1].0);
        d0.abs() > d1.abs() && (d0 * d1 > 0.0 || d1.abs() <= 3.0 * self.diffs[1].1)
    }
}

pub fn grid_bias_check(nu: f64, h: f64, q: f64, mc: &McSettings) -> Result<GridBias> {
    let n = mc.steps;
    if n % 16 != 0 {
        return Err(Error::Domain(format!("grid bias check needs steps divisible by 16, got {n}")));
    }
    let s = simulate(&[h], &[nu], &[16, 4, 1], mc, 5, |a, out| {
        let p: Vec<f64> = a.iter().map(|x| (x - q).max(0.0)).collect();
        out[0] = p[0];
        out[1] = p[1];
        out[2] = p[2];
        out[3] = p[0] - p[2];
        out[4] = p[1] - p[2];
    })?;
    Ok(GridBias {
        steps: [n / 16, n / 4, n],
        means: [s.mean[0], s.mean[1], s.mean[2]],
        std_errors: [s.std_error[0], s.std_error[1], s.std_error[2]],
        diffs: [(s.mean[3], s.std_error[3]), (s.mean[4], s.std_error[4])],
    })
}

// ---------------------------------------------------------------- moments

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// E[A_h^n] for ν = 0 as printed:
/// n!·((−1)ⁿ/(n!)² + 2Σ_{k=0}^n (−1)^{n−k} e^{−hk²/2}/((n−k)!(n+k)!)).
/// Flagged unverified; see [`moment_a_reconciled`].
pub fn moment_a(n: u32, h: f64) -> Result<f64> {
    check_moment(n, h)?;
    let nf = factorial(n);
    let mut s = 0.0;
    for k in 0..=n {
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * (-h * (k * k) as f64 / 2.0).exp() / (factorial(n - k) * factorial(n + k));
    }
    let lead = if n % 2 == 0 { 1.0 } else { -1.0 } / (nf * nf);
    Ok(nf * (lead + 2.0 * s))
}

/// E[A_h^n] for ν = 0 in the form the simulation supports:
/// (n!/2ⁿ)·((−1)ⁿ/(n!)² + 2Σ_{k=1}^n (−1)^{n−k} e^{2k²h}/((n−k)!(n+k)!)).
pub fn moment_a_reconciled(n: u32, h: f64) -> Result<f64> {
    check_moment(n, h)?;
    let nf = factorial(n);
    let mut s = 0.0;
    for k in 1..=n {
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * (2.0 * h * (k * k) as f64).exp() / (factorial(n - k) * factorial(n + k));
    }
    let lead = if n % 2 == 0 { 1.0 } else { -1.0 } / (nf * nf);
    Ok(nf / 2f64.powi(n as i32) * (lead + 2.0 * s))
}

/// E[B_h^{2n}] as printed, ((2h)ⁿ/n!)·Γ(n + ½).
pub fn moment_b2n(n: u32, h: f64) -> Result<f64> {
    check_moment(n, h)?;
    Ok((2.0 * h).powi(n as i32) / factorial(n) * gamma(n as f64 + 0.5)?)
}

/// E[B_h^{2n}] = (2h)ⁿΓ(n + ½)/√π = hⁿ(2n − 1)!!.
pub fn moment_b2n_reconciled(n: u32, h: f64) -> Result<f64> {
    check_moment(n, h)?;
    Ok((2.0 * h).powi(n as i32) * gamma(n as f64 + 0.5)? / PI.sqrt())
}

fn check_moment(n: u32, h: f64) -> Result<()> {
    if n == 0 || n > 8 {
        return Err(Error::Domain(format!("moment order must be in 1..=8, got {n}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("moment needs h > 0, got {h}")));
    }
    Ok(())
}
