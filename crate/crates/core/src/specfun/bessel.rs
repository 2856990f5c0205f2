use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{ln_gamma, sin_pi};
use crate::error::{Error, Result};
use crate::quad::{integrate_points, integrate_semi_infinite, QuadSpec};

const MAX_TERMS: u32 = 5000;

fn check_branch(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Branch(format!("bessel_i argument {z} on the negative real axis")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite bessel_i argument {z}")));
    }
    Ok(())
}

/// Σ_m (z/2)^{μ+2m} / (m! Γ(μ+m+1)) multiplied by e^{-shift}.
fn series(mu: Complex64, z: Complex64, shift: Complex64) -> Result<Complex64> {
    check_branch(z)?;
    if z == Complex64::new(0.0, 0.0) {
        if mu == Complex64::new(0.0, 0.0) {
            return Ok((-shift).exp());
        }
        if mu.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::Domain(format!("I_{mu}(0) is not finite")));
    }
    let half = z * 0.5;
    let q = half * half;
    // start at the largest term so e^{-shift} times a tiny leading term
    // cannot underflow before the terms grow
    let m0 = {
        let r = mu.re;
        ((-r + (r * r + 4.0 * q.norm()).sqrt()) / 2.0).max(0.0).floor()
    };
    let lg = match ln_gamma(mu + m0 + 1.0) {
        Ok(lg) => lg,
        // negative integer order: I_{-n} = I_n
        Err(Error::Pole(_)) => return series(Complex64::new(-mu.re.round(), 0.0), z, shift),
        Err(e) => return Err(e),
    };
    let peak = ((mu + 2.0 * m0) * half.ln() - lg - ln_gamma(Complex64::new(m0 + 1.0, 0.0))? - shift).exp();
    let mut s = peak;
    // downward: t_{m-1} = t_m·m(μ+m)/q
    let mut t = peak;
    let mut m = m0;
    while m >= 1.0 {
        t = t * (m * (mu + m)) / q;
        s += t;
        m -= 1.0;
        if t.norm() <= 0.25 * f64::EPSILON * s.norm() {
            break;
        }
    }
    let mut t = peak;
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let mf = m0 + k as f64;
        t = t * q / ((mf + 1.0) * (mu + mf + 1.0));
        s += t;
        if t.norm() <= 0.25 * f64::EPSILON * s.norm() {
            small += 1;
            if small >= 3 {
                return Ok(s);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!("bessel_i series for mu={mu}, z={z}")))
}

/// Modified Bessel function of the first kind, complex order, principal branch.
pub fn bessel_i(mu: Complex64, z: Complex64) -> Result<Complex64> {
    let v = series(mu, z, Complex64::new(0.0, 0.0))?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow(format!("I_{mu}({z}) overflows; use bessel_i_scaled")));
    }
    Ok(v)
}

/// e^{-z}·I_μ(z), finite for large real arguments.
pub fn bessel_i_scaled(mu: Complex64, z: Complex64) -> Result<Complex64> {
    series(mu, z, z)
}

/// Schläfli's integral representation
/// (1/π)∫₀^π e^{z cos θ} cos(μθ) dθ − (sin μπ/π)∫₀^∞ e^{−z cosh x − μx} dx.
pub fn bessel_i_schlafli(mu: Complex64, z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("Schläfli representation needs Re z > 0, got {z}")));
    }
    let trig = integrate_points(
        |th: f64| (z * th.cos()).exp() * (mu * th).cos(),
        &[0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI],
        spec,
    )?;
    let s = sin_pi(mu);
    let mut v = trig.value / PI;
    if s.norm() > 0.0 {
        let scale = z.re.exp().max(1.0);
        let hyp = integrate_semi_infinite(
            |x: f64| (-z * x.cosh() - mu * x).exp(),
            0.0,
            |x: f64| (-z.re * x.cosh() - mu.re * x).exp(),
            &QuadSpec {
                tail_eps: spec.tail_eps * scale,
                abs_tol: spec.abs_tol * scale,
                ..*spec
            },
        )?;
        v -= s / PI * hyp.value;
    }
    Ok(v)
}

/// Weber's integral ∫₀^∞ e^{−ax²} x^{μ+1} I_μ(x) dx = (2a)^{−(μ+1)} e^{1/(4a)}.
pub fn weber_closed_form(a: f64, mu: Complex64) -> Result<Complex64> {
    if !(a > 0.0) || !(mu.re > -1.0) {
        return Err(Error::Domain(format!("weber needs a > 0 and Re mu > -1, got a={a}, mu={mu}")));
    }
    Ok(Complex64::new(2.0 * a, 0.0).powc(-(mu + 1.0)) * (0.25 / a).exp())
}

/// Left-hand side of Weber's integral by quadrature over the scaled Bessel
/// function.
pub fn weber_quadrature(a: f64, mu: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    if !(a > 0.0) || !(mu.re > -1.0) {
        return Err(Error::Domain(format!("weber needs a > 0 and Re mu > -1, got a={a}, mu={mu}")));
    }
    // e^{-ax² + x} peaks at x = 1/(2a) with width ~ 1/√(2a)
    let center = 0.5 / a;
    let width = (0.5 / a).sqrt();
    let end = center + width * (12.0 + (mu.re.abs() + 2.0).sqrt() * 2.0);
    let f = |x: f64| -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let xc = Complex64::new(x, 0.0);
        let i = bessel_i_scaled(mu, xc).unwrap_or(Complex64::new(f64::NAN, 0.0));
        (Complex64::new(-a * x * x + x, 0.0) + (mu + 1.0) * x.ln()).exp() * i
    };
    // the integrand behaves like x^{2μ+1} at the origin; x = x1·t^p
    // smooths the first panel
    let n = 24;
    let x1 = end / n as f64;
    let p = (1.0 / (mu.re + 1.0)).max(1.0);
    let first = integrate_points(
        |t: f64| {
            if t == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            f(x1 * t.powf(p)) * (x1 * p * t.powf(p - 1.0))
        },
        &[0.0, 0.5, 1.0],
        spec,
    )?;
    let pts: Vec<f64> = (1..=n).map(|i| end * i as f64 / n as f64).collect();
    Ok(first.value + integrate_points(f, &pts, spec)?.value)
}
