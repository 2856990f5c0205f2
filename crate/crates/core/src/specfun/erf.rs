use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

// Weideman's rational approximation of the Faddeeva function, 40 terms.
const WEIDEMAN_N: usize = 40;

struct Weideman {
    l: f64,
    a: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let m2 = 2 * m;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        // samples f at t_k = L tan(kπ/2M), k = -M+1..M-1, with a leading zero
        let mut f = vec![0.0; m2];
        for (idx, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let t = l * (k as f64 * PI / m as f64 / 2.0).tan();
            f[idx + 1] = (-t * t).exp() * (l * l + t * t);
        }
        // fftshift for even length swaps the halves
        let shifted: Vec<f64> = f[m..].iter().chain(f[..m].iter()).copied().collect();
        let mut a = vec![0.0; n + 1];
        for (j, aj) in a.iter_mut().enumerate() {
            let mut s = 0.0;
            for (i, &x) in shifted.iter().enumerate() {
                s += x * (2.0 * PI * (j * i) as f64 / m2 as f64).cos();
            }
            *aj = s / m2 as f64;
        }
        Weideman { l, a }
    })
}

fn faddeeva_upper(z: Complex64) -> Complex64 {
    if z.norm() > 12.0 {
        // continued fraction, converges quickly far from the origin
        let mut t = z;
        for k in (1..=48).rev() {
            t = z - (k as f64 / 2.0) / t;
        }
        return Complex64::new(0.0, FRAC_1_SQRT_PI) / t;
    }
    let w = weideman();
    let iz = Complex64::new(-z.im, z.re);
    let den = w.l - iz;
    let zz = (w.l + iz) / den;
    let mut p = Complex64::new(0.0, 0.0);
    for j in (1..=WEIDEMAN_N).rev() {
        p = p * zz + w.a[j];
    }
    2.0 * p / (den * den) + FRAC_1_SQRT_PI / den
}

/// Faddeeva function w(z) = e^{-z²} Erfc(-iz).
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if z.im >= 0.0 {
        return Ok(faddeeva_upper(z));
    }
    let e = -(z * z);
    if e.re > 700.0 {
        return Err(Error::Overflow(format!("faddeeva({z}) needs exp of {}", e.re)));
    }
    Ok(2.0 * e.exp() - faddeeva_upper(-z))
}

// Maclaurin series of erf, used near the origin where the rational
// approximation is weakest.
fn erf_small(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut t = z;
    let mut s = z;
    for n in 1..40 {
        let nf = n as f64;
        t = -t * z2 / nf;
        let term = t / (2.0 * nf + 1.0);
        s += term;
        if term.norm() <= 1e-17 * s.norm() {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * s
}

const SMALL: f64 = 0.5;

/// e^{z²}·Erfc(z) for any z; overflows only deep in the left half-plane.
pub(crate) fn erfcx_any(z: Complex64) -> Result<Complex64> {
    if z.norm() <= SMALL {
        return Ok((z * z).exp() * (1.0 - erf_small(z)));
    }
    faddeeva(Complex64::new(-z.im, z.re))
}

/// Complementary error function.
pub fn erfc(z: Complex64) -> Result<Complex64> {
    if z.re < 0.0 {
        return erfc(-z).map(|v| 2.0 - v);
    }
    if z.norm() <= SMALL {
        return Ok(1.0 - erf_small(z));
    }
    let e = -(z * z);
    if e.re > 700.0 {
        return Err(Error::Overflow(format!(
            "erfc({z}): e^(-z^2) overflows, use erfc_scaled"
        )));
    }
    let x = erfcx_any(z)?;
    if e.re < -745.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(e.exp() * x)
}

/// Scaled complementary error function e^{z²}·Erfc(z) on the closed right
/// half-plane.
pub fn erfc_scaled(z: Complex64) -> Result<Complex64> {
    if z.re < 0.0 {
        return Err(Error::Domain(format!("erfc_scaled needs Re z >= 0, got {z}")));
    }
    erfcx_any(z)
}

/// Real erfc.
pub fn erfc_real(x: f64) -> f64 {
    erfc(Complex64::new(x, 0.0)).map(|v| v.re).unwrap_or(0.0)
}
