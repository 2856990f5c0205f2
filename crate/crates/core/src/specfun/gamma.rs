use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Distance from `z` to the nearest non-positive integer, or `None` when
/// the nearest integer is positive.
fn pole_distance(z: Complex64) -> Option<f64> {
    let n = z.re.round();
    if n > 0.0 {
        return None;
    }
    Some(Complex64::new(z.re - n, z.im).norm())
}

fn is_pole(z: Complex64) -> bool {
    match pole_distance(z) {
        Some(d) => d <= 4.0 * f64::EPSILON * z.norm().max(1.0),
        None => false,
    }
}

/// sin(πz) with the real part reduced to [-1/2, 1/2] first, so large
/// arguments keep full accuracy.
pub(crate) fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let s = (Complex64::new(z.re - n, z.im) * PI).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    // valid for Re z >= 0.5
    let zm = z - 1.0;
    let mut acc = c(LANCZOS_C[0]);
    for (k, &ck) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += ck / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    c(LN_SQRT_2PI) + (zm + 0.5) * t.ln() - t + acc.ln()
}

/// Logarithm of the gamma function. The imaginary part is a branch of
/// arg Γ(z); only `exp` of the result is meaningful.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("ln_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole(format!("gamma pole at {z}")));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        let s = sin_pi(z);
        Ok(c(PI.ln()) - s.ln() - ln_gamma_right(c(1.0) - z))
    }
}

/// Complex gamma function.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(format!("gamma pole at {z}")));
    }
    // Exact factorials for small positive integers.
    if z.im == 0.0 && z.re == z.re.round() && z.re >= 1.0 && z.re <= 23.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u32) {
            f *= k as f64;
        }
        return Ok(c(f));
    }
    let g = if z.re >= 0.5 {
        ln_gamma_right(z).exp()
    } else {
        PI / (sin_pi(z) * ln_gamma_right(c(1.0) - z).exp())
    };
    if !(g.re.is_finite() && g.im.is_finite()) {
        return Err(Error::Overflow(format!("gamma({z}) overflows")));
    }
    Ok(g)
}

/// Reciprocal gamma function, entire; zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return c(0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        sin_pi(z) * ln_gamma_right(c(1.0) - z).exp() / PI
    }
}

/// Real gamma function.
pub fn gamma(x: f64) -> Result<f64> {
    gamma_complex(c(x)).map(|g| g.re)
}

/// log |Γ(x)| for real x off the poles.
pub fn ln_gamma_abs(x: f64) -> Result<f64> {
    ln_gamma(c(x)).map(|g| g.re)
}

/// Rising factorial (x)_n by direct product.
pub fn pochhammer(x: Complex64, n: u32) -> Complex64 {
    let mut p = c(1.0);
    for k in 0..n {
        p *= x + k as f64;
    }
    p
}
