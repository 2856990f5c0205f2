//! Identity suites for the special functions and transforms, and the
//! verdicts on the two formula ambiguities the engines had to resolve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::laplace_gy::{invert_price, transform_pair_residual, BromwichSettings};
use crate::pricer_closed::{e_b, e_b_via_erfc, price_normalized_signed, ClosedFormSettings};
use crate::quad::QuadSpec;
use crate::specfun::{
    asymptotic_remainder_bound, bessel_i, bessel_i_schlafli, erfc, hermite, hermite_asymptotic_partial,
    hermite_integral, weber_closed_form, weber_quadrature, Complex64, HermitePolicy,
};
use crate::yor_mc::{mc_moments_a, moment_a, moment_a_reconciled, moment_b2n, moment_b2n_reconciled, McSettings};

/// One identity checked at `cases` points. A case passes when its score,
/// the residual divided by the allowed residual, is at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub worst_score: f64,
    pub tolerance: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failed == 0 && self.cases > 0
    }
}

/// The resolution chosen for an ambiguous formula and the evidence for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub question: String,
    pub chosen: String,
    pub evidence: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteReport>,
    pub verdicts: Vec<Verdict>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed) && self.verdicts.iter().all(|v| v.pass)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Scores every case; an evaluation error counts as a failure.
fn suite<I, F>(name: &str, tolerance: &str, cases: I, score: F) -> SuiteReport
where
    I: IntoIterator,
    F: Fn(I::Item) -> Result<f64>,
{
    let mut r = SuiteReport {
        name: name.into(),
        cases: 0,
        failed: 0,
        worst_score: 0.0,
        tolerance: tolerance.into(),
    };
    for case in cases {
        r.cases += 1;
        match score(case) {
            Ok(s) if s <= 1.0 => r.worst_score = r.worst_score.max(s),
            Ok(s) => {
                r.failed += 1;
                r.worst_score = r.worst_score.max(s);
            }
            Err(_) => {
                r.failed += 1;
                r.worst_score = f64::INFINITY;
            }
        }
    }
    r
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn hermite_suites(seed: u64) -> Vec<SuiteReport> {
    let p = HermitePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(Complex64, Complex64)> = (0..100)
        .map(|_| {
            let nu = c(rng.random_range(-6.0..-1.0), rng.random_range(-0.5..0.5));
            let z = Complex64::from_polar(rng.random_range(0.0..8.0), rng.random_range(-PI..PI));
            (nu, z)
        })
        .collect();
    let recurrence = suite("hermite_recurrence", "1e-9 relative to the term sizes", &pts, |&(nu, z)| {
        let hp = hermite(nu + 1.0, z, &p)?;
        let h = hermite(nu, z, &p)?;
        let hm = hermite(nu - 1.0, z, &p)?;
        let scale = hp.norm() + (2.0 * z * h).norm() + (2.0 * nu * hm).norm();
        Ok((hp - 2.0 * z * h + 2.0 * nu * hm).norm() / (1e-9 * scale))
    });
    let derivative = suite("hermite_derivative", "1e-6, central difference at step 1e-5", &pts, |&(nu, z)| {
        let nu = c(nu.re, 0.0);
        let step = 1e-5;
        let fd = (hermite(nu, z + step, &p)? - hermite(nu, z - step, &p)?) / (2.0 * step);
        let an = 2.0 * nu * hermite(nu - 1.0, z, &p)?;
        Ok((fd - an).norm() / (1e-6 * an.norm().max(1.0)))
    });
    let disc = (0..24).flat_map(|k| {
        [0.0, 0.5, 1.5, 2.5, 3.5, 5.0].map(|r| Complex64::from_polar(r, k as f64 * PI / 12.0))
    });
    let erfc_identity = suite("hermite_minus_one_erfc", "1e-10 on |z| <= 5", disc, |z| {
        let h = hermite(c(-1.0, 0.0), z, &p)? * (2.0 / PI.sqrt());
        let e = (z * z).exp() * erfc(z)?;
        Ok((h - e).norm() / (1e-10 * e.norm().max(1.0)))
    });
    let spec = QuadSpec::new(1e-15, 1e-13);
    let delta = p.wedge_delta;
    let wedge = (0..50).map(|i| {
        let t = i as f64 / 49.0;
        let nu = c(-0.5 - 5.5 * t, 0.8 * (3.0 * t).sin());
        let th = ((FRAC_PI_2 - delta) * 2.0 * (7.0 * t).sin()).clamp(-(FRAC_PI_2 - delta), FRAC_PI_2 - delta);
        let z = Complex64::from_polar(2.5 + 5.0 * (11.0 * t).cos().abs(), th);
        (nu, z, (i % 9) as u32)
    });
    let bound = suite("hermite_asymptotic_bound", "remainder within the printed bound", wedge, |(nu, z, n)| {
        let exact = hermite_integral(nu, z, &spec)?;
        let partial = hermite_asymptotic_partial(nu, z, n);
        Ok((exact - partial).norm() / (asymptotic_remainder_bound(nu, z, n, delta)? + 1e-13))
    });
    vec![recurrence, derivative, erfc_identity, bound]
}

pub fn bessel_suites(seed: u64) -> Vec<SuiteReport> {
    let spec = QuadSpec::new(1e-15, 1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(Complex64, Complex64)> = (0..50)
        .map(|_| {
            let mu = c(rng.random_range(-0.9..4.0), rng.random_range(-2.0..2.0));
            let z = c(rng.random_range(0.2..15.0), rng.random_range(-3.0..3.0));
            (mu, z)
        })
        .collect();
    let schlafli = suite("bessel_series_vs_schlafli", "1e-8 relative", &pts, |&(mu, z)| {
        Ok(rel(bessel_i_schlafli(mu, z, &spec)?, bessel_i(mu, z)?) / 1e-8)
    });
    let recursion = suite("bessel_recursion", "1e-9 relative", &pts, |&(mu, z)| {
        let i0 = bessel_i(mu, z)?;
        let i1 = bessel_i(mu + 1.0, z)?;
        let r = z * i0 - 2.0 * (mu + 1.0) * i1 - z * bessel_i(mu + 2.0, z)?;
        Ok(r.norm() / (1e-9 * ((z * i0).norm() + (2.0 * (mu + 1.0) * i1).norm())))
    });
    let pairs = [0.25, 0.5, 1.0, 2.0].into_iter().flat_map(|a| [c(-0.6, 0.0), c(1.2, 1.5), c(2.9, 0.0)].map(|mu| (a, mu)));
    let weber = suite("weber_quadrature", "1e-8 relative", pairs, |(a, mu)| {
        Ok(rel(weber_quadrature(a, mu, &spec)?, weber_closed_form(a, mu)?) / 1e-8)
    });
    vec![schlafli, recursion, weber]
}

/// The (α, β, z) triples of the transform-pair corpus.
pub const TRANSFORM_CORPUS: [[(f64, f64); 3]; 10] = [
    [(1.0, 0.0), (0.0, 0.0), (4.0, 0.0)],
    [(1.5, 0.0), (0.7, 0.0), (3.0, 1.0)],
    [(0.5, 0.0), (-0.4, 0.0), (2.0, 0.0)],
    [(2.0, 0.5), (0.3, 0.2), (1.5, -2.0)],
    [(1.0, -0.3), (-0.8, 0.1), (5.0, 3.0)],
    [(0.8, 0.0), (1.2, 0.0), (2.5, 0.0)],
    [(3.0, 0.0), (0.5, -0.5), (1.0, 0.5)],
    [(1.2, 0.4), (0.0, 1.0), (0.8, 0.0)],
    [(0.3, 0.1), (0.9, 0.0), (6.0, -4.0)],
    [(2.5, -1.0), (-0.2, 0.3), (4.0, 8.0)],
];

pub fn transform_suite() -> SuiteReport {
    let spec = QuadSpec::new(1e-15, 1e-12);
    suite("transform_pairs", "residual 1e-7", TRANSFORM_CORPUS, |[a, b, z]| {
        Ok(transform_pair_residual(c(a.0, a.1), c(b.0, b.1), c(z.0, z.1), &spec)? / 1e-7)
    })
}

pub fn e_b_suite() -> SuiteReport {
    let spec = QuadSpec::new(1e-14, 1e-12);
    let grid = [-3.5, -1.5, 0.0, 0.5, 2.5].into_iter().flat_map(|b| {
        [0.2, 0.5, 1.0, 1.5, 2.0]
            .into_iter()
            .flat_map(move |h| [0.0, 0.2, 0.7, 1.5, 3.0].map(move |y| (b, h, y)))
    });
    suite("e_b_dual_path", "1e-9 absolute", grid, |(b, h, y)| {
        Ok((e_b(b, h, y, &spec)? - e_b_via_erfc(b, h, y)?).abs() / 1e-9)
    })
}

/// Which sine sign in the E_b terms reproduces the Laplace engine. Only
/// ν = 0 discriminates: for half-integer ν both signs give the same sum.
pub fn e_b_sign_verdict() -> Result<Verdict> {
    let closed = ClosedFormSettings::default();
    let lap = BromwichSettings::default();
    let mut worst = [0.0f64; 2];
    for &h in &[0.25, 0.5, 1.0, 2.0] {
        for &q in &[0.05, 0.2, 0.5, 1.0] {
            let l = invert_price(0.0, h, 0.0, q, &lap)?.value;
            for (i, s) in [-1.0, 1.0].into_iter().enumerate() {
                let v = price_normalized_signed(s, 0.0, h, q, &closed)?.value;
                worst[i] = worst[i].max((v - l).abs() / l.abs());
            }
        }
    }
    Ok(Verdict {
        question: "sign of the sine term in E_b".into(),
        chosen: "minus".into(),
        evidence: format!(
            "nu = 0 grid vs laplace: worst relative difference {:.2e} with minus, {:.2e} with plus",
            worst[0], worst[1]
        ),
        pass: worst[0] <= 1e-4 && worst[1] > 1e-4,
    })
}

/// Printed vs reconciled moments of A_h (ν = 0), arbitrated by simulation,
/// and of B_h^{2n} against the Gaussian moments hⁿ(2n−1)!!.
pub fn moment_verdict(mc: &McSettings) -> Result<Verdict> {
    let h = 0.5;
    let s = mc_moments_a(h, 2, mc)?;
    let mut ok = true;
    let mut lines = Vec::new();
    for n in 1..=2u32 {
        let i = n as usize - 1;
        let (m, se) = (s.mean[i], s.std_error[i]);
        let printed = moment_a(n, h)?;
        let rec = moment_a_reconciled(n, h)?;
        let (zp, zr) = ((printed - m) / se, (rec - m) / se);
        ok &= zr.abs() <= 3.0 && zp.abs() > 3.0;
        lines.push(format!("E[A^{n}]: mc {m:.6} (se {se:.1e}), printed {printed:.6} (z {zp:.1}), reconciled {rec:.6} (z {zr:.1})"));
    }
    for n in 1..=3u32 {
        let gauss = h.powi(n as i32) * (1..=n).map(|k| (2 * k - 1) as f64).product::<f64>();
        let printed = moment_b2n(n, h)?;
        let rec = moment_b2n_reconciled(n, h)?;
        ok &= (rec - gauss).abs() <= 1e-12 * gauss;
        lines.push(format!("E[B^{}]: gaussian {gauss:.6}, printed {printed:.6}, reconciled {rec:.6}", 2 * n));
    }
    Ok(Verdict {
        question: "moment formulas for A_h and B_h^2n".into(),
        chosen: "reconciled".into(),
        evidence: lines.join("; "),
        pass: ok,
    })
}

pub fn run(seed: u64, mc: &McSettings) -> Result<SelftestReport> {
    let mut suites = hermite_suites(seed);
    suites.extend(bessel_suites(seed ^ 0x5eed));
    suites.push(transform_suite());
    suites.push(e_b_suite());
    let verdicts = vec![e_b_sign_verdict()?, moment_verdict(mc)?];
    Ok(SelftestReport { suites, verdicts })
}
