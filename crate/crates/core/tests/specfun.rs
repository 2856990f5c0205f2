use asian_core::quad::{integrate_points, integrate_semi_infinite, QuadSpec};
use asian_core::specfun::*;
use asian_core::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn tight() -> QuadSpec {
    QuadSpec::new(1e-15, 1e-13)
}

// ---------------------------------------------------------------- gamma

#[test]
fn gamma_small_integers() {
    assert_eq!(gamma_complex(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
    assert_eq!(gamma_complex(c(5.0, 0.0)).unwrap(), c(24.0, 0.0));
    let g = gamma(7.5).unwrap();
    // 6.5·5.5·…·0.5·√π
    let mut want = PI.sqrt();
    for k in 0..7 {
        want *= 0.5 + k as f64;
    }
    assert!((g - want).abs() <= 1e-14 * want);
}

#[test]
fn gamma_half_squared_is_pi() {
    let g = gamma_complex(c(0.5, 0.0)).unwrap();
    assert!(((g * g).re - PI).abs() < 1e-14);
}

#[test]
fn gamma_poles_are_rejected() {
    for z in [0.0, -1.0, -3.0, -17.0] {
        assert!(matches!(gamma_complex(c(z, 0.0)), Err(Error::Pole(_))));
        assert_eq!(rgamma(c(z, 0.0)), c(0.0, 0.0));
    }
}

#[test]
fn gamma_large_argument_against_stirling() {
    // ln Γ(z) = (z-1/2) ln z - z + ln√(2π) + 1/(12z) - 1/(360z³) + 1/(1260 z⁵) - …
    for z in [c(40.0, 3.0), c(25.0, -20.0), c(48.0, 0.0)] {
        let st = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * z)
            - 1.0 / (360.0 * z.powi(3))
            + 1.0 / (1260.0 * z.powi(5))
            - 1.0 / (1680.0 * z.powi(7));
        let g = gamma_complex(z).unwrap();
        assert!(rel(g, st.exp()) < 1e-13, "z={z}");
    }
}

fn hankel_rgamma(s: Complex64) -> Complex64 {
    // 1/Γ(s) = (1/2πi) ∮ e^{e^w} e^{(1-s)w} dw along Im w = ∓π and Re w = 0
    let spec = tight();
    let f = |w: Complex64| (w.exp()).exp() * ((1.0 - s) * w).exp();
    let x_end = 4.5;
    let lower = integrate_points(|x: f64| f(c(x, -PI)), &[0.0, 1.0, 2.0, 3.0, x_end], &spec).unwrap();
    let upper = integrate_points(|x: f64| f(c(x, PI)), &[0.0, 1.0, 2.0, 3.0, x_end], &spec).unwrap();
    let vert = integrate_points(
        |y: f64| f(c(0.0, y)) * c(0.0, 1.0),
        &[-PI, -PI / 2.0, 0.0, PI / 2.0, PI],
        &spec,
    )
    .unwrap();
    (upper.value - lower.value + vert.value) / c(0.0, 2.0 * PI)
}

#[test]
fn hankel_contour_identity() {
    for s in [c(0.5, 0.0), c(3.0, 0.0), c(-2.5, 0.0), c(1.0, 2.0), c(-1.0, 0.0)] {
        let h = hankel_rgamma(s);
        let r = rgamma(s);
        assert!((h - r).norm() < 1e-12 * r.norm().max(1.0), "s={s}: {h} vs {r}");
    }
}

#[test]
fn pochhammer_products() {
    assert_eq!(pochhammer(c(2.7, 1.0), 0), c(1.0, 0.0));
    assert_eq!(pochhammer(c(3.0, 0.0), 2), c(12.0, 0.0));
    let nu = -2.5;
    let p = pochhammer(c(-nu, 0.0), 4);
    let g = gamma_complex(c(-nu + 4.0, 0.0)).unwrap() / gamma_complex(c(-nu, 0.0)).unwrap();
    assert!(rel(p, g) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_recurrence(re in -30.0f64..29.0, im in -30.0f64..30.0) {
        let z = c(re, im);
        prop_assume!((z - z.re.round()).norm() > 1e-3 || z.re.round() > 0.0);
        prop_assume!(z.norm() <= 30.0);
        let g = gamma_complex(z).unwrap();
        let g1 = gamma_complex(z + 1.0).unwrap();
        prop_assert!(rel(g1, z * g) < 1e-12);
    }

    #[test]
    fn gamma_reflection(re in -29.0f64..30.0, im in -5.0f64..5.0) {
        let z = c(re, im);
        prop_assume!((z - z.re.round()).norm() > 1e-3);
        let lhs = gamma_complex(z).unwrap() * gamma_complex(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }
}

// ---------------------------------------------------------------- erfc

#[test]
fn erfc_basic_values() {
    assert!((erfc(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    let z = c(0.7, 0.2);
    let s = erfc(z).unwrap() + erfc(-z).unwrap();
    assert!((s - c(2.0, 0.0)).norm() < 1e-14);
}

#[test]
fn erfc_one_against_defining_integral() {
    let spec = tight();
    let r = integrate_semi_infinite(|u: f64| (-u * u).exp(), 1.0, |u: f64| (-u * u).exp(), &spec).unwrap();
    let want = 2.0 / PI.sqrt() * r.value;
    let got = erfc(c(1.0, 0.0)).unwrap();
    assert!((got.re - want).abs() < 1e-14);
    assert!((got.re - 0.157_299_207_050_285_1).abs() < 1e-15);
}

#[test]
fn erfc_matches_shifted_gaussian_integral_in_right_half_plane() {
    // Erfc(z) = e^{-z²} (2/√π) ∫₀^∞ e^{-u²-2zu} du
    let spec = tight();
    for &(x, y) in &[(0.1, 0.0), (0.5, 2.0), (1.5, -3.0), (3.0, 1.0), (0.0, 4.0), (5.0, 5.0), (2.0, -0.5)] {
        let z = c(x, y);
        let r = integrate_points(|u: f64| (-u * u - 2.0 * z * u).exp(), &quadpts(8.0 + y.abs(), 64), &spec).unwrap();
        let want = (-(z * z)).exp() * 2.0 / PI.sqrt() * r.value;
        let got = erfc(z).unwrap();
        assert!((got - want).norm() < 1e-13 * want.norm().max(1.0), "z={z}: {got} vs {want}");
    }
}

fn quadpts(end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| end * i as f64 / n as f64).collect()
}

#[test]
fn erfc_scaled_large_argument() {
    // e^{x²}Erfc(x) = 1/(x√π) (1 - 1/(2x²) + 3/(4x⁴) - 15/(8x⁶) + …)
    let x = 10.0;
    let got = erfc_scaled(c(x, 0.0)).unwrap().re;
    let s = 1.0 - 1.0 / (2.0 * x * x) + 3.0 / (4.0 * x.powi(4));
    let lead = 1.0 / (x * PI.sqrt());
    let next = 15.0 / (8.0 * x.powi(6)) * lead;
    assert!((got - lead * s).abs() <= next);
    assert!((got - lead).abs() <= lead / (2.0 * x * x) * 1.001);
}

#[test]
fn erfc_scaled_consistency_and_domain() {
    let z = c(2.0, 0.5);
    let lhs = erfc_scaled(z).unwrap() * (-(z * z)).exp();
    assert!((lhs - erfc(z).unwrap()).norm() < 1e-10);
    assert_eq!(erfc_scaled(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    assert!(matches!(erfc_scaled(c(-0.1, 0.0)), Err(Error::Domain(_))));
    assert!(matches!(erfc(c(0.0, 40.0)), Err(Error::Overflow(_))));
}

#[test]
fn erfc_scaled_is_smooth_across_method_switch() {
    // the rational approximation and the continued fraction meet at |z| = 12
    for k in 0..16 {
        let th = k as f64 * PI / 32.0;
        let a = erfc_scaled(Complex64::from_polar(11.999_999, th)).unwrap();
        let b = erfc_scaled(Complex64::from_polar(12.000_001, th)).unwrap();
        assert!(rel(a, b) < 1e-6, "theta={th}");
        let d = erfc_scaled(Complex64::from_polar(12.0, th) * (1.0 + 1e-7)).unwrap();
        assert!(rel(b, d) < 1e-6);
    }
}

// ---------------------------------------------------------------- hermite

#[test]
fn hermite_polynomial_values() {
    assert_eq!(hermite_polynomial(2, c(1.0, 0.0)), c(2.0, 0.0));
    assert_eq!(hermite_polynomial(3, c(0.0, 0.0)), c(0.0, 0.0));
    let p = HermitePolicy::default();
    assert_eq!(hermite(c(0.0, 0.0), c(3.7, -1.0), &p).unwrap(), c(1.0, 0.0));
    assert_eq!(hermite(c(1.0, 0.0), c(2.0, 0.0), &p).unwrap(), c(4.0, 0.0));
    // nudged to the integer
    let h = hermite(c(2.0 + 1e-9, 0.0), c(1.0, 0.0), &p).unwrap();
    assert_eq!(h, c(2.0, 0.0));
}

#[test]
fn hermite_integer_limit_of_series() {
    let p = HermitePolicy::default();
    let z = c(1.3, 0.0);
    let d = 1e-6;
    let a = hermite_series(c(5.0 + d, 0.0), z, &p).unwrap().value;
    let b = hermite_series(c(5.0 - d, 0.0), z, &p).unwrap().value;
    let poly = hermite_polynomial(5, z);
    assert!(((a + b) * 0.5 - poly).norm() < 1e-11 * poly.norm().max(1.0));
}

#[test]
fn hermite_minus_one_is_scaled_erfc() {
    let p = HermitePolicy::default();
    let h = hermite(c(-1.0, 0.0), c(1.0, 0.0), &p).unwrap();
    let want = PI.sqrt() / 2.0 * 1f64.exp() * erfc(c(1.0, 0.0)).unwrap();
    assert!(rel(h, want) < 1e-13);
}

#[test]
fn hermite_integral_examples() {
    let spec = tight();
    let h = hermite_integral(c(-1.0, 0.0), c(0.0, 0.0), &spec).unwrap();
    assert!((h - c(PI.sqrt() / 2.0, 0.0)).norm() < 1e-13);
    let h = hermite_integral(c(-1.0, 0.0), c(1.0, 0.0), &spec).unwrap();
    let want = PI.sqrt() / 2.0 * 1f64.exp() * erfc(c(1.0, 0.0)).unwrap();
    assert!(rel(h, want) < 1e-12);
    assert!(matches!(hermite_integral(c(0.5, 0.0), c(1.0, 0.0), &spec), Err(Error::Domain(_))));
}

#[test]
fn hermite_series_matches_integral() {
    let p = HermitePolicy::default();
    let spec = tight();
    let s = hermite_series(c(-2.5, 0.0), c(0.3, 0.0), &p).unwrap().value;
    let i = hermite_integral(c(-2.5, 0.0), c(0.3, 0.0), &spec).unwrap();
    assert!((s - i).norm() < 1e-9);
    let nu = c(-3.7, 0.0);
    let z = c(1.2, 0.4);
    let h = hermite(nu, z, &p).unwrap();
    let i = hermite_integral(nu, z, &spec).unwrap();
    assert!(rel(h, i) < 1e-10, "{h} vs {i}");
}

#[test]
fn hermite_matches_integral_over_the_plane() {
    // every evaluation path against the integral representation
    let p = HermitePolicy::default();
    let spec = tight();
    let mut worst: f64 = 0.0;
    for &nu in &[c(-0.3, 0.0), c(-1.5, 0.0), c(-4.2, 0.0), c(-8.7, 0.0), c(-12.5, 0.0), c(-2.0, 1.0)] {
        for k in 0..12 {
            let th = -PI + (k as f64 + 0.5) * 2.0 * PI / 12.0;
            for &r in &[0.4, 1.7, 3.1, 4.6, 7.0] {
                let z = Complex64::from_polar(r, th);
                let h = hermite(nu, z, &p).unwrap();
                let i = hermite_integral(nu, z, &spec).unwrap();
                // the integral itself loses accuracy where it cancels
                let scale = hermite_integral_abs(nu, z);
                let d = (h - i).norm();
                worst = worst.max(d / i.norm());
                assert!(d <= 1e-9 * i.norm() + 1e-13 * scale, "nu={nu} z={z}: {h} vs {i}");
            }
        }
    }
    eprintln!("worst relative deviation {worst:.2e}");
}

fn hermite_integral_abs(nu: Complex64, z: Complex64) -> f64 {
    // ∫ |e^{-u²-2zu} u^{-(ν+1)}| du / |Γ(-ν)|
    let spec = QuadSpec::new(1e-14, 1e-8);
    let peak = (-z.re).max(0.0);
    let r = integrate_points(
        |u: f64| if u == 0.0 { 0.0 } else { (-u * u - 2.0 * z.re * u - (nu.re + 1.0) * u.ln()).exp() },
        &[0.0, 1e-6, 1e-3, 0.1, 1.0, peak + 2.0, peak + 14.0],
        &spec,
    );
    r.map(|x| x.value).unwrap_or(f64::INFINITY) * rgamma(-nu).norm()
}

#[test]
fn hermite_minus_one_erfc_identity_on_disc() {
    // (2/√π) H_{-1}(z) = e^{z²} Erfc(z) on |z| ≤ 5
    let p = HermitePolicy::default();
    for k in 0..24 {
        for &r in &[0.0, 0.5, 1.5, 2.5, 3.5, 5.0] {
            let z = Complex64::from_polar(r, k as f64 * PI / 12.0);
            let h = hermite(c(-1.0, 0.0), z, &p).unwrap() * (2.0 / PI.sqrt());
            let e = (z * z).exp() * erfc(z).unwrap();
            assert!((h - e).norm() <= 1e-10 * e.norm().max(1.0), "z={z}: {h} vs {e}");
        }
    }
}

#[test]
fn hermite_large_negative_argument_scaled() {
    // e^{-x²} H_ν(-x) → 2^{ν+1}√π/Γ(-ν) (2x)^{-ν-1}·(…) for x → ∞
    let p = HermitePolicy::default();
    let nu = c(-4.5, 0.0);
    let (m, s) = hermite_scaled(nu, c(-60.0, 0.0), &p).unwrap();
    assert!(s > 3000.0);
    let lead = (nu + 1.0).exp2() * PI.sqrt() * rgamma(-nu) * c(120.0, 0.0).powc(-nu - 1.0);
    let got = m * (s - 3600.0).exp();
    assert!(rel(got, lead) < 1e-3, "{got} vs {lead}");
    assert!(matches!(hermite(nu, c(-60.0, 0.0), &p), Err(Error::Overflow(_))));
}

#[test]
fn asymptotic_bound_holds_on_wedge_sample() {
    let p = HermitePolicy::default();
    let spec = tight();
    let delta = p.wedge_delta;
    let mut count = 0;
    for i in 0..50 {
        let t = i as f64 / 49.0;
        let nu = c(-0.5 - 5.5 * t, 0.8 * (3.0 * t).sin());
        let th = (PI / 2.0 - delta) * (2.0 * ((7.0 * t).sin()));
        let th = th.clamp(-(PI / 2.0 - delta), PI / 2.0 - delta);
        let z = Complex64::from_polar(2.5 + 5.0 * ((11.0 * t).cos()).abs(), th);
        let n = (i % 9) as u32;
        let exact = hermite_integral(nu, z, &spec).unwrap();
        let partial = hermite_asymptotic_partial(nu, z, n);
        let bound = asymptotic_remainder_bound(nu, z, n, delta).unwrap();
        assert!((exact - partial).norm() <= bound + 1e-13, "nu={nu} z={z} n={n}");
        count += 1;
    }
    assert_eq!(count, 50);
}

#[test]
fn asymptotic_path_outside_wedge_is_refused() {
    let p = HermitePolicy::default();
    assert!(matches!(hermite_asymptotic(c(-2.0, 0.0), c(1.0, 5.0), &p), Err(Error::Wedge(_))));
    assert!(matches!(hermite_asymptotic(c(-2.0, 0.0), c(-5.0, 0.0), &p), Err(Error::Wedge(_))));
    let (v, b) = hermite_asymptotic(c(-2.0, 0.0), c(9.0, 1.0), &p).unwrap();
    let h = hermite(c(-2.0, 0.0), c(9.0, 1.0), &p).unwrap();
    assert!((v - h).norm() <= b + 1e-14);
}

#[test]
fn series_and_asymptotic_overlap() {
    let p = HermitePolicy::default();
    for i in 0..20 {
        let t = i as f64 / 19.0;
        let nu = c(-1.0 - 5.0 * t, 0.0);
        let r = p.series_radius * (0.8 + 0.4 * t);
        let z = Complex64::from_polar(r, (PI / 2.0 - p.wedge_delta) * (2.0 * t - 1.0));
        let s = hermite_series(nu, z, &p).unwrap();
        let n = 6;
        let a = hermite_asymptotic_partial(nu, z, n);
        let b = asymptotic_remainder_bound(nu, z, n, p.wedge_delta).unwrap();
        let series_noise = 4.0 * f64::EPSILON * s.abs_sum;
        assert!((s.value - a).norm() <= b + 1e-10 + series_noise, "nu={nu} z={z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hermite_recurrence(nr in -6.0f64..-1.0, ni in -0.5f64..0.5, r in 0.0f64..8.0, th in -PI..PI) {
        let p = HermitePolicy::default();
        let nu = c(nr, ni);
        let z = Complex64::from_polar(r, th);
        let hp = hermite(nu + 1.0, z, &p).unwrap();
        let h = hermite(nu, z, &p).unwrap();
        let hm = hermite(nu - 1.0, z, &p).unwrap();
        let res = hp - 2.0 * z * h + 2.0 * nu * hm;
        let scale = hp.norm() + (2.0 * z * h).norm() + (2.0 * nu * hm).norm();
        prop_assert!(res.norm() <= 1e-9 * scale, "residual {:e} scale {:e}", res.norm(), scale);
    }

    #[test]
    fn hermite_derivative(nr in -6.0f64..-1.0, r in 0.0f64..8.0, th in -PI..PI) {
        let p = HermitePolicy::default();
        let nu = c(nr, 0.0);
        let z = Complex64::from_polar(r, th);
        let step = 1e-5;
        let fd = (hermite(nu, z + step, &p).unwrap() - hermite(nu, z - step, &p).unwrap()) / (2.0 * step);
        let an = 2.0 * nu * hermite(nu - 1.0, z, &p).unwrap();
        prop_assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0));
    }
}

// ---------------------------------------------------------------- bessel

#[test]
fn bessel_examples() {
    assert_eq!(bessel_i(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let v = bessel_i(c(0.5, 0.0), c(2.0, 0.0)).unwrap();
    let want = (1.0 / PI).sqrt() * 2f64.sinh();
    assert!((v.re - want).abs() < 1e-14 * want);
    assert!(matches!(bessel_i(c(0.3, 0.0), c(-1.0, 0.0)), Err(Error::Branch(_))));
    // I_{-n} = I_n
    let a = bessel_i(c(-2.0, 0.0), c(1.7, 0.3)).unwrap();
    let b = bessel_i(c(2.0, 0.0), c(1.7, 0.3)).unwrap();
    assert!(rel(a, b) < 1e-14);
}

#[test]
fn bessel_recursion_at_example_point() {
    let mu = c(1.3, 0.7);
    let z = c(3.0, 0.0);
    let r = z * bessel_i(mu, z).unwrap()
        - 2.0 * (mu + 1.0) * bessel_i(mu + 1.0, z).unwrap()
        - z * bessel_i(mu + 2.0, z).unwrap();
    assert!(r.norm() < 1e-9 * bessel_i(mu, z).unwrap().norm());
}

#[test]
fn bessel_scaled_large_argument() {
    // e^{-x} I_μ(x) ≈ 1/√(2πx) (1 - (4μ²-1)/(8x))
    let x = 400.0;
    let mu = c(1.5, 0.0);
    let v = bessel_i_scaled(mu, c(x, 0.0)).unwrap().re;
    let m = 4.0 * 1.5 * 1.5;
    let a = (1.0 - (m - 1.0) / (8.0 * x) + (m - 1.0) * (m - 9.0) / (2.0 * (8.0 * x).powi(2))) / (2.0 * PI * x).sqrt();
    assert!((v - a).abs() < 1e-7 * a);
}

#[test]
fn schlafli_examples() {
    let spec = tight();
    let s = bessel_i_schlafli(c(0.5, 0.0), c(2.0, 0.0), &spec).unwrap();
    assert!((s.re - (1.0 / PI).sqrt() * 2f64.sinh()).abs() < 1e-12);
    let s = bessel_i_schlafli(c(1.3, 0.0), c(3.0, 0.0), &spec).unwrap();
    let b = bessel_i(c(1.3, 0.0), c(3.0, 0.0)).unwrap();
    assert!(rel(s, b) < 1e-8);
    // integer order: the semi-infinite term drops out
    let s = bessel_i_schlafli(c(2.0, 0.0), c(1.5, 0.0), &spec).unwrap();
    let b = bessel_i(c(2.0, 0.0), c(1.5, 0.0)).unwrap();
    assert!(rel(s, b) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bessel_recursion_rule(mr in -0.9f64..4.0, mi in -3.0f64..3.0, zr in 0.05f64..20.0, zi in -10.0f64..10.0) {
        let mu = c(mr, mi);
        let z = c(zr, zi);
        let i0 = bessel_i(mu, z).unwrap();
        let r = z * i0 - 2.0 * (mu + 1.0) * bessel_i(mu + 1.0, z).unwrap() - z * bessel_i(mu + 2.0, z).unwrap();
        let scale = (z * i0).norm() + (2.0 * (mu + 1.0) * bessel_i(mu + 1.0, z).unwrap()).norm();
        prop_assert!(r.norm() <= 1e-9 * scale);
    }

    #[test]
    fn schlafli_agrees_with_series(mr in -0.9f64..4.0, mi in -2.0f64..2.0, zr in 0.2f64..15.0, zi in -3.0f64..3.0) {
        let mu = c(mr, mi);
        let z = c(zr, zi);
        let s = bessel_i_schlafli(mu, z, &tight()).unwrap();
        let b = bessel_i(mu, z).unwrap();
        prop_assert!(rel(s, b) <= 1e-8, "{} vs {}", s, b);
    }
}

#[test]
fn weber_closed_form_examples() {
    let w = weber_closed_form(0.5, c(0.0, 0.0)).unwrap();
    assert!((w.re - 0.5f64.exp()).abs() < 1e-15);
    let w = weber_closed_form(0.25, c(1.0, 0.0)).unwrap();
    assert!((w.re - 4.0 * 1f64.exp()).abs() < 1e-14);
    assert!(weber_closed_form(0.0, c(0.0, 0.0)).is_err());
    assert!(weber_closed_form(1.0, c(-1.5, 0.0)).is_err());
}

#[test]
fn weber_quadrature_matches_closed_form() {
    let spec = tight();
    for &a in &[0.25, 0.5, 1.0, 2.0] {
        for &mu in &[c(-0.6, 0.0), c(0.8, 0.0), c(2.9, 0.0), c(1.2, 1.5)] {
            let q = weber_quadrature(a, mu, &spec).unwrap();
            let w = weber_closed_form(a, mu).unwrap();
            assert!(rel(q, w) < 1e-8, "a={a} mu={mu}: {q} vs {w}");
        }
    }
}
