//! Adaptive Gauss–Kronrod integration over finite, semi-infinite and
//! oscillatory ranges. Integrands may be real or complex valued.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign, Mul, Sub};

use crate::error::{Error, Result};

/// Tolerances and limits for one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub tail_eps: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_depth: 48,
            tail_eps: 1e-15,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 1e-300 && self.rel_tol >= 1e-14) {
            return Err(Error::Domain(format!(
                "quad tolerances below the double-precision floor: {self:?}"
            )));
        }
        if self.max_depth == 0 || !(self.tail_eps > 0.0) {
            return Err(Error::Domain(format!("invalid quad limits: {self:?}")));
        }
        Ok(())
    }

    /// Same limits with tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadSpec {
            abs_tol: self.abs_tol * factor,
            rel_tol: (self.rel_tol * factor).max(1e-14),
            ..*self
        }
    }
}

/// Values the integrators can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Result of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub err_est: f64,
    /// ∫|f| estimate, used by callers to judge cancellation.
    pub abs_value: f64,
    pub evals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    floor: f64,
    abs: f64,
    depth: u32,
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, depth: u32) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<T> {
        let v = f(x);
        if v.finite() {
            Ok(v)
        } else {
            Err(Error::Eval(x))
        }
    };
    let fc = eval(center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = fc.magnitude() * WGK[7];
    let mut f1 = [T::zero(); 7];
    let mut f2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let v1 = eval(center - dx)?;
        let v2 = eval(center + dx)?;
        f1[j] = v1;
        f2[j] = v2;
        kron += (v1 + v2) * WGK[j];
        res_abs += WGK[j] * (v1.magnitude() + v2.magnitude());
        if j % 2 == 1 {
            gauss += (v1 + v2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((f1[j] - mean).magnitude() + (f2[j] - mean).magnitude());
    }
    let scale = half.abs();
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = (kron - gauss).magnitude() * scale;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    Ok(Panel {
        a,
        b,
        value: kron * half,
        err: err.max(floor),
        floor,
        abs: res_abs,
        depth,
    })
}

struct ByErr<T>(Panel<T>);

impl<T> PartialEq for ByErr<T> {
    fn eq(&self, o: &Self) -> bool {
        self.0.err == o.0.err && self.0.a == o.0.a
    }
}
impl<T> Eq for ByErr<T> {}
impl<T> PartialOrd for ByErr<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for ByErr<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0
            .err
            .total_cmp(&o.0.err)
            .then_with(|| o.0.a.total_cmp(&self.0.a))
    }
}

const MAX_PANELS: usize = 20_000;

fn sum_panels<T: QuadValue>(panels: &[&Panel<T>]) -> (T, f64, f64, f64) {
    // sort by left endpoint so the sum does not depend on refinement order
    let mut idx: Vec<usize> = (0..panels.len()).collect();
    idx.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
    let mut v = T::zero();
    let (mut e, mut fl, mut ab) = (0.0, 0.0, 0.0);
    for i in idx {
        v += panels[i].value;
        e += panels[i].err;
        fl += panels[i].floor;
        ab += panels[i].abs;
    }
    (v, e, fl, ab)
}

/// Adaptive integration over consecutive panels given by `points`.
///
/// The tolerance actually enforced is max(abs_tol, rel_tol·|value|,
/// 2·roundoff floor); the floor is 50ε·∫|f| accumulated over panels.
pub fn integrate_points<T, F>(f: F, points: &[f64], spec: &QuadSpec) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain(format!("points not ascending: {points:?}")));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        heap.push(ByErr(gk15(&f, w[0], w[1], 0)?));
        evals += 15;
    }
    if heap.is_empty() {
        return Ok(Integral {
            value: T::zero(),
            err_est: 0.0,
            abs_value: 0.0,
            evals,
        });
    }
    let exact = |heap: &BinaryHeap<ByErr<T>>| {
        let all: Vec<&Panel<T>> = heap.iter().map(|p| &p.0).collect();
        sum_panels(&all)
    };
    // running totals, confirmed by an ordered re-summation before returning
    let (mut value, mut err, mut floor, mut abs) = exact(&heap);
    loop {
        let tol_of = |v: T, fl: f64| spec.abs_tol.max(spec.rel_tol * v.magnitude()).max(2.0 * fl);
        if err <= tol_of(value, floor) {
            (value, err, floor, abs) = exact(&heap);
            if err <= tol_of(value, floor) {
                return Ok(Integral {
                    value,
                    err_est: err,
                    abs_value: abs,
                    evals,
                });
            }
        }
        let tol = tol_of(value, floor);
        let worst = heap.pop().expect("non-empty heap").0;
        if worst.depth >= spec.max_depth || heap.len() + 2 > MAX_PANELS {
            return Err(Error::Quad(format!(
                "tolerance {tol:.3e} not met: err {err:.3e} on [{}, {}] after {evals} evaluations",
                points[0],
                points[points.len() - 1]
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quad(format!(
                "interval [{}, {}] cannot be bisected further",
                worst.a, worst.b
            )));
        }
        let left = gk15(&f, worst.a, mid, worst.depth + 1)?;
        let right = gk15(&f, mid, worst.b, worst.depth + 1)?;
        value = value - worst.value + left.value + right.value;
        err = (err - worst.err + left.err + right.err).max(0.0);
        floor = (floor - worst.floor + left.floor + right.floor).max(0.0);
        abs = abs - worst.abs + left.abs + right.abs;
        heap.push(ByErr(left));
        heap.push(ByErr(right));
        evals += 30;
    }
}

/// Adaptive integration of `f` over [a, b].
pub fn integrate_finite<T, F>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a <= b) {
        return Err(Error::Domain(format!("integrate_finite needs a <= b, got [{a}, {b}]")));
    }
    integrate_points(f, &[a, b], spec)
}

/// Equally spaced breakpoints, handy for integrands with a known scale.
pub fn linspace(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(1);
    let mut v: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    v[n] = b;
    v
}

/// Finds the truncation point T ≥ a where 2·envelope(T)·(e-folding width)
/// falls below `tail_eps`. Returns (T, tail bound).
pub fn tail_cutoff<E: Fn(f64) -> f64>(a: f64, envelope: &E, tail_eps: f64) -> Result<(f64, f64)> {
    let mut step = 1.0;
    let mut t = a + step;
    for _ in 0..200 {
        let e = envelope(t);
        if !(e >= 0.0) {
            return Err(Error::Tail(format!("envelope not a bound at {t}: {e}")));
        }
        if e == 0.0 {
            return Ok((t, 0.0));
        }
        // distance over which the envelope drops by a factor e
        let mut w = 1e-3 * step.max(1e-3);
        let mut found = false;
        for _ in 0..80 {
            if envelope(t + w) <= e / std::f64::consts::E {
                found = true;
                break;
            }
            w *= 2.0;
        }
        if found {
            let bound = 2.0 * e * w;
            if bound < tail_eps {
                return Ok((t, bound));
            }
        }
        step *= 1.25;
        t = a + step;
        if t > a + 1e7 {
            break;
        }
    }
    Err(Error::Tail(format!(
        "envelope does not fall below {tail_eps:e} within the search budget"
    )))
}

/// Integral of `f` over [a, ∞), truncated where the decay envelope makes
/// the remainder negligible. `err_est` includes the tail bound.
pub fn integrate_semi_infinite<T, F, E>(
    f: F,
    a: f64,
    envelope: E,
    spec: &QuadSpec,
) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
    E: Fn(f64) -> f64,
{
    let (t, tail) = tail_cutoff(a, &envelope, spec.tail_eps)?;
    let mut r = integrate_points(f, &linspace(a, t, 8), spec)?;
    r.err_est += tail;
    Ok(r)
}

/// Integral over [a, b] (or [a, ∞) when `b` is `None`) panel by panel,
/// one panel per half-period of the oscillation.
pub fn integrate_oscillatory<T, F, E>(
    f: F,
    a: f64,
    b: Option<f64>,
    half_period: f64,
    envelope: E,
    spec: &QuadSpec,
) -> Result<Integral<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
    E: Fn(f64) -> f64,
{
    if !(half_period > 0.0) {
        return Err(Error::Domain(format!("half_period must be positive, got {half_period}")));
    }
    let (end, mut tail) = match b {
        Some(b) => {
            if !(a <= b) {
                return Err(Error::Domain(format!("need a <= b, got [{a}, {b}]")));
            }
            (b, 0.0)
        }
        None => {
            // stop once two consecutive panels are bounded below tail_eps;
            // the alternating remainder is bounded by the next panel
            let mut x = a;
            let mut quiet = 0;
            let mut n = 0usize;
            loop {
                let bound = envelope(x) * half_period;
                if bound < spec.tail_eps {
                    quiet += 1;
                    if quiet == 2 {
                        break (x, bound);
                    }
                } else {
                    quiet = 0;
                }
                x += half_period;
                n += 1;
                if n > 2_000_000 {
                    return Err(Error::Tail("oscillatory tail budget exhausted".into()));
                }
            }
        }
    };
    let panels = (((end - a) / half_period).ceil() as usize).max(1);
    let mut pts = linspace(a, end, panels);
    if b.is_some() {
        pts = (0..=panels)
            .map(|i| (a + i as f64 * half_period).min(end))
            .collect();
        pts.dedup();
    }
    // rough pass to size per-panel tolerances
    let rough = integrate_points(&f, &pts, &QuadSpec { abs_tol: f64::MAX, ..*spec })?;
    let target = spec.abs_tol.max(spec.rel_tol * rough.value.magnitude());
    let n = (pts.len() - 1) as f64;
    let per = QuadSpec {
        abs_tol: target / n,
        rel_tol: 1e-14,
        ..*spec
    };
    let mut value = T::zero();
    let mut err = 0.0;
    let mut abs = 0.0;
    let mut evals = rough.evals;
    for w in pts.windows(2) {
        let r = integrate_points(&f, w, &per)?;
        value += r.value;
        err += r.err_est;
        abs += r.abs_value;
        evals += r.evals;
    }
    if b.is_none() {
        tail = tail.max(envelope(end) * half_period);
    }
    Ok(Integral {
        value,
        err_est: err + tail,
        abs_value: abs,
        evals,
    })
}
