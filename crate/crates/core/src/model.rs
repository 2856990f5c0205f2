//! Market quotes and the normalized (ν, h, q) coordinates the engines
//! work in.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Contract and market state at valuation time t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketQuote {
    pub s_t: f64,
    pub strike: f64,
    /// Discount rate.
    pub r: f64,
    /// Risk-neutral drift of the underlying; equals `r` without dividends.
    pub varpi: f64,
    pub sigma: f64,
    /// Start of the averaging window.
    pub t0: f64,
    pub t: f64,
    #[serde(rename = "T_mat")]
    pub t_mat: f64,
    /// ∫_{t0}^{t} S_τ dτ accrued so far.
    pub running_integral: f64,
}

impl MarketQuote {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.s_t,
            self.strike,
            self.r,
            self.varpi,
            self.sigma,
            self.t0,
            self.t,
            self.t_mat,
            self.running_integral,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain(format!("non-finite field in {self:?}")));
        }
        if !(self.s_t > 0.0) {
            return Err(Error::Domain(format!("s_t must be positive, got {}", self.s_t)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.strike >= 0.0) {
            return Err(Error::Domain(format!("strike must be non-negative, got {}", self.strike)));
        }
        if !(self.t0 <= self.t && self.t <= self.t_mat) {
            return Err(Error::Domain(format!(
                "need t0 <= t <= T_mat, got {} {} {}",
                self.t0, self.t, self.t_mat
            )));
        }
        if !(self.t_mat > self.t0) {
            return Err(Error::Domain("averaging window T_mat - t0 must be positive".into()));
        }
        if !(self.running_integral >= 0.0) {
            return Err(Error::Domain(format!(
                "running_integral must be non-negative, got {}",
                self.running_integral
            )));
        }
        if self.t == self.t0 && self.running_integral != 0.0 {
            return Err(Error::Domain("running_integral must be 0 when t = t0".into()));
        }
        Ok(())
    }

    /// A quote at the start of its averaging window (t = t0 = 0, nothing
    /// accrued, no dividends) whose normalized coordinates are (ν, h, q).
    /// Needs h > 0 and q ≥ 0.
    pub fn at_start(nu: f64, h: f64, q: f64, s_t: f64, sigma: f64) -> Self {
        let s2 = sigma * sigma;
        let varpi = 0.5 * (nu + 1.0) * s2;
        MarketQuote {
            s_t,
            strike: q * s_t / h,
            r: varpi,
            varpi,
            sigma,
            t0: 0.0,
            t: 0.0,
            t_mat: 4.0 * h / s2,
            running_integral: 0.0,
        }
    }
}

/// Normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedInput {
    pub nu: f64,
    pub h: f64,
    pub q: f64,
    /// K / S_t, the slope of q in h.
    pub k: f64,
    pub q_star: f64,
}

impl NormalizedInput {
    /// Research input given directly as (ν, h, q); the affine split is
    /// taken with k = 0.
    pub fn direct(nu: f64, h: f64, q: f64) -> Self {
        NormalizedInput {
            nu,
            h,
            q,
            k: 0.0,
            q_star: q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Closed,
    Yor,
    Laplace,
    Mc,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Closed, Engine::Yor, Engine::Laplace, Engine::Mc];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Closed => "closed",
            Engine::Yor => "yor",
            Engine::Laplace => "laplace",
            Engine::Mc => "mc",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Engine::Closed),
            "yor" => Ok(Engine::Yor),
            "laplace" => Ok(Engine::Laplace),
            "mc" => Ok(Engine::Mc),
            _ => Err(Error::Domain(format!("unknown engine {s:?}"))),
        }
    }
}

/// A price with its error estimate: a deterministic tolerance for the
/// quadrature engines, the standard error for Monte Carlo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceEstimate {
    pub value: f64,
    pub engine: Engine,
    pub err_est: f64,
    pub diagnostics: BTreeMap<String, String>,
}

impl PriceEstimate {
    pub fn new(value: f64, engine: Engine, err_est: f64) -> Self {
        PriceEstimate {
            value,
            engine,
            err_est,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.diagnostics.insert(key.to_string(), value.to_string());
        self
    }

    /// Same estimate in market units.
    pub fn scaled(&self, factor: f64) -> Self {
        PriceEstimate {
            value: self.value * factor,
            err_est: self.err_est * factor.abs(),
            ..self.clone()
        }
    }
}

pub fn normalize(mq: &MarketQuote) -> Result<NormalizedInput> {
    mq.validate()?;
    let s2 = mq.sigma * mq.sigma;
    let nu = 2.0 * mq.varpi / s2 - 1.0;
    let h = 0.25 * s2 * (mq.t_mat - mq.t);
    let q = s2 / (4.0 * mq.s_t) * (mq.strike * (mq.t_mat - mq.t0) - mq.running_integral);
    let k = mq.strike / mq.s_t;
    Ok(NormalizedInput {
        nu,
        h,
        q,
        k,
        q_star: q - k * h,
    })
}

/// e^{−r(T−t)}·4S_t/(σ²(T−t0)), the factor taking normalized prices to
/// currency.
pub fn price_factor(mq: &MarketQuote) -> f64 {
    (-mq.r * (mq.t_mat - mq.t)).exp() * 4.0 * mq.s_t / (mq.sigma * mq.sigma * (mq.t_mat - mq.t0))
}

pub fn denormalize_price(mq: &MarketQuote, c_nu: f64) -> f64 {
    price_factor(mq) * c_nu
}

/// (e^{2(ν+1)h} − 1)/(2(ν+1)), the mean of ∫₀^h e^{2(B_τ+ντ)} dτ.
pub fn expected_a(nu: f64, h: f64) -> f64 {
    let x = 2.0 * (nu + 1.0);
    if (nu + 1.0).abs() < 1e-8 {
        // h + x h²/2 + …, exact to rounding this close to the limit
        return h * (1.0 + 0.5 * x * h);
    }
    (x * h).exp_m1() / x
}
