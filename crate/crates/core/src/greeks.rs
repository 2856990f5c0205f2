//! Delta and the seller's hedge, from
//! ∂V/∂S_t = e^{−r(T−t)}·4/(σ²(T−t0))·(C − q·∂C/∂q),
//! with finite-difference cross-checks and numeric vega, gamma and theta.

use serde::{Deserialize, Serialize};

use crate::engines::{price_auto, price_with, EngineSettings};
use crate::error::{Error, Result};
use crate::model::{normalize, price_factor, Engine, MarketQuote, NormalizedInput};
use crate::pricer_closed::price_normalized;

pub use crate::pricer_closed::dprice_dq;

/// Relative bump for every finite difference in this module.
pub const FD_REL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreeksResult {
    /// ∂V/∂S_t.
    pub delta: f64,
    /// Π_t = S_t·Δ_t.
    pub hedge_position: f64,
    #[serde(rename = "dC_dq")]
    pub dc_dq: f64,
    /// Central difference of the price in S_t, running integral and strike
    /// held fixed.
    pub fd_delta: f64,
    pub engine: Engine,
    /// How ∂C/∂q was obtained: `analytic` or `finite_difference`.
    pub dc_dq_method: String,
}

/// Vega, gamma and theta by finite differences of the price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericGreeks {
    pub vega: f64,
    pub gamma: f64,
    /// ∂V/∂t with the running integral accruing at S_t.
    pub theta: f64,
}

/// Market price with a fixed engine, so bumped quotes cannot switch
/// engines between evaluations.
fn value_with(engine: Engine, mq: &MarketQuote, s: &EngineSettings) -> Result<f64> {
    let x = normalize(mq)?;
    Ok(price_factor(mq) * normalized_with(engine, &x, s)?)
}

fn normalized_with(engine: Engine, x: &NormalizedInput, s: &EngineSettings) -> Result<f64> {
    if x.q <= 0.0 {
        // rigid regime, exact in every engine
        return Ok(price_normalized(x.nu, x.h, x.q, &s.closed)?.value);
    }
    Ok(price_with(engine, x, s)?.value)
}

/// Central difference with one Richardson step when halving the bump moves
/// the estimate by more than 10%.
fn central<F: Fn(f64) -> Result<f64>>(f: F, x: f64, step: f64) -> Result<f64> {
    let d = |s: f64| -> Result<f64> { Ok((f(x + s)? - f(x - s)?) / (2.0 * s)) };
    let d1 = d(step)?;
    let d2 = d(0.5 * step)?;
    if (d1 - d2).abs() > 0.1 * d1.abs().max(d2.abs()) {
        Ok((4.0 * d2 - d1) / 3.0)
    } else {
        Ok(d1)
    }
}

/// Delta from C and ∂C/∂q. The closed engine supplies both when it accepts
/// the point; otherwise C comes from [`price_auto`] and ∂C/∂q from a
/// central difference of that engine in q.
pub fn delta(mq: &MarketQuote, s: &EngineSettings) -> Result<GreeksResult> {
    let x = normalize(mq)?;
    let (c, dc_dq, engine, method) = if x.q <= 0.0 {
        let c = price_normalized(x.nu, x.h, x.q, &s.closed)?.value;
        (c, -1.0, Engine::Closed, "analytic")
    } else {
        let routed = price_auto(&x, s)?;
        if routed.engine == Engine::Closed {
            let (d, _) = dprice_dq(x.nu, x.h, x.q, &s.closed)?;
            (routed.value, d, Engine::Closed, "analytic")
        } else {
            if routed.engine == Engine::Mc {
                return Err(Error::Domain(
                    "delta needs a deterministic engine; closed and laplace both refused".into(),
                ));
            }
            let e = routed.engine;
            let step = FD_REL_STEP * x.q;
            let d = central(
                |q| normalized_with(e, &NormalizedInput { q, q_star: q - x.k * x.h, ..x }, s),
                x.q,
                step,
            )?;
            (routed.value, d, e, "finite_difference")
        }
    };
    let scale = price_factor(mq) / mq.s_t;
    let delta = scale * (c - x.q * dc_dq);
    let fd_delta = central(
        |spot| value_with(engine, &MarketQuote { s_t: spot, ..*mq }, s),
        mq.s_t,
        FD_REL_STEP * mq.s_t,
    )?;
    Ok(GreeksResult {
        delta,
        hedge_position: mq.s_t * delta,
        dc_dq,
        fd_delta,
        engine,
        dc_dq_method: method.into(),
    })
}

/// Numeric vega, gamma and theta with the engine [`delta`] would use.
pub fn numeric_greeks(mq: &MarketQuote, s: &EngineSettings) -> Result<NumericGreeks> {
    let engine = delta(mq, s)?.engine;
    let v = |m: &MarketQuote| value_with(engine, m, s);
    let vega = central(|sig| v(&MarketQuote { sigma: sig, ..*mq }), mq.sigma, FD_REL_STEP * mq.sigma)?;
    let ds = 1e-3 * mq.s_t;
    let gamma = (v(&MarketQuote { s_t: mq.s_t + ds, ..*mq })? - 2.0 * v(mq)?
        + v(&MarketQuote { s_t: mq.s_t - ds, ..*mq })?)
        / (ds * ds);
    let dt = FD_REL_STEP * (mq.t_mat - mq.t0);
    let at = |t: f64| -> Result<f64> {
        let accrued = mq.running_integral + mq.s_t * (t - mq.t);
        v(&MarketQuote {
            t,
            running_integral: if t == mq.t0 { 0.0 } else { accrued },
            ..*mq
        })
    };
    let fwd = mq.t + dt <= mq.t_mat;
    let back = mq.t - dt > mq.t0 && mq.running_integral - mq.s_t * dt >= 0.0;
    let theta = match (back, fwd) {
        (true, true) => (at(mq.t + dt)? - at(mq.t - dt)?) / (2.0 * dt),
        (false, true) => (at(mq.t + dt)? - at(mq.t)?) / dt,
        (true, false) => (at(mq.t)? - at(mq.t - dt)?) / dt,
        (false, false) => return Err(Error::Domain("no room for a time bump".into())),
    };
    Ok(NumericGreeks { vega, gamma, theta })
}
