//! One entry point over the four engines, with fallback routing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplace_gy::{invert_price, BromwichSettings};
use crate::model::{Engine, NormalizedInput, PriceEstimate};
use crate::pricer_closed::{price_normalized, ClosedFormSettings};
use crate::yor_mc::{mc_price, price_yor, McSettings, YorSettings};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSettings {
    pub closed: ClosedFormSettings,
    pub laplace: BromwichSettings,
    pub yor: YorSettings,
    pub mc: McSettings,
}

impl EngineSettings {
    pub fn validate(&self) -> Result<()> {
        self.closed.validate()?;
        self.laplace.validate()?;
        self.yor.quad.validate()?;
        self.yor.psi.validate()?;
        self.mc.validate()
    }
}

/// Closed-engine results with a relative error estimate above this are
/// handed to the next engine by [`price_auto`].
pub const CLOSED_REL_ERR_LIMIT: f64 = 1e-6;

pub fn price_with(engine: Engine, x: &NormalizedInput, s: &EngineSettings) -> Result<PriceEstimate> {
    match engine {
        Engine::Closed => price_normalized(x.nu, x.h, x.q, &s.closed),
        Engine::Laplace => invert_price(x.nu, x.h, x.k, x.q_star, &s.laplace),
        Engine::Yor => price_yor(x.nu, x.h, x.q, &s.yor),
        Engine::Mc => mc_price(x.nu, x.h, x.q, &s.mc),
    }
}

/// Closed engine first; on a refusal, or an error estimate above
/// [`CLOSED_REL_ERR_LIMIT`], the Laplace engine (ν > −1), then Monte Carlo.
/// The path taken is recorded under the `route` diagnostic.
pub fn price_auto(x: &NormalizedInput, s: &EngineSettings) -> Result<PriceEstimate> {
    let mut route = Vec::new();
    match price_with(Engine::Closed, x, s) {
        Ok(p) if p.err_est <= CLOSED_REL_ERR_LIMIT * p.value.abs().max(1e-300) => {
            return Ok(p.with("route", "closed"));
        }
        Ok(p) => route.push(format!("closed (err_est {:.1e})", p.err_est)),
        Err(e) if e.is_refusal() => route.push(format!("closed ({e})")),
        Err(e) => return Err(e),
    }
    if x.nu > -1.0 {
        match price_with(Engine::Laplace, x, s) {
            Ok(p) => {
                route.push("laplace".into());
                return Ok(p.with("route", route.join(" -> ")));
            }
            Err(e @ (Error::Domain(_) | Error::NonpositiveStrike(_))) => return Err(e),
            Err(e) => route.push(format!("laplace ({e})")),
        }
    }
    route.push("mc".into());
    Ok(price_with(Engine::Mc, x, s)?.with("route", route.join(" -> ")))
}
