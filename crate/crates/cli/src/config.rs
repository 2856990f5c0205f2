//! The run configuration: a JSON file, command-line flags, or both.

use asian_core::engines::EngineSettings;
use asian_core::laplace_gy::BromwichSettings;
use asian_core::model::{MarketQuote, NormalizedInput};
use asian_core::pricer_closed::ClosedFormSettings;
use asian_core::yor_mc::{McSettings, YorSettings};
use serde::Deserialize;

use crate::args::{CommandName, EngineChoice, Format, RunArgs};

/// Exit status for each failure class.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<asian_core::Error> for Failure {
    fn from(e: asian_core::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// (ν, h, q) given directly; k and q_star default to the k = 0 split.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedQuote {
    pub nu: f64,
    pub h: f64,
    pub q: f64,
    pub k: Option<f64>,
    pub q_star: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum QuoteConfig {
    Market(MarketQuote),
    Normalized(NormalizedQuote),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nu: Vec<f64>,
    pub h: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub closed: ClosedFormSettings,
    pub laplace: BromwichSettings,
    pub yor: YorSettings,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub quote: Option<QuoteConfig>,
    pub grid: Option<GridConfig>,
    pub engines: Option<Vec<EngineChoice>>,
    pub output_format: Option<Format>,
    pub tolerances: Tolerances,
    pub mc: Option<McSettings>,
    pub seed: Option<u64>,
}

/// What to price.
#[derive(Debug, Clone)]
pub enum Input {
    Market(MarketQuote),
    /// Cartesian product of the lists, iterated ν, then h, then q.
    Normalized { nus: Vec<f64>, hs: Vec<f64>, qs: Vec<f64>, split: Option<(f64, f64)> },
    None,
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: CommandName,
    pub input: Input,
    pub engines: Vec<EngineChoice>,
    pub format: Format,
    pub settings: EngineSettings,
}

/// Paths and steps for selftest's moment verdict when none are given.
const SELFTEST_MC: (u64, u32) = (200_000, 500);

pub fn load(path: &std::path::Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

pub fn resolve(command: CommandName, args: &RunArgs) -> Result<Resolved, Failure> {
    let cfg = match &args.config {
        Some(p) => load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Failure::Usage(format!(
                "config is for {c:?} but the {command:?} command was given"
            )));
        }
    }
    let input = resolve_input(command, args, &cfg)?;

    let mut mc = cfg.mc.unwrap_or_default();
    if command == CommandName::Selftest && cfg.mc.is_none() {
        (mc.paths, mc.steps) = SELFTEST_MC;
    }
    if let Some(s) = cfg.seed {
        mc.seed = s;
    }
    if let Some(p) = args.paths {
        mc.paths = p;
    }
    if let Some(s) = args.steps {
        mc.steps = s;
    }
    if let Some(s) = args.seed {
        mc.seed = s;
    }
    let settings = EngineSettings {
        closed: cfg.tolerances.closed,
        laplace: cfg.tolerances.laplace,
        yor: cfg.tolerances.yor,
        mc,
    };
    settings.validate()?;

    let mut engines = if !args.engine.is_empty() {
        args.engine.clone()
    } else if let Some(e) = cfg.engines.clone() {
        e
    } else if command == CommandName::Compare {
        vec![EngineChoice::All]
    } else {
        vec![EngineChoice::Auto]
    };
    if engines.contains(&EngineChoice::All) {
        engines = vec![EngineChoice::Closed, EngineChoice::Yor, EngineChoice::Laplace, EngineChoice::Mc];
    }
    engines.sort();
    engines.dedup();
    if engines.is_empty() {
        return Err(Failure::Usage("select at least one engine".into()));
    }
    if command == CommandName::Compare && engines.len() < 2 {
        return Err(Failure::Usage("compare needs at least two engines".into()));
    }
    let format = args.format.or(cfg.output_format).unwrap_or(Format::Json);
    Ok(Resolved {
        command,
        input,
        engines,
        format,
        settings,
    })
}

fn resolve_input(command: CommandName, args: &RunArgs, cfg: &RunConfig) -> Result<Input, Failure> {
    if command == CommandName::Selftest {
        return Ok(Input::None);
    }
    if args.has_market() && args.has_normalized() {
        return Err(Failure::Usage("give either market flags or --nu/--h/--q, not both".into()));
    }
    let input = if args.has_market() {
        Input::Market(market_from_flags(args)?)
    } else if args.has_normalized() {
        if args.nu.is_empty() || args.h.is_empty() || args.q.is_empty() {
            return Err(Failure::Usage("--nu, --h and --q must all be given".into()));
        }
        Input::Normalized {
            nus: args.nu.clone(),
            hs: args.h.clone(),
            qs: args.q.clone(),
            split: None,
        }
    } else if let Some(g) = &cfg.grid {
        if cfg.quote.is_some() {
            return Err(Failure::Usage("config has both quote and grid".into()));
        }
        if g.nu.is_empty() || g.h.is_empty() || g.q.is_empty() {
            return Err(Failure::Validation("grid needs non-empty nu, h and q lists".into()));
        }
        Input::Normalized {
            nus: g.nu.clone(),
            hs: g.h.clone(),
            qs: g.q.clone(),
            split: None,
        }
    } else {
        match cfg.quote {
            Some(QuoteConfig::Market(m)) => Input::Market(m),
            Some(QuoteConfig::Normalized(n)) => {
                let split = match (n.k, n.q_star) {
                    (None, None) => None,
                    (Some(k), Some(qs)) => {
                        if (qs + k * n.h - n.q).abs() > 1e-12 * n.q.abs().max(1.0) {
                            return Err(Failure::Validation(format!(
                                "q_star + k·h = {} does not equal q = {}",
                                qs + k * n.h,
                                n.q
                            )));
                        }
                        Some((k, qs))
                    }
                    _ => return Err(Failure::Validation("give both k and q_star or neither".into())),
                };
                Input::Normalized {
                    nus: vec![n.nu],
                    hs: vec![n.h],
                    qs: vec![n.q],
                    split,
                }
            }
            None => return Err(Failure::Usage("no quote: give market flags, --nu/--h/--q, or --config".into())),
        }
    };
    match (&input, command) {
        (Input::Market(m), _) => m.validate()?,
        (Input::Normalized { nus, hs, qs, .. }, CommandName::Price | CommandName::Greeks) => {
            if nus.len() * hs.len() * qs.len() != 1 {
                return Err(Failure::Usage(format!("{command:?} takes a single point; use grid for lists")));
            }
        }
        _ => {}
    }
    Ok(input)
}

fn market_from_flags(a: &RunArgs) -> Result<MarketQuote, Failure> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for a market quote")));
    let rate = need(a.rate, "rate")?;
    let t0 = a.t0.unwrap_or(0.0);
    Ok(MarketQuote {
        s_t: need(a.spot, "spot")?,
        strike: need(a.strike, "strike")?,
        r: rate,
        varpi: a.drift.unwrap_or(rate),
        sigma: need(a.vol, "vol")?,
        t0,
        t: a.t.unwrap_or(t0),
        t_mat: need(a.maturity, "maturity")?,
        running_integral: a.running_integral.unwrap_or(0.0),
    })
}

impl Input {
    /// Normalized points in output order.
    pub fn points(&self) -> Vec<NormalizedInput> {
        match self {
            Input::Market(m) => vec![asian_core::model::normalize(m).expect("validated quote")],
            Input::Normalized { nus, hs, qs, split } => {
                let mut out = Vec::new();
                for &nu in nus {
                    for &h in hs {
                        for &q in qs {
                            let mut p = NormalizedInput::direct(nu, h, q);
                            if let Some((k, q_star)) = split {
                                p.k = *k;
                                p.q_star = *q_star;
                            }
                            out.push(p);
                        }
                    }
                }
                out
            }
            Input::None => Vec::new(),
        }
    }
}
