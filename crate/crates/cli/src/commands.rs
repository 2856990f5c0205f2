use asian_core::engines::{price_auto, price_with, EngineSettings};
use asian_core::greeks::{delta, numeric_greeks};
use asian_core::model::{price_factor, Engine, MarketQuote, NormalizedInput, PriceEstimate};
use asian_core::selftest;
use asian_core::yor_mc::mc_price_batch;
use asian_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};

use crate::args::{CommandName, EngineChoice};
use crate::config::{Failure, Input, Resolved};
use crate::output::{num, Report};

/// One engine at one point.
#[derive(Debug, Clone)]
pub struct Row {
    pub point: NormalizedInput,
    /// Engine that produced the value, or the one requested when none did.
    pub engine: String,
    pub estimate: Option<PriceEstimate>,
    /// `ok`, `skipped: …` for an engine declining the point, `error: …`.
    pub status: String,
    /// Price factor applied to the normalized value (1 for normalized input).
    pub unit: f64,
    numerical_failure: bool,
}

impl Row {
    fn header() -> Vec<&'static str> {
        vec!["nu", "h", "q", "engine", "value", "err_est", "status"]
    }

    fn record(&self) -> Vec<String> {
        let p = &self.point;
        let (v, e) = match &self.estimate {
            Some(est) => (num(est.value), num(est.err_est)),
            None => (String::new(), String::new()),
        };
        vec![num(p.nu), num(p.h), num(p.q), self.engine.clone(), v, e, self.status.clone()]
    }

    fn json(&self) -> Value {
        let p = &self.point;
        let mut o = json!({
            "nu": p.nu, "h": p.h, "q": p.q,
            "engine": self.engine,
            "status": self.status,
        });
        if let Some(est) = &self.estimate {
            o["value"] = json!(est.value);
            o["err_est"] = json!(est.err_est);
            o["diagnostics"] = json!(est.diagnostics);
        }
        o
    }
}

fn engine_of(choice: EngineChoice) -> Option<Engine> {
    match choice {
        EngineChoice::Closed => Some(Engine::Closed),
        EngineChoice::Yor => Some(Engine::Yor),
        EngineChoice::Laplace => Some(Engine::Laplace),
        EngineChoice::Mc => Some(Engine::Mc),
        EngineChoice::Auto | EngineChoice::All => None,
    }
}

fn choice_name(choice: EngineChoice) -> &'static str {
    match engine_of(choice) {
        Some(e) => e.name(),
        None => "auto",
    }
}

/// Monte Carlo prices for a whole normalized grid from one path set, keyed
/// by the bit patterns of (ν, h, q). Each entry equals the single-point
/// result.
fn mc_cache(r: &Resolved) -> Result<HashMap<[u64; 3], PriceEstimate>, Failure> {
    let mut out = HashMap::new();
    let Input::Normalized { nus, hs, qs, split: None } = &r.input else {
        return Ok(out);
    };
    let n = nus.len() * hs.len() * qs.len();
    if n < 2 || !r.engines.contains(&EngineChoice::Mc) || hs.iter().any(|&h| !(h > 0.0)) || nus.iter().any(|v| !v.is_finite()) {
        return Ok(out);
    }
    let batch = mc_price_batch(hs, nus, qs, &r.settings.mc)?;
    for (i, &h) in hs.iter().enumerate() {
        for (j, &nu) in nus.iter().enumerate() {
            for (k, &q) in qs.iter().enumerate() {
                let est = batch[(i * nus.len() + j) * qs.len() + k].clone();
                out.insert([nu.to_bits(), h.to_bits(), q.to_bits()], est);
            }
        }
    }
    Ok(out)
}

fn evaluate(
    choice: EngineChoice,
    p: &NormalizedInput,
    market: Option<&MarketQuote>,
    s: &EngineSettings,
    cache: &HashMap<[u64; 3], PriceEstimate>,
) -> Row {
    let unit = market.map(price_factor).unwrap_or(1.0);
    let res: Result<PriceEstimate, Error> = match engine_of(choice) {
        None => price_auto(p, s),
        Some(Engine::Mc) => match cache.get(&[p.nu.to_bits(), p.h.to_bits(), p.q.to_bits()]) {
            Some(e) => Ok(e.clone()),
            None => price_with(Engine::Mc, p, s),
        },
        Some(e) => price_with(e, p, s),
    };
    match res {
        Ok(est) => Row {
            point: *p,
            engine: est.engine.name().to_string(),
            estimate: Some(if market.is_some() { est.scaled(unit) } else { est }),
            status: "ok".into(),
            unit,
            numerical_failure: false,
        },
        Err(e) => {
            let declined = e.is_refusal() || e.is_validation();
            Row {
                point: *p,
                engine: choice_name(choice).to_string(),
                estimate: None,
                status: format!("{}: {e}", if declined { "skipped" } else { "error" }),
                unit,
                numerical_failure: !declined,
            }
        }
    }
}

/// Every engine at every point, in input order.
fn sweep(r: &Resolved) -> Result<Vec<Vec<Row>>, Failure> {
    let cache = mc_cache(r)?;
    let market = match &r.input {
        Input::Market(m) => Some(*m),
        _ => None,
    };
    let points = r.input.points();
    Ok(points
        .par_iter()
        .map(|p| {
            r.engines
                .iter()
                .map(|&c| evaluate(c, p, market.as_ref(), &r.settings, &cache))
                .collect()
        })
        .collect())
}

fn input_json(r: &Resolved) -> Value {
    match &r.input {
        Input::Market(m) => json!({ "market": m, "normalized": r.input.points()[0] }),
        _ => json!({ "normalized": r.input.points() }),
    }
}

pub fn run(r: &Resolved) -> Result<(Report, i32), Failure> {
    match r.command {
        CommandName::Price => price(r),
        CommandName::Grid => grid(r),
        CommandName::Compare => compare(r),
        CommandName::Greeks => greeks(r),
        CommandName::Selftest => run_selftest(r),
    }
}

fn price(r: &Resolved) -> Result<(Report, i32), Failure> {
    let rows: Vec<Row> = sweep(r)?.into_iter().flatten().collect();
    // a single requested engine that fails makes the command fail
    if rows.len() == 1 && rows[0].estimate.is_none() {
        let p = &rows[0].point;
        let e = match engine_of(r.engines[0]) {
            Some(e) => price_with(e, p, &r.settings),
            None => price_auto(p, &r.settings),
        };
        return Err(e.err().map(Failure::from).unwrap_or_else(|| Failure::Numerical(rows[0].status.clone())));
    }
    let code = exit_for(&rows);
    let json = json!({
        "command": "price",
        "input": input_json(r),
        "results": rows.iter().map(Row::json).collect::<Vec<_>>(),
    });
    Ok((Report::rows(json, Row::header(), rows.iter().map(Row::record).collect()), code))
}

fn grid(r: &Resolved) -> Result<(Report, i32), Failure> {
    let rows: Vec<Row> = sweep(r)?.into_iter().flatten().collect();
    let code = exit_for(&rows);
    let json = json!({
        "command": "grid",
        "rows": rows.iter().map(Row::json).collect::<Vec<_>>(),
    });
    Ok((Report::rows(json, Row::header(), rows.iter().map(Row::record).collect()), code))
}

fn exit_for(rows: &[Row]) -> i32 {
    if rows.iter().any(|r| r.numerical_failure) {
        3
    } else {
        0
    }
}

/// Agreement required between two engines: 3 standard errors when one is
/// Monte Carlo, max(1e-3·|ref|, 1e-6) against the triple integral, 1e-4·|ref|
/// otherwise. `ref` is the closed-engine value when present.
pub fn pair_tolerance(a: &Row, b: &Row) -> f64 {
    let (ea, eb) = (a.estimate.as_ref().unwrap(), b.estimate.as_ref().unwrap());
    let reference = if eb.engine == Engine::Closed { eb.value } else { ea.value };
    let is = |e: Engine| ea.engine == e || eb.engine == e;
    if is(Engine::Mc) {
        let (mc, other) = if ea.engine == Engine::Mc { (ea, eb) } else { (eb, ea) };
        let other_se = if other.engine == Engine::Mc { other.err_est } else { 0.0 };
        3.0 * mc.err_est.hypot(other_se)
    } else if is(Engine::Yor) {
        (1e-3 * reference.abs()).max(1e-6 * a.unit)
    } else {
        1e-4 * reference.abs()
    }
}

fn compare(r: &Resolved) -> Result<(Report, i32), Failure> {
    let sweeps = sweep(r)?;
    let mut all_pass = true;
    let mut numerical = false;
    let mut points = Vec::new();
    let mut records = Vec::new();
    for rows in &sweeps {
        numerical |= rows.iter().any(|r| r.numerical_failure);
        let ok: Vec<&Row> = rows.iter().filter(|r| r.estimate.is_some()).collect();
        let mut pairs = Vec::new();
        for i in 0..ok.len() {
            for j in i + 1..ok.len() {
                let (a, b) = (ok[i], ok[j]);
                let (va, vb) = (a.estimate.as_ref().unwrap().value, b.estimate.as_ref().unwrap().value);
                let diff = (va - vb).abs();
                let rel = diff / va.abs().max(f64::MIN_POSITIVE);
                let tol = pair_tolerance(a, b);
                let pass = diff <= tol;
                all_pass &= pass;
                let status = if pass { "PASS" } else { "FAIL" };
                let p = &a.point;
                records.push(vec![
                    num(p.nu),
                    num(p.h),
                    num(p.q),
                    a.engine.clone(),
                    b.engine.clone(),
                    num(va),
                    num(vb),
                    num(diff),
                    num(rel),
                    num(tol),
                    status.to_string(),
                ]);
                pairs.push(json!({
                    "a": a.engine, "b": b.engine,
                    "abs_diff": diff, "rel_diff": rel, "tolerance": tol, "status": status,
                }));
            }
        }
        if ok.len() < 2 {
            all_pass = false;
        }
        let p = &rows[0].point;
        points.push(json!({
            "nu": p.nu, "h": p.h, "q": p.q,
            "results": rows.iter().map(Row::json).collect::<Vec<_>>(),
            "pairs": pairs,
        }));
    }
    let json = json!({
        "command": "compare",
        "input": input_json(r),
        "points": points,
        "status": if all_pass { "PASS" } else { "FAIL" },
    });
    let header = vec![
        "nu", "h", "q", "engine_a", "engine_b", "value_a", "value_b", "abs_diff", "rel_diff", "tolerance", "status",
    ];
    let code = if numerical {
        3
    } else if all_pass {
        0
    } else {
        4
    };
    Ok((Report::rows(json, header, records), code))
}

fn greeks(r: &Resolved) -> Result<(Report, i32), Failure> {
    let Input::Market(mq) = &r.input else {
        return Err(Failure::Validation("greeks needs a market quote".into()));
    };
    let g = delta(mq, &r.settings)?;
    let n = numeric_greeks(mq, &r.settings)?;
    let json = json!({
        "command": "greeks",
        "input": input_json(r),
        "greeks": g,
        "numeric": n,
    });
    let method = g.dc_dq_method.clone();
    let records = vec![
        vec!["delta".into(), num(g.delta), method.clone()],
        vec!["hedge_position".into(), num(g.hedge_position), method.clone()],
        vec!["dC_dq".into(), num(g.dc_dq), method],
        vec!["fd_delta".into(), num(g.fd_delta), "numeric".into()],
        vec!["vega".into(), num(n.vega), "numeric".into()],
        vec!["gamma".into(), num(n.gamma), "numeric".into()],
        vec!["theta".into(), num(n.theta), "numeric".into()],
    ];
    Ok((Report::rows(json, vec!["greek", "value", "method"], records), 0))
}

fn run_selftest(r: &Resolved) -> Result<(Report, i32), Failure> {
    let rep = selftest::run(r.settings.mc.seed, &r.settings.mc)?;
    let mut records = Vec::new();
    for s in &rep.suites {
        records.push(vec![
            "suite".into(),
            s.name.clone(),
            s.cases.to_string(),
            s.failed.to_string(),
            num(s.worst_score),
            if s.passed() { "PASS" } else { "FAIL" }.into(),
            s.tolerance.clone(),
        ]);
    }
    for v in &rep.verdicts {
        records.push(vec![
            "verdict".into(),
            v.question.clone(),
            String::new(),
            String::new(),
            String::new(),
            if v.pass { "PASS" } else { "FAIL" }.into(),
            format!("{}: {}", v.chosen, v.evidence),
        ]);
    }
    let passed = rep.passed();
    let mut counts = BTreeMap::new();
    counts.insert("suites", rep.suites.len());
    counts.insert("suites_passed", rep.suites.iter().filter(|s| s.passed()).count());
    counts.insert("cases", rep.suites.iter().map(|s| s.cases).sum());
    counts.insert("cases_failed", rep.suites.iter().map(|s| s.failed).sum());
    let json = json!({
        "command": "selftest",
        "counts": counts,
        "suites": rep.suites,
        "verdicts": rep.verdicts,
        "status": if passed { "PASS" } else { "FAIL" },
    });
    let header = vec!["kind", "name", "cases", "failed", "worst_score", "status", "detail"];
    Ok((Report::rows(json, header, records), if passed { 0 } else { 3 }))
}
