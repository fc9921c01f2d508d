//! Browser bindings. Each export takes and returns JSON strings; the pure
//! `*_json` functions behind them are what the native tests exercise.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use cds_aoa::aoa::{check_thm1_curve, hyperbola_plot_data, CheckOptions};
use cds_aoa::curve::{CdsCurve, DiscountCurve, EntityMeta, RecoverySpec, Tenor};
use cds_aoa::irs::{forward_curve, IrsForwardCurve};
use cds_aoa::survival::bootstrap_hazards;

#[derive(Deserialize)]
struct QuoteIn {
    tenor: String,
    spread_bp: f64,
}

#[derive(Serialize)]
struct HyperbolaOut {
    constant_bp_years: f64,
    points: Vec<(f64, f64, bool)>,
    boundary: Vec<(f64, f64)>,
    violated_pairs: Vec<(String, String)>,
}

#[derive(Serialize)]
struct HazardOut {
    t_end: f64,
    hazard: f64,
    negative: bool,
}

#[derive(Serialize)]
struct ForwardOut {
    t: f64,
    swap_rate: f64,
    forward_bond: f64,
    forward_rate: f64,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_curve(quotes_json: &str) -> Result<CdsCurve, String> {
    let quotes: Vec<QuoteIn> = serde_json::from_str(quotes_json).map_err(err)?;
    let quotes = quotes
        .iter()
        .map(|q| Ok((q.tenor.parse::<Tenor>().map_err(err)?, q.spread_bp)))
        .collect::<Result<Vec<_>, String>>()?;
    // The quote date plays no part in anything exposed here.
    CdsCurve::from_bp(NaiveDate::default(), EntityMeta::new("demo", "demo").map_err(err)?, &quotes).map_err(err)
}

/// Quotes `[{"tenor": "5y", "spread_bp": 89.53}, ...]` to hyperbola plot data
/// anchored at `anchor`, plus the pairs violating the maturity-weighted condition over all tenors.
pub fn hyperbola_json(quotes_json: &str, anchor: &str, log_log: bool) -> Result<String, String> {
    let curve = parse_curve(quotes_json)?;
    let plot = hyperbola_plot_data(&curve, anchor.parse().map_err(err)?, log_log).map_err(err)?;
    let verdict = check_thm1_curve(&curve, &CheckOptions::all_pairs()).map_err(err)?;
    let out = HyperbolaOut {
        constant_bp_years: plot.constant * 1e4,
        points: plot.points.iter().map(|p| (p.x, p.s, p.violation)).collect(),
        boundary: plot.boundary,
        violated_pairs: verdict
            .violated_pairs()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    serde_json::to_string(&out).map_err(err)
}

/// Piecewise-constant hazards under a flat continuously compounded `rate`.
pub fn bootstrap_json(quotes_json: &str, rate: f64, recovery: f64) -> Result<String, String> {
    let curve = parse_curve(quotes_json)?;
    let d = DiscountCurve::flat(rate, 40.0).map_err(err)?;
    let rec = RecoverySpec::from_recovery(recovery).map_err(err)?;
    let s = bootstrap_hazards(&curve, &d, &rec, 4).map_err(err)?;
    let out: Vec<_> = s
        .segments()
        .map(|(t_end, hazard)| HazardOut { t_end, hazard, negative: hazard < 0.0 })
        .collect();
    serde_json::to_string(&out).map_err(err)
}

/// Swap-rate samples `[[T, rate], ...]` to forward bonds and rates on a grid.
pub fn irs_forward_json(samples_json: &str, t0: f64, step: f64) -> Result<String, String> {
    let samples: Vec<(f64, f64)> = serde_json::from_str(samples_json).map_err(err)?;
    let irs = IrsForwardCurve::new(t0, samples).map_err(err)?;
    let out: Vec<_> = forward_curve(&irs, step)
        .map_err(err)?
        .into_iter()
        .map(|p| ForwardOut {
            t: p.t,
            swap_rate: p.rate,
            forward_bond: p.forward_bond,
            forward_rate: p.forward_rate,
        })
        .collect();
    serde_json::to_string(&out).map_err(err)
}

#[wasm_bindgen]
pub fn hyperbola(quotes_json: &str, anchor: &str, log_log: bool) -> Result<String, JsError> {
    hyperbola_json(quotes_json, anchor, log_log).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bootstrap(quotes_json: &str, rate: f64, recovery: f64) -> Result<String, JsError> {
    bootstrap_json(quotes_json, rate, recovery).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn irs_forward(samples_json: &str, t0: f64, step: f64) -> Result<String, JsError> {
    irs_forward_json(samples_json, t0, step).map_err(|e| JsError::new(&e))
}
