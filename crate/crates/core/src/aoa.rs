//! No-arbitrage checks on a quoted CDS curve.
//!
//! Every condition has the same shape: some maturity weight `w(T)` times the
//! spread must strictly increase with maturity. A pair `(T1, T2)` with
//! `T1 < T2` violates the condition when `w(T1) s1 >= w(T2) s2 + ε`.
//!
//! | condition        | weight `w(T)`                         |
//! |------------------|---------------------------------------|
//! | `Thm1`           | `T - T0`                              |
//! | `Thm2`           | `A(T0, T)`, continuous annuity        |
//! | `Thm3`           | `A_n`, discrete annuity on a schedule |
//! | `IrsCorollary`   | `(1 - F(T0, T)) / I(T0, T)`           |
//! | `IrsForward`     | `∫_{T0}^{T} Φ(U, T) dU`                |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::annuity::{irs_fair_rate, standardized_annuity};
use crate::curve::{CdsCurve, DiscountCurve, PaymentSchedule, Tenor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Thm1,
    Thm2,
    Thm3,
    IrsCorollary,
    /// Combined CDS/IRS condition using the swap forward curve directly.
    IrsForward,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Thm1 => "thm1",
            Condition::Thm2 => "thm2",
            Condition::Thm3 => "thm3",
            Condition::IrsCorollary => "irs",
            Condition::IrsForward => "irs-forward",
        })
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "thm1" => Ok(Condition::Thm1),
            "thm2" => Ok(Condition::Thm2),
            "thm3" => Ok(Condition::Thm3),
            "irs" | "irs-corollary" => Ok(Condition::IrsCorollary),
            "irs-forward" => Ok(Condition::IrsForward),
            other => Err(Error::Usage(format!("unknown condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub tenor_short: Tenor,
    pub tenor_long: Tenor,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; infinite when the long leg's weighted spread is zero.
    pub mar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoAVerdict {
    pub condition: Condition,
    /// Sorted by `(tenor_short, tenor_long)`.
    pub violations: Vec<Violation>,
    /// Requested pairs with a tenor missing from the curve.
    pub skipped: Vec<(Tenor, Tenor)>,
    pub clean: bool,
}

impl AoAVerdict {
    fn new(condition: Condition, mut violations: Vec<Violation>, skipped: Vec<(Tenor, Tenor)>) -> Self {
        violations.sort_by_key(|v| (v.tenor_short, v.tenor_long));
        let clean = violations.is_empty();
        Self {
            condition,
            violations,
            skipped,
            clean,
        }
    }

    pub fn violated_pairs(&self) -> Vec<(Tenor, Tenor)> {
        self.violations.iter().map(|v| (v.tenor_short, v.tenor_long)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSelection {
    Listed(Vec<(Tenor, Tenor)>),
    /// Every `(T_i, T_j)` with `i < j` over the curve's tenors.
    AllOrdered,
}

impl PairSelection {
    /// 6m-1y, 1y-2y, 2y-5y and 5y-10y.
    pub fn standard() -> Self {
        let t = Tenor::CANONICAL;
        PairSelection::Listed(vec![(t[0], t[1]), (t[1], t[2]), (t[2], t[5]), (t[5], t[7])])
    }

    /// Parses `0.5:1,1:2,2:5,5:10`.
    pub fn parse(spec: &str) -> Result<Self> {
        let pairs = spec
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                let (a, b) = p
                    .split_once(':')
                    .ok_or_else(|| Error::Usage(format!("pair '{p}' must look like T1:T2")))?;
                let (a, b) = (a.parse::<Tenor>()?, b.parse::<Tenor>()?);
                if a >= b {
                    return Err(Error::Usage(format!("pair '{p}' must have T1 < T2")));
                }
                Ok((a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        if pairs.is_empty() {
            return Err(Error::Usage("empty pair list".into()));
        }
        Ok(PairSelection::Listed(pairs))
    }

    fn resolve(&self, curve: &CdsCurve) -> (Vec<(Tenor, Tenor)>, Vec<(Tenor, Tenor)>) {
        match self {
            PairSelection::AllOrdered => {
                let tenors: Vec<Tenor> = curve.tenors().collect();
                let mut pairs = Vec::new();
                for (i, &a) in tenors.iter().enumerate() {
                    for &b in &tenors[i + 1..] {
                        pairs.push((a, b));
                    }
                }
                (pairs, Vec::new())
            }
            PairSelection::Listed(list) => list
                .iter()
                .copied()
                .partition(|&(a, b)| curve.quote(a).is_some() && curve.quote(b).is_some()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub pairs: PairSelection,
    /// Margin by which the short leg must exceed the long leg before a pair is
    /// flagged, in the units of the weighted spreads. Zero flags equality.
    pub epsilon: f64,
}

impl CheckOptions {
    pub fn standard_pairs() -> Self {
        Self {
            pairs: PairSelection::standard(),
            epsilon: 0.0,
        }
    }

    pub fn all_pairs() -> Self {
        Self {
            pairs: PairSelection::AllOrdered,
            epsilon: 0.0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    pub mar: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// Compares `(T1 - T0) s1` against `(T2 - T0) s2`; equality is a violation.
pub fn check_thm1_pair(s1: f64, t1: f64, s2: f64, t2: f64, t0: f64) -> Result<PairOutcome> {
    check_thm1_pair_with(s1, t1, s2, t2, t0, 0.0)
}

pub fn check_thm1_pair_with(
    s1: f64,
    t1: f64,
    s2: f64,
    t2: f64,
    t0: f64,
    epsilon: f64,
) -> Result<PairOutcome> {
    if !(t0 < t1 && t1 < t2) {
        return Err(Error::domain(format!("need T0 < T1 < T2, got {t0}, {t1}, {t2}")));
    }
    if !(s1 >= 0.0 && s2 >= 0.0) {
        return Err(Error::domain("spreads must be >= 0"));
    }
    check_epsilon(epsilon)?;
    let lhs = (t1 - t0) * s1;
    let rhs = (t2 - t0) * s2;
    Ok(PairOutcome {
        lhs,
        rhs,
        violated: lhs >= rhs + epsilon,
        mar: ratio(lhs, rhs),
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    Ok(())
}

/// Maturity-adjusted spread ratio `T1 s1 / (T2 s2)`; a value of at least one
/// flags a violation.
pub fn mar(s1: f64, t1: f64, s2: f64, t2: f64) -> Result<f64> {
    if s2 == 0.0 || t2 == 0.0 {
        return Err(Error::UndefinedRatio(format!(
            "MAR needs a nonzero long leg, got s2 = {s2}, T2 = {t2}"
        )));
    }
    if !(s1 >= 0.0 && s2 > 0.0 && t1 > 0.0 && t2 > 0.0) {
        return Err(Error::domain("MAR inputs must be positive"));
    }
    Ok(t1 * s1 / (t2 * s2))
}

/// Applies a generic weighted check. `weight` is called once per tenor in use.
pub fn check_weighted<W>(
    curve: &CdsCurve,
    condition: Condition,
    opts: &CheckOptions,
    mut weight: W,
) -> Result<AoAVerdict>
where
    W: FnMut(Tenor) -> Result<f64>,
{
    check_epsilon(opts.epsilon)?;
    let (pairs, skipped) = opts.pairs.resolve(curve);
    let mut weights: Vec<(Tenor, f64)> = Vec::new();
    let mut weighted = |t: Tenor| -> Result<f64> {
        if let Some(&(_, w)) = weights.iter().find(|(x, _)| *x == t) {
            return Ok(w * curve.spread(t).unwrap());
        }
        let w = weight(t)?;
        weights.push((t, w));
        Ok(w * curve.spread(t).unwrap())
    };
    let mut violations = Vec::new();
    for (a, b) in pairs {
        if a >= b {
            return Err(Error::domain(format!("pair ({a}, {b}) is not ordered")));
        }
        let lhs = weighted(a)?;
        let rhs = weighted(b)?;
        if lhs >= rhs + opts.epsilon {
            violations.push(Violation {
                tenor_short: a,
                tenor_long: b,
                lhs,
                rhs,
                mar: ratio(lhs, rhs),
            });
        }
    }
    Ok(AoAVerdict::new(condition, violations, skipped))
}

/// Model-free check `(T - T0) s(T)` strictly increasing.
pub fn check_thm1_curve(curve: &CdsCurve, opts: &CheckOptions) -> Result<AoAVerdict> {
    let t0 = curve.effective_start();
    check_weighted(curve, Condition::Thm1, opts, |t| Ok(t.years() - t0))
}

fn require_domain(curve: &CdsCurve, d: &DiscountCurve) -> Result<()> {
    if let Some(last) = curve.quotes().last() {
        if last.tenor.years() > d.max_time() + 1e-12 {
            return Err(Error::domain(format!(
                "discount curve ends at {} but the CDS curve reaches {}",
                d.max_time(),
                last.tenor
            )));
        }
    }
    Ok(())
}

/// `A(T0, T) s(T)` strictly increasing; valid for any sign of rates.
pub fn check_thm2_curve(curve: &CdsCurve, d: &DiscountCurve, opts: &CheckOptions) -> Result<AoAVerdict> {
    require_domain(curve, d)?;
    let t0 = curve.effective_start();
    check_weighted(curve, Condition::Thm2, opts, |t| standardized_annuity(d, t0, t.years()))
}

/// Discrete-annuity version: all contracts share one payment schedule of
/// `freq` payments per year from `T0`, with every quoted tenor a payment date.
pub fn check_thm3_curve(
    curve: &CdsCurve,
    d: &DiscountCurve,
    freq: u32,
    opts: &CheckOptions,
) -> Result<AoAVerdict> {
    require_domain(curve, d)?;
    let t0 = curve.effective_start();
    let Some(last) = curve.quotes().last() else {
        return Ok(AoAVerdict::new(Condition::Thm3, Vec::new(), Vec::new()));
    };
    let tenor_dates: Vec<f64> = curve.tenors().map(Tenor::years).collect();
    let master = PaymentSchedule::regular_with(t0, last.tenor.years(), freq, &tenor_dates)?;
    // Cumulative discrete annuity at each schedule date.
    let mut cumulative = vec![0.0];
    for (a, b) in master.periods() {
        let next = cumulative.last().unwrap() + (b - a) * d.discount_factor(b)?;
        cumulative.push(next);
    }
    let dates = master.dates().to_vec();
    check_weighted(curve, Condition::Thm3, opts, |t| {
        let y = t.years();
        let i = dates
            .iter()
            .position(|&x| (x - y).abs() <= 1e-9)
            .ok_or_else(|| Error::domain(format!("tenor {t} is not a payment date")))?;
        Ok(cumulative[i])
    })
}

/// `(1 - F(T0,T)) s(T) / I(T0,T)` increasing, with `F = P(T)/P(T0)` and `I` the
/// continuously exchanged swap rate.
pub fn check_irs_corollary(curve: &CdsCurve, d: &DiscountCurve, opts: &CheckOptions) -> Result<AoAVerdict> {
    require_domain(curve, d)?;
    let t0 = curve.effective_start();
    let p0 = d.discount_factor(t0)?;
    check_weighted(curve, Condition::IrsCorollary, opts, |t| {
        let rate = irs_fair_rate(d, t0, t.years())?;
        if rate.abs() < 1e-14 {
            return Err(Error::Degenerate(format!(
                "swap rate vanishes at {t}; use the annuity form (thm2) for zero-rate curves"
            )));
        }
        let forward = d.discount_factor(t.years())? / p0;
        Ok((1.0 - forward) / rate)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotPoint {
    pub x: f64,
    pub s: f64,
    pub violation: bool,
}

/// Data for the hyperbola diagnostic: quotes as `(T - T0, s)` points and the
/// boundary `s = C / x` through the anchor. In log-log mode both series are
/// logged and the boundary is the slope -1 line. Spreads are in basis points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolaPlot {
    pub anchor: Tenor,
    pub log_log: bool,
    /// `x_a s_a` in decimal spread-years.
    pub constant: f64,
    pub points: Vec<PlotPoint>,
    pub boundary: Vec<(f64, f64)>,
}

impl HyperbolaPlot {
    pub fn violations(&self) -> impl Iterator<Item = &PlotPoint> {
        self.points.iter().filter(|p| p.violation)
    }

    /// Columns `x,s,series_id,violation_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,s,series_id,violation_flag\n");
        for p in &self.points {
            out.push_str(&format!("{:.6},{:.6},quotes,{}\n", p.x, p.s, u8::from(p.violation)));
        }
        let series = if self.log_log { "line" } else { "hyperbola" };
        for (x, s) in &self.boundary {
            out.push_str(&format!("{x:.6},{s:.6},{series},0\n"));
        }
        out
    }
}

const BOUNDARY_SAMPLES: usize = 100;

pub fn hyperbola_plot_data(curve: &CdsCurve, anchor: Tenor, log_log: bool) -> Result<HyperbolaPlot> {
    let t0 = curve.effective_start();
    let s_a = curve
        .spread(anchor)
        .ok_or_else(|| Error::domain(format!("anchor tenor {anchor} not on curve")))?;
    let x_a = anchor.years() - t0;
    let constant = x_a * s_a;
    let to_plot = |x: f64, s_bp: f64| if log_log { (x.ln(), s_bp.ln()) } else { (x, s_bp) };

    let points = curve
        .quotes()
        .iter()
        .map(|q| {
            let x = q.tenor.years() - t0;
            // Same comparison as the pair check, so both modes tag identically.
            let violation = x > x_a && x * q.spread <= constant;
            let (px, ps) = to_plot(x, q.spread_bp());
            PlotPoint {
                x: px,
                s: ps,
                violation,
            }
        })
        .collect::<Vec<_>>();

    let x_max = curve.quotes().last().map(|q| q.tenor.years() - t0).unwrap_or(x_a).max(x_a);
    let boundary = (0..BOUNDARY_SAMPLES)
        .map(|i| {
            let x = x_a + (x_max - x_a) * i as f64 / (BOUNDARY_SAMPLES - 1) as f64;
            to_plot(x, constant / x * 1e4)
        })
        .collect();

    Ok(HyperbolaPlot {
        anchor,
        log_log,
        constant,
        points,
        boundary,
    })
}
