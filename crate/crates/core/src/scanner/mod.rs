//! Batch scanning of quoted curves for maturity-pair anomalies, with
//! grouped counts, MAR statistics and deterministic reports.

mod ingest;
mod report;
pub mod synth;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::Serialize;

use crate::aoa::{
    check_irs_corollary, check_thm1_curve, check_thm2_curve, check_thm3_curve, AoAVerdict, CheckOptions,
    Condition,
};
use crate::curve::{CdsCurve, DiscountCurve, EntityMeta, Tenor};
use crate::error::{Error, Result};
use crate::irs::{check_irs_cds_aoa, IrsForwardCurve};

pub use ingest::{
    ingest_csv, ingest_reader, read_discount_csv, read_discount_file, read_irs_csv, read_irs_file, write_quotes_csv,
    IngestOptions, Ingested, Rejection, QUOTE_COLUMNS,
};
pub use report::{emit_report, monthly_csv, render_report, ReportFormat};

/// One violating maturity pair on one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyRecord {
    pub as_of: NaiveDate,
    pub entity: EntityMeta,
    pub tenor_short: Tenor,
    pub tenor_long: Tenor,
    pub s1: f64,
    pub s2: f64,
    /// Weighted spreads compared by the condition.
    pub lhs: f64,
    pub rhs: f64,
    pub mar: f64,
    pub condition: Condition,
}

impl AnomalyRecord {
    pub fn pair_label(&self) -> String {
        pair_label(self.tenor_short, self.tenor_long)
    }

    pub fn month(&self) -> String {
        month_label(self.as_of)
    }
}

pub fn pair_label(a: Tenor, b: Tenor) -> String {
    format!("{a}-{b}")
}

fn month_label(d: NaiveDate) -> String {
    format!("{:04}-{:02}", d.year(), d.month())
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub condition: Condition,
    pub check: CheckOptions,
    /// Needed by `Thm2`, `Thm3` and the swap-rate corollary.
    pub discount: Option<DiscountCurve>,
    /// When set, the `IrsCorollary` condition uses the swap curve directly.
    pub irs: Option<IrsForwardCurve>,
    /// Premium payments per year for `Thm3`.
    pub freq: u32,
    /// Entity ids left out of MAR statistics; counts are unaffected.
    pub mar_exclude: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            condition: Condition::Thm1,
            check: CheckOptions::standard_pairs(),
            discount: None,
            irs: None,
            freq: 4,
            mar_exclude: Vec::new(),
        }
    }
}

/// A curve the checker could not evaluate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveError {
    pub as_of: NaiveDate,
    pub entity_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarStats {
    pub count: usize,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthBucket {
    pub month: String,
    pub count: usize,
    /// March, June, September or December, the months holding a roll date.
    pub roll_month: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub condition: Condition,
    pub curves_scanned: usize,
    /// First and last quote date among the scanned curves.
    pub period: Option<(NaiveDate, NaiveDate)>,
    pub skipped_pairs: usize,
    pub curve_errors: Vec<CurveError>,
    pub total_anomalies: usize,
    pub by_pair: BTreeMap<String, usize>,
    pub by_month: BTreeMap<String, usize>,
    pub by_rating: BTreeMap<String, usize>,
    pub by_region: BTreeMap<String, usize>,
    pub by_sector: BTreeMap<String, usize>,
    pub by_currency: BTreeMap<String, usize>,
    pub by_seniority: BTreeMap<String, usize>,
    /// Keyed by `pair`, `rating` and `pair_rating`.
    pub mar_stats: BTreeMap<String, BTreeMap<String, MarStats>>,
    pub mar_excluded: Vec<String>,
    /// Sorted by date, entity id and pair.
    pub records: Vec<AnomalyRecord>,
}

pub const GROUP_KEYS: [&str; 9] = [
    "pair",
    "month",
    "rating",
    "region",
    "sector",
    "currency",
    "seniority",
    "entity",
    "pair_rating",
];

fn group_value(r: &AnomalyRecord, key: &str) -> Result<String> {
    let e = &r.entity;
    Ok(match key {
        "pair" => r.pair_label(),
        "month" => r.month(),
        "rating" => e.rating.to_string(),
        "region" => e.region.to_string(),
        "sector" => e.sector.to_string(),
        "currency" => e.currency.clone(),
        "seniority" => e.seniority.to_string(),
        "entity" => e.entity_id.clone(),
        "pair_rating" => format!("{}/{}", r.pair_label(), e.rating),
        other => {
            return Err(Error::Usage(format!(
                "unknown group key '{other}'; expected one of {}",
                GROUP_KEYS.join(", ")
            )))
        }
    })
}

fn check_curve(curve: &CdsCurve, cfg: &ScanConfig) -> Result<AoAVerdict> {
    let need_discount = || {
        cfg.discount
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("condition {} needs a discount curve", cfg.condition)))
    };
    match cfg.condition {
        Condition::Thm1 => check_thm1_curve(curve, &cfg.check),
        Condition::Thm2 => check_thm2_curve(curve, need_discount()?, &cfg.check),
        Condition::Thm3 => check_thm3_curve(curve, need_discount()?, cfg.freq, &cfg.check),
        Condition::IrsCorollary | Condition::IrsForward => match (&cfg.irs, cfg.condition) {
            (Some(irs), _) => check_irs_cds_aoa(irs, curve, &cfg.check),
            (None, Condition::IrsCorollary) => check_irs_corollary(curve, need_discount()?, &cfg.check),
            (None, _) => Err(Error::Usage("condition irs-forward needs a swap curve".into())),
        },
    }
}

fn validate(cfg: &ScanConfig) -> Result<()> {
    match cfg.condition {
        Condition::Thm1 => Ok(()),
        Condition::Thm2 | Condition::Thm3 if cfg.discount.is_none() => Err(Error::Usage(format!(
            "condition {} needs a discount curve",
            cfg.condition
        ))),
        Condition::IrsCorollary if cfg.irs.is_none() && cfg.discount.is_none() => Err(Error::Usage(
            "condition irs needs a swap curve or a discount curve".into(),
        )),
        Condition::IrsForward if cfg.irs.is_none() => {
            Err(Error::Usage("condition irs-forward needs a swap curve".into()))
        }
        _ => {
            if cfg.freq == 0 {
                return Err(Error::Usage("payment frequency must be positive".into()));
            }
            Ok(())
        }
    }
}

/// Runs the configured check over every curve. Curves are checked in
/// parallel; the report does not depend on input order.
pub fn scan(curves: &[CdsCurve], cfg: &ScanConfig) -> Result<ScanReport> {
    validate(cfg)?;
    let outcomes: Vec<(usize, std::result::Result<Vec<AnomalyRecord>, CurveError>)> = curves
        .par_iter()
        .map(|curve| match check_curve(curve, cfg) {
            Ok(v) => {
                let records = v
                    .violations
                    .iter()
                    .map(|x| AnomalyRecord {
                        as_of: curve.as_of(),
                        entity: curve.entity().clone(),
                        tenor_short: x.tenor_short,
                        tenor_long: x.tenor_long,
                        s1: curve.spread(x.tenor_short).unwrap(),
                        s2: curve.spread(x.tenor_long).unwrap(),
                        lhs: x.lhs,
                        rhs: x.rhs,
                        mar: x.mar,
                        condition: v.condition,
                    })
                    .collect();
                (v.skipped.len(), Ok(records))
            }
            Err(e) => (
                0,
                Err(CurveError {
                    as_of: curve.as_of(),
                    entity_id: curve.entity().entity_id.clone(),
                    message: e.to_string(),
                }),
            ),
        })
        .collect();

    let mut records = Vec::new();
    let mut curve_errors = Vec::new();
    let mut skipped_pairs = 0;
    for (skipped, outcome) in outcomes {
        skipped_pairs += skipped;
        match outcome {
            Ok(r) => records.extend(r),
            Err(e) => curve_errors.push(e),
        }
    }
    records.sort_by(|a, b| {
        (a.as_of, &a.entity.entity_id, a.tenor_short, a.tenor_long)
            .cmp(&(b.as_of, &b.entity.entity_id, b.tenor_short, b.tenor_long))
    });
    curve_errors.sort_by(|a, b| (a.as_of, &a.entity_id).cmp(&(b.as_of, &b.entity_id)));

    let period = curves
        .iter()
        .map(|c| c.as_of())
        .fold(None, |acc: Option<(NaiveDate, NaiveDate)>, d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        });

    let count_by = |key: &str| -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &records {
            *m.entry(group_value(r, key).unwrap()).or_insert(0) += 1;
        }
        m
    };
    let mut report = ScanReport {
        condition: cfg.condition,
        curves_scanned: curves.len(),
        period,
        skipped_pairs,
        curve_errors,
        total_anomalies: records.len(),
        by_pair: count_by("pair"),
        by_month: count_by("month"),
        by_rating: count_by("rating"),
        by_region: count_by("region"),
        by_sector: count_by("sector"),
        by_currency: count_by("currency"),
        by_seniority: count_by("seniority"),
        mar_stats: BTreeMap::new(),
        mar_excluded: cfg
            .mar_exclude
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        records: Vec::new(),
    };
    report.records = records;
    for key in ["pair", "rating", "pair_rating"] {
        let stats = mar_stats_by_group(&report, key, &report.mar_excluded)?;
        report.mar_stats.insert(key.to_string(), stats);
    }
    Ok(report)
}

/// Mean and max MAR per group, leaving out records whose entity id is in `exclude`.
pub fn mar_stats_by_group(
    report: &ScanReport,
    key: &str,
    exclude: &[String],
) -> Result<BTreeMap<String, MarStats>> {
    let mut acc: BTreeMap<String, (usize, f64, f64)> = BTreeMap::new();
    for r in &report.records {
        let group = group_value(r, key)?;
        if exclude.iter().any(|x| x == &r.entity.entity_id) {
            continue;
        }
        let e = acc.entry(group).or_insert((0, 0.0, f64::NEG_INFINITY));
        e.0 += 1;
        e.1 += r.mar;
        e.2 = e.2.max(r.mar);
    }
    if report.records.is_empty() {
        group_value_check(key)?;
    }
    Ok(acc
        .into_iter()
        .map(|(k, (n, sum, max))| {
            (
                k,
                MarStats {
                    count: n,
                    mean: sum / n as f64,
                    max,
                },
            )
        })
        .collect())
}

fn group_value_check(key: &str) -> Result<()> {
    if GROUP_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "unknown group key '{key}'; expected one of {}",
            GROUP_KEYS.join(", ")
        )))
    }
}

/// Anomaly counts per calendar month over the scanned period, zero months
/// included. Empty when the report has no anomalies.
pub fn aggregate_monthly(report: &ScanReport) -> Vec<MonthBucket> {
    let Some((first, last)) = report.period else {
        return Vec::new();
    };
    if report.records.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let (mut y, mut m) = (first.year(), first.month());
    while (y, m) <= (last.year(), last.month()) {
        let label = format!("{y:04}-{m:02}");
        out.push(MonthBucket {
            count: report.by_month.get(&label).copied().unwrap_or(0),
            month: label,
            roll_month: m % 3 == 0,
        });
        if m == 12 {
            y += 1;
            m = 1;
        } else {
            m += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Rating;

    fn curve(date: (i32, u32, u32), id: &str, rating: Rating, quotes: &[(f64, f64)]) -> CdsCurve {
        let q: Vec<_> = quotes.iter().map(|&(t, bp)| (Tenor::from_years(t).unwrap(), bp)).collect();
        CdsCurve::from_bp(
            NaiveDate::from_ymd_opt(date.0, date.1, date.2).unwrap(),
            EntityMeta::new(id, id).unwrap().with_rating(rating),
            &q,
        )
        .unwrap()
    }

    fn sample() -> Vec<CdsCurve> {
        vec![
            curve((2008, 9, 15), "B", Rating::A, &[(1.0, 140.0), (2.0, 50.0)]),
            curve((2008, 9, 2), "A", Rating::A, &[(1.0, 120.0), (2.0, 50.0)]),
            curve((2008, 11, 2), "C", Rating::AAA, &[(1.0, 10.0), (2.0, 20.0)]),
        ]
    }

    #[test]
    fn records_are_sorted_and_counted() {
        let r = scan(&sample(), &ScanConfig::default()).unwrap();
        assert_eq!(r.total_anomalies, 2);
        assert_eq!(r.records[0].entity.entity_id, "A");
        assert_eq!(r.by_pair.get("1y-2y"), Some(&2));
        assert_eq!(r.by_rating.values().sum::<usize>(), 2);
        let stats = &r.mar_stats["rating"]["A"];
        assert_eq!(stats.count, 2);
        assert!((stats.mean - 1.3).abs() < 1e-12);
        assert!((stats.max - 1.4).abs() < 1e-12);
        // six standard pairs minus the checked one, per curve
        assert_eq!(r.skipped_pairs, 9);
    }

    #[test]
    fn monthly_series_includes_zero_months() {
        let r = scan(&sample(), &ScanConfig::default()).unwrap();
        let m = aggregate_monthly(&r);
        let labels: Vec<_> = m.iter().map(|b| (b.month.as_str(), b.count, b.roll_month)).collect();
        assert_eq!(labels, vec![("2008-09", 2, true), ("2008-10", 0, false), ("2008-11", 0, false)]);
        let empty = scan(&[], &ScanConfig::default()).unwrap();
        assert!(aggregate_monthly(&empty).is_empty());
    }

    #[test]
    fn exclusion_and_group_keys() {
        let r = scan(&sample(), &ScanConfig::default()).unwrap();
        let s = mar_stats_by_group(&r, "pair", &["B".to_string()]).unwrap();
        assert!((s["1y-2y"].mean - 1.2).abs() < 1e-12);
        assert_eq!(s["1y-2y"].mean, s["1y-2y"].max);
        assert!(matches!(mar_stats_by_group(&r, "colour", &[]), Err(Error::Usage(_))));
        let empty = scan(&[], &ScanConfig::default()).unwrap();
        assert!(matches!(mar_stats_by_group(&empty, "colour", &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn missing_inputs_are_usage_errors() {
        let cfg = ScanConfig {
            condition: Condition::Thm2,
            ..ScanConfig::default()
        };
        assert!(matches!(scan(&sample(), &cfg), Err(Error::Usage(_))));
    }

    #[test]
    fn curve_level_failures_are_recorded() {
        let cfg = ScanConfig {
            condition: Condition::IrsCorollary,
            discount: Some(DiscountCurve::flat(0.0, 30.0).unwrap()),
            ..ScanConfig::default()
        };
        let r = scan(&sample(), &cfg).unwrap();
        assert_eq!(r.curve_errors.len(), 3);
        assert_eq!(r.total_anomalies, 0);
    }
}
