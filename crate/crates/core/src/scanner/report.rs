//! Byte-stable JSON and CSV renderings of a scan report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::value::RawValue;

use super::{aggregate_monthly, CurveError, MarStats, MonthBucket, ScanReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Usage(format!("unknown report format '{other}'"))),
        }
    }
}

fn fixed(x: f64, places: usize) -> String {
    if x.is_finite() {
        format!("{x:.places$}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn raw(x: f64, places: usize) -> Box<RawValue> {
    let s = if x.is_finite() { fixed(x, places) } else { "null".into() };
    RawValue::from_string(s).expect("number literal")
}

#[derive(Serialize)]
struct JsonStats {
    count: usize,
    mean: Box<RawValue>,
    max: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    as_of: String,
    entity_id: &'a str,
    entity_name: &'a str,
    region: &'a str,
    sector: &'a str,
    currency: &'a str,
    rating: &'a str,
    seniority: &'a str,
    tenor_short: String,
    tenor_long: String,
    s1_bp: Box<RawValue>,
    s2_bp: Box<RawValue>,
    mar: Box<RawValue>,
    condition: String,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    condition: String,
    curves_scanned: usize,
    period: Option<(String, String)>,
    skipped_pairs: usize,
    total_anomalies: usize,
    by_pair: &'a BTreeMap<String, usize>,
    by_month: &'a BTreeMap<String, usize>,
    by_rating: &'a BTreeMap<String, usize>,
    by_region: &'a BTreeMap<String, usize>,
    by_sector: &'a BTreeMap<String, usize>,
    by_currency: &'a BTreeMap<String, usize>,
    by_seniority: &'a BTreeMap<String, usize>,
    monthly: Vec<MonthBucket>,
    mar_stats: BTreeMap<&'a str, BTreeMap<&'a str, JsonStats>>,
    mar_excluded: &'a [String],
    curve_errors: &'a [CurveError],
    records: Vec<JsonRecord<'a>>,
}

fn json_stats(s: &MarStats) -> JsonStats {
    JsonStats {
        count: s.count,
        mean: raw(s.mean, 5),
        max: raw(s.max, 5),
    }
}

/// Spreads carry 4 decimals in bp, MAR 5 decimals.
pub fn render_report(report: &ScanReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => render_json(report),
        ReportFormat::Csv => Ok(render_csv(report)),
    }
}

fn render_json(report: &ScanReport) -> Result<String> {
    let doc = JsonReport {
        condition: report.condition.to_string(),
        curves_scanned: report.curves_scanned,
        period: report.period.map(|(a, b)| (a.to_string(), b.to_string())),
        skipped_pairs: report.skipped_pairs,
        total_anomalies: report.total_anomalies,
        by_pair: &report.by_pair,
        by_month: &report.by_month,
        by_rating: &report.by_rating,
        by_region: &report.by_region,
        by_sector: &report.by_sector,
        by_currency: &report.by_currency,
        by_seniority: &report.by_seniority,
        monthly: aggregate_monthly(report),
        mar_stats: report
            .mar_stats
            .iter()
            .map(|(k, groups)| {
                (
                    k.as_str(),
                    groups.iter().map(|(g, s)| (g.as_str(), json_stats(s))).collect(),
                )
            })
            .collect(),
        mar_excluded: &report.mar_excluded,
        curve_errors: &report.curve_errors,
        records: report
            .records
            .iter()
            .map(|r| JsonRecord {
                as_of: r.as_of.to_string(),
                entity_id: &r.entity.entity_id,
                entity_name: &r.entity.name,
                region: r.entity.region.label(),
                sector: r.entity.sector.label(),
                currency: &r.entity.currency,
                rating: r.entity.rating.label(),
                seniority: r.entity.seniority.label(),
                tenor_short: r.tenor_short.to_string(),
                tenor_long: r.tenor_long.to_string(),
                s1_bp: raw(r.s1 * 1e4, 4),
                s2_bp: raw(r.s2 * 1e4, 4),
                mar: raw(r.mar, 5),
                condition: r.condition.to_string(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(report: &ScanReport) -> String {
    let mut out = String::from("section,group,key,value\n");
    let mut line = |section: &str, group: &str, key: &str, value: String| {
        let _ = writeln!(out, "{section},{group},{},{value}", csv_field(key));
    };
    line("summary", "condition", "", report.condition.to_string());
    line("summary", "curves_scanned", "", report.curves_scanned.to_string());
    line("summary", "skipped_pairs", "", report.skipped_pairs.to_string());
    line("summary", "curve_errors", "", report.curve_errors.len().to_string());
    line("summary", "total_anomalies", "", report.total_anomalies.to_string());
    for (group, map) in [
        ("pair", &report.by_pair),
        ("month", &report.by_month),
        ("rating", &report.by_rating),
        ("region", &report.by_region),
        ("sector", &report.by_sector),
        ("currency", &report.by_currency),
        ("seniority", &report.by_seniority),
    ] {
        for (k, v) in map {
            line("count", group, k, v.to_string());
        }
    }
    for (group, stats) in &report.mar_stats {
        for (k, s) in stats {
            line("mar_count", group, k, s.count.to_string());
            line("mar_mean", group, k, fixed(s.mean, 5));
            line("mar_max", group, k, fixed(s.max, 5));
        }
    }
    for id in &report.mar_excluded {
        line("mar_excluded", "entity", id, String::new());
    }
    out.push_str("# records\n");
    out.push_str(
        "as_of,entity_id,entity_name,region,sector,currency,rating,seniority,tenor_short,tenor_long,s1_bp,s2_bp,mar,condition\n",
    );
    for r in &report.records {
        let e = &r.entity;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.as_of,
            csv_field(&e.entity_id),
            csv_field(&e.name),
            e.region,
            e.sector,
            csv_field(&e.currency),
            e.rating,
            e.seniority,
            r.tenor_short,
            r.tenor_long,
            fixed(r.s1 * 1e4, 4),
            fixed(r.s2 * 1e4, 4),
            fixed(r.mar, 5),
            r.condition
        );
    }
    out
}

pub fn emit_report(report: &ScanReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = render_report(report, format)?;
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Columns `month,count,roll_month`.
pub fn monthly_csv(buckets: &[MonthBucket]) -> String {
    let mut out = String::from("month,count,roll_month\n");
    for b in buckets {
        let _ = writeln!(out, "{},{},{}", b.month, b.count, u8::from(b.roll_month));
    }
    out
}
