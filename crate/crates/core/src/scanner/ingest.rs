//! Loading quote files: one row per quote, grouped into curves per
//! `(as_of, entity_id)`. Tenors are never interpolated.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::curve::{CdsCurve, CdsQuote, DiscountCurve, EntityMeta, QuoteKind, Rating, Region, Sector, Seniority, Tenor};
use crate::error::{Error, Result};
use crate::irs::IrsForwardCurve;

pub const QUOTE_COLUMNS: [&str; 11] = [
    "as_of",
    "entity_id",
    "entity_name",
    "region",
    "sector",
    "currency",
    "rating",
    "seniority",
    "tenor_years",
    "spread_bp",
    "quote_kind",
];

/// `quote_kind` may be omitted; every other column is required.
const REQUIRED: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestOptions {
    /// Rows of any other kind are skipped.
    pub quote_kind: QuoteKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    /// Sorted by `(as_of, entity_id)`.
    pub curves: Vec<CdsCurve>,
    pub rejections: Vec<Rejection>,
    pub warnings: Vec<String>,
    /// Rows skipped because of their quote kind.
    pub filtered: usize,
}

struct Row {
    line: u64,
    meta: EntityMeta,
    quote: CdsQuote,
}

pub fn ingest_csv(path: impl AsRef<Path>, opts: IngestOptions) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(file, opts)
}

pub fn ingest_reader<R: Read>(reader: R, opts: IngestOptions) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut index = [usize::MAX; QUOTE_COLUMNS.len()];
    for (slot, name) in index.iter_mut().zip(QUOTE_COLUMNS) {
        if let Some(i) = headers.iter().position(|h| h.eq_ignore_ascii_case(name)) {
            *slot = i;
        }
    }
    let missing: Vec<&str> = QUOTE_COLUMNS[..REQUIRED]
        .iter()
        .zip(&index)
        .filter(|(_, &i)| i == usize::MAX)
        .map(|(n, _)| *n)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!("missing column(s): {}", missing.join(", "))));
    }

    let mut out = Ingested::default();
    let mut groups: BTreeMap<(NaiveDate, String), BTreeMap<Tenor, Row>> = BTreeMap::new();
    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.rejections.push(Rejection {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |k: usize| record.get(index[k]).unwrap_or("");
        let kind = if index[10] == usize::MAX {
            Ok(QuoteKind::Mid)
        } else {
            field(10).parse::<QuoteKind>()
        };
        let parsed = kind.and_then(|kind| {
            if kind != opts.quote_kind {
                return Ok(None);
            }
            parse_row(line, &field, kind, &mut out.warnings).map(Some)
        });
        let row = match parsed {
            Ok(Some(row)) => row,
            Ok(None) => {
                out.filtered += 1;
                continue;
            }
            Err(e) => {
                out.rejections.push(Rejection {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let key = (as_of_of(&record, index[0]), row.meta.entity_id.clone());
        let tenor = row.quote.tenor;
        match groups.entry(key).or_default().entry(tenor) {
            Entry::Occupied(_) => {
                return Err(Error::Duplicate {
                    line,
                    key: format!("{} {} {}", field(0), row.meta.entity_id, tenor),
                });
            }
            Entry::Vacant(v) => {
                v.insert(row);
            }
        }
    }

    for ((as_of, _), rows) in groups {
        // The shortest tenor's row supplies the entity attributes.
        let meta = rows.values().next().unwrap().meta.clone();
        let quotes: Vec<CdsQuote> = rows.values().map(|r| r.quote).collect();
        match CdsCurve::new(as_of, 0.0, meta, quotes) {
            Ok(c) => out.curves.push(c),
            Err(e) => {
                let line = rows.values().map(|r| r.line).min().unwrap_or(0);
                out.rejections.push(Rejection {
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    out.rejections.sort_by_key(|r| r.line);
    Ok(out)
}

fn as_of_of(record: &csv::StringRecord, i: usize) -> NaiveDate {
    // Already validated by parse_row.
    NaiveDate::parse_from_str(record.get(i).unwrap_or(""), "%Y-%m-%d").unwrap()
}

fn parse_row<'a>(
    line: u64,
    field: &impl Fn(usize) -> &'a str,
    kind: QuoteKind,
    warnings: &mut Vec<String>,
) -> Result<Row> {
    let bad = |what: &str, v: &str| Error::Parse {
        line,
        message: format!("bad {what} '{v}'"),
    };
    NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|_| bad("as_of", field(0)))?;
    let mut meta = EntityMeta::new(field(1), field(2)).map_err(|_| bad("entity_id", field(1)))?;
    let (region, known) = Region::parse_lenient(field(3));
    if !known {
        warnings.push(format!("line {line}: unknown region '{}' treated as {region}", field(3)));
    }
    let (sector, known) = Sector::parse_lenient(field(4));
    if !known {
        warnings.push(format!("line {line}: unknown sector '{}' treated as {sector}", field(4)));
    }
    let currency = field(5).to_ascii_uppercase();
    if currency.is_empty() {
        return Err(bad("currency", field(5)));
    }
    let seniority: Seniority = field(7).parse().map_err(|_| bad("seniority", field(7)))?;
    meta = meta
        .with_region(region)
        .with_sector(sector)
        .with_currency(currency)
        .with_rating(Rating::parse_lenient(field(6)))
        .with_seniority(seniority);
    let years: f64 = field(8).parse().map_err(|_| bad("tenor_years", field(8)))?;
    let tenor = Tenor::from_years(years).map_err(|_| bad("tenor_years", field(8)))?;
    let bp: f64 = field(9).parse().map_err(|_| bad("spread_bp", field(9)))?;
    let quote = CdsQuote::new(tenor, bp * 1e-4, kind).map_err(|_| bad("spread_bp", field(9)))?;
    Ok(Row { line, meta, quote })
}

/// Writes curves in the quote schema, ordered by date, entity and tenor.
pub fn write_quotes_csv<W: Write>(curves: &[CdsCurve], writer: W) -> Result<()> {
    let mut sorted: Vec<&CdsCurve> = curves.iter().collect();
    sorted.sort_by(|a, b| (a.as_of(), &a.entity().entity_id).cmp(&(b.as_of(), &b.entity().entity_id)));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(QUOTE_COLUMNS)?;
    for c in sorted {
        let e = c.entity();
        for q in c.quotes() {
            w.write_record([
                c.as_of().to_string(),
                e.entity_id.clone(),
                e.name.clone(),
                e.region.to_string(),
                e.sector.to_string(),
                e.currency.clone(),
                e.rating.to_string(),
                e.seniority.to_string(),
                format_years(q.tenor),
                format!("{:.4}", q.spread_bp()),
                q.kind.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

fn format_years(t: Tenor) -> String {
    let s = format!("{:.6}", t.years());
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Reads a two-column numeric CSV with the given header names.
fn read_pairs<R: Read>(reader: R, cols: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Schema(format!("missing column {name}")))
    };
    let (a, b) = (find(cols[0])?, find(cols[1])?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize, name: &str| -> Result<f64> {
            let v = record.get(i).unwrap_or("");
            v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {name} '{v}'"),
            })
        };
        out.push((num(a, cols[0])?, num(b, cols[1])?));
    }
    Ok(out)
}

/// Columns `t_years,discount_factor`.
pub fn read_discount_csv<R: Read>(reader: R) -> Result<DiscountCurve> {
    DiscountCurve::new(&read_pairs(reader, ["t_years", "discount_factor"])?)
}

/// Columns `T_years,rate_decimal`; `t0` is the swap start.
pub fn read_irs_csv<R: Read>(reader: R, t0: f64) -> Result<IrsForwardCurve> {
    IrsForwardCurve::new(t0, read_pairs(reader, ["T_years", "rate_decimal"])?)
}

pub fn read_discount_file(path: impl AsRef<Path>) -> Result<DiscountCurve> {
    let path = path.as_ref();
    read_discount_csv(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn read_irs_file(path: impl AsRef<Path>, t0: f64) -> Result<IrsForwardCurve> {
    let path = path.as_ref();
    read_irs_csv(File::open(path).map_err(|e| Error::io(path, e))?, t0)
}
