//! Seeded synthetic quote sets with a known set of planted anomalies.
//!
//! Clean curves have spreads non-decreasing in maturity, which satisfies every
//! ordering condition for any nonnegative-rate discount curve. A plant raises
//! the short leg of one standard pair to `factor · (T2/T1) · s(T2)`, so its
//! MAR is `factor`. Each tenor is the short leg of at most one standard pair,
//! so every plant produces exactly one standard-pair anomaly.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{CdsCurve, EntityMeta, Rating, Region, Sector, Seniority, Tenor};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub curves: usize,
    pub violations: usize,
    pub entities: usize,
    pub seed: u64,
    pub first_month: (i32, u32),
    pub last_month: (i32, u32),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            curves: 1000,
            violations: 37,
            entities: 120,
            seed: 20_080_915,
            first_month: (2007, 1),
            last_month: (2010, 6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plant {
    pub as_of: NaiveDate,
    pub entity_id: String,
    pub tenor_short: Tenor,
    pub tenor_long: Tenor,
    pub factor: f64,
}

/// Ground truth for the standard pairs, grouped like a scan report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub curves: usize,
    pub total: usize,
    pub by_pair: BTreeMap<String, usize>,
    pub by_month: BTreeMap<String, usize>,
    pub by_rating: BTreeMap<String, usize>,
    pub by_region: BTreeMap<String, usize>,
    pub by_sector: BTreeMap<String, usize>,
    pub by_currency: BTreeMap<String, usize>,
    pub by_seniority: BTreeMap<String, usize>,
    pub plants: Vec<Plant>,
}

fn base_spread_bp(rating: Rating) -> f64 {
    match rating {
        Rating::AAA => 25.0,
        Rating::AA => 40.0,
        Rating::A => 70.0,
        Rating::BBB => 130.0,
        Rating::NIG => 420.0,
        Rating::NotRated => 180.0,
    }
}

fn months_between(first: (i32, u32), last: (i32, u32)) -> Vec<(i32, u32)> {
    let mut out = Vec::new();
    let (mut y, mut m) = first;
    while (y, m) <= last {
        out.push((y, m));
        (y, m) = if m == 12 { (y + 1, 1) } else { (y, m + 1) };
    }
    out
}

fn days_in_month(y: i32, m: u32) -> u32 {
    let next = if m == 12 {
        NaiveDate::from_ymd_opt(y + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(y, m + 1, 1)
    };
    next.unwrap().pred_opt().unwrap().day()
}

fn random_entity(rng: &mut ChaCha8Rng, k: usize) -> EntityMeta {
    let region = *[Region::NorthAmerica, Region::NorthAmerica, Region::Europe, Region::Asia, Region::Other]
        .choose(rng)
        .unwrap();
    let currency = match region {
        Region::Europe => *["EUR", "EUR", "GBP"].choose(rng).unwrap(),
        Region::Asia => *["JPY", "USD"].choose(rng).unwrap(),
        _ => "USD",
    };
    let rating = *[Rating::AAA, Rating::AA, Rating::A, Rating::A, Rating::BBB, Rating::BBB, Rating::NIG, Rating::NotRated]
        .choose(rng)
        .unwrap();
    let sector = if rng.gen_bool(0.2) { Sector::Banking } else { Sector::NonBanking };
    let seniority = match rng.gen_range(0..20) {
        0 => Seniority::Subordinated,
        1 => Seniority::SeniorSecured,
        _ => Seniority::Senior,
    };
    EntityMeta::new(format!("E{k:04}"), format!("Synthetic Entity {k}"))
        .expect("nonempty id")
        .with_region(region)
        .with_sector(sector)
        .with_currency(currency)
        .with_rating(rating)
        .with_seniority(seniority)
}

/// Quoted values are rounded to 4 decimals in bp, as written to CSV.
fn round_bp(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

pub fn generate(cfg: &SynthConfig) -> Result<(Vec<CdsCurve>, SynthManifest)> {
    let months = months_between(cfg.first_month, cfg.last_month);
    if months.is_empty() || cfg.entities == 0 {
        return Err(Error::Usage("synthetic set needs at least one month and one entity".into()));
    }
    if cfg.violations > cfg.curves {
        return Err(Error::Usage("more violations than curves".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let entities: Vec<EntityMeta> = (0..cfg.entities).map(|k| random_entity(&mut rng, k)).collect();
    let standard: Vec<(Tenor, Tenor)> = {
        let t = Tenor::CANONICAL;
        vec![(t[0], t[1]), (t[1], t[2]), (t[2], t[5]), (t[5], t[7])]
    };
    let pair_tenors: BTreeSet<Tenor> = standard.iter().flat_map(|&(a, b)| [a, b]).collect();

    let mut seen = BTreeSet::new();
    let mut curves = Vec::with_capacity(cfg.curves);
    for k in 0..cfg.curves {
        // Months are covered round-robin, so the first and last month are never empty.
        let (y, m) = months[k % months.len()];
        let (as_of, entity) = loop {
            let day = rng.gen_range(1..=days_in_month(y, m));
            let date = NaiveDate::from_ymd_opt(y, m, day).unwrap();
            let e = &entities[rng.gen_range(0..entities.len())];
            if seen.insert((date, e.entity_id.clone())) {
                break (date, e.clone());
            }
        };
        let level = base_spread_bp(entity.rating) * rng.gen_range(0.5..2.0);
        let steep = rng.gen_range(0.0..0.8);
        let gappy = rng.gen_bool(0.1);
        let quotes: Vec<(Tenor, f64)> = Tenor::CANONICAL
            .iter()
            .filter(|t| !gappy || pair_tenors.contains(t))
            .map(|&t| {
                let x = t.years() / 10.0;
                (t, round_bp(level * (1.0 + steep * x.sqrt())))
            })
            .collect();
        curves.push(CdsCurve::from_bp(as_of, entity, &quotes)?);
    }

    let mut targets: Vec<usize> = (0..cfg.curves).collect();
    targets.shuffle(&mut rng);
    targets.truncate(cfg.violations);
    targets.sort_unstable();
    let mut plants = Vec::with_capacity(cfg.violations);
    for &i in &targets {
        let (t1, t2) = standard[rng.gen_range(0..standard.len())];
        let factor = rng.gen_range(1.05..1.8);
        let c = &curves[i];
        let s2 = c.spread(t2).expect("standard tenors are always quoted") * 1e4;
        let s1 = round_bp(factor * s2 * t2.years() / t1.years());
        let planted = c.with_spread(t1, s1 * 1e-4)?;
        let (as_of, entity_id) = (c.as_of(), c.entity().entity_id.clone());
        curves[i] = planted;
        plants.push(Plant {
            as_of,
            entity_id,
            tenor_short: t1,
            tenor_long: t2,
            factor,
        });
    }

    let manifest = manifest(cfg, &curves, plants);
    Ok((curves, manifest))
}

fn manifest(cfg: &SynthConfig, curves: &[CdsCurve], mut plants: Vec<Plant>) -> SynthManifest {
    plants.sort_by(|a, b| (a.as_of, &a.entity_id).cmp(&(b.as_of, &b.entity_id)));
    let meta = |p: &Plant| {
        curves
            .iter()
            .find(|c| c.as_of() == p.as_of && c.entity().entity_id == p.entity_id)
            .map(|c| c.entity().clone())
            .expect("planted curve exists")
    };
    let mut m = SynthManifest {
        seed: cfg.seed,
        curves: curves.len(),
        total: plants.len(),
        by_pair: BTreeMap::new(),
        by_month: BTreeMap::new(),
        by_rating: BTreeMap::new(),
        by_region: BTreeMap::new(),
        by_sector: BTreeMap::new(),
        by_currency: BTreeMap::new(),
        by_seniority: BTreeMap::new(),
        plants: Vec::new(),
    };
    for p in &plants {
        let e = meta(p);
        let bump = |map: &mut BTreeMap<String, usize>, k: String| *map.entry(k).or_insert(0) += 1;
        bump(&mut m.by_pair, super::pair_label(p.tenor_short, p.tenor_long));
        bump(&mut m.by_month, super::month_label(p.as_of));
        bump(&mut m.by_rating, e.rating.to_string());
        bump(&mut m.by_region, e.region.to_string());
        bump(&mut m.by_sector, e.sector.to_string());
        bump(&mut m.by_currency, e.currency.clone());
        bump(&mut m.by_seniority, e.seniority.to_string());
    }
    m.plants = plants;
    m
}
