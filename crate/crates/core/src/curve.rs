//! Domain types shared by every analytic: tenors, quotes, CDS curves, entity
//! metadata, discount curves, payment schedules and loss-given-default specs.
//!
//! All types are immutable after construction. Times are year fractions measured
//! from the quote date; calendar dates only appear on [`CdsCurve::as_of`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two times closer than this are treated as the same node.
pub(crate) const TIME_EPS: f64 = 1e-10;

/// A contract maturity held as a whole number of months so that tenors
/// compare exactly (6m, 1y, ..., 10y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tenor(u32);

impl Tenor {
    /// The eight maturities quoted on a standard curve.
    pub const CANONICAL: [Tenor; 8] = [
        Tenor(6),
        Tenor(12),
        Tenor(24),
        Tenor(36),
        Tenor(48),
        Tenor(60),
        Tenor(84),
        Tenor(120),
    ];

    pub fn from_months(months: u32) -> Result<Self> {
        if months == 0 {
            return Err(Error::domain("tenor must be positive"));
        }
        Ok(Tenor(months))
    }

    /// Accepts year fractions that are a whole number of months (0.5, 1, 7, 0.25...).
    pub fn from_years(years: f64) -> Result<Self> {
        if !years.is_finite() || years <= 0.0 {
            return Err(Error::domain(format!("tenor must be positive, got {years}")));
        }
        let months = years * 12.0;
        let rounded = months.round();
        if (months - rounded).abs() > 1e-6 {
            return Err(Error::domain(format!(
                "tenor {years}y is not a whole number of months"
            )));
        }
        Tenor::from_months(rounded as u32)
    }

    pub fn months(self) -> u32 {
        self.0
    }

    pub fn years(self) -> f64 {
        f64::from(self.0) / 12.0
    }
}

impl fmt::Display for Tenor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 12 == 0 {
            write!(f, "{}y", self.0 / 12)
        } else {
            write!(f, "{}m", self.0)
        }
    }
}

impl FromStr for Tenor {
    type Err = Error;

    /// Parses `6m`, `10y` or a bare number of years (`0.5`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("cannot parse tenor '{s}'"));
        if let Some(m) = s.strip_suffix(['m', 'M']) {
            return Tenor::from_months(m.trim().parse().map_err(|_| bad())?);
        }
        let y = s.strip_suffix(['y', 'Y']).unwrap_or(s);
        Tenor::from_years(y.trim().parse().map_err(|_| bad())?)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuoteKind {
    #[default]
    Mid,
    Bid,
    Ask,
}

impl FromStr for QuoteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mid" | "" => Ok(QuoteKind::Mid),
            "bid" => Ok(QuoteKind::Bid),
            "ask" => Ok(QuoteKind::Ask),
            other => Err(Error::domain(format!("unknown quote kind '{other}'"))),
        }
    }
}

impl fmt::Display for QuoteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuoteKind::Mid => "mid",
            QuoteKind::Bid => "bid",
            QuoteKind::Ask => "ask",
        })
    }
}

/// One running spread, stored as a decimal per-annum rate (89.53bp = 0.008953).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdsQuote {
    pub tenor: Tenor,
    pub spread: f64,
    pub kind: QuoteKind,
}

impl CdsQuote {
    pub fn new(tenor: Tenor, spread: f64, kind: QuoteKind) -> Result<Self> {
        if !spread.is_finite() || spread < 0.0 {
            return Err(Error::domain(format!("spread must be >= 0, got {spread}")));
        }
        Ok(Self { tenor, spread, kind })
    }

    pub fn mid_bp(tenor: Tenor, spread_bp: f64) -> Result<Self> {
        Self::new(tenor, spread_bp * 1e-4, QuoteKind::Mid)
    }

    pub fn spread_bp(&self) -> f64 {
        self.spread * 1e4
    }
}

macro_rules! label_enum {
    ($name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        impl $name {
            pub fn label(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Asia,
    Europe,
    NorthAmerica,
    Other,
}
label_enum!(Region { Asia => "Asia", Europe => "Europe", NorthAmerica => "NorthAmerica", Other => "Other" });

impl Region {
    /// Unrecognised names map to `Other`; the flag reports whether that happened.
    pub fn parse_lenient(s: &str) -> (Self, bool) {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "asia" => (Region::Asia, true),
            "europe" => (Region::Europe, true),
            "northamerica" | "na" => (Region::NorthAmerica, true),
            "other" => (Region::Other, true),
            _ => (Region::Other, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    Banking,
    NonBanking,
}
label_enum!(Sector { Banking => "Banking", NonBanking => "NonBanking" });

impl Sector {
    pub fn parse_lenient(s: &str) -> (Self, bool) {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "banking" | "bank" | "banks" => (Sector::Banking, true),
            "nonbanking" => (Sector::NonBanking, true),
            _ => (Sector::NonBanking, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rating {
    AAA,
    AA,
    A,
    BBB,
    NIG,
    NotRated,
}
label_enum!(Rating { AAA => "AAA", AA => "AA", A => "A", BBB => "BBB", NIG => "NIG", NotRated => "NotRated" });

impl Rating {
    /// Unknown strings fall into the not-rated bucket.
    pub fn parse_lenient(s: &str) -> Self {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "AAA" => Rating::AAA,
            "AA" => Rating::AA,
            "A" => Rating::A,
            "BBB" => Rating::BBB,
            "NIG" | "BB" | "B" | "CCC" | "CC" | "C" | "D" => Rating::NIG,
            _ => Rating::NotRated,
        }
    }

    pub fn is_investment_grade(self) -> bool {
        matches!(self, Rating::AAA | Rating::AA | Rating::A | Rating::BBB)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Seniority {
    Senior,
    SeniorSecured,
    Subordinated,
}
label_enum!(Seniority { Senior => "Senior", SeniorSecured => "SeniorSecured", Subordinated => "Subordinated" });

impl FromStr for Seniority {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "senior" | "snr" | "seniorunsecured" => Ok(Seniority::Senior),
            "seniorsecured" | "secdom" => Ok(Seniority::SeniorSecured),
            "subordinated" | "sub" | "junior" => Ok(Seniority::Subordinated),
            _ => Err(Error::domain(format!("unknown seniority '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMeta {
    pub entity_id: String,
    pub name: String,
    pub region: Region,
    pub sector: Sector,
    pub currency: String,
    pub rating: Rating,
    pub seniority: Seniority,
}

impl EntityMeta {
    pub fn new(entity_id: impl Into<String>, name: impl Into<String>) -> Result<Self> {
        let entity_id = entity_id.into();
        if entity_id.trim().is_empty() {
            return Err(Error::domain("entity_id must be nonempty"));
        }
        Ok(Self {
            entity_id,
            name: name.into(),
            region: Region::Other,
            sector: Sector::NonBanking,
            currency: "USD".to_string(),
            rating: Rating::NotRated,
            seniority: Seniority::Senior,
        })
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn with_currency(mut self, currency: impl Into<String>) -> Self {
        self.currency = currency.into();
        self
    }

    pub fn with_rating(mut self, rating: Rating) -> Self {
        self.rating = rating;
        self
    }

    pub fn with_seniority(mut self, seniority: Seniority) -> Self {
        self.seniority = seniority;
        self
    }
}

/// Co-initial quotes on one entity observed on one date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdsCurve {
    as_of: NaiveDate,
    effective_start: f64,
    entity: EntityMeta,
    quotes: Vec<CdsQuote>,
}

impl CdsCurve {
    /// Quotes must be strictly increasing in tenor, share one quote kind and
    /// mature after `effective_start`.
    pub fn new(
        as_of: NaiveDate,
        effective_start: f64,
        entity: EntityMeta,
        quotes: Vec<CdsQuote>,
    ) -> Result<Self> {
        if !effective_start.is_finite() || effective_start < 0.0 {
            return Err(Error::InvalidCurve(format!(
                "effective start must be >= 0, got {effective_start}"
            )));
        }
        if entity.entity_id.trim().is_empty() {
            return Err(Error::InvalidCurve("entity_id must be nonempty".into()));
        }
        for w in quotes.windows(2) {
            if w[1].tenor <= w[0].tenor {
                return Err(Error::InvalidCurve(format!(
                    "{}: tenors must be strictly increasing ({} then {})",
                    entity.entity_id, w[0].tenor, w[1].tenor
                )));
            }
            if w[1].kind != w[0].kind {
                return Err(Error::InvalidCurve(format!(
                    "{}: mixed quote kinds on one curve",
                    entity.entity_id
                )));
            }
        }
        if let Some(q) = quotes.iter().find(|q| q.tenor.years() <= effective_start) {
            return Err(Error::InvalidCurve(format!(
                "{}: tenor {} does not mature after the effective start {effective_start}",
                entity.entity_id, q.tenor
            )));
        }
        Ok(Self {
            as_of,
            effective_start,
            entity,
            quotes,
        })
    }

    /// Spot-starting curve from `(tenor, spread in bp)` mid quotes in any order.
    pub fn from_bp(as_of: NaiveDate, entity: EntityMeta, quotes_bp: &[(Tenor, f64)]) -> Result<Self> {
        let mut quotes = quotes_bp
            .iter()
            .map(|&(t, bp)| CdsQuote::mid_bp(t, bp))
            .collect::<Result<Vec<_>>>()?;
        quotes.sort_by_key(|q| q.tenor);
        Self::new(as_of, 0.0, entity, quotes)
    }

    pub fn as_of(&self) -> NaiveDate {
        self.as_of
    }

    pub fn effective_start(&self) -> f64 {
        self.effective_start
    }

    pub fn entity(&self) -> &EntityMeta {
        &self.entity
    }

    pub fn quotes(&self) -> &[CdsQuote] {
        &self.quotes
    }

    pub fn len(&self) -> usize {
        self.quotes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotes.is_empty()
    }

    pub fn quote(&self, tenor: Tenor) -> Option<&CdsQuote> {
        self.quotes
            .binary_search_by_key(&tenor, |q| q.tenor)
            .ok()
            .map(|i| &self.quotes[i])
    }

    pub fn spread(&self, tenor: Tenor) -> Option<f64> {
        self.quote(tenor).map(|q| q.spread)
    }

    pub fn tenors(&self) -> impl Iterator<Item = Tenor> + '_ {
        self.quotes.iter().map(|q| q.tenor)
    }

    /// Same curve with every spread shifted by `bp` basis points.
    pub fn shifted_bp(&self, bp: f64) -> Result<Self> {
        let quotes = self
            .quotes
            .iter()
            .map(|q| CdsQuote::new(q.tenor, q.spread + bp * 1e-4, q.kind))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            quotes,
            ..self.clone()
        })
    }

    /// Same curve with every spread multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let quotes = self
            .quotes
            .iter()
            .map(|q| CdsQuote::new(q.tenor, q.spread * factor, q.kind))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            quotes,
            ..self.clone()
        })
    }

    pub fn with_spread(&self, tenor: Tenor, spread: f64) -> Result<Self> {
        let mut out = self.clone();
        let q = out
            .quotes
            .iter_mut()
            .find(|q| q.tenor == tenor)
            .ok_or_else(|| Error::domain(format!("tenor {tenor} not on curve")))?;
        *q = CdsQuote::new(tenor, spread, q.kind)?;
        Ok(out)
    }
}

/// Risk-free discount factors `P(0,t)` at pillars, log-linear in between.
///
/// Pillar values need not decrease: negative rates are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    times: Vec<f64>,
    log_dfs: Vec<f64>,
}

impl DiscountCurve {
    /// `(0, 1)` is implicit; an explicit pillar at 0 must equal 1.
    pub fn new(pillars: &[(f64, f64)]) -> Result<Self> {
        let mut times = vec![0.0];
        let mut log_dfs = vec![0.0];
        for &(t, p) in pillars {
            if !t.is_finite() || !p.is_finite() {
                return Err(Error::InvalidCurve("non-finite discount pillar".into()));
            }
            if p <= 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "discount factor must be > 0, got P({t}) = {p}"
                )));
            }
            if t == 0.0 {
                if (p - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidCurve(format!("P(0) must be 1, got {p}")));
                }
                if times.len() > 1 {
                    return Err(Error::InvalidCurve("pillar times must be strictly increasing".into()));
                }
                continue;
            }
            let last = *times.last().unwrap();
            if t <= last {
                return Err(Error::InvalidCurve(format!(
                    "pillar times must be strictly increasing ({last} then {t})"
                )));
            }
            times.push(t);
            log_dfs.push(p.ln());
        }
        if times.len() < 2 {
            return Err(Error::InvalidCurve("discount curve needs at least one pillar beyond 0".into()));
        }
        Ok(Self { times, log_dfs })
    }

    /// Flat continuously-compounded rate out to `horizon`.
    pub fn flat(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(&[(horizon, (-rate * horizon).exp())])
    }

    /// Continuously-compounded zero rates at the given times.
    pub fn from_zero_rates(points: &[(f64, f64)]) -> Result<Self> {
        let pillars: Vec<_> = points.iter().map(|&(t, r)| (t, (-r * t).exp())).collect();
        Self::new(&pillars)
    }

    pub fn max_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Pillar times including the implicit 0.
    pub fn pillar_times(&self) -> &[f64] {
        &self.times
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.log_dfs)
            .map(|(&t, &l)| (t, l.exp()))
    }

    pub fn ln_discount_factor(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("discount time must be >= 0, got {t}")));
        }
        let max = self.max_time();
        if t > max + TIME_EPS {
            return Err(Error::Extrapolation { t, max });
        }
        let t = t.min(max);
        let i = self.times.partition_point(|&x| x < t);
        if i < self.times.len() && self.times[i] == t {
            return Ok(self.log_dfs[i]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (l0, l1) = (self.log_dfs[i - 1], self.log_dfs[i]);
        let w = (t - t0) / (t1 - t0);
        Ok(l0 + w * (l1 - l0))
    }

    pub fn discount_factor(&self, t: f64) -> Result<f64> {
        self.ln_discount_factor(t).map(f64::exp)
    }

    /// Continuously-compounded zero rate `-ln P(t) / t`; the short end uses the
    /// first segment's forward rate.
    pub fn zero_rate(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(-self.log_dfs[1] / self.times[1]);
        }
        Ok(-self.ln_discount_factor(t)? / t)
    }

    /// Parallel shift of the zero rates: `P(t) -> P(t) exp(-shift t)`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            times: self.times.clone(),
            log_dfs: self
                .times
                .iter()
                .zip(&self.log_dfs)
                .map(|(&t, &l)| l - shift * t)
                .collect(),
        }
    }

    pub fn shifted_bp(&self, bp: f64) -> Self {
        self.shifted(bp * 1e-4)
    }

    /// True if no pillar-to-pillar forward rate is negative.
    pub fn has_nonnegative_rates(&self) -> bool {
        self.log_dfs.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Premium payment dates `t_0 = T0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaymentSchedule {
    dates: Vec<f64>,
}

impl PaymentSchedule {
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::domain("payment schedule needs at least its start date"));
        }
        if dates.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::domain("schedule dates must be finite and >= 0"));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("schedule dates must be strictly increasing"));
        }
        Ok(Self { dates })
    }

    /// `freq` payments per year from `start`, with a short final stub ending at `end`.
    pub fn regular(start: f64, end: f64, freq: u32) -> Result<Self> {
        if freq == 0 {
            return Err(Error::domain("payment frequency must be positive"));
        }
        if !(end > start) {
            return Err(Error::domain(format!("schedule end {end} must exceed start {start}")));
        }
        let step = 1.0 / f64::from(freq);
        let mut dates = vec![start];
        let mut k = 1u64;
        loop {
            let t = start + k as f64 * step;
            if t >= end - 1e-9 {
                break;
            }
            dates.push(t);
            k += 1;
        }
        dates.push(end);
        Ok(Self { dates })
    }

    /// Regular schedule that additionally pays on every date in `extra` inside (start, end).
    pub fn regular_with(start: f64, end: f64, freq: u32, extra: &[f64]) -> Result<Self> {
        let base = Self::regular(start, end, freq)?;
        let mut dates = base.dates;
        dates.extend(extra.iter().copied().filter(|&t| t > start && t < end));
        dates.sort_by(f64::total_cmp);
        dates.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        Ok(Self { dates })
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn start(&self) -> f64 {
        self.dates[0]
    }

    pub fn end(&self) -> f64 {
        *self.dates.last().unwrap()
    }

    pub fn num_periods(&self) -> usize {
        self.dates.len() - 1
    }

    /// Accrual periods `(t_{i-1}, t_i)`.
    pub fn periods(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.dates.windows(2).map(|w| (w[0], w[1]))
    }

    /// The schedule truncated to dates `<= end` (end must be one of the dates).
    pub fn prefix(&self, end: f64) -> Result<Self> {
        let n = self.dates.partition_point(|&t| t <= end + 1e-9);
        if n == 0 || (self.dates[n - 1] - end).abs() > 1e-9 {
            return Err(Error::domain(format!("{end} is not a payment date of the schedule")));
        }
        Ok(Self {
            dates: self.dates[..n].to_vec(),
        })
    }

    /// Remaining payments seen from `elapsed` years later; a period already
    /// under way accrues from the new origin. `None` once every date has passed.
    pub fn rolled(&self, elapsed: f64) -> Option<Self> {
        let shifted: Vec<f64> = self.dates.iter().map(|t| t - elapsed).collect();
        let first_future = shifted.iter().position(|&t| t > 1e-9)?;
        let mut dates = Vec::with_capacity(shifted.len() - first_future + 1);
        if first_future == 0 {
            dates.extend_from_slice(&shifted);
        } else {
            dates.push(shifted[first_future - 1].max(0.0));
            dates.extend_from_slice(&shifted[first_future..]);
        }
        Some(Self { dates })
    }
}

/// Deterministic loss-given-default `L(t)`.
#[derive(Clone)]
pub enum RecoverySpec {
    Constant(f64),
    /// `(t_end, L)` pieces: `L` applies on `(previous t_end, t_end]`; the last
    /// value continues beyond its end.
    Piecewise(Vec<(f64, f64)>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for RecoverySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecoverySpec::Constant(l) => f.debug_tuple("Constant").field(l).finish(),
            RecoverySpec::Piecewise(p) => f.debug_tuple("Piecewise").field(p).finish(),
            RecoverySpec::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl Default for RecoverySpec {
    /// 40% recovery.
    fn default() -> Self {
        RecoverySpec::Constant(0.6)
    }
}

impl RecoverySpec {
    pub const DEFAULT_RECOVERY: f64 = 0.4;

    pub fn constant_lgd(lgd: f64) -> Result<Self> {
        check_lgd(lgd)?;
        Ok(RecoverySpec::Constant(lgd))
    }

    pub fn from_recovery(recovery: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&recovery) {
            return Err(Error::domain(format!("recovery must lie in [0, 1), got {recovery}")));
        }
        Self::constant_lgd(1.0 - recovery)
    }

    pub fn piecewise(pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::domain("piecewise LGD needs at least one piece"));
        }
        if pieces.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::domain("piecewise LGD ends must be strictly increasing"));
        }
        for &(_, l) in &pieces {
            check_lgd(l)?;
        }
        Ok(RecoverySpec::Piecewise(pieces))
    }

    /// Arbitrary deterministic LGD; values are checked as they are used.
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RecoverySpec::Function(Arc::new(f))
    }

    pub fn lgd(&self, t: f64) -> f64 {
        match self {
            RecoverySpec::Constant(l) => *l,
            RecoverySpec::Piecewise(p) => p
                .iter()
                .find(|(end, _)| t <= *end)
                .unwrap_or_else(|| p.last().unwrap())
                .1,
            RecoverySpec::Function(f) => f(t),
        }
    }

    /// Points at which a piecewise LGD jumps; empty otherwise.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            RecoverySpec::Piecewise(p) => p.iter().map(|(t, _)| *t).collect(),
            _ => Vec::new(),
        }
    }

    /// Constant on every interval between breakpoints.
    pub(crate) fn is_piecewise_constant(&self) -> bool {
        !matches!(self, RecoverySpec::Function(_))
    }
}

fn check_lgd(l: f64) -> Result<()> {
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::domain(format!("LGD must lie in (0, 1], got {l}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_curve_matches_closed_form() {
        let d = DiscountCurve::flat(0.02, 30.0).unwrap();
        assert_abs_diff_eq!(d.discount_factor(1.0).unwrap(), (-0.02f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.discount_factor(1.0).unwrap(), 0.980199, epsilon = 1e-6);
        assert_eq!(d.discount_factor(0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_rate_log_linear() {
        let d = DiscountCurve::new(&[(1.0, 1.005)]).unwrap();
        let p = d.discount_factor(0.5).unwrap();
        assert_abs_diff_eq!(p, 1.005f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(p, 1.002497, epsilon = 1e-6);
        assert!(!d.has_nonnegative_rates());
    }

    #[test]
    fn extrapolation_is_an_error() {
        let d = DiscountCurve::flat(0.01, 5.0).unwrap();
        assert!(matches!(d.discount_factor(5.5), Err(Error::Extrapolation { .. })));
        assert!(d.discount_factor(-0.1).is_err());
    }

    #[test]
    fn pillars_reproduced_exactly() {
        let pillars = [(0.5, 0.99), (1.0, 0.97), (2.0, 0.975), (5.0, 0.9)];
        let d = DiscountCurve::new(&pillars).unwrap();
        for (t, p) in pillars {
            assert_abs_diff_eq!(d.discount_factor(t).unwrap(), p, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_pillars() {
        assert!(DiscountCurve::new(&[(1.0, 0.0)]).is_err());
        assert!(DiscountCurve::new(&[(1.0, 0.9), (1.0, 0.8)]).is_err());
        assert!(DiscountCurve::new(&[(0.0, 0.9), (1.0, 0.8)]).is_err());
        assert!(DiscountCurve::new(&[]).is_err());
    }

    #[test]
    fn tenor_parsing() {
        assert_eq!("6m".parse::<Tenor>().unwrap(), Tenor::CANONICAL[0]);
        assert_eq!("0.5".parse::<Tenor>().unwrap(), Tenor::CANONICAL[0]);
        assert_eq!("10y".parse::<Tenor>().unwrap().years(), 10.0);
        assert!(Tenor::from_years(0.1).is_err());
        assert!(Tenor::from_years(0.0).is_err());
        assert_eq!(Tenor::CANONICAL[6].to_string(), "7y");
        assert_eq!(Tenor::CANONICAL[0].to_string(), "6m");
    }

    #[test]
    fn regular_schedule_has_stub() {
        let s = PaymentSchedule::regular(0.0, 1.1, 4).unwrap();
        assert_eq!(s.dates(), &[0.0, 0.25, 0.5, 0.75, 1.0, 1.1]);
        let s = PaymentSchedule::regular(0.0, 1.0, 4).unwrap();
        assert_eq!(s.num_periods(), 4);
        assert!(PaymentSchedule::regular(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn rolled_schedule_drops_past_dates() {
        let s = PaymentSchedule::regular(0.0, 1.0, 4).unwrap();
        let r = s.rolled(0.3).unwrap();
        let expected = [0.0, 0.2, 0.45, 0.7];
        assert_eq!(r.dates().len(), expected.len());
        for (a, b) in r.dates().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(s.rolled(1.0).is_none());
    }

    #[test]
    fn curve_invariants() {
        let e = EntityMeta::new("X", "X Corp").unwrap();
        let d = NaiveDate::from_ymd_opt(2008, 12, 3).unwrap();
        let q = |m, bp| CdsQuote::mid_bp(Tenor::from_months(m).unwrap(), bp).unwrap();
        assert!(CdsCurve::new(d, 0.0, e.clone(), vec![q(12, 10.0), q(6, 10.0)]).is_err());
        assert!(CdsCurve::new(d, 1.0, e.clone(), vec![q(12, 10.0)]).is_err());
        let mixed = vec![q(6, 10.0), CdsQuote::new(Tenor::CANONICAL[1], 0.001, QuoteKind::Bid).unwrap()];
        assert!(CdsCurve::new(d, 0.0, e.clone(), mixed).is_err());
        assert!(EntityMeta::new("  ", "").is_err());
        assert!(CdsQuote::mid_bp(Tenor::CANONICAL[0], -1.0).is_err());
    }

    #[test]
    fn piecewise_lgd_lookup() {
        let r = RecoverySpec::piecewise(vec![(2.0, 0.5), (3.0, 0.8)]).unwrap();
        assert_eq!(r.lgd(1.5), 0.5);
        assert_eq!(r.lgd(2.0), 0.5);
        assert_eq!(r.lgd(2.5), 0.8);
        assert_eq!(r.lgd(9.0), 0.8);
        assert!(RecoverySpec::constant_lgd(0.0).is_err());
        assert!(RecoverySpec::from_recovery(1.0).is_err());
    }

    #[test]
    fn lenient_attribute_parsing() {
        assert_eq!(Rating::parse_lenient("bbb"), Rating::BBB);
        assert_eq!(Rating::parse_lenient("Baa2"), Rating::NotRated);
        assert_eq!(Region::parse_lenient("North America"), (Region::NorthAmerica, true));
        assert_eq!(Region::parse_lenient("Mars"), (Region::Other, false));
        assert_eq!(Sector::parse_lenient("Banking"), (Sector::Banking, true));
    }
}
