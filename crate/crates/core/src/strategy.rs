//! The three-date toy model, CDS mark-to-market, the paired inversion trade
//! and its rate and credit sensitivities.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CdsCurve, DiscountCurve, PaymentSchedule, RecoverySpec, Tenor};
use crate::error::{Error, Result};
use crate::survival::{
    bootstrap_hazards_with, contract_schedule, premium_annuity, protection_leg, BootstrapOptions,
    PremiumAccrual, SurvivalCurve,
};

/// Period in which the entity defaults in the toy model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefaultPeriod {
    One,
    Two,
    Three,
    Never,
}

impl DefaultPeriod {
    pub const ALL: [DefaultPeriod; 4] = [Self::One, Self::Two, Self::Three, Self::Never];

    fn after(self, k: u8) -> bool {
        match self {
            Self::One => k < 1,
            Self::Two => k < 2,
            Self::Three => k < 3,
            Self::Never => true,
        }
    }
}

/// Accumulated cash at `t = 3` from selling 1-period protection at `s1` and
/// buying 2-period protection at `s2`, both effective at `t = 1`, zero rates.
pub fn three_period_payoff<T>(s1: T, s2: T, tau: DefaultPeriod, recovery3: T) -> T
where
    T: Num + Copy,
{
    let ind = |b: bool| if b { T::one() } else { T::zero() };
    (s1 - s2) * ind(tau.after(1)) - s2 * ind(tau.after(2))
        + (T::one() - recovery3) * ind(tau == DefaultPeriod::Three)
}

/// Fair `(s1, s2)` in the toy model with per-period conditional default
/// probability `lambda` and LGDs `l2`, `l3` at `t = 2, 3`.
pub fn three_period_fair_spreads<T>(lambda: T, l2: T, l3: T) -> Result<(T, T)>
where
    T: Num + Copy + PartialOrd + fmt::Debug,
{
    let one = T::one();
    if lambda < T::zero() || lambda >= one {
        return Err(Error::domain(format!("lambda must lie in [0, 1), got {lambda:?}")));
    }
    for l in [l2, l3] {
        if l <= T::zero() || l > one {
            return Err(Error::domain(format!("LGD must lie in (0, 1], got {l:?}")));
        }
    }
    let two = one + one;
    let s1 = l2 * lambda;
    let s2 = lambda * (l2 + (one - lambda) * l3) / (two - lambda);
    Ok((s1, s2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    LongProtection,
    ShortProtection,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::LongProtection => 1.0,
            Direction::ShortProtection => -1.0,
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "long" | "long_protection" | "buy" => Ok(Direction::LongProtection),
            "short" | "short_protection" | "sell" => Ok(Direction::ShortProtection),
            other => Err(Error::Usage(format!("unknown direction '{other}'"))),
        }
    }
}

/// A single-name CDS. Protection runs over the schedule's span.
#[derive(Debug, Clone)]
pub struct CdsPosition {
    pub direction: Direction,
    pub notional: f64,
    pub contract_spread: f64,
    pub schedule: PaymentSchedule,
    pub recovery: RecoverySpec,
    pub accrual: PremiumAccrual,
}

impl CdsPosition {
    pub fn new(
        direction: Direction,
        notional: f64,
        contract_spread: f64,
        schedule: PaymentSchedule,
        recovery: RecoverySpec,
    ) -> Result<Self> {
        if !(notional >= 0.0) || !notional.is_finite() {
            return Err(Error::domain(format!("notional must be finite and >= 0, got {notional}")));
        }
        if !contract_spread.is_finite() {
            return Err(Error::domain("contract spread must be finite"));
        }
        if schedule.num_periods() == 0 {
            return Err(Error::domain("position schedule has no payment dates"));
        }
        Ok(Self {
            direction,
            notional,
            contract_spread,
            schedule,
            recovery,
            accrual: PremiumAccrual::ToDefault,
        })
    }

    pub fn start(&self) -> f64 {
        self.schedule.start()
    }

    pub fn maturity(&self) -> f64 {
        self.schedule.end()
    }

    /// The same contract seen `elapsed` years later; `None` once matured.
    pub fn rolled(&self, elapsed: f64) -> Option<Self> {
        let schedule = self.schedule.rolled(elapsed)?;
        Some(Self {
            schedule,
            ..self.clone()
        })
    }
}

/// Short protection at the shorter maturity, long protection at the longer.
#[derive(Debug, Clone)]
pub struct PairedTrade {
    short_leg: CdsPosition,
    long_leg: CdsPosition,
}

impl PairedTrade {
    pub fn new(short_leg: CdsPosition, long_leg: CdsPosition) -> Result<Self> {
        if short_leg.direction != Direction::ShortProtection || long_leg.direction != Direction::LongProtection {
            return Err(Error::domain("paired trade sells the short maturity and buys the long one"));
        }
        if short_leg.notional != long_leg.notional {
            return Err(Error::domain("paired trade legs must share one notional"));
        }
        if (short_leg.start() - long_leg.start()).abs() > 1e-12 {
            return Err(Error::domain("paired trade legs must share one effective date"));
        }
        if !(short_leg.maturity() < long_leg.maturity()) {
            return Err(Error::domain("short leg must mature before the long leg"));
        }
        Ok(Self { short_leg, long_leg })
    }

    /// Legs struck at the curve's quotes for `t1 < t2`.
    pub fn from_curve(
        curve: &CdsCurve,
        t1: Tenor,
        t2: Tenor,
        notional: f64,
        recovery: RecoverySpec,
        freq: u32,
    ) -> Result<Self> {
        let start = curve.effective_start();
        let leg = |tenor: Tenor, direction| -> Result<CdsPosition> {
            let spread = curve
                .spread(tenor)
                .ok_or_else(|| Error::domain(format!("tenor {tenor} not on curve")))?;
            let sched = contract_schedule(start, tenor.years(), freq)?;
            CdsPosition::new(direction, notional, spread, sched, recovery.clone())
        };
        Self::new(leg(t1, Direction::ShortProtection)?, leg(t2, Direction::LongProtection)?)
    }

    pub fn short_leg(&self) -> &CdsPosition {
        &self.short_leg
    }

    pub fn long_leg(&self) -> &CdsPosition {
        &self.long_leg
    }
}

/// Present value of `pos`: `±notional (protection - spread · premium annuity)`.
pub fn cds_mtm(pos: &CdsPosition, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64> {
    if pos.notional == 0.0 {
        return Ok(0.0);
    }
    let prot = protection_leg(d, s, &pos.recovery, pos.start(), pos.maturity())?;
    let annuity = premium_annuity(d, s, &pos.schedule, pos.accrual)?;
    Ok(pos.direction.sign() * pos.notional * (prot - pos.contract_spread * annuity))
}

pub fn paired_trade_mtm(trade: &PairedTrade, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64> {
    Ok(cds_mtm(&trade.short_leg, d, s)? + cds_mtm(&trade.long_leg, d, s)?)
}

/// Anything priced off a discount curve and a survival curve.
pub trait Instrument {
    fn mtm(&self, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64>;
}

impl Instrument for CdsPosition {
    fn mtm(&self, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64> {
        cds_mtm(self, d, s)
    }
}

impl Instrument for PairedTrade {
    fn mtm(&self, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64> {
        paired_trade_mtm(self, d, s)
    }
}

/// Quoted market state; survival is always bootstrapped from the quotes.
#[derive(Debug, Clone)]
pub struct Market {
    pub discount: DiscountCurve,
    pub quotes: CdsCurve,
    pub recovery: RecoverySpec,
    pub bootstrap: BootstrapOptions,
}

impl Market {
    pub fn new(discount: DiscountCurve, quotes: CdsCurve, recovery: RecoverySpec) -> Self {
        Self {
            discount,
            quotes,
            recovery,
            bootstrap: BootstrapOptions::default(),
        }
    }

    pub fn survival(&self) -> Result<SurvivalCurve> {
        bootstrap_hazards_with(&self.quotes, &self.discount, &self.recovery, &self.bootstrap)
    }

    pub fn value<I: Instrument + ?Sized>(&self, inst: &I) -> Result<f64> {
        inst.mtm(&self.discount, &self.survival()?)
    }

    fn with_discount(&self, discount: DiscountCurve) -> Self {
        Self {
            discount,
            ..self.clone()
        }
    }

    fn with_quotes(&self, quotes: CdsCurve) -> Self {
        Self {
            quotes,
            ..self.clone()
        }
    }
}

/// `V(r + 1bp, s) - V(r, s)` with zero rates shifted in parallel and survival
/// re-bootstrapped from the unchanged quotes.
pub fn dv01<I: Instrument + ?Sized>(inst: &I, market: &Market) -> Result<f64> {
    dv01_bump(inst, market, 1.0)
}

pub fn dv01_bump<I: Instrument + ?Sized>(inst: &I, market: &Market, bump_bp: f64) -> Result<f64> {
    let bumped = market.with_discount(market.discount.shifted_bp(bump_bp));
    Ok(bumped.value(inst)? - market.value(inst)?)
}

/// `V(r, s + 1bp) - V(r, s)` with every quote shifted in parallel.
pub fn cr01<I: Instrument + ?Sized>(inst: &I, market: &Market) -> Result<f64> {
    cr01_bump(inst, market, 1.0)
}

pub fn cr01_bump<I: Instrument + ?Sized>(inst: &I, market: &Market, bump_bp: f64) -> Result<f64> {
    let bumped = market.with_quotes(market.quotes.shifted_bp(bump_bp)?);
    Ok(bumped.value(inst)? - market.value(inst)?)
}

/// Value of a paired trade on one replay date.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayRow {
    pub date: NaiveDate,
    pub mtm: f64,
    pub dv01: f64,
    pub cr01: f64,
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub notional: f64,
    pub recovery: RecoverySpec,
    pub freq: u32,
    /// Applied on every date; zero rates by default.
    pub discount: DiscountCurve,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            notional: 10_000_000.0,
            recovery: RecoverySpec::default(),
            freq: 4,
            discount: DiscountCurve::flat(0.0, 40.0).expect("flat curve"),
        }
    }
}

/// Enters the `(t1, t2)` paired trade at the quotes of the earliest curve in
/// `path` and revalues it on every date. Time elapses on ACT/365.25. Legs that
/// have matured drop out; dates whose quotes cannot be bootstrapped fail.
pub fn replay(path: &[CdsCurve], t1: Tenor, t2: Tenor, opts: &ReplayOptions) -> Result<Vec<ReplayRow>> {
    let mut path: Vec<&CdsCurve> = path.iter().collect();
    path.sort_by_key(|c| c.as_of());
    let Some(first) = path.first() else {
        return Ok(Vec::new());
    };
    if let Some(w) = path.windows(2).find(|w| w[0].as_of() == w[1].as_of()) {
        return Err(Error::domain(format!("replay path has two curves on {}", w[0].as_of())));
    }
    let entity = &first.entity().entity_id;
    if let Some(c) = path.iter().find(|c| &c.entity().entity_id != entity) {
        return Err(Error::domain(format!(
            "replay path mixes entities {entity} and {}",
            c.entity().entity_id
        )));
    }
    let inception = first.as_of();
    let trade = PairedTrade::from_curve(first, t1, t2, opts.notional, opts.recovery.clone(), opts.freq)?;

    path.par_iter()
        .map(|curve| {
            let elapsed = (curve.as_of() - inception).num_days() as f64 / 365.25;
            let legs: Vec<CdsPosition> = [trade.short_leg(), trade.long_leg()]
                .into_iter()
                .filter_map(|leg| leg.rolled(elapsed))
                .collect();
            let market = Market {
                bootstrap: BootstrapOptions::with_freq(opts.freq),
                ..Market::new(opts.discount.clone(), (*curve).clone(), opts.recovery.clone())
            };
            let legs = legs.as_slice();
            Ok(ReplayRow {
                date: curve.as_of(),
                mtm: market.value(legs)?,
                dv01: dv01(legs, &market)?,
                cr01: cr01(legs, &market)?,
            })
        })
        .collect()
}

impl Instrument for [CdsPosition] {
    fn mtm(&self, d: &DiscountCurve, s: &SurvivalCurve) -> Result<f64> {
        self.iter().map(|p| cds_mtm(p, d, s)).sum()
    }
}

/// Columns `date,mtm,dv01,cr01`.
pub fn replay_csv(rows: &[ReplayRow]) -> String {
    let mut out = String::from("date,mtm,dv01,cr01\n");
    for r in rows {
        out.push_str(&format!("{},{:.4},{:.4},{:.4}\n", r.date, tidy(r.mtm), tidy(r.dv01), tidy(r.cr01)));
    }
    out
}

/// Rounding noise around zero would otherwise print as `-0.0000`.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-5 {
        0.0
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survival::fair_spread_discrete;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn payoff_examples() {
        use DefaultPeriod::*;
        assert_eq!(three_period_payoff(0.03, 0.01, One, 0.4), 0.0);
        assert_abs_diff_eq!(three_period_payoff(0.03, 0.01, Two, 0.4), 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(three_period_payoff(0.03, 0.01, Three, 0.4), 0.61, epsilon = 1e-15);
        assert_abs_diff_eq!(three_period_payoff(0.03, 0.01, Never, 0.4), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn fair_spread_examples() {
        let (s1, s2) = three_period_fair_spreads(0.1, 0.6, 0.6).unwrap();
        assert_abs_diff_eq!(s1, 0.06, epsilon = 1e-15);
        assert_abs_diff_eq!(s2, 0.06, epsilon = 1e-15);
        assert_eq!(three_period_fair_spreads(0.0, 0.6, 0.6).unwrap(), (0.0, 0.0));
        let (s1, s2) = three_period_fair_spreads(0.2, 0.5, 0.8).unwrap();
        assert_abs_diff_eq!(s1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(s2, 0.126667, epsilon = 1e-6);
        assert!(three_period_fair_spreads(1.0, 0.5, 0.5).is_err());
        assert!(three_period_fair_spreads(-0.1, 0.5, 0.5).is_err());
        assert!(three_period_fair_spreads(0.1, 0.0, 0.5).is_err());
    }

    fn flat_position(direction: Direction, contract: f64) -> CdsPosition {
        let sched = PaymentSchedule::regular(0.0, 5.0, 4).unwrap();
        CdsPosition::new(direction, 10_000_000.0, contract, sched, RecoverySpec::Constant(0.6)).unwrap()
    }

    #[test]
    fn mtm_examples() {
        let d = DiscountCurve::flat(0.0, 30.0).unwrap();
        let s = SurvivalCurve::flat(0.01, 30.0).unwrap();
        let pos = flat_position(Direction::LongProtection, 0.005);
        let pv = cds_mtm(&pos, &d, &s).unwrap();
        let ad = (1.0 - (-0.05f64).exp()) / 0.01;
        assert_relative_eq!(pv, 0.001 * ad * 1e7, max_relative = 1e-9);
        assert_relative_eq!(pv, 48_770.0, max_relative = 1e-2);

        let fair = fair_spread_discrete(&d, &s, &pos.recovery, &pos.schedule).unwrap();
        let at_fair = flat_position(Direction::LongProtection, fair);
        assert!(cds_mtm(&at_fair, &d, &s).unwrap().abs() < 1e-9 * 1e7);

        let short = flat_position(Direction::ShortProtection, 0.005);
        assert_abs_diff_eq!(pv + cds_mtm(&short, &d, &s).unwrap(), 0.0, epsilon = 1e-6);

        let zero = CdsPosition { notional: 0.0, ..pos };
        assert_eq!(cds_mtm(&zero, &d, &s).unwrap(), 0.0);
    }

    #[test]
    fn paired_trade_validation() {
        let short = flat_position(Direction::ShortProtection, 0.01);
        let long_sched = PaymentSchedule::regular(0.0, 10.0, 4).unwrap();
        let long = CdsPosition::new(Direction::LongProtection, 1e7, 0.005, long_sched, RecoverySpec::default()).unwrap();
        assert!(PairedTrade::new(short.clone(), long.clone()).is_ok());
        assert!(PairedTrade::new(long.clone(), short.clone()).is_err());
        let other = CdsPosition { notional: 5e6, ..long };
        assert!(PairedTrade::new(short, other).is_err());
    }

    #[test]
    fn rolling_drops_matured_legs() {
        let pos = flat_position(Direction::LongProtection, 0.01);
        let aged = pos.rolled(1.1).unwrap();
        assert_abs_diff_eq!(aged.maturity(), 3.9, epsilon = 1e-12);
        assert_eq!(aged.start(), 0.0);
        assert!(pos.rolled(5.0).is_none());
    }

    #[test]
    fn replay_csv_format() {
        let rows = vec![ReplayRow {
            date: NaiveDate::from_ymd_opt(2008, 12, 3).unwrap(),
            mtm: 0.0,
            dv01: -1.5,
            cr01: 3900.123456,
        }];
        assert_eq!(replay_csv(&rows), "date,mtm,dv01,cr01\n2008-12-03,0.0000,-1.5000,3900.1235\n");
    }
}
