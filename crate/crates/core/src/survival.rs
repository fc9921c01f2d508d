//! Piecewise-constant hazard survival curves, fair CDS spreads and hazard
//! bootstrapping.
//!
//! Bootstrapped hazards are never clamped. A quoted curve that violates the
//! no-arbitrage ordering comes back with negative hazards and the
//! `pathological` flag set.

use serde::{Deserialize, Serialize};

use crate::annuity::defaultable_annuity;
use crate::curve::{CdsCurve, DiscountCurve, PaymentSchedule, RecoverySpec, TIME_EPS};
use crate::error::{Error, Result};
use crate::numerics::{brent, exp_segment, grid, one_minus_exp_over, RootOptions, DAILY_STEP};

/// `q(t) = exp(-Σ λ_i Δ_i)` with constant hazard `λ_i` on `(t_{i-1}, t_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    ends: Vec<f64>,
    hazards: Vec<f64>,
    /// Cumulative hazard at each segment end.
    cumulative: Vec<f64>,
    /// `Q` at each segment end.
    integrated: Vec<f64>,
    pathological: bool,
}

/// `1 - q(t2)/q(t1)`, flagged when it falls outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDefault {
    pub value: f64,
    pub nonsensical: bool,
}

impl SurvivalCurve {
    /// Segments are `(t_end, hazard)` with strictly increasing ends, starting from 0.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidCurve("survival curve needs at least one segment".into()));
        }
        let mut ends = Vec::with_capacity(segments.len());
        let mut hazards = Vec::with_capacity(segments.len());
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut integrated = Vec::with_capacity(segments.len());
        let (mut prev, mut h, mut q_int) = (0.0_f64, 0.0_f64, 0.0_f64);
        let mut pathological = false;
        for (end, lambda) in segments {
            if !end.is_finite() || !lambda.is_finite() {
                return Err(Error::InvalidCurve("non-finite survival segment".into()));
            }
            if end <= prev {
                return Err(Error::InvalidCurve(format!(
                    "segment ends must be strictly increasing from 0 ({prev} then {end})"
                )));
            }
            let width = end - prev;
            let cond = -(-lambda * width).exp_m1();
            pathological |= lambda < 0.0 || cond > 1.0;
            q_int += (-h).exp() * width * one_minus_exp_over(lambda * width);
            h += lambda * width;
            ends.push(end);
            hazards.push(lambda);
            cumulative.push(h);
            integrated.push(q_int);
            prev = end;
        }
        Ok(Self {
            ends,
            hazards,
            cumulative,
            integrated,
            pathological,
        })
    }

    pub fn flat(hazard: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![(horizon, hazard)])
    }

    /// Per-period conditional default probabilities `p` on unit periods
    /// `(k-1, k]`, mapped to hazards `-ln(1 - p)`.
    pub fn from_period_default_probs(probs: &[f64]) -> Result<Self> {
        let segments = probs
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                if !(p < 1.0) {
                    return Err(Error::domain(format!("period default probability must be < 1, got {p}")));
                }
                Ok(((k + 1) as f64, -(-p).ln_1p()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }

    pub fn segment_ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn hazards(&self) -> &[f64] {
        &self.hazards
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ends.iter().copied().zip(self.hazards.iter().copied())
    }

    pub fn max_time(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    /// Set iff some hazard is negative or some implied conditional default
    /// probability exceeds one.
    pub fn is_pathological(&self) -> bool {
        self.pathological
    }

    /// Indices of segments whose hazard is negative.
    pub fn negative_segments(&self) -> Vec<usize> {
        self.hazards
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    fn locate(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("survival time must be >= 0, got {t}")));
        }
        let max = self.max_time();
        if t > max + TIME_EPS {
            return Err(Error::Extrapolation { t, max });
        }
        Ok(self.ends.partition_point(|&e| e < t).min(self.ends.len() - 1))
    }

    fn segment_start(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.ends[i - 1]
        }
    }

    /// Hazard on the segment containing `t` (segments are left-open).
    pub fn hazard_at(&self, t: f64) -> Result<f64> {
        Ok(self.hazards[self.locate(t)?])
    }

    pub fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let start = self.segment_start(i);
        let base = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        Ok(base + self.hazards[i] * (t.min(self.max_time()) - start))
    }

    /// `q(t) = Q(τ > t)`; exceeds 1 when hazards are negative.
    pub fn survival_prob(&self, t: f64) -> Result<f64> {
        Ok((-self.cumulative_hazard(t)?).exp())
    }

    /// `Q(T) = ∫_0^T q(u) du = E[min(T, τ)]`, in closed form.
    pub fn integrated_survival(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let start = self.segment_start(i);
        let (base_q, base_h) = if i == 0 {
            (0.0, 0.0)
        } else {
            (self.integrated[i - 1], self.cumulative[i - 1])
        };
        let width = t.min(self.max_time()) - start;
        Ok(base_q + (-base_h).exp() * width * one_minus_exp_over(self.hazards[i] * width))
    }

    pub fn conditional_default_prob(&self, t1: f64, t2: f64) -> Result<ConditionalDefault> {
        if !(t1 >= 0.0) || !(t2 > t1) {
            return Err(Error::domain(format!("need 0 <= t1 < t2, got t1 = {t1}, t2 = {t2}")));
        }
        let value = -(-(self.cumulative_hazard(t2)? - self.cumulative_hazard(t1)?)).exp_m1();
        Ok(ConditionalDefault {
            value,
            nonsensical: !(0.0..=1.0).contains(&value),
        })
    }
}

/// How the premium of the period in which default occurs is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PremiumAccrual {
    /// Premium accrues up to the default time: `s (τ ∧ t_i - τ ∧ t_{i-1})`.
    #[default]
    ToDefault,
    /// The full period premium is paid if the entity was alive at the start of
    /// the period (the three-date toy model's convention).
    FullPeriod,
}

/// Present value of a unit running premium on `sched` under `accrual`.
pub fn premium_annuity(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    sched: &PaymentSchedule,
    accrual: PremiumAccrual,
) -> Result<f64> {
    match accrual {
        PremiumAccrual::ToDefault => crate::annuity::discrete_defaultable_annuity(d, s, sched),
        PremiumAccrual::FullPeriod => {
            if sched.num_periods() == 0 {
                return Err(Error::domain("schedule has no payment after its start"));
            }
            sched
                .periods()
                .map(|(a, b)| Ok((b - a) * s.survival_prob(a)? * d.discount_factor(b)?))
                .sum()
        }
    }
}

/// `-∫_{T0}^{T} L(t) P(0,t) dq(t)`: loss paid at the default time.
pub fn protection_leg(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    rec: &RecoverySpec,
    start: f64,
    end: f64,
) -> Result<f64> {
    if !(start >= 0.0) || !(end > start) {
        return Err(Error::domain(format!(
            "protection leg needs 0 <= T0 < T, got T0 = {start}, T = {end}"
        )));
    }
    let mut breaks = d.pillar_times().to_vec();
    breaks.extend_from_slice(s.segment_ends());
    breaks.extend(rec.breakpoints());
    let pq = |t: f64| -> Result<f64> { Ok(d.discount_factor(t)? * s.survival_prob(t)?) };

    // P q is exponential between nodes and λ is constant; L is exact for
    // piecewise-constant specs and sampled at interval midpoints otherwise.
    let step = if rec.is_piecewise_constant() {
        f64::INFINITY
    } else {
        DAILY_STEP
    };
    let nodes = grid(start, end, step, &breaks);
    let mut total = 0.0;
    let mut g_prev = pq(nodes[0])?;
    for w in nodes.windows(2) {
        let g_next = pq(w[1])?;
        let mid = 0.5 * (w[0] + w[1]);
        let lgd = check_lgd_value(rec.lgd(mid))?;
        total += lgd * s.hazard_at(mid)? * exp_segment(w[1] - w[0], g_prev, g_next);
        g_prev = g_next;
    }
    Ok(total)
}

fn check_lgd_value(l: f64) -> Result<f64> {
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::domain(format!("LGD function returned {l}, outside (0, 1]")));
    }
    Ok(l)
}

/// Fair spread of a continuously paid CDS over `[T0, T]`.
pub fn fair_spread_continuous(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    rec: &RecoverySpec,
    start: f64,
    end: f64,
) -> Result<f64> {
    let annuity = defaultable_annuity(d, s, start, end)?;
    if !(annuity > 0.0) {
        return Err(Error::Degenerate("defaultable annuity vanishes".into()));
    }
    Ok(protection_leg(d, s, rec, start, end)? / annuity)
}

/// Fair spread of a CDS paying its premium on `sched`, accruing to default.
pub fn fair_spread_discrete(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    rec: &RecoverySpec,
    sched: &PaymentSchedule,
) -> Result<f64> {
    fair_spread_discrete_with(d, s, rec, sched, PremiumAccrual::ToDefault)
}

pub fn fair_spread_discrete_with(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    rec: &RecoverySpec,
    sched: &PaymentSchedule,
    accrual: PremiumAccrual,
) -> Result<f64> {
    let annuity = premium_annuity(d, s, sched, accrual)?;
    if !(annuity > 0.0) {
        return Err(Error::Degenerate("defaultable annuity vanishes".into()));
    }
    Ok(protection_leg(d, s, rec, sched.start(), sched.end())? / annuity)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    /// Premium payments per year.
    pub freq: u32,
    pub accrual: PremiumAccrual,
    /// Hazard search bracket, per annum.
    pub bracket: (f64, f64),
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            freq: 4,
            accrual: PremiumAccrual::ToDefault,
            bracket: (-5.0, 10.0),
        }
    }
}

impl BootstrapOptions {
    pub fn with_freq(freq: u32) -> Self {
        Self {
            freq,
            ..Self::default()
        }
    }
}

/// Payment schedule the bootstrap uses for a contract maturing at `end`.
pub fn contract_schedule(start: f64, end: f64, freq: u32) -> Result<PaymentSchedule> {
    PaymentSchedule::regular(start, end, freq)
}

/// Calibrates one hazard per quoted tenor, shortest first, so that the model
/// fair spread reproduces each quote. Earlier segments stay fixed.
pub fn bootstrap_hazards(
    curve: &CdsCurve,
    d: &DiscountCurve,
    rec: &RecoverySpec,
    freq: u32,
) -> Result<SurvivalCurve> {
    bootstrap_hazards_with(curve, d, rec, &BootstrapOptions::with_freq(freq))
}

pub fn bootstrap_hazards_with(
    curve: &CdsCurve,
    d: &DiscountCurve,
    rec: &RecoverySpec,
    opts: &BootstrapOptions,
) -> Result<SurvivalCurve> {
    if curve.is_empty() {
        return Err(Error::InvalidCurve("cannot bootstrap an empty curve".into()));
    }
    let start = curve.effective_start();
    let (lo, hi) = opts.bracket;
    let mut segments: Vec<(f64, f64)> = Vec::with_capacity(curve.len());
    for quote in curve.quotes() {
        let end = quote.tenor.years();
        let sched = contract_schedule(start, end, opts.freq)?;
        let residual = |lambda: f64| -> Result<f64> {
            let mut trial = segments.clone();
            trial.push((end, lambda));
            let s = SurvivalCurve::new(trial)?;
            Ok(fair_spread_discrete_with(d, &s, rec, &sched, opts.accrual)? - quote.spread)
        };
        let fail = |reason: String| Error::BootstrapFailure { tenor: end, reason };
        let (f_lo, f_hi) = (residual(lo)?, residual(hi)?);
        if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
            return Err(fail(format!(
                "spread {:.4}bp not reachable with hazard in [{lo}, {hi}]",
                quote.spread_bp()
            )));
        }
        let lambda = brent(residual, lo, hi, RootOptions::default()).map_err(|e| fail(e.to_string()))?;
        segments.push((end, lambda));
    }
    SurvivalCurve::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{EntityMeta, Tenor};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use chrono::NaiveDate;

    fn zero() -> DiscountCurve {
        DiscountCurve::flat(0.0, 30.0).unwrap()
    }

    #[test]
    fn survival_examples() {
        let s = SurvivalCurve::flat(0.05, 10.0).unwrap();
        assert_eq!(s.survival_prob(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(s.survival_prob(2.0).unwrap(), (-0.1f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.survival_prob(2.0).unwrap(), 0.904837, epsilon = 1e-6);
        assert!(!s.is_pathological());
        assert!(s.survival_prob(10.5).is_err());

        let neg = SurvivalCurve::new(vec![(1.0, -0.02)]).unwrap();
        let q = neg.survival_prob(1.0).unwrap();
        assert_abs_diff_eq!(q, 1.020201, epsilon = 1e-6);
        assert!(q > 1.0);
        assert!(neg.is_pathological());
    }

    #[test]
    fn conditional_default_examples() {
        let s = SurvivalCurve::flat(0.1, 10.0).unwrap();
        let c = s.conditional_default_prob(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(c.value, 1.0 - (-0.1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.value, 0.095163, epsilon = 1e-6);
        assert!(!c.nonsensical);
        let tiny = s.conditional_default_prob(2.0 - 1e-9, 2.0).unwrap();
        assert!(tiny.value.abs() < 1e-9);
        let neg = SurvivalCurve::new(vec![(1.0, 0.05), (2.0, -0.1)]).unwrap();
        let c = neg.conditional_default_prob(1.0, 2.0).unwrap();
        assert!(c.value < 0.0 && c.nonsensical);
        assert!(s.conditional_default_prob(2.0, 2.0).is_err());
    }

    #[test]
    fn integrated_survival_closed_form() {
        let s = SurvivalCurve::new(vec![(1.0, 0.1), (3.0, 0.3)]).unwrap();
        let q1 = (1.0 - (-0.1f64).exp()) / 0.1;
        let q3 = q1 + (-0.1f64).exp() * (1.0 - (-0.6f64).exp()) / 0.3;
        assert_abs_diff_eq!(s.integrated_survival(1.0).unwrap(), q1, epsilon = 1e-14);
        assert_abs_diff_eq!(s.integrated_survival(3.0).unwrap(), q3, epsilon = 1e-14);
        let zero_h = SurvivalCurve::flat(0.0, 5.0).unwrap();
        assert_abs_diff_eq!(zero_h.integrated_survival(4.0).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn fair_spread_is_lambda_times_lgd_at_zero_rates() {
        let rec = RecoverySpec::constant_lgd(0.6).unwrap();
        let s = SurvivalCurve::flat(0.02, 30.0).unwrap();
        for t in [1.0, 5.0, 10.0] {
            let spread = fair_spread_continuous(&zero(), &s, &rec, 0.0, t).unwrap();
            assert_abs_diff_eq!(spread, 0.012, epsilon = 1e-12);
        }
        let none = SurvivalCurve::flat(0.0, 30.0).unwrap();
        assert_eq!(fair_spread_continuous(&zero(), &none, &rec, 0.0, 5.0).unwrap(), 0.0);
        let sched = PaymentSchedule::regular(0.0, 5.0, 4).unwrap();
        assert_eq!(fair_spread_discrete(&zero(), &none, &rec, &sched).unwrap(), 0.0);
    }

    #[test]
    fn daily_discrete_matches_continuous() {
        let d = DiscountCurve::flat(0.03, 30.0).unwrap();
        let s = SurvivalCurve::new(vec![(2.0, 0.01), (5.0, 0.04), (10.0, 0.02)]).unwrap();
        let rec = RecoverySpec::default();
        let cont = fair_spread_continuous(&d, &s, &rec, 0.0, 7.0).unwrap();
        let sched = PaymentSchedule::regular(0.0, 7.0, 365).unwrap();
        let disc = fair_spread_discrete(&d, &s, &rec, &sched).unwrap();
        assert_relative_eq!(disc, cont, max_relative = 1e-4);
    }

    #[test]
    fn function_lgd_matches_piecewise() {
        let d = DiscountCurve::flat(0.02, 30.0).unwrap();
        let s = SurvivalCurve::new(vec![(2.0, 0.03), (6.0, 0.05)]).unwrap();
        let pw = RecoverySpec::piecewise(vec![(3.0, 0.5), (10.0, 0.7)]).unwrap();
        let func = RecoverySpec::function(|t| if t <= 3.0 { 0.5 } else { 0.7 });
        let a = protection_leg(&d, &s, &pw, 0.0, 5.0).unwrap();
        let b = protection_leg(&d, &s, &func, 0.0, 5.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
        let bad = RecoverySpec::function(|_| 1.5);
        assert!(protection_leg(&d, &s, &bad, 0.0, 5.0).is_err());
    }

    #[test]
    fn flat_spread_bootstrap_roundtrip() {
        let spread = 0.01;
        let entity = EntityMeta::new("FLAT", "Flat").unwrap();
        let quotes: Vec<_> = Tenor::CANONICAL.iter().map(|&t| (t, spread * 1e4)).collect();
        let curve = CdsCurve::from_bp(NaiveDate::from_ymd_opt(2009, 1, 2).unwrap(), entity, &quotes).unwrap();
        let rec = RecoverySpec::constant_lgd(1.0).unwrap();
        let s = bootstrap_hazards(&curve, &zero(), &rec, 4).unwrap();
        assert!(!s.is_pathological());
        for &l in s.hazards() {
            assert_abs_diff_eq!(l, spread, epsilon = 2e-4);
        }
        for q in curve.quotes() {
            let sched = contract_schedule(0.0, q.tenor.years(), 4).unwrap();
            let refit = fair_spread_discrete(&zero(), &s, &rec, &sched).unwrap();
            assert_abs_diff_eq!(refit, q.spread, epsilon = 1e-12);
        }
    }

    #[test]
    fn unreachable_spread_names_the_tenor() {
        let entity = EntityMeta::new("X", "X").unwrap();
        let curve = CdsCurve::from_bp(
            NaiveDate::from_ymd_opt(2009, 1, 2).unwrap(),
            entity,
            &[(Tenor::CANONICAL[1], 100.0), (Tenor::CANONICAL[2], 100_000.0)],
        )
        .unwrap();
        let err = bootstrap_hazards(&curve, &zero(), &RecoverySpec::default(), 4).unwrap_err();
        match err {
            Error::BootstrapFailure { tenor, .. } => assert_eq!(tenor, 2.0),
            other => panic!("unexpected {other}"),
        }
    }
}
