use chrono::NaiveDate;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cds_aoa::annuity::discrete_defaultable_annuity;
use cds_aoa::aoa::{
    check_thm1_curve, check_thm1_pair, check_thm2_curve, hyperbola_plot_data, CheckOptions,
};
use cds_aoa::curve::{CdsCurve, DiscountCurve, EntityMeta, PaymentSchedule, RecoverySpec, Tenor};
use cds_aoa::fixtures;
use cds_aoa::irs::{check_irs_cds_aoa, forward_rate_from_irs, IrsForwardCurve};
use cds_aoa::scanner::synth::{generate, SynthConfig};
use cds_aoa::scanner::{render_report, scan, ReportFormat, ScanConfig};
use cds_aoa::strategy::{
    cds_mtm, cr01, dv01, dv01_bump, three_period_fair_spreads, three_period_payoff, CdsPosition,
    DefaultPeriod, Direction, Market,
};
use cds_aoa::survival::{
    bootstrap_hazards, contract_schedule, fair_spread_discrete, fair_spread_discrete_with,
    PremiumAccrual, SurvivalCurve,
};

fn date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2008, 6, 2).unwrap()
}

fn curve_from_bp(spreads: &[f64]) -> CdsCurve {
    let quotes: Vec<_> = Tenor::CANONICAL.iter().copied().zip(spreads.iter().copied()).collect();
    CdsCurve::from_bp(date(), EntityMeta::new("X", "Test Name").unwrap(), &quotes).unwrap()
}

/// Upward-sloping curves that always bootstrap.
fn rising_curve() -> impl Strategy<Value = CdsCurve> {
    (20.0..200.0f64, prop::collection::vec(0.0..30.0f64, 7)).prop_map(|(base, steps)| {
        let mut s = vec![base];
        for st in steps {
            s.push(s.last().unwrap() + st);
        }
        curve_from_bp(&s)
    })
}

fn any_curve() -> impl Strategy<Value = CdsCurve> {
    prop::collection::vec(5.0..500.0f64, 8).prop_map(|s| curve_from_bp(&s))
}

fn zero() -> DiscountCurve {
    DiscountCurve::flat(0.0, 40.0).unwrap()
}

fn off_market_position(curve: &CdsCurve, tenor: Tenor, offset_bp: f64, direction: Direction) -> CdsPosition {
    let sched = contract_schedule(0.0, tenor.years(), 4).unwrap();
    let spread = curve.spread(tenor).unwrap() + offset_bp * 1e-4;
    CdsPosition::new(direction, 1e7, spread, sched, RecoverySpec::default()).unwrap()
}

proptest! {
    #[test]
    fn payoff_nonnegative_when_short_spread_at_least_double(
        s2 in 0i64..500, extra in 0i64..500, r in 0i64..100,
    ) {
        let s2 = Ratio::new(s2, 10_000);
        let s1 = s2 * 2 + Ratio::new(extra, 10_000);
        let rec = Ratio::new(r, 100);
        for tau in DefaultPeriod::ALL {
            let p = three_period_payoff(s1, s2, tau, rec);
            prop_assert!(p >= Ratio::from_integer(0), "{tau:?} -> {p}");
        }
        prop_assert!(three_period_payoff(s1, s2, DefaultPeriod::Three, rec) > Ratio::from_integer(0));
    }

    #[test]
    fn fair_spreads_respect_sharper_bound(lambda in 0.001..0.999f64, l2 in 0.01..1.0f64, l3 in 0.01..1.0f64) {
        let (s1, s2) = three_period_fair_spreads(lambda, l2, l3).unwrap();
        prop_assert!(s1 <= (2.0 - lambda) * s2 * (1.0 + 1e-14));
        prop_assert!(s1 < 2.0 * s2);
    }

    #[test]
    fn three_period_model_matches_full_period_pricer(
        lambda in 0.01..0.9f64, l2 in 0.05..1.0f64, l3 in 0.05..1.0f64,
    ) {
        let (s1, s2) = three_period_fair_spreads(lambda, l2, l3).unwrap();
        let s = SurvivalCurve::flat(-(1.0 - lambda).ln(), 4.0).unwrap();
        let rec = RecoverySpec::piecewise(vec![(2.0, l2), (3.0, l3)]).unwrap();
        let one = PaymentSchedule::new(vec![1.0, 2.0]).unwrap();
        let two = PaymentSchedule::new(vec![1.0, 2.0, 3.0]).unwrap();
        let p1 = fair_spread_discrete_with(&zero(), &s, &rec, &one, PremiumAccrual::FullPeriod).unwrap();
        let p2 = fair_spread_discrete_with(&zero(), &s, &rec, &two, PremiumAccrual::FullPeriod).unwrap();
        prop_assert!((p1 - s1).abs() < 1e-9, "{p1} vs {s1}");
        prop_assert!((p2 - s2).abs() < 1e-9, "{p2} vs {s2}");
    }

    #[test]
    fn bootstrap_reprices_every_quote(curve in rising_curve(), rate in 0.0..0.06f64) {
        let d = DiscountCurve::flat(rate, 40.0).unwrap();
        let rec = RecoverySpec::default();
        let s = bootstrap_hazards(&curve, &d, &rec, 4).unwrap();
        for q in curve.quotes() {
            let sched = contract_schedule(0.0, q.tenor.years(), 4).unwrap();
            let fair = fair_spread_discrete(&d, &s, &rec, &sched).unwrap();
            prop_assert!((fair - q.spread).abs() <= 1e-8 * q.spread, "{}: {fair} vs {}", q.tenor, q.spread);
        }
    }

    #[test]
    fn thm1_verdict_is_scale_free(curve in any_curve(), k in 0.1..10.0f64) {
        let opts = CheckOptions::all_pairs();
        let a = check_thm1_curve(&curve, &opts).unwrap().violated_pairs();
        let b = check_thm1_curve(&curve.scaled(k).unwrap(), &opts).unwrap().violated_pairs();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hyperbola_tags_agree_with_pair_check(curve in any_curve(), anchor in 0usize..7, log_log: bool) {
        let a = Tenor::CANONICAL[anchor];
        let plot = hyperbola_plot_data(&curve, a, log_log).unwrap();
        let s_a = curve.spread(a).unwrap();
        for (q, p) in curve.quotes().iter().zip(&plot.points) {
            let expect = q.tenor > a && check_thm1_pair(s_a, a.years(), q.spread, q.tenor.years(), 0.0).unwrap().violated;
            prop_assert_eq!(p.violation, expect, "tenor {}", q.tenor);
        }
    }

    #[test]
    fn flat_swap_forward_condition_matches_annuity_condition(curve in any_curve(), rate in 0.002..0.08f64) {
        let samples: Vec<(f64, f64)> = (0..=120).map(|i| (0.1 * i as f64, rate)).collect();
        let irs = IrsForwardCurve::new(0.0, samples).unwrap();
        let d = DiscountCurve::flat(rate, 40.0).unwrap();
        let opts = CheckOptions::all_pairs();
        let a = check_irs_cds_aoa(&irs, &curve, &opts).unwrap().violated_pairs();
        let b = check_thm2_curve(&curve, &d, &opts).unwrap().violated_pairs();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn linear_swap_ramp_solves_riccati(i0 in 0.01..0.05f64, k in -0.0009..0.004f64) {
        // I = i0 + k T gives f' = f^2 - I f + 2k for the implied forward rate.
        let samples: Vec<(f64, f64)> = (0..=2400).map(|n| {
            let t = n as f64 / 200.0;
            (t, i0 + k * t)
        }).collect();
        let irs = IrsForwardCurve::new(0.0, samples).unwrap();
        let h = 0.05;
        for n in 0..18 {
            let t = 0.5 + 0.5 * n as f64;
            let f = forward_rate_from_irs(&irs, t).unwrap();
            let df = (forward_rate_from_irs(&irs, t + h).unwrap() - forward_rate_from_irs(&irs, t - h).unwrap()) / (2.0 * h);
            let i = i0 + k * t;
            let residual = df - (f * f - i * f + 2.0 * k);
            prop_assert!(residual.abs() < 1e-3, "T = {t}: residual {residual:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn long_and_short_cancel(curve in rising_curve(), offset in -30.0..30.0f64, tenor in 1usize..8) {
        let s = bootstrap_hazards(&curve, &zero(), &RecoverySpec::default(), 4).unwrap();
        let t = Tenor::CANONICAL[tenor];
        let long = off_market_position(&curve, t, offset, Direction::LongProtection);
        let short = off_market_position(&curve, t, offset, Direction::ShortProtection);
        let sum = cds_mtm(&long, &zero(), &s).unwrap() + cds_mtm(&short, &zero(), &s).unwrap();
        prop_assert!(sum.abs() < 1e-6);
    }

    #[test]
    fn sensitivities_scale_with_bump(curve in rising_curve(), offset in 5.0..40.0f64, rate in 0.0..0.05f64) {
        let d = DiscountCurve::flat(rate, 40.0).unwrap();
        let pos = off_market_position(&curve, Tenor::CANONICAL[5], -offset, Direction::LongProtection);
        let market = Market::new(d, curve, RecoverySpec::default());
        let one = dv01_bump(&pos, &market, 1.0).unwrap();
        let two = dv01_bump(&pos, &market, 2.0).unwrap();
        prop_assert!((two - 2.0 * one).abs() <= 0.1 * (2.0 * one).abs(), "dv01 {one} vs {two}");
        let c1 = cr01(&pos, &market).unwrap();
        let c2 = cds_aoa::strategy::cr01_bump(&pos, &market, 2.0).unwrap();
        prop_assert!((c2 - 2.0 * c1).abs() <= 0.1 * (2.0 * c1).abs(), "cr01 {c1} vs {c2}");
    }

    #[test]
    fn dv01_matches_central_difference(curve in rising_curve(), offset in 5.0..40.0f64, rate in 0.0..0.05f64) {
        let d = DiscountCurve::flat(rate, 40.0).unwrap();
        let pos = off_market_position(&curve, Tenor::CANONICAL[5], offset, Direction::LongProtection);
        let market = Market::new(d, curve, RecoverySpec::default());
        let forward = dv01(&pos, &market).unwrap();
        let central = dv01_bump(&pos, &market, 0.5).unwrap() - dv01_bump(&pos, &market, -0.5).unwrap();
        prop_assert!((forward - central).abs() <= 0.05 * central.abs(), "{forward} vs {central}");
    }

    #[test]
    fn cr01_is_risky_annuity_per_bp(level in 20.0..300.0f64, rate in 0.0..0.05f64) {
        let curve = curve_from_bp(&[level; 8]);
        let d = DiscountCurve::flat(rate, 40.0).unwrap();
        let pos = off_market_position(&curve, Tenor::CANONICAL[5], 0.0, Direction::LongProtection);
        let market = Market::new(d.clone(), curve, RecoverySpec::default());
        let s = market.survival().unwrap();
        let annuity = discrete_defaultable_annuity(&d, &s, &pos.schedule).unwrap();
        let expect = annuity * 1e-4 * pos.notional;
        let got = cr01(&pos, &market).unwrap();
        prop_assert!((got - expect).abs() <= 0.02 * expect, "{got} vs {expect}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scan_ignores_input_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let cfg = SynthConfig { curves: 200, violations: 9, entities: 40, seed, ..SynthConfig::default() };
        let (mut curves, _) = generate(&cfg).unwrap();
        let scan_cfg = ScanConfig::default();
        let a = scan(&curves, &scan_cfg).unwrap();
        curves.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let b = scan(&curves, &scan_cfg).unwrap();
        prop_assert_eq!(render_report(&a, ReportFormat::Json).unwrap(), render_report(&b, ReportFormat::Json).unwrap());
        prop_assert_eq!(render_report(&a, ReportFormat::Csv).unwrap(), render_report(&b, ReportFormat::Csv).unwrap());
    }

    #[test]
    fn scan_records_are_consistent(seed in any::<u64>()) {
        let cfg = SynthConfig { curves: 200, violations: 9, entities: 40, seed, ..SynthConfig::default() };
        let (curves, manifest) = generate(&cfg).unwrap();
        let report = scan(&curves, &ScanConfig::default()).unwrap();
        prop_assert_eq!(report.total_anomalies, manifest.total);
        for r in &report.records {
            let o = check_thm1_pair(r.s1, r.tenor_short.years(), r.s2, r.tenor_long.years(), 0.0).unwrap();
            prop_assert!(o.violated);
        }
        for group in [&report.by_pair, &report.by_month, &report.by_rating, &report.by_region,
                      &report.by_sector, &report.by_currency, &report.by_seniority] {
            prop_assert_eq!(group.values().sum::<usize>(), report.total_anomalies);
        }
    }
}

#[test]
fn flat_swap_curve_keeps_microsoft_violation() {
    let samples: Vec<(f64, f64)> = (0..=120).map(|i| (0.1 * i as f64, 0.02)).collect();
    let irs = IrsForwardCurve::new(0.0, samples).unwrap();
    let v = check_irs_cds_aoa(&irs, &fixtures::msft(), &CheckOptions::standard_pairs()).unwrap();
    assert_eq!(v.violated_pairs(), vec![fixtures::five_ten()]);
}
