//! Standardized risk-free annuities, their defaultable counterparts and the
//! continuously-exchanged swap rate.
//!
//! Continuous annuities are integrated on a daily grid whose nodes include every
//! discount pillar and hazard-segment end. Between nodes the integrand is an
//! exact exponential, so each sub-interval is integrated in closed form.

use crate::curve::{DiscountCurve, PaymentSchedule};
use crate::error::{Error, Result};
use crate::numerics::{grid, integrate_exp, DAILY_STEP};
use crate::survival::SurvivalCurve;

fn check_interval(start: f64, end: f64) -> Result<()> {
    if !(start >= 0.0) || !(end > start) {
        return Err(Error::domain(format!(
            "annuity needs 0 <= T0 < T, got T0 = {start}, T = {end}"
        )));
    }
    Ok(())
}

/// `A(T0, T) = ∫_{T0}^{T} P(0,t) dt`.
pub fn standardized_annuity(d: &DiscountCurve, start: f64, end: f64) -> Result<f64> {
    check_interval(start, end)?;
    let nodes = grid(start, end, DAILY_STEP, d.pillar_times());
    integrate_exp(&nodes, |t| d.discount_factor(t))
}

/// `A_n = Σ (t_i - t_{i-1}) P(0, t_i)`.
pub fn discrete_annuity(d: &DiscountCurve, sched: &PaymentSchedule) -> Result<f64> {
    if sched.num_periods() == 0 {
        return Err(Error::domain("schedule has no payment after its start"));
    }
    sched
        .periods()
        .map(|(a, b)| Ok((b - a) * d.discount_factor(b)?))
        .sum()
}

/// `A^d(T0, T) = ∫_{T0}^{T} P(0,t) q(t) dt`.
pub fn defaultable_annuity(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    start: f64,
    end: f64,
) -> Result<f64> {
    check_interval(start, end)?;
    let mut breaks = d.pillar_times().to_vec();
    breaks.extend_from_slice(s.segment_ends());
    let nodes = grid(start, end, DAILY_STEP, &breaks);
    integrate_exp(&nodes, |t| Ok(d.discount_factor(t)? * s.survival_prob(t)?))
}

/// `A^d_n = Σ (Q(t_i) - Q(t_{i-1})) P(0, t_i)` with `Q(T) = ∫_0^T q(u) du`:
/// premium accrues up to default and is paid on the schedule dates.
pub fn discrete_defaultable_annuity(
    d: &DiscountCurve,
    s: &SurvivalCurve,
    sched: &PaymentSchedule,
) -> Result<f64> {
    if sched.num_periods() == 0 {
        return Err(Error::domain("schedule has no payment after its start"));
    }
    let mut q_prev = s.integrated_survival(sched.start())?;
    let mut total = 0.0;
    for (_, b) in sched.periods() {
        let q_next = s.integrated_survival(b)?;
        total += (q_next - q_prev) * d.discount_factor(b)?;
        q_prev = q_next;
    }
    Ok(total)
}

/// Fair rate of a continuously exchanged fixed-for-floating swap over
/// `[T0, T]`: `(P(T0) - P(T)) / A(T0, T)`. At `T = T0` this is the
/// instantaneous forward rate, taken as a one-day one-sided difference of
/// `ln P` (exact on a log-linear segment).
pub fn irs_fair_rate(d: &DiscountCurve, start: f64, end: f64) -> Result<f64> {
    if !(start >= 0.0) || !(end >= start) {
        return Err(Error::domain(format!(
            "swap rate needs 0 <= T0 <= T, got T0 = {start}, T = {end}"
        )));
    }
    if end - start <= 1e-12 {
        let ahead = (start + DAILY_STEP).min(d.max_time());
        if ahead <= start {
            return Err(Error::Extrapolation { t: start + DAILY_STEP, max: d.max_time() });
        }
        return Ok(-(d.ln_discount_factor(ahead)? - d.ln_discount_factor(start)?) / (ahead - start));
    }
    let a = standardized_annuity(d, start, end)?;
    Ok((d.discount_factor(start)? - d.discount_factor(end)?) / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat(r: f64) -> DiscountCurve {
        DiscountCurve::flat(r, 30.0).unwrap()
    }

    #[test]
    fn continuous_annuity_examples() {
        assert_abs_diff_eq!(standardized_annuity(&flat(0.0), 0.0, 5.0).unwrap(), 5.0, epsilon = 1e-9);
        let a = standardized_annuity(&flat(0.02), 0.0, 10.0).unwrap();
        assert_abs_diff_eq!(a, (1.0 - (-0.2f64).exp()) / 0.02, epsilon = 1e-9);
        assert_abs_diff_eq!(a, 9.063462, epsilon = 1e-6);
        let neg = standardized_annuity(&flat(-0.01), 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(neg, 2.020134, epsilon = 1e-6);
        assert!(neg > 2.0);
        assert!(standardized_annuity(&flat(0.01), 2.0, 2.0).is_err());
        assert!(standardized_annuity(&flat(0.01), 0.0, 31.0).is_err());
    }

    #[test]
    fn discrete_annuity_examples() {
        let sched = PaymentSchedule::regular(0.0, 5.0, 1).unwrap();
        assert_abs_diff_eq!(discrete_annuity(&flat(0.0), &sched).unwrap(), 5.0, epsilon = 1e-12);
        let sched = PaymentSchedule::new(vec![0.0, 1.0, 2.0]).unwrap();
        let a = discrete_annuity(&flat(0.02), &sched).unwrap();
        assert_abs_diff_eq!(a, (-0.02f64).exp() + (-0.04f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(a, 1.940988, epsilon = 1e-6);
        let d = DiscountCurve::new(&[(0.5, 0.99)]).unwrap();
        let single = PaymentSchedule::new(vec![0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(discrete_annuity(&d, &single).unwrap(), 0.495, epsilon = 1e-15);
        let empty = PaymentSchedule::new(vec![0.0]).unwrap();
        assert!(discrete_annuity(&d, &empty).is_err());
    }

    #[test]
    fn defaultable_annuity_examples() {
        let d = flat(0.03);
        let none = SurvivalCurve::flat(0.0, 30.0).unwrap();
        assert_relative_eq!(
            defaultable_annuity(&d, &none, 0.0, 7.0).unwrap(),
            standardized_annuity(&d, 0.0, 7.0).unwrap(),
            max_relative = 1e-14
        );
        let s = SurvivalCurve::flat(0.1, 30.0).unwrap();
        let ad = defaultable_annuity(&flat(0.0), &s, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(ad, 0.951626, epsilon = 1e-6);
        assert!(defaultable_annuity(&d, &s, 0.0, 7.0).unwrap() <= standardized_annuity(&d, 0.0, 7.0).unwrap());
    }

    #[test]
    fn discrete_defaultable_examples() {
        let d = flat(0.02);
        let sched = PaymentSchedule::regular(0.0, 5.0, 4).unwrap();
        let none = SurvivalCurve::flat(0.0, 30.0).unwrap();
        assert_relative_eq!(
            discrete_defaultable_annuity(&d, &none, &sched).unwrap(),
            discrete_annuity(&d, &sched).unwrap(),
            max_relative = 1e-14
        );
        let s = SurvivalCurve::flat(0.1, 30.0).unwrap();
        let one = PaymentSchedule::new(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(
            discrete_defaultable_annuity(&flat(0.0), &s, &one).unwrap(),
            0.951626,
            epsilon = 1e-6
        );
    }

    #[test]
    fn daily_schedule_converges_to_continuous() {
        let s = SurvivalCurve::flat(0.07, 30.0).unwrap();
        let daily = PaymentSchedule::regular(0.0, 5.0, 365).unwrap();
        let zero = flat(0.0);
        assert_abs_diff_eq!(
            discrete_defaultable_annuity(&zero, &s, &daily).unwrap(),
            defaultable_annuity(&zero, &s, 0.0, 5.0).unwrap(),
            epsilon = 1e-12
        );

        // Paying at period ends lags the continuous annuity by about r h / 2.
        let d = flat(0.04);
        let s = SurvivalCurve::new(vec![(1.0, 0.02), (3.0, 0.05), (10.0, 0.03)]).unwrap();
        let daily = PaymentSchedule::regular(0.0, 5.0, 365).unwrap();
        let discrete = discrete_defaultable_annuity(&d, &s, &daily).unwrap();
        let cont = defaultable_annuity(&d, &s, 0.0, 5.0).unwrap();
        assert_relative_eq!(discrete, cont, max_relative = 1e-4);
        let weekly = PaymentSchedule::regular(0.0, 5.0, 52).unwrap();
        let coarse = discrete_defaultable_annuity(&d, &s, &weekly).unwrap();
        assert!((coarse - cont).abs() > (discrete - cont).abs());
    }

    #[test]
    fn swap_rate_flat_identity() {
        assert_abs_diff_eq!(irs_fair_rate(&flat(0.03), 0.0, 5.0).unwrap(), 0.03, epsilon = 1e-12);
        assert_abs_diff_eq!(irs_fair_rate(&flat(0.0), 0.0, 5.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(irs_fair_rate(&flat(-0.005), 0.0, 5.0).unwrap(), -0.005, epsilon = 1e-12);
        assert_abs_diff_eq!(irs_fair_rate(&flat(0.03), 2.0, 2.0).unwrap(), 0.03, epsilon = 1e-12);
        assert!(irs_fair_rate(&flat(0.03), 2.0, 1.0).is_err());
    }

    #[test]
    fn halving_the_step_is_stable() {
        let d = DiscountCurve::from_zero_rates(&[(1.0, 0.01), (3.0, 0.025), (10.0, 0.04)]).unwrap();
        let a = standardized_annuity(&d, 0.0, 10.0).unwrap();
        let nodes = grid(0.0, 10.0, DAILY_STEP / 2.0, d.pillar_times());
        let fine = integrate_exp(&nodes, |t| d.discount_factor(t)).unwrap();
        assert!(((a - fine) / a).abs() < 1e-8);
    }
}
