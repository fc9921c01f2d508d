//! Forward bond prices implied by a curve of continuously exchanged swap rates.
//!
//! With `I(T)` the swap rate over `[T0, T]` and
//! `Φ(U, T) = exp(-∫_U^T I(V) dV)`, the forward bond price is
//! `F(T0, T) = 1 - I(T) ∫_{T0}^{T} Φ(U, T) dU`.

use serde::Serialize;

use crate::annuity::irs_fair_rate;
use crate::aoa::{check_weighted, AoAVerdict, CheckOptions, Condition};
use crate::curve::{CdsCurve, DiscountCurve, TIME_EPS};
use crate::error::{Error, Result};
use crate::numerics::{exp_segment, grid, DAILY_STEP};

/// Swap rates `I(T)` sampled from `T0`, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrsForwardCurve {
    t0: f64,
    samples: Vec<(f64, f64)>,
    /// `I(T0)` was not supplied and was extrapolated from the first two samples.
    extrapolated_start: bool,
    // Quadrature nodes with `J(u) = ∫_{T0}^{u} I` and `K(u) = ∫_{T0}^{u} e^{J}`.
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    j: Vec<f64>,
    #[serde(skip)]
    k: Vec<f64>,
}

impl IrsForwardCurve {
    /// Samples must be strictly increasing and start at or after `t0`. If the
    /// first sample is later than `t0`, `I(T0)` is extrapolated linearly.
    pub fn new(t0: f64, mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if !t0.is_finite() || t0 < 0.0 {
            return Err(Error::domain(format!("T0 must be finite and >= 0, got {t0}")));
        }
        if samples.iter().any(|(t, i)| !t.is_finite() || !i.is_finite()) {
            return Err(Error::InvalidCurve("IRS samples must be finite".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidCurve("IRS sample times must be strictly increasing".into()));
        }
        let first = samples
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidCurve("IRS curve needs samples".into()))?;
        if first.0 < t0 - TIME_EPS {
            return Err(Error::InvalidCurve(format!("IRS sample at {} precedes T0 = {t0}", first.0)));
        }
        let mut extrapolated_start = false;
        if (first.0 - t0).abs() <= TIME_EPS {
            samples[0].0 = t0;
        } else {
            let Some(&(t1, i1)) = samples.get(1) else {
                return Err(Error::InvalidCurve(
                    "need I(T0) or at least two samples to extrapolate it".into(),
                ));
            };
            let slope = (i1 - first.1) / (t1 - first.0);
            samples.insert(0, (t0, first.1 - slope * (first.0 - t0)));
            extrapolated_start = true;
        }
        if samples.len() < 2 {
            return Err(Error::InvalidCurve("IRS curve needs a sample after T0".into()));
        }
        let mut curve = Self {
            t0,
            samples,
            extrapolated_start,
            nodes: Vec::new(),
            j: Vec::new(),
            k: Vec::new(),
        };
        curve.build_tables();
        Ok(curve)
    }

    /// Swap rates of `d` over `[t0, T]` on a daily grid up to `horizon`, plus
    /// the discount pillars.
    pub fn from_discount(d: &DiscountCurve, t0: f64, horizon: f64) -> Result<Self> {
        if !(horizon > t0) {
            return Err(Error::domain(format!("horizon {horizon} must exceed T0 {t0}")));
        }
        let times = grid(t0, horizon, DAILY_STEP, d.pillar_times());
        let p0 = d.discount_factor(t0)?;
        let mut samples = Vec::with_capacity(times.len());
        samples.push((t0, irs_fair_rate(d, t0, t0)?));
        let (mut annuity, mut p_prev) = (0.0, p0);
        for w in times.windows(2) {
            let p = d.discount_factor(w[1])?;
            annuity += exp_segment(w[1] - w[0], p_prev, p);
            samples.push((w[1], (p0 - p) / annuity));
            p_prev = p;
        }
        Self::new(t0, samples)
    }

    fn build_tables(&mut self) {
        let times: Vec<f64> = self.samples.iter().map(|s| s.0).collect();
        let nodes = grid(self.t0, self.max_time(), DAILY_STEP, &times);
        let mut j = Vec::with_capacity(nodes.len());
        let mut k = Vec::with_capacity(nodes.len());
        let (mut jv, mut kv) = (0.0, 0.0);
        let mut prev = (self.t0, self.interp(self.t0), 1.0);
        j.push(0.0);
        k.push(0.0);
        for &u in &nodes[1..] {
            let i_u = self.interp(u);
            // Nodes contain every sample, so I is linear between them.
            jv += 0.5 * (u - prev.0) * (prev.1 + i_u);
            let e = jv.exp();
            kv += 0.5 * (u - prev.0) * (prev.2 + e);
            j.push(jv);
            k.push(kv);
            prev = (u, i_u, e);
        }
        self.nodes = nodes;
        self.j = j;
        self.k = k;
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn extrapolated_start(&self) -> bool {
        self.extrapolated_start
    }

    pub fn max_time(&self) -> f64 {
        self.samples.last().unwrap().0
    }

    fn interp(&self, t: f64) -> f64 {
        let i = self.samples.partition_point(|s| s.0 <= t);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let (a, b) = (self.samples[i - 1], self.samples[i]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if t < self.t0 - TIME_EPS {
            return Err(Error::domain(format!("{t} precedes T0 = {}", self.t0)));
        }
        if t > self.max_time() + TIME_EPS {
            return Err(Error::Extrapolation {
                t,
                max: self.max_time(),
            });
        }
        Ok(())
    }

    /// `I(T0, T)`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(self.interp(t))
    }

    /// `(J(t), K(t))` by extending the tables over the partial interval.
    fn tables_at(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(self.t0, self.max_time());
        let idx = self.nodes.partition_point(|&u| u <= t).max(1) - 1;
        let u = self.nodes[idx];
        let h = t - u;
        if h <= 0.0 {
            return (self.j[idx], self.k[idx]);
        }
        let jt = self.j[idx] + 0.5 * h * (self.interp(u) + self.interp(t));
        let kt = self.k[idx] + 0.5 * h * (self.j[idx].exp() + jt.exp());
        (jt, kt)
    }
}

/// `Φ(U, T) = exp(-∫_U^T I(V) dV)`.
pub fn phi(irs: &IrsForwardCurve, u: f64, t: f64) -> Result<f64> {
    irs.check_range(u)?;
    irs.check_range(t)?;
    if u > t + TIME_EPS {
        return Err(Error::domain(format!("need U <= T, got U = {u}, T = {t}")));
    }
    Ok((irs.tables_at(u).0 - irs.tables_at(t).0).exp())
}

/// `∫_{T0}^{T} Φ(U, T) dU`.
pub fn integrated_phi(irs: &IrsForwardCurve, t: f64) -> Result<f64> {
    irs.check_range(t)?;
    let (j, k) = irs.tables_at(t);
    Ok((-j).exp() * k)
}

/// `F(T0, T) = 1 - I(T) ∫_{T0}^{T} Φ(U, T) dU`.
pub fn forward_bond_from_irs(irs: &IrsForwardCurve, t: f64) -> Result<f64> {
    Ok(1.0 - irs.rate(t)? * integrated_phi(irs, t)?)
}

/// Instantaneous forward rate `-d ln F / dT` by a central difference of one
/// day, one-sided within a day of either end of the curve.
pub fn forward_rate_from_irs(irs: &IrsForwardCurve, t: f64) -> Result<f64> {
    irs.check_range(t)?;
    if t <= irs.t0() {
        return Err(Error::domain(format!("forward rate needs T > T0, got {t}")));
    }
    let h = DAILY_STEP;
    let lo = (t - h).max(irs.t0());
    let hi = (t + h).min(irs.max_time());
    let ln_f = |x: f64| -> Result<f64> {
        let f = forward_bond_from_irs(irs, x)?;
        if !(f > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "swap curve implies a nonpositive forward bond price {f} at {x}"
            )));
        }
        Ok(f.ln())
    };
    ln_f(t)?;
    Ok(-(ln_f(hi)? - ln_f(lo)?) / (hi - lo))
}

/// Forward bond price and forward rate on a regular grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForwardPoint {
    pub t: f64,
    pub rate: f64,
    pub forward_bond: f64,
    pub forward_rate: f64,
}

pub fn forward_curve(irs: &IrsForwardCurve, step: f64) -> Result<Vec<ForwardPoint>> {
    if !(step > 0.0) {
        return Err(Error::domain("step must be positive"));
    }
    let times = grid(irs.t0(), irs.max_time(), step, &[]);
    times[1..]
        .iter()
        .map(|&t| {
            Ok(ForwardPoint {
                t,
                rate: irs.rate(t)?,
                forward_bond: forward_bond_from_irs(irs, t)?,
                forward_rate: forward_rate_from_irs(irs, t)?,
            })
        })
        .collect()
}

/// Grid points at which `F` rises. With nonnegative rates `F` should not
/// increase in `T`, so a nonempty result marks a suspicious swap curve.
pub fn non_monotone_points(irs: &IrsForwardCurve, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::domain("step must be positive"));
    }
    let times = grid(irs.t0(), irs.max_time(), step, &[]);
    let mut prev = forward_bond_from_irs(irs, times[0])?;
    let mut out = Vec::new();
    for &t in &times[1..] {
        let f = forward_bond_from_irs(irs, t)?;
        if f > prev + 1e-12 {
            out.push(t);
        }
        prev = f;
    }
    Ok(out)
}

/// `(∫_{T0}^{T} Φ(U, T) dU) s(T)` increasing in `T`.
pub fn check_irs_cds_aoa(irs: &IrsForwardCurve, curve: &CdsCurve, opts: &CheckOptions) -> Result<AoAVerdict> {
    if (irs.t0() - curve.effective_start()).abs() > TIME_EPS {
        return Err(Error::domain(format!(
            "swap curve starts at {} but the CDS curve at {}",
            irs.t0(),
            curve.effective_start()
        )));
    }
    check_weighted(curve, Condition::IrsForward, opts, |t| integrated_phi(irs, t.years()))
}
