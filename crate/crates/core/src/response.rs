//! Midpoint returns, price response functions on both time scales,
//! pip-spread statistics and group-averaged curves.
//!
//! The response at lag `tau` averages `r(t-1, tau) * eps(t)` over every
//! admissible anchor `t`: the sign is defined (non-zero unless zeros are
//! included), `t >= 1`, and `t - 1 + tau` stays inside the same week.
//! Anchors never wrap across week boundaries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairmeta::PairMeta;
use crate::sum::{neumaier_add, NeumaierSum};
use crate::timescales::TradeEvent;

/// Default maximum lag, in trades or seconds.
pub const DEFAULT_TAU_MAX: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error("return window [{t}, {t} + {tau}] exceeds series of length {len}")]
    OutOfRange { t: usize, tau: usize, len: usize },
    #[error("no admissible anchors")]
    NoData,
    #[error("tau_max must be at least 1")]
    InvalidTauMax,
    #[error("midpoints ({midpoints}) and signs ({signs}) differ in length")]
    LengthMismatch { midpoints: usize, signs: usize },
    #[error("curves do not share scale and lag grid")]
    GridMismatch,
    #[error("group {0} has no member curves")]
    EmptyGroup(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Trade,
    Physical,
}

impl Scale {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scale::Trade => "trade",
            Scale::Physical => "physical",
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trade" => Ok(Scale::Trade),
            "physical" => Ok(Scale::Physical),
            _ => Err(format!("unknown scale `{s}`")),
        }
    }
}

/// Whether physical-scale seconds with sign 0 enter the average.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroHandling {
    #[default]
    Exclude,
    Include,
}

impl ZeroHandling {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroHandling::Exclude => "exclude",
            ZeroHandling::Include => "include",
        }
    }
}

impl FromStr for ZeroHandling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exclude" | "excl" => Ok(ZeroHandling::Exclude),
            "include" | "incl" => Ok(ZeroHandling::Include),
            _ => Err(format!("unknown zero handling `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    /// `(m[t+tau] - m[t]) / m[t]`
    #[default]
    Relative,
    /// `ln(m[t+tau] / m[t])`, for sensitivity checks.
    Log,
}

/// How weeks are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeekWeighting {
    /// One average over every anchor of every week.
    #[default]
    Pooled,
    /// Unweighted mean of the per-week curves.
    PerWeek,
}

/// Relative midpoint return from `t` to `t + tau`.
pub fn returns(midpoints: &[f64], t: usize, tau: usize) -> Result<f64, ResponseError> {
    match midpoints.get(t + tau) {
        Some(&later) => Ok((later - midpoints[t]) / midpoints[t]),
        None => Err(ResponseError::OutOfRange {
            t,
            tau,
            len: midpoints.len(),
        }),
    }
}

/// `R(tau)` for `tau = 1..=tau_max`. `values[tau - 1]` is `None` where no
/// anchor was admissible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub scale: Scale,
    pub zero_handling: ZeroHandling,
    pub values: Vec<Option<f64>>,
    pub counts: Vec<u64>,
}

impl ResponseCurve {
    pub fn tau_max(&self) -> usize {
        self.values.len()
    }

    pub fn taus(&self) -> impl Iterator<Item = usize> {
        1..=self.values.len()
    }

    pub fn value(&self, tau: usize) -> Option<f64> {
        tau.checked_sub(1)
            .and_then(|i| self.values.get(i).copied().flatten())
    }

    pub fn count(&self, tau: usize) -> u64 {
        tau.checked_sub(1)
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }

    /// Lag of the largest value, with that value.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i + 1, v)))
            .fold(None, |best, (tau, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((tau, v)),
            })
    }

    /// `tau,value,count` rows; lags without data are written as `NA`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        self.write_csv_at(out, self.taus())
    }

    /// Writes only the given lags (e.g. a log-spaced subset for plotting).
    pub fn write_csv_at<W: Write, I: IntoIterator<Item = usize>>(
        &self,
        mut out: W,
        taus: I,
    ) -> io::Result<()> {
        writeln!(out, "tau,value,count")?;
        for tau in taus {
            match self.value(tau) {
                Some(v) => writeln!(out, "{tau},{v:e},{}", self.count(tau))?,
                None => writeln!(out, "{tau},NA,{}", self.count(tau))?,
            }
        }
        Ok(())
    }
}

/// Roughly `per_decade` log-spaced lags in `1..=tau_max`, deduplicated.
pub fn log_spaced_taus(tau_max: usize, per_decade: usize) -> Vec<usize> {
    let mut taus = Vec::new();
    if tau_max == 0 || per_decade == 0 {
        return taus;
    }
    let steps = ((tau_max as f64).log10() * per_decade as f64).ceil() as usize;
    for i in 0..=steps {
        let tau = (10f64.powf(i as f64 / per_decade as f64).round() as usize).min(tau_max);
        if taus.last() != Some(&tau) {
            taus.push(tau);
        }
    }
    taus
}

/// Per-lag sums and anchor reach counts.
#[derive(Debug, Clone)]
struct LagAccumulator {
    sums: Vec<f64>,
    comps: Vec<f64>,
    /// `reach[k]` anchors cover lags `1..=k`.
    reach: Vec<u64>,
}

impl LagAccumulator {
    fn new(tau_max: usize) -> Self {
        LagAccumulator {
            sums: vec![0.0; tau_max],
            comps: vec![0.0; tau_max],
            reach: vec![0; tau_max + 1],
        }
    }

    fn add_series(
        &mut self,
        midpoints: &[f64],
        signs: &[i8],
        zeros: ZeroHandling,
        kind: ReturnKind,
    ) {
        let tau_max = self.sums.len();
        let len = midpoints.len();
        for (t, &sign) in signs.iter().enumerate().take(len).skip(1) {
            if sign == 0 && zeros == ZeroHandling::Exclude {
                continue;
            }
            let anchor = t - 1;
            let upto = tau_max.min(len - 1 - anchor);
            self.reach[upto] += 1;
            if sign == 0 {
                continue;
            }
            let base = midpoints[anchor];
            let eps = f64::from(sign);
            let later = &midpoints[anchor + 1..anchor + 1 + upto];
            let sums = &mut self.sums[..upto];
            let comps = &mut self.comps[..upto];
            match kind {
                ReturnKind::Relative => {
                    for ((s, c), &m) in sums.iter_mut().zip(comps.iter_mut()).zip(later) {
                        neumaier_add(s, c, (m - base) / base * eps);
                    }
                }
                ReturnKind::Log => {
                    for ((s, c), &m) in sums.iter_mut().zip(comps.iter_mut()).zip(later) {
                        neumaier_add(s, c, (m / base).ln() * eps);
                    }
                }
            }
        }
    }

    fn counts(&self) -> Vec<u64> {
        let tau_max = self.sums.len();
        let mut counts = vec![0u64; tau_max];
        let mut running = 0u64;
        for k in (1..=tau_max).rev() {
            running += self.reach[k];
            counts[k - 1] = running;
        }
        counts
    }

    fn totals(&self) -> impl Iterator<Item = f64> + '_ {
        self.sums.iter().zip(&self.comps).map(|(s, c)| s + c)
    }

    fn merge(&mut self, other: &LagAccumulator) {
        for i in 0..self.sums.len() {
            neumaier_add(&mut self.sums[i], &mut self.comps[i], other.sums[i]);
            neumaier_add(&mut self.sums[i], &mut self.comps[i], other.comps[i]);
        }
        for (a, b) in self.reach.iter_mut().zip(&other.reach) {
            *a += b;
        }
    }
}

/// Builder for a response curve fed one week at a time.
#[derive(Debug, Clone)]
pub struct ResponseEstimator {
    scale: Scale,
    zeros: ZeroHandling,
    kind: ReturnKind,
    weighting: WeekWeighting,
    pooled: LagAccumulator,
    week_means: Vec<NeumaierSum>,
    week_counts: Vec<u64>,
}

impl ResponseEstimator {
    /// Trade-scale signs of 0 are undefined and always excluded, whatever
    /// `zeros` says.
    pub fn new(scale: Scale, tau_max: usize, zeros: ZeroHandling) -> Result<Self, ResponseError> {
        if tau_max == 0 {
            return Err(ResponseError::InvalidTauMax);
        }
        let zeros = match scale {
            Scale::Trade => ZeroHandling::Exclude,
            Scale::Physical => zeros,
        };
        Ok(ResponseEstimator {
            scale,
            zeros,
            kind: ReturnKind::Relative,
            weighting: WeekWeighting::Pooled,
            pooled: LagAccumulator::new(tau_max),
            week_means: vec![NeumaierSum::new(); tau_max],
            week_counts: vec![0; tau_max],
        })
    }

    pub fn with_return_kind(mut self, kind: ReturnKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_weighting(mut self, weighting: WeekWeighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn tau_max(&self) -> usize {
        self.week_counts.len()
    }

    /// Adds one week. `signs[t]` is the sign of event (or second) `t`.
    pub fn add_week(&mut self, midpoints: &[f64], signs: &[i8]) -> Result<(), ResponseError> {
        if midpoints.len() != signs.len() {
            return Err(ResponseError::LengthMismatch {
                midpoints: midpoints.len(),
                signs: signs.len(),
            });
        }
        match self.weighting {
            WeekWeighting::Pooled => self
                .pooled
                .add_series(midpoints, signs, self.zeros, self.kind),
            WeekWeighting::PerWeek => {
                let mut week = LagAccumulator::new(self.tau_max());
                week.add_series(midpoints, signs, self.zeros, self.kind);
                for (i, (total, count)) in week.totals().zip(week.counts()).enumerate() {
                    if count > 0 {
                        self.week_means[i].add(total / count as f64);
                        self.week_counts[i] += 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Combines another estimator with the same configuration. Merging in
    /// a fixed order keeps the result reproducible.
    pub fn merge(&mut self, other: &ResponseEstimator) -> Result<(), ResponseError> {
        if self.scale != other.scale
            || self.tau_max() != other.tau_max()
            || self.zeros != other.zeros
            || self.weighting != other.weighting
        {
            return Err(ResponseError::GridMismatch);
        }
        self.pooled.merge(&other.pooled);
        for i in 0..self.week_means.len() {
            self.week_means[i].merge(&other.week_means[i]);
            self.week_counts[i] += other.week_counts[i];
        }
        Ok(())
    }

    pub fn finish(&self) -> Result<ResponseCurve, ResponseError> {
        let (values, counts): (Vec<Option<f64>>, Vec<u64>) = match self.weighting {
            WeekWeighting::Pooled => {
                let counts = self.pooled.counts();
                let values = self
                    .pooled
                    .totals()
                    .zip(&counts)
                    .map(|(s, &n)| (n > 0).then(|| s / n as f64))
                    .collect();
                (values, counts)
            }
            WeekWeighting::PerWeek => {
                let values = self
                    .week_means
                    .iter()
                    .zip(&self.week_counts)
                    .map(|(s, &n)| (n > 0).then(|| s.value() / n as f64))
                    .collect();
                (values, self.week_counts.clone())
            }
        };
        if counts[0] == 0 {
            return Err(ResponseError::NoData);
        }
        Ok(ResponseCurve {
            scale: self.scale,
            zero_handling: self.zeros,
            values,
            counts,
        })
    }
}

/// Trade-scale response pooled over `weeks` of `(midpoints, signs)`.
pub fn response_trade<'a, I>(weeks: I, tau_max: usize) -> Result<ResponseCurve, ResponseError>
where
    I: IntoIterator<Item = (&'a [f64], &'a [i8])>,
{
    let mut est = ResponseEstimator::new(Scale::Trade, tau_max, ZeroHandling::Exclude)?;
    for (m, s) in weeks {
        est.add_week(m, s)?;
    }
    est.finish()
}

/// Physical-scale response pooled over `weeks` of per-second
/// `(midpoints, signs)`.
pub fn response_physical<'a, I>(
    weeks: I,
    tau_max: usize,
    zeros: ZeroHandling,
) -> Result<ResponseCurve, ResponseError>
where
    I: IntoIterator<Item = (&'a [f64], &'a [i8])>,
{
    let mut est = ResponseEstimator::new(Scale::Physical, tau_max, zeros)?;
    for (m, s) in weeks {
        est.add_week(m, s)?;
    }
    est.finish()
}

/// Average pip spread of one pair over one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadStat {
    pub symbol: String,
    pub year: i32,
    pub avg_pip_spread: f64,
    pub n_obs: u64,
}

/// Pools pip spreads over every trade event of a pair-year.
#[derive(Debug, Clone, Default)]
pub struct SpreadAccumulator {
    sum: NeumaierSum,
    n: u64,
}

impl SpreadAccumulator {
    pub fn add_events(&mut self, events: &[TradeEvent], meta: &PairMeta) {
        for e in events {
            self.sum.add(meta.pip_spread(e.bid, e.ask));
        }
        self.n += events.len() as u64;
    }

    pub fn merge(&mut self, other: &SpreadAccumulator) {
        self.sum.merge(&other.sum);
        self.n += other.n;
    }

    pub fn n_obs(&self) -> u64 {
        self.n
    }

    pub fn finish(&self, symbol: &str, year: i32) -> Result<SpreadStat, ResponseError> {
        if self.n == 0 {
            return Err(ResponseError::NoData);
        }
        Ok(SpreadStat {
            symbol: symbol.to_string(),
            year,
            avg_pip_spread: self.sum.value() / self.n as f64,
            n_obs: self.n,
        })
    }
}

/// Mean pip spread of `events` (already restricted to market time).
pub fn pip_spread_stat(
    events: &[TradeEvent],
    meta: &PairMeta,
    year: i32,
) -> Result<SpreadStat, ResponseError> {
    let mut acc = SpreadAccumulator::default();
    acc.add_events(events, meta);
    acc.finish(&meta.symbol, year)
}

/// A group-averaged curve. `curve.counts[tau - 1]` is the number of member
/// pairs with data at that lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCurve {
    pub group: usize,
    pub members: Vec<String>,
    pub curve: ResponseCurve,
}

/// Unweighted per-lag mean of member curves, for groups `1..=n_groups`.
/// Empty groups are skipped with a warning. Pair order does not matter:
/// members are summed in symbol order.
pub fn group_average(
    curves: &BTreeMap<String, ResponseCurve>,
    groups: &BTreeMap<String, usize>,
    n_groups: usize,
) -> Result<Vec<GroupCurve>, ResponseError> {
    let Some(first) = curves.values().next() else {
        return Ok(Vec::new());
    };
    if curves
        .values()
        .any(|c| c.scale != first.scale || c.tau_max() != first.tau_max())
    {
        return Err(ResponseError::GridMismatch);
    }
    let tau_max = first.tau_max();
    let mut out = Vec::new();
    for g in 1..=n_groups {
        let members: Vec<(&String, &ResponseCurve)> = curves
            .iter()
            .filter(|(sym, _)| groups.get(*sym) == Some(&g))
            .collect();
        if members.is_empty() {
            log::warn!("{}", ResponseError::EmptyGroup(g));
            continue;
        }
        let mut values = Vec::with_capacity(tau_max);
        let mut counts = Vec::with_capacity(tau_max);
        for tau in 1..=tau_max {
            let sum: NeumaierSum = members.iter().filter_map(|(_, c)| c.value(tau)).collect();
            let n = members
                .iter()
                .filter(|(_, c)| c.value(tau).is_some())
                .count() as u64;
            values.push((n > 0).then(|| sum.value() / n as f64));
            counts.push(n);
        }
        out.push(GroupCurve {
            group: g,
            members: members.iter().map(|(s, _)| (*s).clone()).collect(),
            curve: ResponseCurve {
                scale: first.scale,
                zero_handling: first.zero_handling,
                values,
                counts,
            },
        });
    }
    Ok(out)
}

/// JSON form of a curve with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    pub year: i32,
    pub scale: Scale,
    pub zero_handling: ZeroHandling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    pub tau_max: usize,
    pub values: Vec<Option<f64>>,
    pub counts: Vec<u64>,
}

impl CurveDocument {
    pub fn for_pair(pair: &str, year: i32, curve: &ResponseCurve) -> Self {
        CurveDocument {
            pair: Some(pair.to_string()),
            year,
            scale: curve.scale,
            zero_handling: curve.zero_handling,
            group: None,
            members: None,
            tau_max: curve.tau_max(),
            values: curve.values.clone(),
            counts: curve.counts.clone(),
        }
    }

    pub fn for_group(year: i32, group: &GroupCurve) -> Self {
        CurveDocument {
            pair: None,
            group: Some(group.group),
            members: Some(group.members.clone()),
            ..Self::for_pair("", year, &group.curve)
        }
    }
}
