//! Synthetic quote streams with known trade signs, and the brute-force
//! response oracle used by the tests.
//!
//! The flow model is a test fixture, not a market model. Signs follow a
//! two-state Markov chain that repeats the previous sign with probability
//! `sign_autocorr`. Each trade moves the midpoint by `impact_pips` in its
//! direction; a fraction `permanent_fraction` of that move is permanent and
//! the rest decays geometrically by `impact_decay` per trade. Optional
//! observation noise is added to each quoted midpoint.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{LineParser, MarketWeek, QuoteTick};
use crate::response::{ResponseCurve, Scale, ZeroHandling};

/// Oracle size cap, in anchors.
pub const BRUTE_FORCE_MAX_ANCHORS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid flow model: {0}")]
    InvalidModel(String),
    #[error("midpoint path left the positive half-line at event {0}")]
    NonPositivePrice(usize),
    #[error("oracle input has {anchors} anchors, cap is {cap}")]
    TooLarge { anchors: usize, cap: usize },
    #[error("no admissible anchors")]
    NoData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowModel {
    pub seed: u64,
    pub n_events: usize,
    /// Probability that a sign repeats the previous one, in `[0, 1)`.
    pub sign_autocorr: f64,
    /// Midpoint move per trade, in pips.
    pub impact_pips: f64,
    /// Half-width of the uniform midpoint noise, in pips.
    pub noise_pips: f64,
    pub base_price: f64,
    pub spread_pips: f64,
    pub scaling_factor: u32,
    /// Share of each move that never decays, in `[0, 1]`.
    pub permanent_fraction: f64,
    /// Per-trade decay factor of the transient share, in `[0, 1)`.
    pub impact_decay: f64,
}

impl Default for FlowModel {
    fn default() -> Self {
        FlowModel {
            seed: 1,
            n_events: 10_000,
            sign_autocorr: 0.8,
            impact_pips: 1.0,
            noise_pips: 0.0,
            base_price: 1.1,
            spread_pips: 1.0,
            scaling_factor: 10_000,
            permanent_fraction: 1.0,
            impact_decay: 0.0,
        }
    }
}

impl FlowModel {
    /// Parameters whose response rises to an interior maximum and then
    /// decays: persistent signs with partly transient impact.
    pub fn hump() -> Self {
        FlowModel {
            permanent_fraction: 0.6,
            impact_decay: 0.99,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |msg: &str| Err(SynthError::InvalidModel(msg.to_string()));
        let finite = [
            self.sign_autocorr,
            self.impact_pips,
            self.noise_pips,
            self.base_price,
            self.spread_pips,
            self.permanent_fraction,
            self.impact_decay,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("parameters must be finite");
        }
        if !(0.0..1.0).contains(&self.sign_autocorr) {
            return fail("sign_autocorr must lie in [0, 1)");
        }
        if self.impact_pips < 0.0 || self.noise_pips < 0.0 {
            return fail("impact_pips and noise_pips must be non-negative");
        }
        if self.base_price <= 0.0 {
            return fail("base_price must be positive");
        }
        if self.spread_pips <= 0.0 {
            return fail("spread_pips must be positive");
        }
        if self.scaling_factor == 0 {
            return fail("scaling_factor must be positive");
        }
        if !(0.0..=1.0).contains(&self.permanent_fraction) {
            return fail("permanent_fraction must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.impact_decay) {
            return fail("impact_decay must lie in [0, 1)");
        }
        Ok(())
    }

    fn pip(&self) -> f64 {
        1.0 / f64::from(self.scaling_factor)
    }
}

/// Generated week: valid ticks plus the signs that drove them.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWeek {
    pub week: MarketWeek,
    pub ticks: Vec<QuoteTick>,
    pub true_signs: Vec<i8>,
}

/// Generates one week of quotes. Timestamps are strictly increasing and
/// drawn uniformly over the market window.
pub fn generate(model: &FlowModel, week: MarketWeek) -> Result<SyntheticWeek, SynthError> {
    model.validate()?;
    let span = (week.end_ms - week.start_ms) as usize;
    if model.n_events > span {
        return Err(SynthError::InvalidModel(format!(
            "{} events do not fit {} distinct milliseconds",
            model.n_events, span
        )));
    }
    let n = model.n_events;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut clock = ChaCha8Rng::seed_from_u64(model.seed);
    clock.set_stream(1);

    let mut offsets: Vec<i64> = (0..n).map(|_| clock.random_range(0..span as i64)).collect();
    offsets.sort_unstable();
    // Bump collisions forward, then back off from the window end if needed.
    for i in 1..n {
        if offsets[i] <= offsets[i - 1] {
            offsets[i] = offsets[i - 1] + 1;
        }
    }
    let last_allowed = span as i64 - 1;
    for i in (0..n).rev() {
        let cap = last_allowed - (n - 1 - i) as i64;
        if offsets[i] > cap {
            offsets[i] = cap;
        }
    }

    let pip = model.pip();
    let half_spread = model.spread_pips * pip / 2.0;
    let theta = model.permanent_fraction;
    let mut ticks = Vec::with_capacity(n);
    let mut true_signs = Vec::with_capacity(n);
    let mut sign: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    let mut permanent = 0.0f64;
    let mut transient = 0.0f64;
    for (i, offset) in offsets.into_iter().enumerate() {
        if i > 0 && !rng.random_bool(model.sign_autocorr) {
            sign = -sign;
        }
        // Drawn unconditionally so the sign path does not depend on noise.
        let u: f64 = rng.random_range(-1.0..=1.0);
        let eps = f64::from(sign);
        permanent += eps;
        transient = transient * model.impact_decay + eps;
        let impact = model.impact_pips * (theta * permanent + (1.0 - theta) * transient);
        let mid = model.base_price + (impact + model.noise_pips * u) * pip;
        let bid = mid - half_spread;
        let ask = mid + half_spread;
        if !(bid > 0.0 && bid < ask) {
            return Err(SynthError::NonPositivePrice(i));
        }
        ticks.push(QuoteTick {
            ts_ms: week.start_ms + offset,
            bid,
            ask,
        });
        true_signs.push(sign);
    }
    Ok(SyntheticWeek {
        week,
        ticks,
        true_signs,
    })
}

/// Writes ticks in the vendor ASCII layout (EST stamps).
pub fn write_ascii<W: Write>(mut out: W, ticks: &[QuoteTick]) -> io::Result<()> {
    let parser = LineParser::default();
    for t in ticks {
        writeln!(out, "{}", parser.format_tick(t))?;
    }
    Ok(())
}

/// Literal double loop over `(tau, week, t)` averaging
/// `r(t-1, tau) * eps(t)`. Plain summation, no shared code with the
/// production estimator.
pub fn brute_force_response(
    weeks: &[(&[f64], &[i8])],
    tau_max: usize,
    scale: Scale,
    zeros: ZeroHandling,
) -> Result<ResponseCurve, SynthError> {
    let include = scale == Scale::Physical && zeros == ZeroHandling::Include;
    let anchors: usize = weeks
        .iter()
        .map(|(_, s)| s.iter().skip(1).filter(|e| include || **e != 0).count())
        .sum();
    if anchors > BRUTE_FORCE_MAX_ANCHORS {
        return Err(SynthError::TooLarge {
            anchors,
            cap: BRUTE_FORCE_MAX_ANCHORS,
        });
    }
    let mut values = Vec::with_capacity(tau_max);
    let mut counts = Vec::with_capacity(tau_max);
    for tau in 1..=tau_max {
        let mut total = 0.0f64;
        let mut n = 0u64;
        for (m, s) in weeks {
            for t in 1..m.len() {
                if s[t] == 0 && !include {
                    continue;
                }
                if t - 1 + tau >= m.len() {
                    continue;
                }
                let r = (m[t - 1 + tau] - m[t - 1]) / m[t - 1];
                total += r * f64::from(s[t]);
                n += 1;
            }
        }
        values.push(if n > 0 { Some(total / n as f64) } else { None });
        counts.push(n);
    }
    if counts.first().copied().unwrap_or(0) == 0 {
        return Err(SynthError::NoData);
    }
    Ok(ResponseCurve {
        scale,
        zero_handling: if scale == Scale::Trade {
            ZeroHandling::Exclude
        } else {
            zeros
        },
        values,
        counts,
    })
}

/// Expected trade-scale response of the permanent-impact model with
/// true signs: `(g / m) * sum_{k < tau} (2 rho - 1)^k`.
pub fn permanent_impact_response(model: &FlowModel, mean_mid: f64, tau: usize) -> f64 {
    let c = 2.0 * model.sign_autocorr - 1.0;
    let g = model.impact_pips * model.pip();
    let geometric: f64 = (0..tau).map(|k| c.powi(k as i32)).sum();
    g / mean_mid * geometric
}

#[cfg(test)]
mod tests {
    use super::*;

    fn week() -> MarketWeek {
        MarketWeek::from_iso(2019, 10).unwrap()
    }

    #[test]
    fn deterministic_for_seed() {
        let m = FlowModel {
            n_events: 2000,
            noise_pips: 0.5,
            ..Default::default()
        };
        assert_eq!(generate(&m, week()).unwrap(), generate(&m, week()).unwrap());
        let other = FlowModel {
            seed: 2,
            ..m.clone()
        };
        assert_ne!(
            generate(&m, week()).unwrap().ticks,
            generate(&other, week()).unwrap().ticks
        );
    }

    #[test]
    fn ticks_are_valid() {
        let w = week();
        let g = generate(
            &FlowModel {
                noise_pips: 2.0,
                ..FlowModel::hump()
            },
            w,
        )
        .unwrap();
        assert_eq!(g.ticks.len(), 10_000);
        assert!(g.ticks.windows(2).all(|p| p[0].ts_ms < p[1].ts_ms));
        assert!(g
            .ticks
            .iter()
            .all(|t| t.bid > 0.0 && t.bid < t.ask && w.contains(t.ts_ms)));
    }

    #[test]
    fn rejects_bad_models() {
        let bad = [
            FlowModel {
                sign_autocorr: 1.0,
                ..Default::default()
            },
            FlowModel {
                sign_autocorr: -0.1,
                ..Default::default()
            },
            FlowModel {
                spread_pips: 0.0,
                ..Default::default()
            },
            FlowModel {
                base_price: -1.0,
                ..Default::default()
            },
            FlowModel {
                impact_decay: 1.0,
                ..Default::default()
            },
            FlowModel {
                permanent_fraction: 1.5,
                ..Default::default()
            },
            FlowModel {
                noise_pips: f64::NAN,
                ..Default::default()
            },
        ];
        for m in bad {
            assert!(
                matches!(generate(&m, week()), Err(SynthError::InvalidModel(_))),
                "{m:?}"
            );
        }
    }

    #[test]
    fn price_must_stay_positive() {
        let m = FlowModel {
            base_price: 0.0002,
            impact_pips: 1.0,
            sign_autocorr: 0.99,
            seed: 3,
            ..Default::default()
        };
        assert!(matches!(
            generate(&m, week()),
            Err(SynthError::NonPositivePrice(_))
        ));
    }

    #[test]
    fn zero_events() {
        let g = generate(
            &FlowModel {
                n_events: 0,
                ..Default::default()
            },
            week(),
        )
        .unwrap();
        assert!(g.ticks.is_empty());
    }

    #[test]
    fn lag_one_autocorrelation() {
        for rho in [0.2, 0.5, 0.8] {
            let m = FlowModel {
                sign_autocorr: rho,
                n_events: 100_000,
                ..Default::default()
            };
            let s = generate(&m, week()).unwrap().true_signs;
            let n = (s.len() - 1) as f64;
            let ac: f64 = s.windows(2).map(|w| f64::from(w[0] * w[1])).sum::<f64>() / n;
            let expected = 2.0 * rho - 1.0;
            let se = ((1.0 - expected * expected) / n).sqrt();
            assert!(
                (ac - expected).abs() < 3.0 * se,
                "rho={rho}: {ac} vs {expected}"
            );
        }
    }

    #[test]
    fn oracle_edge_cases() {
        assert_eq!(
            brute_force_response(&[], 3, Scale::Trade, ZeroHandling::Exclude),
            Err(SynthError::NoData)
        );
        let m = [1.0, 1.5];
        let s = [0i8, -1];
        let c = brute_force_response(&[(&m, &s)], 1, Scale::Trade, ZeroHandling::Exclude).unwrap();
        assert_eq!(c.values, vec![Some(-0.5)]);
        let long_m = vec![1.0; BRUTE_FORCE_MAX_ANCHORS + 2];
        let long_s = vec![1i8; BRUTE_FORCE_MAX_ANCHORS + 2];
        assert!(matches!(
            brute_force_response(
                &[(&long_m, &long_s)],
                1,
                Scale::Trade,
                ZeroHandling::Exclude
            ),
            Err(SynthError::TooLarge { .. })
        ));
    }

    #[test]
    fn ascii_round_trip() {
        let g = generate(
            &FlowModel {
                n_events: 100,
                noise_pips: 0.3,
                ..Default::default()
            },
            week(),
        )
        .unwrap();
        let mut out = Vec::new();
        write_ascii(&mut out, &g.ticks).unwrap();
        let text = String::from_utf8(out).unwrap();
        let parsed: Vec<QuoteTick> = text
            .lines()
            .map(|l| crate::ingest::parse_line(l).unwrap())
            .collect();
        assert_eq!(parsed, g.ticks);
    }
}
