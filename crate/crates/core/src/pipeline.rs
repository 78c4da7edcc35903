//! Week-by-week analysis of one pair over one year.

use serde::Serialize;

use crate::ingest::{MarketWeek, WeekTicks};
use crate::pairmeta::PairMeta;
use crate::response::{
    ResponseCurve, ResponseError, ResponseEstimator, ReturnKind, Scale, SpreadAccumulator,
    SpreadStat, WeekWeighting, ZeroHandling,
};
use crate::signs::{
    classify_physical_scale, classify_trade_scale, SignDiagnostics, SignSeriesTrade,
};
use crate::timescales::{slot_counts, to_physical_scale, to_trade_scale, SecondSample, TradeEvent};

/// Both time-scale views of one week, with signs.
#[derive(Debug, Clone)]
pub struct WeekSeries {
    pub week: MarketWeek,
    pub events: Vec<TradeEvent>,
    pub trade_signs: SignSeriesTrade,
    /// Empty unless the physical scale was requested.
    pub samples: Vec<SecondSample>,
    pub diagnostics: SignDiagnostics,
}

impl WeekSeries {
    pub fn midpoints(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.midpoint).collect()
    }

    pub fn physical_midpoints(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.midpoint).collect()
    }

    pub fn physical_signs(&self) -> Vec<i8> {
        self.samples.iter().map(|s| s.sign).collect()
    }
}

pub fn analyze_week(week: &WeekTicks, physical: bool) -> WeekSeries {
    let events = to_trade_scale(&week.ticks);
    let mids: Vec<f64> = events.iter().map(|e| e.midpoint).collect();
    let trade_signs = classify_trade_scale(&mids);
    let mut diagnostics = SignDiagnostics {
        undefined_trade_signs: trade_signs.n_undefined() as u64,
        ..Default::default()
    };
    let mut samples = Vec::new();
    if physical && !events.is_empty() {
        samples = to_physical_scale(&events, &week.week);
        let counts = slot_counts(&events, &week.week);
        let (signs, diag) = classify_physical_scale(&trade_signs, &counts)
            .expect("every event of a scanned week lies inside its window");
        signs.apply_to(&mut samples);
        diagnostics = diag;
    }
    WeekSeries {
        week: week.week,
        events,
        trade_signs,
        samples,
        diagnostics,
    }
}

/// Estimation settings shared by every pair-year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    pub tau_max: usize,
    pub trade: bool,
    pub physical: bool,
    pub zero_handling: ZeroHandling,
    pub weighting: WeekWeighting,
    pub return_kind: ReturnKind,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            tau_max: crate::response::DEFAULT_TAU_MAX,
            trade: true,
            physical: true,
            zero_handling: ZeroHandling::Exclude,
            weighting: WeekWeighting::Pooled,
            return_kind: ReturnKind::Relative,
        }
    }
}

/// Streaming accumulator for one pair-year.
pub struct PairYearAccumulator {
    meta: PairMeta,
    year: i32,
    trade: Option<ResponseEstimator>,
    physical: Option<ResponseEstimator>,
    spread: SpreadAccumulator,
    diagnostics: SignDiagnostics,
    weeks: u64,
}

/// Finished estimates of one pair-year.
#[derive(Debug, Clone)]
pub struct PairYearResult {
    pub symbol: String,
    pub year: i32,
    pub weeks: u64,
    pub trade: Option<Result<ResponseCurve, ResponseError>>,
    pub physical: Option<Result<ResponseCurve, ResponseError>>,
    pub spread: Result<SpreadStat, ResponseError>,
    pub diagnostics: SignDiagnostics,
}

impl PairYearResult {
    pub fn curve(&self, scale: Scale) -> Option<&Result<ResponseCurve, ResponseError>> {
        match scale {
            Scale::Trade => self.trade.as_ref(),
            Scale::Physical => self.physical.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairYearSummary<'a> {
    pub symbol: &'a str,
    pub year: i32,
    pub weeks: u64,
    pub diagnostics: &'a SignDiagnostics,
}

impl PairYearAccumulator {
    pub fn new(meta: &PairMeta, year: i32, cfg: &EstimationConfig) -> Result<Self, ResponseError> {
        let make = |scale| -> Result<ResponseEstimator, ResponseError> {
            Ok(
                ResponseEstimator::new(scale, cfg.tau_max, cfg.zero_handling)?
                    .with_weighting(cfg.weighting)
                    .with_return_kind(cfg.return_kind),
            )
        };
        Ok(PairYearAccumulator {
            meta: meta.clone(),
            year,
            trade: cfg.trade.then(|| make(Scale::Trade)).transpose()?,
            physical: cfg.physical.then(|| make(Scale::Physical)).transpose()?,
            spread: SpreadAccumulator::default(),
            diagnostics: SignDiagnostics::default(),
            weeks: 0,
        })
    }

    pub fn add_week(&mut self, week: &WeekTicks) {
        let series = analyze_week(week, self.physical.is_some());
        self.add_series(&series);
    }

    pub fn add_series(&mut self, series: &WeekSeries) {
        if series.events.is_empty() {
            return;
        }
        self.weeks += 1;
        self.spread.add_events(&series.events, &self.meta);
        self.diagnostics.merge(&series.diagnostics);
        if let Some(est) = self.trade.as_mut() {
            est.add_week(&series.midpoints(), series.trade_signs.as_slice())
                .expect("aligned by construction");
        }
        if let Some(est) = self.physical.as_mut() {
            est.add_week(&series.physical_midpoints(), &series.physical_signs())
                .expect("aligned by construction");
        }
    }

    pub fn finish(&self) -> PairYearResult {
        PairYearResult {
            symbol: self.meta.symbol.clone(),
            year: self.year,
            weeks: self.weeks,
            trade: self.trade.as_ref().map(ResponseEstimator::finish),
            physical: self.physical.as_ref().map(ResponseEstimator::finish),
            spread: self.spread.finish(&self.meta.symbol, self.year),
            diagnostics: self.diagnostics,
        }
    }
}
