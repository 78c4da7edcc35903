//! Trade-time and physical-time views of one market week.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::ingest::{MarketWeek, QuoteTick};

/// One inferred trade: a change of the best quotes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeEvent {
    /// 0-based index within the week.
    pub n: usize,
    pub ts_ms: i64,
    pub bid: f64,
    pub ask: f64,
    pub midpoint: f64,
}

/// One second of market time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondSample {
    /// Seconds since the week start.
    pub sec: usize,
    /// Last known midpoint at the end of the second.
    pub midpoint: f64,
    /// Net trade sign, filled in by [`crate::signs`].
    pub sign: i8,
    pub n_trades: u32,
}

/// Collapses repeated quotes: a new event starts whenever `(bid, ask)`
/// differs from the previous tick. The first tick always opens the series.
pub fn to_trade_scale(ticks: &[QuoteTick]) -> Vec<TradeEvent> {
    let mut events: Vec<TradeEvent> = Vec::with_capacity(ticks.len());
    let mut prev: Option<(f64, f64)> = None;
    for t in ticks {
        if prev == Some((t.bid, t.ask)) {
            continue;
        }
        prev = Some((t.bid, t.ask));
        events.push(TradeEvent {
            n: events.len(),
            ts_ms: t.ts_ms,
            bid: t.bid,
            ask: t.ask,
            midpoint: t.midpoint(),
        });
    }
    events
}

/// Number of events in each second of `week`. Events outside the window
/// are ignored.
pub fn slot_counts(events: &[TradeEvent], week: &MarketWeek) -> Vec<u32> {
    let mut counts = vec![0u32; week.n_seconds()];
    for e in events {
        if week.contains(e.ts_ms) {
            counts[((e.ts_ms - week.start_ms) / 1000) as usize] += 1;
        }
    }
    counts
}

/// Previous-tick sampling on the one-second grid `[t, t+1)`.
///
/// Seconds before the first event carry the first event's midpoint. Signs
/// are left at 0. An empty event list yields an empty series.
pub fn to_physical_scale(events: &[TradeEvent], week: &MarketWeek) -> Vec<SecondSample> {
    let inside: Vec<&TradeEvent> = events.iter().filter(|e| week.contains(e.ts_ms)).collect();
    let Some(first) = inside.first() else {
        return Vec::new();
    };
    let n_slots = week.n_seconds();
    let mut samples = Vec::with_capacity(n_slots);
    let mut mid = first.midpoint;
    let mut it = inside.iter().peekable();
    for sec in 0..n_slots {
        let slot_end = week.start_ms + (sec as i64 + 1) * 1000;
        let mut n_trades = 0u32;
        while let Some(e) = it.next_if(|e| e.ts_ms < slot_end) {
            mid = e.midpoint;
            n_trades += 1;
        }
        samples.push(SecondSample {
            sec,
            midpoint: mid,
            sign: 0,
            n_trades,
        });
    }
    samples
}

/// Writes `index,timestamp_ms,midpoint,n_trades` rows for the trade series.
pub fn write_trade_csv<W: Write>(mut out: W, events: &[TradeEvent]) -> io::Result<()> {
    writeln!(out, "index,timestamp_ms,midpoint,n_trades")?;
    for e in events {
        writeln!(out, "{},{},{},1", e.n, e.ts_ms, e.midpoint)?;
    }
    Ok(())
}

/// Same columns for the physical series; the timestamp is the slot start.
pub fn write_physical_csv<W: Write>(
    mut out: W,
    samples: &[SecondSample],
    week: &MarketWeek,
) -> io::Result<()> {
    writeln!(out, "index,timestamp_ms,midpoint,n_trades")?;
    for s in samples {
        let ts = week.start_ms + s.sec as i64 * 1000;
        writeln!(out, "{},{},{},{}", s.sec, ts, s.midpoint, s.n_trades)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn week() -> MarketWeek {
        MarketWeek::from_iso(2019, 2).unwrap()
    }

    fn tick(ts_ms: i64, bid: f64, ask: f64) -> QuoteTick {
        QuoteTick { ts_ms, bid, ask }
    }

    #[test]
    fn duplicate_quotes_collapse() {
        let s = week().start_ms;
        let ticks = [
            tick(s, 1.10, 1.12),
            tick(s + 1, 1.10, 1.12),
            tick(s + 2, 1.11, 1.13),
        ];
        let events = to_trade_scale(&ticks);
        assert_eq!(events.len(), 2);
        assert_eq!(events[1].n, 1);
        assert_eq!(events[1].ts_ms, s + 2);
    }

    #[test]
    fn spread_only_change_is_an_event() {
        let s = week().start_ms;
        let ticks = [tick(s, 1.0, 1.5), tick(s + 1, 0.75, 1.75)];
        let events = to_trade_scale(&ticks);
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].midpoint, events[1].midpoint);
    }

    #[test]
    fn midpoint_example() {
        let e = to_trade_scale(&[tick(0, 1.1020, 1.1022)]);
        assert_eq!(e.len(), 1);
        assert!((e[0].midpoint - 1.1021).abs() < 1e-15);
        assert!(to_trade_scale(&[]).is_empty());
    }

    #[test]
    fn forward_fill_and_counts() {
        let w = week();
        let s = w.start_ms;
        let ticks = [
            tick(s + 10, 1.0, 1.2),
            tick(s + 400, 1.1, 1.3),
            tick(s + 999, 1.2, 1.4),
        ];
        let events = to_trade_scale(&ticks);
        let phys = to_physical_scale(&events, &w);
        assert_eq!(phys.len(), w.n_seconds());
        assert_eq!(phys[0].n_trades, 3);
        assert_eq!(phys[1].n_trades, 0);
        assert_eq!(phys[1].midpoint, phys[0].midpoint);
        assert!((phys[0].midpoint - 1.3).abs() < 1e-15);
    }

    #[test]
    fn seeded_prefix() {
        let w = week();
        let ticks = [
            tick(w.start_ms + 3_600_000, 1.0, 1.2),
            tick(w.start_ms + 3_600_500, 1.1, 1.2),
        ];
        let phys = to_physical_scale(&to_trade_scale(&ticks), &w);
        assert!(phys[..3600]
            .iter()
            .all(|p| p.midpoint == 1.1 && p.n_trades == 0));
        assert_eq!(phys[3600].n_trades, 2);
        assert_eq!(phys[3600].midpoint, 1.15);
    }

    #[test]
    fn empty_week() {
        assert!(to_physical_scale(&[], &week()).is_empty());
    }

    #[test]
    fn csv_dump() {
        let w = week();
        let events = to_trade_scale(&[tick(w.start_ms, 1.0, 1.2)]);
        let mut out = Vec::new();
        write_trade_csv(&mut out, &events).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            format!(
                "index,timestamp_ms,midpoint,n_trades\n0,{},1.1,1\n",
                w.start_ms
            )
        );
    }
}
