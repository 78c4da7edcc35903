//! The Sunday 19:10 to Friday 16:50 New York trading window, across DST.
//!
//! ```bash
//! cargo run --example market_week
//! ```

use chrono::{DateTime, Utc};
use fx_response::ingest::MarketWeek;

fn utc(ms: i64) -> DateTime<Utc> {
    DateTime::from_timestamp_millis(ms).expect("in range")
}

fn main() {
    for (year, week) in [(2019, 2), (2019, 10), (2019, 11), (2019, 27)] {
        let w = MarketWeek::from_iso(year, week).expect("valid ISO week");
        println!(
            "{}  {} .. {}  ({} one-second slots)",
            w.week_id(),
            utc(w.start_ms),
            utc(w.end_ms),
            w.n_seconds()
        );
    }

    let w = MarketWeek::from_iso(2019, 2).unwrap();
    let first = w.start_ms;
    let last = w.end_ms - 1;
    println!(
        "start inside: {}, last ms inside: {}, end inside: {}",
        w.contains(first),
        w.contains(last),
        w.contains(w.end_ms)
    );
    println!("following week: {}", w.next().week_id());
}
