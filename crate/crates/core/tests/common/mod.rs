#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime, TimeZone, Utc};
use chrono_tz::America::New_York;
use fx_response::ingest::{LineParser, QuoteTick};

/// Seconds of `[Sun 19:10, Fri 16:50)` New York time for the week ending
/// on `friday`, counted one UTC second at a time.
pub fn brute_force_window_seconds(friday: NaiveDate) -> usize {
    let open = NaiveDateTime::new(
        friday - Duration::days(5),
        NaiveTime::from_hms_opt(19, 10, 0).unwrap(),
    );
    let close = NaiveDateTime::new(friday, NaiveTime::from_hms_opt(16, 50, 0).unwrap());
    let from = Utc
        .from_utc_datetime(&NaiveDateTime::new(
            friday - Duration::days(7),
            NaiveTime::MIN,
        ))
        .timestamp();
    let to = from + 9 * 86_400;
    (from..to)
        .filter(|&s| {
            let local = Utc
                .timestamp_opt(s, 0)
                .unwrap()
                .with_timezone(&New_York)
                .naive_local();
            open <= local && local < close
        })
        .count()
}

/// Milliseconds since the epoch of a New York wall-clock time.
pub fn ny_ms(date: NaiveDate, h: u32, m: u32, s: u32, ms: u32) -> i64 {
    let naive = date.and_hms_milli_opt(h, m, s, ms).unwrap();
    New_York
        .from_local_datetime(&naive)
        .single()
        .unwrap()
        .timestamp_millis()
}

pub fn line(ts_ms: i64, bid: f64, ask: f64) -> String {
    LineParser::default().format_tick(&QuoteTick { ts_ms, bid, ask })
}

pub fn write_lines(path: &Path, lines: &[String]) {
    let mut f = std::fs::File::create(path).unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
}
