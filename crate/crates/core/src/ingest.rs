//! Tick-file ingestion.
//!
//! Records look like `YYYYMMDD HHMMSSNNN,bid,ask`. Timestamps are stamped
//! in a fixed-offset zone (UTC-5 by default) while the market-week window
//! is defined in New York local time with daylight saving.
//!
//! Reading is single pass: [`WeekScanner`] holds at most one market week of
//! ticks in memory at a time.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Cursor, Read};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveTime, TimeZone, Utc, Weekday};
use chrono_tz::America::New_York;
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairmeta::PairMeta;

/// Offset of the vendor's timestamps: EST, no daylight saving.
pub const DEFAULT_UTC_OFFSET_MINUTES: i32 = -5 * 60;

const MS_PER_DAY: i64 = 86_400_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuoteTick {
    /// Milliseconds since the Unix epoch (UTC).
    pub ts_ms: i64,
    pub bid: f64,
    pub ask: f64,
}

impl QuoteTick {
    pub fn midpoint(&self) -> f64 {
        (self.bid + self.ask) / 2.0
    }

    pub fn spread(&self) -> f64 {
        self.ask - self.bid
    }
}

/// Why a single line was rejected.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LineError {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("crossed or locked quote: bid {bid} >= ask {ask}")]
    Crossed { bid: f64, ask: f64 },
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Stream(#[from] io::Error),
}

/// Parses vendor lines into ticks.
#[derive(Debug, Clone, Copy)]
pub struct LineParser {
    offset_ms: i64,
}

impl Default for LineParser {
    fn default() -> Self {
        Self::with_offset_minutes(DEFAULT_UTC_OFFSET_MINUTES)
    }
}

fn digits(s: &[u8]) -> Option<u32> {
    s.iter().try_fold(0u32, |acc, &b| {
        b.is_ascii_digit().then(|| acc * 10 + u32::from(b - b'0'))
    })
}

impl LineParser {
    /// `minutes` is the stamp zone's offset from UTC (EST is -300).
    pub fn with_offset_minutes(minutes: i32) -> Self {
        LineParser {
            offset_ms: i64::from(minutes) * 60_000,
        }
    }

    /// Parses `YYYYMMDD HHMMSSNNN` into epoch milliseconds.
    pub fn parse_timestamp(&self, field: &str) -> Result<i64, LineError> {
        let bad = || LineError::Malformed(format!("invalid timestamp `{field}`"));
        let b = field.as_bytes();
        if b.len() != 18 || b[8] != b' ' {
            return Err(bad());
        }
        let year = digits(&b[0..4]).ok_or_else(bad)?;
        let month = digits(&b[4..6]).ok_or_else(bad)?;
        let day = digits(&b[6..8]).ok_or_else(bad)?;
        let hh = digits(&b[9..11]).ok_or_else(bad)?;
        let mm = digits(&b[11..13]).ok_or_else(bad)?;
        let ss = digits(&b[13..15]).ok_or_else(bad)?;
        let ms = digits(&b[15..18]).ok_or_else(bad)?;
        if hh > 23 || mm > 59 || ss > 59 {
            return Err(bad());
        }
        let date = NaiveDate::from_ymd_opt(year as i32, month, day).ok_or_else(bad)?;
        let days = i64::from(date.num_days_from_ce() - EPOCH_DAYS_FROM_CE);
        let local_ms = days * MS_PER_DAY
            + i64::from(hh) * 3_600_000
            + i64::from(mm) * 60_000
            + i64::from(ss) * 1_000
            + i64::from(ms);
        Ok(local_ms - self.offset_ms)
    }

    pub fn parse_line(&self, line: &str) -> Result<QuoteTick, LineError> {
        let line = line.trim_end_matches(['\r', '\n']);
        let mut fields = line.split(',');
        let (Some(ts), Some(bid), Some(ask), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(LineError::Malformed(format!(
                "expected 3 comma-separated fields in `{line}`"
            )));
        };
        let ts_ms = self.parse_timestamp(ts)?;
        let price = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|p| p.is_finite() && *p > 0.0)
                .ok_or_else(|| LineError::Malformed(format!("invalid price `{s}`")))
        };
        let bid = price(bid)?;
        let ask = price(ask)?;
        if bid >= ask {
            return Err(LineError::Crossed { bid, ask });
        }
        Ok(QuoteTick { ts_ms, bid, ask })
    }

    /// Formats a tick back into the vendor layout. Prices use the shortest
    /// representation that parses back to the same value.
    pub fn format_tick(&self, tick: &QuoteTick) -> String {
        let local = DateTime::<Utc>::from_timestamp_millis(tick.ts_ms + self.offset_ms)
            .expect("timestamp in range")
            .naive_utc();
        format!(
            "{},{},{}",
            local.format("%Y%m%d %H%M%S%3f"),
            tick.bid,
            tick.ask
        )
    }
}

const EPOCH_DAYS_FROM_CE: i32 = 719_163;

/// Parses one line with the default EST stamp zone.
pub fn parse_line(line: &str) -> Result<QuoteTick, LineError> {
    LineParser::default().parse_line(line)
}

/// One trading week: Sunday 19:10:00 to Friday 16:50:00 New York local time,
/// start inclusive, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarketWeek {
    pub iso_year: i32,
    pub iso_week: u32,
    pub start_ms: i64,
    pub end_ms: i64,
}

fn ny_to_utc_ms(date: NaiveDate, h: u32, m: u32) -> i64 {
    let naive = date.and_time(NaiveTime::from_hms_opt(h, m, 0).expect("valid time"));
    // 19:10 and 16:50 never fall inside a DST transition gap or overlap.
    New_York
        .from_local_datetime(&naive)
        .single()
        .expect("unambiguous local time")
        .timestamp_millis()
}

impl MarketWeek {
    /// Week whose Friday is `friday`.
    pub fn ending_on(friday: NaiveDate) -> Option<Self> {
        if friday.weekday() != Weekday::Fri {
            return None;
        }
        let sunday = friday - Duration::days(5);
        let iso = friday.iso_week();
        Some(MarketWeek {
            iso_year: iso.year(),
            iso_week: iso.week(),
            start_ms: ny_to_utc_ms(sunday, 19, 10),
            end_ms: ny_to_utc_ms(friday, 16, 50),
        })
    }

    /// Week whose Monday-to-Friday part lies in ISO week `(year, week)`.
    pub fn from_iso(year: i32, week: u32) -> Option<Self> {
        NaiveDate::from_isoywd_opt(year, week, Weekday::Fri).and_then(Self::ending_on)
    }

    /// The week whose window contains `ts_ms`, if any.
    pub fn containing(ts_ms: i64) -> Option<Self> {
        let local = Utc
            .timestamp_millis_opt(ts_ms)
            .single()?
            .with_timezone(&New_York);
        let date = local.date_naive();
        let friday = match date.weekday() {
            Weekday::Sat => return None,
            Weekday::Sun => date + Duration::days(5),
            wd => date + Duration::days(4 - i64::from(wd.num_days_from_monday())),
        };
        Self::ending_on(friday).filter(|w| w.contains(ts_ms))
    }

    pub fn contains(&self, ts_ms: i64) -> bool {
        self.start_ms <= ts_ms && ts_ms < self.end_ms
    }

    /// Number of whole seconds in the window.
    pub fn n_seconds(&self) -> usize {
        ((self.end_ms - self.start_ms) / 1000) as usize
    }

    pub fn friday(&self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.iso_year, self.iso_week, Weekday::Fri)
            .expect("week built from a valid date")
    }

    pub fn next(&self) -> Self {
        Self::ending_on(self.friday() + Duration::days(7)).expect("friday + 7 is a friday")
    }

    /// `2019-W02` style label.
    pub fn week_id(&self) -> String {
        format!("{}-W{:02}", self.iso_year, self.iso_week)
    }
}

/// Keeps only ticks inside `week`, preserving order.
pub fn market_week_filter<I>(ticks: I, week: MarketWeek) -> impl Iterator<Item = QuoteTick>
where
    I: IntoIterator<Item = QuoteTick>,
{
    ticks.into_iter().filter(move |t| week.contains(t.ts_ms))
}

/// Exact counters for one ingestion pass.
///
/// `lines_total == ticks + lines_bad + crossed` always holds; ticks that
/// parsed but fall outside every market week are counted in
/// `outside_window` (a subset of `ticks`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    pub files: usize,
    pub lines_total: u64,
    pub ticks: u64,
    pub lines_bad: u64,
    pub crossed: u64,
    pub outside_window: u64,
    pub weeks_seen: u64,
    pub empty_files: usize,
}

impl IngestStats {
    pub fn merge(&mut self, other: &IngestStats) {
        self.files += other.files;
        self.lines_total += other.lines_total;
        self.ticks += other.ticks;
        self.lines_bad += other.lines_bad;
        self.crossed += other.crossed;
        self.outside_window += other.outside_window;
        self.weeks_seen += other.weeks_seen;
        self.empty_files += other.empty_files;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Streams valid ticks out of a line source, counting every rejection.
pub struct TickReader<R> {
    reader: R,
    parser: LineParser,
    buf: String,
    last_ts: Option<i64>,
    stats: IngestStats,
}

impl<R: BufRead> TickReader<R> {
    pub fn new(reader: R) -> Self {
        Self::with_parser(reader, LineParser::default())
    }

    pub fn with_parser(reader: R, parser: LineParser) -> Self {
        TickReader {
            reader,
            parser,
            buf: String::new(),
            last_ts: None,
            stats: IngestStats::default(),
        }
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn into_stats(self) -> IngestStats {
        self.stats
    }
}

impl<R: BufRead> Iterator for TickReader<R> {
    type Item = io::Result<QuoteTick>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e)),
            }
            let line = self.buf.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() {
                continue;
            }
            self.stats.lines_total += 1;
            match self.parser.parse_line(line) {
                Ok(tick) => {
                    // Equal stamps keep file order; going backwards is a bad line.
                    if self.last_ts.is_some_and(|last| tick.ts_ms < last) {
                        self.stats.lines_bad += 1;
                        continue;
                    }
                    self.last_ts = Some(tick.ts_ms);
                    self.stats.ticks += 1;
                    return Some(Ok(tick));
                }
                Err(LineError::Malformed(_)) => self.stats.lines_bad += 1,
                Err(LineError::Crossed { .. }) => self.stats.crossed += 1,
            }
        }
    }
}

/// Ticks of one market week.
#[derive(Debug, Clone, PartialEq)]
pub struct WeekTicks {
    pub week: MarketWeek,
    pub ticks: Vec<QuoteTick>,
}

/// Groups a tick stream into market weeks, one week in memory at a time.
pub struct WeekScanner<R> {
    reader: TickReader<R>,
    current: Option<WeekTicks>,
    done: bool,
}

impl<R: BufRead> WeekScanner<R> {
    pub fn new(reader: TickReader<R>) -> Self {
        WeekScanner {
            reader,
            current: None,
            done: false,
        }
    }

    pub fn stats(&self) -> &IngestStats {
        self.reader.stats()
    }

    pub fn into_stats(self) -> IngestStats {
        self.reader.into_stats()
    }
}

impl<R: BufRead> Iterator for WeekScanner<R> {
    type Item = io::Result<WeekTicks>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let tick = match self.reader.next() {
                None => {
                    self.done = true;
                    return self.current.take().map(Ok);
                }
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                Some(Ok(t)) => t,
            };
            if let Some(cur) = self.current.as_mut() {
                if cur.week.contains(tick.ts_ms) {
                    cur.ticks.push(tick);
                    continue;
                }
            }
            let Some(week) = MarketWeek::containing(tick.ts_ms) else {
                self.reader.stats.outside_window += 1;
                continue;
            };
            self.reader.stats.weeks_seen += 1;
            let fresh = WeekTicks {
                week,
                ticks: vec![tick],
            };
            if let Some(done) = self.current.replace(fresh) {
                return Some(Ok(done));
            }
        }
    }
}

fn open_one(path: &Path) -> Result<Box<dyn Read + Send>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = BufReader::new(File::open(path).map_err(io_err)?);
    let gz = file.fill_buf().map_err(io_err)?.starts_with(&[0x1f, 0x8b]);
    Ok(if gz {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    })
}

/// Opens files (plain or gzip) as one line stream, in the given order.
pub fn open_sources(paths: &[PathBuf]) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let mut chained: Box<dyn Read + Send> = Box::new(io::empty());
    for path in paths {
        // Guards against a file that lacks a trailing newline.
        chained = Box::new(chained.chain(open_one(path)?).chain(Cursor::new(b"\n")));
    }
    Ok(Box::new(BufReader::with_capacity(1 << 16, chained)))
}

/// Scans `paths` (chronologically ordered, one pair) and hands every market
/// week to `visit`. Weeks that straddle two files are kept whole.
pub fn scan_files<F>(
    paths: &[PathBuf],
    pair: Option<&PairMeta>,
    parser: LineParser,
    mut visit: F,
) -> Result<IngestStats, IngestError>
where
    F: FnMut(WeekTicks),
{
    let mut scanner = WeekScanner::new(TickReader::with_parser(open_sources(paths)?, parser));
    for week in scanner.by_ref() {
        visit(week?);
    }
    let mut stats = scanner.into_stats();
    stats.files = paths.len();
    stats.symbol = pair.map(|p| p.symbol.clone());
    if stats.lines_total == 0 {
        stats.empty_files = paths.len();
        log::warn!("no tick lines found in {:?}", paths);
    }
    Ok(stats)
}

/// Single-file form of [`scan_files`] with the default stamp zone.
pub fn scan_file<F>(path: &Path, pair: &PairMeta, visit: F) -> Result<IngestStats, IngestError>
where
    F: FnMut(WeekTicks),
{
    scan_files(
        &[path.to_path_buf()],
        Some(pair),
        LineParser::default(),
        visit,
    )
}
