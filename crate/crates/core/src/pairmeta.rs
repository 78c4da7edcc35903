//! Currency-pair registry: pip scaling factors, pair categories and the
//! year-dependent pip-spread group thresholds.
//!
//! Both tables are plain text so new pairs or years can be registered
//! without a rebuild. The built-in defaults are embedded from `src/data/`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUILTIN_PAIRS: &str = include_str!("data/pairs.txt");
const BUILTIN_THRESHOLDS: &str = include_str!("data/thresholds.txt");

/// The seven USD-paired majors analysed on both time scales.
pub const MAJORS: [&str; 7] = [
    "EUR/USD", "GBP/USD", "USD/JPY", "AUD/USD", "USD/CHF", "USD/CAD", "NZD/USD",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairError {
    #[error("unknown currency pair `{0}`")]
    UnknownPair(String),
    #[error("no spread-group thresholds registered for year {0}")]
    UnknownYear(i32),
    #[error("invalid pair symbol `{0}`, expected `XXX/YYY`")]
    InvalidSymbol(String),
    #[error("invalid thresholds for year {year}: {reason}")]
    InvalidThresholds { year: i32, reason: String },
    #[error("spread must be finite and non-negative, got {0}")]
    InvalidSpread(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Major,
    Cross,
    Exotic,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "major" => Ok(Category::Major),
            "cross" => Ok(Category::Cross),
            "exotic" => Ok(Category::Exotic),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Category::Major => "Major",
            Category::Cross => "Cross",
            Category::Exotic => "Exotic",
        };
        f.write_str(s)
    }
}

/// One registry entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMeta {
    pub symbol: String,
    pub base: String,
    pub quote: String,
    pub category: Category,
    /// Multiplier that moves the pip to the left of the decimal point.
    pub scaling_factor: u32,
    /// Published group label (1-based) per year, where known.
    pub groups: BTreeMap<i32, usize>,
}

/// Splits `XXX/YYY` into its two currency codes.
pub fn split_symbol(symbol: &str) -> Result<(&str, &str), PairError> {
    let bad = || PairError::InvalidSymbol(symbol.to_string());
    if symbol.len() != 7 || !symbol.is_ascii() {
        return Err(bad());
    }
    let (base, rest) = symbol.split_at(3);
    let quote = rest.strip_prefix('/').ok_or_else(bad)?;
    let is_code = |c: &str| c.bytes().all(|b| b.is_ascii_uppercase());
    if !is_code(base) || !is_code(quote) {
        return Err(bad());
    }
    Ok((base, quote))
}

impl PairMeta {
    pub fn new(symbol: &str, category: Category, scaling_factor: u32) -> Result<Self, PairError> {
        let (base, quote) = split_symbol(symbol)?;
        if scaling_factor == 0 {
            return Err(PairError::Parse {
                line: 0,
                msg: format!("{symbol}: scaling factor must be positive"),
            });
        }
        Ok(PairMeta {
            symbol: symbol.to_string(),
            base: base.to_string(),
            quote: quote.to_string(),
            category,
            scaling_factor,
            groups: BTreeMap::new(),
        })
    }

    /// Price value of one pip.
    pub fn pip_size(&self) -> f64 {
        1.0 / f64::from(self.scaling_factor)
    }

    /// Converts a price difference to pips.
    pub fn to_pips(&self, price_diff: f64) -> f64 {
        price_diff * f64::from(self.scaling_factor)
    }

    /// Converts pips back to a price difference.
    pub fn from_pips(&self, pips: f64) -> f64 {
        pips / f64::from(self.scaling_factor)
    }

    /// Pip bid-ask spread of a single quote.
    pub fn pip_spread(&self, bid: f64, ask: f64) -> f64 {
        self.to_pips(ask - bid)
    }

    /// Symbol without the slash, as used in vendor file names (`EURUSD`).
    pub fn file_code(&self) -> String {
        format!("{}{}", self.base, self.quote)
    }

    pub fn published_group(&self, year: i32) -> Option<usize> {
        self.groups.get(&year).copied()
    }
}

/// Immutable pair registry. Cheap to share behind `&` across workers.
#[derive(Debug, Clone, Default)]
pub struct PairRegistry {
    pairs: BTreeMap<String, PairMeta>,
}

impl PairRegistry {
    /// Registry preloaded with every pair of the published spread table.
    pub fn builtin() -> Self {
        Self::from_table_str(BUILTIN_PAIRS).expect("embedded pair table is valid")
    }

    /// Parses a whitespace-separated table.
    ///
    /// Blank lines and `#` comments are ignored. The header row starts with
    /// `symbol` and names the columns `category scaling_factor` followed by
    /// one column per year; year cells hold `G<k>` or `-` for unknown.
    pub fn from_table_str(text: &str) -> Result<Self, PairError> {
        let mut years: Option<Vec<i32>> = None;
        let mut pairs = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| PairError::Parse { line: line_no, msg };
            if cols[0].eq_ignore_ascii_case("symbol") {
                if cols.len() < 3 {
                    return Err(err("header needs symbol, category, scaling_factor".into()));
                }
                let ys = cols[3..]
                    .iter()
                    .map(|c| {
                        c.parse::<i32>()
                            .map_err(|_| err(format!("bad year column `{c}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                years = Some(ys);
                continue;
            }
            let years = years
                .as_ref()
                .ok_or_else(|| err("row before header".into()))?;
            if cols.len() != 3 + years.len() {
                return Err(err(format!(
                    "expected {} columns, found {}",
                    3 + years.len(),
                    cols.len()
                )));
            }
            let category: Category = cols[1].parse().map_err(err)?;
            let scaling: u32 = cols[2]
                .parse()
                .map_err(|_| err(format!("bad scaling factor `{}`", cols[2])))?;
            let mut meta = PairMeta::new(cols[0], category, scaling).map_err(|e| match e {
                PairError::Parse { msg, .. } => err(msg),
                other => other,
            })?;
            for (year, cell) in years.iter().zip(&cols[3..]) {
                if *cell == "-" {
                    continue;
                }
                let group = cell
                    .strip_prefix(['G', 'g'])
                    .and_then(|g| g.parse::<usize>().ok())
                    .filter(|g| *g >= 1)
                    .ok_or_else(|| err(format!("bad group label `{cell}`")))?;
                meta.groups.insert(*year, group);
            }
            if pairs.insert(meta.symbol.clone(), meta).is_some() {
                return Err(err(format!("duplicate symbol `{}`", cols[0])));
            }
        }
        Ok(PairRegistry { pairs })
    }

    pub fn lookup(&self, symbol: &str) -> Result<&PairMeta, PairError> {
        self.pairs
            .get(symbol)
            .ok_or_else(|| PairError::UnknownPair(symbol.to_string()))
    }

    /// Accepts `EUR/USD` as well as the slash-less `EURUSD`.
    pub fn resolve(&self, name: &str) -> Result<&PairMeta, PairError> {
        if name.len() == 6 && !name.contains('/') {
            let upper = name.to_ascii_uppercase();
            return self.lookup(&format!("{}/{}", &upper[..3], &upper[3..]));
        }
        self.lookup(&name.to_ascii_uppercase())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = &PairMeta> {
        self.pairs.values()
    }
}

/// Cut points for one year. Intervals are `[0, b1), [b1, b2), ..., [bk, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupThresholds {
    pub year: i32,
    boundaries: Vec<f64>,
}

impl GroupThresholds {
    pub fn new(year: i32, boundaries: Vec<f64>) -> Result<Self, PairError> {
        let invalid = |reason: &str| PairError::InvalidThresholds {
            year,
            reason: reason.to_string(),
        };
        if boundaries.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(invalid("cut points must be finite and positive"));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("cut points must be strictly increasing"));
        }
        Ok(GroupThresholds { year, boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn n_groups(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// 1-based group of `spread`; a cut point belongs to the upper interval.
    pub fn group_of(&self, spread: f64) -> usize {
        1 + self.boundaries.partition_point(|b| *b <= spread)
    }

    /// Half-open pip-spread interval of group `g` (1-based).
    pub fn interval(&self, group: usize) -> Option<(f64, f64)> {
        if group == 0 || group > self.n_groups() {
            return None;
        }
        let lo = if group == 1 {
            0.0
        } else {
            self.boundaries[group - 2]
        };
        let hi = self
            .boundaries
            .get(group - 1)
            .copied()
            .unwrap_or(f64::INFINITY);
        Some((lo, hi))
    }
}

/// Thresholds for every registered year.
#[derive(Debug, Clone, Default)]
pub struct ThresholdTable {
    by_year: BTreeMap<i32, GroupThresholds>,
}

impl ThresholdTable {
    pub fn builtin() -> Self {
        Self::from_str(BUILTIN_THRESHOLDS).expect("embedded thresholds are valid")
    }

    /// Registers (or replaces) a year.
    pub fn register(&mut self, thresholds: GroupThresholds) {
        self.by_year.insert(thresholds.year, thresholds);
    }

    pub fn get(&self, year: i32) -> Result<&GroupThresholds, PairError> {
        self.by_year.get(&year).ok_or(PairError::UnknownYear(year))
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_year.keys().copied()
    }

    pub fn assign_group(&self, avg_pip_spread: f64, year: i32) -> Result<usize, PairError> {
        if !avg_pip_spread.is_finite() || avg_pip_spread < 0.0 {
            return Err(PairError::InvalidSpread(avg_pip_spread));
        }
        Ok(self.get(year)?.group_of(avg_pip_spread))
    }
}

impl FromStr for ThresholdTable {
    type Err = PairError;

    /// One `year: b1, b2, ...` entry per line; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut table = ThresholdTable::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| PairError::Parse { line: idx + 1, msg };
            let (year, cuts) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `year: cut, ...`, got `{line}`")))?;
            let year: i32 = year
                .trim()
                .parse()
                .map_err(|_| err(format!("bad year `{}`", year.trim())))?;
            let boundaries = cuts
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| err(format!("bad cut point `{c}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.register(GroupThresholds::new(year, boundaries)?);
        }
        Ok(table)
    }
}

/// Convenience wrapper over the built-in thresholds.
pub fn assign_group(avg_pip_spread: f64, year: i32) -> Result<usize, PairError> {
    ThresholdTable::builtin().assign_group(avg_pip_spread, year)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lookup_known_pairs() {
        let reg = PairRegistry::builtin();
        assert_eq!(reg.lookup("USD/JPY").unwrap().scaling_factor, 100);
        let eur = reg.lookup("EUR/USD").unwrap();
        assert_eq!(eur.scaling_factor, 10000);
        assert_eq!(eur.category, Category::Major);
        assert_eq!(eur.base, "EUR");
        assert_eq!(eur.quote, "USD");
    }

    #[test]
    fn lookup_unknown_pair() {
        let reg = PairRegistry::builtin();
        assert_eq!(
            reg.lookup("ABC/XYZ").unwrap_err(),
            PairError::UnknownPair("ABC/XYZ".into())
        );
    }

    #[test]
    fn resolve_accepts_file_codes() {
        let reg = PairRegistry::builtin();
        assert_eq!(reg.resolve("eurusd").unwrap().symbol, "EUR/USD");
        assert_eq!(reg.resolve("USD/JPY").unwrap().file_code(), "USDJPY");
    }

    #[test]
    fn registry_invariants() {
        let reg = PairRegistry::builtin();
        assert_eq!(reg.len(), 46);
        for p in reg.iter() {
            assert!(
                p.scaling_factor == 100 || p.scaling_factor == 10000,
                "{}",
                p.symbol
            );
            assert_eq!(p.symbol, format!("{}/{}", p.base, p.quote));
            assert_eq!(p.groups.len(), 3);
        }
        for m in MAJORS {
            assert_eq!(reg.lookup(m).unwrap().category, Category::Major);
        }
        assert_eq!(
            reg.iter().filter(|p| p.category == Category::Major).count(),
            7
        );
    }

    #[test]
    fn group_examples() {
        assert_eq!(assign_group(3.0, 2019).unwrap(), 1);
        assert_eq!(assign_group(10.0, 2015).unwrap(), 2);
        assert_eq!(assign_group(0.0, 2011).unwrap(), 1);
        assert_eq!(assign_group(4.0, 2019).unwrap(), 2);
        assert_eq!(assign_group(9.999, 2019).unwrap(), 2);
        assert_eq!(assign_group(10.0, 2019).unwrap(), 3);
        assert_eq!(
            assign_group(1.0, 2008).unwrap_err(),
            PairError::UnknownYear(2008)
        );
        assert!(matches!(
            assign_group(-1.0, 2019),
            Err(PairError::InvalidSpread(_))
        ));
    }

    #[test]
    fn threshold_counts() {
        let t = ThresholdTable::builtin();
        assert_eq!(t.get(2011).unwrap().boundaries(), &[10.0]);
        assert_eq!(t.get(2015).unwrap().boundaries(), &[10.0]);
        assert_eq!(t.get(2019).unwrap().boundaries(), &[4.0, 10.0]);
        assert_eq!(t.years().collect::<Vec<_>>(), vec![2011, 2015, 2019]);
    }

    #[test]
    fn thresholds_are_data() {
        let mut t: ThresholdTable = "2020: 2, 5, 12\n".parse().unwrap();
        assert_eq!(t.assign_group(5.0, 2020).unwrap(), 3);
        t.register(GroupThresholds::new(2021, vec![]).unwrap());
        assert_eq!(t.assign_group(100.0, 2021).unwrap(), 1);
        assert!("2020: 5, 2".parse::<ThresholdTable>().is_err());
        assert!("2020 5".parse::<ThresholdTable>().is_err());
    }

    #[test]
    fn table_parse_errors() {
        let dup =
            "symbol category scaling_factor 2019\nEUR/USD Major 10000 G1\nEUR/USD Major 10000 G1\n";
        assert!(matches!(
            PairRegistry::from_table_str(dup),
            Err(PairError::Parse { line: 3, .. })
        ));
        let bad = "symbol category scaling_factor\nEURUSD Major 10000\n";
        assert!(matches!(
            PairRegistry::from_table_str(bad),
            Err(PairError::InvalidSymbol(_))
        ));
        let no_header = "EUR/USD Major 10000\n";
        assert!(PairRegistry::from_table_str(no_header).is_err());
    }

    #[test]
    fn interval_bounds() {
        let t = ThresholdTable::builtin();
        let y = t.get(2019).unwrap();
        assert_eq!(y.interval(1), Some((0.0, 4.0)));
        assert_eq!(y.interval(2), Some((4.0, 10.0)));
        assert_eq!(y.interval(3), Some((10.0, f64::INFINITY)));
        assert_eq!(y.interval(4), None);
    }

    #[test]
    fn pip_examples() {
        let reg = PairRegistry::builtin();
        assert_eq!(reg.lookup("USD/JPY").unwrap().pip_size(), 0.01);
        assert_eq!(reg.lookup("EUR/USD").unwrap().pip_size(), 0.0001);
    }

    proptest! {
        #[test]
        fn assign_group_monotone(a in 0.0f64..50.0, b in 0.0f64..50.0, yi in 0usize..3) {
            let year = [2011, 2015, 2019][yi];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(assign_group(lo, year).unwrap() <= assign_group(hi, year).unwrap());
        }

        // Values whose product with the factor needs no rounding.
        #[test]
        fn pip_round_trip(mantissa in -(1i64 << 30)..(1i64 << 30), exp in -40i32..0, jpy in any::<bool>()) {
            let meta = PairMeta::new(if jpy { "USD/JPY" } else { "EUR/USD" }, Category::Major,
                if jpy { 100 } else { 10000 }).unwrap();
            let diff = mantissa as f64 * 2f64.powi(exp);
            prop_assert_eq!(meta.from_pips(meta.to_pips(diff)), diff);
        }
    }
}
