//! Batch commands behind the `fxresp` binary.
//!
//! Each command takes a [`RunConfig`], runs pair-year tasks on a bounded
//! worker pool, writes one file per artifact and a `manifest.json` that
//! lists every output and every excluded pair-year. Results are collected
//! in task order, so outputs do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{scan_files, IngestStats, LineParser, MarketWeek, DEFAULT_UTC_OFFSET_MINUTES};
use crate::pairmeta::{PairRegistry, ThresholdTable, MAJORS};
use crate::pipeline::{EstimationConfig, PairYearAccumulator, PairYearResult};
use crate::response::{
    group_average, CurveDocument, GroupCurve, ResponseCurve, ReturnKind, Scale, SpreadStat,
    WeekWeighting, ZeroHandling, DEFAULT_TAU_MAX,
};
use crate::signs::SignDiagnostics;
use crate::synth::{generate, write_ascii, FlowModel};

/// Environment variable consulted for the input directory.
pub const INPUT_DIR_ENV: &str = "FXRESP_INPUT_DIR";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DEFAULT_FILE_PATTERN: &str = "DAT_ASCII_{PAIR}_T_{YEAR}*";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("config line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleSelection {
    Trade,
    Physical,
    Both,
}

impl ScaleSelection {
    pub fn scales(&self) -> Vec<Scale> {
        match self {
            ScaleSelection::Trade => vec![Scale::Trade],
            ScaleSelection::Physical => vec![Scale::Physical],
            ScaleSelection::Both => vec![Scale::Trade, Scale::Physical],
        }
    }
}

impl FromStr for ScaleSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trade" => Ok(ScaleSelection::Trade),
            "physical" => Ok(ScaleSelection::Physical),
            "both" => Ok(ScaleSelection::Both),
            _ => Err(format!("unknown scale `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn ext(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

/// Settings shared by `response`, `spread-groups` and `validate`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Empty means the command default (the majors for `response`, every
    /// registered pair for `spread-groups`).
    pub pairs: Vec<String>,
    pub years: Vec<i32>,
    pub scale: ScaleSelection,
    pub tau_max: usize,
    pub zero_handling: ZeroHandling,
    pub weighting: WeekWeighting,
    pub return_kind: ReturnKind,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
    /// Glob relative to `input_dir`; `{PAIR}` is the slash-less symbol and
    /// `{YEAR}` the calendar year.
    pub file_pattern: String,
    pub utc_offset_minutes: i32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pairs: Vec::new(),
            years: vec![2019],
            scale: ScaleSelection::Both,
            tau_max: DEFAULT_TAU_MAX,
            zero_handling: ZeroHandling::Exclude,
            weighting: WeekWeighting::Pooled,
            return_kind: ReturnKind::Relative,
            input_dir: PathBuf::from("data"),
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            file_pattern: DEFAULT_FILE_PATTERN.to_string(),
            utc_offset_minutes: DEFAULT_UTC_OFFSET_MINUTES,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: s.to_string(),
            })
        })
        .collect()
}

impl RunConfig {
    /// Sets one field from its textual form. Keys use `snake_case` or
    /// `kebab-case`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "pairs" => self.pairs = parse_list(key, value)?,
            "years" => self.years = parse_list(key, value)?,
            "scale" => self.scale = value.parse().map_err(|_| bad())?,
            "tau_max" => self.tau_max = value.parse().map_err(|_| bad())?,
            "zero_handling" => self.zero_handling = value.parse().map_err(|_| bad())?,
            "weighting" => {
                self.weighting = match value {
                    "pooled" => WeekWeighting::Pooled,
                    "per_week" | "per-week" => WeekWeighting::PerWeek,
                    _ => return Err(bad()),
                }
            }
            "returns" => {
                self.return_kind = match value {
                    "relative" => ReturnKind::Relative,
                    "log" => ReturnKind::Log,
                    _ => return Err(bad()),
                }
            }
            "input_dir" => self.input_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "format" => self.format = value.parse().map_err(|_| bad())?,
            "workers" => self.workers = value.parse().map_err(|_| bad())?,
            "file_pattern" => self.file_pattern = value.to_string(),
            "utc_offset_minutes" => self.utc_offset_minutes = value.parse().map_err(|_| bad())?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_kv_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        self.apply_kv(&fs::read_to_string(path)?)
    }

    /// Overrides `input_dir` from [`INPUT_DIR_ENV`] when set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(INPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.input_dir = PathBuf::from(dir);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tau_max == 0 {
            return Err(ConfigError::Invalid("tau_max must be at least 1".into()));
        }
        if self.years.is_empty() {
            return Err(ConfigError::Invalid("no years requested".into()));
        }
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        Ok(())
    }

    fn estimation(&self) -> EstimationConfig {
        EstimationConfig {
            tau_max: self.tau_max,
            trade: matches!(self.scale, ScaleSelection::Trade | ScaleSelection::Both),
            physical: matches!(self.scale, ScaleSelection::Physical | ScaleSelection::Both),
            zero_handling: self.zero_handling,
            weighting: self.weighting,
            return_kind: self.return_kind,
        }
    }

    fn pairs_or(&self, default: impl FnOnce() -> Vec<String>) -> Vec<String> {
        if self.pairs.is_empty() {
            default()
        } else {
            self.pairs.clone()
        }
    }
}

/// Input files for one pair-year, in name order.
pub fn discover_inputs(
    cfg: &RunConfig,
    file_code: &str,
    year: i32,
) -> Result<Vec<PathBuf>, String> {
    let pattern = cfg
        .file_pattern
        .replace("{PAIR}", file_code)
        .replace("{YEAR}", &year.to_string());
    let full = cfg.input_dir.join(pattern);
    let full = full.to_string_lossy();
    let mut paths: Vec<PathBuf> = glob::glob(&full)
        .map_err(|e| format!("bad file pattern `{full}`: {e}"))?
        .filter_map(Result::ok)
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    Ok(paths)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutputEntry {
    pub path: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    pub year: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_handling: Option<ZeroHandling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Exclusion {
    pub pair: String,
    pub year: i32,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestEntry {
    pub pair: String,
    pub year: i32,
    pub weeks_analyzed: u64,
    pub stats: IngestStats,
    pub diagnostics: SignDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<SpreadStat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupEntry {
    pub year: i32,
    pub scale: Scale,
    pub group: usize,
    pub interval: (f64, Option<f64>),
    pub members: Vec<String>,
}

/// Machine-readable record of one command run.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Manifest {
    pub command: String,
    pub outputs: Vec<OutputEntry>,
    pub exclusions: Vec<Exclusion>,
    pub warnings: Vec<String>,
    pub ingest: Vec<IngestEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupEntry>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

impl RunReport {
    /// 0 when every pair-year produced output, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.exclusions.is_empty() {
            0
        } else {
            1
        }
    }
}

struct TaskOutcome {
    symbol: String,
    year: i32,
    result: Result<(PairYearResult, IngestStats), String>,
}

fn run_pair_year(
    cfg: &RunConfig,
    registry: &PairRegistry,
    est: &EstimationConfig,
    name: &str,
    year: i32,
) -> TaskOutcome {
    let symbol = registry
        .resolve(name)
        .map(|m| m.symbol.clone())
        .unwrap_or_else(|_| name.to_string());
    let result = (|| {
        let meta = registry.resolve(name).map_err(|e| e.to_string())?;
        let paths = discover_inputs(cfg, &meta.file_code(), year)?;
        if paths.is_empty() {
            return Err(format!("no input files for {} {year}", meta.symbol));
        }
        let mut acc = PairYearAccumulator::new(meta, year, est).map_err(|e| e.to_string())?;
        let parser = LineParser::with_offset_minutes(cfg.utc_offset_minutes);
        let stats = scan_files(&paths, Some(meta), parser, |week| acc.add_week(&week))
            .map_err(|e| e.to_string())?;
        Ok((acc.finish(), stats))
    })();
    TaskOutcome {
        symbol,
        year,
        result,
    }
}

fn run_tasks(cfg: &RunConfig, registry: &PairRegistry, pairs: &[String]) -> Vec<TaskOutcome> {
    use rayon::prelude::*;
    let est = cfg.estimation();
    let mut tasks: Vec<(String, i32)> = pairs
        .iter()
        .flat_map(|p| cfg.years.iter().map(move |y| (p.clone(), *y)))
        .collect();
    tasks.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    tasks.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        tasks
            .par_iter()
            .map(|(p, y)| run_pair_year(cfg, registry, &est, p, *y))
            .collect()
    })
}

fn zero_tag(scale: Scale, zeros: ZeroHandling) -> String {
    match scale {
        Scale::Trade => String::new(),
        Scale::Physical => format!(
            "_{}",
            if zeros == ZeroHandling::Exclude {
                "excl"
            } else {
                "incl"
            }
        ),
    }
}

/// `EURUSD_2019_physical_excl.csv` style name.
pub fn curve_file_name(
    code: &str,
    year: i32,
    curve: &ResponseCurve,
    format: OutputFormat,
) -> String {
    format!(
        "{code}_{year}_{}{}.{}",
        curve.scale,
        zero_tag(curve.scale, curve.zero_handling),
        format.ext()
    )
}

pub fn group_file_name(year: i32, group: &GroupCurve, format: OutputFormat) -> String {
    format!(
        "group_{year}_{}{}_g{}.{}",
        group.curve.scale,
        zero_tag(group.curve.scale, group.curve.zero_handling),
        group.group,
        format.ext()
    )
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()
}

fn write_curve(
    path: &Path,
    curve: &ResponseCurve,
    doc: impl FnOnce() -> CurveDocument,
    format: OutputFormat,
) -> io::Result<()> {
    write_file(path, |out| match format {
        OutputFormat::Csv => curve.write_csv(out),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &doc()).map_err(io::Error::other)?;
            writeln!(out)
        }
    })
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> io::Result<PathBuf> {
    let path = dir.join(MANIFEST_FILE);
    write_file(&path, |out| {
        serde_json::to_writer_pretty(&mut *out, manifest).map_err(io::Error::other)?;
        writeln!(out)
    })?;
    Ok(path)
}

/// Writes the per-pair curves of one finished task and records them.
fn emit_pair_curves(
    cfg: &RunConfig,
    registry: &PairRegistry,
    res: &PairYearResult,
    manifest: &mut Manifest,
) -> io::Result<usize> {
    let code = registry
        .lookup(&res.symbol)
        .map(|m| m.file_code())
        .unwrap_or_default();
    let mut written = 0;
    for scale in cfg.scale.scales() {
        match res.curve(scale) {
            Some(Ok(curve)) => {
                let name = curve_file_name(&code, res.year, curve, cfg.format);
                write_curve(
                    &cfg.output_dir.join(&name),
                    curve,
                    || CurveDocument::for_pair(&res.symbol, res.year, curve),
                    cfg.format,
                )?;
                manifest.outputs.push(OutputEntry {
                    path: name,
                    kind: "curve",
                    pair: Some(res.symbol.clone()),
                    year: res.year,
                    scale: Some(scale),
                    zero_handling: (scale == Scale::Physical).then_some(curve.zero_handling),
                    group: None,
                });
                written += 1;
            }
            Some(Err(e)) => manifest
                .warnings
                .push(format!("{} {} {scale}: {e}", res.symbol, res.year)),
            None => {}
        }
    }
    Ok(written)
}

fn record_ingest(manifest: &mut Manifest, res: &PairYearResult, stats: &IngestStats) {
    manifest.ingest.push(IngestEntry {
        pair: res.symbol.clone(),
        year: res.year,
        weeks_analyzed: res.weeks,
        stats: stats.clone(),
        diagnostics: res.diagnostics,
        spread: res.spread.as_ref().ok().cloned(),
    });
}

/// Response curves for every requested pair, year and scale.
pub fn cmd_response(cfg: &RunConfig, registry: &PairRegistry) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let pairs = cfg.pairs_or(|| MAJORS.iter().map(|s| s.to_string()).collect());
    let mut manifest = Manifest {
        command: "response".into(),
        ..Default::default()
    };
    for outcome in run_tasks(cfg, registry, &pairs) {
        match outcome.result {
            Ok((res, stats)) => {
                record_ingest(&mut manifest, &res, &stats);
                if emit_pair_curves(cfg, registry, &res, &mut manifest)? == 0 {
                    manifest.exclusions.push(Exclusion {
                        pair: outcome.symbol,
                        year: outcome.year,
                        reason: "no admissible data on any requested scale".into(),
                    });
                }
            }
            Err(reason) => {
                log::error!("{} {}: {reason}", outcome.symbol, outcome.year);
                manifest.exclusions.push(Exclusion {
                    pair: outcome.symbol,
                    year: outcome.year,
                    reason,
                })
            }
        }
    }
    let manifest_path = write_manifest(&cfg.output_dir, &manifest)?;
    Ok(RunReport {
        manifest,
        manifest_path,
    })
}

/// Average pip spreads, group assignment and group-averaged curves.
pub fn cmd_spread_groups(
    cfg: &RunConfig,
    registry: &PairRegistry,
    thresholds: &ThresholdTable,
) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    for year in &cfg.years {
        thresholds
            .get(*year)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let pairs = cfg.pairs_or(|| registry.iter().map(|m| m.symbol.clone()).collect());
    let mut manifest = Manifest {
        command: "spread-groups".into(),
        ..Default::default()
    };
    let outcomes = run_tasks(cfg, registry, &pairs);
    for year in cfg.years.iter().copied() {
        let table = thresholds.get(year).expect("checked above");
        let mut spreads: Vec<(SpreadStat, usize)> = Vec::new();
        let mut per_scale: BTreeMap<Scale, BTreeMap<String, ResponseCurve>> = BTreeMap::new();
        for outcome in outcomes.iter().filter(|o| o.year == year) {
            let (res, stats) = match &outcome.result {
                Ok(ok) => ok,
                Err(reason) => {
                    manifest.exclusions.push(Exclusion {
                        pair: outcome.symbol.clone(),
                        year,
                        reason: reason.clone(),
                    });
                    continue;
                }
            };
            record_ingest(&mut manifest, res, stats);
            let spread = match &res.spread {
                Ok(s) => s.clone(),
                Err(e) => {
                    manifest.exclusions.push(Exclusion {
                        pair: res.symbol.clone(),
                        year,
                        reason: format!("spread: {e}"),
                    });
                    continue;
                }
            };
            emit_pair_curves(cfg, registry, res, &mut manifest)?;
            let group = table.group_of(spread.avg_pip_spread);
            spreads.push((spread, group));
            for scale in cfg.scale.scales() {
                if let Some(Ok(curve)) = res.curve(scale) {
                    per_scale
                        .entry(scale)
                        .or_default()
                        .insert(res.symbol.clone(), curve.clone());
                }
            }
        }
        spreads.sort_by(|a, b| a.0.symbol.cmp(&b.0.symbol));

        let spread_name = format!("spread_{year}.{}", cfg.format.ext());
        write_file(&cfg.output_dir.join(&spread_name), |out| match cfg.format {
            OutputFormat::Csv => {
                writeln!(out, "symbol,year,avg_pip_spread,n_obs,group")?;
                for (s, g) in &spreads {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        s.symbol, s.year, s.avg_pip_spread, s.n_obs, g
                    )?;
                }
                Ok(())
            }
            OutputFormat::Json => {
                #[derive(Serialize)]
                struct Row<'a> {
                    #[serde(flatten)]
                    stat: &'a SpreadStat,
                    group: usize,
                }
                let rows: Vec<Row<'_>> = spreads
                    .iter()
                    .map(|(stat, group)| Row {
                        stat,
                        group: *group,
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &rows).map_err(io::Error::other)?;
                writeln!(out)
            }
        })?;
        manifest.outputs.push(OutputEntry {
            path: spread_name,
            kind: "spread_table",
            pair: None,
            year,
            scale: None,
            zero_handling: None,
            group: None,
        });

        let groups: BTreeMap<String, usize> = spreads
            .iter()
            .map(|(s, g)| (s.symbol.clone(), *g))
            .collect();
        for (scale, curves) in &per_scale {
            let averaged = group_average(curves, &groups, table.n_groups())
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            for g in 1..=table.n_groups() {
                if !averaged.iter().any(|a| a.group == g) {
                    manifest.warnings.push(format!(
                        "{year} {scale}: group {g} is empty and was omitted"
                    ));
                }
            }
            for gc in &averaged {
                let name = group_file_name(year, gc, cfg.format);
                write_curve(
                    &cfg.output_dir.join(&name),
                    &gc.curve,
                    || CurveDocument::for_group(year, gc),
                    cfg.format,
                )?;
                let (lo, hi) = table.interval(gc.group).expect("group in range");
                manifest.outputs.push(OutputEntry {
                    path: name,
                    kind: "group_curve",
                    pair: None,
                    year,
                    scale: Some(*scale),
                    zero_handling: (*scale == Scale::Physical).then_some(gc.curve.zero_handling),
                    group: Some(gc.group),
                });
                manifest.groups.push(GroupEntry {
                    year,
                    scale: *scale,
                    group: gc.group,
                    interval: (lo, hi.is_finite().then_some(hi)),
                    members: gc.members.clone(),
                });
            }
        }
    }
    let manifest_path = write_manifest(&cfg.output_dir, &manifest)?;
    Ok(RunReport {
        manifest,
        manifest_path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateEntry {
    pub pair: String,
    pub year: i32,
    pub files: Vec<String>,
    pub stats: IngestStats,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ValidateReport {
    pub entries: Vec<ValidateEntry>,
    pub exclusions: Vec<Exclusion>,
}

impl ValidateReport {
    pub fn exit_code(&self) -> i32 {
        if self.exclusions.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Parse-only pass reporting [`IngestStats`] per pair-year.
pub fn cmd_validate(
    cfg: &RunConfig,
    registry: &PairRegistry,
) -> Result<ValidateReport, ConfigError> {
    cfg.validate()?;
    let pairs = cfg.pairs_or(|| MAJORS.iter().map(|s| s.to_string()).collect());
    let parser = LineParser::with_offset_minutes(cfg.utc_offset_minutes);
    let mut report = ValidateReport::default();
    let mut tasks: Vec<(&String, i32)> = pairs
        .iter()
        .flat_map(|p| cfg.years.iter().map(move |y| (p, *y)))
        .collect();
    tasks.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    for (name, year) in tasks {
        let outcome = (|| {
            let meta = registry.resolve(name).map_err(|e| e.to_string())?;
            let paths = discover_inputs(cfg, &meta.file_code(), year)?;
            if paths.is_empty() {
                return Err(format!("no input files for {} {year}", meta.symbol));
            }
            let stats =
                scan_files(&paths, Some(meta), parser, |_| {}).map_err(|e| e.to_string())?;
            Ok(ValidateEntry {
                pair: meta.symbol.clone(),
                year,
                files: paths.iter().map(|p| p.display().to_string()).collect(),
                stats,
            })
        })();
        match outcome {
            Ok(entry) => report.entries.push(entry),
            Err(reason) => report.exclusions.push(Exclusion {
                pair: name.clone(),
                year,
                reason,
            }),
        }
    }
    Ok(report)
}

/// Parameters of the `synth` command.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub model: FlowModel,
    pub pair: String,
    pub iso_year: i32,
    pub first_week: u32,
    pub weeks: usize,
    pub output_dir: PathBuf,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            model: FlowModel::default(),
            pair: "EUR/USD".into(),
            iso_year: 2019,
            first_week: 2,
            weeks: 1,
            output_dir: PathBuf::from("data"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthReport {
    pub files: Vec<PathBuf>,
    pub ticks: usize,
}

/// Writes one vendor-format file per generated week. Week `k` uses seed
/// `model.seed + k`; the pair's scaling factor overrides the model's.
pub fn cmd_synth(cfg: &SynthConfig, registry: &PairRegistry) -> Result<SynthReport, ConfigError> {
    let meta = registry
        .resolve(&cfg.pair)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let mut week = MarketWeek::from_iso(cfg.iso_year, cfg.first_week).ok_or_else(|| {
        ConfigError::Invalid(format!(
            "no ISO week {} in {}",
            cfg.first_week, cfg.iso_year
        ))
    })?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut report = SynthReport {
        files: Vec::new(),
        ticks: 0,
    };
    if cfg.model.n_events == 0 {
        log::warn!("n_events = 0: writing empty files");
    }
    for k in 0..cfg.weeks {
        let model = FlowModel {
            seed: cfg.model.seed.wrapping_add(k as u64),
            scaling_factor: meta.scaling_factor,
            ..cfg.model.clone()
        };
        let generated = generate(&model, week).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let name = format!(
            "DAT_ASCII_{}_T_{}_W{:02}.csv",
            meta.file_code(),
            week.iso_year,
            week.iso_week
        );
        let path = cfg.output_dir.join(name);
        write_file(&path, |out| write_ascii(out, &generated.ticks))?;
        report.ticks += generated.ticks.len();
        report.files.push(path);
        week = week.next();
    }
    Ok(report)
}
