use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fx_response::cli::{
    cmd_response, cmd_spread_groups, cmd_synth, cmd_validate, ConfigError, RunConfig, RunReport,
    SynthConfig,
};
use fx_response::pairmeta::{PairRegistry, ThresholdTable};
use fx_response::synth::FlowModel;

#[derive(Parser)]
#[command(
    name = "fxresp",
    version,
    about = "Price response functions for FX tick data"
)]
struct Cli {
    /// `key = value` config file; flags and FXRESP_INPUT_DIR override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Response curves per pair, year and scale.
    Response(RunArgs),
    /// Average pip spreads, spread groups and group-averaged curves.
    SpreadGroups(RunArgs),
    /// Generate synthetic tick files in vendor format.
    Synth(SynthArgs),
    /// Parse inputs and report ingest statistics as JSON.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated symbols, e.g. EUR/USD,USD/JPY.
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    years: Vec<i32>,
    /// trade, physical or both.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    tau_max: Option<usize>,
    /// exclude or include (physical scale only).
    #[arg(long)]
    zero_handling: Option<String>,
    /// pooled or per-week.
    #[arg(long)]
    weighting: Option<String>,
    /// relative or log.
    #[arg(long)]
    returns: Option<String>,
    #[arg(long)]
    input_dir: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    file_pattern: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    utc_offset_minutes: Option<i32>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "EUR/USD")]
    pair: String,
    #[arg(long, default_value_t = 2019)]
    year: i32,
    /// ISO week of the first generated week.
    #[arg(long, default_value_t = 2)]
    week: u32,
    #[arg(long, default_value_t = 1)]
    weeks: usize,
    #[arg(long, default_value = "data")]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    n_events: usize,
    /// Probability that a sign repeats the previous one.
    #[arg(long, default_value_t = 0.8)]
    sign_autocorr: f64,
    #[arg(long, default_value_t = 1.0)]
    impact_pips: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_pips: f64,
    #[arg(long, default_value_t = 1.1)]
    base_price: f64,
    #[arg(long, default_value_t = 1.0)]
    spread_pips: f64,
    /// Long-run share of each impact; 1 means fully permanent.
    #[arg(long, default_value_t = 1.0)]
    permanent_fraction: f64,
    /// Per-event decay of the transient share.
    #[arg(long, default_value_t = 0.0)]
    impact_decay: f64,
}

impl RunArgs {
    fn into_config(self, file: Option<&PathBuf>) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply_kv_file(path)?;
        }
        cfg.apply_env();
        if !self.pairs.is_empty() {
            cfg.pairs = self.pairs;
        }
        if !self.years.is_empty() {
            cfg.years = self.years;
        }
        let textual = [
            ("scale", self.scale),
            ("zero_handling", self.zero_handling),
            ("weighting", self.weighting),
            ("returns", self.returns),
            ("format", self.format),
            ("file_pattern", self.file_pattern),
        ];
        for (key, value) in textual {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if let Some(v) = self.tau_max {
            cfg.tau_max = v;
        }
        if let Some(v) = self.input_dir {
            cfg.input_dir = v;
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.utc_offset_minutes {
            cfg.utc_offset_minutes = v;
        }
        Ok(cfg)
    }
}

fn report(r: RunReport) -> u8 {
    for ex in &r.manifest.exclusions {
        eprintln!("excluded {} {}: {}", ex.pair, ex.year, ex.reason);
    }
    println!(
        "{} outputs, {} exclusions; manifest at {}",
        r.manifest.outputs.len(),
        r.manifest.exclusions.len(),
        r.manifest_path.display()
    );
    r.exit_code() as u8
}

fn run(cli: Cli) -> Result<u8, ConfigError> {
    let registry = PairRegistry::builtin();
    let file = cli.config.as_ref();
    Ok(match cli.command {
        Command::Response(args) => report(cmd_response(&args.into_config(file)?, &registry)?),
        Command::SpreadGroups(args) => report(cmd_spread_groups(
            &args.into_config(file)?,
            &registry,
            &ThresholdTable::builtin(),
        )?),
        Command::Validate(args) => {
            let r = cmd_validate(&args.into_config(file)?, &registry)?;
            let _ = writeln!(
                io::stdout(),
                "{}",
                serde_json::to_string_pretty(&r).expect("serializable")
            );
            r.exit_code() as u8
        }
        Command::Synth(a) => {
            let cfg = SynthConfig {
                model: FlowModel {
                    seed: a.seed,
                    n_events: a.n_events,
                    sign_autocorr: a.sign_autocorr,
                    impact_pips: a.impact_pips,
                    noise_pips: a.noise_pips,
                    base_price: a.base_price,
                    spread_pips: a.spread_pips,
                    permanent_fraction: a.permanent_fraction,
                    impact_decay: a.impact_decay,
                    ..FlowModel::default()
                },
                pair: a.pair,
                iso_year: a.year,
                first_week: a.week,
                weeks: a.weeks,
                output_dir: a.output_dir,
            };
            let r = cmd_synth(&cfg, &registry)?;
            for f in &r.files {
                println!("{}", f.display());
            }
            0
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(ConfigError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
