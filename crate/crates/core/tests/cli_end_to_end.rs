use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use fx_response::cli::{
    cmd_response, cmd_spread_groups, cmd_synth, OutputFormat, RunConfig, ScaleSelection,
    SynthConfig,
};
use fx_response::pairmeta::{PairRegistry, ThresholdTable, MAJORS};
use fx_response::synth::FlowModel;

fn base_price(symbol: &str) -> f64 {
    if symbol.ends_with("JPY") {
        110.0
    } else {
        1.1
    }
}

/// Two weeks of synthetic quotes for `pair` in ISO year `year`.
fn synth(dir: &Path, pair: &str, year: i32, spread_pips: f64, seed: u64) {
    let cfg = SynthConfig {
        model: FlowModel {
            seed,
            n_events: 3_000,
            base_price: base_price(pair),
            spread_pips,
            noise_pips: 0.2,
            ..FlowModel::hump()
        },
        pair: pair.into(),
        iso_year: year,
        first_week: 10,
        weeks: 2,
        output_dir: dir.to_path_buf(),
    };
    let report = cmd_synth(&cfg, &PairRegistry::builtin()).unwrap();
    assert_eq!(report.files.len(), 2);
    assert_eq!(report.ticks, 6_000);
}

fn read_dir_sorted(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn majors_input() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (i, pair) in MAJORS.iter().enumerate() {
        synth(dir.path(), pair, 2019, 1.0, 40 + i as u64);
    }
    dir
}

#[test]
fn majors_produce_fourteen_curves() {
    let input = majors_input();
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        input_dir: input.path().into(),
        output_dir: out.path().into(),
        workers: 3,
        ..Default::default()
    };
    let report = cmd_response(&cfg, &PairRegistry::builtin()).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.manifest.outputs.len(), 14);
    for entry in &report.manifest.outputs {
        let text = std::fs::read_to_string(out.path().join(&entry.path)).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "tau,value,count");
        assert_eq!(rows.len(), 1001, "{}", entry.path);
    }
    assert!(out.path().join("EURUSD_2019_trade.csv").exists());
    assert!(out.path().join("USDJPY_2019_physical_excl.csv").exists());
    assert_eq!(report.manifest.ingest.len(), 7);
}

#[test]
fn unknown_pair_is_excluded_not_fatal() {
    let input = tempfile::tempdir().unwrap();
    synth(input.path(), "EUR/USD", 2019, 1.0, 1);
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        pairs: vec!["EUR/USD".into(), "ABC/XYZ".into(), "GBP/USD".into()],
        input_dir: input.path().into(),
        output_dir: out.path().into(),
        tau_max: 20,
        scale: ScaleSelection::Trade,
        ..Default::default()
    };
    let report = cmd_response(&cfg, &PairRegistry::builtin()).unwrap();
    assert_eq!(report.exit_code(), 1);
    assert_eq!(report.manifest.outputs.len(), 1);
    let excluded: Vec<&str> = report
        .manifest
        .exclusions
        .iter()
        .map(|e| e.pair.as_str())
        .collect();
    assert_eq!(excluded, ["ABC/XYZ", "GBP/USD"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["exclusions"].as_array().unwrap().len(), 2);
}

#[test]
fn spread_groups_per_year() {
    let input = tempfile::tempdir().unwrap();
    // One pair per 2019 group; 2011 folds the lower two together.
    let pairs = [("EUR/USD", 1.0), ("EUR/GBP", 6.0), ("USD/TRY", 40.0)];
    for year in [2011, 2019] {
        for (i, (pair, spread)) in pairs.iter().enumerate() {
            synth(input.path(), pair, year, *spread, 100 + i as u64);
        }
    }
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        pairs: pairs.iter().map(|(p, _)| p.to_string()).collect(),
        years: vec![2011, 2019],
        input_dir: input.path().into(),
        output_dir: out.path().into(),
        tau_max: 50,
        ..Default::default()
    };
    let report =
        cmd_spread_groups(&cfg, &PairRegistry::builtin(), &ThresholdTable::builtin()).unwrap();
    assert_eq!(report.exit_code(), 0);
    let trade_groups = |year| {
        report
            .manifest
            .groups
            .iter()
            .filter(|g| g.year == year && g.scale == fx_response::response::Scale::Trade)
            .count()
    };
    assert_eq!(trade_groups(2019), 3);
    assert_eq!(trade_groups(2011), 2);

    let table = std::fs::read_to_string(out.path().join("spread_2019.csv")).unwrap();
    let groups: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(groups, ["2", "1", "3"], "rows are in symbol order");
    assert!(out.path().join("group_2011_trade_g2.csv").exists());
    assert!(!out.path().join("group_2011_trade_g3.csv").exists());
}

#[test]
fn output_is_deterministic_across_workers() {
    let input = majors_input();
    let run = |workers, format| {
        let out = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            input_dir: input.path().into(),
            output_dir: out.path().into(),
            workers,
            tau_max: 200,
            format,
            ..Default::default()
        };
        cmd_response(&cfg, &PairRegistry::builtin()).unwrap();
        read_dir_sorted(out.path())
    };
    assert_eq!(run(1, OutputFormat::Csv), run(4, OutputFormat::Csv));
    assert_eq!(run(1, OutputFormat::Json), run(3, OutputFormat::Json));
}

#[test]
fn synth_files_round_trip_through_ingest() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "USD/JPY", 2015, 1.5, 9);
    let names: Vec<String> = read_dir_sorted(dir.path()).into_keys().collect();
    assert_eq!(
        names,
        [
            "DAT_ASCII_USDJPY_T_2015_W10.csv",
            "DAT_ASCII_USDJPY_T_2015_W11.csv"
        ]
    );
    let registry = PairRegistry::builtin();
    let mut weeks = 0;
    let paths: Vec<PathBuf> = names.iter().map(|n| dir.path().join(n)).collect();
    let stats = fx_response::ingest::scan_files(
        &paths,
        Some(registry.lookup("USD/JPY").unwrap()),
        Default::default(),
        |_| weeks += 1,
    )
    .unwrap();
    assert_eq!(weeks, 2);
    assert_eq!(stats.ticks, 6_000);
    assert_eq!(stats.lines_bad + stats.crossed + stats.outside_window, 0);
}

fn fxresp() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fxresp"));
    c.env_remove(fx_response::cli::INPUT_DIR_ENV)
        .env("RUST_LOG", "off")
        .stderr(std::process::Stdio::null());
    c
}

#[test]
fn binary_exit_codes_and_precedence() {
    let input = tempfile::tempdir().unwrap();
    synth(input.path(), "EUR/USD", 2019, 1.0, 3);
    let out = tempfile::tempdir().unwrap();
    let conf = out.path().join("run.conf");
    std::fs::write(
        &conf,
        "input_dir = /nonexistent\ntau_max = 10\nscale = trade\n",
    )
    .unwrap();

    // Environment beats the config file.
    let status = fxresp()
        .args([
            "--config",
            conf.to_str().unwrap(),
            "response",
            "--pairs",
            "EUR/USD",
        ])
        .arg("--output-dir")
        .arg(out.path().join("a"))
        .env(fx_response::cli::INPUT_DIR_ENV, input.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out.path().join("a/EURUSD_2019_trade.csv")).unwrap();
    assert_eq!(text.lines().count(), 11);

    // Without the override the config file's directory is used.
    let status = fxresp()
        .args([
            "--config",
            conf.to_str().unwrap(),
            "response",
            "--pairs",
            "EUR/USD",
        ])
        .arg("--output-dir")
        .arg(out.path().join("b"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Flags beat both.
    let status = fxresp()
        .args([
            "--config",
            conf.to_str().unwrap(),
            "response",
            "--pairs",
            "EUR/USD",
            "--tau-max",
            "7",
        ])
        .arg("--input-dir")
        .arg(input.path())
        .arg("--output-dir")
        .arg(out.path().join("c"))
        .env(fx_response::cli::INPUT_DIR_ENV, "/also/missing")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out.path().join("c/EURUSD_2019_trade.csv")).unwrap();
    assert_eq!(text.lines().count(), 8);

    let usage = fxresp()
        .args(["spread-groups", "--years", "2020"])
        .status()
        .unwrap();
    assert_eq!(usage.code(), Some(2));
    let usage = fxresp()
        .args(["response", "--tau-max", "0"])
        .status()
        .unwrap();
    assert_eq!(usage.code(), Some(2));
    let usage = fxresp()
        .args(["response", "--scale", "hourly"])
        .status()
        .unwrap();
    assert_eq!(usage.code(), Some(2));

    let validate = fxresp()
        .args(["validate", "--pairs", "EUR/USD"])
        .arg("--input-dir")
        .arg(input.path())
        .output()
        .unwrap();
    assert_eq!(validate.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&validate.stdout).unwrap();
    assert_eq!(json["entries"][0]["stats"]["ticks"], 6_000);
}

#[test]
fn empty_synth_writes_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        model: FlowModel {
            n_events: 0,
            ..FlowModel::default()
        },
        output_dir: dir.path().into(),
        ..Default::default()
    };
    let report = cmd_synth(&cfg, &PairRegistry::builtin()).unwrap();
    assert_eq!(report.ticks, 0);
    assert_eq!(std::fs::metadata(&report.files[0]).unwrap().len(), 0);
}
