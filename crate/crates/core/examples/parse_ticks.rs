//! Parse vendor tick lines and scan a file week by week.
//!
//! ```bash
//! cargo run --example parse_ticks
//! ```

use std::io::Write;

use fx_response::ingest::{parse_line, scan_file, LineError};
use fx_response::pairmeta::PairRegistry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tick = parse_line("20190102 070005123,1.10200,1.10210")?;
    println!(
        "bid {} ask {} mid {:.5} at {} ms",
        tick.bid,
        tick.ask,
        tick.midpoint(),
        tick.ts_ms
    );

    match parse_line("20190102 070005123,1.10210,1.10200") {
        Err(LineError::Crossed { bid, ask }) => println!("rejected crossed quote {bid} >= {ask}"),
        other => println!("unexpected: {other:?}"),
    }

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("DAT_ASCII_EURUSD_T_201901.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "20190106 190959000,1.14000,1.14010")?; // before the window opens
    writeln!(f, "20190106 191000000,1.14000,1.14010")?;
    writeln!(f, "20190107 093000250,1.14020,1.14030")?;
    writeln!(f, "garbage")?;
    writeln!(f, "20190111 164959999,1.14100,1.14110")?;
    writeln!(f, "20190111 165000000,1.14100,1.14110")?; // window already closed
    drop(f);

    let registry = PairRegistry::builtin();
    let eurusd = registry.lookup("EUR/USD")?;
    let stats = scan_file(&path, eurusd, |week| {
        println!("{}: {} ticks kept", week.week.week_id(), week.ticks.len());
    })?;
    println!("{}", stats.to_json());
    Ok(())
}
