//! Physical-scale response with zero-sign seconds excluded and included.
//!
//! ```bash
//! cargo run --release --example physical_response
//! ```

use fx_response::ingest::{MarketWeek, WeekTicks};
use fx_response::pipeline::analyze_week;
use fx_response::response::{response_physical, ZeroHandling};
use fx_response::synth::{generate, FlowModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let week = MarketWeek::from_iso(2019, 2).unwrap();
    let synthetic = generate(
        &FlowModel {
            n_events: 100_000,
            ..FlowModel::default()
        },
        week,
    )?;
    let series = analyze_week(
        &WeekTicks {
            week,
            ticks: synthetic.ticks,
        },
        true,
    );
    let mids = series.physical_midpoints();
    let signs = series.physical_signs();
    println!(
        "{} seconds, {} with trades, {} buy / {} sell",
        mids.len(),
        series.samples.iter().filter(|s| s.n_trades > 0).count(),
        series.diagnostics.seconds_buy,
        series.diagnostics.seconds_sell
    );

    let excl = response_physical([(&mids[..], &signs[..])], 600, ZeroHandling::Exclude)?;
    let incl = response_physical([(&mids[..], &signs[..])], 600, ZeroHandling::Include)?;
    println!("{:>4} {:>14} {:>14}", "tau", "excluding", "including");
    for tau in [1, 10, 60, 300, 600] {
        println!(
            "{tau:>4} {:>14.6e} {:>14.6e}",
            excl.value(tau).unwrap_or(f64::NAN),
            incl.value(tau).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
