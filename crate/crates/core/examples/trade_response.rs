//! Trade-scale response of a synthetic week, checked against the
//! closed form for permanent impact.
//!
//! ```bash
//! cargo run --release --example trade_response
//! ```

use fx_response::ingest::MarketWeek;
use fx_response::ingest::WeekTicks;
use fx_response::pipeline::analyze_week;
use fx_response::response::response_trade;
use fx_response::synth::{generate, permanent_impact_response, FlowModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = FlowModel {
        n_events: 50_000,
        ..FlowModel::default()
    };
    let week = MarketWeek::from_iso(2019, 2).unwrap();
    let synthetic = generate(&model, week)?;
    let series = analyze_week(
        &WeekTicks {
            week,
            ticks: synthetic.ticks,
        },
        false,
    );

    let mids = series.midpoints();
    let curve = response_trade([(&mids[..], series.trade_signs.as_slice())], 100)?;
    let mean_mid = mids.iter().sum::<f64>() / mids.len() as f64;

    println!("{:>4} {:>14} {:>14}", "tau", "estimate", "closed form");
    for tau in [1, 2, 5, 10, 20, 50, 100] {
        println!(
            "{tau:>4} {:>14.6e} {:>14.6e}",
            curve.value(tau).unwrap_or(f64::NAN),
            permanent_impact_response(&model, mean_mid, tau)
        );
    }
    Ok(())
}
