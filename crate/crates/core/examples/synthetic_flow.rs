//! Synthetic order flow with a transient impact kernel, estimated both
//! by the fast estimator and by the brute-force reference.
//!
//! ```bash
//! cargo run --release --example synthetic_flow
//! ```

use fx_response::ingest::{MarketWeek, WeekTicks};
use fx_response::pipeline::analyze_week;
use fx_response::response::{response_trade, Scale, ZeroHandling};
use fx_response::synth::{brute_force_response, generate, FlowModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let week = MarketWeek::from_iso(2019, 2).unwrap();

    let small = FlowModel {
        n_events: 2_000,
        seed: 7,
        ..FlowModel::hump()
    };
    let series = analyze_week(
        &WeekTicks {
            week,
            ticks: generate(&small, week)?.ticks,
        },
        false,
    );
    let mids = series.midpoints();
    let signs = series.trade_signs.as_slice();
    let fast = response_trade([(&mids[..], signs)], 50)?;
    let slow = brute_force_response(
        &[(&mids[..], signs)],
        50,
        Scale::Trade,
        ZeroHandling::Exclude,
    )?;
    let worst = (1..=50)
        .map(|t| (fast.value(t).unwrap() - slow.value(t).unwrap()).abs())
        .fold(0.0, f64::max);
    println!(
        "fast vs brute force on {} events: max abs diff {worst:.2e}",
        mids.len()
    );

    let big = FlowModel {
        n_events: 100_000,
        ..FlowModel::hump()
    };
    let series = analyze_week(
        &WeekTicks {
            week,
            ticks: generate(&big, week)?.ticks,
        },
        false,
    );
    let mids = series.midpoints();
    let curve = response_trade([(&mids[..], series.trade_signs.as_slice())], 1000)?;
    let (tau_star, peak) = curve.argmax().expect("non-empty curve");
    println!(
        "hump model: R(1) = {:.3e}, peak {peak:.3e} at tau = {tau_star}, R(1000)/peak = {:.2}",
        curve.value(1).unwrap(),
        curve.value(1000).unwrap() / peak
    );
    Ok(())
}
