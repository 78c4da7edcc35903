//! Trade signs from midpoint moves, then net signs per second.
//!
//! ```bash
//! cargo run --example sign_classification
//! ```

use fx_response::signs::{classify_physical_scale, classify_trade_scale};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mids = [1.0, 1.0, 1.1, 1.1, 1.05, 1.05, 1.2];
    let trade = classify_trade_scale(&mids);
    println!("midpoints   {mids:?}");
    println!(
        "trade signs {:?}  ({} undefined)",
        trade.as_slice(),
        trade.n_undefined()
    );

    // Seven events spread over five seconds; second 3 is empty.
    let per_second = [2, 2, 1, 0, 2];
    let (physical, diag) = classify_physical_scale(&trade, &per_second)?;
    println!("events per second {per_second:?}");
    println!("second signs      {:?}", physical.as_slice());
    println!("{}", serde_json::to_string_pretty(&diag)?);
    Ok(())
}
