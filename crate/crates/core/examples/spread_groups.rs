//! Pip sizes, average pip spreads and spread-group assignment.
//!
//! ```bash
//! cargo run --example spread_groups
//! ```

use fx_response::pairmeta::{assign_group, Category, PairRegistry, ThresholdTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = PairRegistry::builtin();
    for (symbol, bid, ask) in [("EUR/USD", 1.1020, 1.1022), ("USD/JPY", 109.20, 109.23)] {
        let m = registry.lookup(symbol)?;
        println!(
            "{symbol}: pip {} ; bid {bid} ask {ask} is {:.1} pips",
            m.pip_size(),
            m.pip_spread(bid, ask)
        );
    }

    let thresholds = ThresholdTable::builtin();
    for year in thresholds.years() {
        let t = thresholds.get(year)?;
        println!(
            "{year}: {} groups, cut points {:?}",
            t.n_groups(),
            t.boundaries()
        );
    }
    for spread in [3.99, 4.0, 9.99, 10.0, 25.0] {
        println!(
            "2019 spread {spread:>5} pips -> group {}",
            assign_group(spread, 2019)?
        );
    }

    let exotics: Vec<_> = registry
        .iter()
        .filter(|m| m.category == Category::Exotic)
        .map(|m| format!("{} (g{})", m.symbol, m.published_group(2019).unwrap_or(0)))
        .collect();
    println!("exotics with their 2019 groups: {}", exotics.join(", "));
    Ok(())
}
