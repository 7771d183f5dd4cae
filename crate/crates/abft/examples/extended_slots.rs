//! Separated A-BFT: extending the phase with 2, 4, or 8 extra slots for
//! 802.11ay stations and comparing against the legacy baseline.
//!
//! ```bash
//! cargo run --release -p abft --example extended_slots
//! ```

use abft::sim::{run_experiment, ScenarioConfig};
use abft::types::{AbftLayout, SchemeId};

fn mean_successes(scheme: SchemeId, layout: AbftLayout, n: u32, seed: u64) -> abft::Result<f64> {
    let config = ScenarioConfig::one_shot(scheme, layout, 0, n)
        .with_trials(20_000)
        .with_seed(seed);
    Ok(run_experiment(&config)?.mean("successes").expect("metric"))
}

fn main() -> abft::Result<()> {
    println!("mean successful stations per beacon interval (all-EDMG, 20000 trials)");
    println!(
        "{:>4} {:>8} {:>8} {:>8} {:>8}",
        "N", "legacy", "E=2", "E=4", "E=8"
    );
    for n in (2..=30u32).step_by(2) {
        let legacy = mean_successes(
            SchemeId::Legacy80211ad,
            AbftLayout::new(8, 0, 16),
            n,
            n as u64,
        )?;
        let mut row = format!("{:>4} {:>8.3}", n, legacy);
        for extra in [2, 4, 8] {
            let extended = mean_successes(
                SchemeId::SaBft,
                AbftLayout::new(8, extra, 16),
                n,
                (extra * 100 + n) as u64,
            )?;
            row.push_str(&format!(" {:>8.3}", extended));
        }
        println!("{row}");
    }
    println!("\nmore extended slots, fewer collisions: each column dominates the last");
    Ok(())
}
