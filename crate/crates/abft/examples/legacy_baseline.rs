//! Baseline contention: how many stations train successfully in a legacy
//! 8-slot A-BFT as the population grows.
//!
//! Sweeps 1..=30 stations, prints the simulated mean next to the closed-form
//! occupancy expectation `N·(1 − 1/8)^(N−1)`, and marks the peak. Run with:
//!
//! ```bash
//! cargo run --release -p abft --example legacy_baseline
//! ```

use abft::sim::{run_experiment, ScenarioConfig};
use abft::types::{AbftLayout, SchemeId};

fn main() -> abft::Result<()> {
    let layout = AbftLayout::new(8, 0, 16);
    println!("legacy A-BFT, 8 slots, one-shot contention, 20000 trials per point");
    println!("{:>4} {:>10} {:>8} {:>10}", "N", "simulated", "ci95", "closed");

    let mut best = (0u32, 0.0f64);
    for n in 1..=30u32 {
        let config = ScenarioConfig::one_shot(SchemeId::Legacy80211ad, layout, n, 0)
            .with_trials(20_000)
            .with_seed(1000 + n as u64);
        let result = run_experiment(&config)?;
        let point = result.at("successes", n as f64).expect("metric present");
        let closed = n as f64 * (1.0 - 1.0 / 8.0f64).powi(n as i32 - 1);
        if point.mean > best.1 {
            best = (n, point.mean);
        }
        println!(
            "{:>4} {:>10.4} {:>8.4} {:>10.4}",
            n, point.mean, point.ci95, closed
        );
    }
    println!("\npeak: {:.3} successful stations at N = {}", best.1, best.0);
    println!("past the peak every extra station just raises the collision rate");
    Ok(())
}
