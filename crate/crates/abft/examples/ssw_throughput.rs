//! Sector-sweep frame throughput and the overload switch.
//!
//! The secondary backoff buys its collision resistance with airtime: the
//! window of a stage-3 station costs 3 of the 16 frame opportunities per
//! slot. This example sweeps the population, finds where the scheme starts
//! paying off, and shows the overload-indicator rule that an access point
//! would apply.
//!
//! ```bash
//! cargo run --release -p abft --example ssw_throughput
//! ```

use abft::contention::SbaParams;
use abft::planner::{overload_decision, OverloadConfig};
use abft::sim::{run_experiment, ScenarioConfig};
use abft::types::{AbftLayout, SchemeId};

fn main() -> abft::Result<()> {
    let legacy_layout = AbftLayout::new(8, 0, 16);
    let extended = AbftLayout::new(8, 8, 16);
    let sba = SbaParams::new(1.0, 3, 3);
    let trials = 20_000;
    let overload = OverloadConfig::default();

    println!("SSW frames transmitted per A-BFT phase ({trials} trials per point)");
    println!("{:>4} {:>9} {:>12} {:>4}", "S", "legacy", "sec.backoff", "OI");
    let mut crossover = None;
    for s in 1..=15u32 {
        let leg = run_experiment(
            &ScenarioConfig::one_shot(SchemeId::Legacy80211ad, legacy_layout, 0, s)
                .with_trials(trials)
                .with_seed(s as u64),
        )?
        .mean("ssw_frames")
        .unwrap();
        let sb = run_experiment(
            &ScenarioConfig::one_shot(SchemeId::SbaBft, extended, 0, s)
                .with_sba(sba)
                .with_trials(trials)
                .with_seed(1000 + s as u64),
        )?
        .mean("ssw_frames")
        .unwrap();
        if crossover.is_none() && sb > leg {
            crossover = Some(s);
        }
        println!(
            "{:>4} {:>9.2} {:>12.2} {:>4}",
            s,
            leg,
            sb,
            overload_decision(s, &overload)
        );
    }
    if let Some(s) = crossover {
        println!("\nthe secondary backoff overtakes legacy at S = {s}");
    }
    println!(
        "the default threshold N_th = {} keeps it off below that region",
        overload.n_th
    );
    Ok(())
}
