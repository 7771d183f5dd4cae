//! Head-to-head comparison of the three contention schemes as the network
//! gets denser: legacy 8-slot, separated 8+8, and secondary backoff in the
//! extended region.
//!
//! ```bash
//! cargo run --release -p abft --example scheme_comparison
//! ```

use abft::contention::SbaParams;
use abft::sim::{run_experiment, ScenarioConfig};
use abft::types::{AbftLayout, SchemeId};

fn main() -> abft::Result<()> {
    let legacy_layout = AbftLayout::new(8, 0, 16);
    let extended = AbftLayout::new(8, 8, 16);
    let sba = SbaParams::new(1.0, 3, 3);
    let trials = 20_000;

    println!("mean successful stations per beacon interval ({trials} trials per point)");
    println!(
        "{:>4} {:>9} {:>10} {:>10}",
        "S", "legacy", "separated", "sec.backoff"
    );
    for s in (2..=30u32).step_by(2) {
        let leg = run_experiment(
            &ScenarioConfig::one_shot(SchemeId::Legacy80211ad, legacy_layout, 0, s)
                .with_trials(trials)
                .with_seed(s as u64),
        )?
        .mean("successes")
        .unwrap();
        let sep = run_experiment(
            &ScenarioConfig::one_shot(SchemeId::SaBft, extended, 0, s)
                .with_trials(trials)
                .with_seed(1000 + s as u64),
        )?
        .mean("successes")
        .unwrap();
        let sb = run_experiment(
            &ScenarioConfig::one_shot(SchemeId::SbaBft, extended, 0, s)
                .with_sba(sba)
                .with_trials(trials)
                .with_seed(2000 + s as u64),
        )?
        .mean("successes")
        .unwrap();
        println!("{:>4} {:>9.3} {:>10.3} {:>10.3}", s, leg, sep, sb);
    }
    println!("\nthe secondary backoff pulls ahead exactly where collisions dominate");
    Ok(())
}
