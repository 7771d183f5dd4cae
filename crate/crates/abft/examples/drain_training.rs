//! Multi-interval training: how long until everyone is beam-trained?
//!
//! Runs the population in drain mode — winners leave, losers carry their
//! backoff state into the next beacon interval — and reports how many
//! intervals each scheme needs to train 30 stations.
//!
//! ```bash
//! cargo run --release -p abft --example drain_training
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use abft::contention::SbaParams;
use abft::sim::{run_bi, PopulationMode, ScenarioConfig};
use abft::types::{AbftLayout, SchemeId};

fn intervals_to_train(config: &ScenarioConfig, trials: u64, cap: u32) -> Vec<f64> {
    let mut finishes = Vec::new();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
        rng.set_stream(trial);
        let mut population = config.build_population();
        let mut done_at = cap;
        for bi in 1..=cap {
            run_bi(&mut population, config, &mut rng).expect("valid scenario");
            if population.iter().all(|sta| sta.trained) {
                done_at = bi;
                break;
            }
        }
        finishes.push(done_at as f64);
    }
    finishes
}

fn summarize(label: &str, finishes: &[f64]) {
    let mean = finishes.iter().sum::<f64>() / finishes.len() as f64;
    let max = finishes.iter().cloned().fold(0.0, f64::max);
    println!("{label:<22} mean {mean:>6.2} intervals, worst {max:>4.0}");
}

fn main() {
    let stations = 30;
    let trials = 400;
    let cap = 80;
    println!("intervals until all {stations} stations finish training ({trials} trials)");

    let legacy = ScenarioConfig::one_shot(
        SchemeId::Legacy80211ad,
        AbftLayout::new(8, 0, 16),
        0,
        stations,
    )
    .with_mode(PopulationMode::Drain, cap)
    .with_seed(5);
    summarize("legacy 8 slots", &intervals_to_train(&legacy, trials, cap));

    let separated =
        ScenarioConfig::one_shot(SchemeId::SaBft, AbftLayout::new(8, 8, 16), 0, stations)
            .with_mode(PopulationMode::Drain, cap)
            .with_seed(6);
    summarize("separated 8+8", &intervals_to_train(&separated, trials, cap));

    let backoff =
        ScenarioConfig::one_shot(SchemeId::SbaBft, AbftLayout::new(8, 8, 16), 0, stations)
            .with_sba(SbaParams::new(1.0, 3, 3))
            .with_mode(PopulationMode::Drain, cap)
            .with_seed(7);
    summarize("secondary backoff", &intervals_to_train(&backoff, trials, cap));

    println!("\nboth extensions drain an order faster than legacy; the secondary");
    println!("backoff trades a slightly longer tail (its stations share only the");
    println!("extended region) for far more successes per interval when dense");
}
