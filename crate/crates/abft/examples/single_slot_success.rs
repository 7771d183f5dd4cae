//! Success probability of one contended slot.
//!
//! Without secondary backoff a slot shared by two stations is always lost.
//! With it, each station draws a timer over `2^m` subslots and carrier
//! sensing lets the earliest unique draw win, so even crowded slots usually
//! produce a trained station. Simulated rates are printed next to the exact
//! enumeration values.
//!
//! ```bash
//! cargo run --release -p abft --example single_slot_success
//! ```

use abft::markov::pe_of;
use abft::sim::single_slot_success;
use abft::types::SchemeId;

fn main() -> abft::Result<()> {
    let trials = 100_000;
    println!("per-slot success probability vs stations forced into the slot");
    println!(
        "{:>3} {:>8} {:>12} {:>8} {:>12} {:>8} {:>8}",
        "s", "m=1 sim", "m=1 exact", "m=3 sim", "m=3 exact", "m=5 sim", "legacy"
    );
    for s in 1..=10u32 {
        let legacy = single_slot_success(s, 3, SchemeId::Legacy80211ad, trials, 0)?;
        let mut row = format!("{s:>3}");
        for m in [1u32, 3, 5] {
            let sim = single_slot_success(s, m, SchemeId::SbaBft, trials, (m * 1000 + s) as u64)?;
            if m == 5 {
                row.push_str(&format!(" {sim:>8.4}"));
            } else {
                let exact = pe_of(1.0, s as f64, m)?;
                row.push_str(&format!(" {sim:>8.4} {exact:>12.4}"));
            }
        }
        row.push_str(&format!(" {legacy:>8.1}"));
        println!("{row}");
    }
    println!("\nwider windows (larger m) keep dense slots alive far longer");
    Ok(())
}
