//! Choosing the backoff-stage cap.
//!
//! A larger cap widens the subslot window (better collision resistance) but
//! wastes more of the slot's 16 frame opportunities. For each load this
//! prints the full per-cap table and the cap that maximizes expected frames
//! per slot.
//!
//! ```bash
//! cargo run --release -p abft --example optimize_backoff
//! ```

use abft::planner::optimize_m;

fn main() -> abft::Result<()> {
    for s in [0.5, 2.0, 6.0, 15.0, 30.0] {
        let plan = optimize_m(s, 1.0)?;
        print!("{plan}");
        match plan.chosen_m {
            Some(m) => println!("  -> run with m = {m}\n"),
            None => println!("  -> no cap converged\n"),
        }
    }
    println!("light load favors the narrowest window; heavy load pays for a wider one");
    Ok(())
}
