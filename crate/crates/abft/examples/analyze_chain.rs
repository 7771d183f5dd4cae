//! The analytic chain model, cross-validated three ways.
//!
//! For a grid of loads this solves the coupled fixed point (stationary
//! distribution ↔ race success probability), then verifies the stationary
//! vector against a long step-by-step simulation of the same chain and
//! reports the per-slot transmission probability both exactly and through
//! the closed-form stage series.
//!
//! ```bash
//! cargo run --release -p abft --example analyze_chain
//! ```

use abft::markov::{
    chain_monte_carlo, p_tr_of, solve_fixed_point, stationary_distribution, ChainParams,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

fn main() -> abft::Result<()> {
    let p_floor = 0.8;
    let m = 3;
    println!("chain model at P = {p_floor}, m = {m}");
    println!(
        "{:>4} {:>9} {:>9} {:>9} {:>7} {:>9} {:>10}",
        "s", "pe", "p_tr", "series", "iters", "b000", "sim TV"
    );
    for s in [1.0, 2.0, 4.0, 8.0, 16.0, 30.0] {
        let params = ChainParams::new(p_floor, m, s);
        let sol = solve_fixed_point(&params, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        let stationary = stationary_distribution(sol.p_e, &params)?;
        let occupancy = chain_monte_carlo(&params, sol.p_e, 500_000, 42)?;
        let tv = occupancy.total_variation(&stationary);
        let series = p_tr_of(sol.b000, sol.p_e, &params);
        println!(
            "{:>4} {:>9.5} {:>9.5} {:>9.5} {:>7} {:>9.5} {:>10.5}",
            s, sol.p_e, sol.p_tr, series, sol.iterations, sol.b000, tv
        );
    }
    println!("\np_tr sums the stationary transmit states; `series` is the closed-form");
    println!("stage expansion, which understates the top stage's retry loop");
    Ok(())
}
