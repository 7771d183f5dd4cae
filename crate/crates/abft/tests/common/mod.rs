//! Shared oracles for the integration suites. Everything here recomputes
//! expected values by generic, independent routes: dense linear algebra for
//! stationary vectors and exhaustive enumeration for the subslot race.

use abft::markov::{transition_probability, ChainParams, ChainState};

/// Stationary vector of the chain by a generic linear solve: builds the
/// explicit transition matrix, replaces one balance row with normalization,
/// and runs Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn stationary_by_linear_solve(pe: f64, params: &ChainParams) -> Vec<(ChainState, f64)> {
    let states = params.state_space();
    let n = states.len();
    let mut matrix = vec![vec![0.0f64; n]; n];
    for (row, &from) in states.iter().enumerate() {
        for (col, &to) in states.iter().enumerate() {
            matrix[row][col] = transition_probability(from, to, pe, params).unwrap();
        }
    }

    // (Tᵀ − I)·π = 0 with the last equation replaced by Σπ = 1.
    let mut aug = vec![vec![0.0f64; n + 1]; n];
    for row in 0..n {
        for col in 0..n {
            aug[row][col] = matrix[col][row] - if row == col { 1.0 } else { 0.0 };
        }
    }
    for col in 0..n {
        aug[n - 1][col] = 1.0;
    }
    aug[n - 1][n] = 1.0;

    for pivot in 0..n {
        let best = (pivot..n)
            .max_by(|&a, &b| {
                aug[a][pivot]
                    .abs()
                    .partial_cmp(&aug[b][pivot].abs())
                    .unwrap()
            })
            .unwrap();
        aug.swap(pivot, best);
        let diag = aug[pivot][pivot];
        assert!(diag.abs() > 1e-13, "singular chain matrix at pivot {pivot}");
        for row in 0..n {
            if row != pivot {
                let factor = aug[row][pivot] / diag;
                if factor != 0.0 {
                    for col in pivot..=n {
                        aug[row][col] -= factor * aug[pivot][col];
                    }
                }
            }
        }
    }
    states
        .into_iter()
        .enumerate()
        .map(|(idx, state)| (state, aug[idx][n] / aug[idx][idx]))
        .collect()
}

/// Success probability of the subslot race by exhaustive enumeration of all
/// `window^c` timer assignments.
pub fn race_success_by_enumeration(contenders: u32, window: u32) -> f64 {
    let total = (window as u128).pow(contenders);
    let mut successes = 0u128;
    for code in 0..total {
        let mut rest = code;
        let mut min = u32::MAX;
        let mut holders = 0u32;
        for _ in 0..contenders {
            let draw = (rest % window as u128) as u32;
            rest /= window as u128;
            if draw < min {
                min = draw;
                holders = 1;
            } else if draw == min {
                holders += 1;
            }
        }
        if holders == 1 {
            successes += 1;
        }
    }
    successes as f64 / total as f64
}

/// Prints the verdict line for one acceptance criterion and panics on
/// failure so the test harness records it.
pub fn check(criterion: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {criterion}: {verdict} — {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}
