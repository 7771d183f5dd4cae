//! Analytical model of the secondary-backoff scheme: a three-dimensional
//! discrete-time Markov chain over one A-BFT slot.
//!
//! A station's state is `(j, i, k)`:
//!
//! * `j` — times prohibited by the admission gate,
//! * `i` — backoff stage (failed contention attempts),
//! * `k` — remaining secondary-backoff subslots, with `k = −1` denoting the
//!   gate state where the station awaits admission.
//!
//! The model couples `j` and `i` (`n = m`, so `j = i` throughout), giving per
//! stage a gate state and a countdown ramp of `W_i = 2^(m−i)` subslots. From
//! the bottom of a ramp the station transmits: with probability `pe` it wins
//! the slot and returns to the initial gate `(0,0,−1)`, otherwise it moves to
//! the next stage's gate (staying at stage `m` once there). Gates admit with
//! probability `P/P_j` into a uniformly chosen ramp position and otherwise
//! escalate to the next gate; the last gate admits with certainty.
//!
//! [`stationary_distribution`] solves the chain's balance equations exactly
//! with a single forward substitution, [`pe_of`] gives the per-slot success
//! probability of the subslot race by summing over first-pick positions, and
//! [`solve_fixed_point`] couples the two: the stationary transmission
//! probability determines the expected slot occupancy, which determines the
//! race's success probability, which feeds back into the chain.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Inputs of the chain model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    /// Admission floor `P` in (0, 1].
    pub p_floor: f64,
    /// Backoff-stage cap `m` in 1..=5.
    pub m: u32,
    /// Prohibition cap `n`; the analytic model requires `n = m`.
    pub n: u32,
    /// Minimum backoff window in subslots; the model fixes this to 1
    /// (`aSlotTime` is a pure time scale and cancels out of every probability).
    pub w_min: u32,
    /// Average number of contending stations per A-BFT slot.
    pub s: f64,
}

impl ChainParams {
    pub fn new(p_floor: f64, m: u32, s: f64) -> Self {
        ChainParams {
            p_floor,
            m,
            n: m,
            w_min: 1,
            s,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.p_floor > 0.0 && self.p_floor <= 1.0) {
            return Err(Error::Range {
                field: "p_floor",
                value: self.p_floor,
                min: f64::MIN_POSITIVE,
                max: 1.0,
            });
        }
        if !(1..=5).contains(&self.m) {
            return Err(Error::range_u("m", self.m as u64, 1, 5));
        }
        if self.n != self.m {
            return Err(Error::Config(format!(
                "analytic chain requires n = m, got n = {} with m = {}",
                self.n, self.m
            )));
        }
        if self.w_min != 1 {
            return Err(Error::range_u("w_min", self.w_min as u64, 1, 1));
        }
        if self.s.is_nan() || self.s < 0.0 {
            return Err(Error::Range {
                field: "s",
                value: self.s,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(self)
    }

    /// Gate bound `P_j = 1 − j·(1 − P)/n`.
    pub fn stage_bound(&self, j: u32) -> f64 {
        1.0 - j as f64 * (1.0 - self.p_floor) / self.n as f64
    }

    /// Admission probability `P / P_j` of gate `j`.
    pub fn admit_probability(&self, j: u32) -> f64 {
        self.p_floor / self.stage_bound(j)
    }

    /// Backoff window `W_i` of stage `i`, in subslots.
    pub fn window(&self, i: u32) -> u32 {
        self.w_min << (self.m - i)
    }

    /// Every state of the chain, the gate first within each stage.
    pub fn state_space(&self) -> Vec<ChainState> {
        let mut states = Vec::new();
        for stage in 0..=self.m {
            states.push(ChainState::gate(stage));
            for k in 0..self.window(stage) {
                states.push(ChainState::ramp(stage, k));
            }
        }
        states
    }

    fn contains(&self, state: ChainState) -> bool {
        state.j == state.i
            && state.i <= self.m
            && state.k >= -1
            && state.k < self.window(state.i) as i64
    }
}

/// One chain state `(j, i, k)`; `k = −1` is the stage's gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainState {
    pub j: u32,
    pub i: u32,
    pub k: i64,
}

impl ChainState {
    pub fn gate(stage: u32) -> Self {
        ChainState {
            j: stage,
            i: stage,
            k: -1,
        }
    }

    pub fn ramp(stage: u32, k: u32) -> Self {
        ChainState {
            j: stage,
            i: stage,
            k: k as i64,
        }
    }
}

impl std::fmt::Display for ChainState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.j, self.i, self.k)
    }
}

fn serialize_state_map<S: Serializer>(
    map: &BTreeMap<ChainState, f64>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut out = ser.serialize_map(Some(map.len()))?;
    for (state, prob) in map {
        out.serialize_entry(&state.to_string(), prob)?;
    }
    out.end()
}

/// One-step transition probability of the chain, matching the model's
/// transition list case by case. Zero for every pair not named there.
pub fn transition_probability(
    from: ChainState,
    to: ChainState,
    pe: f64,
    params: &ChainParams,
) -> Result<f64> {
    for state in [from, to] {
        if !params.contains(state) {
            return Err(Error::Range {
                field: "state",
                value: state.k as f64,
                min: -1.0,
                max: params.window(state.i.min(params.m)) as f64 - 1.0,
            });
        }
    }
    let stage = from.i;
    let prob = if from.k >= 1 {
        // Countdown: the backoff timer decrements once per subslot.
        if to == ChainState::ramp(stage, from.k as u32 - 1) {
            1.0
        } else {
            0.0
        }
    } else if from.k == 0 {
        // Timer expired: transmit. Success restarts at the initial gate;
        // failure escalates to the next gate (the top stage re-enters its own).
        let failure_gate = ChainState::gate((stage + 1).min(params.m));
        if to == ChainState::gate(0) {
            pe
        } else if to == failure_gate {
            1.0 - pe
        } else {
            0.0
        }
    } else {
        // Gate: admit uniformly into this stage's ramp, or escalate.
        let admit = params.admit_probability(stage);
        let window = params.window(stage) as f64;
        if to.j == stage && to.k >= 0 {
            admit / window
        } else if stage < params.m && to == ChainState::gate(stage + 1) {
            1.0 - admit
        } else {
            0.0
        }
    };
    Ok(prob)
}

/// Stationary distribution of the chain for a given per-transmission success
/// probability `pe`.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    /// Probability of the fresh-station transmit state `(0,0,0)`.
    pub b000: f64,
    probs: BTreeMap<ChainState, f64>,
}

impl StationaryDistribution {
    pub fn probs(&self) -> &BTreeMap<ChainState, f64> {
        &self.probs
    }

    pub fn prob(&self, state: ChainState) -> f64 {
        self.probs.get(&state).copied().unwrap_or(0.0)
    }

    /// Normalization defect `|Σ π − 1|`.
    pub fn normalization_defect(&self) -> f64 {
        (self.probs.values().sum::<f64>() - 1.0).abs()
    }

    /// Largest global-balance violation `max_s' |π(s') − Σ_s π(s)·T(s, s')|`
    /// over the explicit transition matrix.
    pub fn balance_residual(&self, pe: f64, params: &ChainParams) -> Result<f64> {
        let states = params.state_space();
        let mut worst = 0.0f64;
        for &to in &states {
            let mut inflow = 0.0;
            for &from in &states {
                inflow += self.prob(from) * transition_probability(from, to, pe, params)?;
            }
            worst = worst.max((inflow - self.prob(to)).abs());
        }
        Ok(worst)
    }

    /// Per-slot transmission probability summed directly over the ramp-bottom
    /// states: `Σ_j π(j, j, 0)`.
    pub fn transmit_probability(&self) -> f64 {
        self.probs
            .iter()
            .filter(|(state, _)| state.k == 0)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Solves the chain's global balance equations exactly.
///
/// Flow conservation gives each stage's gate occupancy from the previous
/// stage (gate escalation plus transmit failure), with the top stage
/// absorbing its own retry loop; ramp occupancies decay linearly from the
/// stage's entry mass. One forward pass plus normalization therefore yields
/// the full stationary vector.
pub fn stationary_distribution(pe: f64, params: &ChainParams) -> Result<StationaryDistribution> {
    if !(0.0..=1.0).contains(&pe) {
        return Err(Error::Range {
            field: "pe",
            value: pe,
            min: 0.0,
            max: 1.0,
        });
    }
    let params = params.validate()?;
    let m = params.m as usize;

    // Unnormalized gate masses g[j] and ramp-bottom masses q[j] = g[j]·(P/P_j).
    let mut gate = vec![0.0f64; m + 1];
    let mut bottom = vec![0.0f64; m + 1];
    gate[0] = 1.0;
    bottom[0] = params.admit_probability(0);
    for stage in 1..=m {
        let j = stage as u32;
        let inflow = gate[stage - 1] * (1.0 - params.admit_probability(j - 1))
            + bottom[stage - 1] * (1.0 - pe);
        gate[stage] = if stage == m {
            // The top stage fails back into its own gate: g_m·pe = inflow.
            inflow / pe
        } else {
            inflow
        };
        bottom[stage] = gate[stage] * params.admit_probability(j);
    }

    let mut total = 0.0;
    for stage in 0..=m {
        let window = params.window(stage as u32) as f64;
        total += gate[stage] + bottom[stage] * (window + 1.0) / 2.0;
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numerical(format!(
            "stationary normalization sum is {total} (pe = {pe})"
        )));
    }

    let mut probs = BTreeMap::new();
    for stage in 0..=m {
        let j = stage as u32;
        let window = params.window(j) as f64;
        probs.insert(ChainState::gate(j), gate[stage] / total);
        for k in 0..params.window(j) {
            // Linear ramp: position k is passed by every entry at or above it.
            let occupancy = bottom[stage] * (window - k as f64) / window;
            probs.insert(ChainState::ramp(j, k), occupancy / total);
        }
    }
    Ok(StationaryDistribution {
        b000: bottom[0] / total,
        probs,
    })
}

/// Per-slot transmission probability as the closed-form stage series
/// `b000 · (1 + Σ_{i=1}^{m} (1−pe)^i · P^i / Π_{d=1}^{i} P_d)`.
///
/// The series multiplies per-stage factors along the collision path only, so
/// it omits the top stage's retry loop and, for `P < 1`, the gate-escalation
/// inflow; it therefore understates the exact ramp-bottom sum
/// ([`StationaryDistribution::transmit_probability`]) except when `pe = 1`
/// makes both collapse to `b000`.
pub fn p_tr_of(b000: f64, pe: f64, params: &ChainParams) -> f64 {
    let mut series = 1.0;
    let mut term = 1.0;
    for stage in 1..=params.m {
        term *= (1.0 - pe) * params.p_floor / params.stage_bound(stage);
        series += term;
    }
    b000 * series
}

/// Success probability of the subslot race with `c = ⌈s · p_tr⌉` contenders
/// over `K = 2^m` subslots.
///
/// The race succeeds when the earliest drawn subslot has exactly one holder:
/// summing over that subslot `j`, one of `c` stations picks it and the rest
/// land strictly later, giving `Σ_{j=0}^{K−1} c·(K−1−j)^{c−1} / K^c`. A lone
/// contender (`c ≤ 1`) always succeeds.
pub fn pe_of(p_tr: f64, s: f64, m: u32) -> Result<f64> {
    if !(1..=5).contains(&m) {
        return Err(Error::range_u("m", m as u64, 1, 5));
    }
    let load = s * p_tr;
    if load.is_nan() || load < 0.0 {
        return Err(Error::Numerical(format!("s·p_tr = {load} must be >= 0")));
    }
    let contenders = load.ceil();
    if contenders <= 1.0 {
        return Ok(1.0);
    }
    let k = (1u32 << m) as f64;
    let mut sum = 0.0;
    for j in 0..(1u32 << m) {
        sum += contenders * ((k - 1.0 - j as f64) / k).powi(contenders as i32 - 1) / k;
    }
    Ok(sum)
}

/// Converged solution of the coupled model.
#[derive(Debug, Clone, Serialize)]
pub struct ChainSolution {
    /// Stationary probability of state `(0,0,0)`.
    pub b000: f64,
    /// Per-slot transmission probability: the stationary ramp-bottom sum at
    /// the fixed point.
    pub p_tr: f64,
    /// Per-slot success probability of the subslot race.
    pub p_e: f64,
    /// Full stationary vector keyed by `"j,i,k"`.
    #[serde(serialize_with = "serialize_state_map")]
    pub state_probs: BTreeMap<ChainState, f64>,
    /// Normalization defect of the stationary vector.
    pub residual: f64,
    /// Fixed-point iterations used.
    pub iterations: u32,
}

/// Default fixed-point tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default fixed-point iteration cap.
pub const DEFAULT_MAX_ITER: u32 = 10_000;

/// Solves the coupled equations for `pe` and `p_tr` by damped fixed-point
/// iteration from `pe = 1`, halving the step toward each new estimate.
///
/// Each iteration evaluates the transmission probability as the stationary
/// ramp-bottom sum `Σ_j b_{j,j,0}` — the defining form, which keeps the map
/// well-posed where the truncated series of [`p_tr_of`] has no fixed point —
/// and feeds it through [`pe_of`]. Convergence means the self-consistency
/// residual `|pe − pe_of(p_tr(pe))|` dropped below `tol`; the returned
/// solution reproduces both coupled equations to that tolerance.
pub fn solve_fixed_point(params: &ChainParams, tol: f64, max_iter: u32) -> Result<ChainSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Range {
            field: "tol",
            value: tol,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let params = params.validate()?;
    let mut pe = 1.0f64;
    let mut iterations = 0;
    loop {
        let stationary = stationary_distribution(pe, &params)?;
        let p_tr = stationary.transmit_probability();
        let target = pe_of(p_tr, params.s, params.m)?;
        if (target - pe).abs() < tol {
            return Ok(ChainSolution {
                b000: stationary.b000,
                p_tr,
                p_e: pe,
                residual: stationary.normalization_defect(),
                iterations,
                state_probs: stationary.probs,
            });
        }
        if iterations >= max_iter {
            return Err(Error::Convergence {
                iterations,
                last_pe: pe,
                last_p_tr: p_tr,
            });
        }
        pe = 0.5 * pe + 0.5 * target;
        iterations += 1;
    }
}

/// Empirical state occupancy from a step-by-step simulation of the chain.
#[derive(Debug, Clone)]
pub struct ChainOccupancy {
    visits: BTreeMap<ChainState, u64>,
    steps: u64,
}

impl ChainOccupancy {
    /// Visit counts per state; they sum to the number of steps exactly.
    pub fn visits(&self) -> &BTreeMap<ChainState, u64> {
        &self.visits
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Visit frequencies per state.
    pub fn frequencies(&self) -> BTreeMap<ChainState, f64> {
        self.visits
            .iter()
            .map(|(&s, &c)| (s, c as f64 / self.steps as f64))
            .collect()
    }

    /// Total-variation distance from an analytic stationary vector.
    pub fn total_variation(&self, stationary: &StationaryDistribution) -> f64 {
        let freqs = self.frequencies();
        let mut tv = 0.0;
        for (&state, &p) in stationary.probs() {
            tv += (freqs.get(&state).copied().unwrap_or(0.0) - p).abs();
        }
        // States visited but absent from the reference carry zero mass there.
        for (state, &f) in &freqs {
            if !stationary.probs().contains_key(state) {
                tv += f;
            }
        }
        tv / 2.0
    }
}

/// Simulates the chain for `steps` transitions with a fixed `pe`, starting
/// from the initial gate, and tallies visits.
pub fn chain_monte_carlo(
    params: &ChainParams,
    pe: f64,
    steps: u64,
    seed: u64,
) -> Result<ChainOccupancy> {
    if steps == 0 {
        return Err(Error::range_u("steps", 0, 1, u64::MAX));
    }
    if !(0.0..=1.0).contains(&pe) {
        return Err(Error::Range {
            field: "pe",
            value: pe,
            min: 0.0,
            max: 1.0,
        });
    }
    let params = params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Dense per-stage tallies; stage s occupies [offset, offset + 1 + W_s),
    // gate first.
    let states = params.state_space();
    let stages: Vec<(u64, f64, u32)> = {
        let mut offset = 0u64;
        (0..=params.m)
            .map(|stage| {
                let entry = (offset, params.admit_probability(stage), params.window(stage));
                offset += 1 + params.window(stage) as u64;
                entry
            })
            .collect()
    };
    let mut tally = vec![0u64; states.len()];
    let (mut stage, mut k) = (0usize, -1i64);
    for _ in 0..steps {
        tally[(stages[stage].0 + (k + 1) as u64) as usize] += 1;
        if k >= 1 {
            k -= 1;
        } else if k == 0 {
            stage = if rng.gen::<f64>() < pe {
                0
            } else {
                (stage + 1).min(params.m as usize)
            };
            k = -1;
        } else {
            let (_, admit, window) = stages[stage];
            if rng.gen::<f64>() < admit {
                k = rng.gen_range(0..window) as i64;
            } else {
                stage = (stage + 1).min(params.m as usize);
            }
        }
    }
    let visits = states
        .into_iter()
        .zip(tally)
        .filter(|(_, count)| *count > 0)
        .collect();
    Ok(ChainOccupancy { visits, steps })
}
