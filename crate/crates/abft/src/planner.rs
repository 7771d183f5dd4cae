//! Parameter planning: backoff-window sizing, expected per-slot throughput,
//! stage-cap optimization, and the overload switch that decides when the
//! secondary-backoff scheme is worth its frame cost.
//!
//! The stage cap `m` trades success probability against airtime: a wider
//! window (larger `m`) separates contenders better but its worst case
//! `T_max = 2^m · aSlotTime` eats into the slot's SSW budget. [`optimize_m`]
//! evaluates `N_slot = (16 − N_waste) · P_e` over every cap and picks the
//! argmax, solving the chain model for each row's `P_e`.

use serde::{Deserialize, Serialize};

use crate::contention::{frames_sendable, frames_wasted};
use crate::error::{Error, Result};
use crate::markov::{solve_fixed_point, ChainParams, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sim::BiResult;
use crate::types::TimingParams;

/// Worst-case secondary-backoff time `T_max = 2^m · aSlotTime`, microseconds.
pub fn t_max_us(m: u32, timing: &TimingParams) -> Result<u64> {
    if !(1..=5).contains(&m) {
        return Err(Error::range_u("m", m as u64, 1, 5));
    }
    Ok((1u64 << m) * timing.a_slot_time_us)
}

/// Expected SSW frames transmitted per slot at stage cap `m` under average
/// per-slot load `s`: `(16 − N_waste) · P_e`, with `P_e` from the chain
/// model's fixed point.
pub fn n_slot(m: u32, s: f64, p_floor: f64) -> Result<f64> {
    let params = ChainParams::new(p_floor, m, s).validate()?;
    let solution = solve_fixed_point(&params, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(frames_sendable(m, 16)? as f64 * solution.p_e)
}

/// One evaluated stage cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MRow {
    pub m: u32,
    pub n_waste: u32,
    pub n_send: u32,
    /// Fixed-point success probability; `None` when the solve failed.
    pub pe: Option<f64>,
    /// Expected frames per slot; `None` when the solve failed.
    pub n_slot: Option<f64>,
}

/// The full five-row plan and the chosen stage cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPlan {
    pub rows: Vec<MRow>,
    /// Cap maximizing `n_slot`; ties break toward the smaller cap. `None`
    /// only if every row failed to converge.
    pub chosen_m: Option<u32>,
    pub s: f64,
    pub p_floor: f64,
}

impl std::fmt::Display for MPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "s = {}, P = {}", self.s, self.p_floor)?;
        writeln!(f, "  m  n_waste  n_send      P_e   N_slot")?;
        for row in &self.rows {
            match (row.pe, row.n_slot) {
                (Some(pe), Some(n_slot)) => writeln!(
                    f,
                    "{}{:3}  {:7}  {:6}  {:7.4}  {:7.4}",
                    if Some(row.m) == self.chosen_m { ">" } else { " " },
                    row.m,
                    row.n_waste,
                    row.n_send,
                    pe,
                    n_slot
                )?,
                _ => writeln!(
                    f,
                    " {:3}  {:7}  {:6}  did not converge",
                    row.m, row.n_waste, row.n_send
                )?,
            }
        }
        Ok(())
    }
}

/// Evaluates every stage cap in 1..=5 and returns the table plus the argmax.
///
/// Rows whose fixed point fails to converge are kept in the table with empty
/// statistics and skipped by the argmax.
pub fn optimize_m(s: f64, p_floor: f64) -> Result<MPlan> {
    let mut rows = Vec::with_capacity(5);
    let mut chosen: Option<(u32, f64)> = None;
    for m in 1..=5u32 {
        let n_waste = frames_wasted(m)?;
        let n_send = frames_sendable(m, 16)?;
        let row = match n_slot(m, s, p_floor) {
            Ok(value) => {
                let pe = value / n_send as f64;
                if chosen.is_none_or(|(_, best)| value > best) {
                    chosen = Some((m, value));
                }
                MRow {
                    m,
                    n_waste,
                    n_send,
                    pe: Some(pe),
                    n_slot: Some(value),
                }
            }
            Err(Error::Convergence { .. }) => MRow {
                m,
                n_waste,
                n_send,
                pe: None,
                n_slot: None,
            },
            Err(other) => return Err(other),
        };
        rows.push(row);
    }
    Ok(MPlan {
        rows,
        chosen_m: chosen.map(|(m, _)| m),
        s,
        p_floor,
    })
}

/// How the access point arrives at its station-count estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// The true contender count is known (simulation studies).
    Exact,
    /// Derived from recent beacon-interval outcomes via [`estimate_contenders`].
    Historical,
}

/// Overload-indicator policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverloadConfig {
    /// Load threshold `N_th` at or above which the secondary-backoff scheme
    /// is switched on.
    pub n_th: u32,
    pub estimator: Estimator,
}

impl Default for OverloadConfig {
    fn default() -> Self {
        OverloadConfig {
            n_th: 6,
            estimator: Estimator::Historical,
        }
    }
}

/// Overload-indicator bit: 0 keeps the legacy phase, 1 enables the
/// secondary-backoff scheme, chosen by comparing the station estimate
/// against `N_th`.
pub fn overload_decision(s_estimate: u32, cfg: &OverloadConfig) -> u8 {
    if s_estimate < cfg.n_th {
        0
    } else {
        1
    }
}

/// Station-count estimate from recent beacon intervals.
///
/// Each interval contributes its observed successes plus two per collided
/// slot (a collision hides at least two stations); the estimate is the
/// ceiling of the mean over the last `window` intervals, never below the
/// largest success count actually seen there.
pub fn estimate_contenders(history: &[BiResult], window: usize) -> u32 {
    debug_assert!(window >= 1);
    let recent = &history[history.len().saturating_sub(window.max(1))..];
    if recent.is_empty() {
        return 0;
    }
    let total: u32 = recent
        .iter()
        .map(|bi| bi.successes + 2 * bi.collision_slots())
        .sum();
    let mean = (total as f64 / recent.len() as f64).ceil() as u32;
    let floor = recent.iter().map(|bi| bi.successes).max().unwrap_or(0);
    mean.max(floor)
}
