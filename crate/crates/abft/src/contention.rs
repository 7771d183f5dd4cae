//! Per-A-BFT contention primitives.
//!
//! Three mechanisms live here:
//!
//! * **Slot-region selection** ([`select_slot`]): which slots a station may
//!   draw from under each scheme. Legacy stations always draw from the first
//!   region; under the separated scheme EDMG stations draw from the union of
//!   both regions; under the secondary-backoff scheme EDMG stations draw from
//!   the extended region only, so the two populations never collide.
//!
//! * **Admission gate** ([`p_phase_gate`]): before entering the phase an EDMG
//!   station is admitted with probability `P / P_j`, where
//!   `P_j = 1 − j·(1 − P)/n` shrinks toward `P` as the rejection count `j`
//!   grows. At `j = n` admission is certain.
//!
//! * **Subslot contest** ([`slot_contest`]): stations sharing a slot each draw
//!   a backoff timer over `2^(m−i)` subslots, where `i` is the station's
//!   failure stage — more failures, shorter window, higher priority. The
//!   unique holder of the earliest drawn subslot transmits; everyone else
//!   defers on CCA. Ties on the earliest subslot collide.
//!
//! The subslot race consumes transmit opportunities: with `m` stages the
//! window spans `2^m` subslots of `aSlotTime`, which costs up to
//! [`frames_wasted`] of the slot's `fss` frame budget, leaving
//! [`frames_sendable`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AbftLayout, SchemeId, StaKind, StaState};

/// Parameters of the secondary-backoff scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SbaParams {
    /// Admission floor `P` in (0, 1]: the entry probability of a fresh station.
    pub p_floor: f64,
    /// Maximum prohibited times `n` (≥ 1). Gate rejections stop counting here.
    pub n_max: u32,
    /// Maximum failed times `m` in 1..=5. Backoff stages stop counting here.
    pub m_max: u32,
    /// Minimum backoff length `W` in microseconds (one `aSlotTime` subslot).
    pub w_min_us: u64,
}

impl Default for SbaParams {
    fn default() -> Self {
        SbaParams {
            p_floor: 1.0,
            n_max: 3,
            m_max: 3,
            w_min_us: 5,
        }
    }
}

impl SbaParams {
    pub fn new(p_floor: f64, m_max: u32, n_max: u32) -> Self {
        SbaParams {
            p_floor,
            m_max,
            n_max,
            w_min_us: 5,
        }
    }

    /// Validates ranges: `0 < p_floor ≤ 1`, `1 ≤ m_max ≤ 5`, `n_max ≥ 1`.
    ///
    /// The analytic chain model additionally requires `n_max = m_max`; the
    /// simulator does not.
    pub fn validate(self) -> Result<Self> {
        if !(self.p_floor > 0.0 && self.p_floor <= 1.0) {
            return Err(Error::Range {
                field: "p_floor",
                value: self.p_floor,
                min: f64::MIN_POSITIVE,
                max: 1.0,
            });
        }
        if !(1..=5).contains(&self.m_max) {
            return Err(Error::range_u("m_max", self.m_max as u64, 1, 5));
        }
        if self.n_max == 0 {
            return Err(Error::range_u("n_max", 0, 1, u32::MAX as u64));
        }
        if self.w_min_us == 0 {
            return Err(Error::range_u("w_min_us", 0, 1, u64::MAX));
        }
        Ok(self)
    }
}

/// Result of one slot's subslot contest.
///
/// Station identities are indices into the contender list handed to
/// [`slot_contest`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotContestOutcome {
    /// Nobody contended for the slot.
    Idle,
    /// Exactly one contender drew the strictly earliest subslot and transmits.
    Success { winner: usize, subslot: u32 },
    /// Two or more contenders tied on the earliest subslot. The deferred
    /// (later-timer) contenders are not listed: CCA keeps them silent.
    Collision { contenders: Vec<usize>, subslot: u32 },
}

/// Gate bound `P_j = 1 − j·(1 − P)/n` for a station rejected `j` times.
///
/// Decreases from 1 at `j = 0` to `P` at `j = n`.
pub fn p_stage_bound(j: u32, params: &SbaParams) -> Result<f64> {
    if j > params.n_max {
        return Err(Error::range_u("j", j as u64, 0, params.n_max as u64));
    }
    Ok(1.0 - j as f64 * (1.0 - params.p_floor) / params.n_max as f64)
}

/// Effective admission probability `P / P_j` of the gate at rejection count `j`.
///
/// Rises from `P` at `j = 0` to 1 at `j = n`: a station cannot be prohibited
/// forever.
pub fn entry_probability(j: u32, params: &SbaParams) -> Result<f64> {
    Ok(params.p_floor / p_stage_bound(j, params)?)
}

/// Draws the admission gate for one EDMG station.
///
/// The station picks `p` uniformly over `[0, P_j]` and is admitted when
/// `p ≤ P`, i.e. with probability `P / P_j`. At `j = n_max` (where `P_j = P`)
/// and whenever `P = 1` the draw always admits.
pub fn p_phase_gate<R: Rng + ?Sized>(sta: &StaState, params: &SbaParams, rng: &mut R) -> bool {
    debug_assert_eq!(sta.kind, StaKind::Edmg, "the gate applies to EDMG stations");
    let j = sta.prohibit_count.min(params.n_max);
    let bound = p_stage_bound(j, params).expect("clamped to n_max");
    let p = rng.gen::<f64>() * bound;
    p <= params.p_floor
}

/// Picks an A-BFT slot uniformly over the station's region for the scheme.
///
/// * Legacy: everyone over `[0, abft_length)`.
/// * Separated: DMG over `[0, abft_length)`, EDMG over the full
///   `[0, abft_length + e_abft_length)`.
/// * Secondary backoff: DMG over `[0, abft_length)`, EDMG over the extended
///   region `[abft_length, abft_length + e_abft_length)` only.
pub fn select_slot<R: Rng + ?Sized>(
    sta: &StaState,
    layout: &AbftLayout,
    scheme: SchemeId,
    rng: &mut R,
) -> Result<u32> {
    let l = layout.abft_length;
    let e = layout.e_abft_length;
    let slot = match (scheme, sta.kind) {
        (SchemeId::Legacy80211ad, _) | (SchemeId::SaBft, StaKind::Dmg) => rng.gen_range(0..l),
        (SchemeId::SaBft, StaKind::Edmg) => rng.gen_range(0..l + e),
        (SchemeId::SbaBft, StaKind::Dmg) => rng.gen_range(0..l),
        (SchemeId::SbaBft, StaKind::Edmg) => {
            if e == 0 {
                return Err(Error::Config(
                    "secondary-backoff scheme needs e_abft_length >= 1 for EDMG stations".into(),
                ));
            }
            rng.gen_range(l..l + e)
        }
    };
    Ok(slot)
}

/// Secondary-backoff window size in subslots for failure stage `i`:
/// `W_i = 2^(m − i)` subslots of `aSlotTime`.
///
/// Halves per failure, down to a single subslot at `i = m`.
pub fn backoff_window_subslots(i: u32, params: &SbaParams) -> Result<u32> {
    if i > params.m_max {
        return Err(Error::range_u("i", i as u64, 0, params.m_max as u64));
    }
    Ok(1 << (params.m_max - i))
}

/// Draws a backoff timer: a uniform subslot index in `[0, W_i)`.
pub fn draw_backoff<R: Rng + ?Sized>(i: u32, params: &SbaParams, rng: &mut R) -> Result<u32> {
    let window = backoff_window_subslots(i, params)?;
    Ok(rng.gen_range(0..window))
}

/// Runs the subslot contest among the stations sharing one slot.
///
/// `contender_stages[s]` is station `s`'s failure stage. Every contender draws
/// a timer via [`draw_backoff`]; the unique holder of the minimum subslot wins
/// and transmits. Holders of later subslots hear the winner via CCA and defer —
/// they neither transmit nor appear in a `Collision`. Only a tie on the
/// minimum subslot collides.
pub fn slot_contest<R: Rng + ?Sized>(
    contender_stages: &[u32],
    params: &SbaParams,
    rng: &mut R,
) -> Result<SlotContestOutcome> {
    if contender_stages.is_empty() {
        return Ok(SlotContestOutcome::Idle);
    }
    let mut draws = Vec::with_capacity(contender_stages.len());
    for &stage in contender_stages {
        draws.push(draw_backoff(stage, params, rng)?);
    }
    let min = *draws.iter().min().expect("non-empty");
    let holders: Vec<usize> = draws
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == min)
        .map(|(s, _)| s)
        .collect();
    Ok(if holders.len() == 1 {
        SlotContestOutcome::Success {
            winner: holders[0],
            subslot: min,
        }
    } else {
        SlotContestOutcome::Collision {
            contenders: holders,
            subslot: min,
        }
    })
}

/// Worst-case SSW-frame opportunities consumed by the backoff window:
/// `⌈5 · 2^(m−4)⌉` = `⌈2^m · aSlotTime / (TXTIME(SSW) + SBIFS)⌉` with the
/// default 5/15/1 µs timing.
pub fn frames_wasted(m: u32) -> Result<u32> {
    if !(1..=5).contains(&m) {
        return Err(Error::range_u("m", m as u64, 1, 5));
    }
    Ok((5u32 << m).div_ceil(16))
}

/// SSW frames still sendable after the backoff window: `fss − N_waste`,
/// floored at zero.
pub fn frames_sendable(m: u32, fss: u32) -> Result<u32> {
    Ok(fss.saturating_sub(frames_wasted(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn params(p: f64, m: u32, n: u32) -> SbaParams {
        SbaParams::new(p, m, n).validate().unwrap()
    }

    #[test]
    fn stage_bound_endpoints_and_interior() {
        let p = params(0.5, 4, 4);
        assert_eq!(p_stage_bound(0, &p).unwrap(), 1.0);
        assert_eq!(p_stage_bound(4, &p).unwrap(), 0.5);
        assert_eq!(p_stage_bound(2, &p).unwrap(), 0.75);
        assert!(p_stage_bound(5, &p).is_err());
    }

    #[test]
    fn entry_probability_endpoints_and_interior() {
        let p8 = params(0.8, 3, 3);
        assert_eq!(entry_probability(0, &p8).unwrap(), 0.8);
        assert_eq!(entry_probability(3, &p8).unwrap(), 1.0);
        let p5 = params(0.5, 4, 4);
        assert!((entry_probability(2, &p5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn entry_probability_increases_with_rejections() {
        let p = params(0.3, 5, 5);
        let mut prev = 0.0;
        for j in 0..=5 {
            let e = entry_probability(j, &p).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    proptest! {
        // Algebraic identity: entry probability times gate bound is the floor.
        #[test]
        fn entry_times_bound_is_floor(p in 0.01f64..=1.0, n in 1u32..=16, j in 0u32..=16) {
            let sba = SbaParams::new(p, 3, n);
            prop_assume!(j <= n);
            let product = entry_probability(j, &sba).unwrap() * p_stage_bound(j, &sba).unwrap();
            prop_assert!((product - p).abs() < 1e-12);
        }

        // Each window is exactly twice the next stage's window.
        #[test]
        fn window_halves_per_stage(m in 1u32..=5) {
            let sba = SbaParams::new(1.0, m, m);
            for i in 1..=m {
                let wider = backoff_window_subslots(i - 1, &sba).unwrap();
                let narrower = backoff_window_subslots(i, &sba).unwrap();
                prop_assert_eq!(narrower * 2, wider);
            }
        }
    }

    #[test]
    fn gate_is_certain_at_cap_and_at_floor_one() {
        let p = params(0.3, 3, 3);
        let mut sta = StaState::edmg(0);
        sta.prohibit_count = 3;
        let mut r = rng(1);
        assert!((0..10_000).all(|_| p_phase_gate(&sta, &p, &mut r)));

        let certain = params(1.0, 3, 3);
        let fresh = StaState::edmg(1);
        assert!((0..10_000).all(|_| p_phase_gate(&fresh, &certain, &mut r)));
    }

    #[test]
    fn gate_admit_rate_matches_floor_for_fresh_station() {
        let p = params(0.5, 3, 3);
        let sta = StaState::edmg(0);
        let mut r = rng(7);
        let n = 1_000_000u32;
        let admitted = (0..n).filter(|_| p_phase_gate(&sta, &p, &mut r)).count();
        let rate = admitted as f64 / n as f64;
        assert!((rate - 0.5).abs() < 0.002, "rate = {rate}");
    }

    #[test]
    fn legacy_slot_selection_is_uniform() {
        let layout = AbftLayout::new(8, 0, 16);
        let sta = StaState::dmg(0);
        let mut r = rng(11);
        let n = 1_000_000;
        let mut counts = [0u32; 8];
        for _ in 0..n {
            let s = select_slot(&sta, &layout, SchemeId::Legacy80211ad, &mut r).unwrap();
            counts[s as usize] += 1;
        }
        for (slot, &c) in counts.iter().enumerate() {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.125).abs() < 0.003, "slot {slot}: {freq}");
        }
    }

    #[test]
    fn separated_scheme_gives_edmg_both_regions() {
        let layout = AbftLayout::new(8, 8, 16);
        let sta = StaState::edmg(0);
        let mut r = rng(13);
        let mut seen = [false; 16];
        for _ in 0..10_000 {
            let s = select_slot(&sta, &layout, SchemeId::SaBft, &mut r).unwrap();
            assert!(s < 16);
            seen[s as usize] = true;
        }
        assert!(seen.iter().all(|&s| s), "all 16 slots reachable");
    }

    #[test]
    fn secondary_backoff_regions_are_disjoint() {
        let layout = AbftLayout::new(8, 8, 16);
        let dmg = StaState::dmg(0);
        let edmg = StaState::edmg(1);
        let mut r = rng(17);
        for _ in 0..20_000 {
            let d = select_slot(&dmg, &layout, SchemeId::SbaBft, &mut r).unwrap();
            let e = select_slot(&edmg, &layout, SchemeId::SbaBft, &mut r).unwrap();
            assert!(d < 8, "DMG stayed in region one, got {d}");
            assert!((8..16).contains(&e), "EDMG stayed in region two, got {e}");
        }
    }

    #[test]
    fn secondary_backoff_without_extension_is_a_config_error() {
        let layout = AbftLayout::new(8, 0, 16);
        let edmg = StaState::edmg(0);
        let err = select_slot(&edmg, &layout, SchemeId::SbaBft, &mut rng(1)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn window_sizes() {
        let m3 = params(1.0, 3, 3);
        assert_eq!(backoff_window_subslots(0, &m3).unwrap(), 8);
        assert_eq!(backoff_window_subslots(3, &m3).unwrap(), 1);
        let m5 = params(1.0, 5, 5);
        assert_eq!(backoff_window_subslots(2, &m5).unwrap(), 8);
        assert!(backoff_window_subslots(6, &m5).is_err());
    }

    #[test]
    fn backoff_draw_ranges() {
        let m3 = params(1.0, 3, 3);
        let mut r = rng(19);
        // Window of one subslot: the draw is always zero.
        for _ in 0..100 {
            assert_eq!(draw_backoff(3, &m3, &mut r).unwrap(), 0);
        }
        let m1 = params(1.0, 1, 1);
        for _ in 0..1000 {
            assert!(draw_backoff(0, &m1, &mut r).unwrap() < 2);
        }
    }

    #[test]
    fn backoff_draw_is_uniform_over_the_window() {
        let m3 = params(1.0, 3, 3);
        let mut r = rng(23);
        let n = 1_000_000;
        let mut counts = [0u32; 8];
        for _ in 0..n {
            counts[draw_backoff(0, &m3, &mut r).unwrap() as usize] += 1;
        }
        for (sub, &c) in counts.iter().enumerate() {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.125).abs() < 0.002, "subslot {sub}: {freq}");
        }
    }

    #[test]
    fn empty_slot_is_idle_and_single_contender_wins() {
        let p = params(1.0, 3, 3);
        let mut r = rng(29);
        assert_eq!(slot_contest(&[], &p, &mut r).unwrap(), SlotContestOutcome::Idle);
        for stage in 0..=3 {
            match slot_contest(&[stage], &p, &mut r).unwrap() {
                SlotContestOutcome::Success { winner: 0, .. } => {}
                other => panic!("lone contender must win, got {other:?}"),
            }
        }
    }

    #[test]
    fn all_contenders_at_top_stage_always_collide() {
        let p = params(1.0, 3, 3);
        let mut r = rng(31);
        for count in 2..=5 {
            let stages = vec![3u32; count];
            match slot_contest(&stages, &p, &mut r).unwrap() {
                SlotContestOutcome::Collision { contenders, subslot } => {
                    assert_eq!(contenders.len(), count);
                    assert_eq!(subslot, 0);
                }
                other => panic!("window of one must collide, got {other:?}"),
            }
        }
    }

    /// Exhaustive enumeration of all `window^c` timer assignments: a contest
    /// succeeds when the minimum drawn subslot has exactly one holder.
    fn enumerate_success_probability(c: u32, window: u32) -> f64 {
        let total = (window as u64).pow(c);
        let mut successes = 0u64;
        for code in 0..total {
            let mut draws = Vec::with_capacity(c as usize);
            let mut rest = code;
            for _ in 0..c {
                draws.push((rest % window as u64) as u32);
                rest /= window as u64;
            }
            let min = *draws.iter().min().unwrap();
            if draws.iter().filter(|&&d| d == min).count() == 1 {
                successes += 1;
            }
        }
        successes as f64 / total as f64
    }

    #[test]
    fn two_contender_success_rate_matches_enumeration() {
        // 56 of the 8^2 assignments leave a unique earliest subslot.
        assert_eq!(enumerate_success_probability(2, 8), 56.0 / 64.0);
        let p = params(1.0, 3, 3);
        let mut r = rng(37);
        let n = 1_000_000;
        let mut wins = 0u32;
        for _ in 0..n {
            if matches!(
                slot_contest(&[0, 0], &p, &mut r).unwrap(),
                SlotContestOutcome::Success { .. }
            ) {
                wins += 1;
            }
        }
        let rate = wins as f64 / n as f64;
        assert!((rate - 0.875).abs() < 0.003, "rate = {rate}");
    }

    #[test]
    fn fresh_contender_success_rates_match_enumeration_up_to_four() {
        let mut r = rng(41);
        let n = 200_000;
        for m in [1u32, 3] {
            let p = params(1.0, m, m);
            for c in 2..=4u32 {
                let expected = enumerate_success_probability(c, 1 << m);
                let stages = vec![0u32; c as usize];
                let mut wins = 0u32;
                for _ in 0..n {
                    if matches!(
                        slot_contest(&stages, &p, &mut r).unwrap(),
                        SlotContestOutcome::Success { .. }
                    ) {
                        wins += 1;
                    }
                }
                let rate = wins as f64 / n as f64;
                assert!(
                    (rate - expected).abs() < 0.005,
                    "m={m} c={c}: rate {rate} vs exact {expected}"
                );
            }
        }
    }

    #[test]
    fn mixed_stage_contest_prefers_the_shorter_window() {
        // A stage-3 contender (window 1) against a stage-0 contender
        // (window 8) wins whenever the stage-0 draw is nonzero: 7/8.
        let p = params(1.0, 3, 3);
        let mut r = rng(43);
        let n = 200_000;
        let mut veteran_wins = 0u32;
        for _ in 0..n {
            if matches!(
                slot_contest(&[3, 0], &p, &mut r).unwrap(),
                SlotContestOutcome::Success { winner: 0, .. }
            ) {
                veteran_wins += 1;
            }
        }
        let rate = veteran_wins as f64 / n as f64;
        assert!((rate - 0.875).abs() < 0.005, "rate = {rate}");
    }

    #[test]
    fn waste_table() {
        let wasted: Vec<u32> = (1..=5).map(|m| frames_wasted(m).unwrap()).collect();
        assert_eq!(wasted, vec![1, 2, 3, 5, 10]);
        assert!(frames_wasted(0).is_err());
        assert!(frames_wasted(6).is_err());
    }

    #[test]
    fn sendable_table_at_full_budget() {
        let sendable: Vec<u32> = (1..=5).map(|m| frames_sendable(m, 16).unwrap()).collect();
        assert_eq!(sendable, vec![15, 14, 13, 11, 6]);
        // Floored at zero when the window swallows the whole budget.
        assert_eq!(frames_sendable(5, 8).unwrap(), 0);
    }

    #[test]
    fn sba_params_validation() {
        assert!(SbaParams::new(0.0, 3, 3).validate().is_err());
        assert!(SbaParams::new(1.1, 3, 3).validate().is_err());
        assert!(SbaParams::new(0.5, 0, 3).validate().is_err());
        assert!(SbaParams::new(0.5, 6, 3).validate().is_err());
        assert!(SbaParams::new(0.5, 3, 0).validate().is_err());
        assert!(SbaParams::new(0.5, 5, 5).validate().is_ok());
    }
}
