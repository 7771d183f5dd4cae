//! Domain types, timing constants, and layout validation shared by all
//! other modules.
//!
//! An A-BFT phase is a slotted random-access window that follows the beacon
//! sweep: stations pick a slot and use it to transmit up to `fss` sector-sweep
//! (SSW) frames. [`AbftLayout`] captures the slot-region geometry of one such
//! phase — the legacy slot count, the extended slot count advertised to
//! 802.11ay stations, and the per-slot frame budget — together with the
//! [`TimingParams`] that fix frame airtime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MAC timing constants, in microseconds.
///
/// Defaults are the 802.11ad control-PHY values: 5 µs slot granularity,
/// 15 µs per SSW frame, 1 µs short beamforming interframe spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingParams {
    /// Backoff slot granularity (`aSlotTime`).
    pub a_slot_time_us: u64,
    /// Airtime of one SSW frame.
    pub txtime_ssw_us: u64,
    /// Gap between consecutive SSW frames.
    pub sbifs_us: u64,
}

impl Default for TimingParams {
    fn default() -> Self {
        TimingParams {
            a_slot_time_us: 5,
            txtime_ssw_us: 15,
            sbifs_us: 1,
        }
    }
}

impl TimingParams {
    /// Checks that every duration is strictly positive.
    pub fn validate(self) -> Result<Self> {
        if self.a_slot_time_us == 0 {
            return Err(Error::range_u("a_slot_time_us", 0, 1, u64::MAX));
        }
        if self.txtime_ssw_us == 0 {
            return Err(Error::range_u("txtime_ssw_us", 0, 1, u64::MAX));
        }
        if self.sbifs_us == 0 {
            return Err(Error::range_u("sbifs_us", 0, 1, u64::MAX));
        }
        Ok(self)
    }
}

/// Slot-region geometry and timing of one A-BFT phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbftLayout {
    /// Legacy slot count advertised in the 3-bit `A-BFT Length` field (1..=8).
    pub abft_length: u32,
    /// Extended slot count advertised to 802.11ay stations (0..=8).
    pub e_abft_length: u32,
    /// SSW-frame opportunities per slot, 4-bit `FSS` field (1..=16).
    pub fss: u32,
    /// MAC timing constants.
    #[serde(default)]
    pub timing: TimingParams,
}

impl AbftLayout {
    /// A layout with the given slot counts and frame budget, default timing.
    pub fn new(abft_length: u32, e_abft_length: u32, fss: u32) -> Self {
        AbftLayout {
            abft_length,
            e_abft_length,
            fss,
            timing: TimingParams::default(),
        }
    }

    /// Validates every field against its wire-format bound and returns the
    /// layout unchanged if all hold.
    ///
    /// Bounds: `abft_length` in 1..=8 (3-bit field), `e_abft_length` in 0..=8,
    /// `fss` in 1..=16 (4-bit field), all timing durations positive.
    pub fn validate(self) -> Result<Self> {
        if !(1..=8).contains(&self.abft_length) {
            return Err(Error::range_u("abft_length", self.abft_length as u64, 1, 8));
        }
        if self.e_abft_length > 8 {
            return Err(Error::range_u(
                "e_abft_length",
                self.e_abft_length as u64,
                0,
                8,
            ));
        }
        if !(1..=16).contains(&self.fss) {
            return Err(Error::range_u("fss", self.fss as u64, 1, 16));
        }
        self.timing.validate()?;
        Ok(self)
    }

    /// Duration of one A-BFT slot: `fss · (TXTIME(SSW) + SBIFS)` microseconds.
    pub fn slot_duration_us(&self) -> u64 {
        self.fss as u64 * (self.timing.txtime_ssw_us + self.timing.sbifs_us)
    }

    /// Total number of slots in the phase, both regions.
    pub fn total_slots(&self) -> u32 {
        self.abft_length + self.e_abft_length
    }
}

/// Station generation: legacy 802.11ad or enhanced 802.11ay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaKind {
    /// Directional multi-gigabit station (802.11ad).
    Dmg,
    /// Enhanced DMG station (802.11ay).
    Edmg,
}

/// Contention scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    /// Baseline 802.11ad A-BFT: every station contends for the legacy region.
    Legacy80211ad,
    /// Separated A-BFT: EDMG stations also see the extended region.
    SaBft,
    /// Secondary-backoff A-BFT: EDMG stations pass an admission gate, contend
    /// only for the extended region, and race subslot backoff timers there.
    SbaBft,
}

/// Opaque station identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StaId(pub u32);

impl std::fmt::Display for StaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "sta{}", self.0)
    }
}

/// One station's contention state across beacon intervals.
///
/// `fail_count` is the secondary-backoff stage `i` (capped at the scheme's
/// `m`); `prohibit_count` is the number of admission-gate rejections `j`
/// (capped at `n`). DMG stations never accrue either: the gate and the
/// secondary backoff apply to EDMG stations only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaState {
    pub id: StaId,
    pub kind: StaKind,
    /// Backoff stage `i`: consecutive failed contention attempts.
    pub fail_count: u32,
    /// Prohibition count `j`: consecutive admission-gate rejections.
    pub prohibit_count: u32,
    /// Whether beam training has completed for this station.
    pub trained: bool,
}

impl StaState {
    pub fn new(id: StaId, kind: StaKind) -> Self {
        StaState {
            id,
            kind,
            fail_count: 0,
            prohibit_count: 0,
            trained: false,
        }
    }

    /// Fresh legacy station.
    pub fn dmg(id: u32) -> Self {
        Self::new(StaId(id), StaKind::Dmg)
    }

    /// Fresh 802.11ay station.
    pub fn edmg(id: u32) -> Self {
        Self::new(StaId(id), StaKind::Edmg)
    }

    /// Resets contention state as if the station had just joined.
    pub fn reset(&mut self) {
        self.fail_count = 0;
        self.prohibit_count = 0;
        self.trained = false;
    }
}
