//! Monte Carlo engine over beacon intervals.
//!
//! A scenario fixes a scheme, a slot layout, and a population of DMG and EDMG
//! stations; [`run_bi`] plays out one beacon interval of contention and
//! updates station state, and [`run_experiment`] replicates whole scenarios
//! across independent, deterministically seeded trials and aggregates the
//! per-trial metrics with 95% confidence intervals.
//!
//! Trials are embarrassingly parallel: trial `t` owns the ChaCha stream `t`
//! of the master seed, so results are bit-identical for a fixed seed no
//! matter how many worker threads run them.
//!
//! [`sweep_figures`] bundles the canonical benchmark scenarios (population
//! sweeps of mean successes, per-slot success probability, and SSW-frame
//! throughput for the three schemes) behind stable preset names.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contention::{
    frames_sendable, p_phase_gate, select_slot, slot_contest, SbaParams, SlotContestOutcome,
};
use crate::error::{Error, Result};
use crate::types::{AbftLayout, SchemeId, StaId, StaKind, StaState};

/// How the population evolves across beacon intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationMode {
    /// A single A-BFT phase with fresh contenders; `n_bi` must be 1.
    OneShot,
    /// Winners leave the population; losers retry until everyone trains.
    Drain,
    /// Winners rejoin as newly arrived stations, keeping the load constant.
    Saturated,
}

/// Full description of one simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scheme: SchemeId,
    pub layout: AbftLayout,
    /// Secondary-backoff parameters; required exactly when the scheme is
    /// [`SchemeId::SbaBft`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sba: Option<SbaParams>,
    pub n_dmg: u32,
    pub n_edmg: u32,
    pub population_mode: PopulationMode,
    pub n_bi: u32,
    pub trials: u64,
    pub master_seed: u64,
    /// Keep the raw per-trial samples on every sweep point (memory scales
    /// with `trials`; off by default).
    #[serde(default)]
    pub retain_samples: bool,
}

impl ScenarioConfig {
    /// Single-phase scenario with fresh contenders and default trial count.
    pub fn one_shot(scheme: SchemeId, layout: AbftLayout, n_dmg: u32, n_edmg: u32) -> Self {
        let sba = match scheme {
            SchemeId::SbaBft => Some(SbaParams::default()),
            _ => None,
        };
        ScenarioConfig {
            scheme,
            layout,
            sba,
            n_dmg,
            n_edmg,
            population_mode: PopulationMode::OneShot,
            n_bi: 1,
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            retain_samples: false,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_sba(mut self, sba: SbaParams) -> Self {
        self.sba = Some(sba);
        self
    }

    pub fn with_mode(mut self, mode: PopulationMode, n_bi: u32) -> Self {
        self.population_mode = mode;
        self.n_bi = n_bi;
        self
    }

    /// Checks cross-field consistency on top of per-type validation.
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if self.n_dmg + self.n_edmg == 0 {
            return Err(Error::Config("population is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::range_u("trials", 0, 1, u64::MAX));
        }
        if self.n_bi == 0 {
            return Err(Error::range_u("n_bi", 0, 1, u32::MAX as u64));
        }
        if self.population_mode == PopulationMode::OneShot && self.n_bi != 1 {
            return Err(Error::Config(format!(
                "one-shot mode runs a single beacon interval, got n_bi = {}",
                self.n_bi
            )));
        }
        match (self.scheme, &self.sba) {
            (SchemeId::SbaBft, None) => {
                return Err(Error::Config(
                    "the secondary-backoff scheme requires `sba` parameters".into(),
                ))
            }
            (SchemeId::SbaBft, Some(sba)) => {
                sba.validate()?;
                if self.n_edmg > 0 && self.layout.e_abft_length == 0 {
                    return Err(Error::Config(
                        "secondary-backoff scheme needs e_abft_length >= 1 for EDMG stations"
                            .into(),
                    ));
                }
            }
            (_, Some(_)) => {
                return Err(Error::Config(
                    "`sba` parameters only apply to the secondary-backoff scheme".into(),
                ))
            }
            (_, None) => {}
        }
        Ok(())
    }

    /// Fresh population for this scenario: DMG stations first, then EDMG.
    pub fn build_population(&self) -> Vec<StaState> {
        let mut population = Vec::with_capacity((self.n_dmg + self.n_edmg) as usize);
        for id in 0..self.n_dmg {
            population.push(StaState::dmg(id));
        }
        for id in self.n_dmg..self.n_dmg + self.n_edmg {
            population.push(StaState::edmg(id));
        }
        population
    }
}

/// Default replication count for experiments.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Outcome of one A-BFT slot, with station identities resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotOutcome {
    Idle,
    Success { winner: StaId, subslot: u32 },
    Collision { stations: Vec<StaId>, subslot: u32 },
}

/// Per-beacon-interval contention results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiResult {
    /// One outcome per slot of the phase.
    pub slots: Vec<SlotOutcome>,
    /// Number of slots won cleanly.
    pub successes: u32,
    /// SSW frames transmitted across all winning slots.
    pub ssw_frames_sent: u32,
    /// EDMG stations that passed the admission gate this interval.
    pub admitted_edmg: u32,
    /// EDMG stations the gate turned away this interval.
    pub prohibited_edmg: u32,
}

impl BiResult {
    /// Number of slots lost to collisions.
    pub fn collision_slots(&self) -> u32 {
        self.slots
            .iter()
            .filter(|s| matches!(s, SlotOutcome::Collision { .. }))
            .count() as u32
    }
}

fn apply_win(sta: &mut StaState, mode: PopulationMode) {
    match mode {
        PopulationMode::OneShot => {}
        PopulationMode::Drain => sta.trained = true,
        PopulationMode::Saturated => sta.reset(),
    }
}

/// Plays one beacon interval: every untrained station contends under the
/// scenario's scheme, and the population's counters advance.
///
/// Under legacy and separated schemes a slot succeeds exactly when one
/// station picked it. Under the secondary-backoff scheme EDMG stations first
/// pass the admission gate (rejects bump their prohibition count), then race
/// backoff timers inside their slot; every admitted non-winner — collided or
/// deferred by CCA — bumps both failure and prohibition counts. Winners are
/// marked trained, recycled, or merely counted per [`PopulationMode`].
pub fn run_bi<R: Rng + ?Sized>(
    population: &mut [StaState],
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<BiResult> {
    let layout = &config.layout;
    let legacy_region = layout.abft_length;
    let slot_count = match config.scheme {
        SchemeId::Legacy80211ad => layout.abft_length,
        SchemeId::SaBft | SchemeId::SbaBft => layout.total_slots(),
    } as usize;

    let mut occupants: Vec<Vec<usize>> = vec![Vec::new(); slot_count];
    let mut admitted_edmg = 0;
    let mut prohibited_edmg = 0;

    let sba = config.sba.as_ref();
    for (idx, sta) in population.iter_mut().enumerate() {
        if sta.trained {
            continue;
        }
        if config.scheme == SchemeId::SbaBft && sta.kind == StaKind::Edmg {
            let sba = sba.ok_or_else(|| {
                Error::Config("the secondary-backoff scheme requires `sba` parameters".into())
            })?;
            if !p_phase_gate(sta, sba, rng) {
                sta.prohibit_count = (sta.prohibit_count + 1).min(sba.n_max);
                prohibited_edmg += 1;
                continue;
            }
            admitted_edmg += 1;
        }
        let slot = select_slot(sta, layout, config.scheme, rng)?;
        occupants[slot as usize].push(idx);
    }

    let mut slots = Vec::with_capacity(slot_count);
    let mut successes = 0;
    let mut ssw_frames_sent = 0;
    for (slot, occ) in occupants.iter().enumerate() {
        let contested = config.scheme == SchemeId::SbaBft && slot as u32 >= legacy_region;
        let outcome = if contested {
            let sba = sba.expect("checked above");
            let stages: Vec<u32> = occ
                .iter()
                .map(|&idx| population[idx].fail_count.min(sba.m_max))
                .collect();
            match slot_contest(&stages, sba, rng)? {
                SlotContestOutcome::Idle => SlotOutcome::Idle,
                SlotContestOutcome::Success { winner, subslot } => {
                    successes += 1;
                    ssw_frames_sent += frames_sendable(sba.m_max, layout.fss)?;
                    let winner_idx = occ[winner];
                    for &idx in occ {
                        if idx == winner_idx {
                            apply_win(&mut population[idx], config.population_mode);
                        } else {
                            // Deferred by CCA: still a failed attempt.
                            population[idx].fail_count =
                                (population[idx].fail_count + 1).min(sba.m_max);
                            population[idx].prohibit_count =
                                (population[idx].prohibit_count + 1).min(sba.n_max);
                        }
                    }
                    SlotOutcome::Success {
                        winner: population[winner_idx].id,
                        subslot,
                    }
                }
                SlotContestOutcome::Collision { contenders, subslot } => {
                    for &idx in occ {
                        population[idx].fail_count =
                            (population[idx].fail_count + 1).min(sba.m_max);
                        population[idx].prohibit_count =
                            (population[idx].prohibit_count + 1).min(sba.n_max);
                    }
                    SlotOutcome::Collision {
                        stations: contenders.iter().map(|&c| population[occ[c]].id).collect(),
                        subslot,
                    }
                }
            }
        } else {
            match occ.as_slice() {
                [] => SlotOutcome::Idle,
                [lone] => {
                    successes += 1;
                    ssw_frames_sent += layout.fss;
                    apply_win(&mut population[*lone], config.population_mode);
                    SlotOutcome::Success {
                        winner: population[*lone].id,
                        subslot: 0,
                    }
                }
                _ => SlotOutcome::Collision {
                    stations: occ.iter().map(|&idx| population[idx].id).collect(),
                    subslot: 0,
                },
            }
        };
        slots.push(outcome);
    }

    Ok(BiResult {
        slots,
        successes,
        ssw_frames_sent,
        admitted_edmg,
        prohibited_edmg,
    })
}

/// One row of a sweep: a scalar metric at one x coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub metric: String,
    pub mean: f64,
    pub ci95: f64,
    pub trials: u64,
    /// Raw per-trial samples, present when the scenario retained them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

/// Aggregated results of one or more experiments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Mean of the first point carrying `metric`.
    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.metric == metric)
            .map(|p| p.mean)
    }

    /// Point for `metric` at coordinate `x`.
    pub fn at(&self, metric: &str, x: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.metric == metric && p.x == x)
    }

    /// `(x, mean, ci95)` triples of one metric, in insertion order.
    pub fn series(&self, metric: &str) -> Vec<(f64, f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.metric == metric)
            .map(|p| (p.x, p.mean, p.ci95))
            .collect()
    }

    pub fn extend(&mut self, other: SweepResult) {
        self.points.extend(other.points);
    }

    /// Stable CSV rendering: header `x,metric,mean,ci95,trials`, six decimal
    /// places on the statistics.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,metric,mean,ci95,trials\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{}\n",
                p.x, p.metric, p.mean, p.ci95, p.trials
            ));
        }
        out
    }
}

fn mean_and_ci(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

#[derive(Debug, Clone, Copy)]
struct TrialStats {
    successes: f64,
    ssw_frames: f64,
    admitted: f64,
    prohibited: f64,
}

/// Runs `config.trials` independent replications of the scenario and
/// aggregates per-BI means of every metric.
///
/// Trial `t` draws from ChaCha stream `t` of `master_seed`; the aggregation
/// is a sequential fold over the trial-ordered results, so the output is
/// bit-identical for a fixed seed regardless of thread count.
pub fn run_experiment(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    let stats: Vec<TrialStats> = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialStats> {
            let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
            rng.set_stream(trial);
            let mut population = config.build_population();
            let mut totals = TrialStats {
                successes: 0.0,
                ssw_frames: 0.0,
                admitted: 0.0,
                prohibited: 0.0,
            };
            for _ in 0..config.n_bi {
                let bi = run_bi(&mut population, config, &mut rng)?;
                totals.successes += bi.successes as f64;
                totals.ssw_frames += bi.ssw_frames_sent as f64;
                totals.admitted += bi.admitted_edmg as f64;
                totals.prohibited += bi.prohibited_edmg as f64;
            }
            let bis = config.n_bi as f64;
            Ok(TrialStats {
                successes: totals.successes / bis,
                ssw_frames: totals.ssw_frames / bis,
                admitted: totals.admitted / bis,
                prohibited: totals.prohibited / bis,
            })
        })
        .collect::<Result<_>>()?;

    let x = (config.n_dmg + config.n_edmg) as f64;
    let mut result = SweepResult::default();
    for (metric, extract) in [
        (
            "successes",
            (|s: &TrialStats| s.successes) as fn(&TrialStats) -> f64,
        ),
        ("ssw_frames", |s| s.ssw_frames),
        ("admitted_edmg", |s| s.admitted),
        ("prohibited_edmg", |s| s.prohibited),
    ] {
        let samples: Vec<f64> = stats.iter().map(extract).collect();
        let (mean, ci95) = mean_and_ci(&samples);
        result.points.push(SweepPoint {
            x,
            metric: metric.to_string(),
            mean,
            ci95,
            trials: config.trials,
            samples: config.retain_samples.then_some(samples),
        });
    }
    Ok(result)
}

/// Empirical success probability of a single slot that all `s` stations are
/// forced into.
///
/// Without secondary backoff the slot succeeds only for `s = 1`, so the
/// legacy and separated schemes return the indicator exactly. Under the
/// secondary-backoff scheme the subslot race is sampled with all stations at
/// stage zero.
pub fn single_slot_success(
    s: u32,
    m: u32,
    scheme: SchemeId,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if s == 0 {
        return Err(Error::range_u("s", 0, 1, u32::MAX as u64));
    }
    match scheme {
        SchemeId::Legacy80211ad | SchemeId::SaBft => Ok(if s == 1 { 1.0 } else { 0.0 }),
        SchemeId::SbaBft => {
            let params = SbaParams::new(1.0, m, m).validate()?;
            if trials == 0 {
                return Err(Error::range_u("trials", 0, 1, u64::MAX));
            }
            let stages = vec![0u32; s as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut wins = 0u64;
            for _ in 0..trials {
                if matches!(
                    slot_contest(&stages, &params, &mut rng)?,
                    SlotContestOutcome::Success { .. }
                ) {
                    wins += 1;
                }
            }
            Ok(wins as f64 / trials as f64)
        }
    }
}

/// Canned benchmark scenarios, each reproducing one standard sweep with the
/// dense-deployment defaults (8 legacy slots, 8 extended slots, FSS 16,
/// stage cap 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Legacy baseline: mean successful stations vs population size 1..=30.
    Fig5,
    /// Separated scheme vs legacy for 2, 4, and 8 extra slots.
    Fig8,
    /// Single-slot success probability vs forced occupancy, stage caps 1 and 3.
    Fig15,
    /// Mean successful stations for all three schemes vs population size.
    Fig16,
    /// SSW frames transmitted per phase, legacy vs secondary backoff.
    Fig17,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig5,
        Preset::Fig8,
        Preset::Fig15,
        Preset::Fig16,
        Preset::Fig17,
    ];
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Preset::Fig5 => "fig5",
            Preset::Fig8 => "fig8",
            Preset::Fig15 => "fig15",
            Preset::Fig16 => "fig16",
            Preset::Fig17 => "fig17",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig5" => Ok(Preset::Fig5),
            "fig8" => Ok(Preset::Fig8),
            "fig15" => Ok(Preset::Fig15),
            "fig16" => Ok(Preset::Fig16),
            "fig17" => Ok(Preset::Fig17),
            other => Err(Error::Config(format!(
                "unknown preset `{other}`; expected one of fig5, fig8, fig15, fig16, fig17"
            ))),
        }
    }
}

/// Splits a preset seed into independent per-series/per-point master seeds.
fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn labeled(mut result: SweepResult, metric: &str, label: &str) -> SweepResult {
    let prefix = format!("{metric}/");
    for p in &mut result.points {
        if p.metric == metric {
            p.metric = format!("{metric}/{label}");
        }
    }
    result.points.retain(|p| p.metric.starts_with(&prefix));
    result
}

#[allow(clippy::too_many_arguments)]
fn population_series(
    scheme: SchemeId,
    layout: AbftLayout,
    sba: Option<SbaParams>,
    metric: &str,
    label: &str,
    all_edmg: bool,
    trials: u64,
    seed: u64,
    salt: u64,
) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    for n in 1..=30u32 {
        let (n_dmg, n_edmg) = if all_edmg { (0, n) } else { (n, 0) };
        let mut config = ScenarioConfig::one_shot(scheme, layout, n_dmg, n_edmg)
            .with_trials(trials)
            .with_seed(derive_seed(seed, salt * 64 + n as u64));
        config.sba = sba;
        out.extend(labeled(run_experiment(&config)?, metric, label));
    }
    Ok(out)
}

/// Runs the canonical scenario for a preset. `trials` defaults to
/// [`DEFAULT_TRIALS`]; every sub-experiment reseeds deterministically from
/// `seed`.
pub fn sweep_figures(preset: Preset, trials: Option<u64>, seed: u64) -> Result<SweepResult> {
    let trials = trials.unwrap_or(DEFAULT_TRIALS);
    let legacy_layout = AbftLayout::new(8, 0, 16);
    let extended = AbftLayout::new(8, 8, 16);
    let sba = SbaParams::new(1.0, 3, 3);
    let mut out = SweepResult::default();
    match preset {
        Preset::Fig5 => {
            out.extend(population_series(
                SchemeId::Legacy80211ad,
                legacy_layout,
                None,
                "successes",
                "legacy",
                false,
                trials,
                seed,
                0,
            )?);
        }
        Preset::Fig8 => {
            out.extend(population_series(
                SchemeId::Legacy80211ad,
                legacy_layout,
                None,
                "successes",
                "legacy",
                true,
                trials,
                seed,
                0,
            )?);
            for (salt, extra) in [(1u64, 2u32), (2, 4), (3, 8)] {
                out.extend(population_series(
                    SchemeId::SaBft,
                    AbftLayout::new(8, extra, 16),
                    None,
                    "successes",
                    &format!("sa_bft_e{extra}"),
                    true,
                    trials,
                    seed,
                    salt,
                )?);
            }
        }
        Preset::Fig15 => {
            for s in 1..=10u32 {
                let x = s as f64;
                let legacy = single_slot_success(s, 3, SchemeId::Legacy80211ad, trials, 0)?;
                out.points.push(SweepPoint {
                    x,
                    metric: "p_success/legacy".into(),
                    mean: legacy,
                    ci95: 0.0,
                    trials,
                    samples: None,
                });
                for (salt, m) in [(1u64, 1u32), (3, 3)] {
                    let rate = single_slot_success(
                        s,
                        m,
                        SchemeId::SbaBft,
                        trials,
                        derive_seed(seed, salt * 64 + s as u64),
                    )?;
                    out.points.push(SweepPoint {
                        x,
                        metric: format!("p_success/sba_m{m}"),
                        mean: rate,
                        ci95: 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt(),
                        trials,
                        samples: None,
                    });
                }
            }
        }
        Preset::Fig16 | Preset::Fig17 => {
            let metric = if preset == Preset::Fig16 {
                "successes"
            } else {
                "ssw_frames"
            };
            out.extend(population_series(
                SchemeId::Legacy80211ad,
                legacy_layout,
                None,
                metric,
                "legacy",
                true,
                trials,
                seed,
                0,
            )?);
            if preset == Preset::Fig16 {
                out.extend(population_series(
                    SchemeId::SaBft,
                    extended,
                    None,
                    metric,
                    "sa_bft",
                    true,
                    trials,
                    seed,
                    1,
                )?);
            }
            out.extend(population_series(
                SchemeId::SbaBft,
                extended,
                Some(sba),
                metric,
                "sba_bft",
                true,
                trials,
                seed,
                2,
            )?);
        }
    }
    Ok(out)
}
