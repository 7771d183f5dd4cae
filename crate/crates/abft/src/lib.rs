//! Simulator and analytical toolkit for the A-BFT random-access beam-training
//! phase of mmWave WLANs (802.11ad / 802.11ay).
//!
//! During A-BFT, stations contend for a handful of slots to sweep their
//! transmit sectors toward the access point; with many stations the slotted
//! random access collapses under collisions. This crate implements and
//! cross-validates three contention schemes:
//!
//! * **Legacy 802.11ad** — every station picks one of up to 8 slots; a slot
//!   shared by two or more stations is lost.
//! * **SA-BFT** (separated A-BFT) — the beacon advertises up to 8 extra slots
//!   through a new `E-A-BFT Length` field; 802.11ay (EDMG) stations spread
//!   over the wider region while legacy stations keep theirs, so both
//!   generations coexist.
//! * **SBA-BFT** (secondary-backoff A-BFT) — EDMG stations additionally pass
//!   a probabilistic admission gate and race a secondary backoff timer over
//!   subslots inside their chosen slot; carrier sensing turns most would-be
//!   collisions into clean wins for the earliest timer.
//!
//! Alongside the Monte Carlo engine ([`sim`]) there is an analytical
//! three-dimensional Markov-chain model of the secondary-backoff scheme
//! ([`markov`]), a parameter planner that picks the backoff-stage cap
//! maximizing per-slot throughput ([`planner`]), and a bit-exact codec for
//! the extended beacon fields that signal all of this on the air ([`codec`]).
//!
//! # Quick start
//!
//! ```
//! use abft::sim::{run_experiment, ScenarioConfig};
//! use abft::types::{AbftLayout, SchemeId};
//!
//! // 16 fresh stations contending once for 8 legacy slots.
//! let config = ScenarioConfig::one_shot(SchemeId::Legacy80211ad, AbftLayout::new(8, 0, 16), 0, 16)
//!     .with_trials(2_000)
//!     .with_seed(7);
//! let result = run_experiment(&config).unwrap();
//! let successes = result.mean("successes").unwrap();
//! assert!(successes > 1.0 && successes < 4.0);
//! ```
//!
//! Runnable demonstrations of every capability live under `examples/`; the
//! `abft` binary exposes the same functionality as a small command line.

pub mod cli;
pub mod codec;
pub mod contention;
pub mod error;
pub mod markov;
pub mod planner;
pub mod sim;
pub mod types;

pub use error::{Error, Result};
