//! Naming Game simulation with belief-driven active topic choice.
//!
//! Agents negotiate a shared lexicon through pairwise speaker/hearer
//! exchanges under the Minimal Naming Game update rule. Speakers either pick
//! topics at random or use the LAPS-max strategy: each agent estimates the
//! population lexicon from a short sliding window of past interactions,
//! measures how well its own lexicon agrees with that estimate (LAPS), only
//! introduces a new meaning once that agreement is saturated, and otherwise
//! lets a decayed-weight bandit choose which known meaning to talk about.
//!
//! Module map:
//! - [`lexicon`]: vocabularies and the Minimal Naming Game update.
//! - [`belief`]: sliding-window memories and LAPS.
//! - [`strategy`]: random and LAPS-max topic choice.
//! - [`engine`]: populations, interactions and single trials.
//! - [`metrics`]: communicative success, complexity, convergence.
//! - [`config`], [`experiment`], [`output`], [`seeding`]: experiment harness.

pub mod belief;
pub mod config;
pub mod engine;
pub mod experiment;
pub mod lexicon;
pub mod metrics;
pub mod output;
pub mod seeding;
pub mod strategy;

pub use belief::{laps, ApproxPopulationVocabulary, SlidingWindowMemory};
pub use config::{ConfigError, ConfigOverrides, SimulationConfig};
pub use engine::{run_simulation, Agent, InteractionRecord, Population, SimulationOutcome};
pub use experiment::{
    run_experiment, run_sweep, ExperimentError, ExperimentResult, SweepResult, SweepRow,
    TrialSummary,
};
pub use lexicon::{MeaningId, Vocabulary, WordId};
pub use metrics::{MeasurementRow, TcsMethod};
pub use strategy::{BanditState, Mode, PolicyKind, TopicChoicePolicy};
