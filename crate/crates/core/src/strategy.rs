//! Topic-choice policies.
//!
//! [`TopicChoicePolicy::Random`] picks any meaning uniformly. The LAPS-max
//! policy works in two levels: it invents a word for a new meaning only once
//! LAPS has saturated at `K/M`, and otherwise plays a bandit over the
//! meanings it has already spoken about, rewarded by the clipped increase in
//! LAPS the interaction produced.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{MeaningId, Vocabulary};

/// Tolerance for the floating-point saturation test `LAPS == K/M`.
///
/// Any unsaturated LAPS value sits at least `1/(2·M·τ·W)` below `K/M`, which
/// is orders of magnitude larger than this.
pub const GATE_TOLERANCE: f64 = 1e-9;

/// How the speaker arrived at its topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Explore,
    Exploit,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bandit has no arms")]
pub struct NoArms;

/// Decayed-weight bandit over the meanings an agent has used as topic.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditState {
    arms: BTreeMap<MeaningId, f64>,
    gamma: f64,
    decay_n: f64,
}

impl BanditState {
    /// # Panics
    /// If `gamma` is outside `(0, 1]` or `decay_n` is not positive.
    pub fn new(gamma: f64, decay_n: f64) -> Self {
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
        assert!(decay_n > 0.0, "decay time scale must be positive");
        Self {
            arms: BTreeMap::new(),
            gamma,
            decay_n,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn decay_n(&self) -> f64 {
        self.decay_n
    }

    pub fn arms(&self) -> &BTreeMap<MeaningId, f64> {
        &self.arms
    }

    pub fn weight(&self, m: MeaningId) -> Option<f64> {
        self.arms.get(&m).copied()
    }

    /// Mixture of normalized weights and a uniform floor:
    /// `p_a = (1 − γ)·w_a/Σw + γ/K` with `K` the number of arms.
    ///
    /// All-zero weights are treated as uniform.
    pub fn probabilities(&self) -> Result<Vec<(MeaningId, f64)>, NoArms> {
        if self.arms.is_empty() {
            return Err(NoArms);
        }
        let k = self.arms.len() as f64;
        let total: f64 = self.arms.values().sum();
        let mut probs: Vec<(MeaningId, f64)> = self
            .arms
            .iter()
            .map(|(&m, &wa)| {
                let normalized = if total > 0.0 { wa / total } else { 1.0 / k };
                (m, (1.0 - self.gamma) * normalized + self.gamma / k)
            })
            .collect();
        let sum: f64 = probs.iter().map(|p| p.1).sum();
        for p in &mut probs {
            p.1 /= sum;
        }
        Ok(probs)
    }

    /// Samples an arm from [`BanditState::probabilities`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MeaningId, NoArms> {
        let probs = self.probabilities()?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(m, p) in &probs {
            acc += p;
            if u < acc {
                return Ok(m);
            }
        }
        Ok(probs.last().expect("nonempty").0)
    }

    /// `w_m ← n/(n+1)·w_m + r` for a known arm; a new arm starts at `r`.
    pub fn update(&mut self, m: MeaningId, reward: f64) {
        debug_assert!(reward >= 0.0, "rewards are clipped at zero");
        let factor = self.decay_n / (self.decay_n + 1.0);
        self.arms
            .entry(m)
            .and_modify(|wa| *wa = factor * *wa + reward)
            .or_insert(reward);
    }
}

/// Clipped LAPS increase.
pub fn compute_reward(laps_before: f64, laps_after: f64) -> f64 {
    (laps_after - laps_before).max(0.0)
}

/// True when LAPS has reached its ceiling `K/M` and some meaning is still
/// unknown.
pub fn exploration_gate(laps_value: f64, known: usize, n_meanings: usize) -> bool {
    known < n_meanings && (laps_value - known as f64 / n_meanings as f64).abs() <= GATE_TOLERANCE
}

/// Uniform over all meanings, regardless of the vocabulary.
pub fn choose_topic_random<R: Rng + ?Sized>(n_meanings: usize, rng: &mut R) -> MeaningId {
    MeaningId(rng.gen_range(0..n_meanings) as u32)
}

fn uniform_from<R: Rng + ?Sized>(items: &[MeaningId], rng: &mut R) -> MeaningId {
    items[rng.gen_range(0..items.len())]
}

/// LAPS-max topic choice for a speaker whose current LAPS is `laps_value`.
///
/// Explores an unknown meaning when the gate fires. Otherwise samples an arm;
/// an agent that knows meanings only from hearing them (no arms yet) picks
/// uniformly among its known meanings.
pub fn choose_topic_lapsmax<R: Rng + ?Sized>(
    state: &BanditState,
    voc: &Vocabulary,
    laps_value: f64,
    rng: &mut R,
) -> (MeaningId, Mode) {
    let n_meanings = voc.n_meanings();
    let known = voc.known_count();
    if exploration_gate(laps_value, known, n_meanings) {
        let unknown: Vec<MeaningId> = voc.unknown_meanings().collect();
        return (uniform_from(&unknown, rng), Mode::Explore);
    }
    match state.sample(rng) {
        Ok(m) => (m, Mode::Exploit),
        Err(NoArms) => {
            let known: Vec<MeaningId> = voc.known_meanings().collect();
            if known.is_empty() {
                (choose_topic_random(n_meanings, rng), Mode::Explore)
            } else {
                (uniform_from(&known, rng), Mode::Exploit)
            }
        }
    }
}

/// Which policy to build for each agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Random,
    LapsMax,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Random => "random",
            PolicyKind::LapsMax => "lapsmax",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy {0:?} (expected `random` or `lapsmax`)")]
pub struct UnknownPolicy(pub String);

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "lapsmax" => Ok(PolicyKind::LapsMax),
            other => Err(UnknownPolicy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopicChoicePolicy {
    Random,
    LapsMax(BanditState),
}
