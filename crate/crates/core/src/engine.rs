//! The population and the speaker's-choice interaction loop.
//!
//! One interaction, in order:
//!
//! 1. draw an ordered pair of distinct agents (speaker, hearer);
//! 2. the speaker picks a topic with its policy;
//! 3. the speaker codes the topic, inventing a word if it has none;
//! 4. the hearer interprets the word (or fails to, if it does not know it);
//! 5. success iff the interpretation is the topic;
//! 6. Minimal Naming Game update of both vocabularies;
//! 7. both agents record what they observed of the *other* agent;
//! 8. a LAPS-max speaker rewards its bandit with the clipped LAPS gain.
//!
//! A LAPS-max hearer that meets a meaning for the first time also opens a
//! bandit arm for it, weighted by its own clipped LAPS gain, so that every
//! known meaning can later be chosen as a topic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{laps, SlidingWindowMemory};
use crate::config::{ConfigError, SimulationConfig};
use crate::lexicon::{MeaningId, Vocabulary, WordId};
use crate::metrics::{
    complexity_stats, is_converged, sample_distinct_pair, tcs_montecarlo, tcs_population_exact,
    MeasurementRow, TcsMethod,
};
use crate::seeding::{stream_rng, Stream};
use crate::strategy::{
    choose_topic_lapsmax, choose_topic_random, compute_reward, BanditState, Mode, PolicyKind,
    TopicChoicePolicy,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub voc: Vocabulary,
    pub mem: SlidingWindowMemory,
    pub policy: TopicChoicePolicy,
}

impl Agent {
    pub fn new(
        id: usize,
        n_meanings: usize,
        n_words: usize,
        tau: usize,
        policy: TopicChoicePolicy,
    ) -> Self {
        Self {
            id,
            voc: Vocabulary::new(n_meanings, n_words),
            mem: SlidingWindowMemory::new(tau, n_meanings, n_words),
            policy,
        }
    }

    pub fn laps(&self) -> f64 {
        laps(&self.voc, &self.mem)
    }
}

impl AsRef<Vocabulary> for Agent {
    fn as_ref(&self) -> &Vocabulary {
        &self.voc
    }
}

/// Everything that happened in one exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub t: u64,
    pub speaker: usize,
    pub hearer: usize,
    pub topic: MeaningId,
    pub word: WordId,
    pub interpretation: Option<MeaningId>,
    pub success: bool,
    pub invented: bool,
    pub mode: Mode,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<Agent>,
    rng: ChaCha8Rng,
    counter: u64,
}

fn two_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

impl Population {
    /// Fresh agents with empty vocabularies and memories, all using the
    /// configured policy.
    pub fn new(config: &SimulationConfig, rng: ChaCha8Rng) -> Self {
        let agents = (0..config.n_agents)
            .map(|id| {
                let policy = match config.policy {
                    PolicyKind::Random => TopicChoicePolicy::Random,
                    PolicyKind::LapsMax => TopicChoicePolicy::LapsMax(BanditState::new(
                        config.gamma,
                        config.effective_bandit_n(),
                    )),
                };
                Agent::new(id, config.n_meanings, config.n_words, config.tau, policy)
            })
            .collect();
        Self::from_agents(agents, rng)
    }

    /// # Panics
    /// With fewer than two agents.
    pub fn from_agents(agents: Vec<Agent>, rng: ChaCha8Rng) -> Self {
        assert!(agents.len() >= 2, "a population needs at least two agents");
        Self {
            agents,
            rng,
            counter: 0,
        }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Number of interactions run so far.
    pub fn interactions(&self) -> u64 {
        self.counter
    }

    pub fn n_meanings(&self) -> usize {
        self.agents[0].voc.n_meanings()
    }

    /// One interaction between a uniformly drawn ordered pair.
    pub fn run_interaction(&mut self) -> InteractionRecord {
        let (s, h) = sample_distinct_pair(self.agents.len(), &mut self.rng);
        self.interact(s, h, None)
    }

    /// One interaction between the given agents. With `topic` set, the
    /// speaker's policy is bypassed for the choice (its bandit still learns).
    pub fn interact(
        &mut self,
        speaker: usize,
        hearer: usize,
        topic: Option<MeaningId>,
    ) -> InteractionRecord {
        let rng = &mut self.rng;
        let (sp, he) = two_mut(&mut self.agents, speaker, hearer);

        let laps_before = match sp.policy {
            TopicChoicePolicy::LapsMax(_) => sp.laps(),
            TopicChoicePolicy::Random => 0.0,
        };
        let (topic, mode) = match (topic, &sp.policy) {
            (Some(t), TopicChoicePolicy::Random) => (t, Mode::Random),
            (Some(t), TopicChoicePolicy::LapsMax(_)) => {
                let mode = if sp.voc.is_known(t) {
                    Mode::Exploit
                } else {
                    Mode::Explore
                };
                (t, mode)
            }
            (None, TopicChoicePolicy::Random) => {
                (choose_topic_random(sp.voc.n_meanings(), rng), Mode::Random)
            }
            (None, TopicChoicePolicy::LapsMax(bandit)) => {
                choose_topic_lapsmax(bandit, &sp.voc, laps_before, rng)
            }
        };

        let (word, invented) = match sp.voc.code(topic, rng) {
            Some(w) => (w, false),
            None => {
                let w = sp.voc.invent(topic, rng);
                sp.voc.add_association(topic, w);
                (w, true)
            }
        };

        // A meaning first met as hearer becomes an arm of the hearer's bandit.
        let hearer_new_topic = !he.voc.is_known(topic);
        let hearer_laps_before = match he.policy {
            TopicChoicePolicy::LapsMax(_) if hearer_new_topic => he.laps(),
            _ => 0.0,
        };
        let interpretation = he.voc.decode(word, rng);
        let success = interpretation == Some(topic);

        if success {
            sp.voc.update_success(topic, word);
            he.voc.update_success(topic, word);
        } else {
            he.voc.add_association(topic, word);
        }

        // The hearer learns the speaker's coding and intended decoding once
        // the topic is revealed. The speaker learns the hearer's decoding, and
        // the coding the hearer holds afterwards, which is (topic, word)
        // whatever the outcome.
        he.mem.record_coding_observation(topic, word);
        he.mem.record_decoding_observation(word, topic);
        sp.mem.record_coding_observation(topic, word);
        if let Some(guess) = interpretation {
            sp.mem.record_decoding_observation(word, guess);
        }

        if hearer_new_topic {
            if let TopicChoicePolicy::LapsMax(bandit) = &mut he.policy {
                let r = compute_reward(hearer_laps_before, laps(&he.voc, &he.mem));
                bandit.update(topic, r);
            }
        }

        let reward = match &mut sp.policy {
            TopicChoicePolicy::LapsMax(bandit) => {
                let r = compute_reward(laps_before, laps(&sp.voc, &sp.mem));
                bandit.update(topic, r);
                r
            }
            TopicChoicePolicy::Random => 0.0,
        };

        let record = InteractionRecord {
            t: self.counter,
            speaker,
            hearer,
            topic,
            word,
            interpretation,
            success,
            invented,
            mode,
            reward,
        };
        self.counter += 1;
        record
    }

    pub fn is_converged(&self) -> bool {
        is_converged(&self.agents)
    }

    /// Snapshot of the global observables. Does not touch the dynamics RNG.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        trial: u32,
        mc_samples: usize,
        rng: &mut R,
    ) -> MeasurementRow {
        let (tcs, tcs_method) = if mc_samples == 0 {
            (tcs_population_exact(&self.agents), TcsMethod::Exact)
        } else {
            (
                tcs_montecarlo(&self.agents, mc_samples, rng),
                TcsMethod::MonteCarlo,
            )
        };
        let stats = complexity_stats(&self.agents);
        MeasurementRow {
            trial,
            t: self.counter,
            tcs,
            tcs_method,
            complexity_mean: stats.mean,
            complexity_max: stats.max as f64,
            complexity_min: stats.min as f64,
            converged: self.is_converged(),
            padded: false,
        }
    }
}

/// Result of one trial.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub trial: u32,
    pub rows: Vec<MeasurementRow>,
    /// First measurement tick at which the population had converged.
    pub convergence_time: Option<u64>,
    pub population: Population,
}

/// Runs trial `trial` of `config`. Deterministic in `(config, trial)`.
pub fn run_simulation(
    config: &SimulationConfig,
    trial: u32,
) -> Result<SimulationOutcome, ConfigError> {
    run_simulation_with(config, trial, |_| {})
}

/// Like [`run_simulation`], handing every interaction record to `observe`.
pub fn run_simulation_with(
    config: &SimulationConfig,
    trial: u32,
    mut observe: impl FnMut(&InteractionRecord),
) -> Result<SimulationOutcome, ConfigError> {
    config.validate()?;
    let mut pop = Population::new(config, stream_rng(config.seed, trial, Stream::Dynamics));
    let mut probe_rng = stream_rng(config.seed, trial, Stream::Measurement);
    let ticks = config.ticks();
    let mut rows = Vec::with_capacity(ticks as usize);
    let mut convergence_time = None;

    let mut tick = 0;
    while tick < ticks {
        for _ in 0..config.measure_every {
            let record = pop.run_interaction();
            observe(&record);
        }
        tick += 1;
        let row = pop.measure(trial, config.mc_samples, &mut probe_rng);
        if row.converged && convergence_time.is_none() {
            convergence_time = Some(row.t);
        }
        let stop = row.converged && config.stop_on_convergence;
        rows.push(row);
        if stop {
            break;
        }
    }
    // leftover interactions past the last full tick
    if convergence_time.is_none() || !config.stop_on_convergence {
        while pop.interactions() < config.max_interactions {
            let record = pop.run_interaction();
            observe(&record);
        }
    }

    if let Some(last) = rows.last().cloned() {
        let method = last.tcs_method;
        let m = config.n_meanings as f64;
        for k in rows.len() as u64..ticks {
            rows.push(MeasurementRow {
                trial,
                t: (k + 1) * config.measure_every,
                tcs: 1.0,
                tcs_method: method,
                complexity_mean: m,
                complexity_max: m,
                complexity_min: m,
                converged: true,
                padded: true,
            });
        }
    }

    Ok(SimulationOutcome {
        trial,
        rows,
        convergence_time,
        population: pop,
    })
}
