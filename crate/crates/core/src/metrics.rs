//! Global observables: Theoretical Communicative Success (TCS), complexity
//! statistics and convergence detection.
//!
//! The TCS kernel is written against two small traits so the same code
//! evaluates an agent against another agent, the population average, or the
//! agent's own windowed estimate of the population.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lexicon::{MeaningId, Vocabulary, WordId};

/// Anything that can code a meaning into a distribution over words.
pub trait CodingSource {
    fn n_meanings(&self) -> usize;

    /// Calls `f(w, p)` for every word with nonzero coding probability for `m`.
    fn visit_coding_row(&self, m: MeaningId, f: &mut dyn FnMut(WordId, f64));
}

/// Anything that can decode a word into a distribution over meanings.
pub trait DecodingSource {
    fn decoding_prob(&self, m: MeaningId, w: WordId) -> f64;
}

impl CodingSource for Vocabulary {
    fn n_meanings(&self) -> usize {
        Vocabulary::n_meanings(self)
    }

    fn visit_coding_row(&self, m: MeaningId, f: &mut dyn FnMut(WordId, f64)) {
        let row = self.row(m);
        let p = 1.0 / row.len() as f64;
        for &w in row {
            f(w, p);
        }
    }
}

impl DecodingSource for Vocabulary {
    fn decoding_prob(&self, m: MeaningId, w: WordId) -> f64 {
        self.decoding_value(m, w)
    }
}

/// Success probability with `coder` speaking and `decoder` listening,
/// averaged over all meanings:
/// `(1/M) Σ_m Σ_w coder^c_{mw} · decoder^d_{mw}`.
///
/// Only nonzero coding entries are visited.
pub fn tcs_directed<C, D>(coder: &C, decoder: &D) -> f64
where
    C: CodingSource + ?Sized,
    D: DecodingSource + ?Sized,
{
    let n_meanings = coder.n_meanings();
    if n_meanings == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n_meanings {
        let m = MeaningId(i as u32);
        let mut row_sum = 0.0;
        coder.visit_coding_row(m, &mut |w, p| row_sum += p * decoder.decoding_prob(m, w));
        total += row_sum;
    }
    total / n_meanings as f64
}

/// Role-symmetrized TCS: the mean of both speaker/hearer assignments.
pub fn tcs_pair<A, B>(a: &A, b: &B) -> f64
where
    A: CodingSource + DecodingSource + ?Sized,
    B: CodingSource + DecodingSource + ?Sized,
{
    0.5 * (tcs_directed(a, b) + tcs_directed(b, a))
}

/// Element-wise mean of the agents' normalized coding and decoding matrices,
/// stored densely in row-major `M × W` order.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationAverage {
    n_meanings: usize,
    n_words: usize,
    coding: Vec<f64>,
    decoding: Vec<f64>,
}

impl PopulationAverage {
    pub fn coding(&self, m: MeaningId, w: WordId) -> f64 {
        self.coding[m.index() * self.n_words + w.index()]
    }

    pub fn decoding(&self, m: MeaningId, w: WordId) -> f64 {
        self.decoding[m.index() * self.n_words + w.index()]
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }
}

impl CodingSource for PopulationAverage {
    fn n_meanings(&self) -> usize {
        self.n_meanings
    }

    fn visit_coding_row(&self, m: MeaningId, f: &mut dyn FnMut(WordId, f64)) {
        let start = m.index() * self.n_words;
        for (j, &p) in self.coding[start..start + self.n_words].iter().enumerate() {
            if p != 0.0 {
                f(WordId(j as u32), p);
            }
        }
    }
}

impl DecodingSource for PopulationAverage {
    fn decoding_prob(&self, m: MeaningId, w: WordId) -> f64 {
        self.decoding(m, w)
    }
}

/// Averages `V^c` and `V^d` over the population.
///
/// # Panics
/// If `vocs` is empty.
pub fn population_average_vocabulary<V: AsRef<Vocabulary>>(vocs: &[V]) -> PopulationAverage {
    let first = vocs.first().expect("population must not be empty").as_ref();
    let (n_meanings, n_words) = (first.n_meanings(), first.n_words());
    let mut coding = vec![0.0; n_meanings * n_words];
    let mut decoding = vec![0.0; n_meanings * n_words];
    let scale = 1.0 / vocs.len() as f64;
    for voc in vocs {
        let voc = voc.as_ref();
        for (m, w) in voc.pairs() {
            let idx = m.index() * n_words + w.index();
            coding[idx] += scale / voc.row(m).len() as f64;
            decoding[idx] += scale / voc.column(w).len() as f64;
        }
    }
    PopulationAverage {
        n_meanings,
        n_words,
        coding,
        decoding,
    }
}

/// Exact population TCS: the averaged vocabulary against itself.
///
/// This includes self-pairings, so it differs from the distinct-pair Monte
/// Carlo estimate by at most `O(1/N)`.
pub fn tcs_population_exact<V: AsRef<Vocabulary>>(vocs: &[V]) -> f64 {
    let avg = population_average_vocabulary(vocs);
    tcs_directed(&avg, &avg)
}

/// Monte Carlo TCS: the success rate of `samples` probe interactions between
/// distinct random agents on uniformly random topics. A speaker without a
/// word for the topic counts as a failure. Nothing is mutated.
///
/// # Panics
/// If fewer than two agents are given or `samples == 0`.
pub fn tcs_montecarlo<V, R>(vocs: &[V], samples: usize, rng: &mut R) -> f64
where
    V: AsRef<Vocabulary>,
    R: Rng + ?Sized,
{
    assert!(vocs.len() >= 2, "Monte Carlo TCS needs at least two agents");
    assert!(samples >= 1, "Monte Carlo TCS needs at least one sample");
    let n = vocs.len();
    let n_meanings = vocs[0].as_ref().n_meanings();
    let mut successes = 0usize;
    for _ in 0..samples {
        let (s, h) = sample_distinct_pair(n, rng);
        let topic = MeaningId(rng.gen_range(0..n_meanings) as u32);
        let Some(word) = vocs[s].as_ref().code(topic, rng) else {
            continue;
        };
        if vocs[h].as_ref().decode(word, rng) == Some(topic) {
            successes += 1;
        }
    }
    successes as f64 / samples as f64
}

/// Uniform ordered pair of distinct indices in `[0, n)`.
pub(crate) fn sample_distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let first = rng.gen_range(0..n);
    let mut second = rng.gen_range(0..n - 1);
    if second >= first {
        second += 1;
    }
    (first, second)
}

/// True when every agent holds the same one-to-one lexicon covering all
/// meanings.
pub fn is_converged<V: AsRef<Vocabulary>>(vocs: &[V]) -> bool {
    let Some(first) = vocs.first().map(AsRef::as_ref) else {
        return false;
    };
    let bijective = (0..first.n_meanings()).all(|i| first.row(MeaningId(i as u32)).len() == 1)
        && (0..first.n_words()).all(|j| first.column(WordId(j as u32)).len() <= 1);
    bijective && vocs.iter().all(|v| v.as_ref() == first)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityStats {
    pub mean: f64,
    pub max: usize,
    pub min: usize,
}

pub fn complexity_stats<V: AsRef<Vocabulary>>(vocs: &[V]) -> ComplexityStats {
    if vocs.is_empty() {
        return ComplexityStats {
            mean: 0.0,
            max: 0,
            min: 0,
        };
    }
    let sizes = vocs.iter().map(|v| v.as_ref().local_complexity());
    let (sum, max, min) = sizes.fold((0usize, 0usize, usize::MAX), |(s, hi, lo), c| {
        (s + c, hi.max(c), lo.min(c))
    });
    ComplexityStats {
        mean: sum as f64 / vocs.len() as f64,
        max,
        min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TcsMethod {
    Exact,
    MonteCarlo,
}

impl TcsMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TcsMethod::Exact => "exact",
            TcsMethod::MonteCarlo => "montecarlo",
        }
    }
}

/// One time-stamped snapshot of the population observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub trial: u32,
    pub t: u64,
    pub tcs: f64,
    pub tcs_method: TcsMethod,
    pub complexity_mean: f64,
    pub complexity_max: f64,
    pub complexity_min: f64,
    pub converged: bool,
    /// Synthetic row appended after an early stop.
    pub padded: bool,
}
