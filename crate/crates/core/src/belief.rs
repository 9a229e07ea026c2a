//! Sliding-window memory of observed associations and the Local Approximated
//! Probability of Success (LAPS).
//!
//! For every meaning the agent keeps the last `tau` words it saw used for it,
//! and for every word the last `tau` meanings it saw that word resolve to.
//! Dividing window counts by `tau` (not by the current window length) gives
//! the agent's estimate of the population's coding and decoding matrices.
//! The estimate is deliberately sub-normalized until a window fills up: the
//! missing mass stands for "not enough evidence yet".

use std::collections::{BTreeMap, VecDeque};

use crate::lexicon::{MeaningId, Vocabulary, WordId};
use crate::metrics::{tcs_pair, CodingSource, DecodingSource};

/// Bounded FIFO with per-value counts kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingWindow<T: Ord + Copy> {
    entries: VecDeque<T>,
    counts: BTreeMap<T, u32>,
    appended: u64,
}

impl<T: Ord + Copy> Default for SlidingWindow<T> {
    fn default() -> Self {
        Self {
            entries: VecDeque::new(),
            counts: BTreeMap::new(),
            appended: 0,
        }
    }
}

impl<T: Ord + Copy> SlidingWindow<T> {
    fn push(&mut self, value: T, tau: usize) {
        self.entries.push_back(value);
        *self.counts.entry(value).or_insert(0) += 1;
        self.appended += 1;
        if self.entries.len() > tau {
            let old = self.entries.pop_front().expect("window is nonempty");
            let c = self.counts.get_mut(&old).expect("evicted value is counted");
            *c -= 1;
            if *c == 0 {
                self.counts.remove(&old);
            }
        }
    }

    /// Oldest first.
    pub fn entries(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, value: T) -> u32 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Distinct values with their counts, ascending by value.
    pub fn counts(&self) -> impl Iterator<Item = (T, u32)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }

    /// Lifetime number of appends (`T_m` or `T_w`).
    pub fn appended(&self) -> u64 {
        self.appended
    }
}

/// Per-agent memory of recent interactions, the source of the windowed
/// population estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingWindowMemory {
    tau: usize,
    coding: Vec<SlidingWindow<WordId>>,
    decoding: Vec<SlidingWindow<MeaningId>>,
}

impl SlidingWindowMemory {
    /// # Panics
    /// If `tau == 0`.
    pub fn new(tau: usize, n_meanings: usize, n_words: usize) -> Self {
        assert!(tau >= 1, "window length must be at least 1");
        Self {
            tau,
            coding: vec![SlidingWindow::default(); n_meanings],
            decoding: vec![SlidingWindow::default(); n_words],
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn n_meanings(&self) -> usize {
        self.coding.len()
    }

    pub fn n_words(&self) -> usize {
        self.decoding.len()
    }

    /// Someone was seen using `w` for meaning `m`.
    pub fn record_coding_observation(&mut self, m: MeaningId, w: WordId) {
        self.coding[m.index()].push(w, self.tau);
    }

    /// Someone was seen interpreting `w` as meaning `m`.
    pub fn record_decoding_observation(&mut self, w: WordId, m: MeaningId) {
        self.decoding[w.index()].push(m, self.tau);
    }

    pub fn coding_window(&self, m: MeaningId) -> &SlidingWindow<WordId> {
        &self.coding[m.index()]
    }

    pub fn decoding_window(&self, w: WordId) -> &SlidingWindow<MeaningId> {
        &self.decoding[w.index()]
    }

    /// Estimated probability that another agent codes `m` as `w`.
    pub fn approx_coding_value(&self, m: MeaningId, w: WordId) -> f64 {
        self.coding[m.index()].count(w) as f64 / self.tau as f64
    }

    /// Estimated probability that another agent decodes `w` as `m`.
    pub fn approx_decoding_value(&self, m: MeaningId, w: WordId) -> f64 {
        self.decoding[w.index()].count(m) as f64 / self.tau as f64
    }

    /// Read-only view as a coding/decoding source.
    pub fn approx_population(&self) -> ApproxPopulationVocabulary<'_> {
        ApproxPopulationVocabulary { mem: self }
    }
}

/// The windowed estimate of the population vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct ApproxPopulationVocabulary<'a> {
    mem: &'a SlidingWindowMemory,
}

impl CodingSource for ApproxPopulationVocabulary<'_> {
    fn n_meanings(&self) -> usize {
        self.mem.n_meanings()
    }

    fn visit_coding_row(&self, m: MeaningId, f: &mut dyn FnMut(WordId, f64)) {
        let tau = self.mem.tau as f64;
        for (w, c) in self.mem.coding[m.index()].counts() {
            f(w, c as f64 / tau);
        }
    }
}

impl DecodingSource for ApproxPopulationVocabulary<'_> {
    fn decoding_prob(&self, m: MeaningId, w: WordId) -> f64 {
        self.mem.approx_decoding_value(m, w)
    }
}

/// LAPS: the role-symmetrized TCS between the agent's own vocabulary and its
/// windowed estimate of the population. Lies in `[0, K/M]`.
pub fn laps(voc: &Vocabulary, mem: &SlidingWindowMemory) -> f64 {
    tcs_pair(voc, &mem.approx_population())
}
