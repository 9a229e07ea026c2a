//! Agent vocabularies as sparse binary meaning×word association matrices.
//!
//! A [`Vocabulary`] stores the set of `(meaning, word)` pairs an agent uses,
//! together with a row view (words per meaning) and a column view (meanings
//! per word). Coding and decoding distributions are uniform over a row or a
//! column and are derived on demand from the set sizes; nothing probabilistic
//! is stored.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a meaning in `[0, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeaningId(pub u32);

/// Index of a word in `[0, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WordId(pub u32);

impl MeaningId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl WordId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for MeaningId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabularyParseError {
    #[error("line {line}: expected `meaning<TAB>word`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: meaning {meaning} out of range (M = {n_meanings})")]
    MeaningOutOfRange {
        line: usize,
        meaning: u32,
        n_meanings: usize,
    },
    #[error("line {line}: word {word} out of range (W = {n_words})")]
    WordOutOfRange {
        line: usize,
        word: u32,
        n_words: usize,
    },
}

/// Binary association matrix `V(A)` with row and column cross-indexes.
///
/// Rows and columns are kept sorted so iteration order (and therefore every
/// floating-point sum built on top of it) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    rows: Vec<Vec<WordId>>,
    cols: Vec<Vec<MeaningId>>,
    len: usize,
}

fn insert_sorted<T: Ord + Copy>(v: &mut Vec<T>, x: T) -> bool {
    match v.binary_search(&x) {
        Ok(_) => false,
        Err(pos) => {
            v.insert(pos, x);
            true
        }
    }
}

fn remove_sorted<T: Ord + Copy>(v: &mut Vec<T>, x: T) -> bool {
    match v.binary_search(&x) {
        Ok(pos) => {
            v.remove(pos);
            true
        }
        Err(_) => false,
    }
}

impl Vocabulary {
    /// An empty `M × W` vocabulary.
    pub fn new(n_meanings: usize, n_words: usize) -> Self {
        Self {
            rows: vec![Vec::new(); n_meanings],
            cols: vec![Vec::new(); n_words],
            len: 0,
        }
    }

    /// Builds a vocabulary from a list of pairs. Duplicates are ignored.
    pub fn from_pairs(
        n_meanings: usize,
        n_words: usize,
        pairs: impl IntoIterator<Item = (MeaningId, WordId)>,
    ) -> Self {
        let mut voc = Self::new(n_meanings, n_words);
        for (m, w) in pairs {
            voc.add_association(m, w);
        }
        voc
    }

    pub fn n_meanings(&self) -> usize {
        self.rows.len()
    }

    pub fn n_words(&self) -> usize {
        self.cols.len()
    }

    /// Words associated with `m`, sorted.
    pub fn row(&self, m: MeaningId) -> &[WordId] {
        &self.rows[m.index()]
    }

    /// Meanings associated with `w`, sorted.
    pub fn column(&self, w: WordId) -> &[MeaningId] {
        &self.cols[w.index()]
    }

    pub fn contains(&self, m: MeaningId, w: WordId) -> bool {
        self.rows[m.index()].binary_search(&w).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of stored associations, i.e. the sum of all entries of `V(A)`.
    pub fn local_complexity(&self) -> usize {
        self.len
    }

    pub fn is_known(&self, m: MeaningId) -> bool {
        !self.rows[m.index()].is_empty()
    }

    /// Meanings with a nonempty row, ascending.
    pub fn known_meanings(&self) -> impl Iterator<Item = MeaningId> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(i, _)| MeaningId(i as u32))
    }

    /// Meanings with an empty row, ascending.
    pub fn unknown_meanings(&self) -> impl Iterator<Item = MeaningId> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_empty())
            .map(|(i, _)| MeaningId(i as u32))
    }

    /// `K`, the number of known meanings.
    pub fn known_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_empty()).count()
    }

    /// All associations in `(meaning, word)` order.
    pub fn pairs(&self) -> impl Iterator<Item = (MeaningId, WordId)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&w| (MeaningId(i as u32), w)))
    }

    /// Coding probabilities `V^c(A)_{m·}`: uniform over the words of row `m`,
    /// empty when the row is empty.
    pub fn coding_distribution(&self, m: MeaningId) -> Vec<(WordId, f64)> {
        let row = &self.rows[m.index()];
        let p = 1.0 / row.len() as f64;
        row.iter().map(|&w| (w, p)).collect()
    }

    /// Decoding probabilities `V^d(A)_{·w}`: uniform over the meanings of
    /// column `w`, empty when the column is empty.
    pub fn decoding_distribution(&self, w: WordId) -> Vec<(MeaningId, f64)> {
        let col = &self.cols[w.index()];
        let p = 1.0 / col.len() as f64;
        col.iter().map(|&m| (m, p)).collect()
    }

    /// `V^c(A)_{mw}`.
    pub fn coding_value(&self, m: MeaningId, w: WordId) -> f64 {
        if self.contains(m, w) {
            1.0 / self.rows[m.index()].len() as f64
        } else {
            0.0
        }
    }

    /// `V^d(A)_{mw}`.
    pub fn decoding_value(&self, m: MeaningId, w: WordId) -> f64 {
        if self.contains(m, w) {
            1.0 / self.cols[w.index()].len() as f64
        } else {
            0.0
        }
    }

    /// Samples a word for `m`, or `None` if the agent has no word for it.
    pub fn code<R: Rng + ?Sized>(&self, m: MeaningId, rng: &mut R) -> Option<WordId> {
        let row = &self.rows[m.index()];
        match row.len() {
            0 => None,
            1 => Some(row[0]),
            n => Some(row[rng.gen_range(0..n)]),
        }
    }

    /// Samples an interpretation of `w`, or `None` if the word is unknown.
    pub fn decode<R: Rng + ?Sized>(&self, w: WordId, rng: &mut R) -> Option<MeaningId> {
        let col = &self.cols[w.index()];
        match col.len() {
            0 => None,
            1 => Some(col[0]),
            n => Some(col[rng.gen_range(0..n)]),
        }
    }

    /// Picks a fresh word for `m`: uniform over the words this agent does not
    /// use yet, or uniform over all words when every word is taken.
    ///
    /// Does not modify the vocabulary.
    pub fn invent<R: Rng + ?Sized>(&self, m: MeaningId, rng: &mut R) -> WordId {
        debug_assert!(
            self.rows[m.index()].is_empty(),
            "invent called for known meaning {m}"
        );
        let free: Vec<WordId> = self
            .cols
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(i, _)| WordId(i as u32))
            .collect();
        if free.is_empty() {
            WordId(rng.gen_range(0..self.cols.len()) as u32)
        } else {
            free[rng.gen_range(0..free.len())]
        }
    }

    /// Adds `(m, w)`. Idempotent. Returns whether the pair was new.
    pub fn add_association(&mut self, m: MeaningId, w: WordId) -> bool {
        let added = insert_sorted(&mut self.rows[m.index()], w);
        if added {
            insert_sorted(&mut self.cols[w.index()], m);
            self.len += 1;
        }
        added
    }

    /// Removes `(m, w)` if present. Returns whether something was removed.
    pub fn remove_association(&mut self, m: MeaningId, w: WordId) -> bool {
        let removed = remove_sorted(&mut self.rows[m.index()], w);
        if removed {
            remove_sorted(&mut self.cols[w.index()], m);
            self.len -= 1;
        }
        removed
    }

    /// Minimal Naming Game update after a successful exchange: keep `(m, w)`
    /// and drop every synonym of `m` and every homonym of `w`.
    pub fn update_success(&mut self, m: MeaningId, w: WordId) {
        self.add_association(m, w);
        let synonyms: Vec<WordId> = self.rows[m.index()]
            .iter()
            .copied()
            .filter(|&x| x != w)
            .collect();
        for other in synonyms {
            self.remove_association(m, other);
        }
        let homonyms: Vec<MeaningId> = self.cols[w.index()]
            .iter()
            .copied()
            .filter(|&x| x != m)
            .collect();
        for other in homonyms {
            self.remove_association(other, w);
        }
    }

    /// Line-oriented dump, one `meaning<TAB>word` pair per line, sorted.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (m, w) in self.pairs() {
            out.push_str(&format!("{}\t{}\n", m.0, w.0));
        }
        out
    }

    /// Parses the format written by [`Vocabulary::to_tsv`]. Blank lines are
    /// skipped.
    pub fn from_tsv(
        text: &str,
        n_meanings: usize,
        n_words: usize,
    ) -> Result<Self, VocabularyParseError> {
        let mut voc = Self::new(n_meanings, n_words);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let malformed = || VocabularyParseError::Malformed {
                line,
                text: raw.to_string(),
            };
            let (a, b) = raw.split_once('\t').ok_or_else(malformed)?;
            let meaning: u32 = a.trim().parse().map_err(|_| malformed())?;
            let word: u32 = b.trim().parse().map_err(|_| malformed())?;
            if meaning as usize >= n_meanings {
                return Err(VocabularyParseError::MeaningOutOfRange {
                    line,
                    meaning,
                    n_meanings,
                });
            }
            if word as usize >= n_words {
                return Err(VocabularyParseError::WordOutOfRange {
                    line,
                    word,
                    n_words,
                });
            }
            voc.add_association(MeaningId(meaning), WordId(word));
        }
        Ok(voc)
    }

    /// Checks the cross-indexes against each other. Used by tests.
    pub fn is_consistent(&self) -> bool {
        let from_rows: usize = self.rows.iter().map(Vec::len).sum();
        let from_cols: usize = self.cols.iter().map(Vec::len).sum();
        if from_rows != self.len || from_cols != self.len {
            return false;
        }
        let sorted = self.rows.iter().all(|r| r.windows(2).all(|p| p[0] < p[1]))
            && self.cols.iter().all(|c| c.windows(2).all(|p| p[0] < p[1]));
        sorted
            && self
                .pairs()
                .all(|(m, w)| self.cols[w.index()].binary_search(&m).is_ok())
    }
}

impl AsRef<Vocabulary> for Vocabulary {
    fn as_ref(&self) -> &Vocabulary {
        self
    }
}
