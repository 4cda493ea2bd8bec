//! Happiness-score lexicon with acronym aliases.
//!
//! Scores live on the 1..=9 scale with 5 as neutral. An alias maps a word
//! (usually an acronym such as `maga`) to the expansion whose score should
//! be used instead. Aliases resolve exactly one hop.

use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};

pub const NEUTRAL_SCORE: f64 = 5.0;
pub const MIN_SCORE: f64 = 1.0;
pub const MAX_SCORE: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexiconEntry {
    pub h: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    aliases: BTreeMap<String, String>,
    duplicate_rows: usize,
}

/// Acronyms scored through their expansions.
pub fn election_acronyms() -> Vec<(&'static str, &'static str)> {
    vec![
        ("maga", "makeamericagreatagain"),
        ("msm", "mainstreammedia"),
        ("tcot", "topconservativesontwitter"),
        ("potus", "presidentoftheunitedstates"),
    ]
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces a score. Returns true when an existing entry was
    /// replaced.
    pub fn insert(&mut self, word: impl Into<String>, h: f64, sd: f64) -> Result<bool> {
        if !(MIN_SCORE..=MAX_SCORE).contains(&h) {
            return Err(Error::InvalidArgument(format!("score {h} outside [1, 9]")));
        }
        if !(sd >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative or NaN spread {sd}")));
        }
        Ok(self.entries.insert(word.into(), LexiconEntry { h, sd }).is_some())
    }

    pub fn add_alias(&mut self, word: impl Into<String>, expansion: impl Into<String>) {
        self.aliases.insert(word.into(), expansion.into());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn aliases(&self) -> &BTreeMap<String, String> {
        &self.aliases
    }

    /// Number of score rows that overwrote an earlier row for the same word.
    pub fn duplicate_rows(&self) -> usize {
        self.duplicate_rows
    }

    /// Resolves `word` through its alias (if any) and returns the entry.
    ///
    /// An aliased word is always scored via its expansion, even when the
    /// word itself also has an entry.
    pub fn entry(&self, word: &str) -> Option<LexiconEntry> {
        match self.aliases.get(word) {
            Some(expansion) => self.entries.get(expansion).copied(),
            None => self.entries.get(word).copied(),
        }
    }

    pub fn score_of(&self, word: &str) -> Option<f64> {
        self.entry(word).map(|e| e.h)
    }

    /// Loads a `word, happs, stddev` TSV (header required) and an optional
    /// `word, expansion` alias TSV (header optional).
    pub fn load<S: Read, A: Read>(scores: S, aliases: Option<A>) -> Result<Self> {
        let mut lex = Lexicon::new();
        let mut reader = tsv_reader(scores);
        for (idx, record) in reader.records().enumerate() {
            let line = idx as u64 + 1;
            let record = record?;
            if line == 1 {
                continue;
            }
            if record.len() == 1 && record[0].trim().is_empty() {
                continue;
            }
            if record.len() < 3 {
                return Err(Error::malformed("lexicon", line, "expected word, happs, stddev"));
            }
            let word = record[0].trim();
            if word.is_empty() {
                return Err(Error::malformed("lexicon", line, "empty word"));
            }
            let h: f64 = record[1]
                .trim()
                .parse()
                .map_err(|_| Error::malformed("lexicon", line, format!("bad score `{}`", &record[1])))?;
            let sd: f64 = record[2]
                .trim()
                .parse()
                .map_err(|_| Error::malformed("lexicon", line, format!("bad stddev `{}`", &record[2])))?;
            match lex.insert(word, h, sd) {
                Ok(true) => lex.duplicate_rows += 1,
                Ok(false) => {}
                Err(e) => return Err(Error::malformed("lexicon", line, e.to_string())),
            }
        }

        if let Some(aliases) = aliases {
            let mut reader = tsv_reader(aliases);
            for (idx, record) in reader.records().enumerate() {
                let line = idx as u64 + 1;
                let record = record?;
                if record.len() == 1 && record[0].trim().is_empty() {
                    continue;
                }
                if record.len() < 2 {
                    return Err(Error::malformed("aliases", line, "expected word, expansion"));
                }
                let (word, expansion) = (record[0].trim(), record[1].trim());
                if line == 1 && word == "word" {
                    continue;
                }
                if word.is_empty() || expansion.is_empty() {
                    return Err(Error::malformed("aliases", line, "empty field"));
                }
                lex.add_alias(word, expansion);
            }
        }
        Ok(lex)
    }
}

fn tsv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(input)
}

/// Contribution of a word to the deviation of the mean score from neutral:
/// `(h - 5) * n / total`.
pub fn deviation_weight(h: f64, n: u64, total: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidArgument("total word count is zero".into()));
    }
    Ok((h - NEUTRAL_SCORE) * n as f64 / total as f64)
}

/// Count-weighted mean of `(score, count)` pairs; `None` when the total
/// count is zero.
pub fn weighted_mean<I>(pairs: I) -> Option<f64>
where
    I: IntoIterator<Item = (f64, u64)>,
{
    let (sum, total) = pairs
        .into_iter()
        .fold((0.0, 0u64), |(s, t), (h, n)| (s + h * n as f64, t + n));
    (total > 0).then(|| sum / total as f64)
}
