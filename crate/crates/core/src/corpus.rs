//! Document parsing and corpus-level word statistics.
//!
//! Raw documents are normalized into lowercase word tokens: contractions are
//! expanded, hashtag symbols dropped, and handles, URLs, tokens with digits
//! and punctuation are removed. A [`Corpus`] keeps the parsed documents in
//! input order together with word counts (every occurrence) and document
//! counts (once per document).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub id: String,
    pub tokens: Vec<String>,
    pub unique_tokens: BTreeSet<String>,
}

impl ParsedDocument {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        let unique_tokens = tokens.iter().cloned().collect();
        ParsedDocument {
            id: id.into(),
            tokens,
            unique_tokens,
        }
    }
}

/// A literal substring rewrite applied after lowercasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionRule {
    pub pattern: String,
    pub replacement: String,
}

impl ContractionRule {
    pub fn new(pattern: &str, replacement: &str) -> Self {
        ContractionRule {
            pattern: pattern.to_owned(),
            replacement: replacement.to_owned(),
        }
    }
}

/// The default contraction table. Ambiguous contractions become a blank.
pub fn default_contraction_rules() -> Vec<ContractionRule> {
    vec![
        ContractionRule::new("n't", " not"),
        ContractionRule::new("'ve", " have"),
        ContractionRule::new("'ll", " will"),
        ContractionRule::new("'s", " "),
        ContractionRule::new("'m", " "),
        ContractionRule::new("'d", " "),
        ContractionRule::new("'re", " "),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParserConfig {
    pub anchors_to_remove: BTreeSet<String>,
    pub extra_removals: BTreeSet<String>,
    pub contraction_rules: Vec<ContractionRule>,
    pub strip_hashtag_symbol: bool,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            anchors_to_remove: BTreeSet::new(),
            extra_removals: BTreeSet::new(),
            contraction_rules: default_contraction_rules(),
            strip_hashtag_symbol: true,
        }
    }
}

impl ParserConfig {
    /// Adds anchor words; a leading `#` is ignored and matching is on the
    /// lowercased form.
    pub fn with_anchors<I, S>(mut self, anchors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.anchors_to_remove
            .extend(anchors.into_iter().map(|a| normalize_removal(a.as_ref())));
        self
    }

    pub fn with_removals<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.extra_removals
            .extend(words.into_iter().map(|a| normalize_removal(a.as_ref())));
        self
    }

    fn is_removed(&self, token: &str) -> bool {
        self.anchors_to_remove.contains(token) || self.extra_removals.contains(token)
    }
}

fn normalize_removal(word: &str) -> String {
    let lowered: String = word.trim().nfc().collect::<String>().to_lowercase();
    lowered.trim_start_matches('#').to_owned()
}

pub fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

pub fn is_handle(token: &str) -> bool {
    token.starts_with('@')
}

pub fn has_digit(token: &str) -> bool {
    token.chars().any(char::is_numeric)
}

/// Strips every character that is not a letter or digit.
pub fn strip_punctuation(token: &str) -> String {
    token.chars().filter(|c| c.is_alphanumeric()).collect()
}

/// Normalizes one raw document into word tokens.
pub fn parse_document(doc: &RawDocument, cfg: &ParserConfig) -> ParsedDocument {
    let mut text: String = doc.text.nfc().collect::<String>().to_lowercase();
    // Typographic apostrophes are common in tweets.
    if text.contains('\u{2019}') {
        text = text.replace('\u{2019}', "'");
    }
    for rule in &cfg.contraction_rules {
        if text.contains(rule.pattern.as_str()) {
            text = text.replace(rule.pattern.as_str(), &rule.replacement);
        }
    }
    if cfg.strip_hashtag_symbol {
        text.retain(|c| c != '#');
    }

    let tokens = text
        .split_whitespace()
        .filter_map(|raw| {
            let lead = raw.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@');
            if is_handle(lead) || is_url(lead) || has_digit(raw) {
                return None;
            }
            let token: String = strip_punctuation(raw).nfc().collect();
            if token.is_empty() || cfg.is_removed(&token) {
                None
            } else {
                Some(token)
            }
        })
        .collect();
    ParsedDocument::new(doc.id.clone(), tokens)
}

/// Parsed documents plus corpus-level counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<ParsedDocument>,
    word_counts: BTreeMap<String, u64>,
    tweet_counts: BTreeMap<String, u64>,
}

impl Corpus {
    /// Builds a corpus from already-parsed documents, rejecting duplicate ids.
    pub fn from_parsed(documents: Vec<ParsedDocument>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        let mut word_counts = BTreeMap::new();
        let mut tweet_counts = BTreeMap::new();
        for doc in &documents {
            for token in &doc.tokens {
                *word_counts.entry(token.clone()).or_insert(0) += 1;
            }
            for token in &doc.unique_tokens {
                *tweet_counts.entry(token.clone()).or_insert(0) += 1;
            }
        }
        Ok(Corpus {
            documents,
            word_counts,
            tweet_counts,
        })
    }

    pub fn documents(&self) -> &[ParsedDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Total occurrences of each word, repeats within a document included.
    pub fn word_counts(&self) -> &BTreeMap<String, u64> {
        &self.word_counts
    }

    /// Number of documents containing each word.
    pub fn tweet_counts(&self) -> &BTreeMap<String, u64> {
        &self.tweet_counts
    }

    pub fn word_count(&self, word: &str) -> u64 {
        self.word_counts.get(word).copied().unwrap_or(0)
    }

    pub fn tweet_count(&self, word: &str) -> u64 {
        self.tweet_counts.get(word).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.word_counts.values().sum()
    }
}

pub fn parse_corpus(docs: &[RawDocument], cfg: &ParserConfig) -> Result<Corpus> {
    let parsed: Vec<ParsedDocument> = docs.par_iter().map(|d| parse_document(d, cfg)).collect();
    Corpus::from_parsed(parsed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Jsonl,
    Txt,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(InputFormat::Jsonl),
            "txt" => Ok(InputFormat::Txt),
            other => Err(Error::Config(format!("unknown input format `{other}`"))),
        }
    }
}

/// Reads raw documents. JSON-lines objects carry `id` and `text`; plain text
/// has one document per line with the 1-based line number as id.
pub fn read_documents<R: BufRead>(reader: R, format: InputFormat, source_name: &str) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| Error::malformed(source_name, line_no, e.to_string()))?;
        match format {
            InputFormat::Txt => docs.push(RawDocument::new(line_no.to_string(), line)),
            InputFormat::Jsonl => {
                if line.trim().is_empty() {
                    continue;
                }
                let doc: RawDocument =
                    serde_json::from_str(&line).map_err(|e| Error::malformed(source_name, line_no, e.to_string()))?;
                docs.push(doc);
            }
        }
    }
    Ok(docs)
}

/// Reads a word list: one word per line, blank lines skipped.
pub fn read_word_list<R: BufRead>(reader: R) -> std::io::Result<Vec<String>> {
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() {
            continue;
        }
        words.push(word.to_owned());
    }
    Ok(words)
}
