//! Synthetic corpora for integration and acceptance tests.
//!
//! Background documents draw words from a Zipf law over a vocabulary whose
//! scores follow a bell curve slightly above neutral, like general-purpose
//! happiness lexicons. Theme documents mix a block of strongly positive or
//! strongly negative words with shared neutral hub words.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cooccur::corpus::RawDocument;
use cooccur::lexicon::Lexicon;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Letters-only word for index `i`, unique per prefix.
pub fn word(prefix: &str, i: usize) -> String {
    let mut n = i;
    let mut s = String::from(prefix);
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct FixtureSpec {
    pub seed: u64,
    pub background_docs: usize,
    pub positive_docs: usize,
    pub negative_docs: usize,
    pub vocabulary: usize,
    pub theme_size: usize,
    pub hubs: usize,
    /// Fraction of background words missing from the lexicon.
    pub unscored_fraction: f64,
}

impl FixtureSpec {
    /// Zipf background only.
    pub fn zipf(seed: u64, docs: usize) -> Self {
        FixtureSpec {
            seed,
            background_docs: docs,
            positive_docs: 0,
            negative_docs: 0,
            vocabulary: 3000,
            theme_size: 30,
            hubs: 8,
            unscored_fraction: 0.1,
        }
    }

    /// Background plus both planted themes.
    pub fn merged(seed: u64) -> Self {
        FixtureSpec {
            positive_docs: 1500,
            negative_docs: 1500,
            ..FixtureSpec::zipf(seed, 4000)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub docs: Vec<RawDocument>,
    pub lexicon_tsv: String,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub hubs: Vec<String>,
    pub daily_lists: Vec<Vec<String>>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

struct Zipf {
    cumulative: Vec<f64>,
}

impl Zipf {
    fn new(n: usize) -> Self {
        let mut acc = 0.0;
        let cumulative = (0..n)
            .map(|r| {
                acc += 1.0 / (r + 1) as f64;
                acc
            })
            .collect();
        Zipf { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u = rng.gen::<f64>() * self.cumulative.last().unwrap();
        self.cumulative
            .partition_point(|&c| c < u)
            .min(self.cumulative.len() - 1)
    }
}

pub fn generate(spec: &FixtureSpec) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background: Vec<String> = (0..spec.vocabulary).map(|i| word("b", i)).collect();
    let positive: Vec<String> = (0..spec.theme_size).map(|i| word("pos", i)).collect();
    let negative: Vec<String> = (0..spec.theme_size).map(|i| word("neg", i)).collect();
    let hubs: Vec<String> = (0..spec.hubs).map(|i| word("hub", i)).collect();

    let mut lexicon_tsv = String::from("word\thapps\tstddev\n");
    for w in &background {
        if rng.gen::<f64>() < spec.unscored_fraction {
            continue;
        }
        let h = round2((5.6 + 0.9 * normal(&mut rng)).clamp(1.3, 8.5));
        writeln!(lexicon_tsv, "{w}\t{h}\t1.0").unwrap();
    }
    for w in &hubs {
        writeln!(lexicon_tsv, "{w}\t{}\t0.8", round2(rng.gen_range(4.9..5.6))).unwrap();
    }
    for w in &positive {
        writeln!(lexicon_tsv, "{w}\t{}\t0.9", round2(rng.gen_range(6.8..8.4))).unwrap();
    }
    for w in &negative {
        writeln!(lexicon_tsv, "{w}\t{}\t0.9", round2(rng.gen_range(1.6..3.2))).unwrap();
    }

    let bg_zipf = Zipf::new(background.len());
    let theme_zipf = Zipf::new(spec.theme_size);
    let mut docs = Vec::new();
    let mut push = |rng: &mut ChaCha8Rng, theme: Option<&[String]>| {
        let len = rng.gen_range(6..=18);
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            let u = rng.gen::<f64>();
            let t = match theme {
                Some(block) if u < 0.5 => &block[theme_zipf.sample(rng)],
                Some(_) if u < 0.7 => &hubs[rng.gen_range(0..hubs.len())],
                None if u < 0.2 => &hubs[rng.gen_range(0..hubs.len())],
                _ => &background[bg_zipf.sample(rng)],
            };
            tokens.push(t.as_str());
        }
        let id = docs.len().to_string();
        docs.push(RawDocument::new(id, tokens.join(" ")));
    };
    for _ in 0..spec.background_docs {
        push(&mut rng, None);
    }
    for _ in 0..spec.positive_docs {
        push(&mut rng, Some(&positive));
    }
    for _ in 0..spec.negative_docs {
        push(&mut rng, Some(&negative));
    }

    // every daily list holds the hubs and the most frequent background
    // words, plus words particular to that day
    let daily_lists = (0..5)
        .map(|day| {
            let mut list: Vec<String> = hubs.to_vec();
            list.extend(background.iter().take(20).cloned());
            list.extend((0..30).map(|i| word("day", day * 100 + i)));
            list.push("Don't".to_owned());
            list
        })
        .collect();

    Fixture {
        docs,
        lexicon_tsv,
        positive,
        negative,
        hubs,
        daily_lists,
    }
}

impl Fixture {
    pub fn lexicon(&self) -> Lexicon {
        Lexicon::load(self.lexicon_tsv.as_bytes(), None::<&[u8]>).unwrap()
    }

    /// Writes corpus, lexicon and daily lists into `dir`; returns the
    /// corpus, lexicon and daily-list paths.
    pub fn write(&self, dir: &Path) -> (PathBuf, PathBuf, Vec<PathBuf>) {
        let corpus = dir.join("corpus.jsonl");
        let mut text = String::new();
        for d in &self.docs {
            writeln!(text, "{}", serde_json::to_string(d).unwrap()).unwrap();
        }
        std::fs::write(&corpus, text).unwrap();
        let lexicon = dir.join("lexicon.tsv");
        std::fs::write(&lexicon, &self.lexicon_tsv).unwrap();
        let daily = self
            .daily_lists
            .iter()
            .enumerate()
            .map(|(i, list)| {
                let p = dir.join(format!("daily_{i}.txt"));
                std::fs::write(&p, list.join("\n") + "\n").unwrap();
                p
            })
            .collect();
        (corpus, lexicon, daily)
    }
}

/// Seeded random small graph as `(node count, edges)` with distinct pairs.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> Vec<(usize, usize, u64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v, rng.gen_range(1..=max_w)));
            }
        }
    }
    edges
}
