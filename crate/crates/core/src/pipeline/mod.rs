//! End-to-end orchestration: ingest, lexicon, network, null models,
//! backbone, communities and the run summary.

mod compare;
mod config;
mod manifest;
mod output;
mod stages;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backbone::derive_stopwords;
use crate::corpus::{parse_corpus, read_documents, read_word_list, InputFormat, ParserConfig};
use crate::error::{Error, Result};
use crate::graph::{GraphStats, WeightedGraph};
use crate::lexicon::Lexicon;
use crate::null_models::NullModelKind;
use crate::rng::RNG_ALGORITHM;

pub use compare::{compare_corpora, Comparison, CorpusRow};
pub use config::{Inputs, PipelineConfig, Settings, DEFAULT_CONTROL_REPLICATES, DEFAULT_SWEEP, OUTPUT_ROOT_ENV};
pub use manifest::{check_manifest, manifest_rows, pattern_matches, write_manifest, FIGURES};
pub use output::{OutputTree, StagedOutput, RUN_MARKER};
pub use stages::{
    backbone_stage, community_stage, describe_network, null_model_stage, read_network, read_parsed, scored_network,
    write_corpus, BackboneOutput, BackboneSummary, CommunityOutput, CommunityOverview, CorpusSizes, BACKBONE_DIR,
    NETWORK_DIR, PARSED_CORPUS,
};

pub const SUMMARY_FILE: &str = "run_summary.json";
pub const TOOL_NAME: &str = "cooccur";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads raw documents and parses them.
pub fn load_corpus(path: &Path, format: InputFormat, parser: &ParserConfig) -> Result<crate::corpus::Corpus> {
    let docs = read_documents(open(path)?, format, &path.display().to_string())?;
    parse_corpus(&docs, parser)
}

pub fn load_lexicon(scores: &Path, aliases: Option<&Path>) -> Result<Lexicon> {
    let aliases = aliases.map(open).transpose()?;
    Lexicon::load(open(scores)?, aliases)
}

/// Hub words: the explicit list (lowercased) plus those derived from daily
/// top-word lists against the `hub_rank` highest-degree words of `g`.
pub fn resolve_stopwords(
    explicit: Option<&Path>,
    daily_lists: &[PathBuf],
    g: &WeightedGraph,
    hub_rank: usize,
) -> Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    if let Some(path) = explicit {
        let list = read_word_list(open(path)?).map_err(|e| Error::io(path, e))?;
        words.extend(list.into_iter().map(|w| w.to_lowercase()));
    }
    if !daily_lists.is_empty() {
        let lists = daily_lists
            .iter()
            .map(|p| read_word_list(open(p)?).map_err(|e| Error::io(p, e)))
            .collect::<Result<Vec<_>>>()?;
        words.extend(derive_stopwords(&lists, g, hub_rank));
    }
    Ok(words)
}

/// File names (not paths) of the inputs, so summaries do not depend on
/// where the inputs live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputNames {
    pub corpus: String,
    pub input_format: InputFormat,
    pub lexicon: String,
    pub aliases: Option<String>,
    pub stopwords: Option<String>,
    pub daily_lists: Vec<String>,
}

impl InputNames {
    fn of(inputs: &Inputs) -> Self {
        InputNames {
            corpus: file_name(&inputs.corpus),
            input_format: inputs.input_format,
            lexicon: file_name(&inputs.lexicon),
            aliases: inputs.aliases.as_deref().map(file_name),
            stopwords: inputs.stopwords.as_deref().map(file_name),
            daily_lists: inputs.daily_lists.iter().map(|p| file_name(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullOverview {
    pub kind: NullModelKind,
    pub replicates: u32,
    pub mean_edges: f64,
    pub mean_total_weight: f64,
    /// Count-weighted mean score averaged over replicates.
    pub mean_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub tool: String,
    pub version: String,
    pub rng: String,
    pub seed: u64,
    /// `SOURCE_DATE_EPOCH` when set; runs are otherwise free of timestamps.
    pub source_date_epoch: Option<u64>,
    pub inputs: InputNames,
    pub settings: Settings,
    pub corpus: CorpusSizes,
    pub lexicon_entries: usize,
    pub scored_nodes: usize,
    pub network: GraphStats,
    pub null_models: Vec<NullOverview>,
    pub backbone: BackboneSummary,
    pub community: CommunityOverview,
}

/// Runs every stage into a staging directory and moves it to the output
/// directory on success. On failure nothing is left behind.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(RunSummary, PathBuf)> {
    cfg.validate()?;
    let target = cfg.effective_output_dir();
    let (staged, mut out) = StagedOutput::begin(&target)?;
    match run_into(cfg, &mut out) {
        Ok(summary) => {
            let dir = staged.commit()?;
            Ok((summary, dir))
        }
        Err(e) => {
            staged.abort();
            Err(e)
        }
    }
}

/// Runs every stage writing directly into `out`.
pub fn run_into(cfg: &PipelineConfig, out: &mut OutputTree) -> Result<RunSummary> {
    let s = &cfg.settings;
    let inputs = &cfg.inputs;

    let corpus = load_corpus(&inputs.corpus, inputs.input_format, &s.parser()).map_err(|e| e.in_stage("ingest"))?;
    let corpus_sizes = write_corpus(&corpus, out).map_err(|e| e.in_stage("ingest"))?;

    let lexicon = load_lexicon(&inputs.lexicon, inputs.aliases.as_deref()).map_err(|e| e.in_stage("lexicon"))?;

    let graph = scored_network(&corpus, &lexicon, s.require_scores);
    drop(corpus);
    let network = describe_network(&graph, NETWORK_DIR, &s.bins, out).map_err(|e| e.in_stage("graph"))?;

    let mut null_models = Vec::new();
    for &kind in &s.null_models {
        let e =
            null_model_stage(&graph, kind, s.seed, s.replicates, &s.bins, out).map_err(|e| e.in_stage("nullmodel"))?;
        let scores: Vec<f64> = e.replicates.iter().filter_map(|r| r.mean_score).collect();
        null_models.push(NullOverview {
            kind,
            replicates: s.replicates,
            mean_edges: e.mean_edges,
            mean_total_weight: e.mean_total_weight,
            mean_score: (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64),
        });
    }

    let stopwords = resolve_stopwords(inputs.stopwords.as_deref(), &inputs.daily_lists, &graph, s.hub_rank)
        .map_err(|e| e.in_stage("backbone"))?;
    let bb = backbone_stage(&graph, &stopwords, s, out).map_err(|e| e.in_stage("backbone"))?;

    let comm = community_stage(&graph, &bb.result.graph, s, out).map_err(|e| e.in_stage("community"))?;

    let summary = RunSummary {
        tool: TOOL_NAME.to_owned(),
        version: TOOL_VERSION.to_owned(),
        rng: RNG_ALGORITHM.to_owned(),
        seed: s.seed,
        source_date_epoch: std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok()),
        inputs: InputNames::of(inputs),
        settings: s.clone(),
        corpus: corpus_sizes,
        lexicon_entries: lexicon.len(),
        scored_nodes: graph.nodes().iter().filter(|n| n.score.is_some()).count(),
        network,
        null_models,
        backbone: bb.summary,
        community: comm.overview,
    };
    out.write_json(SUMMARY_FILE, &summary)
        .map_err(|e| e.in_stage("report"))?;
    write_manifest(out).map_err(|e| e.in_stage("report"))?;
    Ok(summary)
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let summary = serde_json::from_reader(open(path)?)
        .map_err(|e| Error::malformed(path.display().to_string(), e.line() as u64, e.to_string()))?;
    Ok(summary)
}
