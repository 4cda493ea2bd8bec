//! Pipeline stages. Each stage writes its products into an [`OutputTree`]
//! under fixed relative paths, so running a stage on its own from the
//! intermediate files of a previous run reproduces the same files.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::output::OutputTree;
use super::Settings;
use crate::backbone::{
    filter_edges, remove_hubs, threshold_sweep, BackboneMethod, BackboneResult, ScoreDistribution, SweepRow,
};
use crate::community::{
    baseline_scores, community_profiles, community_report, louvain, shuffled_community_control, Baselines,
    CommunityReport, CommunitySummary, ControlRow, LouvainConfig, OtherGroup, Partition, ShuffledControl,
};
use crate::corpus::{Corpus, ParsedDocument};
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, read_graph, write_edges_tsv, write_graphml, write_nodes_tsv, Distribution, GraphStats, WeightedGraph,
};
use crate::histogram::HistogramGrid;
use crate::lexicon::Lexicon;
use crate::null_models::{ensemble_summary, EnsembleSummary, NullModelKind, NullModelSpec};
use crate::profiles::{score_profiles, ProfileBins};

pub const PARSED_CORPUS: &str = "corpus/parsed.jsonl";
pub const NETWORK_DIR: &str = "network";
pub const BACKBONE_DIR: &str = "backbone";

#[derive(Serialize, Deserialize)]
struct ParsedLine {
    id: String,
    tokens: Vec<String>,
}

/// Documents and token totals of a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSizes {
    pub documents: usize,
    pub tokens: u64,
    pub vocabulary: usize,
}

impl CorpusSizes {
    pub fn of(corpus: &Corpus) -> Self {
        CorpusSizes {
            documents: corpus.len(),
            tokens: corpus.total_tokens(),
            vocabulary: corpus.word_counts().len(),
        }
    }
}

/// Writes the parsed documents and the distribution of distinct words per
/// document.
pub fn write_corpus(corpus: &Corpus, out: &mut OutputTree) -> Result<CorpusSizes> {
    out.write_with(PARSED_CORPUS, |w| {
        for doc in corpus.documents() {
            let line = ParsedLine {
                id: doc.id.clone(),
                tokens: doc.tokens.clone(),
            };
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
        Ok(())
    })?;
    let lengths = Distribution::from_values(
        "distinct_words",
        corpus.documents().iter().map(|d| d.unique_tokens.len() as u64),
    );
    out.write_with("corpus/document_sizes.csv", |w| lengths.write_csv(w))?;
    Ok(CorpusSizes::of(corpus))
}

/// Reads documents written by [`write_corpus`].
pub fn read_parsed<R: BufRead>(reader: R, source_name: &str) -> Result<Corpus> {
    let mut docs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| Error::malformed(source_name, line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ParsedLine =
            serde_json::from_str(&line).map_err(|e| Error::malformed(source_name, line_no, e.to_string()))?;
        docs.push(ParsedDocument::new(parsed.id, parsed.tokens));
    }
    Corpus::from_parsed(docs)
}

/// Reads `<dir>/nodes.tsv` and `<dir>/edges.tsv` from a directory tree.
pub fn read_network(root: &std::path::Path, dir: &str) -> Result<WeightedGraph> {
    let open = |name: &str| {
        let path = root.join(dir).join(name);
        std::fs::File::open(&path)
            .map(std::io::BufReader::new)
            .map_err(|e| Error::io(path, e))
    };
    read_graph(open("nodes.tsv")?, open("edges.tsv")?)
}

/// Co-occurrence network with lexicon scores; unscored words are dropped
/// when `require_scores` is set.
pub fn scored_network(corpus: &Corpus, lexicon: &Lexicon, require_scores: bool) -> WeightedGraph {
    let g = build_graph(corpus).attach_scores(lexicon);
    if !require_scores {
        return g;
    }
    let keep_node: Vec<bool> = g.nodes().iter().map(|n| n.score.is_some()).collect();
    let keep_edge: Vec<bool> = g.edges().iter().map(|e| keep_node[e.u] && keep_node[e.v]).collect();
    g.subgraph(&keep_node, &keep_edge, false)
}

/// Node and edge tables, statistics, distributions and score profiles of
/// `g` under `dir`.
pub fn describe_network(g: &WeightedGraph, dir: &str, bins: &ProfileBins, out: &mut OutputTree) -> Result<GraphStats> {
    out.write_with(&format!("{dir}/nodes.tsv"), |w| write_nodes_tsv(g, w))?;
    out.write_with(&format!("{dir}/edges.tsv"), |w| write_edges_tsv(g, w))?;
    out.write_with(&format!("{dir}/graph.graphml"), |w| write_graphml(g, w))?;
    let stats = GraphStats::compute(g);
    out.write_json(&format!("{dir}/stats.json"), &stats)?;
    for d in GraphStats::distributions(g) {
        out.write_with(&format!("{dir}/distributions/{}.csv", d.quantity), |w| d.write_csv(w))?;
    }
    let profiles = score_profiles(g, bins)?;
    write_grids(&format!("{dir}/profiles"), profiles.grids(), out)?;
    let scores = ScoreDistribution::compute(g, &bins.score);
    out.write_with(&format!("{dir}/score_distribution.csv"), |w| {
        write_score_distributions(&[("words", &scores)], w)
    })?;
    Ok(stats)
}

fn write_grids<'a>(dir: &str, grids: impl IntoIterator<Item = &'a HistogramGrid>, out: &mut OutputTree) -> Result<()> {
    for grid in grids {
        out.write_with(&format!("{dir}/{}.csv", grid.name), |w| grid.write_csv(w))?;
    }
    Ok(())
}

/// One column pair (per word, per occurrence) of bin fractions for each
/// named score distribution; all must share the same axis.
fn write_score_distributions<W: Write>(named: &[(&str, &ScoreDistribution)], mut w: W) -> std::io::Result<()> {
    let mut header = String::from("bin,lo,hi");
    for (name, _) in named {
        header.push_str(&format!(",{name},{name}_weighted"));
    }
    writeln!(w, "{header}")?;
    let axis = &named[0].1.unweighted.axis;
    let columns: Vec<(Vec<f64>, Vec<f64>)> = named
        .iter()
        .map(|(_, d)| (d.unweighted.normalized(), d.weighted.normalized()))
        .collect();
    let edges = axis.edges();
    for i in 0..axis.bins() {
        write!(w, "{i},{},{}", edges[i], edges[i + 1])?;
        for (u, wt) in &columns {
            write!(w, ",{},{}", u[i], wt[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Averaged profiles and ensemble statistics for one null model.
pub fn null_model_stage(
    g: &WeightedGraph,
    kind: NullModelKind,
    seed: u64,
    replicates: u32,
    bins: &ProfileBins,
    out: &mut OutputTree,
) -> Result<EnsembleSummary> {
    let spec = NullModelSpec { kind, seed, replicates };
    let reps = spec.generate_all(g)?;
    let dir = format!("nulls/{}", kind.name());
    let mut mean: Option<Vec<HistogramGrid>> = None;
    let factor = 1.0 / reps.len() as f64;
    for rep in &reps {
        let profiles = score_profiles(&rep.graph, bins)?;
        let acc = mean.get_or_insert_with(|| {
            profiles
                .grids()
                .iter()
                .map(|g| HistogramGrid::new(&g.name, &g.x_label, &g.y_label, g.x.clone(), g.y.clone()))
                .collect()
        });
        for (a, g) in acc.iter_mut().zip(profiles.grids()) {
            a.add_scaled(g, factor)?;
        }
    }
    write_grids(&format!("{dir}/profiles"), mean.iter().flatten(), out)?;
    let summary = ensemble_summary(spec, g, &reps);
    out.write_json(&format!("{dir}/summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackboneSummary {
    pub method: BackboneMethod,
    pub threshold: f64,
    pub stopwords: Vec<String>,
    pub hubless: GraphStats,
    pub removed_nodes: usize,
    pub removed_edges: usize,
    pub backbone: GraphStats,
    pub sweep: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
pub struct BackboneOutput {
    pub hubless: WeightedGraph,
    pub result: BackboneResult,
    pub summary: BackboneSummary,
}

/// Hub removal, edge filtering at the configured threshold and the
/// disparity threshold sweep.
pub fn backbone_stage(
    g: &WeightedGraph,
    stopwords: &BTreeSet<String>,
    settings: &Settings,
    out: &mut OutputTree,
) -> Result<BackboneOutput> {
    let bins = &settings.bins;
    out.write_lines(&format!("{BACKBONE_DIR}/stopwords.txt"), stopwords)?;
    let hubless = remove_hubs(g, stopwords);
    let hubless_stats = GraphStats::compute(&hubless);
    out.write_json(&format!("{BACKBONE_DIR}/hubless_stats.json"), &hubless_stats)?;

    let result = filter_edges(&hubless, settings.backbone, settings.threshold())?;
    let bb_stats = describe_network(&result.graph, BACKBONE_DIR, bins, out)?;
    out.write_with(&format!("{BACKBONE_DIR}/edge_tests.tsv"), |w| {
        writeln!(w, "u\tv\tweight\tstatistic\tkept")?;
        for t in &result.tests {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                hubless.word(t.u),
                hubless.word(t.v),
                t.weight,
                t.statistic,
                t.kept
            )?;
        }
        Ok(())
    })?;

    let mut sweep_rows = Vec::new();
    if !settings.sweep.is_empty() {
        let points = threshold_sweep(&hubless, &settings.sweep, bins)?;
        let original = SweepRow::from_graph(f64::NAN, g);
        let orig_scores = ScoreDistribution::compute(g, &bins.score);
        out.write_with("sweep/sweep.csv", |w| {
            writeln!(w, "{}", SweepRow::CSV_HEADER)?;
            let line = original.csv_line();
            writeln!(w, "original{}", &line[line.find(',').unwrap_or(0)..])?;
            for p in &points {
                writeln!(w, "{}", p.row.csv_line())?;
            }
            Ok(())
        })?;
        for p in &points {
            let dir = format!("sweep/alpha_{}", p.row.alpha);
            out.write_with(&format!("{dir}/score_distribution.csv"), |w| {
                write_score_distributions(&[("orig", &orig_scores), ("bb", &p.scores)], w)
            })?;
            for d in &p.distributions {
                out.write_with(&format!("{dir}/distributions/{}.csv", d.quantity), |w| d.write_csv(w))?;
            }
            out.write_with(&format!("{dir}/score_pairs.csv"), |w| p.score_pairs.write_csv(w))?;
        }
        sweep_rows = points.into_iter().map(|p| p.row).collect();
    }

    let summary = BackboneSummary {
        method: result.method,
        threshold: result.threshold,
        stopwords: stopwords.iter().cloned().collect(),
        hubless: hubless_stats,
        removed_nodes: result.removed_nodes,
        removed_edges: result.removed_edges,
        backbone: bb_stats,
        sweep: sweep_rows,
    };
    out.write_json(&format!("{BACKBONE_DIR}/summary.json"), &summary)?;
    Ok(BackboneOutput {
        hubless,
        result,
        summary,
    })
}

/// Contents of `community/community_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityOverview {
    pub seed: u64,
    pub resolution: f64,
    pub modularity: f64,
    /// Modularity after each aggregation level.
    pub trace: Vec<f64>,
    pub size_floor: usize,
    pub communities: Vec<CommunitySummary>,
    pub other: Option<OtherGroup>,
    pub baselines: Baselines,
    pub control_replicates: u32,
    pub control: Vec<ControlRow>,
}

impl CommunityOverview {
    /// Whether communities at or above the size floor have mean scores on
    /// both sides of neutral.
    pub fn opposing_sentiments(&self) -> bool {
        let means = || {
            self.communities
                .iter()
                .filter(|c| c.above_floor)
                .filter_map(|c| c.mean_h)
        };
        means().any(|h| h > crate::lexicon::NEUTRAL_SCORE) && means().any(|h| h < crate::lexicon::NEUTRAL_SCORE)
    }
}

#[derive(Debug, Clone)]
pub struct CommunityOutput {
    pub partition: Partition,
    pub report: CommunityReport,
    pub control: ShuffledControl,
    pub overview: CommunityOverview,
}

/// Louvain on the backbone, per-community attribution, baselines against
/// the raw network and the shuffled-score control.
pub fn community_stage(
    raw: &WeightedGraph,
    backbone: &WeightedGraph,
    settings: &Settings,
    out: &mut OutputTree,
) -> Result<CommunityOutput> {
    if backbone.node_count() == 0 {
        return Err(Error::InvalidArgument(
            "the backbone is empty; relax the threshold or the hub list".into(),
        ));
    }
    let cfg = LouvainConfig {
        seed: settings.seed,
        resolution: settings.resolution,
    };
    let partition = louvain(backbone, &cfg)?;
    let report = community_report(&partition, backbone, &settings.report)?;
    let baselines = baseline_scores(raw, backbone);
    let control = shuffled_community_control(backbone, &partition, settings.seed, settings.control_replicates)?;

    out.write_with("community/communities.tsv", |w| report.write_tsv(w))?;
    for c in report.panels() {
        out.write_with(&format!("community/wordbars_{}.csv", c.label), |w| {
            report.write_wordbars(c, w)
        })?;
    }
    for grid in community_profiles(&report, &settings.bins) {
        out.write_with(&format!("community/grids/{}.csv", grid.name), |w| grid.write_csv(w))?;
    }
    out.write_with("community/control.csv", |w| control.write_csv(w))?;
    let overview = CommunityOverview {
        seed: partition.seed,
        resolution: partition.resolution,
        modularity: partition.modularity,
        trace: partition.trace.clone(),
        size_floor: settings.report.size_floor,
        communities: report.communities.clone(),
        other: report.other.clone(),
        baselines,
        control_replicates: control.replicates,
        control: control.rows.clone(),
    };
    out.write_json("community/community_summary.json", &overview)?;
    Ok(CommunityOutput {
        partition,
        report,
        control,
        overview,
    })
}
