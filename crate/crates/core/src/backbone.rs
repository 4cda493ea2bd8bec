//! Two-pass backbone extraction.
//!
//! Pass one removes frequent-word hubs: words that are both common across
//! general-purpose daily frequency lists and among the highest-degree nodes
//! of the network. Pass two removes edges whose weight is compatible with a
//! null model, either the disparity filter (per-node uniform order
//! statistics) or the noise-corrected binomial test. Hub removal always
//! precedes edge filtering.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, Distribution, GraphStats, WeightedGraph};
use crate::histogram::{BinSpec, Histogram1D, HistogramGrid};
use crate::null_models::count_weighted_mean_score;
use crate::profiles::{score_profiles, ProfileBins};

/// Number of highest-degree words a stop word must rank among.
pub const DEFAULT_HUB_RANK: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// One-sided 95% normal quantile, matching `alpha = 0.05`.
pub const DEFAULT_DELTA: f64 = 1.64;

/// Words of the `top_k` highest-degree nodes; ties broken by word.
pub fn top_degree_words(g: &WeightedGraph, top_k: usize) -> Vec<String> {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then_with(|| g.word(a).cmp(g.word(b))));
    order.into_iter().take(top_k).map(|i| g.word(i).to_owned()).collect()
}

/// Intersects the daily lists, drops entries containing anything but
/// letters, folds case, and keeps the words ranked within `top_k` by degree
/// in `g`.
pub fn derive_stopwords(daily_lists: &[Vec<String>], g: &WeightedGraph, top_k: usize) -> BTreeSet<String> {
    let Some((first, rest)) = daily_lists.split_first() else {
        return BTreeSet::new();
    };
    let mut common: BTreeSet<&str> = first.iter().map(String::as_str).collect();
    for list in rest {
        let day: BTreeSet<&str> = list.iter().map(String::as_str).collect();
        common.retain(|w| day.contains(w));
    }
    let cleaned: BTreeSet<String> = common
        .into_iter()
        .filter(|w| !w.is_empty() && w.chars().all(char::is_alphabetic))
        .map(str::to_lowercase)
        .collect();
    let hubs: BTreeSet<String> = top_degree_words(g, top_k).into_iter().collect();
    cleaned.intersection(&hubs).cloned().collect()
}

/// Removes stop words and the nodes their removal isolates.
pub fn remove_hubs(g: &WeightedGraph, stopwords: &BTreeSet<String>) -> WeightedGraph {
    g.remove_words(stopwords)
}

fn pow_int(base: f64, mut exp: u64) -> f64 {
    let (mut acc, mut b) = (1.0, base);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

/// Probability under the disparity null that one of `degree` edges of a node
/// with strength `strength` carries at least `weight`:
/// `(1 - weight / strength)^(degree - 1)`, and 1 for `degree <= 1`.
pub fn disparity_pvalue(weight: u64, strength: u64, degree: usize) -> f64 {
    if degree <= 1 || strength == 0 {
        return 1.0;
    }
    let p = weight as f64 / strength as f64;
    pow_int(1.0 - p, degree as u64 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackboneMethod {
    Disparity,
    #[serde(rename = "nc")]
    NoiseCorrected,
    None,
}

impl std::str::FromStr for BackboneMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disparity" => Ok(BackboneMethod::Disparity),
            "nc" | "noise_corrected" => Ok(BackboneMethod::NoiseCorrected),
            "none" => Ok(BackboneMethod::None),
            other => Err(Error::Config(format!("unknown backbone method `{other}`"))),
        }
    }
}

impl BackboneMethod {
    pub fn name(self) -> &'static str {
        match self {
            BackboneMethod::Disparity => "disparity",
            BackboneMethod::NoiseCorrected => "nc",
            BackboneMethod::None => "none",
        }
    }
}

/// Test statistic of one input edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeTest {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    /// Disparity: smaller endpoint p-value. Noise-corrected: `(w - E) / sd`.
    pub statistic: f64,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackboneResult {
    pub graph: WeightedGraph,
    pub method: BackboneMethod,
    /// `alpha` for the disparity filter, `delta` for the noise-corrected one.
    pub threshold: f64,
    pub removed_nodes: usize,
    pub removed_edges: usize,
    /// One entry per input edge, in input edge order, indexed by input node
    /// ids.
    pub tests: Vec<EdgeTest>,
}

fn finish(g: &WeightedGraph, method: BackboneMethod, threshold: f64, tests: Vec<EdgeTest>) -> BackboneResult {
    let keep_edge: Vec<bool> = tests.iter().map(|t| t.kept).collect();
    let graph = g.subgraph(&vec![true; g.node_count()], &keep_edge, true);
    BackboneResult {
        removed_nodes: g.node_count() - graph.node_count(),
        removed_edges: g.edge_count() - graph.edge_count(),
        graph,
        method,
        threshold,
        tests,
    }
}

/// Keeps an edge when either endpoint finds it significant at `alpha`.
/// `alpha = 1` disables the filter; nodes left isolated are dropped.
pub fn disparity_filter(g: &WeightedGraph, alpha: f64) -> Result<BackboneResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1]")));
    }
    let strengths: Vec<u64> = (0..g.node_count()).map(|i| g.strength(i)).collect();
    let tests = g
        .edges()
        .iter()
        .map(|e| {
            let pu = disparity_pvalue(e.weight, strengths[e.u], g.degree(e.u));
            let pv = disparity_pvalue(e.weight, strengths[e.v], g.degree(e.v));
            let p = pu.min(pv);
            EdgeTest {
                u: e.u,
                v: e.v,
                weight: e.weight,
                statistic: p,
                kept: alpha >= 1.0 || p < alpha,
            }
        })
        .collect();
    Ok(finish(g, BackboneMethod::Disparity, alpha, tests))
}

/// Binomial test of each edge weight against `T` trials with success
/// probability `s_i s_j / T^2`, where `T` is the total edge weight. Keeps
/// edges whose excess over the expectation exceeds `delta` standard
/// deviations.
pub fn noise_corrected_filter(g: &WeightedGraph, delta: f64) -> Result<BackboneResult> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must be non-negative")));
    }
    let total = g.total_weight();
    if total == 0 {
        return Err(Error::InvalidArgument(
            "noise-corrected filter needs a positive total weight".into(),
        ));
    }
    let t = total as f64;
    let strengths: Vec<f64> = (0..g.node_count()).map(|i| g.strength(i) as f64).collect();
    let tests = g
        .edges()
        .iter()
        .map(|e| {
            let p = (strengths[e.u] / t) * (strengths[e.v] / t);
            let expected = t * p;
            let sd = (t * p * (1.0 - p)).max(0.0).sqrt();
            let excess = e.weight as f64 - expected;
            let statistic = if sd > 0.0 {
                excess / sd
            } else if excess > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            EdgeTest {
                u: e.u,
                v: e.v,
                weight: e.weight,
                statistic,
                kept: excess > delta * sd,
            }
        })
        .collect();
    Ok(finish(g, BackboneMethod::NoiseCorrected, delta, tests))
}

/// Runs the edge-filtering pass selected by `method`.
pub fn filter_edges(g: &WeightedGraph, method: BackboneMethod, threshold: f64) -> Result<BackboneResult> {
    match method {
        BackboneMethod::Disparity => disparity_filter(g, threshold),
        BackboneMethod::NoiseCorrected => noise_corrected_filter(g, threshold),
        BackboneMethod::None => Ok(BackboneResult {
            graph: g.clone(),
            method,
            threshold,
            removed_nodes: 0,
            removed_edges: 0,
            tests: Vec::new(),
        }),
    }
}

/// Summary of the backbone at one significance level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    /// Word-count-weighted mean score over scored nodes.
    pub mean_h: Option<f64>,
    pub scored_fraction: Option<f64>,
    pub components: usize,
    pub largest_component: usize,
    pub second_component: usize,
    /// Second-largest over largest component size.
    pub second_ratio: Option<f64>,
}

impl SweepRow {
    pub fn from_graph(alpha: f64, g: &WeightedGraph) -> Self {
        let sizes = components(g);
        let largest = sizes.first().copied().unwrap_or(0);
        let second = sizes.get(1).copied().unwrap_or(0);
        let scored = g.nodes().iter().filter(|n| n.score.is_some()).count();
        SweepRow {
            alpha,
            nodes: g.node_count(),
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            mean_h: count_weighted_mean_score(g),
            scored_fraction: (g.node_count() > 0).then(|| scored as f64 / g.node_count() as f64),
            components: sizes.len(),
            largest_component: largest,
            second_component: second,
            second_ratio: (largest > 0).then(|| second as f64 / largest as f64),
        }
    }

    pub const CSV_HEADER: &'static str =
        "alpha,nodes,edges,total_weight,mean_h,scored_fraction,components,largest_component,second_component,second_ratio";

    pub fn csv_line(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.alpha,
            self.nodes,
            self.edges,
            self.total_weight,
            opt(self.mean_h),
            opt(self.scored_fraction),
            self.components,
            self.largest_component,
            self.second_component,
            opt(self.second_ratio)
        )
    }
}

/// Score histograms of a network: per word and per word occurrence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreDistribution {
    pub unweighted: Histogram1D,
    pub weighted: Histogram1D,
}

impl ScoreDistribution {
    pub fn compute(g: &WeightedGraph, axis: &BinSpec) -> Self {
        let mut unweighted = Histogram1D::new("words", axis.clone());
        let mut weighted = Histogram1D::new("words_weighted", axis.clone());
        for n in g.nodes() {
            if let Some(h) = n.score {
                unweighted.add(h, 1.0);
                weighted.add(h, n.word_count as f64);
            }
        }
        ScoreDistribution { unweighted, weighted }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub row: SweepRow,
    pub graph: WeightedGraph,
    pub scores: ScoreDistribution,
    pub distributions: Vec<Distribution>,
    pub score_pairs: HistogramGrid,
}

/// Applies the disparity filter at every `alpha` to the hub-free graph.
pub fn threshold_sweep(g: &WeightedGraph, alphas: &[f64], bins: &ProfileBins) -> Result<Vec<SweepPoint>> {
    use rayon::prelude::*;
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("empty threshold list".into()));
    }
    alphas
        .par_iter()
        .map(|&alpha| {
            let bb = disparity_filter(g, alpha)?;
            let profiles = score_profiles(&bb.graph, bins)?;
            Ok(SweepPoint {
                row: SweepRow::from_graph(alpha, &bb.graph),
                scores: ScoreDistribution::compute(&bb.graph, &bins.score),
                distributions: GraphStats::distributions(&bb.graph),
                score_pairs: profiles.score_pairs,
                graph: bb.graph,
            })
        })
        .collect()
}
