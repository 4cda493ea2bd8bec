use std::io::Write;

use serde::Serialize;

use super::RunSummary;
use crate::community::Baselines;
use crate::error::{Error, Result};

/// One corpus in a comparison; `delta_*` fields are relative to the first
/// run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub documents: usize,
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub backbone_nodes: usize,
    pub backbone_edges: usize,
    pub communities: usize,
    pub baselines: Baselines,
    /// Range of community means over communities at or above the size floor.
    pub community_min: Option<f64>,
    pub community_max: Option<f64>,
    /// Communities at or above the floor sit on both sides of neutral.
    pub opposing_sentiments: bool,
    pub delta_nodes: i64,
    pub delta_edges: i64,
    pub delta_backbone_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<CorpusRow>,
}

/// Side-by-side statistics of at least two runs made with the same bins.
pub fn compare_corpora(runs: &[(String, RunSummary)]) -> Result<Comparison> {
    if runs.len() < 2 {
        return Err(Error::Config(format!(
            "comparison needs at least two runs, got {}",
            runs.len()
        )));
    }
    let (first_name, first) = &runs[0];
    for (name, run) in &runs[1..] {
        if run.settings.bins != first.settings.bins {
            return Err(Error::Config(format!(
                "runs `{first_name}` and `{name}` use different histogram bins"
            )));
        }
    }
    let rows = runs
        .iter()
        .map(|(name, run)| {
            let c = &run.community;
            let means = || c.communities.iter().filter(|x| x.above_floor).filter_map(|x| x.mean_h);
            let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
            CorpusRow {
                name: name.clone(),
                documents: run.corpus.documents,
                nodes: run.network.nodes,
                edges: run.network.edges,
                total_weight: run.network.total_weight,
                backbone_nodes: run.backbone.backbone.nodes,
                backbone_edges: run.backbone.backbone.edges,
                communities: c.communities.len(),
                baselines: c.baselines,
                community_min: means().reduce(f64::min),
                community_max: means().reduce(f64::max),
                opposing_sentiments: c.opposing_sentiments(),
                delta_nodes: run.network.nodes as i64 - first.network.nodes as i64,
                delta_edges: run.network.edges as i64 - first.network.edges as i64,
                delta_backbone_mean: diff(c.baselines.backbone, first.community.baselines.backbone),
            }
        })
        .collect();
    Ok(Comparison { rows })
}

impl Comparison {
    pub const CSV_HEADER: &'static str = "corpus,documents,nodes,edges,total_weight,backbone_nodes,backbone_edges,communities,baseline_backbone,baseline_raw,baseline_raw_polar,community_min,community_max,opposing_sentiments,delta_nodes,delta_edges,delta_backbone_mean";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.name,
                r.documents,
                r.nodes,
                r.edges,
                r.total_weight,
                r.backbone_nodes,
                r.backbone_edges,
                r.communities,
                opt(r.baselines.backbone),
                opt(r.baselines.raw),
                opt(r.baselines.raw_polar),
                opt(r.community_min),
                opt(r.community_max),
                r.opposing_sentiments,
                r.delta_nodes,
                r.delta_edges,
                opt(r.delta_backbone_mean)
            )?;
        }
        Ok(())
    }
}
