//! Per-community sentiment attribution.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::histogram::HistogramGrid;
use crate::lexicon::{weighted_mean, NEUTRAL_SCORE};
use crate::null_models::shuffle_scores;
use crate::profiles::ProfileBins;
use crate::rng::{stage_rng, Stage};

/// Communities with fewer nodes are pooled as "other" in the summary.
pub const DEFAULT_SIZE_FLOOR: usize = 15;
pub const DEFAULT_TOP_N: usize = 10;
/// Number of largest communities that get word bars and score grids.
pub const DEFAULT_PANELS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    pub top_n: usize,
    pub size_floor: usize,
    pub panels: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            top_n: DEFAULT_TOP_N,
            size_floor: DEFAULT_SIZE_FLOOR,
            panels: DEFAULT_PANELS,
        }
    }
}

/// Spreadsheet-style label for the community of rank `i`: A..Z, AA, AB, ...
pub fn community_label(i: usize) -> String {
    let mut n = i + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordRow {
    pub word: String,
    pub count: u64,
    pub h: Option<f64>,
    /// `(h - 5) * N_w / N_C` with `N_C` the community's scored word count.
    pub h_delta: Option<f64>,
    /// `N_w` over the total word count of the whole backbone.
    pub rel_freq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunitySummary {
    pub id: usize,
    pub label: String,
    pub size: usize,
    pub total_count: u64,
    pub scored_count: u64,
    pub mean_h: Option<f64>,
    /// Sum of `h_delta` over the community's words.
    pub delta_sum: Option<f64>,
    pub above_floor: bool,
    /// All words, by count descending then alphabetically.
    #[serde(skip, default)]
    pub words: Vec<WordRow>,
}

impl CommunitySummary {
    pub fn top_words(&self, n: usize) -> &[WordRow] {
        &self.words[..n.min(self.words.len())]
    }
}

/// Communities below the size floor, pooled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtherGroup {
    pub communities: usize,
    pub size: usize,
    pub total_count: u64,
    pub mean_h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub seed: u64,
    pub resolution: f64,
    pub modularity: f64,
    pub options: ReportOptions,
    pub backbone_total_count: u64,
    pub communities: Vec<CommunitySummary>,
    pub other: Option<OtherGroup>,
}

fn count_weighted_mean<'a>(g: &WeightedGraph, nodes: impl IntoIterator<Item = &'a usize>) -> Option<f64> {
    weighted_mean(nodes.into_iter().filter_map(|&i| {
        let n = g.node(i);
        n.score.map(|h| (h, n.word_count))
    }))
}

/// Summarizes every community of `p` on `g`, whose nodes carry scores.
pub fn community_report(p: &Partition, g: &WeightedGraph, opts: &ReportOptions) -> Result<CommunityReport> {
    if p.assignment().len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment().len(),
            g.node_count()
        )));
    }
    let backbone_total: u64 = g.nodes().iter().map(|n| n.word_count).sum();
    let mut communities = Vec::new();
    for (id, members) in p.communities().into_iter().enumerate() {
        let total_count: u64 = members.iter().map(|&i| g.node(i).word_count).sum();
        let scored_count: u64 = members
            .iter()
            .filter(|&&i| g.node(i).score.is_some())
            .map(|&i| g.node(i).word_count)
            .sum();
        let mut words: Vec<WordRow> = members
            .iter()
            .map(|&i| {
                let n = g.node(i);
                let h_delta = match n.score {
                    Some(h) if scored_count > 0 => {
                        Some((h - NEUTRAL_SCORE) * n.word_count as f64 / scored_count as f64)
                    }
                    _ => None,
                };
                WordRow {
                    word: g.word(i).to_owned(),
                    count: n.word_count,
                    h: n.score,
                    h_delta,
                    rel_freq: if backbone_total > 0 {
                        n.word_count as f64 / backbone_total as f64
                    } else {
                        0.0
                    },
                }
            })
            .collect();
        words.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.word.cmp(&b.word)));
        let delta_sum = (scored_count > 0).then(|| words.iter().filter_map(|w| w.h_delta).sum());
        communities.push(CommunitySummary {
            id,
            label: community_label(id),
            size: members.len(),
            total_count,
            scored_count,
            mean_h: count_weighted_mean(g, &members),
            delta_sum,
            above_floor: members.len() >= opts.size_floor,
            words,
        });
    }
    let small: Vec<&CommunitySummary> = communities.iter().filter(|c| !c.above_floor).collect();
    let other = (!small.is_empty()).then(|| {
        let members: Vec<usize> = (0..g.node_count())
            .filter(|&i| !communities[p.community_of(i)].above_floor)
            .collect();
        OtherGroup {
            communities: small.len(),
            size: members.len(),
            total_count: small.iter().map(|c| c.total_count).sum(),
            mean_h: count_weighted_mean(g, &members),
        }
    });
    Ok(CommunityReport {
        seed: p.seed,
        resolution: p.resolution,
        modularity: p.modularity,
        options: *opts,
        backbone_total_count: backbone_total,
        communities,
        other,
    })
}

impl CommunityReport {
    pub const TSV_HEADER: &'static str = "word\tcommunity\tN\th\th_delta_comm\trel_freq";
    pub const WORDBARS_HEADER: &'static str = "rank,word,N,h,h_delta_comm,rel_freq";

    /// Communities that get their own word-bar and score-grid panels.
    pub fn panels(&self) -> &[CommunitySummary] {
        &self.communities[..self.options.panels.min(self.communities.len())]
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::TSV_HEADER)?;
        for c in &self.communities {
            for w in &c.words {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    w.word,
                    c.label,
                    w.count,
                    opt(w.h),
                    opt(w.h_delta),
                    w.rel_freq
                )?;
            }
        }
        Ok(())
    }

    pub fn write_wordbars<W: Write>(&self, community: &CommunitySummary, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::WORDBARS_HEADER)?;
        for (rank, w) in community.top_words(self.options.top_n).iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                rank + 1,
                w.word,
                w.count,
                opt(w.h),
                opt(w.h_delta),
                w.rel_freq
            )?;
        }
        Ok(())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Deviation-weighted score x count grid for each panel community, using
/// the community's scored word count as normalizer.
pub fn community_profiles(report: &CommunityReport, bins: &ProfileBins) -> Vec<HistogramGrid> {
    report
        .panels()
        .iter()
        .map(|c| {
            let mut grid = HistogramGrid::new(
                &format!("community_{}_count_score_delta", c.label),
                "h",
                "N",
                bins.score.clone(),
                bins.count.clone(),
            );
            for w in &c.words {
                match (w.h, w.h_delta) {
                    (Some(h), Some(d)) => grid.add(h, w.count as f64, d),
                    _ => grid.skipped_unscored += 1,
                }
            }
            grid
        })
        .collect()
}

/// Reference means drawn as horizontal lines next to community means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub backbone: Option<f64>,
    pub raw: Option<f64>,
    /// Raw network without words scored strictly between 4 and 6.
    pub raw_polar: Option<f64>,
}

pub fn baseline_scores(raw: &WeightedGraph, backbone: &WeightedGraph) -> Baselines {
    let all = |g: &WeightedGraph| count_weighted_mean(g, &(0..g.node_count()).collect::<Vec<_>>());
    let polar: Vec<usize> = (0..raw.node_count())
        .filter(|&i| !matches!(raw.node(i).score, Some(h) if h > 4.0 && h < 6.0))
        .collect();
    Baselines {
        backbone: all(backbone),
        raw: all(raw),
        raw_polar: count_weighted_mean(raw, &polar),
    }
}

/// Envelope of one community's mean under score shuffling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlRow {
    pub label: String,
    pub size: usize,
    pub total_count: u64,
    pub observed: Option<f64>,
    pub shuffled_mean: Option<f64>,
    pub shuffled_sd: Option<f64>,
    pub q025: Option<f64>,
    pub q975: Option<f64>,
    /// Observed mean lies outside `[q025, q975]`.
    pub outside_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffledControl {
    pub seed: u64,
    pub replicates: u32,
    pub rows: Vec<ControlRow>,
    /// Whole-graph mean per replicate.
    pub global_means: Vec<Option<f64>>,
    /// `community_means[c][r]`: mean of community `c` in replicate `r`.
    #[serde(skip)]
    pub community_means: Vec<Vec<Option<f64>>>,
}

impl ShuffledControl {
    pub const CSV_HEADER: &'static str =
        "community,size,total_count,observed,shuffled_mean,shuffled_sd,q025,q975,outside_envelope";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.label,
                r.size,
                r.total_count,
                opt(r.observed),
                opt(r.shuffled_mean),
                opt(r.shuffled_sd),
                opt(r.q025),
                opt(r.q975),
                r.outside_envelope
            )?;
        }
        Ok(())
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Holds the partition fixed and shuffles scores among the nodes of `g`,
/// recording each community's count-weighted mean per replicate.
pub fn shuffled_community_control(
    g: &WeightedGraph,
    p: &Partition,
    seed: u64,
    replicates: u32,
) -> Result<ShuffledControl> {
    if replicates == 0 {
        return Err(Error::Config("shuffled control needs at least one replicate".into()));
    }
    if p.assignment().len() != g.node_count() {
        return Err(Error::InvalidArgument("partition does not cover the graph".into()));
    }
    let communities = p.communities();
    let all: Vec<usize> = (0..g.node_count()).collect();
    let per_rep: Vec<(Option<f64>, Vec<Option<f64>>)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stage_rng(seed, Stage::CommunityControl, r);
            let shuffled = shuffle_scores(g, &mut rng);
            let means = communities.iter().map(|m| count_weighted_mean(&shuffled, m)).collect();
            (count_weighted_mean(&shuffled, &all), means)
        })
        .collect();
    let global_means = per_rep.iter().map(|(gm, _)| *gm).collect();
    let community_means: Vec<Vec<Option<f64>>> = (0..communities.len())
        .map(|c| per_rep.iter().map(|(_, m)| m[c]).collect())
        .collect();

    let rows = communities
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let observed = count_weighted_mean(g, members);
            let mut vals: Vec<f64> = community_means[c].iter().flatten().copied().collect();
            vals.sort_by(f64::total_cmp);
            let (mean, sd, q025, q975) = if vals.is_empty() {
                (None, None, None, None)
            } else {
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let sd = if vals.len() > 1 {
                    (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                (
                    Some(mean),
                    Some(sd),
                    Some(quantile(&vals, 0.025)),
                    Some(quantile(&vals, 0.975)),
                )
            };
            let outside_envelope = match (observed, q025, q975) {
                (Some(o), Some(lo), Some(hi)) => o < lo || o > hi,
                _ => false,
            };
            ControlRow {
                label: community_label(c),
                size: members.len(),
                total_count: members.iter().map(|&i| g.node(i).word_count).sum(),
                observed,
                shuffled_mean: mean,
                shuffled_sd: sd,
                q025,
                q975,
                outside_envelope,
            }
        })
        .collect();
    Ok(ShuffledControl {
        seed,
        replicates,
        rows,
        global_means,
        community_means,
    })
}
