//! Score profiles: how word scores distribute over word counts, node
//! strengths, degrees and edges.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::histogram::{BinSpec, HistogramGrid};
use crate::lexicon::{MAX_SCORE, MIN_SCORE, NEUTRAL_SCORE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileBins {
    pub score: BinSpec,
    pub count: BinSpec,
    pub strength: BinSpec,
    pub degree: BinSpec,
}

impl Default for ProfileBins {
    fn default() -> Self {
        let log_axis = || BinSpec::log(1.0, 1e7, 35).expect("valid default bins");
        ProfileBins {
            score: BinSpec::linear(MIN_SCORE, MAX_SCORE, 32).expect("valid default bins"),
            count: log_axis(),
            strength: log_axis(),
            degree: log_axis(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreProfiles {
    /// Score x word count, one unit per word.
    pub count_score: HistogramGrid,
    /// Score x word count, each word weighted by its deviation from neutral.
    pub count_score_delta: HistogramGrid,
    pub strength_score: HistogramGrid,
    pub degree_score: HistogramGrid,
    /// Score pairs of connected nodes weighted by edge weight, symmetrized.
    pub score_pairs: HistogramGrid,
    /// As `score_pairs` with every edge counted once per orientation.
    pub score_pairs_unweighted: HistogramGrid,
    pub scored_nodes: usize,
    pub unscored_nodes: usize,
}

impl ScoreProfiles {
    pub fn grids(&self) -> [&HistogramGrid; 6] {
        [
            &self.count_score,
            &self.count_score_delta,
            &self.strength_score,
            &self.degree_score,
            &self.score_pairs,
            &self.score_pairs_unweighted,
        ]
    }
}

/// Builds all score profiles from a graph whose nodes carry scores.
/// Unscored nodes (and edges touching them) are skipped and counted.
pub fn score_profiles(g: &WeightedGraph, bins: &ProfileBins) -> Result<ScoreProfiles> {
    let grid =
        |name: &str, y_label: &str, y: &BinSpec| HistogramGrid::new(name, "h", y_label, bins.score.clone(), y.clone());
    let mut count_score = grid("count_score", "word_count", &bins.count);
    let mut count_score_delta = grid("count_score_delta", "word_count", &bins.count);
    let mut strength_score = grid("strength_score", "strength", &bins.strength);
    let mut degree_score = grid("degree_score", "degree", &bins.degree);
    let mut score_pairs = grid("score_pairs", "h", &bins.score);
    let mut score_pairs_unweighted = grid("score_pairs_unweighted", "h", &bins.score);

    let scored_total: u64 = g
        .nodes()
        .iter()
        .filter(|n| n.score.is_some())
        .map(|n| n.word_count)
        .sum();
    let mut scored_nodes = 0;
    let mut unscored_nodes = 0;
    for i in 0..g.node_count() {
        let node = g.node(i);
        let Some(h) = node.score else {
            unscored_nodes += 1;
            for grid in [
                &mut count_score,
                &mut count_score_delta,
                &mut strength_score,
                &mut degree_score,
            ] {
                grid.skipped_unscored += 1;
            }
            continue;
        };
        scored_nodes += 1;
        let n = node.word_count as f64;
        count_score.add(h, n, 1.0);
        if scored_total > 0 {
            let delta = (h - NEUTRAL_SCORE) * n / scored_total as f64;
            count_score_delta.add(h, n, delta);
        }
        strength_score.add(h, g.strength(i) as f64, 1.0);
        degree_score.add(h, g.degree(i) as f64, 1.0);
    }

    for e in g.edges() {
        match (g.node(e.u).score, g.node(e.v).score) {
            (Some(a), Some(b)) => {
                let w = e.weight as f64;
                score_pairs.add(a, b, w);
                score_pairs.add(b, a, w);
                score_pairs_unweighted.add(a, b, 1.0);
                score_pairs_unweighted.add(b, a, 1.0);
            }
            _ => {
                score_pairs.skipped_unscored += 1;
                score_pairs_unweighted.skipped_unscored += 1;
            }
        }
    }

    Ok(ScoreProfiles {
        count_score,
        count_score_delta,
        strength_score,
        degree_score,
        score_pairs,
        score_pairs_unweighted,
        scored_nodes,
        unscored_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeInfo;

    fn node(word: &str, n: u64, h: Option<f64>) -> (String, NodeInfo) {
        (
            word.to_string(),
            NodeInfo {
                word_count: n,
                tweet_count: n,
                score: h,
            },
        )
    }

    #[test]
    fn score_pairs_are_symmetrized() {
        let g = WeightedGraph::new(vec![node("u", 2, Some(3.0)), node("v", 2, Some(7.0))], vec![(0, 1, 2)]).unwrap();
        let p = score_profiles(&g, &ProfileBins::default()).unwrap();
        assert_eq!(p.score_pairs.at(3.0, 7.0), Some(2.0));
        assert_eq!(p.score_pairs.at(7.0, 3.0), Some(2.0));
        assert_eq!(p.score_pairs.total(), 4.0);
        assert_eq!(p.score_pairs_unweighted.total(), 2.0);
    }

    #[test]
    fn neutral_corpus_has_zero_deviation() {
        let g = WeightedGraph::new(
            vec![
                node("a", 5, Some(5.0)),
                node("b", 9, Some(5.0)),
                node("c", 1, Some(5.0)),
            ],
            vec![(0, 1, 1), (1, 2, 3)],
        )
        .unwrap();
        let p = score_profiles(&g, &ProfileBins::default()).unwrap();
        assert!(p.count_score_delta.cells().iter().all(|&c| c == 0.0));
        assert_eq!(p.count_score.total(), 3.0);
    }

    #[test]
    fn unscored_are_skipped_and_counted() {
        let g = WeightedGraph::new(
            vec![node("a", 5, Some(8.0)), node("b", 9, None), node("c", 1, Some(2.0))],
            vec![(0, 1, 1), (0, 2, 3)],
        )
        .unwrap();
        let p = score_profiles(&g, &ProfileBins::default()).unwrap();
        assert_eq!(p.unscored_nodes, 1);
        assert_eq!(p.count_score.skipped_unscored, 1);
        assert_eq!(p.score_pairs.skipped_unscored, 1);
        // deviations normalized by scored words only: (3*5 - 3*1) / 6
        let total: f64 = p.count_score_delta.total();
        assert!((total - 2.0).abs() < 1e-12);
    }
}
