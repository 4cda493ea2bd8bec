//! Community detection on the backbone and per-community sentiment.

mod louvain;
mod report;

use serde::Serialize;

use crate::graph::WeightedGraph;

pub use louvain::{louvain, LouvainConfig};
pub use report::{
    baseline_scores, community_label, community_profiles, community_report, shuffled_community_control, Baselines,
    CommunityReport, CommunitySummary, ControlRow, OtherGroup, ReportOptions, ShuffledControl, WordRow, DEFAULT_PANELS,
    DEFAULT_SIZE_FLOOR, DEFAULT_TOP_N,
};

/// Disjoint communities covering every node.
///
/// Community ids are canonical: ordered by size (largest first), ties
/// broken by the smallest node index in the community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    assignment: Vec<usize>,
    pub modularity: f64,
    pub resolution: f64,
    pub seed: u64,
    /// Modularity after each aggregation level.
    pub trace: Vec<f64>,
}

impl Partition {
    /// Builds a partition from arbitrary community labels, canonicalizing
    /// ids and computing modularity on `g`.
    pub fn from_labels(g: &WeightedGraph, labels: &[usize], resolution: f64, seed: u64) -> Self {
        let assignment = canonical_labels(labels);
        let modularity = modularity(g, &assignment, resolution);
        Partition {
            assignment,
            modularity,
            resolution,
            seed,
            trace: Vec::new(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn len(&self) -> usize {
        self.assignment.iter().map(|&c| c + 1).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Members of each community in node order, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Relabels communities `0..c` by decreasing size, ties by first member.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut first_seen: Vec<(usize, usize, usize)> = Vec::new(); // (label, size, first node)
    let mut slot = std::collections::HashMap::new();
    for (node, &l) in labels.iter().enumerate() {
        let idx = *slot.entry(l).or_insert_with(|| {
            first_seen.push((l, 0, node));
            first_seen.len() - 1
        });
        first_seen[idx].1 += 1;
    }
    let mut order: Vec<usize> = (0..first_seen.len()).collect();
    order.sort_by(|&a, &b| {
        first_seen[b]
            .1
            .cmp(&first_seen[a].1)
            .then(first_seen[a].2.cmp(&first_seen[b].2))
    });
    let mut new_id = vec![0; first_seen.len()];
    for (rank, &idx) in order.iter().enumerate() {
        new_id[idx] = rank;
    }
    labels.iter().map(|l| new_id[slot[l]]).collect()
}

/// Weighted Newman modularity with resolution `gamma`:
/// `Q = sum_c [ L_c / m - gamma * (S_c / 2m)^2 ]`, where `L_c` is the weight
/// inside community `c`, `S_c` its total strength and `m` the total weight.
/// Zero for graphs without edges.
pub fn modularity(g: &WeightedGraph, assignment: &[usize], gamma: f64) -> f64 {
    let m = g.total_weight() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let c = assignment.iter().map(|&x| x + 1).max().unwrap_or(0);
    let mut inside = vec![0.0f64; c];
    let mut strength = vec![0.0f64; c];
    for e in g.edges() {
        let (cu, cv) = (assignment[e.u], assignment[e.v]);
        let w = e.weight as f64;
        strength[cu] += w;
        strength[cv] += w;
        if cu == cv {
            inside[cu] += w;
        }
    }
    inside
        .iter()
        .zip(&strength)
        .map(|(l, s)| l / m - gamma * (s / (2.0 * m)) * (s / (2.0 * m)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ordering() {
        assert_eq!(canonical_labels(&[7, 7, 3, 9, 9, 9]), vec![1, 1, 2, 0, 0, 0]);
        assert_eq!(canonical_labels(&[5, 4]), vec![0, 1]);
        assert!(canonical_labels(&[]).is_empty());
    }
}
