use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;

/// Per-node `(degree, strength)`.
pub fn degree_strength(g: &WeightedGraph) -> Vec<(usize, u64)> {
    (0..g.node_count()).map(|i| (g.degree(i), g.strength(i))).collect()
}

/// Connected-component label for every node; labels are assigned in order
/// of each component's lowest node index.
pub fn component_labels(g: &WeightedGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for (j, _) in g.neighbors(i) {
                if label[j] == usize::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// Connected component sizes, largest first.
pub fn components(g: &WeightedGraph) -> Vec<usize> {
    let labels = component_labels(g);
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; count];
    for l in labels {
        sizes[l] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Degree,
    Strength,
    Score,
}

/// Pearson correlation of a node attribute across edge endpoints.
///
/// Each edge contributes both orientations; when `weighted`, each
/// orientation counts with multiplicity equal to the edge weight. For
/// [`Attribute::Score`] only edges whose endpoints are both scored are
/// used. Returns `None` with fewer than two usable edges or zero variance.
pub fn assortativity(g: &WeightedGraph, attribute: Attribute, weighted: bool) -> Option<f64> {
    let value = |i: usize| -> Option<f64> {
        match attribute {
            Attribute::Degree => Some(g.degree(i) as f64),
            Attribute::Strength => Some(g.strength(i) as f64),
            Attribute::Score => g.node(i).score,
        }
    };
    let values: Vec<Option<f64>> = (0..g.node_count()).map(value).collect();

    let mut usable = 0usize;
    let (mut sw, mut sx) = (0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in g.edges() {
        if let (Some(a), Some(b)) = (values[e.u], values[e.v]) {
            let w = if weighted { e.weight as f64 } else { 1.0 };
            usable += 1;
            sw += 2.0 * w;
            sx += w * (a + b);
            lo = lo.min(a.min(b));
            hi = hi.max(a.max(b));
        }
    }
    if usable < 2 || lo == hi {
        return None;
    }
    // Both orientations are present, so the two marginals coincide.
    let mean = sx / sw;
    let (mut cov, mut var) = (0.0f64, 0.0f64);
    for e in g.edges() {
        if let (Some(a), Some(b)) = (values[e.u], values[e.v]) {
            let w = if weighted { e.weight as f64 } else { 1.0 };
            let (da, db) = (a - mean, b - mean);
            cov += 2.0 * w * da * db;
            var += w * (da * da + db * db);
        }
    }
    if var <= 0.0 {
        return None;
    }
    Some((cov / var).clamp(-1.0, 1.0))
}

/// Exact value counts of one integer quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distribution {
    pub quantity: String,
    pub counts: BTreeMap<u64, u64>,
}

impl Distribution {
    pub fn from_values<I: IntoIterator<Item = u64>>(quantity: &str, values: I) -> Self {
        let mut counts = BTreeMap::new();
        for v in values {
            *counts.entry(v).or_insert(0) += 1;
        }
        Distribution {
            quantity: quantity.to_owned(),
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `<quantity>,count,probability` rows in increasing value order.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{},count,probability", self.quantity)?;
        let total = self.total() as f64;
        for (v, c) in &self.counts {
            writeln!(out, "{v},{c},{}", *c as f64 / total)?;
        }
        Ok(())
    }
}

/// The assortativity columns reported per network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssortativityTable {
    pub strength: Option<f64>,
    pub degree: Option<f64>,
    pub score_weighted: Option<f64>,
    pub score_unweighted: Option<f64>,
}

impl AssortativityTable {
    pub fn compute(g: &WeightedGraph) -> Self {
        AssortativityTable {
            strength: assortativity(g, Attribute::Strength, false),
            degree: assortativity(g, Attribute::Degree, false),
            score_weighted: assortativity(g, Attribute::Score, true),
            score_unweighted: assortativity(g, Attribute::Score, false),
        }
    }
}

/// Structural summary of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub component_sizes: Vec<usize>,
    pub assortativity: AssortativityTable,
}

impl GraphStats {
    pub fn compute(g: &WeightedGraph) -> Self {
        GraphStats {
            nodes: g.node_count(),
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            component_sizes: components(g),
            assortativity: AssortativityTable::compute(g),
        }
    }

    /// Distributions of degree, strength, word count, tweet count and edge
    /// weight.
    pub fn distributions(g: &WeightedGraph) -> Vec<Distribution> {
        let ds = degree_strength(g);
        vec![
            Distribution::from_values("degree", ds.iter().map(|&(k, _)| k as u64)),
            Distribution::from_values("strength", ds.iter().map(|&(_, s)| s)),
            Distribution::from_values("word_count", g.nodes().iter().map(|n| n.word_count)),
            Distribution::from_values("tweet_count", g.nodes().iter().map(|n| n.tweet_count)),
            Distribution::from_values("edge_weight", g.edges().iter().map(|e| e.weight)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeInfo;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(usize, usize, u64)]) -> WeightedGraph {
        let nodes = (0..n).map(|i| (format!("n{i}"), NodeInfo::default())).collect();
        WeightedGraph::new(nodes, edges.to_vec()).unwrap()
    }

    #[test]
    fn isolated_and_single_edge() {
        let g = graph(3, &[(0, 1, 5)]);
        assert_eq!(degree_strength(&g), vec![(1, 5), (1, 5), (0, 0)]);
    }

    #[test]
    fn component_sizes() {
        let triangles = graph(6, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]);
        assert_eq!(components(&triangles), vec![3, 3]);
        let path = graph(4, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(components(&path), vec![3, 1]);
        assert!(components(&WeightedGraph::empty()).is_empty());
    }

    #[test]
    fn star_degree_assortativity_is_minus_one() {
        let g = graph(6, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (0, 5, 1)]);
        let r = assortativity(&g, Attribute::Degree, false).unwrap();
        assert!((r + 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn equal_endpoint_scores_are_perfectly_assortative() {
        let g = graph(6, &[(0, 1, 2), (2, 3, 1), (4, 5, 7)]);
        let g = g.with_scores(vec![Some(2.0), Some(2.0), Some(5.0), Some(5.0), Some(8.0), Some(8.0)]);
        for weighted in [false, true] {
            let r = assortativity(&g, Attribute::Score, weighted).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn undefined_cases() {
        let single = graph(2, &[(0, 1, 1)]);
        assert_eq!(assortativity(&single, Attribute::Degree, false), None);
        // regular graph: zero variance
        let cycle = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]);
        assert_eq!(assortativity(&cycle, Attribute::Degree, false), None);
        // unscored endpoints are skipped
        let g = graph(3, &[(0, 1, 1), (1, 2, 1)]).with_scores(vec![Some(1.0), None, Some(2.0)]);
        assert_eq!(assortativity(&g, Attribute::Score, false), None);
    }

    #[test]
    fn weighted_matches_edge_replication() {
        let weighted = graph(5, &[(0, 1, 3), (1, 2, 1), (2, 3, 2), (3, 4, 1), (0, 4, 1)]).with_scores(vec![
            Some(1.0),
            Some(4.0),
            Some(6.5),
            Some(2.0),
            Some(9.0),
        ]);
        // oracle: plain Pearson over the explicit list of ordered pairs, each
        // edge repeated `weight` times
        let mut pairs = Vec::new();
        for e in weighted.edges() {
            for _ in 0..e.weight {
                let (a, b) = (weighted.node(e.u).score.unwrap(), weighted.node(e.v).score.unwrap());
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        let n = pairs.len() as f64;
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let vx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let vy: f64 = pairs.iter().map(|p| (p.1 - my).powi(2)).sum();
        let expected = cov / (vx * vy).sqrt();
        let r = assortativity(&weighted, Attribute::Score, true).unwrap();
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn permuted_scores_center_on_zero() {
        // ring lattice with chords; fixed structure, permuted attribute
        let n = 60;
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n, 1));
            edges.push((i, (i + 7) % n, 2));
        }
        let g = graph(n, &edges);
        let base: Vec<f64> = (0..n).map(|i| 1.0 + 8.0 * i as f64 / n as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut total = 0.0;
        let reps = 400;
        for _ in 0..reps {
            let mut s = base.clone();
            s.shuffle(&mut rng);
            let h = g.with_scores(s.into_iter().map(Some).collect());
            total += assortativity(&h, Attribute::Score, false).unwrap();
        }
        let mean = total / reps as f64;
        // per-sample sd is about 1/sqrt(2n) edges ~ 0.09; mean of 400 has sd ~ 0.005
        assert!(mean.abs() < 0.03, "{mean}");
    }
}
