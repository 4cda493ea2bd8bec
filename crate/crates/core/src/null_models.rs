//! Reference models that randomize either the network structure or the
//! node scores while keeping the other fixed.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphStats, WeightedGraph};
use crate::lexicon::{weighted_mean, MAX_SCORE, MIN_SCORE};
use crate::rng::{stage_rng, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NullModelKind {
    #[serde(rename = "config")]
    Configuration,
    #[serde(rename = "er")]
    ErdosRenyi,
    #[serde(rename = "shuffle")]
    ShuffledScores,
    #[serde(rename = "uniform")]
    UniformScores,
}

impl NullModelKind {
    pub const ALL: [NullModelKind; 4] = [
        NullModelKind::Configuration,
        NullModelKind::ErdosRenyi,
        NullModelKind::ShuffledScores,
        NullModelKind::UniformScores,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NullModelKind::Configuration => "config",
            NullModelKind::ErdosRenyi => "er",
            NullModelKind::ShuffledScores => "shuffle",
            NullModelKind::UniformScores => "uniform",
        }
    }

    fn stage(self) -> Stage {
        match self {
            NullModelKind::Configuration => Stage::ConfigurationModel,
            NullModelKind::ErdosRenyi => Stage::ErdosRenyi,
            NullModelKind::ShuffledScores => Stage::ShuffledScores,
            NullModelKind::UniformScores => Stage::UniformScores,
        }
    }
}

impl std::str::FromStr for NullModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NullModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown null model `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullModelSpec {
    pub kind: NullModelKind,
    pub seed: u64,
    pub replicates: u32,
}

/// What the configuration model had to discard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RewireInfo {
    pub self_loops_discarded: u64,
    /// Node that lost a stub because the total stub count was odd.
    pub dropped_stub: Option<usize>,
}

/// Rewires the graph preserving each node's strength in expectation: every
/// node gets one stub per unit of strength, stubs are matched uniformly at
/// random, self-loops are discarded and parallel matches merge into a
/// weighted edge. Nodes and their attributes are unchanged.
pub fn configuration_model<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<(WeightedGraph, RewireInfo)> {
    let mut stubs: Vec<usize> = Vec::with_capacity(2 * g.total_weight() as usize);
    for i in 0..g.node_count() {
        stubs.extend(std::iter::repeat_n(i, g.strength(i) as usize));
    }
    let mut info = RewireInfo::default();
    if stubs.len() % 2 == 1 {
        drop_one_stub(&mut stubs, rng, &mut info);
    }
    stubs.shuffle(rng);

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            info.self_loops_discarded += 1;
        } else {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    pairs.sort_unstable();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for (u, v) in pairs {
        match edges.last_mut() {
            Some(last) if (last.0, last.1) == (u, v) => last.2 += 1,
            _ => edges.push((u, v, 1)),
        }
    }
    Ok((g.with_edges(edges)?, info))
}

fn drop_one_stub<R: Rng + ?Sized>(stubs: &mut Vec<usize>, rng: &mut R, info: &mut RewireInfo) {
    // stubs are grouped by node, so distinct nodes are runs
    let mut owners: Vec<usize> = stubs.clone();
    owners.dedup();
    let node = owners[rng.gen_range(0..owners.len())];
    let pos = stubs.iter().position(|&s| s == node).expect("node owns a stub");
    stubs.remove(pos);
    info.dropped_stub = Some(node);
}

/// Erdős–Rényi graph on the same nodes with edge probability
/// `E_obs / E_max`; each edge weight is drawn with replacement from the
/// observed weights.
pub fn erdos_renyi_model<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<WeightedGraph> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "Erdős–Rényi model needs at least two nodes".into(),
        ));
    }
    let max_edges = n as f64 * (n as f64 - 1.0) / 2.0;
    let p = g.edge_count() as f64 / max_edges;
    let weights: Vec<u64> = g.edges().iter().map(|e| e.weight).collect();
    let mut edges = Vec::new();
    if p > 0.0 {
        // one Bernoulli draw per pair; gen_bool uses integer thresholds, so
        // the output does not depend on the platform's libm
        for v in 1..n {
            for u in 0..v {
                if rng.gen_bool(p) {
                    let weight = weights[rng.gen_range(0..weights.len())];
                    edges.push((u, v, weight));
                }
            }
        }
    }
    g.with_edges(edges)
}

/// Permutes the node scores (missing-score markers included) uniformly.
pub fn shuffle_scores<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> WeightedGraph {
    let mut scores = g.scores();
    scores.shuffle(rng);
    g.with_scores(scores)
}

/// Replaces every node's score with an independent draw from U[1, 9].
pub fn uniform_scores<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> WeightedGraph {
    let scores = (0..g.node_count())
        .map(|_| Some(rng.gen_range(MIN_SCORE..=MAX_SCORE)))
        .collect();
    g.with_scores(scores)
}

#[derive(Debug, Clone)]
pub struct NullReplicate {
    pub replicate: u32,
    pub graph: WeightedGraph,
    pub rewire: Option<RewireInfo>,
}

impl NullModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("null model needs at least one replicate".into()));
        }
        Ok(())
    }

    /// Generates one replicate from its own `(seed, kind, replicate)` stream.
    pub fn generate(&self, g: &WeightedGraph, replicate: u32) -> Result<NullReplicate> {
        let mut rng = stage_rng(self.seed, self.kind.stage(), replicate);
        let (graph, rewire) = match self.kind {
            NullModelKind::Configuration => {
                let (graph, info) = configuration_model(g, &mut rng)?;
                (graph, Some(info))
            }
            NullModelKind::ErdosRenyi => (erdos_renyi_model(g, &mut rng)?, None),
            NullModelKind::ShuffledScores => (shuffle_scores(g, &mut rng), None),
            NullModelKind::UniformScores => (uniform_scores(g, &mut rng), None),
        };
        Ok(NullReplicate {
            replicate,
            graph,
            rewire,
        })
    }

    pub fn generate_all(&self, g: &WeightedGraph) -> Result<Vec<NullReplicate>> {
        use rayon::prelude::*;
        self.validate()?;
        (0..self.replicates)
            .into_par_iter()
            .map(|r| self.generate(g, r))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub replicate: u32,
    pub stats: GraphStats,
    pub mean_score: Option<f64>,
    pub rewire: Option<RewireInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub spec: NullModelSpec,
    pub rng: &'static str,
    pub observed: GraphStats,
    pub replicates: Vec<ReplicateSummary>,
    pub mean_edges: f64,
    pub mean_total_weight: f64,
}

pub fn count_weighted_mean_score(g: &WeightedGraph) -> Option<f64> {
    weighted_mean(g.nodes().iter().filter_map(|n| n.score.map(|h| (h, n.word_count))))
}

pub fn ensemble_summary(spec: NullModelSpec, observed: &WeightedGraph, reps: &[NullReplicate]) -> EnsembleSummary {
    let replicates: Vec<ReplicateSummary> = reps
        .iter()
        .map(|r| ReplicateSummary {
            replicate: r.replicate,
            stats: GraphStats::compute(&r.graph),
            mean_score: count_weighted_mean_score(&r.graph),
            rewire: r.rewire,
        })
        .collect();
    let k = replicates.len().max(1) as f64;
    EnsembleSummary {
        spec,
        rng: crate::rng::RNG_ALGORITHM,
        observed: GraphStats::compute(observed),
        mean_edges: replicates.iter().map(|r| r.stats.edges as f64).sum::<f64>() / k,
        mean_total_weight: replicates.iter().map(|r| r.stats.total_weight as f64).sum::<f64>() / k,
        replicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeInfo;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(usize, usize, u64)], scores: &[Option<f64>]) -> WeightedGraph {
        let nodes = (0..n)
            .map(|i| {
                (
                    format!("w{i}"),
                    NodeInfo {
                        word_count: i as u64 + 1,
                        tweet_count: 1,
                        score: scores.get(i).copied().flatten(),
                    },
                )
            })
            .collect();
        WeightedGraph::new(nodes, edges.to_vec()).unwrap()
    }

    #[test]
    fn single_edge_rewiring_enumeration() {
        // stubs a,a,a,a,b,b,b,b: with k aa-pairs there are k bb-pairs and
        // 4 - 2k ab-pairs, so weight + discarded self-loops = 4
        let g = graph(2, &[(0, 1, 4)], &[]);
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (r, info) = configuration_model(&g, &mut rng).unwrap();
            assert_eq!(r.words(), g.words());
            let w = r.weight("w0", "w1");
            assert!(w <= 4 && w % 2 == 0, "{w}");
            assert_eq!(w + info.self_loops_discarded, 4);
        }
    }

    #[test]
    fn empty_graph_rewires_to_empty() {
        let g = WeightedGraph::empty();
        let (r, _) = configuration_model(&g, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn odd_stub_count_drops_one() {
        let mut stubs = vec![0, 0, 1, 2, 2];
        let mut info = RewireInfo::default();
        drop_one_stub(&mut stubs, &mut ChaCha8Rng::seed_from_u64(3), &mut info);
        assert_eq!(stubs.len(), 4);
        assert!(info.dropped_stub.is_some());
    }

    #[test]
    fn er_extremes() {
        let complete = graph(
            4,
            &[(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 2, 1), (1, 3, 5), (2, 3, 1)],
            &[],
        );
        let r = erdos_renyi_model(&complete, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(r.edge_count(), 6);
        let allowed = [1, 2, 3, 5];
        assert!(r.edges().iter().all(|e| allowed.contains(&e.weight)));

        let none = graph(4, &[], &[]);
        assert_eq!(
            erdos_renyi_model(&none, &mut ChaCha8Rng::seed_from_u64(9))
                .unwrap()
                .edge_count(),
            0
        );
        assert!(erdos_renyi_model(&graph(1, &[], &[]), &mut ChaCha8Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn shuffle_preserves_multiset() {
        let scores = [Some(3.0), None, Some(7.5), Some(1.0), Some(3.0)];
        let g = graph(5, &[(0, 1, 1), (2, 3, 2)], &scores);
        let s = shuffle_scores(&g, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(s.edges(), g.edges());
        let key = |v: Vec<Option<f64>>| {
            let mut v: Vec<String> = v.into_iter().map(|x| format!("{x:?}")).collect();
            v.sort();
            v
        };
        assert_eq!(key(s.scores()), key(g.scores()));

        let flat = graph(3, &[(0, 1, 1)], &[Some(4.0), Some(4.0), Some(4.0)]);
        assert_eq!(shuffle_scores(&flat, &mut ChaCha8Rng::seed_from_u64(4)), flat);
    }

    #[test]
    fn two_node_shuffle_hits_both_permutations() {
        let g = graph(2, &[(0, 1, 1)], &[Some(3.0), Some(7.0)]);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let s = shuffle_scores(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            seen.insert(s.node(0).score.unwrap() as i64);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![3, 7]);
    }

    #[test]
    fn uniform_scores_in_range_and_reproducible() {
        let g = graph(20_000, &[], &[]);
        let a = uniform_scores(&g, &mut ChaCha8Rng::seed_from_u64(5));
        let b = uniform_scores(&g, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.scores(), b.scores());
        let s: Vec<f64> = a.scores().into_iter().map(Option::unwrap).collect();
        assert!(s.iter().all(|&h| (1.0..=9.0).contains(&h)));
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let bound = 3.0 * (8.0 / 12f64.sqrt()) / n.sqrt();
        assert!((mean - 5.0).abs() < bound, "{mean}");
    }

    #[test]
    fn spec_generation_is_deterministic() {
        let g = graph(
            6,
            &[(0, 1, 3), (1, 2, 1), (2, 3, 2), (3, 4, 1), (4, 5, 4), (0, 5, 1)],
            &[],
        );
        for kind in NullModelKind::ALL {
            let spec = NullModelSpec {
                kind,
                seed: 17,
                replicates: 3,
            };
            let a = spec.generate_all(&g).unwrap();
            let b = spec.generate_all(&g).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.graph, y.graph);
            }
            assert_eq!("config".parse::<NullModelKind>().unwrap(), NullModelKind::Configuration);
        }
    }
}
