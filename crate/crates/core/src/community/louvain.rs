//! Louvain modularity optimization (Blondel et al. 2008).
//!
//! Visit and neighbor order come from per-word random keys derived from the
//! seed, so the result depends on the words and the seed but not on node
//! indices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{modularity, Partition};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::{stage_rng, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub seed: u64,
    pub resolution: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            seed: 1,
            resolution: 1.0,
        }
    }
}

// Moves must beat the incumbent by this much; avoids endless swaps between
// communities whose gains differ only by rounding.
const GAIN_EPS: f64 = 1e-12;
const MAX_PASSES: usize = 1000;

fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

struct Level {
    // neighbor lists sorted by neighbor key, self-loops excluded
    adj: Vec<Vec<(usize, f64)>>,
    // diagonal entry A_ii (twice the weight internal to the super-node)
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    key: Vec<(u64, usize)>,
}

impl Level {
    fn from_graph(g: &WeightedGraph, keys: &[(u64, usize)]) -> Self {
        let n = g.node_count();
        let mut adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| g.neighbors(i).map(|(j, w)| (j, w as f64)).collect())
            .collect();
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| keys[j]);
        }
        let degree = (0..n).map(|i| g.strength(i) as f64).collect();
        Level {
            adj,
            self_loop: vec![0.0; n],
            degree,
            key: keys.to_vec(),
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Greedy local moving; returns community per node and whether anything
    /// moved.
    fn local_moves(&self, gamma: f64, m2: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| self.key[i]);

        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in &order {
                let ki = self.degree[i];
                let own = community[i];
                for &(j, w) in &self.adj[i] {
                    let c = community[j];
                    if link[c] == 0.0 && !touched.contains(&c) {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                total[own] -= ki;
                let gain = |c: usize, link_c: f64| link_c - gamma * total[c] * ki / m2;
                let mut best = own;
                let mut best_gain = gain(own, link[own]);
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                if best != own {
                    community[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                link[own] = 0.0;
                touched.clear();
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (community, any_move)
    }

    /// Collapses communities into super-nodes. Returns the new level and the
    /// dense community index of every node of this level.
    fn aggregate(&self, community: &[usize]) -> (Level, Vec<usize>) {
        // number communities by their smallest member key
        let mut reps: Vec<(u64, usize, usize)> = Vec::new(); // (key, tie, community)
        let mut best_key: std::collections::BTreeMap<usize, (u64, usize)> = std::collections::BTreeMap::new();
        for (i, &c) in community.iter().enumerate() {
            let k = self.key[i];
            best_key.entry(c).and_modify(|cur| *cur = (*cur).min(k)).or_insert(k);
        }
        for (&c, &(k, t)) in &best_key {
            reps.push((k, t, c));
        }
        reps.sort_unstable();
        let mut dense = vec![usize::MAX; self.len()];
        for (new, &(_, _, c)) in reps.iter().enumerate() {
            dense[c] = new;
        }
        let node_dense: Vec<usize> = community.iter().map(|&c| dense[c]).collect();

        let k = reps.len();
        let mut self_loop = vec![0.0; k];
        let mut degree = vec![0.0; k];
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for i in 0..self.len() {
            let ci = node_dense[i];
            self_loop[ci] += self.self_loop[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let cj = node_dense[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loop[ci] += w;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let key: Vec<(u64, usize)> = reps.iter().map(|&(k, t, _)| (k, t)).collect();
        let adj = maps
            .into_iter()
            .map(|m| {
                let mut list: Vec<(usize, f64)> = m.into_iter().collect();
                list.sort_by_key(|&(j, _)| key[j]);
                list
            })
            .collect();
        (
            Level {
                adj,
                self_loop,
                degree,
                key,
            },
            node_dense,
        )
    }
}

/// Louvain community detection. Graphs without edges yield singleton
/// communities with `Q = 0`.
pub fn louvain(g: &WeightedGraph, cfg: &LouvainConfig) -> Result<Partition> {
    if !(cfg.resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution {} must be positive",
            cfg.resolution
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("Louvain needs a non-empty graph".into()));
    }
    let salt: u64 = stage_rng(cfg.seed, Stage::Louvain, 0).gen();
    let keys: Vec<(u64, usize)> = (0..n).map(|i| (fnv1a(g.word(i).as_bytes(), salt), i)).collect();

    let m2 = 2.0 * g.total_weight() as f64;
    let mut membership: Vec<usize> = (0..n).collect();
    let mut trace = vec![modularity(g, &membership, cfg.resolution)];
    if m2 == 0.0 {
        let mut p = Partition::from_labels(g, &membership, cfg.resolution, cfg.seed);
        p.trace = trace;
        return Ok(p);
    }

    let mut level = Level::from_graph(g, &keys);
    loop {
        let (community, moved) = level.local_moves(cfg.resolution, m2);
        if !moved {
            break;
        }
        let (next, node_dense) = level.aggregate(&community);
        for m in membership.iter_mut() {
            *m = node_dense[*m];
        }
        trace.push(modularity(g, &membership, cfg.resolution));
        let shrunk = next.len() < level.len();
        level = next;
        if !shrunk {
            break;
        }
    }
    let mut p = Partition::from_labels(g, &membership, cfg.resolution, cfg.seed);
    p.trace = trace;
    Ok(p)
}
