//! Undirected weighted word co-occurrence graph.
//!
//! Nodes are words; the weight of edge `{u, v}` is the number of documents
//! containing both words. Node indices are stable for the lifetime of a
//! graph and graphs built from a corpus order their nodes by word.

mod io;
mod stats;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

pub use io::{read_graph, write_edges_tsv, write_graphml, write_nodes_tsv};
pub use stats::{
    assortativity, component_labels, components, degree_strength, AssortativityTable, Attribute, Distribution,
    GraphStats,
};

/// Per-node attributes carried through every transformation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeInfo {
    pub word_count: u64,
    pub tweet_count: u64,
    pub score: Option<f64>,
}

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    words: Vec<String>,
    nodes: Vec<NodeInfo>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    // (neighbor, edge index), sorted by neighbor
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds a graph from a node table and `(u, v, weight)` triples.
    ///
    /// Edges may be given in either orientation but each unordered pair at
    /// most once; self-loops and zero weights are rejected.
    pub fn new(nodes: Vec<(String, NodeInfo)>, edges: Vec<(usize, usize, u64)>) -> Result<Self> {
        let n = nodes.len();
        let mut words = Vec::with_capacity(n);
        let mut infos = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for (i, (word, info)) in nodes.into_iter().enumerate() {
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate node `{word}`")));
            }
            words.push(word);
            infos.push(info);
        }
        let mut canon = Vec::with_capacity(edges.len());
        for (a, b, weight) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on `{}`", words[a])));
            }
            if weight == 0 {
                return Err(Error::InvalidArgument("zero edge weight".into()));
            }
            canon.push(Edge {
                u: a.min(b),
                v: a.max(b),
                weight,
            });
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::InvalidArgument(format!(
                "duplicate edge `{}`-`{}`",
                words[w[0].u], words[w[0].v]
            )));
        }
        Ok(Self::from_sorted(words, infos, index, canon))
    }

    fn from_sorted(words: Vec<String>, nodes: Vec<NodeInfo>, index: HashMap<String, usize>, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); words.len()];
        for (e_idx, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, e_idx));
            adjacency[e.v].push((e.u, e_idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        WeightedGraph {
            words,
            nodes,
            index,
            edges,
            adjacency,
        }
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new(), Vec::new(), HashMap::new(), Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn node(&self, i: usize) -> &NodeInfo {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adjacency[i].iter().map(move |&(j, e)| (j, self.edges[e].weight))
    }

    /// Neighbors with the index of the connecting edge.
    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn strength(&self, i: usize) -> u64 {
        self.neighbors(i).map(|(_, w)| w).sum()
    }

    pub fn weight_between(&self, i: usize, j: usize) -> u64 {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(n, _)| n)
            .map(|pos| self.edges[self.adjacency[i][pos].1].weight)
            .unwrap_or(0)
    }

    /// Weight of the edge between two words, 0 when absent.
    pub fn weight(&self, a: &str, b: &str) -> u64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.weight_between(i, j),
            _ => 0,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn scores(&self) -> Vec<Option<f64>> {
        self.nodes.iter().map(|n| n.score).collect()
    }

    /// Same graph with node scores replaced.
    pub fn with_scores(&self, scores: Vec<Option<f64>>) -> Self {
        assert_eq!(scores.len(), self.node_count(), "one score per node");
        let mut out = self.clone();
        for (node, score) in out.nodes.iter_mut().zip(scores) {
            node.score = score;
        }
        out
    }

    /// Scores every node from the lexicon; unknown words get no score.
    pub fn attach_scores(&self, lexicon: &Lexicon) -> Self {
        let scores = self.words.iter().map(|w| lexicon.score_of(w)).collect();
        self.with_scores(scores)
    }

    /// Same node set with a new edge list.
    pub fn with_edges(&self, edges: Vec<(usize, usize, u64)>) -> Result<Self> {
        let nodes = self.words.iter().cloned().zip(self.nodes.iter().copied()).collect();
        WeightedGraph::new(nodes, edges)
    }

    /// Keeps the selected nodes and edges; an edge survives only when both
    /// endpoints do. With `drop_isolated`, nodes left without edges are
    /// removed as well. Node order is preserved.
    pub fn subgraph(&self, keep_node: &[bool], keep_edge: &[bool], drop_isolated: bool) -> Self {
        assert_eq!(keep_node.len(), self.node_count());
        assert_eq!(keep_edge.len(), self.edge_count());
        let kept_edges: Vec<&Edge> = self
            .edges
            .iter()
            .zip(keep_edge)
            .filter(|(e, &k)| k && keep_node[e.u] && keep_node[e.v])
            .map(|(e, _)| e)
            .collect();
        let mut node_mask = keep_node.to_vec();
        if drop_isolated {
            let mut touched = vec![false; self.node_count()];
            for e in &kept_edges {
                touched[e.u] = true;
                touched[e.v] = true;
            }
            for (keep, t) in node_mask.iter_mut().zip(touched) {
                *keep &= t;
            }
        }
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut words = Vec::new();
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        for (i, _) in node_mask.iter().enumerate().filter(|(_, &k)| k) {
            remap[i] = words.len();
            index.insert(self.words[i].clone(), words.len());
            words.push(self.words[i].clone());
            nodes.push(self.nodes[i]);
        }
        // remap is monotone, so the edge order stays sorted
        let edges = kept_edges
            .into_iter()
            .map(|e| Edge {
                u: remap[e.u],
                v: remap[e.v],
                weight: e.weight,
            })
            .collect();
        Self::from_sorted(words, nodes, index, edges)
    }

    /// Removes the listed words with their incident edges, then any node
    /// left isolated by the removal. Nodes that had no edges to begin with
    /// are kept.
    pub fn remove_words(&self, words: &BTreeSet<String>) -> Self {
        let removed: Vec<bool> = self.words.iter().map(|w| words.contains(w)).collect();
        let keep_node: Vec<bool> = (0..self.node_count())
            .map(|i| !removed[i] && (self.degree(i) == 0 || self.adjacency[i].iter().any(|&(j, _)| !removed[j])))
            .collect();
        self.subgraph(&keep_node, &vec![true; self.edge_count()], false)
    }
}

/// Builds the co-occurrence graph: every unordered pair of distinct words in
/// a document adds 1 to that pair's edge weight.
pub fn build_graph(corpus: &Corpus) -> WeightedGraph {
    let mut nodes = Vec::with_capacity(corpus.tweet_counts().len());
    let mut index = HashMap::with_capacity(corpus.tweet_counts().len());
    for (i, (word, &tweet_count)) in corpus.tweet_counts().iter().enumerate() {
        index.insert(word.clone(), i);
        nodes.push(NodeInfo {
            word_count: corpus.word_count(word),
            tweet_count,
            score: None,
        });
    }

    let pair_counts = corpus
        .documents()
        .par_iter()
        .fold(HashMap::<(usize, usize), u64>::new, |mut acc, doc| {
            // unique_tokens iterate in word order, which is index order
            let ids: Vec<usize> = doc.unique_tokens.iter().map(|t| index[t]).collect();
            for (a, &u) in ids.iter().enumerate() {
                for &v in &ids[a + 1..] {
                    *acc.entry((u, v)).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            let (mut big, small) = if a.len() >= b.len() {
                (a, b)
            } else {
                (b, std::mem::take(&mut a))
            };
            for (k, w) in small {
                *big.entry(k).or_insert(0) += w;
            }
            big
        });

    let mut edges: Vec<Edge> = pair_counts
        .into_iter()
        .map(|((u, v), weight)| Edge { u, v, weight })
        .collect();
    edges.sort_unstable();
    let words = corpus.tweet_counts().keys().cloned().collect();
    WeightedGraph::from_sorted(words, nodes, index, edges)
}
