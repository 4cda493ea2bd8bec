//! Edge list, node table and GraphML serialization.

use std::io::{Read, Write};

use super::{NodeInfo, WeightedGraph};
use crate::error::{Error, Result};

pub const NODES_HEADER: &str = "word\tN\ttweet_count\tdegree\tstrength\th";
pub const EDGES_HEADER: &str = "u\tv\tweight";

fn fmt_score(score: Option<f64>) -> String {
    score.map(|h| h.to_string()).unwrap_or_default()
}

/// `word, N, tweet_count, degree, strength, h` with an empty `h` for
/// unscored words. Rows follow node order.
pub fn write_nodes_tsv<W: Write>(g: &WeightedGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{NODES_HEADER}")?;
    for i in 0..g.node_count() {
        let n = g.node(i);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            g.word(i),
            n.word_count,
            n.tweet_count,
            g.degree(i),
            g.strength(i),
            fmt_score(n.score)
        )?;
    }
    Ok(())
}

pub fn write_edges_tsv<W: Write>(g: &WeightedGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{EDGES_HEADER}")?;
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", g.word(e.u), g.word(e.v), e.weight)?;
    }
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn write_graphml<W: Write>(g: &WeightedGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(out, r#"  <key id="N" for="node" attr.name="N" attr.type="long"/>"#)?;
    writeln!(
        out,
        r#"  <key id="tweet_count" for="node" attr.name="tweet_count" attr.type="long"/>"#
    )?;
    writeln!(out, r#"  <key id="h" for="node" attr.name="h" attr.type="double"/>"#)?;
    writeln!(
        out,
        r#"  <key id="weight" for="edge" attr.name="weight" attr.type="long"/>"#
    )?;
    writeln!(out, r#"  <graph id="G" edgedefault="undirected">"#)?;
    for i in 0..g.node_count() {
        let n = g.node(i);
        writeln!(out, r#"    <node id="{}">"#, xml_escape(g.word(i)))?;
        writeln!(out, r#"      <data key="N">{}</data>"#, n.word_count)?;
        writeln!(out, r#"      <data key="tweet_count">{}</data>"#, n.tweet_count)?;
        if let Some(h) = n.score {
            writeln!(out, r#"      <data key="h">{h}</data>"#)?;
        }
        writeln!(out, "    </node>")?;
    }
    for e in g.edges() {
        writeln!(
            out,
            r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
            xml_escape(g.word(e.u)),
            xml_escape(g.word(e.v)),
            e.weight
        )?;
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")?;
    Ok(())
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<&'a str> {
    record
        .get(idx)
        .ok_or_else(|| Error::malformed(name, line, format!("missing column {}", idx + 1)))
}

fn parse_u64(s: &str, name: &str, line: u64) -> Result<u64> {
    s.parse()
        .map_err(|_| Error::malformed(name, line, format!("expected an integer, got `{s}`")))
}

/// Reads a graph back from its node table and edge list. Degree and
/// strength columns are ignored; they are recomputed from the edges.
pub fn read_graph<N: Read, E: Read>(nodes: N, edges: E) -> Result<WeightedGraph> {
    let reader = |input| {
        csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(true)
            .quoting(false)
            .from_reader(input)
    };
    let mut node_rows = Vec::new();
    let mut nodes_reader = reader(Box::new(nodes) as Box<dyn Read>);
    for (idx, record) in nodes_reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let word = field(&record, 0, "nodes", line)?.to_owned();
        let word_count = parse_u64(field(&record, 1, "nodes", line)?, "nodes", line)?;
        let tweet_count = parse_u64(field(&record, 2, "nodes", line)?, "nodes", line)?;
        let h = field(&record, 5, "nodes", line)?;
        let score = if h.is_empty() {
            None
        } else {
            Some(
                h.parse::<f64>()
                    .map_err(|_| Error::malformed("nodes", line, format!("bad score `{h}`")))?,
            )
        };
        node_rows.push((
            word,
            NodeInfo {
                word_count,
                tweet_count,
                score,
            },
        ));
    }
    let index: std::collections::HashMap<&str, usize> = node_rows
        .iter()
        .enumerate()
        .map(|(i, (w, _))| (w.as_str(), i))
        .collect();

    let mut edge_rows = Vec::new();
    let mut edges_reader = reader(Box::new(edges) as Box<dyn Read>);
    for (idx, record) in edges_reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let lookup = |col| -> Result<usize> {
            let w = field(&record, col, "edges", line)?;
            index
                .get(w)
                .copied()
                .ok_or_else(|| Error::malformed("edges", line, format!("unknown node `{w}`")))
        };
        let (u, v) = (lookup(0)?, lookup(1)?);
        let weight = parse_u64(field(&record, 2, "edges", line)?, "edges", line)?;
        edge_rows.push((u, v, weight));
    }
    WeightedGraph::new(node_rows, edge_rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WeightedGraph {
        let nodes = vec![
            (
                "a&b".to_string(),
                NodeInfo {
                    word_count: 3,
                    tweet_count: 2,
                    score: Some(6.25),
                },
            ),
            (
                "c".to_string(),
                NodeInfo {
                    word_count: 1,
                    tweet_count: 1,
                    score: None,
                },
            ),
            (
                "d".to_string(),
                NodeInfo {
                    word_count: 2,
                    tweet_count: 2,
                    score: Some(1.0 / 3.0),
                },
            ),
        ];
        WeightedGraph::new(nodes, vec![(0, 1, 1), (2, 0, 4)]).unwrap()
    }

    #[test]
    fn tsv_round_trip() {
        let g = sample();
        let (mut n, mut e) = (Vec::new(), Vec::new());
        write_nodes_tsv(&g, &mut n).unwrap();
        write_edges_tsv(&g, &mut e).unwrap();
        let text = String::from_utf8(n.clone()).unwrap();
        assert!(text.starts_with("word\tN\ttweet_count\tdegree\tstrength\th\na&b\t3\t2\t2\t5\t6.25\nc\t1\t1\t1\t1\t\n"));
        let back = read_graph(n.as_slice(), e.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn unknown_edge_endpoint() {
        let nodes = format!("{NODES_HEADER}\na\t1\t1\t0\t0\t\n");
        let edges = format!("{EDGES_HEADER}\na\tzz\t1\n");
        let err = read_graph(nodes.as_bytes(), edges.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("edges:2"), "{err}");
    }

    #[test]
    fn graphml_escapes() {
        let mut out = Vec::new();
        write_graphml(&sample(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains(r#"<node id="a&amp;b">"#));
        assert!(text.contains(r#"<edge source="a&amp;b" target="d"><data key="weight">4</data></edge>"#));
    }
}
