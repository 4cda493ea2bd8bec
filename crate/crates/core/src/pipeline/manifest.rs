//! Mapping from figure and table classes to the files that back them.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use super::output::{OutputTree, RUN_MARKER};
use crate::error::{Error, Result};

/// `(class, description, file patterns)`; `*` matches within one path
/// segment.
pub const FIGURES: &[(&str, &str, &[&str])] = &[
    (
        "table3",
        "network sizes and components",
        &["run_summary.json", "network/stats.json"],
    ),
    (
        "table4",
        "assortativity coefficients",
        &["run_summary.json", "network/stats.json"],
    ),
    (
        "fig1",
        "degree, strength, count and weight distributions",
        &["network/distributions/*.csv", "corpus/document_sizes.csv"],
    ),
    (
        "fig2",
        "word count vs score, counts and deviations",
        &[
            "network/profiles/count_score.csv",
            "network/profiles/count_score_delta.csv",
        ],
    ),
    (
        "fig3",
        "strength and degree vs score",
        &[
            "network/profiles/strength_score.csv",
            "network/profiles/degree_score.csv",
        ],
    ),
    (
        "fig4",
        "score pairs of connected nodes",
        &[
            "network/profiles/score_pairs.csv",
            "network/profiles/score_pairs_unweighted.csv",
        ],
    ),
    (
        "fig5",
        "backbone word count vs score",
        &[
            "backbone/profiles/count_score.csv",
            "backbone/profiles/count_score_delta.csv",
        ],
    ),
    ("fig6-8", "community word bars", &["community/wordbars_*.csv"]),
    ("fig9-11", "community deviation grids", &["community/grids/*.csv"]),
    (
        "fig12",
        "community mean scores, baselines and shuffled control",
        &["community/community_summary.json", "community/control.csv"],
    ),
    (
        "S1",
        "configuration model: count vs score",
        &[
            "nulls/config/profiles/count_score.csv",
            "nulls/config/profiles/count_score_delta.csv",
        ],
    ),
    (
        "S2",
        "Erdos-Renyi: count vs score",
        &[
            "nulls/er/profiles/count_score.csv",
            "nulls/er/profiles/count_score_delta.csv",
        ],
    ),
    (
        "S3",
        "shuffled scores: count vs score",
        &[
            "nulls/shuffle/profiles/count_score.csv",
            "nulls/shuffle/profiles/count_score_delta.csv",
        ],
    ),
    (
        "S4",
        "uniform scores: count vs score",
        &[
            "nulls/uniform/profiles/count_score.csv",
            "nulls/uniform/profiles/count_score_delta.csv",
        ],
    ),
    (
        "S5",
        "configuration model: strength and degree vs score",
        &[
            "nulls/config/profiles/strength_score.csv",
            "nulls/config/profiles/degree_score.csv",
        ],
    ),
    (
        "S6",
        "Erdos-Renyi: strength and degree vs score",
        &[
            "nulls/er/profiles/strength_score.csv",
            "nulls/er/profiles/degree_score.csv",
        ],
    ),
    (
        "S7",
        "shuffled scores: strength and degree vs score",
        &[
            "nulls/shuffle/profiles/strength_score.csv",
            "nulls/shuffle/profiles/degree_score.csv",
        ],
    ),
    (
        "S8",
        "uniform scores: strength and degree vs score",
        &[
            "nulls/uniform/profiles/strength_score.csv",
            "nulls/uniform/profiles/degree_score.csv",
        ],
    ),
    (
        "S9",
        "configuration model: score pairs",
        &["nulls/config/profiles/score_pairs.csv"],
    ),
    (
        "S10",
        "Erdos-Renyi: score pairs",
        &["nulls/er/profiles/score_pairs.csv"],
    ),
    (
        "S11",
        "shuffled scores: score pairs",
        &["nulls/shuffle/profiles/score_pairs.csv"],
    ),
    (
        "S12",
        "uniform scores: score pairs",
        &["nulls/uniform/profiles/score_pairs.csv"],
    ),
    ("S13", "order, size and mean score by threshold", &["sweep/sweep.csv"]),
    ("S14", "components by threshold", &["sweep/sweep.csv"]),
    (
        "S15",
        "score distributions by threshold",
        &["sweep/alpha_*/score_distribution.csv"],
    ),
    (
        "S16",
        "degree, strength and weight distributions by threshold",
        &["sweep/alpha_*/distributions/*.csv"],
    ),
    ("S17", "score pairs by threshold", &["sweep/alpha_*/score_pairs.csv"]),
];

fn segment_matches(pattern: &str, segment: &str) -> bool {
    match pattern.split_once('*') {
        None => pattern == segment,
        Some((pre, post)) => {
            segment.len() >= pre.len() + post.len() && segment.starts_with(pre) && segment.ends_with(post)
        }
    }
}

pub fn pattern_matches(pattern: &str, path: &str) -> bool {
    let p: Vec<&str> = pattern.split('/').collect();
    let f: Vec<&str> = path.split('/').collect();
    p.len() == f.len() && p.iter().zip(&f).all(|(a, b)| segment_matches(a, b))
}

/// `(class, file)` rows for every written file that backs a figure.
pub fn manifest_rows(files: &BTreeSet<String>) -> Vec<(&'static str, String)> {
    let mut rows = Vec::new();
    for (id, _, patterns) in FIGURES {
        for file in files {
            if patterns.iter().any(|p| pattern_matches(p, file)) {
                rows.push((*id, file.clone()));
            }
        }
    }
    rows
}

/// Writes the manifest for everything in `out` (the summary file must
/// already be written).
pub fn write_manifest(out: &mut OutputTree) -> Result<()> {
    let mut files = out.files().clone();
    files.insert(RUN_MARKER.to_owned());
    let rows = manifest_rows(&files);
    let describe = |id: &str| FIGURES.iter().find(|f| f.0 == id).map(|f| f.1).unwrap_or("");
    out.write_with(RUN_MARKER, |w| {
        writeln!(w, "figure\tfile\tdescription")?;
        for (id, file) in &rows {
            writeln!(w, "{id}\t{file}\t{}", describe(id))?;
        }
        Ok(())
    })
}

/// Figure classes with no existing file listed in the run's manifest.
pub fn check_manifest(root: &Path) -> Result<Vec<&'static str>> {
    let path = root.join(RUN_MARKER);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut covered = BTreeSet::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let mut cols = line.split('\t');
        let (Some(id), Some(file)) = (cols.next(), cols.next()) else {
            return Err(Error::malformed(
                path.display().to_string(),
                i as u64 + 1,
                "expected figure and file",
            ));
        };
        let on_disk = file.split('/').fold(root.to_path_buf(), |p, s| p.join(s));
        if on_disk.is_file() {
            covered.insert(id.to_owned());
        }
    }
    Ok(FIGURES
        .iter()
        .map(|f| f.0)
        .filter(|id| !covered.contains(*id))
        .collect())
}
