mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::{generate, Fixture, FixtureSpec};
use cooccur::pipeline::{
    backbone_stage, check_manifest, community_stage, compare_corpora, describe_network, read_network, read_parsed,
    read_summary, run_pipeline, scored_network, write_corpus, OutputTree, PipelineConfig, BACKBONE_DIR, NETWORK_DIR,
    PARSED_CORPUS, SUMMARY_FILE,
};

fn config(fixture: &Fixture, dir: &Path, out: &str) -> PipelineConfig {
    let (corpus, lexicon, daily) = fixture.write(dir);
    let mut cfg = PipelineConfig::default();
    cfg.inputs.corpus = corpus;
    cfg.inputs.lexicon = lexicon;
    cfg.inputs.daily_lists = daily;
    cfg.settings.control_replicates = 50;
    cfg.output_dir = dir.join(out);
    cfg
}

fn small_fixture(seed: u64) -> Fixture {
    generate(&FixtureSpec {
        background_docs: 600,
        positive_docs: 250,
        negative_docs: 250,
        vocabulary: 400,
        ..FixtureSpec::merged(seed)
    })
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn run_twice_is_byte_identical() {
    let fixture = small_fixture(3);
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&fixture, dir.path(), "a");
    let (_, a) = run_pipeline(&cfg).unwrap();
    let mut cfg_b = cfg.clone();
    cfg_b.output_dir = dir.path().join("b");
    let (_, b) = run_pipeline(&cfg_b).unwrap();
    let (ta, tb) = (tree(&a), tree(&b));
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (k, v) in &ta {
        assert!(v == &tb[k], "{k} differs");
    }
    assert!(check_manifest(&a).unwrap().is_empty());
}

#[test]
fn missing_lexicon_is_config_error_without_outputs() {
    let fixture = small_fixture(4);
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(&fixture, dir.path(), "out");
    cfg.inputs.lexicon = dir.path().join("nope.tsv");
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(!cfg.output_dir.exists());
}

#[test]
fn data_error_leaves_no_partial_outputs() {
    let fixture = small_fixture(5);
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&fixture, dir.path(), "out");
    std::fs::write(&cfg.inputs.lexicon, "word\thapps\tstddev\nfoo\t11\t1\n").unwrap();
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("lexicon"), "{err}");
    let left: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.contains("out"))
        .collect();
    assert!(left.is_empty(), "{left:?}");
}

#[test]
fn summary_matches_recount_from_tables() {
    let fixture = small_fixture(6);
    let dir = tempfile::tempdir().unwrap();
    let (summary, out) = run_pipeline(&config(&fixture, dir.path(), "out")).unwrap();
    let nodes = std::fs::read_to_string(out.join("network/nodes.tsv")).unwrap();
    let edges = std::fs::read_to_string(out.join("network/edges.tsv")).unwrap();
    let node_rows: Vec<Vec<&str>> = nodes.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    let edge_rows: Vec<Vec<&str>> = edges.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(summary.network.nodes, node_rows.len());
    assert_eq!(summary.network.edges, edge_rows.len());
    let total: u64 = edge_rows.iter().map(|r| r[2].parse::<u64>().unwrap()).sum();
    assert_eq!(summary.network.total_weight, total);
    let strength_sum: u64 = node_rows.iter().map(|r| r[4].parse::<u64>().unwrap()).sum();
    assert_eq!(strength_sum, 2 * total);

    // components by union-find over the edge list
    let index: BTreeMap<&str, usize> = node_rows.iter().enumerate().map(|(i, r)| (r[0], i)).collect();
    let mut parent: Vec<usize> = (0..node_rows.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for r in &edge_rows {
        let (a, b) = (find(&mut parent, index[r[0]]), find(&mut parent, index[r[1]]));
        parent[a] = b;
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..node_rows.len() {
        *sizes.entry(find(&mut parent, i)).or_default() += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(summary.network.component_sizes, sizes);
    assert_eq!(summary.corpus.documents, fixture.docs.len());

    // word lists live in communities.tsv, not in the summary
    let mut expected = summary.clone();
    expected.community.communities.iter_mut().for_each(|c| c.words.clear());
    assert_eq!(read_summary(&out.join(SUMMARY_FILE)).unwrap(), expected);
}

#[test]
fn staged_rerun_reproduces_run_outputs() {
    let fixture = small_fixture(7);
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&fixture, dir.path(), "full");
    let (_, full) = run_pipeline(&cfg).unwrap();
    let s = &cfg.settings;

    // graph stage from the parsed corpus of the full run
    let staged_dir = dir.path().join("staged");
    let mut out = OutputTree::create(&staged_dir).unwrap();
    let file = std::io::BufReader::new(std::fs::File::open(full.join(PARSED_CORPUS)).unwrap());
    let corpus = read_parsed(file, "parsed").unwrap();
    write_corpus(&corpus, &mut out).unwrap();
    let lexicon = fixture.lexicon();
    let g = scored_network(&corpus, &lexicon, s.require_scores);
    describe_network(&g, NETWORK_DIR, &s.bins, &mut out).unwrap();

    // backbone and community stages from emitted tables only
    let raw = read_network(&staged_dir, NETWORK_DIR).unwrap();
    let stop: std::collections::BTreeSet<String> = std::fs::read_to_string(full.join("backbone/stopwords.txt"))
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    backbone_stage(&raw, &stop, s, &mut out).unwrap();
    let bb = read_network(&staged_dir, BACKBONE_DIR).unwrap();
    community_stage(&raw, &bb, s, &mut out).unwrap();

    let full_tree = tree(&full);
    for (rel, bytes) in tree(&staged_dir) {
        assert!(full_tree.get(&rel) == Some(&bytes), "{rel} differs");
    }
    assert!(full_tree.contains_key("community/community_summary.json"));
}

#[test]
fn compare_needs_two_compatible_runs() {
    let fixture = small_fixture(8);
    let dir = tempfile::tempdir().unwrap();
    let (summary, _) = run_pipeline(&config(&fixture, dir.path(), "out")).unwrap();
    let one = vec![("a".to_owned(), summary.clone())];
    assert!(compare_corpora(&one).unwrap_err().is_config());
    let two = vec![("a".to_owned(), summary.clone()), ("b".to_owned(), summary.clone())];
    let cmp = compare_corpora(&two).unwrap();
    assert_eq!(cmp.rows[1].delta_nodes, 0);
    assert_eq!(cmp.rows[1].delta_edges, 0);
    assert_eq!(cmp.rows[1].delta_backbone_mean, Some(0.0));
    let mut other = summary.clone();
    other.settings.bins.score = cooccur::histogram::BinSpec::linear(1.0, 9.0, 16).unwrap();
    assert!(compare_corpora(&[("a".to_owned(), summary), ("b".to_owned(), other)]).is_err());
}

#[test]
fn opposing_sentiments_flagged_only_on_merged_corpus() {
    let dir = tempfile::tempdir().unwrap();
    // planted stance blocks without background-only documents
    let spec = |positive_docs, negative_docs| FixtureSpec {
        background_docs: 0,
        positive_docs,
        negative_docs,
        vocabulary: 800,
        ..FixtureSpec::merged(9)
    };
    let mut runs = Vec::new();
    for (name, p, n) in [("favor", 600, 0), ("against", 0, 600), ("all", 600, 600)] {
        let sub = dir.path().join(name);
        std::fs::create_dir(&sub).unwrap();
        let (summary, _) = run_pipeline(&config(&generate(&spec(p, n)), &sub, "out")).unwrap();
        runs.push((name.to_owned(), summary));
    }
    let cmp = compare_corpora(&runs).unwrap();
    let flags: Vec<(&str, bool)> = cmp
        .rows
        .iter()
        .map(|r| (r.name.as_str(), r.opposing_sentiments))
        .collect();
    assert_eq!(
        flags,
        vec![("favor", false), ("against", false), ("all", true)],
        "{:#?}",
        cmp.rows
    );
}
