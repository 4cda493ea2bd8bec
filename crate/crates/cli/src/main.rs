//! Command-line front end: the full pipeline (`run`), its individual stages
//! and cross-corpus comparison.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cooccur::backbone::BackboneMethod;
use cooccur::corpus::InputFormat;
use cooccur::error::{Error, Result};
use cooccur::null_models::NullModelKind;
use cooccur::pipeline::{
    backbone_stage, community_stage, compare_corpora, describe_network, load_corpus, load_lexicon, null_model_stage,
    read_network, read_parsed, read_summary, resolve_stopwords, run_pipeline, scored_network, write_corpus, OutputTree,
    PipelineConfig, BACKBONE_DIR, NETWORK_DIR, OUTPUT_ROOT_ENV, PARSED_CORPUS, SUMMARY_FILE,
};

#[derive(Parser)]
#[command(name = "cooccur", version, about = "Sentiment-scored word co-occurrence networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus into `corpus/parsed.jsonl`
    Ingest(Opts),
    /// Build and describe the scored network from the parsed corpus
    Graph(Opts),
    /// Null-model ensembles of the network
    Nullmodel(Opts),
    /// Hub removal, edge filtering and the threshold sweep
    Backbone(Opts),
    /// Communities of the backbone with score attribution and control
    Community(Opts),
    /// Every stage plus the run summary and figure manifest
    Run(Opts),
    /// Side-by-side statistics of finished runs
    Compare(CompareOpts),
}

/// Flags override values read from `--config`.
#[derive(Args, Clone, Default)]
struct Opts {
    /// TOML or JSON config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (the output-root environment variable takes precedence)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corpus file
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Corpus format: jsonl or txt
    #[arg(long)]
    input_format: Option<InputFormat>,
    /// Lexicon TSV with word, score and standard deviation columns
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Alias table mapping tokens to lexicon words
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Explicit hub word list
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Daily top-word lists from which hubs are derived
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    daily_lists: Vec<PathBuf>,
    /// Query terms removed from every document
    #[arg(long, value_delimiter = ',')]
    anchors: Vec<String>,
    /// Further words removed from every document
    #[arg(long, value_delimiter = ',')]
    remove_words: Vec<String>,
    /// Drop words without a lexicon score from the network
    #[arg(long)]
    require_scores: bool,
    /// Null models to run: config, er, shuffle, uniform
    #[arg(long = "null-model", value_delimiter = ',')]
    null_models: Vec<NullModelKind>,
    /// Root seed
    #[arg(long)]
    seed: Option<u64>,
    /// Replicates per null model
    #[arg(long)]
    replicates: Option<u32>,
    /// Backbone method: disparity, nc or none
    #[arg(long)]
    backbone: Option<BackboneMethod>,
    /// Significance level of the disparity filter
    #[arg(long)]
    alpha: Option<f64>,
    /// Threshold of the noise-corrected filter
    #[arg(long)]
    delta: Option<f64>,
    /// Disparity levels for the threshold sweep; `none` disables it
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<String>,
    /// Modularity resolution
    #[arg(long)]
    resolution: Option<f64>,
    /// Replicates of the shuffled-score community control
    #[arg(long)]
    control_replicates: Option<u32>,
    /// Number of top-degree words checked against daily lists
    #[arg(long)]
    hub_rank: Option<usize>,
}

#[derive(Args)]
struct CompareOpts {
    /// Run directories (or run summary files) to compare, first is the reference
    #[arg(required = true, num_args = 1..)]
    runs: Vec<PathBuf>,
    /// Directory for comparison.csv and comparison.json
    #[arg(long, default_value = "comparison")]
    out: PathBuf,
}

impl Opts {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let (i, s) = (&mut cfg.inputs, &mut cfg.settings);
        set(&mut i.corpus, self.corpus.clone());
        set(&mut i.input_format, self.input_format);
        set(&mut i.lexicon, self.lexicon.clone());
        if self.aliases.is_some() {
            i.aliases = self.aliases.clone();
        }
        if self.stopwords.is_some() {
            i.stopwords = self.stopwords.clone();
        }
        if !self.daily_lists.is_empty() {
            i.daily_lists = self.daily_lists.clone();
        }
        if !self.anchors.is_empty() {
            s.anchors = self.anchors.clone();
        }
        if !self.remove_words.is_empty() {
            s.remove_words = self.remove_words.clone();
        }
        s.require_scores |= self.require_scores;
        if !self.null_models.is_empty() {
            s.null_models = self.null_models.clone();
        }
        set(&mut s.seed, self.seed);
        set(&mut s.replicates, self.replicates);
        set(&mut s.backbone, self.backbone);
        set(&mut s.alpha, self.alpha);
        set(&mut s.delta, self.delta);
        if !self.sweep.is_empty() {
            s.sweep = parse_sweep(&self.sweep)?;
        }
        set(&mut s.resolution, self.resolution);
        set(&mut s.control_replicates, self.control_replicates);
        set(&mut s.hub_rank, self.hub_rank);
        set(&mut cfg.output_dir, self.out.clone());
        cfg.settings.validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_sweep(items: &[String]) -> Result<Vec<f64>> {
    if items.len() == 1 && items[0] == "none" {
        return Ok(Vec::new());
    }
    items
        .iter()
        .map(|a| {
            a.trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid sweep level `{a}`")))
        })
        .collect()
}

fn require_file(what: &str, path: &Path) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::Config(format!("no {what} file given")));
    }
    if !path.is_file() {
        return Err(Error::Config(format!("{what} file {} does not exist", path.display())));
    }
    Ok(())
}

/// Runs one stage into a sibling staging directory, then moves its files
/// into `target`; on failure nothing is added to `target`.
fn stage_into<F>(target: &Path, stage: &'static str, body: F) -> Result<()>
where
    F: FnOnce(&mut OutputTree) -> Result<()>,
{
    let name = target
        .file_name()
        .ok_or_else(|| Error::Config(format!("invalid output directory {}", target.display())))?;
    let mut staging_name = std::ffi::OsString::from(".");
    staging_name.push(name);
    staging_name.push(format!(".{stage}.partial"));
    let staging = target.with_file_name(staging_name);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    let mut tree = OutputTree::create(&staging)?;
    let moved = body(&mut tree).map_err(|e| e.in_stage(stage)).and_then(|_| {
        for rel in tree.files() {
            let from = tree.path(rel);
            let to = rel.split('/').fold(target.to_path_buf(), |p, part| p.join(part));
            if let Some(parent) = to.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::rename(&from, &to).map_err(|e| Error::io(&to, e))?;
        }
        Ok(())
    });
    let _ = fs::remove_dir_all(&staging);
    moved
}

fn need_stage_output(root: &Path, rel: &str, producer: &str) -> Result<()> {
    if root.join(rel).exists() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{} has no {rel}; run `cooccur {producer}` first",
            root.display()
        )))
    }
}

fn run_stage(command: &Command, opts: &Opts) -> Result<()> {
    let cfg = opts.config()?;
    let (i, s) = (&cfg.inputs, &cfg.settings);
    let root = cfg.effective_output_dir();
    match command {
        Command::Ingest(_) => {
            require_file("corpus", &i.corpus)?;
            stage_into(&root, "ingest", |out| {
                let corpus = load_corpus(&i.corpus, i.input_format, &s.parser())?;
                write_corpus(&corpus, out).map(drop)
            })
        }
        Command::Graph(_) => {
            require_file("lexicon", &i.lexicon)?;
            if let Some(a) = &i.aliases {
                require_file("aliases", a)?;
            }
            need_stage_output(&root, PARSED_CORPUS, "ingest")?;
            stage_into(&root, "graph", |out| {
                let path = root.join(PARSED_CORPUS);
                let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
                let corpus = read_parsed(BufReader::new(file), &path.display().to_string())?;
                let lexicon = load_lexicon(&i.lexicon, i.aliases.as_deref())?;
                let g = scored_network(&corpus, &lexicon, s.require_scores);
                describe_network(&g, NETWORK_DIR, &s.bins, out).map(drop)
            })
        }
        Command::Nullmodel(_) => {
            need_stage_output(&root, NETWORK_DIR, "graph")?;
            stage_into(&root, "nullmodel", |out| {
                let g = read_network(&root, NETWORK_DIR)?;
                for &kind in &s.null_models {
                    null_model_stage(&g, kind, s.seed, s.replicates, &s.bins, out)?;
                }
                Ok(())
            })
        }
        Command::Backbone(_) => {
            if let Some(p) = &i.stopwords {
                require_file("stopwords", p)?;
            }
            for p in &i.daily_lists {
                require_file("daily list", p)?;
            }
            need_stage_output(&root, NETWORK_DIR, "graph")?;
            stage_into(&root, "backbone", |out| {
                let g = read_network(&root, NETWORK_DIR)?;
                let stop = resolve_stopwords(i.stopwords.as_deref(), &i.daily_lists, &g, s.hub_rank)?;
                backbone_stage(&g, &stop, s, out).map(drop)
            })
        }
        Command::Community(_) => {
            need_stage_output(&root, NETWORK_DIR, "graph")?;
            need_stage_output(&root, BACKBONE_DIR, "backbone")?;
            stage_into(&root, "community", |out| {
                let raw = read_network(&root, NETWORK_DIR)?;
                let bb = read_network(&root, BACKBONE_DIR)?;
                community_stage(&raw, &bb, s, out).map(drop)
            })
        }
        Command::Run(_) => {
            let (summary, dir) = run_pipeline(&cfg)?;
            println!(
                "{}: {} documents, {} nodes, {} edges, backbone {} edges, {} communities",
                dir.display(),
                summary.corpus.documents,
                summary.network.nodes,
                summary.network.edges,
                summary.backbone.backbone.edges,
                summary.community.communities.len()
            );
            Ok(())
        }
        Command::Compare(_) => unreachable!("handled separately"),
    }
}

fn compare(opts: &CompareOpts) -> Result<()> {
    let mut runs = Vec::new();
    for path in &opts.runs {
        let file = if path.is_dir() {
            path.join(SUMMARY_FILE)
        } else {
            path.clone()
        };
        if !file.is_file() {
            return Err(Error::Config(format!("no run summary at {}", file.display())));
        }
        let name = if path.is_dir() {
            path
        } else {
            path.parent().unwrap_or(path)
        };
        let name = name
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        runs.push((name, read_summary(&file)?));
    }
    let cmp = compare_corpora(&runs)?;
    let mut out = OutputTree::create(&opts.out)?;
    out.write_with("comparison.csv", |w| cmp.write_csv(w))?;
    out.write_json("comparison.json", &cmp)?;
    for r in &cmp.rows {
        println!("{}: opposing sentiments {}", r.name, r.opposing_sentiments);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compare(opts) => compare(opts),
        Command::Ingest(o)
        | Command::Graph(o)
        | Command::Nullmodel(o)
        | Command::Backbone(o)
        | Command::Community(o)
        | Command::Run(o) => run_stage(&cli.command, o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if std::env::var_os(OUTPUT_ROOT_ENV).is_some() {
                eprintln!("note: {OUTPUT_ROOT_ENV} is set and overrides the output directory");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
