use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backbone::{BackboneMethod, DEFAULT_ALPHA, DEFAULT_DELTA, DEFAULT_HUB_RANK};
use crate::community::ReportOptions;
use crate::corpus::{InputFormat, ParserConfig};
use crate::error::{Error, Result};
use crate::null_models::NullModelKind;
use crate::profiles::ProfileBins;

/// Overrides `output_dir` when set.
pub const OUTPUT_ROOT_ENV: &str = "COOCCUR_OUTPUT_DIR";

pub const DEFAULT_SWEEP: [f64; 11] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05];
pub const DEFAULT_CONTROL_REPLICATES: u32 = 200;

/// Input files. Relative paths in a config file resolve against the
/// file's directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub corpus: PathBuf,
    pub input_format: InputFormat,
    pub lexicon: PathBuf,
    pub aliases: Option<PathBuf>,
    /// Explicit hub list, one word per line.
    pub stopwords: Option<PathBuf>,
    /// Daily top-word lists from which hubs are derived.
    pub daily_lists: Vec<PathBuf>,
}

/// Everything except file locations; this part is recorded in the run
/// summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub anchors: Vec<String>,
    pub remove_words: Vec<String>,
    pub require_scores: bool,
    pub seed: u64,
    pub null_models: Vec<NullModelKind>,
    pub replicates: u32,
    pub hub_rank: usize,
    pub backbone: BackboneMethod,
    pub alpha: f64,
    pub delta: f64,
    pub sweep: Vec<f64>,
    pub resolution: f64,
    pub control_replicates: u32,
    pub report: ReportOptions,
    pub bins: ProfileBins,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            anchors: Vec::new(),
            remove_words: Vec::new(),
            require_scores: false,
            seed: 1,
            null_models: NullModelKind::ALL.to_vec(),
            replicates: 1,
            hub_rank: DEFAULT_HUB_RANK,
            backbone: BackboneMethod::Disparity,
            alpha: DEFAULT_ALPHA,
            delta: DEFAULT_DELTA,
            sweep: DEFAULT_SWEEP.to_vec(),
            resolution: 1.0,
            control_replicates: DEFAULT_CONTROL_REPLICATES,
            report: ReportOptions::default(),
            bins: ProfileBins::default(),
        }
    }
}

impl Settings {
    pub fn parser(&self) -> ParserConfig {
        ParserConfig::default()
            .with_anchors(&self.anchors)
            .with_removals(&self.remove_words)
    }

    /// Threshold handed to the selected backbone method.
    pub fn threshold(&self) -> f64 {
        match self.backbone {
            BackboneMethod::NoiseCorrected => self.delta,
            _ => self.alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha {} outside (0, 1]", self.alpha));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return bad(format!("delta {} must be a finite non-negative number", self.delta));
        }
        if let Some(a) = self.sweep.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return bad(format!("sweep alpha {a} outside (0, 1]"));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.control_replicates == 0 {
            return bad("control_replicates must be at least 1".into());
        }
        if !(self.resolution > 0.0) || !self.resolution.is_finite() {
            return bad(format!("resolution {} must be positive", self.resolution));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub settings: Settings,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Inputs::default(),
            settings: Settings::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Loads a JSON (`.json`) or TOML (anything else) config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        if let Some(base) = path.parent() {
            cfg.resolve_relative(base);
        }
        Ok(cfg)
    }

    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        let i = &mut self.inputs;
        fix(&mut i.corpus);
        fix(&mut i.lexicon);
        i.aliases.iter_mut().for_each(fix);
        i.stopwords.iter_mut().for_each(fix);
        i.daily_lists.iter_mut().for_each(fix);
        fix(&mut self.output_dir);
    }

    /// `output_dir`, unless the output-root environment variable is set.
    pub fn effective_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let i = &self.inputs;
        let mut required: Vec<(&str, &PathBuf)> = vec![("corpus", &i.corpus), ("lexicon", &i.lexicon)];
        required.extend(i.aliases.iter().map(|p| ("aliases", p)));
        required.extend(i.stopwords.iter().map(|p| ("stopwords", p)));
        required.extend(i.daily_lists.iter().map(|p| ("daily list", p)));
        for (what, p) in required {
            if p.as_os_str().is_empty() {
                return Err(Error::Config(format!("no {what} file given")));
            }
            if !p.is_file() {
                return Err(Error::Config(format!("{what} file {} does not exist", p.display())));
            }
        }
        self.settings.validate()
    }
}
