use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// A directory of output files addressed by `/`-separated relative paths.
#[derive(Debug)]
pub struct OutputTree {
    root: PathBuf,
    files: BTreeSet<String>,
}

impl OutputTree {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(OutputTree {
            root,
            files: BTreeSet::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        rel.split('/').fold(self.root.clone(), |p, part| p.join(part))
    }

    /// Files written so far, relative to the root.
    pub fn files(&self) -> &BTreeSet<String> {
        &self.files
    }

    pub fn write_with<F>(&mut self, rel: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;
        self.files.insert(rel.to_owned());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, rel: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write_with(rel, |w| writeln!(w, "{text}"))
    }

    pub fn write_lines<I, S>(&mut self, rel: &str, lines: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.write_with(rel, |w| {
            for line in lines {
                writeln!(w, "{}", line.as_ref())?;
            }
            Ok(())
        })
    }
}

/// Writes a whole run into a sibling staging directory and moves it into
/// place only on success, so a failed run leaves no partial outputs.
#[derive(Debug)]
pub struct StagedOutput {
    target: PathBuf,
    staging: PathBuf,
}

/// File whose presence marks a directory as a previous run.
pub const RUN_MARKER: &str = "manifest.tsv";

impl StagedOutput {
    pub fn begin(target: &Path) -> Result<(Self, OutputTree)> {
        if target.exists() && !target.join(RUN_MARKER).is_file() {
            let empty = fs::read_dir(target).map(|mut d| d.next().is_none()).unwrap_or(false);
            if !empty {
                return Err(Error::Config(format!(
                    "output directory {} exists and does not hold a previous run",
                    target.display()
                )));
            }
        }
        let name = target
            .file_name()
            .ok_or_else(|| Error::Config(format!("invalid output directory {}", target.display())))?;
        let mut staging_name = std::ffi::OsString::from(".");
        staging_name.push(name);
        staging_name.push(".partial");
        let staging = target.with_file_name(staging_name);
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        }
        let tree = OutputTree::create(&staging)?;
        Ok((
            StagedOutput {
                target: target.to_owned(),
                staging,
            },
            tree,
        ))
    }

    pub fn commit(self) -> Result<PathBuf> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(|e| Error::io(&self.target, e))?;
        }
        fs::rename(&self.staging, &self.target).map_err(|e| Error::io(&self.target, e))?;
        Ok(self.target)
    }

    pub fn abort(self) {
        let _ = fs::remove_dir_all(&self.staging);
    }
}
