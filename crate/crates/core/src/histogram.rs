//! Binned 2D data backing the figure outputs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing bin edges. Bin `i` is `[edges[i], edges[i+1])`; the
/// last bin also includes its right edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BinSpec {
    edges: Vec<f64>,
}

impl TryFrom<Vec<f64>> for BinSpec {
    type Error = Error;

    fn try_from(edges: Vec<f64>) -> Result<Self> {
        BinSpec::new(edges)
    }
}

impl From<BinSpec> for Vec<f64> {
    fn from(spec: BinSpec) -> Self {
        spec.edges
    }
}

impl BinSpec {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Config("a bin spec needs at least two edges".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("bin edges must be finite and strictly increasing".into()));
        }
        Ok(BinSpec { edges })
    }

    /// `bins` equal-width bins over `[lo, hi]`.
    pub fn linear(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("zero bins".into()));
        }
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        BinSpec::new(edges)
    }

    /// `bins` logarithmically spaced bins over `[lo, hi]`, `lo > 0`.
    ///
    /// Edges are computed with basic arithmetic only so they are identical
    /// on every platform.
    pub fn log(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo > 0.0) || !(hi > lo) || bins == 0 {
            return Err(Error::Config("log bins need 0 < lo < hi and at least one bin".into()));
        }
        let ratio = nth_root(hi / lo, bins);
        let mut edges = Vec::with_capacity(bins + 1);
        let mut edge = lo;
        for _ in 0..bins {
            edges.push(edge);
            edge *= ratio;
        }
        edges.push(hi);
        BinSpec::new(edges)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let last = *self.edges.last().unwrap();
        if !(x >= self.edges[0] && x <= last) {
            return None;
        }
        if x == last {
            return Some(self.bins() - 1);
        }
        Some(self.edges.partition_point(|&e| e <= x) - 1)
    }
}

/// `c^(1/n)` for `c > 1` by bisection.
fn nth_root(c: f64, n: usize) -> f64 {
    let pow = |x: f64| (0..n).fold(1.0, |acc: f64, _| acc * x);
    let (mut lo, mut hi) = (1.0f64, c);
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            return mid;
        }
        if pow(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramGrid {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub x: BinSpec,
    pub y: BinSpec,
    /// Row-major over x: `cells[ix * ny + iy]`.
    cells: Vec<f64>,
    /// Entries dropped because a required score was missing.
    pub skipped_unscored: u64,
    pub out_of_range: u64,
}

impl HistogramGrid {
    pub fn new(name: &str, x_label: &str, y_label: &str, x: BinSpec, y: BinSpec) -> Self {
        let cells = vec![0.0; x.bins() * y.bins()];
        HistogramGrid {
            name: name.to_owned(),
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
            x,
            y,
            cells,
            skipped_unscored: 0,
            out_of_range: 0,
        }
    }

    pub fn add(&mut self, x: f64, y: f64, weight: f64) {
        match (self.x.bin_of(x), self.y.bin_of(y)) {
            (Some(ix), Some(iy)) => {
                let ny = self.y.bins();
                self.cells[ix * ny + iy] += weight;
            }
            _ => self.out_of_range += 1,
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.cells[ix * self.y.bins() + iy]
    }

    /// Value of the cell containing `(x, y)`.
    pub fn at(&self, x: f64, y: f64) -> Option<f64> {
        Some(self.get(self.x.bin_of(x)?, self.y.bin_of(y)?))
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Adds `factor * other` cell by cell.
    pub fn add_scaled(&mut self, other: &HistogramGrid, factor: f64) -> Result<()> {
        if !self.same_axes(other) {
            return Err(Error::InvalidArgument(format!(
                "grids `{}` and `{}` have different bins",
                self.name, other.name
            )));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += factor * b;
        }
        self.skipped_unscored += other.skipped_unscored;
        self.out_of_range += other.out_of_range;
        Ok(())
    }

    pub fn same_axes(&self, other: &HistogramGrid) -> bool {
        self.x == other.x && self.y == other.y
    }

    /// Cosine similarity of the flattened cell vectors; `None` when the axes
    /// differ or either grid is all zeros.
    pub fn cosine_similarity(&self, other: &HistogramGrid) -> Option<f64> {
        if !self.same_axes(other) {
            return None;
        }
        let dot: f64 = self.cells.iter().zip(&other.cells).map(|(a, b)| a * b).sum();
        let na: f64 = self.cells.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = other.cells.iter().map(|b| b * b).sum::<f64>().sqrt();
        (na > 0.0 && nb > 0.0).then(|| dot / (na * nb))
    }

    /// CSV with two bin-edge header rows followed by one row per cell.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let join = |edges: &[f64]| edges.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        writeln!(out, "x_edges:{},{}", self.x_label, join(self.x.edges()))?;
        writeln!(out, "y_edges:{},{}", self.y_label, join(self.y.edges()))?;
        writeln!(out, "x_bin,y_bin,x_lo,x_hi,y_lo,y_hi,value")?;
        let (xe, ye) = (self.x.edges(), self.y.edges());
        for ix in 0..self.x.bins() {
            for iy in 0..self.y.bins() {
                writeln!(
                    out,
                    "{ix},{iy},{},{},{},{},{}",
                    xe[ix],
                    xe[ix + 1],
                    ye[iy],
                    ye[iy + 1],
                    self.get(ix, iy)
                )?;
            }
        }
        Ok(())
    }
}

/// One-dimensional histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram1D {
    pub name: String,
    pub axis: BinSpec,
    values: Vec<f64>,
    pub out_of_range: u64,
}

impl Histogram1D {
    pub fn new(name: &str, axis: BinSpec) -> Self {
        Histogram1D {
            name: name.to_owned(),
            values: vec![0.0; axis.bins()],
            axis,
            out_of_range: 0,
        }
    }

    pub fn add(&mut self, x: f64, weight: f64) {
        match self.axis.bin_of(x) {
            Some(i) => self.values[i] += weight,
            None => self.out_of_range += 1,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Values divided by their total; all zeros when empty.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total();
        self.values
            .iter()
            .map(|v| if total > 0.0 { v / total } else { 0.0 })
            .collect()
    }

    /// `bin,lo,hi,value,fraction` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin,lo,hi,value,fraction")?;
        let edges = self.axis.edges();
        for (i, (v, f)) in self.values.iter().zip(self.normalized()).enumerate() {
            writeln!(out, "{i},{},{},{v},{f}", edges[i], edges[i + 1])?;
        }
        Ok(())
    }
}
