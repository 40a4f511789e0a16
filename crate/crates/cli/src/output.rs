//! Artifact file formats.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use duffing_core::classical::{Histogram2d, PhasePoint};
use duffing_core::grid::{Field2d, Grid2d};
use duffing_core::histories::DecoherenceMatrix;
use duffing_core::numerics::ComplexMatrix;
use duffing_core::phase_space::WignerGrid;
use serde::Serialize;
use serde_json::Value;

use crate::config::SimConfig;
use crate::error::CliError;

pub const CLASSICAL_SECTION_TAG: &str = "# duffing-section v1";
pub const QSD_SECTION_TAG: &str = "# qsd-section v1";
pub const WIGNER_TAG: &str = "# wigner v1";

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn tagged_writer(path: &Path, tag: Option<&str>) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let mut w = create(path)?;
    if let Some(tag) = tag {
        writeln!(w, "{tag}")?;
    }
    Ok(csv::Writer::from_writer(w))
}

/// `x,p,t` rows under a format tag.
pub fn write_section(path: &Path, tag: &str, points: &[PhasePoint]) -> Result<(), CliError> {
    let mut w = tagged_writer(path, Some(tag))?;
    w.write_record(["x", "p", "t"])?;
    for pt in points {
        w.serialize((pt.x, pt.p, pt.t))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,p,t` (section) or `x,p,w` (Wigner) rows; returns the tag line
/// and the rows.
pub fn read_table(path: &Path) -> Result<(String, Vec<[f64; 3]>), CliError> {
    let file = File::open(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let mut tag = String::new();
    reader.read_line(&mut tag)?;
    let tag = tag.trim().to_string();
    if !tag.starts_with('#') {
        return Err(CliError::config(format!("{}: missing format tag line", path.display())));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let rows = r
        .deserialize::<(f64, f64, f64)>()
        .map(|row| row.map(|(a, b, c)| [a, b, c]))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok((tag, rows))
}

/// Nonzero bins as `x_lo,x_hi,p_lo,p_hi,weight`.
pub fn write_histogram(path: &Path, h: &Histogram2d) -> Result<(), CliError> {
    let g = h.grid();
    let mut w = tagged_writer(path, None)?;
    w.write_record(["x_lo", "x_hi", "p_lo", "p_hi", "weight"])?;
    for i in 0..g.nx {
        for j in 0..g.np {
            let v = h.field.get(i, j);
            if v != 0.0 {
                let (x, p) = (g.x_lo + i as f64 * g.dx(), g.p_lo + j as f64 * g.dp());
                w.serialize((x, x + g.dx(), p, p + g.dp(), v))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_wigner(path: &Path, wg: &WignerGrid) -> Result<(), CliError> {
    let g = &wg.grid;
    let mut w = tagged_writer(path, Some(WIGNER_TAG))?;
    w.write_record(["x", "p", "w"])?;
    for i in 0..g.nx {
        for j in 0..g.np {
            w.serialize((g.x_center(i), g.p_center(j), wg.get(i, j)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// 8-bit binary PGM, `x` along columns and `p` increasing upward. Gray
/// level 128 is zero, 255 is `+max|W|` and 1 is `-max|W|`.
pub fn write_pgm(path: &Path, field: &Field2d) -> Result<(), CliError> {
    let g = &field.grid;
    let scale = field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut w = create(path)?;
    write!(w, "P5\n{} {}\n255\n", g.nx, g.np)?;
    let mut row = vec![0u8; g.nx];
    for j in (0..g.np).rev() {
        for (i, px) in row.iter_mut().enumerate() {
            let v = if scale > 0.0 { field.get(i, j) / scale } else { 0.0 };
            *px = (128.0 + 127.0 * v).round().clamp(0.0, 255.0) as u8;
        }
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `row,col,re,im`.
pub fn write_matrix(path: &Path, m: &ComplexMatrix, headers: [&str; 4]) -> Result<(), CliError> {
    let mut w = tagged_writer(path, None)?;
    w.write_record(headers)?;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            w.serialize((r, c, z.re, z.im))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_density(path: &Path, m: &ComplexMatrix) -> Result<(), CliError> {
    write_matrix(path, m, ["row", "col", "re", "im"])
}

pub fn write_decoherence(path: &Path, d: &DecoherenceMatrix) -> Result<(), CliError> {
    write_matrix(path, &d.matrix, ["alpha", "alpha_prime", "re", "im"])
}

/// Rows of plain values under a header line.
pub fn write_rows<R: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
    let mut w = tagged_writer(path, None)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Fills a field on `grid` from `(x, p, value)` rows by binning.
pub fn bin_rows(rows: &[[f64; 3]], grid: Grid2d) -> Field2d {
    let mut f = Field2d::zeros(grid);
    for r in rows {
        if let Some((i, j)) = grid.bin(r[0], r[1]) {
            f.values[grid.flat(i, j)] += r[2];
        }
    }
    f
}

/// Provenance written next to every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Meta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    pub seed: u64,
    pub threads_independent: bool,
    pub config: &'a SimConfig,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub results: Value,
}

pub fn write_meta(path: &Path, meta: &Meta<'_>) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, meta)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Paths `<out>/<name><suffix>`.
#[derive(Debug, Clone)]
pub struct OutputSet {
    dir: PathBuf,
    name: String,
    written: Vec<PathBuf>,
}

impl OutputSet {
    pub fn new(dir: &Path, name: &str) -> Result<Self, CliError> {
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::config(format!("name: '{name}' is not a plain file name")));
        }
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), name: name.to_string(), written: Vec::new() })
    }

    /// Registers and returns the path for `suffix` (e.g. `.csv`).
    pub fn path(&mut self, suffix: &str) -> PathBuf {
        let p = self.dir.join(format!("{}{suffix}", self.name));
        self.written.push(p.clone());
        p
    }

    pub fn file_names(&self) -> Vec<String> {
        self.written.iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect()
    }

    pub fn meta_path(&self) -> PathBuf {
        self.dir.join(format!("{}.meta.json", self.name))
    }
}
