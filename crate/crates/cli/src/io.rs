//! Frame files: CSV (`flat_index,re,im,magnitude`) and a JSON envelope
//! carrying the dimensions and the layout of the flat index.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use vofdm_core::FrameParams;

use crate::config::OutputFormat;

/// What a sample file holds. Grids and time frames are in block layout
/// (`k*M + n`), spectra in stride layout (`m*N + k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Grid,
    Frame,
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Block,
    Stride,
}

impl Kind {
    pub fn layout(&self) -> Layout {
        match self {
            Kind::Grid | Kind::Frame => Layout::Block,
            Kind::Spectrum => Layout::Stride,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub flat_index: usize,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub params: Dims,
    pub layout: Layout,
    pub kind: Kind,
    pub data: Vec<Sample>,
}

/// Format implied by the file extension; anything but `.json` is CSV.
pub fn format_for_path(path: &Path) -> OutputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_samples(
    path: &Path,
    format: OutputFormat,
    params: FrameParams,
    kind: Kind,
    values: &[Complex64],
) -> anyhow::Result<()> {
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(out, "flat_index,re,im,magnitude")?;
            for (i, z) in values.iter().enumerate() {
                writeln!(
                    out,
                    "{i},{},{},{}",
                    fmt_real(z.re),
                    fmt_real(z.im),
                    fmt_real(z.norm())
                )?;
            }
        }
        OutputFormat::Json => {
            let env = Envelope {
                params: Dims {
                    m: params.vector_size(),
                    n: params.ifft_size(),
                },
                layout: kind.layout(),
                kind,
                data: values
                    .iter()
                    .enumerate()
                    .map(|(flat_index, z)| Sample {
                        flat_index,
                        re: z.re,
                        im: z.im,
                        magnitude: z.norm(),
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut out, &env)?;
            writeln!(out)?;
        }
    }
    out.flush()
        .with_context(|| format!("writing {}", path.display()))
}

/// Reads a sample file. CSV files carry no dimensions, so `dims` is
/// required for them; for JSON it is checked against the envelope.
pub fn read_samples(
    path: &Path,
    kind: Kind,
    dims: Option<FrameParams>,
) -> anyhow::Result<(FrameParams, Vec<Complex64>)> {
    match format_for_path(path) {
        OutputFormat::Csv => {
            let Some(params) = dims else {
                bail!("{}: CSV input needs --m and --n", path.display());
            };
            let values = read_csv(path)?;
            check_count(path, params, values.len())?;
            Ok((params, values))
        }
        OutputFormat::Json => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let env: Envelope = serde_json::from_reader(std::io::BufReader::new(file))
                .with_context(|| format!("parsing {}", path.display()))?;
            if env.kind != kind {
                bail!(
                    "{}: expected a {kind:?} file, found {:?}",
                    path.display(),
                    env.kind
                );
            }
            if env.layout != kind.layout() {
                bail!(
                    "{}: layout {:?} does not match {kind:?}",
                    path.display(),
                    env.layout
                );
            }
            let params = FrameParams::new(env.params.m, env.params.n)
                .with_context(|| format!("{}: bad dimensions", path.display()))?;
            if let Some(want) = dims {
                if want != params {
                    bail!(
                        "{}: expected (M,N)=({},{}), file has ({},{})",
                        path.display(),
                        want.vector_size(),
                        want.ifft_size(),
                        env.params.m,
                        env.params.n
                    );
                }
            }
            for (i, s) in env.data.iter().enumerate() {
                if s.flat_index != i {
                    bail!(
                        "{}: data entry {i} has flat_index {}",
                        path.display(),
                        s.flat_index
                    );
                }
            }
            check_count(path, params, env.data.len())?;
            Ok((
                params,
                env.data
                    .iter()
                    .map(|s| Complex64::new(s.re, s.im))
                    .collect(),
            ))
        }
    }
}

#[derive(Deserialize)]
struct CsvRow {
    flat_index: usize,
    re: f64,
    im: f64,
}

fn read_csv(path: &Path) -> anyhow::Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    for col in ["flat_index", "re", "im"] {
        if !headers.iter().any(|h| h == col) {
            bail!("{}: line 1: missing column {col:?}", path.display());
        }
    }
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("reading {}", path.display()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .with_context(|| format!("{}: line {line}", path.display()))?;
        if row.flat_index != values.len() {
            bail!(
                "{}: line {line}: expected flat_index {}, found {}",
                path.display(),
                values.len(),
                row.flat_index
            );
        }
        if !row.re.is_finite() || !row.im.is_finite() {
            bail!("{}: line {line}: non-finite value", path.display());
        }
        values.push(Complex64::new(row.re, row.im));
    }
    Ok(values)
}

fn check_count(path: &Path, params: FrameParams, got: usize) -> anyhow::Result<()> {
    if got != params.len() {
        bail!(
            "{}: expected {} samples for (M,N)=({},{}), found {got}",
            path.display(),
            params.len(),
            params.vector_size(),
            params.ifft_size()
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
}

#[derive(Serialize)]
struct Table<'a> {
    columns: &'a [&'a str],
    rows: Vec<Vec<serde_json::Value>>,
}

/// A small numeric table, e.g. per-position mean magnitudes.
pub fn write_table(
    path: &Path,
    format: OutputFormat,
    columns: &[&str],
    rows: &[Vec<Cell>],
) -> anyhow::Result<()> {
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|c| match *c {
                        Cell::Int(i) => i.to_string(),
                        Cell::Real(x) => fmt_real(x),
                    })
                    .collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        OutputFormat::Json => {
            let table = Table {
                columns,
                rows: rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| match *c {
                                Cell::Int(i) => serde_json::Value::from(i),
                                Cell::Real(x) => serde_json::Value::from(x),
                            })
                            .collect()
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut out, &table)?;
            writeln!(out)?;
        }
    }
    out.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}
