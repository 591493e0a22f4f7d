//! Single-step pipeline commands over frame files.

use std::path::Path;

use anyhow::Context;
use vofdm_core::{
    modulate, papr, precode_grid, spectrum, FrameParams, NullSpec, PrecodeMode, SymbolGrid,
    TimeFrame,
};

use crate::config::NullRule;
use crate::io::{format_for_path, read_samples, write_samples, Kind};
use crate::presets::PaprReport;

pub fn modulate_file(input: &Path, output: &Path, dims: Option<FrameParams>) -> anyhow::Result<()> {
    let (params, values) = read_samples(input, Kind::Grid, dims)?;
    let grid = SymbolGrid::from_flat(params, values)?;
    let frame = modulate(&grid)?;
    write_samples(
        output,
        format_for_path(output),
        params,
        Kind::Frame,
        frame.samples(),
    )
}

pub fn spectrum_file(input: &Path, output: &Path, dims: Option<FrameParams>) -> anyhow::Result<()> {
    let (params, values) = read_samples(input, Kind::Frame, dims)?;
    let frame = TimeFrame::new(params, values)?;
    let s = spectrum(&frame)?;
    write_samples(
        output,
        format_for_path(output),
        params,
        Kind::Spectrum,
        s.bins(),
    )
}

/// Entries of the input grid at each rule's precoded positions are
/// placeholders and get replaced.
pub fn precode_file(
    input: &Path,
    output: &Path,
    dims: Option<FrameParams>,
    rules: &[NullRule],
    mode: PrecodeMode,
) -> anyhow::Result<()> {
    let (params, values) = read_samples(input, Kind::Grid, dims)?;
    let grid = SymbolGrid::from_flat(params, values)?;
    let mut specs: Vec<NullSpec> = Vec::new();
    for rule in rules {
        specs.extend(rule.expand()?);
    }
    let out = precode_grid(&grid, &specs, mode).context("precoding")?;
    write_samples(
        output,
        format_for_path(output),
        params,
        Kind::Grid,
        out.as_flat(),
    )
}

pub fn papr_file(
    input: &Path,
    output: Option<&Path>,
    dims: Option<FrameParams>,
) -> anyhow::Result<PaprReport> {
    let (params, values) = read_samples(input, Kind::Frame, dims)?;
    let p = papr(&TimeFrame::new(params, values)?)?;
    let report = PaprReport {
        ratio: p.ratio,
        db: p.db(),
    };
    if let Some(path) = output {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}
