//! Experiment presets. Each run writes its data files plus `summary.json`
//! into the output directory and reports pass/fail per check.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use vofdm_core::{
    averaged_magnitudes, draw_grid, modulate, papr, precode_grid, spectrum, trial_grids,
    verify_nulls, Complex64, FillPlan, FrameParams, MagnitudeStats, NullSpec, PrecodeMode,
    SpectrumFrame, SymbolGrid, SymbolSource, TimeFrame,
};

use crate::config::{ExperimentConfig, PlotKind, Preset};
use crate::io::{write_samples, write_table, Cell, Kind};
use crate::plot::stem_svg;

/// Bins of zeroed symbol vectors.
pub const ZERO_VECTOR_TOL: f64 = 1e-12;
/// Bins nulled by precoding.
pub const PRECODED_NULL_TOL: f64 = 1e-10;
/// Floor for bins that are not forced to zero.
pub const NONZERO_FLOOR: f64 = 1e-3;
/// Relative agreement of precoded-position means between two seeds.
pub const STABILITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: &'static str,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            comparison: "<=",
            limit,
            pass: value <= limit,
        }
    }

    fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            comparison: ">",
            limit,
            pass: value > limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            comparison: ">=",
            limit,
            pass: value >= limit,
        }
    }

    fn finite(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            value,
            comparison: "finite",
            limit: f64::MAX,
            pass: value.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PaprReport {
    pub ratio: f64,
    pub db: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub preset: String,
    pub m: Option<usize>,
    pub n: usize,
    pub m_values: Vec<usize>,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub papr: Option<PaprReport>,
    pub mean_magnitudes: Vec<f64>,
    pub files: Vec<String>,
    pub pass: bool,
    pub metadata: Metadata,
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    checks: Vec<Check>,
    files: Vec<String>,
    papr: Option<PaprReport>,
    mean_magnitudes: Vec<f64>,
}

impl<'a> Run<'a> {
    fn path(&mut self, stem: &str, ext: &str) -> PathBuf {
        let name = format!("{stem}.{ext}");
        let path = self.dir.join(&name);
        self.files.push(name);
        path
    }

    fn samples(
        &mut self,
        stem: &str,
        kind: Kind,
        params: FrameParams,
        values: &[Complex64],
    ) -> anyhow::Result<()> {
        let path = self.path(stem, self.cfg.format.extension());
        write_samples(&path, self.cfg.format, params, kind, values)
    }

    fn table(&mut self, stem: &str, columns: &[&str], rows: &[Vec<Cell>]) -> anyhow::Result<()> {
        let path = self.path(stem, self.cfg.format.extension());
        write_table(&path, self.cfg.format, columns, rows)
    }

    fn plot(&mut self, stem: &str, title: &str, values: &[f64]) -> anyhow::Result<()> {
        if self.cfg.plot == PlotKind::Svg {
            let path = self.path(stem, "svg");
            fs::write(&path, stem_svg(title, values))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    fn frame_outputs(
        &mut self,
        drawn: &SymbolGrid,
        grid: &SymbolGrid,
    ) -> anyhow::Result<(TimeFrame, SpectrumFrame)> {
        let params = grid.params();
        let frame = modulate(grid)?;
        let spec = spectrum(&frame)?;
        self.samples("grid_input", Kind::Grid, params, drawn.as_flat())?;
        self.samples("grid", Kind::Grid, params, grid.as_flat())?;
        self.samples("frame", Kind::Frame, params, frame.samples())?;
        self.samples("spectrum", Kind::Spectrum, params, spec.bins())?;
        self.plot("spectrum", "spectrum magnitude", &magnitudes(spec.bins()))?;
        self.plot(
            "frame",
            "time-domain magnitude",
            &magnitudes(frame.samples()),
        )?;
        match papr(&frame) {
            Ok(p) => {
                self.papr = Some(PaprReport {
                    ratio: p.ratio,
                    db: p.db(),
                });
                self.checks.push(Check::at_least("papr", p.ratio, 1.0));
            }
            Err(vofdm_core::Error::ZeroFrame) => {}
            Err(e) => return Err(e.into()),
        }
        Ok((frame, spec))
    }

    fn finish(self) -> anyhow::Result<Summary> {
        let cfg = self.cfg;
        let summary = Summary {
            preset: cfg.preset.to_string(),
            m: (cfg.preset != Preset::Fig3b).then_some(cfg.m),
            n: cfg.n,
            m_values: if cfg.preset == Preset::Fig3b {
                cfg.m_values.clone()
            } else {
                Vec::new()
            },
            seed: cfg.seed,
            trials: cfg.trials,
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
            papr: self.papr,
            mean_magnitudes: self.mean_magnitudes,
            files: self.files,
            metadata: Metadata {
                tool: "vofdm",
                version: env!("CARGO_PKG_VERSION"),
            },
        };
        let path = self.dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(summary)
    }
}

fn magnitudes(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|z| z.norm()).collect()
}

/// Runs `cfg` and writes its artifacts into `dir` (created if missing).
pub fn run_preset(cfg: &ExperimentConfig, dir: &Path) -> anyhow::Result<Summary> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let run = Run {
        cfg,
        dir,
        checks: Vec::new(),
        files: Vec::new(),
        papr: None,
        mean_magnitudes: Vec::new(),
    };
    let result = match cfg.preset {
        Preset::Fig1 | Preset::Fig2 | Preset::Custom => single_frame(run),
        Preset::Fig3 | Preset::Fig4suite => monte_carlo(run),
        Preset::Fig3b => size_sweep(run),
    };
    result.with_context(|| format!("preset {}", cfg.preset))
}

fn zero_vector_bins(params: FrameParams, zero_vectors: &[usize]) -> Vec<usize> {
    zero_vectors
        .iter()
        .flat_map(|&k| (0..params.vector_size()).map(move |m| m * params.ifft_size() + k))
        .collect()
}

fn spec_null_bins(params: FrameParams, specs: &[NullSpec]) -> Vec<usize> {
    specs
        .iter()
        .flat_map(|s| s.flat_null_bins(params))
        .collect()
}

fn single_frame(mut run: Run<'_>) -> anyhow::Result<Summary> {
    let cfg = run.cfg;
    let params = cfg.params();
    let specs = cfg.null_specs()?;
    let mut plan = FillPlan::for_specs(&specs, params.vector_size());
    plan.zero_vectors = cfg.zero_vectors.iter().copied().collect();
    let drawn = draw_grid(&SymbolSource::bpsk(cfg.seed), params, &plan)?;
    let grid = precode_grid(&drawn, &specs, cfg.mode.into())?;
    let (frame, spec) = run.frame_outputs(&drawn, &grid)?;

    let zero_bins = zero_vector_bins(params, &cfg.zero_vectors);
    let null_bins = spec_null_bins(params, &specs);
    if !zero_bins.is_empty() {
        let r = verify_nulls(&frame, &zero_bins, ZERO_VECTOR_TOL)?;
        run.checks.push(Check::at_most(
            "zeroed-vector bins max magnitude",
            r.max_magnitude,
            ZERO_VECTOR_TOL,
        ));
    }
    if !null_bins.is_empty() {
        let r = verify_nulls(&frame, &null_bins, PRECODED_NULL_TOL)?;
        run.checks.push(Check::at_most(
            "precoded null bins max magnitude",
            r.max_magnitude,
            PRECODED_NULL_TOL,
        ));
    }
    if matches!(cfg.preset, Preset::Fig1 | Preset::Fig2) {
        let forced: BTreeSet<usize> = zero_bins.iter().chain(&null_bins).copied().collect();
        let floor = spec
            .bins()
            .iter()
            .enumerate()
            .filter(|(i, _)| !forced.contains(i))
            .map(|(_, z)| z.norm())
            .fold(f64::INFINITY, f64::min);
        if floor.is_finite() {
            run.checks.push(Check::above(
                "remaining bins min magnitude",
                floor,
                NONZERO_FLOOR,
            ));
        }
    }
    run.finish()
}

fn check_means(
    run: &mut Run<'_>,
    label: &str,
    stats: &MagnitudeStats,
    free: &[usize],
    precoded: &[usize],
) {
    run.checks.push(Check::at_most(
        format!("{label}null bins max magnitude over all trials"),
        stats.max_null_magnitude,
        PRECODED_NULL_TOL,
    ));
    let deviation = free
        .iter()
        .map(|&n| (stats.per_position_mean[n] - 1.0).abs())
        .fold(0.0, f64::max);
    run.checks.push(Check::at_most(
        format!("{label}free-position mean deviation from 1"),
        deviation,
        0.0,
    ));
    for &n in precoded {
        run.checks.push(Check::finite(
            format!("{label}precoded position {n} mean"),
            stats.per_position_mean[n],
        ));
    }
}

/// Positions free in every spec, and positions precoded in any spec.
fn position_split(specs: &[NullSpec], m: usize) -> (Vec<usize>, Vec<usize>) {
    let precoded: BTreeSet<usize> = specs
        .iter()
        .flat_map(|s| s.precoded().iter().copied())
        .collect();
    let free = (0..m).filter(|n| !precoded.contains(n)).collect();
    (free, precoded.into_iter().collect())
}

fn monte_carlo(mut run: Run<'_>) -> anyhow::Result<Summary> {
    let cfg = run.cfg;
    let params = cfg.params();
    let specs = cfg.null_specs()?;
    let mode: PrecodeMode = cfg.mode.into();
    let source = SymbolSource::bpsk(cfg.seed);
    let k_range: Vec<usize> = specs
        .iter()
        .map(|s| s.k())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if k_range.is_empty() {
        anyhow::bail!("no null specs to precode");
    }

    let (drawn, grid) = trial_grids(params, &specs, &source, 0, mode)?;
    let (frame, _) = run.frame_outputs(&drawn, &grid)?;
    let null_bins = spec_null_bins(params, &specs);
    let r = verify_nulls(&frame, &null_bins, PRECODED_NULL_TOL)?;
    run.checks.push(Check::at_most(
        "trial 0 null bins max magnitude",
        r.max_magnitude,
        PRECODED_NULL_TOL,
    ));

    let stats = averaged_magnitudes(params, &specs, &source, cfg.trials, &k_range, mode)?;
    let (free, precoded) = position_split(&specs, params.vector_size());
    check_means(&mut run, "", &stats, &free, &precoded);

    if cfg.preset == Preset::Fig3 {
        let other_seed = cfg.seed.wrapping_add(1);
        let other = averaged_magnitudes(
            params,
            &specs,
            &SymbolSource::bpsk(other_seed),
            cfg.trials,
            &k_range,
            mode,
        )?;
        let drift = precoded
            .iter()
            .map(|&n| relative_change(stats.per_position_mean[n], other.per_position_mean[n]))
            .fold(0.0, f64::max);
        run.checks.push(Check::at_most(
            format!("precoded mean drift vs seed {other_seed}"),
            drift,
            STABILITY_TOL,
        ));
    }

    let rows: Vec<Vec<Cell>> = stats
        .per_position_mean
        .iter()
        .enumerate()
        .map(|(n, &v)| vec![Cell::Int(n), Cell::Real(v)])
        .collect();
    run.table("magnitudes", &["position", "mean_magnitude"], &rows)?;
    run.plot(
        "magnitudes",
        "averaged magnitudes per position",
        &stats.per_position_mean,
    )?;
    run.mean_magnitudes = stats.per_position_mean;
    run.finish()
}

fn size_sweep(mut run: Run<'_>) -> anyhow::Result<Summary> {
    let cfg = run.cfg;
    let mode: PrecodeMode = cfg.mode.into();
    let source = SymbolSource::bpsk(cfg.seed);
    let mut rows = Vec::new();
    let mut tail_means = Vec::new();
    for &m in &cfg.m_values {
        let params = FrameParams::new(m, cfg.n)?;
        let spec = NullSpec::trailing(cfg.k, 2, m)?;
        let stats = averaged_magnitudes(
            params,
            std::slice::from_ref(&spec),
            &source,
            cfg.trials,
            &[cfg.k],
            mode,
        )
        .with_context(|| format!("M={m}"))?;
        let free = spec.free_positions(m);
        check_means(
            &mut run,
            &format!("M={m}: "),
            &stats,
            &free,
            spec.precoded(),
        );
        for &n in spec.precoded() {
            rows.push(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::Real(stats.per_position_mean[n]),
            ]);
            tail_means.push(stats.per_position_mean[n]);
        }
    }
    run.table(
        "precoded_means",
        &["m", "position", "mean_magnitude"],
        &rows,
    )?;
    run.plot(
        "precoded_means",
        "precoded-part averaged magnitudes by vector size",
        &tail_means,
    )?;
    run.mean_magnitudes = tail_means;
    run.finish()
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_bins_are_strided() {
        let p = FrameParams::new(4, 4).unwrap();
        assert_eq!(zero_vector_bins(p, &[0]), vec![0, 4, 8, 12]);
        let p = FrameParams::new(8, 64).unwrap();
        let bins = zero_vector_bins(p, &(0..16).collect::<Vec<_>>());
        assert_eq!(bins.len(), 128);
        assert!(bins.iter().all(|b| b % 64 < 16));
    }

    #[test]
    fn checks_compare_as_named() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::above("a", 1.0, 1.0).pass);
        assert!(Check::at_least("a", 1.0, 1.0).pass);
        assert!(!Check::finite("a", f64::NAN).pass);
        assert!((relative_change(1.0, 1.04) - 0.04 / 1.04).abs() < 1e-15);
        assert_eq!(relative_change(0.0, 0.0), 0.0);
    }
}
