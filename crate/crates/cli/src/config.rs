//! Experiment configuration: preset defaults, an optional TOML file, and
//! command-line overrides, applied in that order.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use vofdm_core::{FrameParams, NullSpec, PrecodeMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// M=N=4, first symbol vector zeroed.
    Fig1,
    /// M=8, N=64, first 16 symbol vectors zeroed.
    Fig2,
    /// M=8, N=64, last two components of one y_k nulled; Monte Carlo means.
    Fig3,
    /// Precoded-tail means for a sweep of vector sizes, N=64.
    Fig3b,
    /// M=8, N=64, last 32 spectrum bins nulled; frame, PAPR and means.
    Fig4suite,
    /// Everything from the config file / flags.
    Custom,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig3b => "fig3b",
            Preset::Fig4suite => "fig4suite",
            Preset::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    #[default]
    None,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    #[default]
    Exact,
    MinNorm,
}

impl From<SolveMode> for PrecodeMode {
    fn from(m: SolveMode) -> Self {
        match m {
            SolveMode::Exact => PrecodeMode::Exact,
            SolveMode::MinNorm => PrecodeMode::MinNorm,
        }
    }
}

/// A null spec as written in config files and on the command line. `k` may
/// name a single vector or an inclusive range applied to each vector in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullRule {
    pub k: VectorRange,
    pub nulls: Vec<usize>,
    pub precoded: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorRange {
    One(usize),
    Span([usize; 2]),
}

impl VectorRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        match *self {
            VectorRange::One(k) => k..=k,
            VectorRange::Span([a, b]) => a..=b,
        }
    }
}

impl NullRule {
    pub fn expand(&self) -> anyhow::Result<Vec<NullSpec>> {
        self.k
            .iter()
            .map(|k| {
                NullSpec::new(k, self.nulls.clone(), self.precoded.clone())
                    .with_context(|| format!("null rule for vector {k}"))
            })
            .collect()
    }
}

fn parse_list(s: &str) -> anyhow::Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad index {t:?}"))
        })
        .collect()
}

/// `K:Z:P` where `K` is `k` or `a-b`, and `Z`, `P` are comma-separated
/// index lists, e.g. `32-63:7:7` or `1:6,7:4,5,6,7`.
impl FromStr for NullRule {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("null rule {s:?} must look like K:Z:P");
        }
        let k = match parts[0].split_once('-') {
            Some((a, b)) => {
                let (a, b) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty vector range {}", parts[0]);
                }
                VectorRange::Span([a, b])
            }
            None => VectorRange::One(parts[0].trim().parse()?),
        };
        Ok(NullRule {
            k,
            nulls: parse_list(parts[1])?,
            precoded: parse_list(parts[2])?,
        })
    }
}

/// Optional settings, as read from a TOML file or collected from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// Vector index precoded in the single-vector Monte Carlo presets.
    pub k: Option<usize>,
    pub m_values: Option<Vec<usize>>,
    pub zero_vectors: Option<Vec<usize>>,
    pub nulls: Option<Vec<NullRule>>,
    pub mode: Option<SolveMode>,
    pub format: Option<OutputFormat>,
    pub plot: Option<PlotKind>,
}

impl ConfigOverrides {
    pub fn from_toml_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: ConfigOverrides) -> Self {
        ConfigOverrides {
            m: other.m.or(self.m),
            n: other.n.or(self.n),
            seed: other.seed.or(self.seed),
            trials: other.trials.or(self.trials),
            k: other.k.or(self.k),
            m_values: other.m_values.or(self.m_values),
            zero_vectors: other.zero_vectors.or(self.zero_vectors),
            nulls: other.nulls.or(self.nulls),
            mode: other.mode.or(self.mode),
            format: other.format.or(self.format),
            plot: other.plot.or(self.plot),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: usize = 1000;
/// Vector index used by the single-vector precoding presets.
pub const DEFAULT_PRECODED_VECTOR: usize = 1;
pub const FIG3B_VECTOR_SIZES: [usize; 7] = [4, 6, 8, 10, 12, 14, 16];

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub k: usize,
    pub m_values: Vec<usize>,
    pub zero_vectors: Vec<usize>,
    pub nulls: Vec<NullRule>,
    pub mode: SolveMode,
    pub format: OutputFormat,
    pub plot: PlotKind,
}

impl ExperimentConfig {
    /// Preset defaults, then `file`, then `flags`.
    pub fn resolve(
        preset: Preset,
        file: Option<ConfigOverrides>,
        flags: ConfigOverrides,
    ) -> anyhow::Result<Self> {
        let merged = Self::defaults(preset)
            .overlay(file.unwrap_or_default())
            .overlay(flags);
        let m = merged.m.unwrap_or(8);
        let n = merged.n.unwrap_or(64);
        let k = merged.k.unwrap_or(DEFAULT_PRECODED_VECTOR);
        let nulls = match (preset, merged.nulls) {
            (_, Some(rules)) => rules,
            (Preset::Fig3, None) => vec![trailing_rule(VectorRange::One(k), 2, m)?],
            (Preset::Fig4suite, None) => {
                if n < 2 {
                    bail!("fig4suite needs N >= 2");
                }
                vec![trailing_rule(VectorRange::Span([n / 2, n - 1]), 1, m)?]
            }
            (_, None) => Vec::new(),
        };
        let cfg = ExperimentConfig {
            preset,
            m,
            n,
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            trials: merged.trials.unwrap_or(1),
            k,
            m_values: merged.m_values.unwrap_or_default(),
            zero_vectors: merged.zero_vectors.unwrap_or_default(),
            nulls,
            mode: merged.mode.unwrap_or_default(),
            format: merged.format.unwrap_or_default(),
            plot: merged.plot.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn defaults(preset: Preset) -> ConfigOverrides {
        let base = ConfigOverrides {
            seed: Some(DEFAULT_SEED),
            ..Default::default()
        };
        match preset {
            Preset::Fig1 => ConfigOverrides {
                m: Some(4),
                n: Some(4),
                trials: Some(1),
                zero_vectors: Some(vec![0]),
                ..base
            },
            Preset::Fig2 => ConfigOverrides {
                m: Some(8),
                n: Some(64),
                trials: Some(1),
                zero_vectors: Some((0..16).collect()),
                ..base
            },
            Preset::Fig3 | Preset::Fig4suite => ConfigOverrides {
                m: Some(8),
                n: Some(64),
                trials: Some(DEFAULT_TRIALS),
                ..base
            },
            Preset::Fig3b => ConfigOverrides {
                n: Some(64),
                trials: Some(DEFAULT_TRIALS),
                m_values: Some(FIG3B_VECTOR_SIZES.to_vec()),
                ..base
            },
            Preset::Custom => ConfigOverrides {
                m: Some(8),
                n: Some(64),
                trials: Some(1),
                ..base
            },
        }
    }

    fn validate(&self) -> anyhow::Result<()> {
        FrameParams::new(self.m, self.n).context("frame size")?;
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.preset == Preset::Fig3b && self.m_values.iter().any(|&m| m < 3) {
            bail!("fig3b vector sizes must be at least 3 to leave free positions");
        }
        if matches!(self.preset, Preset::Fig3 | Preset::Fig3b) && self.k >= self.n {
            bail!("precoded vector {} out of range for N={}", self.k, self.n);
        }
        Ok(())
    }

    pub fn params(&self) -> FrameParams {
        FrameParams::new(self.m, self.n).expect("validated")
    }

    pub fn null_specs(&self) -> anyhow::Result<Vec<NullSpec>> {
        let mut out = Vec::new();
        for rule in &self.nulls {
            out.extend(rule.expand()?);
        }
        Ok(out)
    }
}

fn trailing_rule(k: VectorRange, count: usize, m: usize) -> anyhow::Result<NullRule> {
    if count > m {
        bail!("cannot null {count} components of a size-{m} vector");
    }
    let tail: Vec<usize> = (m - count..m).collect();
    Ok(NullRule {
        k,
        nulls: tail.clone(),
        precoded: tail,
    })
}
