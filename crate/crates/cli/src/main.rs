use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use vofdm_cli::config::{
    ConfigOverrides, ExperimentConfig, NullRule, OutputFormat, PlotKind, Preset, SolveMode,
};
use vofdm_cli::generic;
use vofdm_cli::run_preset;
use vofdm_core::FrameParams;

#[derive(Parser)]
#[command(
    name = "vofdm",
    version,
    about = "Vector OFDM spectrum analysis and spectral-null precoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment preset and write its data files.
    Run(RunArgs),
    /// Modulate a symbol grid into a time frame.
    Modulate(PipeArgs),
    /// Compute the spectrum of a time frame.
    Spectrum(PipeArgs),
    /// Precode a symbol grid to force spectral nulls.
    Precode(PrecodeArgs),
    /// Peak-to-average power ratio of a time frame.
    Papr(PaprArgs),
}

#[derive(Args)]
struct RunArgs {
    preset: Preset,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Vector index precoded by fig3/fig3b.
    #[arg(long)]
    k: Option<usize>,
    /// Null rule K:Z:P (repeatable), e.g. 32-63:7:7.
    #[arg(long = "null")]
    nulls: Vec<NullRule>,
    #[arg(long, value_enum)]
    mode: Option<SolveMode>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, value_enum)]
    plot: Option<PlotKind>,
    /// TOML file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Dims {
    /// Vector size (required for CSV input).
    #[arg(long)]
    m: Option<usize>,
    /// IFFT size (required for CSV input).
    #[arg(long)]
    n: Option<usize>,
}

impl Dims {
    fn params(&self) -> anyhow::Result<Option<FrameParams>> {
        match (self.m, self.n) {
            (Some(m), Some(n)) => Ok(Some(FrameParams::new(m, n)?)),
            (None, None) => Ok(None),
            _ => anyhow::bail!("--m and --n must be given together"),
        }
    }
}

#[derive(Args)]
struct PipeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    dims: Dims,
}

#[derive(Args)]
struct PrecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    dims: Dims,
    /// Null rule K:Z:P (repeatable).
    #[arg(long = "null", required = true)]
    nulls: Vec<NullRule>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: SolveMode,
}

#[derive(Args)]
struct PaprArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    dims: Dims,
}

fn run(args: RunArgs) -> anyhow::Result<bool> {
    let file = args
        .config
        .as_deref()
        .map(ConfigOverrides::from_toml_file)
        .transpose()?;
    let flags = ConfigOverrides {
        m: args.m,
        n: args.n,
        seed: args.seed,
        trials: args.trials,
        k: args.k,
        nulls: (!args.nulls.is_empty()).then_some(args.nulls),
        mode: args.mode,
        format: args.format,
        plot: args.plot,
        ..Default::default()
    };
    let cfg = ExperimentConfig::resolve(args.preset, file, flags)?;
    let summary = run_preset(&cfg, &args.out)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    for c in summary.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: {:e} {} {:e}",
            c.name, c.value, c.comparison, c.limit
        );
    }
    Ok(summary.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Modulate(a) => a
            .dims
            .params()
            .and_then(|d| generic::modulate_file(&a.input, &a.out, d))
            .map(|_| true),
        Command::Spectrum(a) => a
            .dims
            .params()
            .and_then(|d| generic::spectrum_file(&a.input, &a.out, d))
            .map(|_| true),
        Command::Precode(a) => a
            .dims
            .params()
            .and_then(|d| generic::precode_file(&a.input, &a.out, d, &a.nulls, a.mode.into()))
            .map(|_| true),
        Command::Papr(a) => a
            .dims
            .params()
            .and_then(|d| generic::papr_file(&a.input, a.out.as_deref(), d))
            .and_then(|r| {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&r).context("encoding report")?
                );
                Ok(true)
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
