use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dcp::bandwidth::{category_summary, Accounting};
use dcp::codec::Scheme;
use dcp::config::{ConfigOverrides, ExperimentConfig};
use dcp::engine::{run_traces, RunResult, VdcpSizing};
use dcp::fvc::{Associativity, Policy};
use dcp::report;
use dcp::synth::{self, Generator, SynthParams};
use dcp::trace::{load_trace, write_trace, FrameFormat, SurfaceTrace};
use dcp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dcpbench",
    version,
    about = "Framebuffer palette compression benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress traces and report per-frame and per-workload rates.
    Compress {
        /// Trace directories (each with a manifest.json).
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-run traces over a range of one parameter.
    Sweep {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, value_enum)]
        dimension: Dimension,
        /// Comma-separated values, e.g. `16,32,64`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Per-frame coherence metrics.
    Analyze {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, default_value = "dcp-out")]
        out: PathBuf,
    },
    /// Write a synthetic trace directory.
    Gen {
        #[arg(long, default_value = "ui-like")]
        generator: Generator,
        #[arg(long, default_value_t = 720)]
        width: u32,
        #[arg(long, default_value_t = 1280)]
        height: u32,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 12)]
        palette_size: u32,
        #[arg(long, default_value_t = 4)]
        scroll: u32,
        #[arg(long, default_value_t = 3)]
        dirty_rects: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Frame file format: rgba, ppm or png.
        #[arg(long, default_value = "rgba")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Dimension {
    FvcSize,
    Policy,
    Associativity,
    PixelSampling,
    FrameSampling,
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    fvc_size: Option<usize>,
    /// lfc, 2lfc, lru or random.
    #[arg(long)]
    policy: Option<Policy>,
    /// full, direct, or a way count such as 4.
    #[arg(long)]
    assoc: Option<Associativity>,
    #[arg(long)]
    pixel_sampling: Option<u32>,
    #[arg(long)]
    frame_sampling: Option<u32>,
    #[arg(long)]
    ccd_size: Option<usize>,
    /// full or adaptive.
    #[arg(long)]
    vdcp_sizing: Option<VdcpSizing>,
    /// Coverage threshold below which a period runs uncompressed.
    #[arg(long)]
    ct: Option<f64>,
    /// payload, payload+csb or full.
    #[arg(long)]
    accounting: Option<Accounting>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Round-trip check every block instead of a sample.
    #[arg(long)]
    verify_full: bool,
    /// Fraction of blocks round-tripped when not verifying fully.
    #[arg(long)]
    verify_fraction: Option<f64>,
    /// Run on one thread.
    #[arg(long)]
    serial: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::load(path)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            scheme: self.scheme,
            fvc_size: self.fvc_size,
            policy: self.policy,
            assoc: self.assoc,
            pixel_sampling: self.pixel_sampling,
            frame_sampling: self.frame_sampling,
            ccd_size: self.ccd_size,
            vdcp_sizing: self.vdcp_sizing,
            ct: self.ct,
            accounting: self.accounting,
            seed: self.seed,
            verify_full: self.verify_full.then_some(true),
            verify_fraction: self.verify_fraction,
            parallel: self.serial.then_some(false),
            out: self.out.clone(),
        };
        let cfg = file.layer(flags).apply(ExperimentConfig::default());
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<SurfaceTrace>> {
    paths.iter().map(load_trace).collect()
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn print_summary(runs: &[RunResult]) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<32} {:<10} {:>7} {:>10}",
        "workload", "category", "frames", "rate"
    )?;
    for r in runs {
        let s = &r.summary;
        writeln!(
            out,
            "{:<32} {:<10} {:>7} {:>10.4}",
            s.name, s.category, s.frames, s.rate
        )?;
    }
    let owned: Vec<_> = runs.iter().map(|r| r.summary.clone()).collect();
    for (category, rate) in category_summary(&owned)? {
        writeln!(out, "harmonic mean {category:<18} {rate:>28.4}")?;
    }
    Ok(())
}

fn compress(traces: &[PathBuf], run: &RunArgs) -> Result<()> {
    let cfg = run.resolve()?;
    let traces = load_all(traces)?;
    let runs = run_traces(&traces, &cfg.run()?)?;
    report::write_frames_csv(create(&cfg.out, "frames.csv")?, &runs, &cfg)?;
    report::write_summary_json(create(&cfg.out, "summary.json")?, &runs, &cfg)?;
    print_summary(&runs)
}

fn parse<T: std::str::FromStr<Err = Error>>(v: &str) -> Result<T> {
    v.parse()
}

fn number<T: std::str::FromStr>(v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("not a number: {v:?}")))
}

fn with_value(base: &ExperimentConfig, dim: Dimension, v: &str) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match dim {
        Dimension::FvcSize => cfg.fvc_size = number(v)?,
        Dimension::Policy => cfg.policy = parse(v)?,
        Dimension::Associativity => cfg.assoc = parse(v)?,
        Dimension::PixelSampling => cfg.pixel_sampling = number(v)?,
        Dimension::FrameSampling => cfg.frame_sampling = number(v)?,
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(traces: &[PathBuf], dim: Dimension, values: &[String], run: &RunArgs) -> Result<()> {
    let base = run.resolve()?;
    let traces = load_all(traces)?;
    let configs: Vec<_> = values
        .iter()
        .map(|v| with_value(&base, dim, v))
        .collect::<Result<_>>()?;
    let mut all = Vec::with_capacity(values.len());
    for cfg in &configs {
        let mut rc = cfg.run()?;
        rc.relative_coverage = dim == Dimension::FvcSize;
        all.push(run_traces(&traces, &rc)?);
    }
    let name = Dimension::to_possible_value(&dim)
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let rows = report::sweep_rows(&name, values, &all, &base);
    report::write_rows_csv(create(&base.out, "sweep.csv")?, &rows)?;
    let mut out = io::stdout().lock();
    for r in &rows {
        writeln!(
            out,
            "{name}={:<8} {:<32} rate {:>10} normalized {:>9}",
            r.value, r.workload, r.rate, r.normalized_rate
        )?;
    }
    Ok(())
}

fn analyze(traces: &[PathBuf], out: &Path) -> Result<()> {
    let mut rows = Vec::new();
    for t in load_all(traces)? {
        rows.extend(report::analyze(&t)?);
    }
    report::write_rows_csv(create(out, "analyze.csv")?, &rows)?;
    println!(
        "{} frame rows written to {}",
        rows.len(),
        out.join("analyze.csv").display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compress { traces, run } => compress(&traces, &run),
        Command::Sweep {
            traces,
            dimension,
            values,
            run,
        } => sweep(&traces, dimension, &values, &run),
        Command::Analyze { traces, out } => analyze(&traces, &out),
        Command::Gen {
            generator,
            width,
            height,
            frames,
            palette_size,
            scroll,
            dirty_rects,
            seed,
            format,
            out,
        } => {
            let format = match format.as_str() {
                "rgba" | "raw" => FrameFormat::Raw,
                "ppm" => FrameFormat::Ppm,
                "png" => FrameFormat::Png,
                other => return Err(Error::Config(format!("unknown frame format {other:?}"))),
            };
            let params = SynthParams {
                generator,
                width,
                height,
                frame_count: frames,
                palette_size,
                scroll,
                dirty_rects,
                seed,
            };
            let trace = synth::generate(&params)?;
            write_trace(&trace, &out, format)?;
            println!("wrote {} frames to {}", trace.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcpbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
