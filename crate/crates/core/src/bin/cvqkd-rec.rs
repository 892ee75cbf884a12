use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use cvqkd_rec::degree_dist::{DegreeDistribution, Preset};
use cvqkd_rec::peg::{self, PegOptions};
use cvqkd_rec::sim::{self, CodeSource, Mode, SimConfig, Simulator, Target};
use cvqkd_rec::Error;

#[derive(Parser)]
#[command(name = "cvqkd-rec", version, about = "Rate-adaptive CV-QKD reconciliation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Original,
    Ra,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo FER and efficiency at one or more SNRs.
    Simulate {
        /// Preset name (rate_0_1, rate_0_05, rate_0_02) or alist path.
        #[arg(long)]
        code: String,
        /// Code length for presets; checked against loaded matrices.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Channel SNR; a comma-separated list runs a sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        snr: Vec<f64>,
        #[arg(long, value_enum, default_value = "original")]
        mode: ModeArg,
        /// Target efficiency; the rate is β·C(snr).
        #[arg(long, conflicts_with = "target_rate")]
        target_beta: Option<f64>,
        #[arg(long)]
        target_rate: Option<f64>,
        /// Punctured plus shortened positions (default n/100).
        #[arg(long)]
        total_modified: Option<usize>,
        #[arg(long, default_value_t = 100)]
        frames: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// PEG seed for preset codes (default: --seed).
        #[arg(long)]
        matrix_seed: Option<u64>,
        /// Zero channel noise; LLRs still use --snr.
        #[arg(long)]
        noiseless: bool,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// CSV output (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds a parity-check matrix and writes alist plus sidecar.
    BuildMatrix {
        /// Preset name or distribution text file.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = PegOptions::default().max_depth)]
        max_depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recomputes R, β and β° of the reference rate-adaptation table.
    Table2 {
        /// 0.1, 0.05 or 0.02.
        #[arg(long)]
        block: Preset,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn is_config_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::Config(_)
                | Error::Domain(_)
                | Error::InfeasiblePlan(_)
                | Error::UnknownPreset(_)
                | Error::InvalidDistribution(_)
                | Error::MissingThreshold
        )
    )
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_distribution(spec: &str) -> anyhow::Result<DegreeDistribution> {
    if let Ok(p) = spec.parse::<Preset>() {
        return Ok(p.distribution());
    }
    if !Path::new(spec).exists() {
        return Err(Error::Config(format!("`{spec}` is neither a preset nor an existing file")).into());
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading distribution {spec}"))?;
    let dist: DegreeDistribution = text.parse()?;
    dist.validate()?;
    Ok(dist)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            code,
            n,
            snr,
            mode,
            target_beta,
            target_rate,
            total_modified,
            frames,
            iters,
            seed,
            matrix_seed,
            noiseless,
            threads,
            out,
        } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .context("configuring the thread pool")?;
            }
            let mode = match mode {
                ModeArg::Original => Mode::Original,
                ModeArg::Ra => Mode::RateAdaptive,
            };
            let target = target_beta.map(Target::Beta).or(target_rate.map(Target::Rate));
            let code: CodeSource = code.parse()?;
            let mut base = SimConfig::new(code, n, snr[0]);
            base.mode = mode;
            base.target = target;
            base.total_modified = total_modified;
            base.frames = frames;
            base.max_iters = iters;
            base.seed = seed;
            base.matrix_seed = matrix_seed;
            base.noiseless = noiseless;
            for &s in &snr {
                SimConfig { snr: s, ..base.clone() }.validate()?;
            }
            let matrix = sim::obtain_matrix(&base.code, base.n, base.matrix_seed())?;
            let mut rows = Vec::with_capacity(snr.len());
            for &s in &snr {
                let sim = Simulator::with_matrix(SimConfig { snr: s, ..base.clone() }, matrix.clone())?;
                let summary = sim.run_campaign()?;
                eprintln!(
                    "snr={} R={:.6} s={} p={} FER={} mean_beta={:.6}",
                    s, summary.rate, summary.s, summary.p, summary.fer, summary.mean_beta
                );
                rows.push(summary);
            }
            eprintln!("mean_beta = (1/frames)·Σβᵢ, βᵢ = R/C(snr) on success and 0 on failure");
            sim::write_csv(&rows, output(out.as_deref())?)?;
        }
        Command::BuildMatrix {
            dist,
            n,
            seed,
            max_depth,
            out,
        } => {
            let dist = load_distribution(&dist)?;
            let options = PegOptions {
                max_depth,
                ..PegOptions::default()
            };
            let h = peg::build_matrix_with(&dist, n, seed, options)?;
            h.save(&out)?;
            eprintln!("wrote {} ({} x {}, {} edges)", out.display(), h.m(), h.n(), h.num_edges());
        }
        Command::Table2 { block, out } => {
            let checks = sim::reproduce_table2(block)?;
            sim::write_table2_csv(&checks, output(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
