//! Monte-Carlo reconciliation campaigns.
//!
//! Every frame draws its randomness from `ChaCha8Rng::seed_from_u64(seed)`
//! on stream `frame_index`, so a campaign is independent of thread count and
//! frame scheduling. Gaussian samples use the ziggurat sampler of
//! `rand_distr::StandardNormal`. Per frame the order of draws is fixed:
//! plan seed, then for each 8-sample block `x`, `z` and the 8 bits of `u`,
//! then the punctured bits of Bob's frame.
//!
//! Campaign efficiency is `mean_beta = (1/frames)·Σ βᵢ` with `βᵢ = R/C(snr)`
//! on success and `0` on failure, i.e. `(1 − FER)·R/C(snr)`.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decoder::{self, DecodeJob};
use crate::degree_dist::Preset;
use crate::matrix::ParityCheckMatrix;
use crate::multidim::{self, Block, OrthogonalFamily, DIM};
use crate::rate_adapt::{self, RateAdaptPlan};
use crate::{peg, Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

/// SNR at which each preset's original code starts decoding in the
/// reference experiments. Below it the original protocol is counted as a
/// failure with zero efficiency.
pub fn optimal_snr(preset: Preset) -> f64 {
    match preset {
        Preset::Rate0_1 => 0.159,
        Preset::Rate0_05 => 0.075,
        Preset::Rate0_02 => 0.029,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    Preset(Preset),
    /// alist file, optionally with its `.meta` sidecar.
    Path(PathBuf),
}

impl FromStr for CodeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Preset>() {
            Ok(p) => Ok(CodeSource::Preset(p)),
            Err(_) => Ok(CodeSource::Path(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for CodeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSource::Preset(p) => write!(f, "{p}"),
            CodeSource::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Original,
    RateAdaptive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Original => "original",
            Mode::RateAdaptive => "ra",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Mode::Original),
            "ra" | "rate_adaptive" => Ok(Mode::RateAdaptive),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Beta(f64),
    Rate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeSource,
    /// Code length for presets; must match the file for loaded matrices.
    pub n: usize,
    pub snr: f64,
    pub mode: Mode,
    pub target: Option<Target>,
    /// Punctured plus shortened positions; defaults to n/100.
    pub total_modified: Option<usize>,
    pub frames: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Seed for PEG construction; defaults to `seed`.
    pub matrix_seed: Option<u64>,
    /// Forces the channel noise to zero while keeping `snr` for the LLRs.
    pub noiseless: bool,
}

impl SimConfig {
    pub fn new(code: CodeSource, n: usize, snr: f64) -> Self {
        SimConfig {
            code,
            n,
            snr,
            mode: Mode::Original,
            target: None,
            total_modified: None,
            frames: 100,
            max_iters: decoder::DEFAULT_MAX_ITERS,
            seed: 0,
            matrix_seed: None,
            noiseless: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(Error::Config(format!("snr must be positive, got {}", self.snr)));
        }
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.mode == Mode::RateAdaptive && self.target.is_none() {
            return Err(Error::Config(
                "rate-adaptive mode needs exactly one of target_beta or target_rate".into(),
            ));
        }
        Ok(())
    }

    pub fn matrix_seed(&self) -> u64 {
        self.matrix_seed.unwrap_or(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResult {
    pub success: bool,
    pub iterations: usize,
    /// R/C(snr) on success, 0 otherwise.
    pub beta: f64,
    pub disclosed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub snr: f64,
    pub mode: Mode,
    pub rate: f64,
    pub s: usize,
    pub p: usize,
    pub frames: usize,
    pub failures: usize,
    pub fer: f64,
    pub fer_ci_low: f64,
    pub fer_ci_high: f64,
    pub mean_beta: f64,
    pub mean_iters: f64,
    pub seed: u64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Summarizes frame results in frame order.
pub fn summarize(
    results: &[FrameResult],
    snr: f64,
    mode: Mode,
    rate: f64,
    s: usize,
    p: usize,
    seed: u64,
) -> CampaignSummary {
    let frames = results.len();
    let failures = results.iter().filter(|r| !r.success).count();
    let (lo, hi) = wilson_interval(failures, frames);
    let denom = frames.max(1) as f64;
    CampaignSummary {
        snr,
        mode,
        rate,
        s,
        p,
        frames,
        failures,
        fer: failures as f64 / denom,
        fer_ci_low: lo,
        fer_ci_high: hi,
        mean_beta: results.iter().map(|r| r.beta).sum::<f64>() / denom,
        mean_iters: results.iter().map(|r| r.iterations as f64).sum::<f64>() / denom,
        seed,
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "snr", "mode", "R", "s", "p", "frames", "FER", "FER_ci_low", "FER_ci_high", "mean_beta",
    "mean_iters", "seed",
];

pub fn write_csv<W: Write>(rows: &[CampaignSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(decoder::csv_err)?;
    for r in rows {
        w.write_record([
            r.snr.to_string(),
            r.mode.as_str().to_string(),
            r.rate.to_string(),
            r.s.to_string(),
            r.p.to_string(),
            r.frames.to_string(),
            r.fer.to_string(),
            r.fer_ci_low.to_string(),
            r.fer_ci_high.to_string(),
            r.mean_beta.to_string(),
            r.mean_iters.to_string(),
            r.seed.to_string(),
        ])
        .map_err(decoder::csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads or builds the matrix named by `code`.
pub fn obtain_matrix(code: &CodeSource, n: usize, seed: u64) -> Result<ParityCheckMatrix> {
    match code {
        CodeSource::Preset(p) => peg::build_matrix(&p.distribution(), n, seed),
        CodeSource::Path(path) => {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "`{}` is neither a preset nor an existing matrix file",
                    path.display()
                )));
            }
            let h = ParityCheckMatrix::load(path)?;
            if n != 0 && h.n() != n {
                return Err(Error::Config(format!(
                    "matrix {} has n = {}, config says {n}",
                    path.display(),
                    h.n()
                )));
            }
            Ok(h)
        }
    }
}

/// A validated configuration bound to its matrix.
pub struct Simulator {
    config: SimConfig,
    matrix: ParityCheckMatrix,
    family: OrthogonalFamily,
    s: usize,
    p: usize,
    rate: f64,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let matrix = obtain_matrix(&config.code, config.n, config.matrix_seed())?;
        Self::with_matrix(config, matrix)
    }

    pub fn with_matrix(mut config: SimConfig, matrix: ParityCheckMatrix) -> Result<Self> {
        config.validate()?;
        config.n = matrix.n();
        let (n, m) = (matrix.n(), matrix.m());
        let (s, p) = match config.mode {
            Mode::Original => (0, 0),
            Mode::RateAdaptive => {
                let t = config.total_modified.unwrap_or(n / 100);
                let target = match config.target.expect("validated") {
                    Target::Rate(r) => r,
                    Target::Beta(b) => rate_adapt::optimal_rate(config.snr, b)?,
                };
                rate_adapt::split_for_target(n, m, target, t).map_err(|e| match e {
                    Error::InfeasiblePlan(msg) | Error::Domain(msg) => Error::Config(msg),
                    other => other,
                })?
            }
        };
        let payload = n - s - p;
        if payload % DIM != 0 {
            return Err(Error::Config(format!(
                "payload length n − p − s = {payload} is not a multiple of {DIM}"
            )));
        }
        let rate = rate_adapt::adapted_rate(n, m, s, p)?;
        Ok(Simulator {
            config,
            matrix,
            family: OrthogonalFamily::octonion(),
            s,
            p,
            rate,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn matrix(&self) -> &ParityCheckMatrix {
        &self.matrix
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn frame_rng(&self, frame_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(frame_index);
        rng
    }

    /// Runs one frame through Bob's and Alice's pipelines.
    pub fn run_frame(&self, frame_index: u64) -> Result<FrameResult> {
        let cfg = &self.config;
        let (n, m) = (self.matrix.n(), self.matrix.m());
        let mut rng = self.frame_rng(frame_index);
        let plan = match cfg.mode {
            Mode::Original => RateAdaptPlan::identity(n, m)?,
            Mode::RateAdaptive => RateAdaptPlan::random(n, m, self.s, self.p, rng.next_u64())?,
        };

        let blocks = plan.payload_len() / DIM;
        let sigma = (1.0 / cfg.snr).sqrt();
        let mut payload_bits = Vec::with_capacity(blocks * DIM);
        let mut payload_llrs = Vec::with_capacity(blocks * DIM);
        for _ in 0..blocks {
            let x: Block = std::array::from_fn(|_| rng.sample(StandardNormal));
            let z: Block = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal) * sigma);
            let u_bits: u8 = rng.random();
            let y: Block = if cfg.noiseless {
                x
            } else {
                std::array::from_fn(|i| x[i] + z[i])
            };
            let block = multidim::ReconciliationBlock::reconcile(x, y, u_bits, &self.family)?;
            payload_bits.extend(multidim::unpack_bits(u_bits));
            payload_llrs.extend(block.llrs(cfg.snr));
        }

        let bob_frame = plan.assemble_bob_frame(&payload_bits, &mut rng)?;
        let syndrome = self.matrix.syndrome(&bob_frame)?;
        let alice_llrs = plan.assemble_alice_llrs(&payload_llrs)?;
        let pinned = plan.pinned_mask();
        let job = DecodeJob::new(&self.matrix, &alice_llrs, &syndrome)
            .max_iters(cfg.max_iters)
            .pinned(&pinned);
        let outcome = decoder::decode(&job)?;
        let success = outcome.success && outcome.bits == bob_frame;
        Ok(FrameResult {
            success,
            iterations: outcome.iterations_used,
            beta: if success {
                rate_adapt::efficiency(self.rate, cfg.snr)
            } else {
                0.0
            },
            disclosed: plan.disclosed_bits(),
        })
    }

    /// Runs all frames on the rayon pool and aggregates them in frame order.
    pub fn run_frames(&self) -> Result<Vec<FrameResult>> {
        (0..self.config.frames as u64)
            .into_par_iter()
            .map(|i| self.run_frame(i))
            .collect()
    }

    pub fn run_campaign(&self) -> Result<CampaignSummary> {
        let results = self.run_frames()?;
        Ok(self.summarize(&results))
    }

    pub fn summarize(&self, results: &[FrameResult]) -> CampaignSummary {
        summarize(
            results,
            self.config.snr,
            self.config.mode,
            self.rate,
            self.s,
            self.p,
            self.config.seed,
        )
    }
}

/// Original-code efficiency over an SNR grid: `R/C(snr)` at or above the
/// code's optimal SNR, 0 below it.
pub fn efficiency_curve(code_rate: f64, optimal_snr: f64, snr_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    snr_grid
        .iter()
        .map(|&snr| {
            if !(snr > 0.0) {
                return Err(Error::Domain(format!("snr must be positive, got {snr}")));
            }
            let beta = if snr >= optimal_snr {
                rate_adapt::efficiency(code_rate, snr)
            } else {
                0.0
            };
            Ok((snr, beta))
        })
        .collect()
}

/// One printed row of the reference rate-adaptation results (n = 10⁶).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Row {
    pub preset: Preset,
    pub snr: f64,
    pub s: usize,
    pub p: usize,
    pub rate: f64,
    /// Decimal places printed for `rate`.
    pub rate_decimals: u32,
    /// Percent.
    pub beta: f64,
    /// Percent; 0 marks a failed original code.
    pub beta_original: f64,
}

const fn row(
    preset: Preset,
    snr: f64,
    s: usize,
    p: usize,
    rate: f64,
    rate_decimals: u32,
    beta: f64,
    beta_original: f64,
) -> Table2Row {
    Table2Row {
        preset,
        snr,
        s,
        p,
        rate,
        rate_decimals,
        beta,
        beta_original,
    }
}

pub const TABLE2_N: usize = 1_000_000;

pub const TABLE2: [Table2Row; 18] = {
    use Preset::*;
    [
        row(Rate0_1, 0.143, 11080, 920, 0.090, 3, 93.35, 0.0),
        row(Rate0_1, 0.148, 7928, 2072, 0.093, 3, 93.41, 0.0),
        row(Rate0_1, 0.153, 4768, 3232, 0.096, 3, 93.48, 0.0),
        row(Rate0_1, 0.163, 0, 19608, 0.102, 3, 93.64, 91.81),
        row(Rate0_1, 0.169, 0, 47616, 0.105, 3, 93.22, 88.78),
        row(Rate0_1, 0.176, 0, 82568, 0.109, 3, 93.21, 85.51),
        row(Rate0_05, 0.069, 4656, 5344, 0.0458, 4, 95.16, 0.0),
        row(Rate0_05, 0.071, 3272, 6728, 0.0472, 4, 95.39, 0.0),
        row(Rate0_05, 0.073, 1984, 8016, 0.0485, 4, 95.43, 0.0),
        row(Rate0_05, 0.077, 0, 23440, 0.0512, 4, 95.68, 93.44),
        row(Rate0_05, 0.079, 0, 43976, 0.0523, 4, 95.36, 91.16),
        row(Rate0_05, 0.081, 0, 65416, 0.0535, 4, 95.22, 88.99),
        row(Rate0_02, 0.0277, 1200, 8800, 0.0190, 4, 96.40, 0.0),
        row(Rate0_02, 0.0280, 992, 9008, 0.0192, 4, 96.38, 0.0),
        row(Rate0_02, 0.0286, 592, 9408, 0.0196, 4, 96.36, 0.0),
        row(Rate0_02, 0.0299, 0, 24392, 0.0205, 4, 96.46, 94.11),
        row(Rate0_02, 0.0306, 0, 47616, 0.0210, 4, 96.59, 91.99),
        row(Rate0_02, 0.0314, 0, 69768, 0.0215, 4, 96.40, 89.68),
    ]
};

pub fn table2_rows(preset: Preset) -> impl Iterator<Item = &'static Table2Row> {
    TABLE2.iter().filter(move |r| r.preset == preset)
}

/// Recomputed values for one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Check {
    pub row: Table2Row,
    pub m: usize,
    /// Exact adapted rate.
    pub rate: f64,
    /// `rate` rounded to the printed precision.
    pub rate_rounded: f64,
    /// Percent, computed from the printed rate.
    pub beta: f64,
    /// Percent, computed from the exact rate.
    pub beta_exact: f64,
    /// Percent, from the efficiency curve.
    pub beta_original: f64,
}

impl Table2Check {
    pub fn rate_matches(&self) -> bool {
        (self.rate_rounded - self.row.rate).abs() < 1e-12
    }

    pub fn beta_matches(&self, tol_pp: f64) -> bool {
        (self.beta - self.row.beta).abs() <= tol_pp
    }

    pub fn beta_original_matches(&self, tol_pp: f64) -> bool {
        (self.beta_original - self.row.beta_original).abs() <= tol_pp
    }
}

fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale).round() / scale
}

/// Recomputes a reference-table row from (n, m, s, p) and its SNR.
pub fn check_table2_row(row: &Table2Row) -> Result<Table2Check> {
    let r0 = crate::degree_dist::compute_rate(&row.preset.distribution());
    let m = TABLE2_N - (r0 * TABLE2_N as f64).round() as usize;
    let rate = rate_adapt::adapted_rate(TABLE2_N, m, row.s, row.p)?;
    let rate_rounded = round_to(rate, row.rate_decimals);
    let beta_original = efficiency_curve(r0, optimal_snr(row.preset), &[row.snr])?[0].1;
    Ok(Table2Check {
        row: *row,
        m,
        rate,
        rate_rounded,
        beta: 100.0 * rate_adapt::efficiency(rate_rounded, row.snr),
        beta_exact: 100.0 * rate_adapt::efficiency(rate, row.snr),
        beta_original: 100.0 * beta_original,
    })
}

pub fn reproduce_table2(preset: Preset) -> Result<Vec<Table2Check>> {
    table2_rows(preset).map(check_table2_row).collect()
}

pub fn write_table2_csv<W: Write>(checks: &[Table2Check], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "R0", "snr", "s", "p", "R", "R_printed", "beta", "beta_printed", "beta_original",
        "beta_original_printed",
    ])
    .map_err(decoder::csv_err)?;
    for c in checks {
        let d = c.row.rate_decimals as usize;
        w.write_record([
            c.row.preset.name().trim_start_matches("rate_").replace('_', "."),
            c.row.snr.to_string(),
            c.row.s.to_string(),
            c.row.p.to_string(),
            format!("{:.*}", d, c.rate_rounded),
            format!("{:.*}", d, c.row.rate),
            format!("{:.2}", c.beta),
            format!("{:.2}", c.row.beta),
            format!("{:.2}", c.beta_original),
            format!("{:.2}", c.row.beta_original),
        ])
        .map_err(decoder::csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Coefficient of variation (population standard deviation over mean).
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}
