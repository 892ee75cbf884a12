//! Syndrome-based sum-product decoding.
//!
//! Flooding schedule in the tanh domain. Each check node `c` multiplies its
//! outgoing messages by `(−1)^{s_c}` so the decoder searches the coset
//! `{w : H·w = s}` rather than the code itself. Decoding stops as soon as the
//! hard decision satisfies the syndrome.
//!
//! Punctured positions enter with LLR 0. Pinned (shortened) positions carry
//! `±LLR_SAT` and keep sending their channel value regardless of incoming
//! messages.

use std::io::Write;

use crate::matrix::ParityCheckMatrix;
use crate::{Error, Result};

/// Saturation magnitude for channel inputs, variable-to-check and
/// check-to-variable messages.
pub const LLR_SAT: f64 = 30.0;

pub const DEFAULT_MAX_ITERS: usize = 500;

#[derive(Debug, Clone, Copy)]
pub struct DecodeJob<'a> {
    pub matrix: &'a ParityCheckMatrix,
    pub channel_llrs: &'a [f64],
    pub syndrome: &'a [u8],
    pub max_iters: usize,
    /// Positions whose value is known to the decoder (shortened bits).
    pub pinned: Option<&'a [bool]>,
}

impl<'a> DecodeJob<'a> {
    pub fn new(matrix: &'a ParityCheckMatrix, channel_llrs: &'a [f64], syndrome: &'a [u8]) -> Self {
        DecodeJob {
            matrix,
            channel_llrs,
            syndrome,
            max_iters: DEFAULT_MAX_ITERS,
            pinned: None,
        }
    }

    pub fn max_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }

    pub fn pinned(mut self, pinned: &'a [bool]) -> Self {
        self.pinned = Some(pinned);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.matrix.n(), self.matrix.m());
        if self.channel_llrs.len() != n {
            return Err(Error::mismatch(n, self.channel_llrs.len()));
        }
        if self.syndrome.len() != m {
            return Err(Error::mismatch(m, self.syndrome.len()));
        }
        if self.syndrome.iter().any(|&b| b > 1) {
            return Err(Error::Config("syndrome entries must be 0 or 1".into()));
        }
        if let Some(p) = self.pinned {
            if p.len() != n {
                return Err(Error::mismatch(n, p.len()));
            }
            if let Some(i) = (0..n).find(|&i| p[i] && self.channel_llrs[i].abs() != LLR_SAT) {
                return Err(Error::Config(format!(
                    "pinned position {i} must carry a saturated LLR"
                )));
            }
        }
        if self.channel_llrs.iter().any(|l| l.is_nan()) {
            return Err(Error::Config("channel LLRs contain NaN".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// True iff `H·bits` equals the target syndrome.
    pub success: bool,
    pub bits: Vec<u8>,
    pub iterations_used: usize,
    /// Unsatisfied checks of the final estimate.
    pub final_syndrome_mismatch: usize,
}

/// Bit 0 iff the LLR is non-negative.
pub fn hard_decision(llrs: &[f64]) -> Vec<u8> {
    llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
}

pub fn syndrome(h: &ParityCheckMatrix, bits: &[u8]) -> Result<Vec<u8>> {
    h.syndrome(bits)
}

pub fn decode(job: &DecodeJob) -> Result<DecodeOutcome> {
    run(job, None)
}

/// Like [`decode`], also returning the unsatisfied-check count after the
/// channel hard decision and after every iteration.
pub fn decode_traced(job: &DecodeJob) -> Result<(DecodeOutcome, Vec<usize>)> {
    let mut trace = Vec::new();
    let outcome = run(job, Some(&mut trace))?;
    Ok((outcome, trace))
}

/// Writes a mismatch trace as `iteration,unsatisfied_checks` CSV.
pub fn write_trace_csv<W: Write>(trace: &[usize], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "unsatisfied_checks"])
        .map_err(csv_err)?;
    for (i, m) in trace.iter().enumerate() {
        w.write_record([i.to_string(), m.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn clamp(x: f64) -> f64 {
    x.clamp(-LLR_SAT, LLR_SAT)
}

fn first_mismatch(h: &ParityCheckMatrix, bits: &[u8], target: &[u8]) -> bool {
    (0..h.m()).any(|r| h.row(r).iter().fold(0u8, |acc, &c| acc ^ bits[c as usize]) != target[r])
}

fn run(job: &DecodeJob, mut trace: Option<&mut Vec<usize>>) -> Result<DecodeOutcome> {
    job.validate()?;
    let h = job.matrix;
    let (n, m) = (h.n(), h.m());
    let cols = h.row_cols_flat();
    let pinned = |v: usize| job.pinned.is_some_and(|p| p[v]);
    // tanh(LLR_SAT/2): the largest extrinsic magnitude allowed into atanh.
    let t_max = (LLR_SAT / 2.0).tanh();

    let channel: Vec<f64> = job.channel_llrs.iter().map(|&l| clamp(l)).collect();
    let mut bits = hard_decision(&channel);

    let satisfied = |bits: &[u8], trace: &mut Option<&mut Vec<usize>>| -> bool {
        match trace {
            Some(t) => {
                let mis = h.syndrome_mismatch(bits, job.syndrome);
                t.push(mis);
                mis == 0
            }
            None => !first_mismatch(h, bits, job.syndrome),
        }
    };

    if satisfied(&bits, &mut trace) {
        return Ok(DecodeOutcome {
            success: true,
            bits,
            iterations_used: 0,
            final_syndrome_mismatch: 0,
        });
    }

    // Variable-to-check messages, stored as tanh(L/2).
    let mut v2c: Vec<f64> = cols.iter().map(|&c| (channel[c as usize] / 2.0).tanh()).collect();
    // Check-to-variable messages. Edges into degree-one variables only feed
    // the hard decision, so they stay in the tanh domain.
    let mut c2v = vec![0.0f64; cols.len()];
    let leaf: Vec<bool> = cols.iter().map(|&c| h.col_edges(c as usize).len() == 1).collect();

    for iter in 1..=job.max_iters {
        for r in 0..m {
            let range = h.row_range(r);
            let mut product = if job.syndrome[r] == 1 { -1.0 } else { 1.0 };
            let mut zero_at = None;
            let mut zeros = 0;
            for e in range.clone() {
                let t = v2c[e];
                if t == 0.0 {
                    zeros += 1;
                    zero_at = Some(e);
                } else {
                    product *= t;
                }
            }
            match zeros {
                0 => {
                    for e in range {
                        let ext = (product / v2c[e]).clamp(-t_max, t_max);
                        c2v[e] = if leaf[e] { ext } else { 2.0 * ext.atanh() };
                    }
                }
                1 => {
                    let z = zero_at.unwrap();
                    for e in range {
                        c2v[e] = if e != z {
                            0.0
                        } else if leaf[e] {
                            product.clamp(-t_max, t_max)
                        } else {
                            2.0 * product.clamp(-t_max, t_max).atanh()
                        };
                    }
                }
                _ => c2v[range].fill(0.0),
            }
        }

        for v in 0..n {
            if pinned(v) {
                continue;
            }
            let edges = h.col_edges(v);
            if let [e] = *edges {
                // channel + 2·atanh(x) < 0  ⇔  x < −tanh(channel/2)
                let e = e as usize;
                bits[v] = u8::from(c2v[e] < -v2c[e]);
                continue;
            }
            let total = channel[v] + edges.iter().map(|&e| c2v[e as usize]).sum::<f64>();
            bits[v] = u8::from(total < 0.0);
            for &e in edges {
                let e = e as usize;
                v2c[e] = (clamp(total - c2v[e]) / 2.0).tanh();
            }
        }

        if satisfied(&bits, &mut trace) {
            return Ok(DecodeOutcome {
                success: true,
                bits,
                iterations_used: iter,
                final_syndrome_mismatch: 0,
            });
        }
    }

    let final_syndrome_mismatch = h.syndrome_mismatch(&bits, job.syndrome);
    Ok(DecodeOutcome {
        success: final_syndrome_mismatch == 0,
        bits,
        iterations_used: job.max_iters,
        final_syndrome_mismatch,
    })
}
