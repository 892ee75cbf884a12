//! Puncturing and shortening.
//!
//! A plan marks `p` of the `n` code positions as punctured (values unrelated
//! between the parties, decoder LLR 0) and `s` as shortened (values disclosed
//! by Bob, decoder LLR ±LLR_SAT). The remaining `n − p − s` payload positions
//! carry the reconciliation bits in order. The adapted rate is
//!
//! ```text
//! R = (n − m − s) / (n − p − s)
//! ```
//!
//! Bob's message to Alice (wire record, all integers little-endian):
//!
//! ```text
//! u32 s | u32 p | s × u32 shortened positions (ascending)
//!       | p × u32 punctured positions (ascending)
//!       | ⌈s/8⌉ bytes shortened values | ⌈m/8⌉ bytes syndrome
//! ```
//!
//! Bit vectors are packed least-significant bit first; shortened values are
//! listed in ascending position order.

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decoder::LLR_SAT;
use crate::{Error, Result};

/// Channel capacity ½·log₂(1 + snr) in bits per symbol.
pub fn capacity(snr: f64) -> f64 {
    0.5 * (1.0 + snr).log2()
}

/// Reconciliation efficiency β = R / C(snr).
pub fn efficiency(rate: f64, snr: f64) -> f64 {
    rate / capacity(snr)
}

/// (n − m − s)/(n − p − s).
pub fn adapted_rate(n: usize, m: usize, s: usize, p: usize) -> Result<f64> {
    if p + s >= n {
        return Err(Error::Domain(format!("p + s = {} must be below n = {n}", p + s)));
    }
    if m + s >= n {
        return Err(Error::Domain(format!(
            "n − m − s = {} leaves no information bits",
            n as i64 - m as i64 - s as i64
        )));
    }
    if p > m {
        return Err(Error::Domain(format!("p = {p} exceeds m = {m}")));
    }
    Ok((n - m - s) as f64 / (n - p - s) as f64)
}

/// β·C(snr): the code rate that reaches efficiency β at this SNR.
pub fn optimal_rate(snr: f64, beta: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("snr must be positive, got {snr}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    Ok(beta * capacity(snr))
}

/// Splits `total_modified` positions into (shortened, punctured) so that the
/// adapted rate is closest to `target_rate`: `s = round((n − m) − R·(n − t))`,
/// half away from zero.
pub fn split_for_target(
    n: usize,
    m: usize,
    target_rate: f64,
    total_modified: usize,
) -> Result<(usize, usize)> {
    if !(target_rate > 0.0 && target_rate < 1.0) {
        return Err(Error::Domain(format!(
            "target rate must lie in (0, 1), got {target_rate}"
        )));
    }
    if total_modified >= n || m >= n {
        return Err(Error::Domain(format!(
            "need m < n and total_modified < n (n = {n}, m = {m}, t = {total_modified})"
        )));
    }
    let raw = (n - m) as f64 - target_rate * (n - total_modified) as f64;
    let s = raw.round();
    if s < 0.0 || s > total_modified as f64 {
        return Err(Error::InfeasiblePlan(format!(
            "target rate {target_rate} needs s = {s} outside [0, {total_modified}]"
        )));
    }
    let s = s as usize;
    let p = total_modified - s;
    adapted_rate(n, m, s, p)?;
    Ok((s, p))
}

/// Role of a code position within an adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRole {
    Payload,
    Punctured,
    Shortened,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAdaptPlan {
    n: usize,
    m: usize,
    roles: Vec<SlotRole>,
    shortened: Vec<u32>,
    punctured: Vec<u32>,
    shortened_values: Vec<u8>,
    seed: u64,
}

impl RateAdaptPlan {
    /// The unmodified code: every position is payload.
    pub fn identity(n: usize, m: usize) -> Result<Self> {
        Self::from_parts(n, m, Vec::new(), Vec::new(), Vec::new(), 0)
    }

    /// Builds a plan from explicit position lists. `shortened_values` follow
    /// the ascending order of `shortened`.
    pub fn from_parts(
        n: usize,
        m: usize,
        mut shortened: Vec<u32>,
        mut punctured: Vec<u32>,
        shortened_values: Vec<u8>,
        seed: u64,
    ) -> Result<Self> {
        if shortened.len() != shortened_values.len() {
            return Err(Error::mismatch(shortened.len(), shortened_values.len()));
        }
        if shortened_values.iter().any(|&b| b > 1) {
            return Err(Error::Config("shortened values must be bits".into()));
        }
        // Keep values aligned with their positions while sorting.
        let mut paired: Vec<(u32, u8)> = shortened.iter().copied().zip(shortened_values).collect();
        paired.sort_unstable();
        shortened = paired.iter().map(|&(i, _)| i).collect();
        let shortened_values: Vec<u8> = paired.iter().map(|&(_, b)| b).collect();
        punctured.sort_unstable();

        let mut roles = vec![SlotRole::Payload; n];
        for (list, role) in [(&shortened, SlotRole::Shortened), (&punctured, SlotRole::Punctured)] {
            for &i in list.iter() {
                let slot = roles.get_mut(i as usize).ok_or_else(|| {
                    Error::Config(format!("position {i} out of range for n = {n}"))
                })?;
                if *slot != SlotRole::Payload {
                    return Err(Error::Config(format!("position {i} assigned twice")));
                }
                *slot = role;
            }
        }
        adapted_rate(n, m, shortened.len(), punctured.len())?;
        Ok(RateAdaptPlan {
            n,
            m,
            roles,
            shortened,
            punctured,
            shortened_values,
            seed,
        })
    }

    /// Draws positions and shortened values uniformly from `seed`.
    pub fn random(n: usize, m: usize, s: usize, p: usize, seed: u64) -> Result<Self> {
        adapted_rate(n, m, s, p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = index::sample(&mut rng, n, s + p).into_vec();
        let shortened: Vec<u32> = picked[..s].iter().map(|&i| i as u32).collect();
        let punctured: Vec<u32> = picked[s..].iter().map(|&i| i as u32).collect();
        let mut sorted = shortened.clone();
        sorted.sort_unstable();
        let values: Vec<u8> = (0..s).map(|_| rng.random::<bool>() as u8).collect();
        Self::from_parts(n, m, sorted, punctured, values, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.shortened.len()
    }

    pub fn p(&self) -> usize {
        self.punctured.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn payload_len(&self) -> usize {
        self.n - self.s() - self.p()
    }

    pub fn roles(&self) -> &[SlotRole] {
        &self.roles
    }

    pub fn shortened_positions(&self) -> &[u32] {
        &self.shortened
    }

    pub fn punctured_positions(&self) -> &[u32] {
        &self.punctured
    }

    pub fn shortened_values(&self) -> &[u8] {
        &self.shortened_values
    }

    pub fn rate(&self) -> f64 {
        adapted_rate(self.n, self.m, self.s(), self.p()).expect("validated on construction")
    }

    /// Mask of positions the decoder treats as known.
    pub fn pinned_mask(&self) -> Vec<bool> {
        self.roles.iter().map(|&r| r == SlotRole::Shortened).collect()
    }

    /// Bob's frame û: payload in order, shortened values, fresh random bits
    /// in punctured positions.
    pub fn assemble_bob_frame<R: Rng + ?Sized>(&self, payload: &[u8], rng: &mut R) -> Result<Vec<u8>> {
        if payload.len() != self.payload_len() {
            return Err(Error::mismatch(self.payload_len(), payload.len()));
        }
        let mut frame = self.scatter(payload, 0u8)?;
        for &i in &self.punctured {
            frame[i as usize] = rng.random::<bool>() as u8;
        }
        Ok(frame)
    }

    /// Alice's decoder input: payload LLRs in order, 0 for punctured
    /// positions and ±LLR_SAT for shortened ones.
    pub fn assemble_alice_llrs(&self, payload_llrs: &[f64]) -> Result<Vec<f64>> {
        if payload_llrs.len() != self.payload_len() {
            return Err(Error::mismatch(self.payload_len(), payload_llrs.len()));
        }
        self.scatter(payload_llrs, 0.0)
    }

    fn scatter<T: Copy + ShortenedValue>(&self, payload: &[T], fill: T) -> Result<Vec<T>> {
        let mut out = vec![fill; self.n];
        let mut src = payload.iter();
        for (slot, role) in out.iter_mut().zip(&self.roles) {
            if *role == SlotRole::Payload {
                *slot = *src.next().expect("payload length checked");
            }
        }
        for (&i, &b) in self.shortened.iter().zip(&self.shortened_values) {
            out[i as usize] = T::from_bit(b);
        }
        Ok(out)
    }

    /// Payload positions of a full-length frame, in order.
    pub fn extract_payload<T: Copy>(&self, frame: &[T]) -> Result<Vec<T>> {
        if frame.len() != self.n {
            return Err(Error::mismatch(self.n, frame.len()));
        }
        Ok(frame
            .iter()
            .zip(&self.roles)
            .filter(|(_, &r)| r == SlotRole::Payload)
            .map(|(&x, _)| x)
            .collect())
    }

    /// Bits Bob discloses: the syndrome plus the shortened values. Position
    /// lists are public randomness and not counted.
    pub fn disclosed_bits(&self) -> usize {
        self.m + self.s()
    }

    /// Encodes Bob's message (plan + syndrome).
    pub fn encode_wire(&self, syndrome: &[u8]) -> Result<Vec<u8>> {
        if syndrome.len() != self.m {
            return Err(Error::mismatch(self.m, syndrome.len()));
        }
        let mut out = Vec::with_capacity(8 + 4 * (self.s() + self.p()) + (self.s() + self.m) / 8 + 2);
        out.extend_from_slice(&(self.s() as u32).to_le_bytes());
        out.extend_from_slice(&(self.p() as u32).to_le_bytes());
        for &i in self.shortened.iter().chain(&self.punctured) {
            out.extend_from_slice(&i.to_le_bytes());
        }
        out.extend(pack_bits(&self.shortened_values));
        out.extend(pack_bits(syndrome));
        Ok(out)
    }

    /// Decodes Bob's message for a code of size `n × m`.
    pub fn decode_wire(bytes: &[u8], n: usize, m: usize) -> Result<(Self, Vec<u8>)> {
        let short = || Error::Parse("wire record truncated".into());
        let u32_at = |off: usize| -> Result<u32> {
            bytes
                .get(off..off + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(short)
        };
        let s = u32_at(0)? as usize;
        let p = u32_at(4)? as usize;
        let mut off = 8;
        let mut read_list = |count: usize| -> Result<Vec<u32>> {
            let list = (0..count).map(|k| u32_at(off + 4 * k)).collect::<Result<Vec<_>>>()?;
            off += 4 * count;
            Ok(list)
        };
        let shortened = read_list(s)?;
        let punctured = read_list(p)?;
        let values_len = s.div_ceil(8);
        let syn_len = m.div_ceil(8);
        if bytes.len() != off + values_len + syn_len {
            return Err(Error::Parse(format!(
                "wire record has {} bytes, expected {}",
                bytes.len(),
                off + values_len + syn_len
            )));
        }
        if shortened.windows(2).any(|w| w[0] >= w[1]) || punctured.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("position lists must be strictly ascending".into()));
        }
        let values = unpack_bits(&bytes[off..off + values_len], s);
        let syndrome = unpack_bits(&bytes[off + values_len..], m);
        let plan = Self::from_parts(n, m, shortened, punctured, values, 0)?;
        Ok((plan, syndrome))
    }
}

/// Draws a plan for `target_rate` with `total_modified` altered positions.
pub fn plan_for_target(
    n: usize,
    m: usize,
    target_rate: f64,
    total_modified: usize,
    seed: u64,
) -> Result<RateAdaptPlan> {
    let (s, p) = split_for_target(n, m, target_rate, total_modified)?;
    RateAdaptPlan::random(n, m, s, p, seed)
}

pub fn disclosed_bits(plan: &RateAdaptPlan) -> usize {
    plan.disclosed_bits()
}

/// Value written into shortened slots for each frame element type.
trait ShortenedValue {
    fn from_bit(bit: u8) -> Self;
}

impl ShortenedValue for u8 {
    fn from_bit(bit: u8) -> Self {
        bit
    }
}

impl ShortenedValue for f64 {
    fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            LLR_SAT
        } else {
            -LLR_SAT
        }
    }
}

pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 8] |= (b & 1) << (i % 8);
    }
    out
}

pub fn unpack_bits(bytes: &[u8], len: usize) -> Vec<u8> {
    (0..len).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect()
}

/// Random payload-free bits, used for punctured slots by callers that need a
/// standalone source.
pub fn random_bits<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Vec<u8> {
    (0..len).map(|_| (rng.next_u32() & 1) as u8).collect()
}
