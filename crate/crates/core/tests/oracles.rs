//! Independent re-derivations checked against the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use cvqkd_rec::degree_dist::Preset;
use cvqkd_rec::multidim::{Block, OrthogonalFamily, ReconciliationBlock, DIM};
use cvqkd_rec::peg;
use cvqkd_rec::rate_adapt::{self, RateAdaptPlan};
use cvqkd_rec::sim::{self, table2_rows};

/// Row-by-row GF(2) product over a dense copy of H.
#[test]
fn sparse_syndrome_matches_dense_product() {
    let h = peg::build_matrix(&Preset::Rate0_02.distribution(), 10_000, 3).unwrap();
    let (n, m) = (h.n(), h.m());
    let mut dense = vec![vec![0u8; n]; m];
    for r in 0..m {
        for &c in h.row(r) {
            dense[r][c as usize] = 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let expected: Vec<u8> = dense
            .iter()
            .map(|row| row.iter().zip(&bits).fold(0, |acc, (a, b)| acc ^ (a & b)))
            .collect();
        assert_eq!(h.syndrome(&bits).unwrap(), expected);
    }
}

/// A 4-cycle is a pair of columns sharing two rows; the girth report must
/// flag exactly the columns that occur in such a pair.
#[test]
fn four_cycles_match_girth_report() {
    let h = peg::build_matrix(&Preset::Rate0_02.distribution(), 10_000, 3).unwrap();
    let mut shared = std::collections::HashMap::<(u32, u32), u32>::new();
    for r in 0..h.m() {
        let row = h.row(r);
        for (i, &a) in row.iter().enumerate() {
            for &b in &row[i + 1..] {
                *shared.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    let mut on_four_cycle = std::collections::BTreeSet::new();
    let mut pairs = 0;
    for (&(a, b), &count) in &shared {
        if count > 1 {
            pairs += 1;
            on_four_cycle.extend([a as usize, b as usize]);
        }
    }
    let eligible: Vec<usize> = (0..h.n()).filter(|&c| h.col_degree(c) >= 2).collect();
    let report = peg::girth_report(&h, eligible.len());
    assert_eq!(report.sampled, eligible.len());
    assert_eq!(report.histogram.get(&4).copied().unwrap_or(0), on_four_cycle.len());
    // Regression baseline: the dense 57-edge type leaves a few forced
    // 4-cycles once check capacity runs out (measured: 166 pairs).
    assert!(pairs <= 166, "{pairs} column pairs share two rows");
    assert!(report.histogram.keys().all(|&g| g >= 4 && g % 2 == 0));
}

#[test]
fn punctured_bits_are_uniform() {
    let plan = RateAdaptPlan::random(1000, 980, 10, 40, 9).unwrap();
    let payload = vec![0u8; plan.payload_len()];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut ones, mut total) = (0usize, 0usize);
    for _ in 0..10_000 {
        let frame = plan.assemble_bob_frame(&payload, &mut rng).unwrap();
        for &i in plan.punctured_positions() {
            ones += frame[i as usize] as usize;
            total += 1;
        }
    }
    let frac = ones as f64 / total as f64;
    assert!((0.49..=0.51).contains(&frac), "fraction of ones {frac}");
}

/// Bins LLRs of simulated blocks and compares the empirical probability of
/// bit 0 with the logistic prediction in every well-populated bin.
fn calibration_error(snr: f64, blocks: usize, seed: u64) -> f64 {
    let fam = OrthogonalFamily::octonion();
    let sigma = snr.recip().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = 0.25;
    let mut bins: std::collections::BTreeMap<i64, (usize, usize, f64)> = Default::default();
    for _ in 0..blocks {
        let x: Block = std::array::from_fn(|_| rng.sample(StandardNormal));
        let y: Block = std::array::from_fn(|i| x[i] + sigma * rng.sample::<f64, _>(StandardNormal));
        let u: u8 = rng.random();
        let block = ReconciliationBlock::reconcile(x, y, u, &fam).unwrap();
        for (i, l) in block.llrs(snr).into_iter().enumerate() {
            let e = bins.entry((l / width).floor() as i64).or_default();
            e.0 += 1;
            e.1 += usize::from((u >> i) & 1 == 0);
            e.2 += 1.0 / (1.0 + (-l).exp());
        }
    }
    bins.values()
        .filter(|(count, _, _)| *count >= 20_000)
        .map(|&(count, zeros, predicted)| {
            (zeros as f64 / count as f64 - predicted / count as f64).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn llrs_are_calibrated() {
    for (snr, seed) in [(0.03, 1), (0.5, 2), (3.0, 3)] {
        let err = calibration_error(snr, 200_000, seed);
        assert!(err < 0.02, "snr {snr}: max calibration error {err}");
    }
}

fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

#[test]
fn rate_adaptation_stabilizes_efficiency() {
    for preset in Preset::ALL {
        let rows: Vec<_> = table2_rows(preset).collect();
        let adapted: Vec<f64> = rows
            .iter()
            .map(|r| {
                let m = sim::check_table2_row(r).unwrap().m;
                let rate = rate_adapt::adapted_rate(sim::TABLE2_N, m, r.s, r.p).unwrap();
                rate_adapt::efficiency(rate, r.snr)
            })
            .collect();
        let snrs: Vec<f64> = rows.iter().map(|r| r.snr).collect();
        let m = sim::check_table2_row(rows[0]).unwrap().m;
        let code_rate = rate_adapt::adapted_rate(sim::TABLE2_N, m, 0, 0).unwrap();
        let original: Vec<f64> = sim::efficiency_curve(code_rate, sim::optimal_snr(preset), &snrs)
            .unwrap()
            .into_iter()
            .map(|(_, b)| b)
            .collect();
        let (cv_a, cv_o) = (coefficient_of_variation(&adapted), coefficient_of_variation(&original));
        assert!((cv_a - sim::coefficient_of_variation(&adapted)).abs() < 1e-12);
        assert!(cv_a < 0.01, "{preset}: adapted CV {cv_a}");
        assert!(cv_o > 0.03, "{preset}: original CV {cv_o}");
    }
}

#[test]
fn adapted_rate_at_highest_grid_snr() {
    // Last rate-0.02 grid point at n = 10⁵: a tenth of the reference
    // modified count (69768), rounded down to an 8-aligned payload.
    let (n, m, snr) = (100_000, 98_000, 0.0314);
    let (s, p) = rate_adapt::split_for_target(n, m, 0.0215, 6976).unwrap();
    assert_eq!((s, p), (0, 6976));
    assert_eq!((n - s - p) % DIM, 0);
    let rate = rate_adapt::adapted_rate(n, m, s, p).unwrap();
    let beta = 100.0 * rate_adapt::efficiency(rate, snr);
    assert!((beta - 96.40).abs() <= 0.05, "beta {beta}");
}
