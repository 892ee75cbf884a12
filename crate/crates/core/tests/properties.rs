use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvqkd_rec::degree_dist::Preset;
use cvqkd_rec::matrix::ParityCheckMatrix;
use cvqkd_rec::multidim::{self, OrthogonalFamily, DIM};
use cvqkd_rec::rate_adapt::{self, RateAdaptPlan, SlotRole};
use cvqkd_rec::sim::{summarize, FrameResult, Mode};

fn preset_strategy() -> impl Strategy<Value = Preset> {
    prop::sample::select(Preset::ALL.to_vec())
}

fn sparse_matrix(n: usize, m: usize) -> impl Strategy<Value = ParityCheckMatrix> {
    prop::collection::vec(prop::collection::btree_set(0..n as u32, 1..=n.min(6)), m).prop_map(
        move |rows| {
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(|c| (c, 0u8)).collect())
                .collect();
            ParityCheckMatrix::from_rows(n, rows).unwrap()
        },
    )
}

fn bits(len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realized_counts_sum_to_length(preset in preset_strategy(), n in 10usize..500) {
        let dist = preset.distribution();
        let real = dist.realize(n * 100).unwrap();
        prop_assert_eq!(real.variable_counts().iter().sum::<usize>(), n * 100);
        let design = match preset {
            Preset::Rate0_1 => 0.1,
            Preset::Rate0_05 => 0.05,
            Preset::Rate0_02 => 0.02,
        };
        let rate = 1.0 - real.m() as f64 / real.n() as f64;
        prop_assert!((rate - design).abs() < 1e-3);
        for t in 0..real.num_edge_types() {
            let var_side: u64 = (0..real.n()).map(|v| real.variable_degrees(v)[t] as u64).sum();
            let check_side: u64 = (0..real.m()).map(|c| real.check_degrees(c)[t] as u64).sum();
            prop_assert_eq!(var_side, check_side);
        }
    }

    #[test]
    fn syndrome_is_linear(
        (h, a, b) in (8usize..40, 4usize..20).prop_flat_map(|(n, m)| (sparse_matrix(n, m), bits(n), bits(n)))
    ) {
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let sa = h.syndrome(&a).unwrap();
        let sb = h.syndrome(&b).unwrap();
        let sx = h.syndrome(&xor).unwrap();
        let expected: Vec<u8> = sa.iter().zip(&sb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(sx, expected);
    }

    #[test]
    fn columns_transpose_rows(h in (8usize..40, 4usize..20).prop_flat_map(|(n, m)| sparse_matrix(n, m))) {
        for c in 0..h.n() {
            for &r in h.col(c) {
                prop_assert!(h.row(r as usize).contains(&(c as u32)));
            }
        }
        let total: usize = (0..h.n()).map(|c| h.col_degree(c)).sum();
        prop_assert_eq!(total, h.num_edges());
    }

    #[test]
    fn alist_round_trip(h in (8usize..40, 4usize..20).prop_flat_map(|(n, m)| sparse_matrix(n, m))) {
        let mut buf = Vec::new();
        h.write_alist(&mut buf).unwrap();
        let back = ParityCheckMatrix::read_alist(buf.as_slice()).unwrap();
        for r in 0..h.m() {
            prop_assert_eq!(h.row(r), back.row(r));
        }
    }

    #[test]
    fn plan_roles_and_frames(n in 16usize..400, frac_s in 0.0f64..0.4, frac_p in 0.0f64..0.4, seed: u64) {
        let m = n / 2;
        let s = (frac_s * n as f64) as usize;
        let p = ((frac_p * n as f64) as usize).min(m);
        prop_assume!(s + m < n && s + p < n);
        let plan = RateAdaptPlan::random(n, m, s, p, seed).unwrap();
        let count = |role| plan.roles().iter().filter(|&&r| r == role).count();
        prop_assert_eq!(count(SlotRole::Shortened), s);
        prop_assert_eq!(count(SlotRole::Punctured), p);
        prop_assert_eq!(count(SlotRole::Payload), n - s - p);

        let payload: Vec<u8> = (0..plan.payload_len()).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let frame = plan.assemble_bob_frame(&payload, &mut rng).unwrap();
        prop_assert_eq!(plan.extract_payload(&frame).unwrap(), payload.clone());
        for (k, &i) in plan.shortened_positions().iter().enumerate() {
            prop_assert_eq!(frame[i as usize], plan.shortened_values()[k]);
        }

        let llrs: Vec<f64> = payload.iter().map(|&b| if b == 0 { 1.5 } else { -1.5 }).collect();
        let alice = plan.assemble_alice_llrs(&llrs).unwrap();
        prop_assert_eq!(plan.extract_payload(&alice).unwrap(), llrs);
        for &i in plan.punctured_positions() {
            prop_assert_eq!(alice[i as usize], 0.0);
        }
        let pinned = plan.pinned_mask();
        for (i, &pin) in pinned.iter().enumerate() {
            prop_assert_eq!(pin, plan.roles()[i] == SlotRole::Shortened);
        }
    }

    #[test]
    fn wire_round_trip(n in 16usize..300, s_frac in 0.0f64..0.3, p_frac in 0.0f64..0.3, seed: u64, syn_seed: u64) {
        let m = n / 3;
        let s = (s_frac * n as f64) as usize;
        let p = ((p_frac * n as f64) as usize).min(m);
        prop_assume!(s + m < n && s + p < n);
        let plan = RateAdaptPlan::random(n, m, s, p, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(syn_seed);
        let syndrome = rate_adapt::random_bits(&mut rng, m);
        let bytes = plan.encode_wire(&syndrome).unwrap();
        let (back, syn) = RateAdaptPlan::decode_wire(&bytes, n, m).unwrap();
        prop_assert_eq!(syn, syndrome);
        prop_assert_eq!(back.roles(), plan.roles());
        prop_assert_eq!(back.shortened_values(), plan.shortened_values());
        prop_assert_eq!(back.disclosed_bits(), m + s);
    }

    #[test]
    fn adapted_rate_stays_near_target(target in 0.005f64..0.095, t in 2000usize..20000) {
        let (n, m) = (100_000, 90_000);
        if let Ok((s, p)) = rate_adapt::split_for_target(n, m, target, t) {
            prop_assert_eq!(s + p, t);
            let r = rate_adapt::adapted_rate(n, m, s, p).unwrap();
            prop_assert!((r - target).abs() <= 1.0 / (n - t) as f64);
        }
    }

    #[test]
    fn pack_unpack(bits in prop::collection::vec(0u8..2, 0..200)) {
        prop_assert_eq!(rate_adapt::unpack_bits(&rate_adapt::pack_bits(&bits), bits.len()), bits);
    }

    #[test]
    fn mapping_is_orthogonal(y in prop::array::uniform8(-5.0f64..5.0), u_bits: u8, x in prop::array::uniform8(-5.0f64..5.0)) {
        let fam = OrthogonalFamily::octonion();
        prop_assume!(multidim::norm(&y) > 1e-6 && multidim::norm(&x) > 1e-6);
        let (y_unit, _) = multidim::normalize(&y).unwrap();
        let (x_unit, _) = multidim::normalize(&x).unwrap();
        let u = multidim::sphere_point(u_bits);
        let alpha = multidim::map_coefficients(&y_unit, &u, &fam).unwrap();
        let v = multidim::apply_mapping(&y_unit, &alpha, &fam).unwrap();
        for i in 0..DIM {
            prop_assert!((v[i] - u[i]).abs() < 1e-12);
        }
        // Orthogonal maps preserve inner products.
        let w = multidim::apply_mapping(&x_unit, &alpha, &fam).unwrap();
        let before: f64 = (0..DIM).map(|i| x_unit[i] * y_unit[i]).sum();
        let after: f64 = (0..DIM).map(|i| w[i] * v[i]).sum();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn summary_ignores_frame_order(outcomes in prop::collection::vec((any::<bool>(), 0usize..500), 1..60), seed: u64) {
        let results: Vec<FrameResult> = outcomes
            .iter()
            .map(|&(ok, it)| FrameResult { success: ok, iterations: it, beta: if ok { 0.9 } else { 0.0 }, disclosed: 10 })
            .collect();
        let mut shuffled = results.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = summarize(&results, 0.1, Mode::Original, 0.1, 0, 0, 1);
        let b = summarize(&shuffled, 0.1, Mode::Original, 0.1, 0, 0, 1);
        prop_assert_eq!(a.failures, b.failures);
        prop_assert_eq!(a.fer, b.fer);
        prop_assert!((a.mean_beta - b.mean_beta).abs() < 1e-12);
        prop_assert!((a.mean_iters - b.mean_iters).abs() < 1e-9);
        prop_assert!(a.fer_ci_low <= a.fer && a.fer <= a.fer_ci_high);
    }
}
