use proptest::prelude::*;
use topocube::complex::{build_complex, components, enumerate_solutions, DEFAULT_CAP};
use topocube::formula::{circle_formula, random_ksat};
use topocube::randomlab::{
    binary_entropy, derive_seed, expected_faces, mc_face_survival, mcmc_sample, phi, phi_root, q_exact, q_limit,
    shattering_sweep, sweep_csv, vr_persistence, FaceStatParams, RandomLabError, SurvivalVariant, SWEEP_CSV_HEADER,
};

/// Probability that one uniform 3-clause is falsified at some corner of the
/// face varying `1..=k` at base 0, by listing every triple and sign pattern.
fn counted_forbid_prob(n: usize, k: usize) -> f64 {
    let (mut hit, mut total) = (0u64, 0u64);
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for signs in 0..8u32 {
                    total += 1;
                    // Free literals can always be made false; fixed ones are
                    // false at 0 iff positive.
                    let ok = [a, b, c].iter().enumerate().all(|(i, &v)| v <= k || signs >> i & 1 == 0);
                    hit += ok as u64;
                }
            }
        }
    }
    hit as f64 / total as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_is_monotone_in_k(n in 3usize..=30) {
        let qs: Vec<f64> = (0..=n).map(|k| q_exact(n, k).unwrap()).collect();
        prop_assert!((qs[0] - 0.125).abs() < 1e-15);
        prop_assert!(qs.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!((qs[n] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_exact_tracks_limit(n in 50usize..=400, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let d = (q_exact(n, k).unwrap() - q_limit(k as f64 / n as f64).unwrap()).abs();
        prop_assert!(d <= 5.0 / n as f64, "n {} k {} diff {}", n, k, d);
    }

    #[test]
    fn expected_faces_matches_counting(n in 3usize..=8, kf in 0.0f64..1.0, m in 0usize..20) {
        let k = (kf * (n + 1) as f64) as usize;
        let q = counted_forbid_prob(n, k);
        let faces = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) * 2f64.powi((n - k) as i32);
        let want = faces * (1.0 - q).powi(m as i32);
        let got = expected_faces(&FaceStatParams::new(n, k, m).unwrap()).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn phi_root_is_a_zero(alpha in 0.5f64..4.5) {
        let g = phi_root(alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert!(phi(g, alpha).unwrap().abs() < 1e-8);
    }
}

#[test]
fn q_one_ten_value() {
    assert!((q_exact(10, 1).unwrap() - 0.1625).abs() < 1e-15);
}

#[test]
fn phi_zero_at_origin_threshold() {
    let a = 8.0 * std::f64::consts::LN_2;
    assert!(phi(0.0, a).unwrap().abs() <= 1e-12);
    assert!(binary_entropy(0.5) - std::f64::consts::LN_2 < 1e-15);
}

#[test]
fn phi_roots_decrease_with_alpha() {
    let roots: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&a| phi_root(a).unwrap()).collect();
    assert!(roots.windows(2).all(|w| w[1] < w[0]), "{roots:?}");
    assert!(matches!(phi_root(6.0), Err(RandomLabError::NoBracket { .. })));
}

#[test]
fn fixed_vertex_survival_at_twelve() {
    // A single vertex survives m independent clauses with probability (7/8)^m.
    let p = FaceStatParams::new(12, 0, 12).unwrap();
    let e = mc_face_survival(&p, 100_000, 11, SurvivalVariant::Fixed).unwrap();
    let target = 0.875f64.powi(12);
    assert!(e.sigmas_from(target) <= 3.0, "{e:?} vs {target}");
}

#[test]
fn exhaustive_survival_matches_expectation() {
    let p = FaceStatParams::new(10, 1, 10).unwrap();
    let e = mc_face_survival(&p, 10_000, 5, SurvivalVariant::Exhaustive).unwrap();
    assert!(e.sigmas_from(expected_faces(&p).unwrap()) <= 3.0, "{e:?}");
    let big = FaceStatParams::new(15, 1, 10).unwrap();
    assert!(mc_face_survival(&big, 1, 0, SurvivalVariant::Exhaustive).is_err());
}

#[test]
fn vr_beta0_at_unit_scale_counts_clusters() {
    for seed in 0..20 {
        let f = random_ksat(9, 30, 3, seed).unwrap();
        let s = enumerate_solutions(&f, DEFAULT_CAP).unwrap();
        if s.is_empty() || s.len() > 200 {
            continue;
        }
        let bars = vr_persistence(s.members(), &[1.0, 2.0], 1).unwrap();
        let alive_at_one = bars[0].intervals.iter().filter(|(b, d)| *b <= 1.0 && d.is_none_or(|d| d > 1.0)).count();
        let clusters = components(&build_complex(&s, 1).unwrap()).unwrap().len();
        assert_eq!(alive_at_one, clusters, "seed {seed}");
    }
}

#[test]
fn vr_on_circle_solutions() {
    let s = enumerate_solutions(&circle_formula(), DEFAULT_CAP).unwrap();
    let bars = vr_persistence(s.members(), &[1.0, 2.0, 3.0], 2).unwrap();
    assert_eq!(bars[0].intervals, vec![(1.0, None)]);
    assert_eq!(bars[1].intervals, vec![(1.0, Some(2.0))]);
    assert_eq!(bars[2].intervals, vec![(2.0, Some(3.0))]);
}

#[test]
fn walksat_samples_are_solutions_and_reproducible() {
    let f = random_ksat(16, 40, 3, 2).unwrap();
    let a = mcmc_sample(&f, 50, 100, 9).unwrap();
    let c = f.compile();
    assert_eq!(a.points.len(), 50);
    assert!(a.points.iter().all(|&x| c.satisfies(x)));
    assert_eq!(a, mcmc_sample(&f, 50, 100, 9).unwrap());
}

#[test]
fn sweep_is_deterministic() {
    let rows = shattering_sweep(10, &[2.0, 5.0], 6, 3).unwrap();
    let csv = sweep_csv(&rows);
    assert!(csv.starts_with(SWEEP_CSV_HEADER));
    assert_eq!(csv, sweep_csv(&shattering_sweep(10, &[2.0, 5.0], 6, 3).unwrap()));
    assert_ne!(derive_seed(3, 0), derive_seed(3, 1));
    assert!(rows[0].satisfiable >= rows[1].satisfiable);
}

#[test]
fn sweep_solution_counts_fall_with_density() {
    let rows = shattering_sweep(16, &[1.0, 3.0, 4.2], 200, 0).unwrap();
    assert_eq!(sweep_csv(&rows).lines().count(), 4);
    let means: Vec<f64> = rows.iter().map(|r| r.mean_solution_count.unwrap()).collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
    // Mean count over satisfiable draws is at least the unconditional expectation 2^n (7/8)^m.
    for (r, mean) in rows.iter().zip(&means) {
        let m = (r.alpha * 16.0).round() as i32;
        let uncond = 65536.0 * 0.875f64.powi(m);
        assert!(*mean * r.satisfiable as f64 / r.trials as f64 <= uncond * 1.5 + 1.0);
    }
}
