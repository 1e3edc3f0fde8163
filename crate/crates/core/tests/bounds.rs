use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toruswalk::{
    builtin_generators, choose_m, cohort_sum_s, dirichlet_search, discrepancy_exact, estimate_bad_constant,
    etk_upper_bound, exact_walk_distribution, project_to_torus, single_h_lower_bound, theorem1_lower_bound,
    theorem2_upper_bound, Family, GeneratorMatrix,
};

fn exact_d(g: &GeneratorMatrix, k: u32) -> f64 {
    let p = project_to_torus(&exact_walk_distribution(g, k).unwrap(), g).unwrap();
    discrepancy_exact(&p).unwrap().value
}

fn theorem1_fixtures() -> Vec<(GeneratorMatrix, Vec<u32>)> {
    let mut out = vec![
        (
            builtin_generators(Family::Golden, 1, 1, None).unwrap(),
            (1..=30).collect(),
        ),
        (
            builtin_generators(Family::SqrtPrimes, 1, 2, None).unwrap(),
            (1..=8).collect(),
        ),
        (
            builtin_generators(Family::SqrtPrimes, 2, 2, None).unwrap(),
            (1..=8).collect(),
        ),
    ];
    for seed in 0..5u64 {
        let n = 1 + (seed % 2) as usize;
        let d = 1 + (seed / 2 % 2) as usize;
        out.push((
            builtin_generators(Family::Random, n, d, Some(seed)).unwrap(),
            (1..=8).collect(),
        ));
    }
    out
}

#[test]
fn theorem1_holds_on_exact_walks() {
    for (g, ks) in theorem1_fixtures() {
        for k in ks {
            let d = exact_d(&g, k);
            let lower = theorem1_lower_bound(g.n(), g.d(), k as u64).unwrap();
            assert!(d >= lower, "n={} d={} k={k}: D={d} < {lower}", g.n(), g.d());
        }
    }
}

#[test]
fn fourier_bounds_bracket_exact_discrepancy() {
    for (g, ks) in theorem1_fixtures() {
        for k in ks.into_iter().filter(|k| k % 3 == 1) {
            let d = exact_d(&g, k);
            for h in [vec![1i64], vec![-3], vec![2, -1], vec![0, 4]] {
                if h.len() != g.d() {
                    continue;
                }
                let lower = single_h_lower_bound(&g, k, &h, None).unwrap();
                assert!(lower <= d + 1e-12, "k={k} h={h:?}: {lower} > {d}");
                let r: Vec<f64> = h.iter().map(|_| 0.37).collect();
                let lower = single_h_lower_bound(&g, k, &h, Some(&r)).unwrap();
                assert!(lower <= d + 1e-12, "k={k} h={h:?} r=0.37");
            }
            for m in [1, 3, 10] {
                let upper = etk_upper_bound(&g, k, m).unwrap();
                assert!(d <= upper, "k={k} M={m}: {d} > {upper}");
            }
        }
    }
}

#[test]
fn theorem2_holds_with_a_certified_constant() {
    let g = builtin_generators(Family::Golden, 1, 1, None).unwrap();
    let est = estimate_bad_constant(&g, 100_000).unwrap();
    let c = est.certify(0.38).unwrap();
    for k in [100u32, 1000, 10_000] {
        let d = exact_d(&g, k);
        let upper = theorem2_upper_bound(1, 1, c.value, k as u64).unwrap();
        assert!(d <= upper, "k={k}: {d} > {upper}");
    }
}

#[test]
fn golden_constant_over_a_large_range() {
    let g = builtin_generators(Family::Golden, 1, 1, None).unwrap();
    let est = estimate_bad_constant(&g, 100_000).unwrap();
    // h = ±1 gives {α} = 2 - φ; the Fibonacci numbers 1, 3, 8, 21, ... approach 1/√5 from
    // below. Past a few thousand the rounding of the stored α dominates.
    assert!((est.c_est - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
    assert_eq!(est.argmin_h.0, vec![-1]);
    assert!(est.certify(0.437).is_err());
    let mut prev = 0.0;
    for h in [1i64, 3, 8, 21, 55, 144, 377, 987, 2584, 6765] {
        let v = toruswalk::diophantine::sup_distance(&g, &[h]) * h as f64;
        assert!(v > prev && v < 1.0 / 5f64.sqrt(), "h={h}: {v}");
        prev = v;
    }
    assert!((prev - 1.0 / 5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn lemma2_holds_for_badly_approximable_fixtures() {
    let golden = builtin_generators(Family::Golden, 1, 1, None).unwrap();
    let c = estimate_bad_constant(&golden, 1000).unwrap().c_est * 0.99;
    for k in [1_000u64, 10_000, 100_000] {
        let m = choose_m(1, 1, c, k).unwrap();
        let (_, ok) = cohort_sum_s(&golden, k, m).unwrap();
        assert!(ok, "golden k={k} M={m}");
    }
    let sqrt2 = toruswalk::load_generators(&[[2f64.sqrt()]]).unwrap();
    let c = estimate_bad_constant(&sqrt2, 1000).unwrap().c_est * 0.99;
    for k in [1_000u64, 10_000, 100_000] {
        let m = choose_m(1, 1, c, k).unwrap();
        assert!(cohort_sum_s(&sqrt2, k, m).unwrap().1, "sqrt2 k={k}");
    }
}

#[test]
fn dirichlet_always_succeeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=3);
        let q: f64 = rng.gen_range(1.0..=10.0);
        let seed = rng.gen::<u64>();
        let g = builtin_generators(Family::Random, n, d, Some(seed)).unwrap();
        let h = dirichlet_search(&g, q).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let norm = h.sup_norm();
        assert!(norm > 0);
        assert!(
            (norm as f64) <= q.powf(n as f64 / d as f64).floor() + 1e-9,
            "case {case}"
        );
        assert!(
            toruswalk::diophantine::sup_distance(&g, h.as_slice()) < 1.0 / q,
            "case {case}"
        );
    }
}
