mod common;

use toruswalk::{
    box_mass, builtin_generators, discrepancy_exact, discrepancy_grid, exact_walk_distribution, project_to_torus,
    AxisBox, Direction, Family, MassMode, Provenance, WeightedPointSet,
};

#[test]
fn exact_matches_brute_force() {
    let mut seed = 0;
    for d in 1..=2 {
        for n in [1, 2, 3, 7, 15] {
            for snap in [None, Some(8)] {
                seed += 1;
                let p = common::random_point_set(seed, d, n, snap);
                let got = discrepancy_exact(&p).unwrap().value;
                let want = common::brute_discrepancy(&p);
                assert!((got - want).abs() <= 1e-12, "seed={seed} d={d}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn exact_matches_brute_force_in_three_dimensions() {
    for seed in 100..104 {
        let p = common::random_point_set(seed, 3, 6, if seed % 2 == 0 { Some(4) } else { None });
        let got = discrepancy_exact(&p).unwrap().value;
        let want = common::brute_discrepancy(&p);
        assert!((got - want).abs() <= 1e-12, "seed={seed}: {got} vs {want}");
    }
}

#[test]
fn witness_reproduces_the_value() {
    for seed in 200..220 {
        let d = 1 + (seed % 2) as usize;
        let p = common::random_point_set(seed, d, 25, None);
        let r = discrepancy_exact(&p).unwrap();
        let w = &r.witness;
        let vol = w.volume();
        let mass = match r.direction {
            Direction::Excess => box_mass(&p, w, MassMode::Closure),
            Direction::Deficit => box_mass(&p, w, MassMode::Interior),
        };
        let signed = match r.direction {
            Direction::Excess => mass - vol,
            Direction::Deficit => vol - mass,
        };
        assert!((signed - r.value).abs() <= 1e-14, "seed={seed}");
    }
}

#[test]
fn sandwich_against_grid() {
    for seed in 0..20u64 {
        let d = 1 + (seed % 2) as usize;
        let n = 10 + 19 * seed as usize % 190;
        let p = common::random_point_set(1000 + seed, d, n, None);
        let exact = discrepancy_exact(&p).unwrap().value;
        let grid = discrepancy_grid(&p, 512).unwrap();
        assert!(grid <= exact + 1e-12, "seed={seed}: grid {grid} > exact {exact}");
        assert!(exact <= grid + d as f64 * (2.0 / 512.0) + 1e-12, "seed={seed}");
    }
}

#[test]
fn known_values() {
    let p = WeightedPointSet::point_mass(vec![0.3, 0.9]).unwrap();
    assert_eq!(discrepancy_exact(&p).unwrap().value, 1.0);
    for m in [2u32, 4, 8] {
        let atoms = (0..m).map(|i| (vec![i as f64 / m as f64], 1.0 / m as f64)).collect();
        let p = WeightedPointSet::new(1, atoms, Provenance::Exact).unwrap();
        let v = discrepancy_exact(&p).unwrap().value;
        assert!((v - 1.0 / m as f64).abs() <= 1e-12);
    }
    let g = builtin_generators(Family::Golden, 1, 1, None).unwrap();
    let p = project_to_torus(&exact_walk_distribution(&g, 1).unwrap(), &g).unwrap();
    let v = discrepancy_exact(&p).unwrap().value;
    assert!((v - 0.763_932_022_5).abs() <= 1e-9);
}

#[test]
fn closure_and_interior_masses() {
    let p = WeightedPointSet::new(
        1,
        vec![(vec![0.25], 0.5), (vec![0.5], 0.25), (vec![0.75], 0.25)],
        Provenance::Exact,
    )
    .unwrap();
    let b = AxisBox::new(vec![0.25], vec![0.5]).unwrap();
    assert_eq!(box_mass(&p, &b, MassMode::Closure), 0.75);
    assert_eq!(box_mass(&p, &b, MassMode::Interior), 0.0);
}

#[test]
fn caps_are_enforced() {
    let p = common::random_point_set(5, 2, 401, None);
    assert!(matches!(
        discrepancy_exact(&p),
        Err(toruswalk::Error::CapExceeded { .. })
    ));
    let q = common::random_point_set(6, 3, 4, None);
    assert!(matches!(
        discrepancy_grid(&q, 512),
        Err(toruswalk::Error::CapExceeded { .. })
    ));
}
