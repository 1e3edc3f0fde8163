#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toruswalk::{Provenance, WeightedPointSet};

/// Net coefficient counts over all `(2n)^k` signed step sequences.
pub fn enumerate_paths(n: usize, k: u32) -> BTreeMap<Vec<i64>, u64> {
    let mut out = BTreeMap::new();
    let total = (2 * n as u64).pow(k);
    for mut code in 0..total {
        let mut m = vec![0i64; n];
        for _ in 0..k {
            let c = (code % (2 * n as u64)) as usize;
            code /= 2 * n as u64;
            m[c / 2] += if c.is_multiple_of(2) { 1 } else { -1 };
        }
        *out.entry(m).or_insert(0) += 1;
    }
    out
}

fn corners(axis: &[f64], with_ends: bool) -> Vec<f64> {
    let mut v: Vec<f64> = axis.to_vec();
    if with_ends {
        v.push(0.0);
        v.push(1.0);
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn for_each_box(axes: &[Vec<f64>], lo: &mut Vec<f64>, hi: &mut Vec<f64>, f: &mut dyn FnMut(&[f64], &[f64])) {
    let i = lo.len();
    if i == axes.len() {
        f(lo, hi);
        return;
    }
    for (a_idx, &a) in axes[i].iter().enumerate() {
        for &b in &axes[i][a_idx..] {
            lo.push(a);
            hi.push(b);
            for_each_box(axes, lo, hi, f);
            lo.pop();
            hi.pop();
        }
    }
}

/// Sup over half-open boxes of `|P(B) - vol(B)|`, by direct enumeration.
///
/// Excess is attained in the limit by closed boxes `[a, b]` with atom
/// coordinates as corners; deficit by open boxes `(a, b)` with corners in
/// `{0, 1}` and the atom coordinates. Cost is `O(N^{2d+1})`.
pub fn brute_discrepancy(p: &WeightedPointSet) -> f64 {
    let d = p.d();
    let atoms = p.atoms();
    let axis = |i: usize| atoms.iter().map(|a| a.point[i]).collect::<Vec<_>>();
    let mut best = 0.0f64;

    let closed: Vec<Vec<f64>> = (0..d).map(|i| corners(&axis(i), false)).collect();
    for_each_box(&closed, &mut Vec::new(), &mut Vec::new(), &mut |lo, hi| {
        let mass: f64 = atoms
            .iter()
            .filter(|a| (0..d).all(|i| lo[i] <= a.point[i] && a.point[i] <= hi[i]))
            .map(|a| a.weight)
            .sum();
        let vol: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
        best = best.max(mass - vol);
    });

    let open: Vec<Vec<f64>> = (0..d).map(|i| corners(&axis(i), true)).collect();
    for_each_box(&open, &mut Vec::new(), &mut Vec::new(), &mut |lo, hi| {
        let mass: f64 = atoms
            .iter()
            .filter(|a| (0..d).all(|i| lo[i] < a.point[i] && a.point[i] < hi[i]))
            .map(|a| a.weight)
            .sum();
        let vol: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
        best = best.max(vol - mass);
    });
    best
}

/// Seeded random point set with `n` atoms and weights summing to one.
///
/// With `snap`, coordinates are multiples of `1/snap`, which produces ties.
pub fn random_point_set(seed: u64, d: usize, n: usize, snap: Option<u32>) -> WeightedPointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(Vec<f64>, f64)> = (0..n)
        .map(|_| {
            let p = (0..d)
                .map(|_| match snap {
                    Some(s) => rng.gen_range(0..s) as f64 / s as f64,
                    None => rng.gen::<f64>(),
                })
                .collect();
            (p, rng.gen_range(1..=16) as f64)
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    let atoms = raw.into_iter().map(|(p, w)| (p, w / total)).collect();
    WeightedPointSet::new(d, atoms, Provenance::Empirical).unwrap()
}
