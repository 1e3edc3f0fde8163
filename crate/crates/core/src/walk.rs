//! The k-step law of the walk, exactly on the coefficient lattice `Z^n` and
//! empirically by seeded simulation.
//!
//! A walk position after `k` steps is `Σ_j m_j α_j mod 1` where `m ∈ Z^n` holds
//! the net signed number of uses of each generator. Exact distributions are
//! stored as big-integer path counts over the denominator `(2n)^k`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::GeneratorMatrix;
use crate::numeric::{centered_residue, residue_to_unit};
use crate::pointset::{Provenance, WeightedPointSet};

/// Default cap on the dense lattice box `(2k+1)^n` swept by the exact walk.
pub const DEFAULT_STATE_CAP: u64 = 4_000_000;

/// Trials per work unit in the simulator; fixed so the merge order never
/// depends on the thread count.
const TRIAL_CHUNK: u64 = 8192;

/// Exact distribution of the net coefficient vector after `k` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeDistribution {
    k: u32,
    n: usize,
    counts: BTreeMap<Vec<i64>, BigUint>,
    denominator: BigUint,
}

impl LatticeDistribution {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Path counts keyed by coefficient vector; only positive counts are stored.
    pub fn counts(&self) -> &BTreeMap<Vec<i64>, BigUint> {
        &self.counts
    }

    pub fn count(&self, m: &[i64]) -> BigUint {
        self.counts.get(m).cloned().unwrap_or_default()
    }

    /// `(2n)^k`.
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Number of lattice points with positive mass.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }
}

/// Counts every signed step sequence of length `k` by its net coefficient vector.
pub fn exact_walk_distribution(g: &GeneratorMatrix, k: u32) -> Result<LatticeDistribution> {
    exact_walk_distribution_capped(g, k, DEFAULT_STATE_CAP)
}

/// As [`exact_walk_distribution`] with an explicit cap on `(2k+1)^n`.
pub fn exact_walk_distribution_capped(g: &GeneratorMatrix, k: u32, state_cap: u64) -> Result<LatticeDistribution> {
    let n = g.n();
    let side = 2 * k as u128 + 1;
    let states = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(side));
    match states {
        Some(s) if s <= state_cap as u128 => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "exact walk state box (2k+1)^n",
                required: states.unwrap_or(u128::MAX),
                cap: state_cap as u128,
                hint: "use simulate_walk for this (n, k)",
            })
        }
    }
    let denominator = BigUint::from(2 * n as u64).pow(k);
    let counts = if n == 1 { binomial_counts(k) } else { lattice_dp(n, k) };
    Ok(LatticeDistribution {
        k,
        n,
        counts,
        denominator,
    })
}

/// `n = 1`: the net coefficient is `2j - k` with `C(k, j)` paths.
fn binomial_counts(k: u32) -> BTreeMap<Vec<i64>, BigUint> {
    let mut counts = BTreeMap::new();
    let mut c = BigUint::one();
    for j in 0..=k as u64 {
        counts.insert(vec![2 * j as i64 - k as i64], c.clone());
        c = c * (k as u64 - j) / (j + 1);
    }
    counts
}

/// Dense dynamic program over the box `[-k, k]^n`: each step adds `±e_j`.
fn lattice_dp(n: usize, k: u32) -> BTreeMap<Vec<i64>, BigUint> {
    let side = 2 * k as usize + 1;
    let len = side.pow(n as u32);
    let strides: Vec<usize> = (0..n).map(|j| side.pow((n - 1 - j) as u32)).collect();
    let coord = |idx: usize, j: usize| (idx / strides[j]) % side;
    let origin: usize = strides.iter().map(|s| s * k as usize).sum();

    let mut cur = vec![BigUint::zero(); len];
    cur[origin] = BigUint::one();
    for t in 1..=k as usize {
        let next: Vec<BigUint> = (0..len)
            .into_par_iter()
            .with_min_len(1024)
            .map(|idx| {
                let l1: usize = (0..n).map(|j| coord(idx, j).abs_diff(k as usize)).sum();
                if l1 > t || !(t - l1).is_multiple_of(2) {
                    return BigUint::zero();
                }
                let mut acc = BigUint::zero();
                for (j, &stride) in strides.iter().enumerate() {
                    let c = coord(idx, j);
                    if c > 0 {
                        acc += &cur[idx - stride];
                    }
                    if c + 1 < side {
                        acc += &cur[idx + stride];
                    }
                }
                acc
            })
            .collect();
        cur = next;
    }

    cur.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, c)| {
            let m = (0..n).map(|j| coord(idx, j) as i64 - k as i64).collect();
            (m, c)
        })
        .collect()
}

/// Torus point `frac(Σ_j m_j α_j)` for a coefficient vector `m`.
pub fn lattice_point(g: &GeneratorMatrix, m: &[i64]) -> Vec<f64> {
    (0..g.d())
        .map(|i| {
            let r = centered_residue(m.iter().enumerate().map(|(j, &mj)| (mj as f64, g.entry(j, i))));
            residue_to_unit(r)
        })
        .collect()
}

/// Pushes a lattice distribution forward to `T^d`.
///
/// Counts landing on bit-identical points are merged exactly; each merged
/// count is converted to a double once. Atoms whose weight underflows to zero
/// (possible only for very large `k`) are dropped.
pub fn project_to_torus(dist: &LatticeDistribution, g: &GeneratorMatrix) -> Result<WeightedPointSet> {
    if dist.n() != g.n() {
        return Err(Error::invalid(format!(
            "distribution has n = {} but the matrix has n = {}",
            dist.n(),
            g.n()
        )));
    }
    let mut merged: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    for (m, c) in dist.counts() {
        let key = lattice_point(g, m).into_iter().map(f64::to_bits).collect();
        *merged.entry(key).or_default() += c;
    }
    let denom = BigInt::from(dist.denominator().clone());
    let weighted: Vec<(Vec<u64>, f64)> = merged
        .into_par_iter()
        .map(|(key, c)| {
            let w = BigRational::new_raw(BigInt::from(c), denom.clone())
                .to_f64()
                .unwrap_or(0.0);
            (key, w)
        })
        .collect();
    WeightedPointSet::from_merged(g.d(), weighted, Provenance::Exact)
}

/// Net coefficient vector of one simulated walk.
fn simulate_trial(n: usize, k: u32, seed: u64, trial: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut m = vec![0i64; n];
    for _ in 0..k {
        let choice = rng.gen_range(0..2 * n);
        m[choice / 2] += if choice % 2 == 0 { 1 } else { -1 };
    }
    m
}

/// Empirical law of `trials` independent `k`-step walks.
///
/// Trial `t` draws from its own ChaCha stream keyed by `(seed, t)`, so the
/// output is a function of `(seed, trials, k)` alone.
pub fn simulate_walk(g: &GeneratorMatrix, k: u32, trials: u64, seed: u64) -> Result<WeightedPointSet> {
    if trials == 0 {
        return Err(Error::invalid("simulate_walk needs at least one trial"));
    }
    let n = g.n();
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let tallies: HashMap<Vec<i64>, u64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<Vec<i64>, u64> = HashMap::new();
            let end = ((c + 1) * TRIAL_CHUNK).min(trials);
            for t in c * TRIAL_CHUNK..end {
                *local.entry(simulate_trial(n, k, seed, t)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (m, c) in b {
                *a.entry(m).or_default() += c;
            }
            a
        });
    let mut merged: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for (m, c) in tallies {
        let key = lattice_point(g, &m).into_iter().map(f64::to_bits).collect();
        *merged.entry(key).or_default() += c;
    }
    let total = trials as f64;
    WeightedPointSet::from_merged(
        g.d(),
        merged.into_iter().map(|(key, c)| (key, c as f64 / total)),
        Provenance::Empirical,
    )
}
