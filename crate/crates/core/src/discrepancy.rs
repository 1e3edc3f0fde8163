//! Box discrepancy `D(P) = sup_B |P(B) - vol(B)|` over axis-parallel boxes
//! `[a_1,b_1) × … × [a_d,b_d) ⊆ [0,1)^d` (no wrap-around).
//!
//! The supremum is generally not attained: a box can shrink onto an atom, or
//! open up to just exclude one. Both limits are realised by pairing the
//! *excess* branch (closed boxes with atom-coordinate corners, counted with
//! closure mass) and the *deficit* branch (open boxes with corners in
//! `{0, 1} ∪ atom coordinates`, counted with interior mass).

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::pointset::WeightedPointSet;

/// Largest atom count accepted by [`discrepancy_exact`] in dimension `d`.
pub fn exact_atom_cap(d: usize) -> usize {
    match d {
        1 => 20_000,
        2 => 400,
        3 => 60,
        _ => 0,
    }
}

/// Largest `(res+1)^d` grid accepted by [`discrepancy_grid`].
pub const GRID_CORNER_CAP: u64 = 1 << 24;

/// Axis-parallel box given by lower and upper corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl AxisBox {
    /// Requires `0 ≤ a_i < b_i ≤ 1` on every axis.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("box corners must be non-empty and of equal length"));
        }
        for (a, b) in lower.iter().zip(&upper) {
            if !(0.0 <= *a && a < b && *b <= 1.0) {
                return Err(Error::invalid(format!("box side [{a}, {b}) is not inside [0, 1]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Witness boxes of the excess branch are closed and may have zero width.
    fn witness(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper }
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMode {
    /// `a_i ≤ x_i ≤ b_i`.
    Closure,
    /// `a_i < x_i < b_i`.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `P(B) > vol(B)`; witness is a closed box.
    Excess,
    /// `vol(B) > P(B)`; witness is an open box.
    Deficit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Grid(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub witness: AxisBox,
    pub direction: Direction,
    pub exactness: Exactness,
}

fn inside(x: f64, a: f64, b: f64, mode: MassMode) -> bool {
    match mode {
        MassMode::Closure => a <= x && x <= b,
        MassMode::Interior => a < x && x < b,
    }
}

/// Total weight of atoms in `b` under the given boundary convention.
pub fn box_mass(p: &WeightedPointSet, b: &AxisBox, mode: MassMode) -> f64 {
    p.atoms()
        .iter()
        .filter(|atom| {
            atom.point
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(&x, (&lo, &hi))| inside(x, lo, hi, mode))
        })
        .map(|atom| atom.weight)
        .collect::<CompensatedSum>()
        .value()
}

fn half_open_mass(p: &WeightedPointSet, b: &AxisBox) -> f64 {
    p.atoms()
        .iter()
        .filter(|atom| {
            atom.point
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x < hi)
        })
        .map(|atom| atom.weight)
        .collect::<CompensatedSum>()
        .value()
}

fn cmp_slices(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    direction: Direction,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Candidate {
    fn none() -> Self {
        Candidate {
            value: f64::NEG_INFINITY,
            direction: Direction::Deficit,
            lower: Vec::new(),
            upper: Vec::new(),
        }
    }

    /// Larger value wins; ties go to excess, then to the lexicographically
    /// smaller witness. The order is total, so reductions are deterministic.
    fn beats(&self, other: &Candidate) -> bool {
        match self.value.total_cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                if self.direction != other.direction {
                    return self.direction == Direction::Excess;
                }
                cmp_slices(&self.lower, &other.lower)
                    .then_with(|| cmp_slices(&self.upper, &other.upper))
                    .is_lt()
            }
        }
    }

    fn better(self, other: Candidate) -> Candidate {
        if other.beats(&self) {
            other
        } else {
            self
        }
    }
}

/// Atoms flattened for the enumeration: coordinates row-major plus weights.
struct Flat<'a> {
    d: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    _set: &'a WeightedPointSet,
}

impl<'a> Flat<'a> {
    fn new(p: &'a WeightedPointSet) -> Self {
        let d = p.d();
        let mut coords = Vec::with_capacity(p.len() * d);
        let mut weights = Vec::with_capacity(p.len());
        for atom in p.atoms() {
            coords.extend_from_slice(&atom.point);
            weights.push(atom.weight);
        }
        Flat {
            d,
            coords,
            weights,
            _set: p,
        }
    }

    fn x(&self, atom: usize, axis: usize) -> f64 {
        self.coords[atom * self.d + axis]
    }
}

fn unique_sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Last-axis sweep for the excess branch. `members` must be sorted by the last
/// coordinate. Maximises `Σ_{i..=j} w - scale·(x_j - x_i)` over `x_i ≤ x_j`.
fn sweep_excess(flat: &Flat, members: &[usize], scale: f64) -> Option<(f64, f64, f64)> {
    let axis = flat.d - 1;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut before = 0.0;
    let mut best_left = f64::NEG_INFINITY;
    let mut left_x = 0.0;
    let mut idx = 0;
    while idx < members.len() {
        let x = flat.x(members[idx], axis);
        let mut w = 0.0;
        while idx < members.len() && flat.x(members[idx], axis) == x {
            w += flat.weights[members[idx]];
            idx += 1;
        }
        let left = scale * x - before;
        if left > best_left {
            best_left = left;
            left_x = x;
        }
        before += w;
        let value = before - scale * x + best_left;
        if best.is_none_or(|(v, _, _)| value > v) {
            best = Some((value, left_x, x));
        }
    }
    best
}

/// Last-axis sweep for the deficit branch over candidates `{0, 1} ∪ member
/// coordinates`. Maximises `scale·(c_j - c_i) - mass strictly between`.
fn sweep_deficit(flat: &Flat, members: &[usize], scale: f64) -> (f64, f64, f64) {
    let axis = flat.d - 1;
    // (coordinate, weight at that coordinate)
    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(members.len() + 2);
    cands.push((0.0, 0.0));
    for &m in members {
        let x = flat.x(m, axis);
        match cands.last_mut() {
            Some(last) if last.0 == x => last.1 += flat.weights[m],
            _ => cands.push((x, flat.weights[m])),
        }
    }
    cands.push((1.0, 0.0));

    let mut best = (f64::NEG_INFINITY, 0.0, 1.0);
    let mut below = 0.0;
    // max over i < j of W(≤ c_i) - scale·c_i
    let mut best_left = f64::NEG_INFINITY;
    let mut left_x = 0.0;
    for (j, &(c, w)) in cands.iter().enumerate() {
        if j > 0 {
            let value = scale * c - below + best_left;
            if value > best.0 {
                best = (value, left_x, c);
            }
        }
        below += w;
        let left = below - scale * c;
        if left > best_left {
            best_left = left;
            left_x = c;
        }
    }
    best
}

struct Search<'a> {
    flat: &'a Flat<'a>,
}

impl Search<'_> {
    fn excess(
        &self,
        axis: usize,
        members: &[usize],
        lower: &mut Vec<f64>,
        upper: &mut Vec<f64>,
        scale: f64,
        best: &mut Candidate,
    ) {
        let flat = self.flat;
        if axis + 1 == flat.d {
            if let Some((value, a, b)) = sweep_excess(flat, members, scale) {
                let mut lo = lower.clone();
                let mut hi = upper.clone();
                lo.push(a);
                hi.push(b);
                let cand = Candidate {
                    value,
                    direction: Direction::Excess,
                    lower: lo,
                    upper: hi,
                };
                if cand.beats(best) {
                    *best = cand;
                }
            }
            return;
        }
        let coords = unique_sorted(members.iter().map(|&m| flat.x(m, axis)).collect());
        for (i, &a) in coords.iter().enumerate() {
            for &b in &coords[i..] {
                let sub: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&m| (a..=b).contains(&flat.x(m, axis)))
                    .collect();
                let mass: f64 = sub.iter().map(|&m| flat.weights[m]).sum();
                if mass < best.value {
                    continue;
                }
                lower.push(a);
                upper.push(b);
                self.excess(axis + 1, &sub, lower, upper, scale * (b - a), best);
                lower.pop();
                upper.pop();
            }
        }
    }

    fn deficit(
        &self,
        axis: usize,
        members: &[usize],
        lower: &mut Vec<f64>,
        upper: &mut Vec<f64>,
        scale: f64,
        best: &mut Candidate,
    ) {
        let flat = self.flat;
        if axis + 1 == flat.d {
            let (value, a, b) = sweep_deficit(flat, members, scale);
            let mut lo = lower.clone();
            let mut hi = upper.clone();
            lo.push(a);
            hi.push(b);
            let cand = Candidate {
                value,
                direction: Direction::Deficit,
                lower: lo,
                upper: hi,
            };
            if cand.beats(best) {
                *best = cand;
            }
            return;
        }
        let mut coords: Vec<f64> = members.iter().map(|&m| flat.x(m, axis)).collect();
        coords.push(0.0);
        coords.push(1.0);
        let coords = unique_sorted(coords);
        for (i, &a) in coords.iter().enumerate() {
            for &b in &coords[i + 1..] {
                let width = scale * (b - a);
                if width < best.value {
                    continue;
                }
                let sub: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&m| {
                        let x = flat.x(m, axis);
                        a < x && x < b
                    })
                    .collect();
                lower.push(a);
                upper.push(b);
                self.deficit(axis + 1, &sub, lower, upper, width, best);
                lower.pop();
                upper.pop();
            }
        }
    }
}

/// Exact box discrepancy by enumeration of critical boxes.
///
/// For `d = 1` this is an `O(N)` sweep over the sorted atoms; for `d ≥ 2`
/// intervals on the first `d - 1` axes are enumerated recursively with a sweep
/// on the last axis. Limited to `d ≤ 3` and the atom caps of [`exact_atom_cap`].
pub fn discrepancy_exact(p: &WeightedPointSet) -> Result<DiscrepancyResult> {
    let d = p.d();
    let cap = exact_atom_cap(d);
    if p.len() > cap {
        return Err(Error::CapExceeded {
            what: "exact discrepancy atom count",
            required: p.len() as u128,
            cap: cap as u128,
            hint: "use discrepancy_grid for this point set",
        });
    }
    let flat = Flat::new(p);
    let mut by_last: Vec<usize> = (0..p.len()).collect();
    by_last.sort_by(|&a, &b| flat.x(a, d - 1).total_cmp(&flat.x(b, d - 1)).then(a.cmp(&b)));
    let search = Search { flat: &flat };

    let best = if d == 1 {
        let mut best = Candidate::none();
        search.excess(0, &by_last, &mut Vec::new(), &mut Vec::new(), 1.0, &mut best);
        search.deficit(0, &by_last, &mut Vec::new(), &mut Vec::new(), 1.0, &mut best);
        best
    } else {
        // Parallel over the lower end of the first-axis interval.
        let mut firsts: Vec<f64> = by_last.iter().map(|&m| flat.x(m, 0)).collect();
        let excess_coords = unique_sorted(firsts.clone());
        firsts.extend([0.0, 1.0]);
        let deficit_coords = unique_sorted(firsts);

        let excess = (0..excess_coords.len())
            .into_par_iter()
            .map(|i| {
                let mut best = Candidate::none();
                let a = excess_coords[i];
                for &b in &excess_coords[i..] {
                    let sub: Vec<usize> = by_last
                        .iter()
                        .copied()
                        .filter(|&m| (a..=b).contains(&flat.x(m, 0)))
                        .collect();
                    let mut lower = vec![a];
                    let mut upper = vec![b];
                    search.excess(1, &sub, &mut lower, &mut upper, b - a, &mut best);
                }
                best
            })
            .reduce(Candidate::none, Candidate::better);
        let deficit = (0..deficit_coords.len())
            .into_par_iter()
            .map(|i| {
                let mut best = Candidate::none();
                let a = deficit_coords[i];
                for &b in &deficit_coords[i + 1..] {
                    let sub: Vec<usize> = by_last
                        .iter()
                        .copied()
                        .filter(|&m| {
                            let x = flat.x(m, 0);
                            a < x && x < b
                        })
                        .collect();
                    let mut lower = vec![a];
                    let mut upper = vec![b];
                    search.deficit(1, &sub, &mut lower, &mut upper, b - a, &mut best);
                }
                best
            })
            .reduce(Candidate::none, Candidate::better);
        excess.better(deficit)
    };

    let witness = AxisBox::witness(best.lower, best.upper);
    let value = match best.direction {
        Direction::Excess => box_mass(p, &witness, MassMode::Closure) - witness.volume(),
        Direction::Deficit => witness.volume() - box_mass(p, &witness, MassMode::Interior),
    };
    Ok(DiscrepancyResult {
        value: value.clamp(0.0, 1.0),
        witness,
        direction: best.direction,
        exactness: Exactness::Exact,
    })
}

/// Grid estimate of the discrepancy; see [`discrepancy_grid_detailed`].
pub fn discrepancy_grid(p: &WeightedPointSet, resolution: u32) -> Result<f64> {
    discrepancy_grid_detailed(p, resolution).map(|r| r.value)
}

/// Largest `t` with `t/res ≤ x`, using the same corner values as the volumes.
fn grid_cell(x: f64, res: u32) -> usize {
    let r = res as f64;
    let mut t = ((x * r).floor() as i64).clamp(0, res as i64 - 1);
    while t > 0 && t as f64 / r > x {
        t -= 1;
    }
    while t + 1 < res as i64 && (t + 1) as f64 / r <= x {
        t += 1;
    }
    t as usize
}

/// Maximum of `|P(B) - vol(B)|` over half-open boxes with corners on
/// `{0, 1/res, …, 1}`. Every such box is a genuine box, so the value never
/// exceeds the exact discrepancy; rounding an optimal box outward (excess) or
/// inward (deficit) to the grid shows it falls short by at most `2d/res`.
pub fn discrepancy_grid_detailed(p: &WeightedPointSet, resolution: u32) -> Result<DiscrepancyResult> {
    if resolution < 2 {
        return Err(Error::invalid(format!("grid resolution must be ≥ 2, got {resolution}")));
    }
    let d = p.d();
    let side = resolution as usize + 1;
    let corners = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(side as u64));
    match corners {
        Some(c) if c <= GRID_CORNER_CAP => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "grid corner count (res+1)^d",
                required: corners.map_or(u128::MAX, u128::from),
                cap: GRID_CORNER_CAP as u128,
                hint: "lower the resolution",
            })
        }
    }
    // prefix[t_1, …, t_d] = mass of atoms whose cell index is < t_i on every axis.
    let mut prefix = vec![0.0f64; side.pow(d as u32)];
    let strides: Vec<usize> = (0..d).map(|i| side.pow((d - 1 - i) as u32)).collect();
    for atom in p.atoms() {
        let idx: usize = atom
            .point
            .iter()
            .zip(&strides)
            .map(|(&x, s)| (grid_cell(x, resolution) + 1) * s)
            .sum();
        prefix[idx] += atom.weight;
    }
    for (axis, &stride) in strides.iter().enumerate() {
        let _ = axis;
        for idx in 0..prefix.len() {
            if (idx / stride) % side > 0 {
                prefix[idx] += prefix[idx - stride];
            }
        }
    }
    let corner = |t: usize| t as f64 / resolution as f64;

    let best = grid_search(&prefix, d, side, 1.0, &corner, &mut Vec::new(), &mut Vec::new());
    let witness = AxisBox::witness(best.lower, best.upper);
    let mass = half_open_mass(p, &witness);
    let value = (mass - witness.volume()).abs();
    Ok(DiscrepancyResult {
        value: value.clamp(0.0, 1.0),
        witness,
        direction: best.direction,
        exactness: Exactness::Grid(resolution),
    })
}

fn grid_search(
    slab: &[f64],
    dims_left: usize,
    side: usize,
    scale: f64,
    corner: &(dyn Fn(usize) -> f64 + Sync),
    lower: &mut Vec<f64>,
    upper: &mut Vec<f64>,
) -> Candidate {
    if dims_left == 1 {
        // slab[t] = mass below corner t on the last axis.
        let mut best = Candidate::none();
        let (mut max_g, mut max_t) = (f64::NEG_INFINITY, 0);
        let (mut min_g, mut min_t) = (f64::INFINITY, 0);
        for (t, &f) in slab.iter().enumerate() {
            let g = f - scale * corner(t);
            if t > 0 {
                for (value, from, direction) in [
                    (g - min_g, min_t, Direction::Excess),
                    (max_g - g, max_t, Direction::Deficit),
                ] {
                    if value > best.value {
                        let mut lo = lower.clone();
                        let mut hi = upper.clone();
                        lo.push(corner(from));
                        hi.push(corner(t));
                        best = Candidate {
                            value,
                            direction,
                            lower: lo,
                            upper: hi,
                        };
                    }
                }
            }
            if g > max_g {
                max_g = g;
                max_t = t;
            }
            if g < min_g {
                min_g = g;
                min_t = t;
            }
        }
        return best;
    }
    let block = slab.len() / side;
    let run = |i: usize, lower: &mut Vec<f64>, upper: &mut Vec<f64>| {
        let mut best = Candidate::none();
        let lo_row = &slab[i * block..(i + 1) * block];
        for j in i + 1..side {
            let hi_row = &slab[j * block..(j + 1) * block];
            let reduced: Vec<f64> = hi_row.iter().zip(lo_row).map(|(h, l)| h - l).collect();
            lower.push(corner(i));
            upper.push(corner(j));
            let cand = grid_search(
                &reduced,
                dims_left - 1,
                side,
                scale * (corner(j) - corner(i)),
                corner,
                lower,
                upper,
            );
            lower.pop();
            upper.pop();
            best = best.better(cand);
        }
        best
    };
    if lower.is_empty() {
        (0..side)
            .into_par_iter()
            .map(|i| run(i, &mut Vec::new(), &mut Vec::new()))
            .reduce(Candidate::none, Candidate::better)
    } else {
        (0..side)
            .map(|i| run(i, lower, upper))
            .fold(Candidate::none(), Candidate::better)
    }
}
