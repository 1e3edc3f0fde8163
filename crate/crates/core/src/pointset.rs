//! Finite weighted point sets on the torus.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{sci17, CompensatedSum};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Pushed forward from an exact lattice distribution.
    Exact,
    /// Visit frequencies of a simulation, or loaded from a file.
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Probability measure on `[0,1)^d` with finitely many atoms.
///
/// Atoms are distinct (bit-identical points are merged on construction) and
/// kept in lexicographic order of their coordinates, so two sets built from
/// permutations of the same atoms are identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    d: usize,
    atoms: Vec<Atom>,
    provenance: Provenance,
}

type PointKey = Vec<u64>;

fn point_key(point: &[f64]) -> PointKey {
    // Non-negative finite doubles order like their bit patterns.
    point.iter().map(|x| (x + 0.0).to_bits()).collect()
}

impl WeightedPointSet {
    pub fn new(d: usize, atoms: Vec<(Vec<f64>, f64)>, provenance: Provenance) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("point sets need d ≥ 1"));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("point set has no atoms"));
        }
        let mut merged: BTreeMap<PointKey, CompensatedSum> = BTreeMap::new();
        for (idx, (point, weight)) in atoms.into_iter().enumerate() {
            if point.len() != d {
                return Err(Error::invalid(format!(
                    "atom {idx} has {} coordinates, expected {d}",
                    point.len()
                )));
            }
            if let Some(x) = point.iter().find(|x| !(0.0..1.0).contains(*x)) {
                return Err(Error::invalid(format!("atom {idx} has coordinate {x} outside [0, 1)")));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::invalid(format!("atom {idx} has non-positive weight {weight}")));
            }
            merged.entry(point_key(&point)).or_default().add(weight);
        }
        Self::from_merged(d, merged.into_iter().map(|(k, w)| (k, w.value())), provenance)
    }

    /// Builds from already-merged atoms keyed by coordinate bit patterns, in key order.
    pub(crate) fn from_merged<I>(d: usize, merged: I, provenance: Provenance) -> Result<Self>
    where
        I: IntoIterator<Item = (PointKey, f64)>,
    {
        let atoms: Vec<Atom> = merged
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(key, weight)| Atom {
                point: key.into_iter().map(f64::from_bits).collect(),
                weight,
            })
            .collect();
        let total: CompensatedSum = atoms.iter().map(|a| a.weight).collect();
        if (total.value() - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "weights sum to {:.17}, not 1 within {WEIGHT_SUM_TOLERANCE:e}",
                total.value()
            )));
        }
        if let Some(a) = atoms.iter().find(|a| a.weight > 1.0 + WEIGHT_SUM_TOLERANCE) {
            return Err(Error::invalid(format!("atom weight {} exceeds 1", a.weight)));
        }
        Ok(Self { d, atoms, provenance })
    }

    /// A single atom of weight one.
    pub fn point_mass(point: Vec<f64>) -> Result<Self> {
        let d = point.len();
        Self::new(d, vec![(point, 1.0)], Provenance::Exact)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).collect::<CompensatedSum>().value()
    }

    /// One atom per line: `d` coordinates then the weight, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for atom in &self.atoms {
            for x in &atom.point {
                let _ = write!(out, "{},", sci17(*x));
            }
            let _ = writeln!(out, "{}", sci17(atom.weight));
        }
        out
    }

    /// Parses the CSV written by [`WeightedPointSet::to_csv`]. Blank lines and
    /// lines starting with `#` are skipped; the result is marked empirical.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut d = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| {
                        Error::invalid(format!("line {}: cannot parse {:?} as a number", lineno + 1, f.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if fields.len() < 2 {
                return Err(Error::invalid(format!(
                    "line {}: need at least one coordinate and a weight",
                    lineno + 1
                )));
            }
            let dim = fields.len() - 1;
            if *d.get_or_insert(dim) != dim {
                return Err(Error::invalid(format!("line {}: inconsistent dimension", lineno + 1)));
            }
            let weight = fields[dim];
            let mut point = fields;
            point.truncate(dim);
            atoms.push((point, weight));
        }
        let d = d.ok_or_else(|| Error::invalid("point set file has no atoms"))?;
        Self::new(d, atoms, Provenance::Empirical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_sorts() {
        let p = WeightedPointSet::new(
            1,
            vec![(vec![0.5], 0.25), (vec![0.1], 0.5), (vec![0.5], 0.25)],
            Provenance::Empirical,
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.atoms()[0].point, vec![0.1]);
        assert_eq!(p.atoms()[1].weight, 0.5);
    }

    #[test]
    fn rejects_invalid_atoms() {
        assert!(WeightedPointSet::new(1, vec![(vec![1.0], 1.0)], Provenance::Exact).is_err());
        assert!(WeightedPointSet::new(1, vec![(vec![-0.1], 1.0)], Provenance::Exact).is_err());
        assert!(WeightedPointSet::new(1, vec![(vec![0.1], 0.9)], Provenance::Exact).is_err());
        assert!(WeightedPointSet::new(1, vec![(vec![0.1], 0.0), (vec![0.2], 1.0)], Provenance::Exact).is_err());
        assert!(WeightedPointSet::new(2, vec![(vec![0.1], 1.0)], Provenance::Exact).is_err());
        assert!(WeightedPointSet::new(1, vec![], Provenance::Exact).is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = WeightedPointSet::new(
            2,
            vec![
                (vec![0.1, 0.618033988749895], 1.0 / 3.0),
                (vec![0.0, 0.999999999999], 2.0 / 3.0),
            ],
            Provenance::Empirical,
        )
        .unwrap();
        let q = WeightedPointSet::from_csv(&p.to_csv()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn csv_rejects_ragged_lines() {
        assert!(WeightedPointSet::from_csv("0.1,0.5\n0.2,0.3,0.5\n").is_err());
        assert!(WeightedPointSet::from_csv("0.5\n").is_err());
        assert!(WeightedPointSet::from_csv("").is_err());
    }
}
