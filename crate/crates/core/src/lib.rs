//! Random walks on the torus `T^d = R^d / Z^d` generated by `±α_1, …, ±α_n`.
//!
//! The crate computes the exact `k`-step law of the walk, its box discrepancy
//! from Lebesgue (Haar) measure, and evaluates the Fourier lower bound, the
//! Erdős–Turán–Koksma upper bound, and the Diophantine quantities that control
//! both.

pub mod diophantine;
pub mod discrepancy;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod numeric;
pub mod pointset;
pub mod theorem;
pub mod walk;

pub use diophantine::{
    dirichlet_search, estimate_bad_constant, nearest_integer_distance, BadApproxEstimate, CertifiedConstant,
};
pub use discrepancy::{
    box_mass, discrepancy_exact, discrepancy_grid, discrepancy_grid_detailed, AxisBox, Direction, DiscrepancyResult,
    Exactness, MassMode,
};
pub use error::{Error, Result};
pub use fourier::{best_fourier_lower_bound, etk_upper_bound, qhat, single_h_lower_bound, weight_r, FrequencyVector};
pub use generators::{builtin_generators, load_generators, BuiltinSpec, Family, GeneratorMatrix, GeneratorWarnings};
pub use pointset::{Atom, Provenance, WeightedPointSet};
pub use theorem::{
    choose_m, cohort_sum_s, fit_decay_exponent, theorem1_lower_bound, theorem2_upper_bound, BoundReport, UpperBound,
};
pub use walk::{exact_walk_distribution, project_to_torus, simulate_walk, LatticeDistribution};
