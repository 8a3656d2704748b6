//! Solver configuration. Every tolerance is an explicit parameter with a
//! stated default; nothing is hidden inside the algorithms.

use serde::{Deserialize, Serialize};

/// Primal/dual agreement tolerance used by the solvers and certificates.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Atoms with weight below this are dropped during normalization.
pub const ATOM_DROP_TOL: f64 = 1e-12;
/// Two atoms are considered equal when, after sign canonicalization, their
/// factor coordinates differ by at most this much (max-abs).
pub const ATOM_DEDUP_TOL: f64 = 1e-9;
/// Feasibility tolerance of the internal simplex routine.
pub const LP_TOL: f64 = 1e-9;
/// Relative accuracy target of the one-sided Jacobi SVD.
pub const SVD_TOL: f64 = 1e-12;
/// Pairings must reach 1 within this during the snap refinement.
pub const SNAP_TOL: f64 = 1e-9;
/// Default cap on the dimension for sign-vector vertex enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 12;
/// Default number of multistarts for the bilinear pricing search.
pub const DEFAULT_MULTISTARTS: usize = 16;
/// Default iteration budget of the alternating snap refinement.
pub const SNAP_ITERS: usize = 32;

/// Knobs shared by the iterative solvers.
///
/// The same struct travels through column generation, the injective-norm
/// search, and the perturbation constructor so that a single seed pins the
/// whole run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Primal/dual agreement tolerance.
    pub tol: f64,
    /// Seed for all multistart randomness; each start derives its own stream.
    pub seed: u64,
    /// Maximum atoms kept in the column-generation pool.
    pub max_atoms: usize,
    /// Maximum column-generation iterations.
    pub max_iters: usize,
    /// Multistarts for the nonconvex bilinear pricing search.
    pub multistarts: usize,
    /// Enumerating sign vertices is refused above this dimension.
    pub vertex_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: 0,
            max_atoms: 4096,
            max_iters: 400,
            multistarts: DEFAULT_MULTISTARTS,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}
