//! Two-phase primal simplex for equality-form programs
//! `min c^T x  s.t.  A x = b, x >= 0`, reporting the optimal basic solution
//! and the dual multipliers of the equality constraints.
//!
//! The tableau keeps the artificial columns through phase two (blocked from
//! entering) so the duals can be read off their reduced costs. Pivoting is
//! Dantzig's rule with a switch to Bland's rule after a run of degenerate
//! steps, which keeps the routine deterministic and cycle-free.

use crate::config::LP_TOL;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

use super::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    /// Optimal basic solution.
    pub x: Vec<T>,
    /// `c^T x` at the optimum.
    pub objective: T,
    /// Dual multipliers of the equality constraints; `b^T duals = objective`
    /// and `c - A^T duals >= 0` up to the feasibility tolerance.
    pub duals: Vec<T>,
    pub iterations: usize,
}

struct Tableau<T> {
    /// m x (n + m + 1): original columns, artificial columns, rhs.
    t: Mat<T>,
    /// Reduced-cost row (same width).
    z: Vec<T>,
    basis: Vec<usize>,
    m: usize,
    n: usize,
}

pub fn solve_lp<T: Real>(a: &Mat<T>, b: &[T], c: &[T]) -> Result<LpSolution<T>> {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let tol = real::<T>(LP_TOL);

    if m == 0 {
        // no constraints: x = 0 unless some cost is negative
        if c.iter().any(|&cj| cj < -tol) {
            return Err(Error::LpUnbounded);
        }
        return Ok(LpSolution {
            x: vec![T::zero(); n],
            objective: T::zero(),
            duals: vec![],
            iterations: 0,
        });
    }

    // sign-normalize rows so the artificial start is feasible
    let mut flip = vec![false; m];
    let mut t = Mat::<T>::zeros(m, n + m + 1);
    for i in 0..m {
        let s = if b[i] < T::zero() {
            flip[i] = true;
            -T::one()
        } else {
            T::one()
        };
        for j in 0..n {
            t[(i, j)] = s * a[(i, j)];
        }
        t[(i, n + i)] = T::one();
        t[(i, n + m)] = s * b[i];
    }

    let mut tab = Tableau {
        t,
        z: vec![T::zero(); n + m + 1],
        basis: (n..n + m).collect(),
        m,
        n,
    };

    // phase one: minimize the sum of artificials
    let mut phase1_cost = vec![T::zero(); n + m];
    for j in n..n + m {
        phase1_cost[j] = T::one();
    }
    tab.reset_costs(&phase1_cost);
    let it1 = tab.run(tol, false)?;
    if tab.z[tab.n + tab.m] < -tol {
        return Err(Error::LpInfeasible);
    }
    tab.drive_out_artificials(tol);

    // phase two: original costs, artificials blocked from entering
    let mut phase2_cost = vec![T::zero(); n + m];
    phase2_cost[..n].copy_from_slice(c);
    tab.reset_costs(&phase2_cost);
    let it2 = tab.run(tol, true)?;

    let mut x = vec![T::zero(); n];
    for (row, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.t[(row, n + m)].max(T::zero());
        }
    }
    // duals: reduced cost of artificial i is -y_i (cost 0, column e_i)
    let mut duals = vec![T::zero(); m];
    for i in 0..m {
        let r = tab.z[n + i];
        duals[i] = if flip[i] { r } else { -r };
    }
    let objective = x
        .iter()
        .zip(c)
        .fold(T::zero(), |acc, (xi, ci)| acc + *xi * *ci);

    Ok(LpSolution {
        x,
        objective,
        duals,
        iterations: it1 + it2,
    })
}

impl<T: Real> Tableau<T> {
    /// Rebuilds the reduced-cost row for the given costs and current basis.
    fn reset_costs(&mut self, cost: &[T]) {
        let w = self.n + self.m + 1;
        self.z = vec![T::zero(); w];
        for j in 0..self.n + self.m {
            self.z[j] = cost[j];
        }
        for (row, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj];
            if cb != T::zero() {
                for j in 0..w {
                    let adj = cb * self.t[(row, j)];
                    self.z[j] = self.z[j] - adj;
                }
            }
        }
    }

    fn run(&mut self, tol: T, block_artificials: bool) -> Result<usize> {
        let w = self.n + self.m + 1;
        let enter_limit = if block_artificials {
            self.n
        } else {
            self.n + self.m
        };
        let max_iters = 200 + 60 * (self.m + self.n);
        let mut stall = 0usize;
        for iter in 0..max_iters {
            let bland = stall > 2 * (self.m + 4);
            let Some(pivot_col) = self.choose_entering(enter_limit, tol, bland) else {
                return Ok(iter);
            };
            let Some(pivot_row) = self.ratio_test(pivot_col, tol) else {
                return Err(Error::LpUnbounded);
            };
            let leave_val = self.t[(pivot_row, w - 1)];
            if leave_val.abs() <= tol {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(pivot_row, pivot_col);
        }
        Err(Error::BudgetExceeded { iters: max_iters })
    }

    fn choose_entering(&self, limit: usize, tol: T, bland: bool) -> Option<usize> {
        if bland {
            return (0..limit).find(|&j| self.z[j] < -tol);
        }
        let mut best: Option<(usize, T)> = None;
        for j in 0..limit {
            let zj = self.z[j];
            if zj < -tol && best.map_or(true, |(_, bz)| zj < bz) {
                best = Some((j, zj));
            }
        }
        best.map(|(j, _)| j)
    }

    fn ratio_test(&self, col: usize, tol: T) -> Option<usize> {
        let rhs = self.n + self.m;
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.m {
            let aij = self.t[(i, col)];
            if aij > tol {
                let ratio = self.t[(i, rhs)] / aij;
                match best {
                    None => best = Some((i, ratio)),
                    Some((bi, br)) => {
                        // lowest basis index on ties keeps Bland's rule sound
                        if ratio < br - tol
                            || (ratio < br + tol && self.basis[i] < self.basis[bi])
                        {
                            best = Some((i, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.n + self.m + 1;
        let piv = self.t[(row, col)];
        for j in 0..w {
            self.t[(row, j)] = self.t[(row, j)] / piv;
        }
        for i in 0..self.m {
            if i != row {
                let f = self.t[(i, col)];
                if f != T::zero() {
                    for j in 0..w {
                        let adj = f * self.t[(row, j)];
                        self.t[(i, j)] = self.t[(i, j)] - adj;
                    }
                }
            }
        }
        let zf = self.z[col];
        if zf != T::zero() {
            for j in 0..w {
                let adj = zf * self.t[(row, j)];
                self.z[j] = self.z[j] - adj;
            }
        }
        self.basis[row] = col;
    }

    /// After phase one, swaps basic artificials for original columns where a
    /// nonzero pivot exists; rows left with a basic artificial are redundant.
    fn drive_out_artificials(&mut self, tol: T) {
        for row in 0..self.m {
            if self.basis[row] >= self.n {
                if let Some(col) = (0..self.n).find(|&j| self.t[(row, j)].abs() > tol) {
                    self.pivot(row, col);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_duality(a: &Mat<f64>, b: &[f64], c: &[f64], sol: &LpSolution<f64>) {
        // strong duality and dual feasibility, independent of the pivot path
        let by: f64 = b.iter().zip(&sol.duals).map(|(bi, yi)| bi * yi).sum();
        assert!(
            (by - sol.objective).abs() <= 1e-7 * (1.0 + sol.objective.abs()),
            "strong duality: b^T y = {by}, c^T x = {}",
            sol.objective
        );
        let aty = a.tr_matvec(&sol.duals);
        for j in 0..c.len() {
            assert!(c[j] - aty[j] >= -1e-7, "dual feasibility at column {j}");
        }
        let ax = a.matvec(&sol.x);
        for i in 0..b.len() {
            assert!((ax[i] - b[i]).abs() <= 1e-7, "primal feasibility row {i}");
        }
    }

    #[test]
    fn slack_form_maximization() {
        // max 4x + 3y with x - y <= 1, 2x - y <= 3, y <= 5  -> 31 at (4, 5)
        let a = Mat::<f64>::from_rows(&[
            vec![1.0, -1.0, 1.0, 0.0, 0.0],
            vec![2.0, -1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 1.0],
        ]);
        let b = [1.0, 3.0, 5.0];
        let c = [-4.0, -3.0, 0.0, 0.0, 0.0];
        let sol = solve_lp(&a, &b, &c).unwrap();
        assert!((sol.objective + 31.0).abs() < 1e-9);
        assert!((sol.x[0] - 4.0).abs() < 1e-9);
        assert!((sol.x[1] - 5.0).abs() < 1e-9);
        check_duality(&a, &b, &c, &sol);
    }

    #[test]
    fn gauge_of_cross_polytope() {
        // columns are +-e_i; the minimal positive combination reaching (3, 4)
        // costs 7 and the duals recover the sign functional (1, 1)
        let a = Mat::<f64>::from_rows(&[
            vec![1.0, -1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
        ]);
        let b = [3.0, 4.0];
        let c = [1.0, 1.0, 1.0, 1.0];
        let sol = solve_lp(&a, &b, &c).unwrap();
        assert!((sol.objective - 7.0).abs() < 1e-9);
        assert!((sol.duals[0] - 1.0).abs() < 1e-9);
        assert!((sol.duals[1] - 1.0).abs() < 1e-9);
        check_duality(&a, &b, &c, &sol);
    }

    #[test]
    fn negative_rhs_rows() {
        // x1 - x2 = -2, x1 + x2 = 4 -> (1, 3); minimize x1
        let a = Mat::<f64>::from_rows(&[vec![1.0, -1.0], vec![1.0, 1.0]]);
        let b = [-2.0, 4.0];
        let c = [1.0, 0.0];
        let sol = solve_lp(&a, &b, &c).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 3.0).abs() < 1e-9);
        check_duality(&a, &b, &c, &sol);
    }

    #[test]
    fn infeasible_program() {
        // x1 + x2 = -1 with x >= 0
        let a = Mat::<f64>::from_rows(&[vec![1.0, 1.0]]);
        assert_eq!(solve_lp(&a, &[-1.0], &[1.0, 1.0]), Err(Error::LpInfeasible));
    }

    #[test]
    fn unbounded_program() {
        // x1 = x2 free ray, cost -x1
        let a = Mat::<f64>::from_rows(&[vec![1.0, -1.0]]);
        assert_eq!(
            solve_lp(&a, &[0.0], &[-1.0, 0.0]),
            Err(Error::LpUnbounded)
        );
    }

    #[test]
    fn degenerate_vertex_pair_program() {
        // identity matrix as a positive combination of sign-vector dyads;
        // heavily degenerate but must still close the gap
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let signs: [f64; 2] = [1.0, -1.0];
        for s0 in signs {
            for s1 in signs {
                for t0 in signs {
                    for t1 in signs {
                        let v = [s0, s1];
                        let w = [t0, t1];
                        cols.push(vec![v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1]]);
                    }
                }
            }
        }
        let n = cols.len();
        let a = Mat::from_fn(4, n, |i, j| cols[j][i]);
        let b = [1.0, 0.0, 0.0, 1.0];
        let c = vec![1.0; n];
        let sol = solve_lp(&a, &b, &c).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
        check_duality(&a, &b, &c, &sol);
    }
}
