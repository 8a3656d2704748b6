//! One-sided Jacobi singular value decomposition.
//!
//! Rotations are applied to column pairs of the working matrix until every
//! pair is numerically orthogonal; column norms are then the singular values.
//! This converges to high relative accuracy on the small dense matrices the
//! solvers produce, and its output is deterministic: sweeps visit pairs in
//! index order, values are sorted descending with a stable permutation, and
//! each left vector is sign-fixed by its largest-modulus entry.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

use super::{dot, Mat};

/// Thin SVD `A = U diag(sigma) V^T` with `U: m x k`, `V: n x k`,
/// `k = min(m, n)` and `sigma` sorted descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Mat<T>,
    pub sigma: Vec<T>,
    pub v: Mat<T>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// Sum of the singular values.
    pub fn trace_norm(&self) -> T {
        self.sigma.iter().fold(T::zero(), |acc, &s| acc + s)
    }
}

pub fn svd<T: Real>(a: &Mat<T>) -> Result<Svd<T>> {
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }

    let m = a.nrows();
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = Mat::<T>::identity(n);

    if n == 0 {
        return Ok(Svd {
            u,
            sigma: vec![],
            v,
        });
    }

    let tol = real::<T>(1e-14) + T::epsilon() * real::<T>(8.0);
    let max_sweeps = 30 + 2 * n;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        // columns this far below the largest are treated as exact zeros;
        // rotating against them stalls the sweep without moving anything
        let top = (0..n)
            .map(|j| dot(&u.col(j), &u.col(j)))
            .fold(T::zero(), T::max);
        let dead = top * T::epsilon() * T::epsilon();
        for p in 0..n - 1 {
            for q in p + 1..n {
                let cp = u.col(p);
                let cq = u.col(q);
                let app = dot(&cp, &cp);
                let aqq = dot(&cq, &cq);
                if app <= dead || aqq <= dead {
                    continue;
                }
                let apq = dot(&cp, &cq);
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (real::<T>(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence);
    }

    let mut sigma: Vec<T> = (0..n).map(|j| dot(&u.col(j), &u.col(j)).sqrt()).collect();
    let tiny = T::epsilon() * real::<T>(16.0) * (T::one() + sigma.iter().copied().fold(T::zero(), T::max));
    for j in 0..n {
        if sigma[j] > tiny {
            for i in 0..m {
                u[(i, j)] = u[(i, j)] / sigma[j];
            }
        } else {
            sigma[j] = T::zero();
            for i in 0..m {
                u[(i, j)] = T::zero();
            }
        }
    }

    // stable descending sort, then a deterministic sign for each pair
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap().then(i.cmp(&j)));
    let mut su = Mat::<T>::zeros(m, n);
    let mut sv = Mat::<T>::zeros(n, n);
    let mut ss = vec![T::zero(); n];
    for (new, &old) in order.iter().enumerate() {
        ss[new] = sigma[old];
        let mut flip = T::one();
        let colu = u.col(old);
        if let Some(k) = argmax_abs(&colu) {
            if colu[k] < T::zero() {
                flip = -T::one();
            }
        }
        for i in 0..m {
            su[(i, new)] = flip * u[(i, old)];
        }
        for i in 0..n {
            sv[(i, new)] = flip * v[(i, old)];
        }
    }

    Ok(Svd {
        u: su,
        sigma: ss,
        v: sv,
    })
}

fn argmax_abs<T: Real>(v: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        match best {
            None => {
                if *x != T::zero() {
                    best = Some(i)
                }
            }
            Some(b) => {
                if x.abs() > v[b].abs() {
                    best = Some(i)
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd<f64>) -> Mat<f64> {
        let m = s.u.nrows();
        let n = s.v.nrows();
        let mut out = Mat::zeros(m, n);
        for k in 0..s.sigma.len() {
            let uk = s.u.col(k);
            let vk = s.v.col(k);
            out.add_outer(s.sigma[k], &uk, &vk);
        }
        out
    }

    #[test]
    fn diagonal_values() {
        let a = Mat::<f64>::from_rows(&[vec![3.0, 0.0], vec![0.0, -4.0]]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 4.0).abs() < 1e-12);
        assert!((s.sigma[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn known_2x2() {
        // A^T A has eigenvalues 25 and 1
        let a = Mat::<f64>::from_rows(&[vec![3.0, 2.0], vec![2.0, 3.0]]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 5.0).abs() < 1e-12);
        assert!((s.sigma[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthogonality_5x3() {
        let a = Mat::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 0.0],
            vec![10.0, 11.0, 1.0],
            vec![13.0, 14.0, 2.0],
        ]);
        let s = svd(&a).unwrap();
        let err = reconstruct(&s).sub(&a).max_abs();
        assert!(err < 1e-10, "reconstruction error {err}");
        for i in 0..3 {
            for j in 0..3 {
                let uij = dot(&s.u.col(i), &s.u.col(j));
                let vij = dot(&s.v.col(i), &s.v.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((uij - want).abs() < 1e-12);
                assert!((vij - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wide_matrix_via_transpose() {
        let a = Mat::<f64>::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 1.0]]);
        let s = svd(&a).unwrap();
        let err = reconstruct(&s).sub(&a).max_abs();
        assert!(err < 1e-12);
        assert_eq!(s.sigma.len(), 2);
    }

    #[test]
    fn rank_deficient() {
        let a = Mat::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let s = svd(&a).unwrap();
        assert_eq!(s.rank(1e-9), 1);
        assert!(s.sigma[1].abs() < 1e-12);
    }

    #[test]
    fn deterministic_output() {
        let a = Mat::<f64>::from_rows(&[vec![0.3, -1.2, 0.0], vec![2.0, 0.5, -0.7], vec![1.0, 1.0, 1.0]]);
        let s1 = svd(&a).unwrap();
        let s2 = svd(&a).unwrap();
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.sigma, s2.sigma);
        assert_eq!(s1.v, s2.v);
    }

    #[test]
    fn f32_smoke() {
        let a = Mat::from_rows(&[vec![3.0f32, 1.0], vec![1.0, 3.0]]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 4.0).abs() < 1e-5);
        assert!((s.sigma[1] - 2.0).abs() < 1e-5);
    }
}
