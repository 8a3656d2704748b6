//! Projective-norm solvers.
//!
//! Exact oracles where the geometry allows: the sum of singular values when
//! both factors carry inner-product norms, row-norm sums when the first
//! factor is `l_1`-like, and a vertex-pair linear program when both unit
//! balls are polytopes. The general path is column generation over a growing
//! atom pool priced by dual multipliers. Every solver reports an upper bound
//! (the best decomposition found), a lower bound (the best certified dual
//! pairing), and the dual operator itself, so results stay honest when
//! pricing cannot be certified.

use serde::{Deserialize, Serialize};

use crate::banach::NormedSpace;
use crate::bilinear;
use crate::config::{SolverConfig, ATOM_DROP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{solve_lp, svd, Mat};
use crate::scalar::{real, Real};
use crate::tensor::{
    assemble, canonicalize_pair, normalize_atoms, pairing, same_atom, Decomposition,
    DualOperator, RawAtom, Tensor,
};

/// Whether an operator norm is known exactly or only bounded from below by
/// a finished search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpNormStatus {
    Exact,
    LowerBound,
}

/// Operator norm of `G : X -> Y*` with a witness on the unit sphere.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct OpNormResult<T> {
    pub value: T,
    pub status: OpNormStatus,
    /// `x` with `||x|| = 1` and `||G x||_{Y*} = value` (when exact).
    pub attainer: Vec<T>,
}

/// `||G||`: exact by vertex scan or singular values when available,
/// otherwise the best value of a seeded multistart alternating ascent,
/// flagged `LowerBound`.
pub fn operator_norm<T: Real>(g: &DualOperator<T>, cfg: &SolverConfig) -> Result<OpNormResult<T>> {
    let flat = g.flat_matrix();
    let r = bilinear::primal_sup(&flat, g.x_space(), g.y_space(), cfg)?;
    let mut attainer = r.x;
    if attainer.iter().all(|t| *t == T::zero()) {
        // zero operator: any unit vector witnesses the zero norm
        let mut e = vec![T::zero(); g.x_space().dim()];
        e[0] = T::one();
        let n = g.x_space().norm_eval(&e)?;
        attainer = e.iter().map(|t| *t / n).collect();
    }
    Ok(OpNormResult {
        value: r.value,
        status: if r.exact {
            OpNormStatus::Exact
        } else {
            OpNormStatus::LowerBound
        },
        attainer,
    })
}

/// Certified upper bound on `||G||` from coordinate bounds:
/// `sup B(x, y) <= sum |M_ij| s_i t_j` with `s_i = sup_{B_X} |x_i|`.
/// Crude but sound; it backs the lower bound when the exact norm is not
/// available.
pub fn operator_norm_upper<T: Real>(g: &DualOperator<T>) -> Result<T> {
    let flat = g.flat_matrix();
    let coord_sup = |space: &NormedSpace<T>, i: usize| -> Result<T> {
        let mut f = vec![T::zero(); space.dim()];
        f[i] = T::one() / space.pairing_weight(i);
        space.dual_norm_eval(&f)
    };
    let sx: Vec<T> = (0..g.x_space().dim())
        .map(|i| coord_sup(g.x_space(), i))
        .collect::<Result<_>>()?;
    let sy: Vec<T> = (0..g.y_space().dim())
        .map(|j| coord_sup(g.y_space(), j))
        .collect::<Result<_>>()?;
    let mut acc = T::zero();
    for i in 0..flat.nrows() {
        for j in 0..flat.ncols() {
            acc = acc + flat[(i, j)].abs() * sx[i] * sy[j];
        }
    }
    Ok(acc)
}

/// Certification state of the dual operator attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    /// `||G||` was computed exactly; the lower bound is certified.
    Exact,
    /// `||G||` was only upper-bounded; the lower bound is certified but
    /// usually slack.
    UpperBounded,
    /// No certified bound on `||G||`; the lower bound is indicative only.
    Heuristic,
}

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    HilbertSvd,
    L1Rows,
    PolyhedralLp,
    Colgen,
}

/// One row of the column-generation log.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct IterRecord<T> {
    pub iter: usize,
    pub master_value: T,
    pub priced_value: T,
    pub pool_size: usize,
}

/// Outcome of a projective-norm computation: `lower <= ||z||_pi <= upper`,
/// with the decomposition witnessing the upper bound and the dual operator
/// witnessing the lower one.
#[derive(Debug, Clone)]
pub struct ProjNormResult<T> {
    pub upper: T,
    pub lower: T,
    pub decomposition: Decomposition<T>,
    pub dual: DualOperator<T>,
    pub op_norm_status: CertStatus,
    pub method: Method,
    pub iterations: Vec<IterRecord<T>>,
}

impl<T: Real> ProjNormResult<T> {
    pub fn gap(&self) -> T {
        self.upper - self.lower
    }
}

impl<T: Real + Serialize> Serialize for ProjNormResult<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProjNormResult", 8)?;
        st.serialize_field("upper", &self.upper)?;
        st.serialize_field("lower", &self.lower)?;
        st.serialize_field("gap", &self.gap())?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("op_norm_status", &self.op_norm_status)?;
        st.serialize_field("decomposition", &self.decomposition)?;
        st.serialize_field("dual", &self.dual.matrix().to_rows())?;
        st.serialize_field("iters", &self.iterations.len())?;
        st.end()
    }
}

/// Projective norm when both factors carry inner-product norms: the sum of
/// singular values of the rescaled coefficient matrix, with the singular
/// vectors as atoms and the orthogonal polar factor as the norm-one dual.
pub fn proj_norm_oracle_hilbert<T: Real>(t: &Tensor<T>) -> Result<ProjNormResult<T>> {
    let sx = t
        .x_space()
        .hilbert_scaling()
        .ok_or(Error::WrongFamily("hilbert oracle needs p = 2 factors"))?;
    let sy = t
        .y_space()
        .hilbert_scaling()
        .ok_or(Error::WrongFamily("hilbert oracle needs p = 2 factors"))?;

    let a = Mat::from_fn(t.coeffs().nrows(), t.coeffs().ncols(), |i, j| {
        sx[i] * t.coeffs()[(i, j)] * sy[j]
    });
    let dec = svd(&a)?;
    let upper = dec.trace_norm();
    let cut = dec.sigma.first().copied().unwrap_or(T::zero()) * real::<T>(1e-13);

    let mut raw: Vec<RawAtom<T>> = Vec::new();
    let mut polar = Mat::zeros(a.nrows(), a.ncols());
    for (k, &s) in dec.sigma.iter().enumerate() {
        if s <= cut {
            break;
        }
        let x: Vec<T> = dec.u.col(k).iter().zip(&sx).map(|(u, s)| *u / *s).collect();
        let y: Vec<T> = dec.v.col(k).iter().zip(&sy).map(|(v, s)| *v / *s).collect();
        polar.add_outer(T::one(), &dec.u.col(k), &dec.v.col(k));
        raw.push(RawAtom { coeff: s, x, y });
    }
    let decomposition = normalize_atoms(raw, t.x_space(), t.y_space(), real(ATOM_DROP_TOL))?;

    let flat = Mat::from_fn(a.nrows(), a.ncols(), |i, j| sx[i] * polar[(i, j)] * sy[j]);
    let dual = DualOperator::from_flat(t.x_space().clone(), t.y_space().clone(), flat)?;
    let lower = pairing(&dual, t)?;

    Ok(ProjNormResult {
        upper,
        lower,
        decomposition,
        dual,
        op_norm_status: CertStatus::Exact,
        method: Method::HilbertSvd,
        iterations: vec![],
    })
}

/// Projective norm when the first factor is `l_1`-like: the coordinate rows
/// are already an optimal decomposition, so the value is the weighted sum of
/// the row norms in `Y`, and stacking the rows' norming functionals gives
/// the norm-one dual.
pub fn proj_norm_oracle_l1<T: Real>(t: &Tensor<T>) -> Result<ProjNormResult<T>> {
    if !t.x_space().is_l1_type() {
        return Err(Error::WrongFamily("row oracle needs an l_1-type first factor"));
    }
    let dx = t.x_space().dim();
    let dy = t.y_space().dim();

    let mut raw: Vec<RawAtom<T>> = Vec::new();
    let mut gmat = Mat::zeros(dx, dy);
    for i in 0..dx {
        let row = t.coeffs().row(i).to_vec();
        let rnorm = t.y_space().norm_eval(&row)?;
        // unit multiple of the i-th coordinate direction
        let mut ei = vec![T::zero(); dx];
        ei[i] = T::one();
        let ti = t.x_space().norm_eval(&ei)?;
        if rnorm > T::zero() {
            raw.push(RawAtom {
                coeff: T::one(),
                x: ei,
                y: row.clone(),
            });
            let f = t.y_space().norming_functional(&row)?;
            let scale = ti / t.x_space().pairing_weight(i);
            for j in 0..dy {
                gmat[(i, j)] = f.coords[j] * scale;
            }
        }
    }
    let decomposition = normalize_atoms(raw, t.x_space(), t.y_space(), real(ATOM_DROP_TOL))?;
    let upper = decomposition.value();
    let dual = DualOperator::new(t.x_space().clone(), t.y_space().clone(), gmat)?;
    let lower = pairing(&dual, t)?;

    Ok(ProjNormResult {
        upper,
        lower,
        decomposition,
        dual,
        op_norm_status: CertStatus::Exact,
        method: Method::L1Rows,
        iterations: vec![],
    })
}

/// Exact projective norm when both unit balls are polytopes: minimizes the
/// total weight over all vertex-pair atoms reproducing the tensor. The dual
/// multipliers of the equality constraints are the norm-one dual operator.
pub fn proj_norm_exact_polyhedral<T: Real>(
    t: &Tensor<T>,
    cfg: &SolverConfig,
) -> Result<ProjNormResult<T>> {
    let vx = t.x_space().vertices(cfg.vertex_cap)?;
    let wy = t.y_space().vertex_representatives(cfg.vertex_cap)?;
    let dx = t.x_space().dim();
    let dy = t.y_space().dim();
    let d = dx * dy;
    let k = vx.len() * wy.len();

    let mut a = Mat::zeros(d, k);
    for (ai, v) in vx.iter().enumerate() {
        for (bi, w) in wy.iter().enumerate() {
            let col = ai * wy.len() + bi;
            for i in 0..dx {
                for j in 0..dy {
                    a[(i * dy + j, col)] = v[i] * w[j];
                }
            }
        }
    }
    let b = t.coeffs().vec();
    let c = vec![T::one(); k];
    let sol = solve_lp(&a, &b, &c)?;

    let weight_cut = real::<T>(1e-11) * (T::one() + sol.objective.abs());
    let mut raw: Vec<RawAtom<T>> = Vec::new();
    for (col, &l) in sol.x.iter().enumerate() {
        if l > weight_cut {
            let v = &vx[col / wy.len()];
            let w = &wy[col % wy.len()];
            raw.push(RawAtom {
                coeff: l,
                x: v.clone(),
                y: w.clone(),
            });
        }
    }
    let decomposition = normalize_atoms(raw, t.x_space(), t.y_space(), real(ATOM_DROP_TOL))?;

    let flat = Mat::from_vec(dx, dy, sol.duals);
    let dual = DualOperator::from_flat(t.x_space().clone(), t.y_space().clone(), flat)?;
    let lower = pairing(&dual, t)?;

    Ok(ProjNormResult {
        upper: decomposition.value(),
        lower,
        decomposition,
        dual,
        op_norm_status: CertStatus::Exact,
        method: Method::PolyhedralLp,
        iterations: vec![],
    })
}

/// Column generation for arbitrary factor pairs.
///
/// The restricted master minimizes total atom weight subject to reproducing
/// the tensor; its dual multipliers price a new atom through the bilinear
/// maximization over the unit balls (exact where a vertex scan or singular
/// values apply, multistart otherwise). Terminates when the priced value
/// drops to `1 + tol` or a budget is hit, in which case the best-so-far
/// bounds are returned with their gap.
pub fn proj_norm_colgen<T: Real>(t: &Tensor<T>, cfg: &SolverConfig) -> Result<ProjNormResult<T>> {
    let x_space = t.x_space().clone();
    let y_space = t.y_space().clone();
    let dx = x_space.dim();
    let dy = y_space.dim();
    let d = dx * dy;
    let b = t.coeffs().vec();
    let tol = real::<T>(cfg.tol);

    if t.coeffs().max_abs() == T::zero() {
        return Ok(ProjNormResult {
            upper: T::zero(),
            lower: T::zero(),
            decomposition: Decomposition::empty(),
            dual: DualOperator::zeros(x_space, y_space),
            op_norm_status: CertStatus::Exact,
            method: Method::Colgen,
            iterations: vec![],
        });
    }

    // warm start: canonical expansion plus singular-vector atoms
    let mut raw: Vec<RawAtom<T>> = Vec::new();
    for i in 0..dx {
        for j in 0..dy {
            let zij = t.coeffs()[(i, j)];
            if zij != T::zero() {
                let mut x = vec![T::zero(); dx];
                x[i] = T::one();
                let mut y = vec![T::zero(); dy];
                y[j] = T::one();
                raw.push(RawAtom { coeff: zij, x, y });
            }
        }
    }
    if let Ok(dec) = svd(t.coeffs()) {
        let cut = dec.sigma.first().copied().unwrap_or(T::zero()) * real::<T>(1e-13);
        for (k, &s) in dec.sigma.iter().enumerate() {
            if s <= cut {
                break;
            }
            raw.push(RawAtom {
                coeff: s,
                x: dec.u.col(k),
                y: dec.v.col(k),
            });
        }
    }
    let seeded = normalize_atoms(raw, &x_space, &y_space, real(ATOM_DROP_TOL))?;
    let mut pool: Vec<(Vec<T>, Vec<T>)> = Vec::new();
    for atom in seeded.atoms {
        push_unique(&mut pool, atom.x, atom.y);
    }

    let mut iterations: Vec<IterRecord<T>> = Vec::new();
    let mut last: Option<(crate::linalg::LpSolution<T>, DualOperator<T>)> = None;
    for iter in 0..cfg.max_iters {
        let mut a = Mat::zeros(d, pool.len());
        for (col, (x, y)) in pool.iter().enumerate() {
            for i in 0..dx {
                for j in 0..dy {
                    a[(i * dy + j, col)] = x[i] * y[j];
                }
            }
        }
        let c = vec![T::one(); pool.len()];
        let sol = solve_lp(&a, &b, &c)?;
        let flat = Mat::from_vec(dx, dy, sol.duals.clone());
        let dual = DualOperator::from_flat(x_space.clone(), y_space.clone(), flat)?;

        let price = bilinear::primal_sup(&dual.flat_matrix(), &x_space, &y_space, cfg)?;
        iterations.push(IterRecord {
            iter,
            master_value: sol.objective,
            priced_value: price.value,
            pool_size: pool.len(),
        });
        let master = sol.objective;
        last = Some((sol, dual));
        if price.value <= T::one() + tol {
            break;
        }
        let nx = x_space.norm_eval(&price.x)?;
        let ny = y_space.norm_eval(&price.y)?;
        if nx <= real(1e-14) || ny <= real(1e-14) {
            break;
        }
        let mut px: Vec<T> = price.x.iter().map(|v| *v / nx).collect();
        let mut py: Vec<T> = price.y.iter().map(|v| *v / ny).collect();
        canonicalize_pair(&mut px, &mut py);
        if !push_unique(&mut pool, px, py) {
            // the priced atom is already in the pool: no progress possible
            break;
        }
        if pool.len() > cfg.max_atoms {
            break;
        }
        let _ = master;
    }

    let (sol, dual) = last.expect("at least one master solve");
    let mut raw_final: Vec<RawAtom<T>> = Vec::new();
    for (col, &l) in sol.x.iter().enumerate() {
        if l > T::zero() {
            raw_final.push(RawAtom {
                coeff: l,
                x: pool[col].0.clone(),
                y: pool[col].1.clone(),
            });
        }
    }
    let decomposition = normalize_atoms(raw_final, &x_space, &y_space, real(ATOM_DROP_TOL))?;
    let upper = decomposition.value();

    let pairing_val = pairing(&dual, t)?;
    let opn = operator_norm(&dual, cfg)?;
    let (lower, op_norm_status) = if opn.status == OpNormStatus::Exact {
        let denom = opn.value.max(T::min_positive_value());
        (pairing_val / denom, CertStatus::Exact)
    } else {
        let ub = operator_norm_upper(&dual)?.max(T::min_positive_value());
        (pairing_val / ub, CertStatus::UpperBounded)
    };

    Ok(ProjNormResult {
        upper,
        lower,
        decomposition,
        dual,
        op_norm_status,
        method: Method::Colgen,
        iterations,
    })
}

fn push_unique<T: Real>(pool: &mut Vec<(Vec<T>, Vec<T>)>, mut x: Vec<T>, mut y: Vec<T>) -> bool {
    canonicalize_pair(&mut x, &mut y);
    if pool
        .iter()
        .any(|(px, py)| same_atom(px, py, &x, &y))
    {
        return false;
    }
    pool.push((x, y));
    true
}

/// Dispatches to the strongest applicable solver: singular values for
/// inner-product pairs, row sums for an `l_1`-like factor (either side),
/// the vertex-pair program for polyhedral pairs, column generation
/// otherwise.
pub fn proj_norm<T: Real>(t: &Tensor<T>, cfg: &SolverConfig) -> Result<ProjNormResult<T>> {
    if t.x_space().hilbert_scaling().is_some() && t.y_space().hilbert_scaling().is_some() {
        return proj_norm_oracle_hilbert(t);
    }
    if t.x_space().is_l1_type() {
        return proj_norm_oracle_l1(t);
    }
    if t.y_space().is_l1_type() {
        let swapped = proj_norm_oracle_l1(&t.swap_factors())?;
        return Ok(unswap(swapped));
    }
    if t.x_space().has_vertices(cfg.vertex_cap) && t.y_space().has_vertices(cfg.vertex_cap) {
        return proj_norm_exact_polyhedral(t, cfg);
    }
    proj_norm_colgen(t, cfg)
}

fn unswap<T: Real>(r: ProjNormResult<T>) -> ProjNormResult<T> {
    let decomposition = Decomposition {
        atoms: r
            .decomposition
            .atoms
            .into_iter()
            .map(|a| crate::tensor::Atom {
                lambda: a.lambda,
                x: a.y,
                y: a.x,
            })
            .collect(),
    };
    ProjNormResult {
        upper: r.upper,
        lower: r.lower,
        decomposition,
        dual: r.dual.swap_factors(),
        op_norm_status: r.op_norm_status,
        method: r.method,
        iterations: r.iterations,
    }
}

/// Nuclear norm of the operator `T : X -> Y` given as the coefficient
/// matrix `A` of `T = sum_ij A_ij e_i^* (x) f_j` (so `(Tx)_j = sum_i x_i
/// A_ij` for plain-coordinate factors). In finite dimensions the
/// representation map is a bijection, so this is the projective norm of the
/// corresponding tensor in `X^* (x) Y`, solved by the dispatcher.
pub fn nuclear_norm<T: Real>(
    a: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<ProjNormResult<T>> {
    let xdual = x_space.dual_space().ok_or(Error::DualNotRepresentable)?;
    // rescale rows so the coefficient matrix is expressed against the dual
    // descriptor's own pairing
    let z = Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        a[(i, j)] / xdual.pairing_weight(i)
    });
    let t = Tensor::new(xdual, y_space.clone(), z)?;
    proj_norm(&t, cfg)
}

/// Convenience wrapper: certified residual of a result against its tensor.
pub fn assemble_residual<T: Real>(r: &ProjNormResult<T>, t: &Tensor<T>) -> Result<T> {
    let built = assemble(&r.decomposition, t.x_space(), t.y_space())?;
    Ok(built.coeffs().sub(t.coeffs()).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn random_tensor(
        x: &NormedSpace<f64>,
        y: &NormedSpace<f64>,
        seed: u64,
    ) -> Tensor<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Mat::from_fn(x.dim(), y.dim(), |_, _| rng.gen_range(-1.0..=1.0));
        Tensor::new(x.clone(), y.clone(), m).unwrap()
    }

    #[test]
    fn operator_norm_isometry() {
        let l2 = NormedSpace::<f64>::l2(2);
        let g = DualOperator::new(l2.clone(), l2, Mat::identity(2)).unwrap();
        let r = operator_norm(&g, &cfg()).unwrap();
        assert_eq!(r.status, OpNormStatus::Exact);
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!((g.x_space().norm_eval(&r.attainer).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn operator_norm_sup_to_sup() {
        // the map with matrix [[1,2],[3,4]] from the cube into the cube
        // (second factor l_1): peak row sum through the vertex (1, 1)
        let linf = NormedSpace::<f64>::linf(2);
        let l1 = NormedSpace::<f64>::l1(2);
        let stored = Mat::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]);
        let g = DualOperator::new(linf, l1, stored).unwrap();
        let r = operator_norm(&g, &cfg()).unwrap();
        assert_eq!(r.status, OpNormStatus::Exact);
        assert!((r.value - 7.0).abs() < 1e-10);
    }

    #[test]
    fn operator_norm_from_cross_polytope() {
        // same map from l_1: best coordinate direction gives the largest
        // column sup-norm, 4
        let l1 = NormedSpace::<f64>::l1(2);
        let stored = Mat::from_rows(&[vec![1.0, 3.0], vec![2.0, 4.0]]);
        let g = DualOperator::new(l1.clone(), l1, stored).unwrap();
        let r = operator_norm(&g, &cfg()).unwrap();
        assert_eq!(r.status, OpNormStatus::Exact);
        assert!((r.value - 4.0).abs() < 1e-10);
    }

    #[test]
    fn hilbert_oracle_examples() {
        let l2 = NormedSpace::<f64>::l2(2);
        let t = Tensor::from_rows(l2.clone(), l2.clone(), &[vec![3.0, 0.0], vec![0.0, 4.0]])
            .unwrap();
        let r = proj_norm_oracle_hilbert(&t).unwrap();
        assert!((r.upper - 7.0).abs() < 1e-10);
        assert!(r.gap().abs() < 1e-9);
        assert_eq!(r.decomposition.len(), 2);

        let t = Tensor::new(l2.clone(), l2.clone(), Mat::identity(2)).unwrap();
        let r = proj_norm_oracle_hilbert(&t).unwrap();
        assert!((r.upper - 2.0).abs() < 1e-10);

        let t = Tensor::from_rows(l2.clone(), l2, &[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let r = proj_norm_oracle_hilbert(&t).unwrap();
        assert!((r.upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hilbert_oracle_rejects_wrong_family() {
        let l1 = NormedSpace::<f64>::l1(2);
        let t = Tensor::new(l1.clone(), l1, Mat::identity(2)).unwrap();
        assert!(matches!(
            proj_norm_oracle_hilbert(&t),
            Err(Error::WrongFamily(_))
        ));
    }

    #[test]
    fn l1_oracle_examples() {
        let l1 = NormedSpace::<f64>::l1(2);
        let l2 = NormedSpace::<f64>::l2(2);
        let t = Tensor::from_rows(l1.clone(), l2, &[vec![3.0, 4.0], vec![0.0, 5.0]]).unwrap();
        let r = proj_norm_oracle_l1(&t).unwrap();
        assert!((r.upper - 10.0).abs() < 1e-12);
        assert!(r.gap().abs() < 1e-12);

        let t = Tensor::new(l1.clone(), l1.clone(), Mat::identity(2)).unwrap();
        let r = proj_norm_oracle_l1(&t).unwrap();
        assert!((r.upper - 2.0).abs() < 1e-12);

        // single nonzero row: the rank-one law
        let linf = NormedSpace::<f64>::linf(3);
        let l1_4 = NormedSpace::<f64>::l1(4);
        let mut rows = vec![vec![0.0; 3]; 4];
        rows[2] = vec![1.0, -2.0, 0.5];
        let t = Tensor::from_rows(l1_4, linf.clone(), &rows).unwrap();
        let r = proj_norm_oracle_l1(&t).unwrap();
        assert!((r.upper - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polyhedral_lp_identity_in_sup_norms() {
        let linf = NormedSpace::<f64>::linf(2);
        let t = Tensor::new(linf.clone(), linf, Mat::identity(2)).unwrap();
        let r = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
        assert!((r.upper - 1.0).abs() < 1e-9);
        assert!(r.gap().abs() < 1e-8);
        assert_eq!(r.decomposition.len(), 2);
        for atom in &r.decomposition.atoms {
            assert!((atom.lambda - 0.5).abs() < 1e-9);
        }
        assert!(assemble_residual(&r, &t).unwrap() < 1e-9);
    }

    #[test]
    fn polyhedral_lp_matches_l1_oracle() {
        let l1 = NormedSpace::<f64>::l1(2);
        let t = Tensor::new(l1.clone(), l1, Mat::identity(2)).unwrap();
        let r = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
        assert!((r.upper - 2.0).abs() < 1e-9);
    }

    #[test]
    fn polyhedral_lp_rank_one_vertex_pair() {
        let px = NormedSpace::<f64>::polyhedral(vec![vec![1.0, 0.5], vec![-0.25, 1.0]]).unwrap();
        let py = NormedSpace::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = Tensor::rank_one(px.clone(), py.clone(), &[1.0, 0.5], &[0.0, 1.0]).unwrap();
        let r = proj_norm_exact_polyhedral(&t, &cfg()).unwrap();
        assert!((r.upper - 1.0).abs() < 1e-9, "upper = {}", r.upper);
    }

    #[test]
    fn colgen_agrees_with_hilbert_oracle() {
        let x = NormedSpace::<f64>::l2(4);
        let y = NormedSpace::<f64>::l2(3);
        for seed in 0..3 {
            let t = random_tensor(&x, &y, 100 + seed);
            let oracle = proj_norm_oracle_hilbert(&t).unwrap();
            let cg = proj_norm_colgen(&t, &cfg()).unwrap();
            let rel = (cg.upper - oracle.upper).abs() / oracle.upper;
            assert!(rel < 1e-5, "seed {seed}: {} vs {}", cg.upper, oracle.upper);
            assert_eq!(cg.op_norm_status, CertStatus::Exact);
            assert!(cg.gap() < 1e-5 * oracle.upper);
        }
    }

    #[test]
    fn colgen_agrees_with_l1_oracle() {
        let x = NormedSpace::<f64>::l1(4);
        let y = NormedSpace::<f64>::linf(3);
        for seed in 0..3 {
            let t = random_tensor(&x, &y, 200 + seed);
            let oracle = proj_norm_oracle_l1(&t).unwrap();
            let cg = proj_norm_colgen(&t, &cfg()).unwrap();
            assert!(
                (cg.upper - oracle.upper).abs() <= 1e-6 * oracle.upper,
                "seed {seed}: {} vs {}",
                cg.upper,
                oracle.upper
            );
        }
    }

    #[test]
    fn colgen_rank_one_law() {
        let x_space = NormedSpace::<f64>::lp(crate::banach::Exponent::finite(3.0).unwrap(), 3)
            .unwrap();
        let y_space = NormedSpace::<f64>::lp(crate::banach::Exponent::finite(1.5).unwrap(), 2)
            .unwrap();
        let x = vec![1.0, -2.0, 0.5];
        let y = vec![0.7, 1.3];
        let t = Tensor::rank_one(x_space.clone(), y_space.clone(), &x, &y).unwrap();
        let want = x_space.norm_eval(&x).unwrap() * y_space.norm_eval(&y).unwrap();
        let r = proj_norm_colgen(&t, &cfg()).unwrap();
        assert!((r.upper - want).abs() < 1e-8, "{} vs {want}", r.upper);
    }

    #[test]
    fn weak_duality_on_all_solvers() {
        let pairs: Vec<(NormedSpace<f64>, NormedSpace<f64>)> = vec![
            (NormedSpace::l2(3), NormedSpace::l2(3)),
            (NormedSpace::l1(3), NormedSpace::linf(3)),
            (NormedSpace::linf(2), NormedSpace::linf(3)),
            (
                NormedSpace::lp(crate::banach::Exponent::finite(3.0).unwrap(), 3).unwrap(),
                NormedSpace::l2(3),
            ),
        ];
        for (i, (x, y)) in pairs.iter().enumerate() {
            let t = random_tensor(x, y, 300 + i as u64);
            let r = proj_norm(&t, &cfg()).unwrap();
            assert!(
                r.lower <= r.upper + 1e-9,
                "pair {i}: lower {} > upper {}",
                r.lower,
                r.upper
            );
            let opn = operator_norm(&r.dual, &cfg()).unwrap();
            let pv = pairing(&r.dual, &t).unwrap();
            assert!(pv <= opn.value * r.upper + 1e-9);
        }
    }

    #[test]
    fn monotone_under_vertex_enlargement() {
        // enlarging the unit ball can only shrink the norm
        let base = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let mut bigger = base.clone();
        bigger.push(vec![0.9, 0.9]);
        let small = NormedSpace::polyhedral(base).unwrap();
        let large = NormedSpace::polyhedral(bigger).unwrap();
        let y = NormedSpace::<f64>::l1(2);
        for seed in 0..4 {
            let m = random_tensor(&y, &y, 400 + seed);
            let ts = Tensor::new(small.clone(), y.clone(), m.coeffs().clone()).unwrap();
            let tl = Tensor::new(large.clone(), y.clone(), m.coeffs().clone()).unwrap();
            let rs = proj_norm_exact_polyhedral(&ts, &cfg()).unwrap();
            let rl = proj_norm_exact_polyhedral(&tl, &cfg()).unwrap();
            assert!(rl.upper <= rs.upper + 1e-9);
        }
    }

    #[test]
    fn nuclear_norm_examples() {
        let l2 = NormedSpace::<f64>::l2(2);
        let r = nuclear_norm(&Mat::identity(2), &l2, &l2, &cfg()).unwrap();
        assert!((r.upper - 2.0).abs() < 1e-10);

        let linf = NormedSpace::<f64>::linf(2);
        let a = Mat::from_rows(&[vec![3.0, 4.0], vec![0.0, 5.0]]);
        let r = nuclear_norm(&a, &linf, &l2, &cfg()).unwrap();
        assert_eq!(r.method, Method::L1Rows);
        assert!((r.upper - 10.0).abs() < 1e-10);

        // rank one: || x* (x) y ||_N = ||x*||_{X*} ||y||_Y
        let l13 = NormedSpace::<f64>::l1(3);
        let xstar = [1.0, -0.5, 2.0];
        let yvec = [0.3, 1.1];
        let mut a = Mat::zeros(3, 2);
        a.add_outer(1.0, &xstar, &yvec);
        let r = nuclear_norm(&a, &l13, &l2, &cfg()).unwrap();
        let want =
            l13.dual_norm_eval(&xstar).unwrap() * l2.norm_eval(&yvec).unwrap();
        assert!((r.upper - want).abs() < 1e-9, "{} vs {want}", r.upper);
    }

    #[test]
    fn epsilon_below_pi_on_random_instances() {
        let pairs: Vec<(NormedSpace<f64>, NormedSpace<f64>)> = vec![
            (NormedSpace::l2(3), NormedSpace::l2(3)),
            (NormedSpace::l1(3), NormedSpace::l2(3)),
            (NormedSpace::linf(3), NormedSpace::l1(3)),
        ];
        for (i, (x, y)) in pairs.iter().enumerate() {
            let t = random_tensor(x, y, 500 + i as u64);
            let inj = crate::tensor::injective_norm(&t, &cfg()).unwrap();
            let pi = proj_norm(&t, &cfg()).unwrap();
            assert!(inj.value <= pi.upper + 1e-8);
        }
    }
}
