//! Norm-one projections onto 1-complemented subspaces and the
//! truncate-project-solve approximation pipeline for series tensors.
//!
//! The constructions: coordinate truncations of sequence models (partial-sum
//! projections), conditional expectations of discretized `L_p(mu)` over a
//! coarser partition, block-diagonal sums under a monotone absolute norm,
//! and coefficient-space sandwiches `Z -> P Z Q^T` for both the projective
//! and injective tensor norms. Each carries a status recording whether norm
//! one is guaranteed by the construction or merely sampled.

use serde::{Deserialize, Serialize};

use crate::attain::{certify_attainment, Certificate};
use crate::banach::{Exponent, NormFamily, NormedSpace};
use crate::config::{SolverConfig, ATOM_DROP_TOL};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::projnorm::{proj_norm, CertStatus, ProjNormResult};
use crate::scalar::{real, Real};
use crate::tensor::{assemble, normalize_atoms, Atom, Decomposition, DualOperator, Tensor};

/// Whether `||P|| = 1` is guaranteed by the construction or only observed
/// on samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormStatus {
    ProvedOne,
    Sampled,
}

/// How the projection was built; the structured kinds know how to restrict
/// the ambient space onto their range.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionKind {
    /// Onto the first `k` coordinates.
    Truncation { k: usize },
    /// Averaging over partition blocks with the cell measures.
    ConditionalExpectation { blocks: Vec<Vec<usize>> },
    /// Block diagonal on an absolute sum; `split` is the first factor's dim.
    DirectSum { split: usize },
    /// `Z -> P Z Q^T` on a coefficient space.
    TensorProduct { dx: usize, dy: usize },
}

/// An idempotent matrix with its range basis and norm status.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T> {
    pub matrix: Mat<T>,
    pub range_basis: Vec<Vec<T>>,
    pub norm_status: NormStatus,
    pub kind: ProjectionKind,
}

impl<T: Real> Projection<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn range_dim(&self) -> usize {
        self.range_basis.len()
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.matrix.matvec(v)
    }

    /// Max-abs of `P^2 - P`.
    pub fn idempotence_defect(&self) -> T {
        self.matrix.matmul(&self.matrix).sub(&self.matrix).max_abs()
    }
}

/// Coordinate projection onto the first `k` coordinates. Norm one is
/// guaranteed for the monotone coordinate families; for polyhedral spaces
/// the status is only sampled.
pub fn truncation_projection<T: Real>(space: &NormedSpace<T>, k: usize) -> Result<Projection<T>> {
    if k == 0 || k > space.dim() {
        return Err(Error::BadRange("k must satisfy 1 <= k <= dim"));
    }
    let n = space.dim();
    let matrix = Mat::from_fn(n, n, |i, j| {
        if i == j && i < k {
            T::one()
        } else {
            T::zero()
        }
    });
    let range_basis = (0..k)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            e
        })
        .collect();
    let norm_status = match space.family() {
        NormFamily::Polyhedral { .. } => NormStatus::Sampled,
        _ => NormStatus::ProvedOne,
    };
    Ok(Projection {
        matrix,
        range_basis,
        norm_status,
        kind: ProjectionKind::Truncation { k },
    })
}

/// Conditional expectation of a discretized `L_p(mu)` model over a coarser
/// partition: each block is replaced by its measure-weighted average. Norm
/// one for every `p` in `[1, infinity]`.
pub fn conditional_expectation_projection<T: Real>(
    space: &NormedSpace<T>,
    coarse_partition: &[Vec<usize>],
) -> Result<Projection<T>> {
    let NormFamily::DiscreteLp { cell_measures, .. } = space.family() else {
        return Err(Error::WrongFamily(
            "conditional expectation needs a discrete L_p space",
        ));
    };
    let n = space.dim();
    let mut seen = vec![false; n];
    for (bi, block) in coarse_partition.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::EmptyBlock(bi));
        }
        let mut mass = T::zero();
        for &c in block {
            if c >= n {
                return Err(Error::InvalidPartition("cell index out of range"));
            }
            if seen[c] {
                return Err(Error::InvalidPartition("cell covered twice"));
            }
            seen[c] = true;
            mass = mass + cell_measures[c];
        }
        if !(mass > T::zero()) {
            return Err(Error::ZeroMeasureBlock(bi));
        }
    }
    if seen.iter().any(|s| !*s) {
        return Err(Error::InvalidPartition("not all cells covered"));
    }

    let mut matrix = Mat::zeros(n, n);
    let mut range_basis = Vec::with_capacity(coarse_partition.len());
    for block in coarse_partition {
        let mass = block
            .iter()
            .fold(T::zero(), |acc, &c| acc + cell_measures[c]);
        for &c in block {
            for &c2 in block {
                matrix[(c, c2)] = cell_measures[c2] / mass;
            }
        }
        let mut indicator = vec![T::zero(); n];
        for &c in block {
            indicator[c] = T::one();
        }
        range_basis.push(indicator);
    }

    Ok(Projection {
        matrix,
        range_basis,
        norm_status: NormStatus::ProvedOne,
        kind: ProjectionKind::ConditionalExpectation {
            blocks: coarse_partition.to_vec(),
        },
    })
}

/// An absolute norm on pairs `(s, t)`, used to form `X (+)_a Y`.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsoluteNorm<T> {
    /// `l_p` sum of the two factor norms.
    PSum(Exponent<T>),
    /// Gauge of a symmetric planar polytope; must be monotone on the
    /// positive quadrant, which is checked on samples.
    Polyhedral2D(NormedSpace<T>),
}

impl<T: Real> AbsoluteNorm<T> {
    pub fn eval(&self, s: T, t: T) -> Result<T> {
        match self {
            AbsoluteNorm::PSum(p) => {
                let space = NormedSpace::lp(*p, 2)?;
                space.norm_eval(&[s.abs(), t.abs()])
            }
            AbsoluteNorm::Polyhedral2D(space) => {
                if space.dim() != 2 {
                    return Err(Error::InvalidSpace("absolute norm must be planar"));
                }
                space.norm_eval(&[s.abs(), t.abs()])
            }
        }
    }

    /// `|(s, t)| <= |(s', t')|` whenever `0 <= s <= s'` and `0 <= t <= t'`,
    /// checked on a deterministic grid.
    pub fn is_monotone_sampled(&self) -> Result<bool> {
        if matches!(self, AbsoluteNorm::PSum(_)) {
            return Ok(true);
        }
        let steps = 9usize;
        let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64 * 2.0).collect();
        for &s in &grid {
            for &t in &grid {
                for &ds in &grid {
                    for &dt in &grid {
                        let a = self.eval(real(s), real(t))?;
                        let b = self.eval(real(s + ds), real(t + dt))?;
                        if a > b + real(1e-12) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Block-diagonal projection `(x, y) -> (Px, Qy)` on `X (+)_a Y`. Norm one
/// when both blocks are norm one and the absolute norm is monotone.
pub fn direct_sum_projection<T: Real>(
    p: &Projection<T>,
    q: &Projection<T>,
    a: &AbsoluteNorm<T>,
) -> Result<Projection<T>> {
    if !a.is_monotone_sampled()? {
        return Err(Error::NonMonotoneNorm);
    }
    let (dp, dq) = (p.dim(), q.dim());
    let n = dp + dq;
    let matrix = Mat::from_fn(n, n, |i, j| {
        if i < dp && j < dp {
            p.matrix[(i, j)]
        } else if i >= dp && j >= dp {
            q.matrix[(i - dp, j - dp)]
        } else {
            T::zero()
        }
    });
    let mut range_basis = Vec::with_capacity(p.range_dim() + q.range_dim());
    for b in &p.range_basis {
        let mut v = vec![T::zero(); n];
        v[..dp].copy_from_slice(b);
        range_basis.push(v);
    }
    for b in &q.range_basis {
        let mut v = vec![T::zero(); n];
        v[dp..].copy_from_slice(b);
        range_basis.push(v);
    }
    let norm_status = if p.norm_status == NormStatus::ProvedOne
        && q.norm_status == NormStatus::ProvedOne
    {
        NormStatus::ProvedOne
    } else {
        NormStatus::Sampled
    };
    Ok(Projection {
        matrix,
        range_basis,
        norm_status,
        kind: ProjectionKind::DirectSum { split: dp },
    })
}

/// Which tensor norm a coefficient-space projection is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorNormTag {
    Pi,
    Epsilon,
}

/// `Z -> P Z Q^T` on the coefficient space, norm one for both the
/// projective and the injective norm when the blocks are norm one.
pub fn tensor_projection<T: Real>(
    p: &Projection<T>,
    q: &Projection<T>,
    _norm_tag: TensorNormTag,
) -> Result<Projection<T>> {
    let matrix = p.matrix.kron(&q.matrix);
    let mut range_basis = Vec::with_capacity(p.range_dim() * q.range_dim());
    for bx in &p.range_basis {
        for by in &q.range_basis {
            let mut m = Mat::zeros(p.dim(), q.dim());
            m.add_outer(T::one(), bx, by);
            range_basis.push(m.vec());
        }
    }
    let norm_status = if p.norm_status == NormStatus::ProvedOne
        && q.norm_status == NormStatus::ProvedOne
    {
        NormStatus::ProvedOne
    } else {
        NormStatus::Sampled
    };
    Ok(Projection {
        matrix,
        range_basis,
        norm_status,
        kind: ProjectionKind::TensorProduct {
            dx: p.dim(),
            dy: q.dim(),
        },
    })
}

/// Restriction of a space onto the range of a structured projection,
/// together with the coordinate map `R` (range coords of `Pv`) and the
/// isometric embedding `E` (range coords back into the ambient space).
pub struct RangeModel<T> {
    pub space: NormedSpace<T>,
    pub restrict: Mat<T>,
    pub embed: Mat<T>,
}

/// Builds the range model for truncation and conditional-expectation
/// projections; other kinds have no canonical coordinate restriction.
pub fn restricted_space<T: Real>(
    space: &NormedSpace<T>,
    projection: &Projection<T>,
) -> Result<RangeModel<T>> {
    match &projection.kind {
        ProjectionKind::Truncation { k } => {
            let k = *k;
            let n = space.dim();
            let sub = match space.family() {
                NormFamily::Lp { p } => NormedSpace::lp(*p, k)?,
                NormFamily::WeightedLp { p, weights } => {
                    NormedSpace::weighted_lp(*p, weights[..k].to_vec())?
                }
                NormFamily::DiscreteLp { p, cell_measures } => {
                    NormedSpace::discrete_lp(*p, cell_measures[..k].to_vec())?
                }
                NormFamily::Polyhedral { .. } => {
                    return Err(Error::WrongFamily(
                        "no canonical restriction for polyhedral spaces",
                    ))
                }
            };
            let restrict = Mat::from_fn(k, n, |i, j| {
                if i == j {
                    T::one()
                } else {
                    T::zero()
                }
            });
            let embed = restrict.transpose();
            Ok(RangeModel {
                space: sub,
                restrict,
                embed,
            })
        }
        ProjectionKind::ConditionalExpectation { blocks } => {
            let NormFamily::DiscreteLp { p, cell_measures } = space.family() else {
                return Err(Error::WrongFamily(
                    "conditional expectation restriction needs discrete L_p",
                ));
            };
            let n = space.dim();
            let masses: Vec<T> = blocks
                .iter()
                .map(|b| b.iter().fold(T::zero(), |acc, &c| acc + cell_measures[c]))
                .collect();
            let sub = NormedSpace::discrete_lp(*p, masses.clone())?;
            let mut restrict = Mat::zeros(blocks.len(), n);
            let mut embed = Mat::zeros(n, blocks.len());
            for (bi, block) in blocks.iter().enumerate() {
                for &c in block {
                    restrict[(bi, c)] = cell_measures[c] / masses[bi];
                    embed[(c, bi)] = T::one();
                }
            }
            Ok(RangeModel {
                space: sub,
                restrict,
                embed,
            })
        }
        _ => Err(Error::WrongFamily(
            "restriction defined for truncation and conditional expectation",
        )),
    }
}

/// Report of [`norm_agreement_check`].
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct AgreementReport<T> {
    pub ambient: T,
    pub restricted: T,
    pub difference: T,
}

/// Computes the projective norm of an in-range tensor both in the ambient
/// pair and in the restricted pair and reports the difference. A test
/// harness for the fact that the norm respects 1-complemented subspaces,
/// not a proof.
pub fn norm_agreement_check<T: Real>(
    p: &Projection<T>,
    q: &Projection<T>,
    z: &Tensor<T>,
    cfg: &SolverConfig,
) -> Result<AgreementReport<T>> {
    let sandwich = p
        .matrix
        .matmul(z.coeffs())
        .matmul(&q.matrix.transpose());
    if sandwich.sub(z.coeffs()).max_abs() > real::<T>(1e-9) {
        return Err(Error::PreconditionViolated(
            "tensor must satisfy P Z Q^T = Z",
        ));
    }
    let ambient = proj_norm(z, cfg)?.upper;
    let rx = restricted_space(z.x_space(), p)?;
    let ry = restricted_space(z.y_space(), q)?;
    let z0 = rx.restrict.matmul(z.coeffs()).matmul(&ry.restrict.transpose());
    let t0 = Tensor::new(rx.space, ry.space, z0)?;
    let restricted = proj_norm(&t0, cfg)?.upper;
    Ok(AgreementReport {
        ambient,
        restricted,
        difference: (ambient - restricted).abs(),
    })
}

/// A finite series `sum lambda_n x_n (x) y_n` over truncation-model
/// coordinates, with a certified bound on the projective mass of the
/// discarded infinite tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
#[serde(deny_unknown_fields)]
pub struct SeriesTensor<T> {
    pub atoms: Vec<Atom<T>>,
    pub tail_bound: T,
}

impl<T: Real> SeriesTensor<T> {
    pub fn value(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.lambda)
    }
}

/// Output of the approximation pipeline.
#[derive(Debug, Clone)]
pub struct PipelineResult<T> {
    /// Number of leading series terms kept.
    pub k: usize,
    /// The attaining approximant, in ambient coordinates.
    pub z_prime: Tensor<T>,
    pub decomposition: Decomposition<T>,
    pub certificate: Certificate<T>,
    /// Restricted-pair solve backing the certificate.
    pub solve: ProjNormResult<T>,
    pub x_range_dim: usize,
    pub y_range_dim: usize,
    /// `= eps`: the guaranteed distance from the series to `z_prime`.
    pub distance_bound: T,
    pub warnings: Vec<String>,
}

impl<T: Real + Serialize> Serialize for PipelineResult<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PipelineResult", 9)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("x_range_dim", &self.x_range_dim)?;
        st.serialize_field("y_range_dim", &self.y_range_dim)?;
        st.serialize_field("z_prime", &self.z_prime)?;
        st.serialize_field("decomposition", &self.decomposition)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.serialize_field("solve", &self.solve)?;
        st.serialize_field("distance_bound", &self.distance_bound)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Truncate-project-solve: keep enough leading terms that the dropped mass
/// plus the tail stays under `eps/2`, project the surviving atom factors
/// onto 1-complemented ranges covering them (with per-atom error at most
/// `eps / (4 k lambda_n)`), solve the projective norm exactly in the
/// restricted pair, and return the attaining approximant with its
/// certificate and the distance bound `eps`.
pub fn approx_pipeline<T: Real>(
    u: &SeriesTensor<T>,
    eps: T,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<PipelineResult<T>> {
    let two = real::<T>(2.0);
    let half_eps = eps / two;
    if !(u.tail_bound >= T::zero()) {
        return Err(Error::PreconditionViolated("tail bound must be nonnegative"));
    }
    if u.tail_bound >= half_eps {
        return Err(Error::TailTooHeavy {
            tail: u.tail_bound.to_f64().unwrap_or(f64::NAN),
            half_eps: half_eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    for a in &u.atoms {
        if a.x.len() != x_space.dim() || a.y.len() != y_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: x_space.dim(),
                got: a.x.len(),
            });
        }
    }

    // (i) smallest prefix whose dropped mass plus the tail stays under
    // eps/2; at least one atom is always kept (the zero tensor is
    // admissible but never returned)
    let n_atoms = u.atoms.len();
    let mut k = n_atoms;
    if n_atoms > 0 {
        let mut suffix = vec![T::zero(); n_atoms + 1];
        for i in (0..n_atoms).rev() {
            suffix[i] = suffix[i + 1] + u.atoms[i].lambda;
        }
        k = (1..=n_atoms)
            .find(|&kk| suffix[kk] + u.tail_bound < half_eps)
            .unwrap_or(n_atoms);
    }
    let kept = &u.atoms[..k];

    // per-atom budgets eps / (4 k lambda_n)
    let budget: Vec<T> = kept
        .iter()
        .map(|a| eps / (real::<T>(4.0) * real::<T>(k as f64) * a.lambda))
        .collect();

    // (ii) covering projections
    let xs: Vec<&[T]> = kept.iter().map(|a| a.x.as_slice()).collect();
    let ys: Vec<&[T]> = kept.iter().map(|a| a.y.as_slice()).collect();
    let p = covering_projection(x_space, &xs, &budget)?;
    let q = covering_projection(y_space, &ys, &budget)?;

    // (iii) project atoms, folding any norm drift into the weights
    let mut raw = Vec::with_capacity(k);
    for (n, a) in kept.iter().enumerate() {
        let px = p.apply(&a.x);
        let py = q.apply(&a.y);
        let ex = diff_norm(x_space, &px, &a.x)?;
        let ey = diff_norm(y_space, &py, &a.y)?;
        if ex > budget[n] + real::<T>(1e-12) || ey > budget[n] + real::<T>(1e-12) {
            return Err(Error::PreconditionViolated(
                "projection error exceeded the per-atom budget",
            ));
        }
        raw.push((a.lambda, px, py));
    }
    let projected = normalize_atoms(raw, x_space, y_space, real(ATOM_DROP_TOL))?;
    let z_prime = assemble(&projected, x_space, y_space)?;

    // (iv) exact solve in the restricted pair
    let rx = restricted_space(x_space, &p)?;
    let ry = restricted_space(y_space, &q)?;
    let z0 = rx
        .restrict
        .matmul(z_prime.coeffs())
        .matmul(&ry.restrict.transpose());
    let t0 = Tensor::new(rx.space.clone(), ry.space.clone(), z0)?;
    let solve = proj_norm(&t0, cfg)?;
    let mut warnings = Vec::new();
    if solve.op_norm_status != CertStatus::Exact {
        warnings.push(format!(
            "restricted solve has non-exact dual status {:?}",
            solve.op_norm_status
        ));
    }

    // embed the attaining decomposition and its dual back into the ambient
    // pair
    let atoms = solve
        .decomposition
        .atoms
        .iter()
        .map(|a| Atom {
            lambda: a.lambda,
            x: rx.embed.matvec(&a.x),
            y: ry.embed.matvec(&a.y),
        })
        .collect();
    let decomposition = Decomposition { atoms };
    let flat0 = solve.dual.flat_matrix();
    let flat_ambient = rx
        .restrict
        .transpose()
        .matmul(&flat0)
        .matmul(&ry.restrict);
    let dual_ambient =
        DualOperator::from_flat(x_space.clone(), y_space.clone(), flat_ambient)?;

    let certificate = certify_attainment(
        &z_prime,
        &decomposition,
        &dual_ambient,
        real(cfg.tol),
        cfg,
    )?;

    Ok(PipelineResult {
        k,
        z_prime,
        decomposition,
        certificate,
        solve,
        x_range_dim: p.range_dim(),
        y_range_dim: q.range_dim(),
        distance_bound: eps,
        warnings,
    })
}

/// A proved-norm-one projection whose range approximates every sample
/// within the stated per-sample budgets: the minimal coordinate truncation
/// for sequence models, the value-profile partition for discrete `L_p`.
fn covering_projection<T: Real>(
    space: &NormedSpace<T>,
    samples: &[&[T]],
    budgets: &[T],
) -> Result<Projection<T>> {
    match space.family() {
        NormFamily::Lp { .. } | NormFamily::WeightedLp { .. } => {
            let n = space.dim();
            let mut k = 1;
            'outer: for kk in 1..=n {
                k = kk;
                for (s, b) in samples.iter().zip(budgets) {
                    let mut tail = s.to_vec();
                    for t in tail.iter_mut().take(kk) {
                        *t = T::zero();
                    }
                    if space.norm_eval(&tail)? > *b {
                        continue 'outer;
                    }
                }
                break;
            }
            truncation_projection(space, k)
        }
        NormFamily::DiscreteLp { .. } => {
            // group cells by their exact value profile across the samples:
            // the conditional expectation then reproduces every sample
            let n = space.dim();
            let mut blocks: Vec<(Vec<T>, Vec<usize>)> = Vec::new();
            for c in 0..n {
                let profile: Vec<T> = samples.iter().map(|s| s[c]).collect();
                match blocks.iter_mut().find(|(p, _)| {
                    p.iter()
                        .zip(&profile)
                        .all(|(a, b)| (*a - *b).abs() <= real(1e-12))
                }) {
                    Some((_, cells)) => cells.push(c),
                    None => blocks.push((profile, vec![c])),
                }
            }
            let partition: Vec<Vec<usize>> = blocks.into_iter().map(|(_, c)| c).collect();
            conditional_expectation_projection(space, &partition)
        }
        NormFamily::Polyhedral { .. } => Err(Error::WrongFamily(
            "pipeline projections need a sequence or discrete model",
        )),
    }
}

/// Witness for the metric approximation property of the supported families:
/// a proved-norm-one projection whose range contains `eps`-approximants of
/// every sample.
pub fn metric_pi_witness<T: Real>(
    space: &NormedSpace<T>,
    samples: &[Vec<T>],
    eps: T,
) -> Result<Projection<T>> {
    if !(eps > T::zero()) {
        return Err(Error::PreconditionViolated("eps must be positive"));
    }
    let refs: Vec<&[T]> = samples.iter().map(|s| s.as_slice()).collect();
    // strictly-below-eps budgets
    let budgets = vec![eps * real::<T>(0.5); samples.len().max(1)];
    covering_projection(space, &refs, &budgets)
}

fn diff_norm<T: Real>(space: &NormedSpace<T>, a: &[T], b: &[T]) -> Result<T> {
    let d: Vec<T> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    space.norm_eval(&d)
}
