//! Tensors as coefficient matrices, atomic decompositions, the duality
//! pairing against operators `X -> Y*`, and the injective norm.

use serde::{Deserialize, Serialize};

use crate::banach::{DualSpace, Functional, NormedSpace};
use crate::bilinear;
use crate::config::{SolverConfig, ATOM_DEDUP_TOL, ATOM_DROP_TOL};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{real, Real};

/// An element of `X (x) Y` stored densely against the coordinate bases:
/// entry `(i, j)` is the coefficient of `e_i (x) f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    x_space: NormedSpace<T>,
    y_space: NormedSpace<T>,
    coeffs: Mat<T>,
}

impl<T: Real> Tensor<T> {
    pub fn new(x_space: NormedSpace<T>, y_space: NormedSpace<T>, coeffs: Mat<T>) -> Result<Self> {
        if coeffs.nrows() != x_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: x_space.dim(),
                got: coeffs.nrows(),
            });
        }
        if coeffs.ncols() != y_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: y_space.dim(),
                got: coeffs.ncols(),
            });
        }
        if !coeffs.is_finite() {
            return Err(Error::NonFiniteInput("tensor coefficient"));
        }
        Ok(Self {
            x_space,
            y_space,
            coeffs,
        })
    }

    pub fn from_rows(
        x_space: NormedSpace<T>,
        y_space: NormedSpace<T>,
        rows: &[Vec<T>],
    ) -> Result<Self> {
        Self::new(x_space, y_space, Mat::from_rows(rows))
    }

    /// The rank-one tensor `x (x) y`.
    pub fn rank_one(
        x_space: NormedSpace<T>,
        y_space: NormedSpace<T>,
        x: &[T],
        y: &[T],
    ) -> Result<Self> {
        let mut m = Mat::zeros(x_space.dim(), y_space.dim());
        m.add_outer(T::one(), x, y);
        Self::new(x_space, y_space, m)
    }

    pub fn zeros(x_space: NormedSpace<T>, y_space: NormedSpace<T>) -> Self {
        let m = Mat::zeros(x_space.dim(), y_space.dim());
        Self {
            x_space,
            y_space,
            coeffs: m,
        }
    }

    pub fn x_space(&self) -> &NormedSpace<T> {
        &self.x_space
    }

    pub fn y_space(&self) -> &NormedSpace<T> {
        &self.y_space
    }

    pub fn coeffs(&self) -> &Mat<T> {
        &self.coeffs
    }

    /// Same coefficients in `Y (x) X`; the projective and injective norms
    /// are symmetric under this swap.
    pub fn swap_factors(&self) -> Tensor<T> {
        Tensor {
            x_space: self.y_space.clone(),
            y_space: self.x_space.clone(),
            coeffs: self.coeffs.transpose(),
        }
    }

    pub fn sub(&self, rhs: &Tensor<T>) -> Result<Tensor<T>> {
        if self.x_space != rhs.x_space || self.y_space != rhs.y_space {
            return Err(Error::WrongFamily("tensor subtraction needs equal spaces"));
        }
        Tensor::new(
            self.x_space.clone(),
            self.y_space.clone(),
            self.coeffs.sub(&rhs.coeffs),
        )
    }
}

/// One rank-one atom of a decomposition: weight `lambda > 0` and unit-sphere
/// factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct Atom<T> {
    pub lambda: T,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

/// `z = sum lambda_i x_i (x) y_i`; the value of the decomposition is
/// `sum lambda_i`, an upper bound for the projective norm of `z`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
#[serde(transparent)]
pub struct Decomposition<T> {
    pub atoms: Vec<Atom<T>>,
}

impl<T: Real> Decomposition<T> {
    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn value(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, a| acc + a.lambda)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Checks the shape, positivity, and unit-sphere invariants.
    pub fn validate(&self, x_space: &NormedSpace<T>, y_space: &NormedSpace<T>) -> Result<()> {
        let tol = real::<T>(1e-9);
        for a in &self.atoms {
            if a.x.len() != x_space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: x_space.dim(),
                    got: a.x.len(),
                });
            }
            if a.y.len() != y_space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: y_space.dim(),
                    got: a.y.len(),
                });
            }
            if !(a.lambda > T::zero()) || !a.lambda.is_finite() {
                return Err(Error::PreconditionViolated("atom weights must be positive"));
            }
            if (x_space.norm_eval(&a.x)? - T::one()).abs() > tol
                || (y_space.norm_eval(&a.y)? - T::one()).abs() > tol
            {
                return Err(Error::PreconditionViolated("atom factors must be unit"));
            }
        }
        Ok(())
    }
}

/// Raw material for `normalize_atoms`: a coefficient and two factors, not
/// yet scaled to the normal form.
#[derive(Debug, Clone)]
pub struct RawAtom<T> {
    pub coeff: T,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> From<(Vec<T>, Vec<T>)> for RawAtom<T> {
    fn from((x, y): (Vec<T>, Vec<T>)) -> Self {
        RawAtom {
            coeff: T::one(),
            x,
            y,
        }
    }
}

impl<T: Real> From<(T, Vec<T>, Vec<T>)> for RawAtom<T> {
    fn from((coeff, x, y): (T, Vec<T>, Vec<T>)) -> Self {
        RawAtom { coeff, x, y }
    }
}

/// An operator `G : X -> Y*` stored as the `dim(X) x dim(Y)` coefficient
/// matrix of its bilinear form against the coordinate pairings; it acts as a
/// linear functional on `X (x) Y` through [`pairing`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualOperator<T> {
    x_space: NormedSpace<T>,
    y_space: NormedSpace<T>,
    matrix: Mat<T>,
}

impl<T: Real> DualOperator<T> {
    pub fn new(x_space: NormedSpace<T>, y_space: NormedSpace<T>, matrix: Mat<T>) -> Result<Self> {
        if matrix.nrows() != x_space.dim() || matrix.ncols() != y_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: x_space.dim() * y_space.dim(),
                got: matrix.nrows() * matrix.ncols(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFiniteInput("dual operator entry"));
        }
        Ok(Self {
            x_space,
            y_space,
            matrix,
        })
    }

    pub fn zeros(x_space: NormedSpace<T>, y_space: NormedSpace<T>) -> Self {
        let m = Mat::zeros(x_space.dim(), y_space.dim());
        Self {
            x_space,
            y_space,
            matrix: m,
        }
    }

    pub fn x_space(&self) -> &NormedSpace<T> {
        &self.x_space
    }

    pub fn y_space(&self) -> &NormedSpace<T> {
        &self.y_space
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    /// `G(x)(y)`, the bilinear action under both pairings.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.x_space.dim() {
            let wx = self.x_space.pairing_weight(i) * x[i];
            if wx == T::zero() {
                continue;
            }
            for j in 0..self.y_space.dim() {
                acc = acc + wx * self.y_space.pairing_weight(j) * self.matrix[(i, j)] * y[j];
            }
        }
        acc
    }

    /// `G(x)` as a functional on `Y`.
    pub fn apply(&self, x: &[T]) -> Functional<T> {
        let wx = self.x_space.apply_pairing_weights(x);
        let coords = self.matrix.tr_matvec(&wx);
        Functional {
            coords,
            space: DualSpace::of(self.y_space.clone()),
        }
    }

    /// The bilinear form in plain coordinates: `x^T M y` with all pairing
    /// weights folded in.
    pub fn flat_matrix(&self) -> Mat<T> {
        Mat::from_fn(self.x_space.dim(), self.y_space.dim(), |i, j| {
            self.x_space.pairing_weight(i) * self.y_space.pairing_weight(j) * self.matrix[(i, j)]
        })
    }

    /// Inverse of [`flat_matrix`]: rebuilds the stored coefficients from a
    /// plain-coordinate bilinear form.
    pub fn from_flat(
        x_space: NormedSpace<T>,
        y_space: NormedSpace<T>,
        flat: Mat<T>,
    ) -> Result<Self> {
        let m = Mat::from_fn(x_space.dim(), y_space.dim(), |i, j| {
            flat[(i, j)] / (x_space.pairing_weight(i) * y_space.pairing_weight(j))
        });
        Self::new(x_space, y_space, m)
    }

    /// Same form viewed as an operator `Y -> X*`.
    pub fn swap_factors(&self) -> DualOperator<T> {
        DualOperator {
            x_space: self.y_space.clone(),
            y_space: self.x_space.clone(),
            matrix: self.matrix.transpose(),
        }
    }
}

/// Assembles `sum lambda_i x_i y_i^T` into a tensor over the given pair.
pub fn assemble<T: Real>(
    d: &Decomposition<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
) -> Result<Tensor<T>> {
    let mut m = Mat::zeros(x_space.dim(), y_space.dim());
    for a in &d.atoms {
        if a.x.len() != x_space.dim() || a.y.len() != y_space.dim() {
            return Err(Error::DimensionMismatch {
                expected: x_space.dim(),
                got: a.x.len(),
            });
        }
        m.add_outer(a.lambda, &a.x, &a.y);
    }
    Tensor::new(x_space.clone(), y_space.clone(), m)
}

/// Rescales raw atoms to the normal form: `lambda = |c| ||x|| ||y|| > 0`,
/// factors on the unit sphere, signs folded into `x`, and atoms below
/// `drop_tol` removed.
pub fn normalize_atoms<T: Real, R: Into<RawAtom<T>>>(
    raw: impl IntoIterator<Item = R>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    drop_tol: T,
) -> Result<Decomposition<T>> {
    let mut atoms = Vec::new();
    for r in raw {
        let r: RawAtom<T> = r.into();
        if !r.coeff.is_finite() {
            return Err(Error::NonFiniteInput("atom coefficient"));
        }
        let nx = x_space.norm_eval(&r.x)?;
        let ny = y_space.norm_eval(&r.y)?;
        let lambda = r.coeff.abs() * nx * ny;
        if lambda < drop_tol {
            continue;
        }
        let sign = if r.coeff < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        let x: Vec<T> = r.x.iter().map(|t| sign * *t / nx).collect();
        let y: Vec<T> = r.y.iter().map(|t| *t / ny).collect();
        atoms.push(Atom { lambda, x, y });
    }
    Ok(Decomposition { atoms })
}

/// Default-tolerance variant of [`normalize_atoms`].
pub fn normalize_atoms_default<T: Real, R: Into<RawAtom<T>>>(
    raw: impl IntoIterator<Item = R>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
) -> Result<Decomposition<T>> {
    normalize_atoms(raw, x_space, y_space, real(ATOM_DROP_TOL))
}

/// `G(z) = sum_ij w_i w_j G_ij Z_ij`: the action of the dual operator on the
/// tensor, with the cell-measure weights entering for discrete `L_p`
/// factors.
pub fn pairing<T: Real>(g: &DualOperator<T>, t: &Tensor<T>) -> Result<T> {
    if g.x_space().dim() != t.x_space().dim() || g.y_space().dim() != t.y_space().dim() {
        return Err(Error::DimensionMismatch {
            expected: t.x_space().dim() * t.y_space().dim(),
            got: g.x_space().dim() * g.y_space().dim(),
        });
    }
    let mut acc = T::zero();
    for i in 0..t.coeffs().nrows() {
        let wi = t.x_space().pairing_weight(i);
        for j in 0..t.coeffs().ncols() {
            acc = acc + wi * t.y_space().pairing_weight(j) * g.matrix()[(i, j)] * t.coeffs()[(i, j)];
        }
    }
    Ok(acc)
}

/// How an injective-norm value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjMethod {
    DualVertexEnumeration,
    HilbertSvd,
    HeuristicLowerBound,
}

#[derive(Debug, Clone)]
pub struct InjNormResult<T> {
    pub value: T,
    pub method: InjMethod,
    /// Attaining (or best found) pair of dual unit functionals.
    pub x_star: Functional<T>,
    pub y_star: Functional<T>,
}

/// The injective norm `sup |<x* (x) y*, z>|` over the dual unit balls.
/// Exact via dual vertex enumeration or singular values where those apply;
/// otherwise a multistart alternating search labelled as a lower bound.
pub fn injective_norm<T: Real>(t: &Tensor<T>, cfg: &SolverConfig) -> Result<InjNormResult<T>> {
    // plain-coordinate form of (f, g) -> <f (x) g, z>
    let n = Mat::from_fn(t.x_space().dim(), t.y_space().dim(), |i, j| {
        t.x_space().pairing_weight(i) * t.y_space().pairing_weight(j) * t.coeffs()[(i, j)]
    });
    let r = bilinear::dual_sup(&n, t.x_space(), t.y_space(), cfg)?;
    let method = if !r.exact {
        InjMethod::HeuristicLowerBound
    } else if t.x_space().dual_space().map_or(false, |d| d.hilbert_scaling().is_some())
        && t.y_space().dual_space().map_or(false, |d| d.hilbert_scaling().is_some())
    {
        InjMethod::HilbertSvd
    } else {
        InjMethod::DualVertexEnumeration
    };
    Ok(InjNormResult {
        value: r.value,
        method,
        x_star: Functional {
            coords: r.x,
            space: DualSpace::of(t.x_space().clone()),
        },
        y_star: Functional {
            coords: r.y,
            space: DualSpace::of(t.y_space().clone()),
        },
    })
}

/// Flips the pair so the first nonzero coordinate of `x` is positive;
/// `(x, y)` and `(-x, -y)` are the same atom.
pub(crate) fn canonicalize_pair<T: Real>(x: &mut [T], y: &mut [T]) {
    let tiny = real::<T>(1e-14);
    for xi in x.iter() {
        if xi.abs() > tiny {
            if *xi < T::zero() {
                for t in x.iter_mut() {
                    *t = -*t;
                }
                for t in y.iter_mut() {
                    *t = -*t;
                }
            }
            return;
        }
    }
}

/// Max-abs equality of canonicalized atoms at the pool tolerance.
pub(crate) fn same_atom<T: Real>(ax: &[T], ay: &[T], bx: &[T], by: &[T]) -> bool {
    let tol = real::<T>(ATOM_DEDUP_TOL);
    ax.iter().zip(bx).all(|(a, b)| (*a - *b).abs() <= tol)
        && ay.iter().zip(by).all(|(a, b)| (*a - *b).abs() <= tol)
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + serde::de::DeserializeOwned"))]
#[serde(deny_unknown_fields)]
struct TensorRepr<T: Real> {
    #[serde(rename = "X")]
    x: NormedSpace<T>,
    #[serde(rename = "Y")]
    y: NormedSpace<T>,
    matrix: Vec<Vec<T>>,
}

impl<T: Real + Serialize> Serialize for Tensor<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorRepr {
            x: self.x_space.clone(),
            y: self.y_space.clone(),
            matrix: self.coeffs.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real + serde::de::DeserializeOwned> Deserialize<'de> for Tensor<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TensorRepr::<T>::deserialize(d)?;
        Tensor::from_rows(repr.x, repr.y, &repr.matrix).map_err(serde::de::Error::custom)
    }
}
