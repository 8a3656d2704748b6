//! Finite-dimensional normed spaces and the primitive oracles everything
//! else is built from: norm evaluation, dual-norm evaluation, and linear
//! maximization over the unit ball.
//!
//! Four families are supported: `l_p`, weighted `l_p` (diagonal scaling),
//! polyhedral balls given by vertices, and a discretized `L_p(mu)` model
//! where the cell measures enter both the norm and the duality pairing.
//! Scalars are real; `p = infinity` is a distinguished exponent value, not a
//! large float. All operations are pure and deterministic, including the
//! tie-breaking rules of the maximization oracles.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::DEFAULT_VERTEX_CAP;
use crate::error::{Error, Result};
use crate::linalg::{solve_lp, Mat};
use crate::scalar::{real, sign_or_one, Real};

/// Exponent of an `l_p` / `L_p` norm: a finite `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    pub fn finite(p: T) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFiniteInput("exponent"));
        }
        if p < T::one() {
            return Err(Error::InvalidSpace("exponent p must satisfy p >= 1"));
        }
        Ok(Exponent::Finite(p))
    }

    /// Conjugate exponent: `1/p + 1/p' = 1`, with `1` and `infinity` paired.
    pub fn conjugate(self) -> Self {
        match self {
            Exponent::Infinity => Exponent::Finite(T::one()),
            Exponent::Finite(p) => {
                if p == T::one() {
                    Exponent::Infinity
                } else {
                    Exponent::Finite(p / (p - T::one()))
                }
            }
        }
    }

    pub fn is_one(self) -> bool {
        matches!(self, Exponent::Finite(p) if p == T::one())
    }

    pub fn is_two(self) -> bool {
        matches!(self, Exponent::Finite(p) if p == real::<T>(2.0))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl<T: Real> Serialize for Exponent<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinity => s.serialize_str("inf"),
            Exponent::Finite(p) => s.serialize_f64(p.to_f64().unwrap()),
        }
    }
}

impl<'de, T: Real> Deserialize<'de> for Exponent<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(p) => {
                Exponent::finite(T::from_f64(p).ok_or_else(|| D::Error::custom("bad p"))?)
                    .map_err(D::Error::custom)
            }
            Repr::Text(t) if t == "inf" => Ok(Exponent::Infinity),
            Repr::Text(t) => Err(D::Error::custom(format!("unknown exponent {t:?}"))),
        }
    }
}

/// Which unit ball the space carries.
#[derive(Debug, Clone, PartialEq)]
pub enum NormFamily<T> {
    Lp {
        p: Exponent<T>,
    },
    WeightedLp {
        p: Exponent<T>,
        weights: Vec<T>,
    },
    /// Unit ball = symmetric convex hull of the vertices. One representative
    /// per `+-` pair is stored; negations are synthesized on demand.
    Polyhedral {
        vertices: Vec<Vec<T>>,
    },
    /// Discretized `L_p(mu)`: the cell measures weight both the norm and the
    /// duality pairing.
    DiscreteLp {
        p: Exponent<T>,
        cell_measures: Vec<T>,
    },
}

/// A finite-dimensional normed space.
#[derive(Debug, Clone, PartialEq)]
pub struct NormedSpace<T> {
    dim: usize,
    family: NormFamily<T>,
}

impl<T: Real> NormedSpace<T> {
    pub fn lp(p: Exponent<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dim must be at least 1"));
        }
        Ok(Self {
            dim,
            family: NormFamily::Lp { p },
        })
    }

    /// Euclidean space shortcut.
    pub fn l2(dim: usize) -> Self {
        Self::lp(Exponent::Finite(real(2.0)), dim).unwrap()
    }

    pub fn l1(dim: usize) -> Self {
        Self::lp(Exponent::Finite(T::one()), dim).unwrap()
    }

    pub fn linf(dim: usize) -> Self {
        Self::lp(Exponent::Infinity, dim).unwrap()
    }

    pub fn weighted_lp(p: Exponent<T>, weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace("dim must be at least 1"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= T::zero()) {
            return Err(Error::InvalidSpace("weights must be strictly positive"));
        }
        Ok(Self {
            dim: weights.len(),
            family: NormFamily::WeightedLp { p, weights },
        })
    }

    pub fn discrete_lp(p: Exponent<T>, cell_measures: Vec<T>) -> Result<Self> {
        if cell_measures.is_empty() {
            return Err(Error::InvalidSpace("dim must be at least 1"));
        }
        if cell_measures
            .iter()
            .any(|w| !w.is_finite() || *w <= T::zero())
        {
            return Err(Error::InvalidSpace(
                "cell measures must be strictly positive",
            ));
        }
        Ok(Self {
            dim: cell_measures.len(),
            family: NormFamily::DiscreteLp { p, cell_measures },
        })
    }

    /// One representative per `+-` pair; the list must span the full space.
    pub fn polyhedral(vertices: Vec<Vec<T>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidSpace("vertex list must be nonempty"));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidSpace("vertices must share a dimension"));
        }
        if vertices
            .iter()
            .any(|v| v.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::InvalidSpace("vertices must be finite"));
        }
        let span = Mat::from_fn(dim, vertices.len(), |i, j| vertices[j][i]);
        if matrix_rank(&span) < dim {
            return Err(Error::InvalidSpace("vertices must span the full space"));
        }
        Ok(Self {
            dim,
            family: NormFamily::Polyhedral { vertices },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &NormFamily<T> {
        &self.family
    }

    /// Weight of coordinate `i` in the duality pairing (`mu_i` for the
    /// discrete `L_p` model, `1` otherwise).
    #[inline]
    pub fn pairing_weight(&self, i: usize) -> T {
        match &self.family {
            NormFamily::DiscreteLp { cell_measures, .. } => cell_measures[i],
            _ => T::one(),
        }
    }

    /// `<f, v>` under this space's pairing.
    pub fn pairing(&self, f: &[T], v: &[T]) -> T {
        debug_assert_eq!(f.len(), self.dim);
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim).fold(T::zero(), |acc, i| {
            acc + self.pairing_weight(i) * f[i] * v[i]
        })
    }

    /// Multiplies coordinate-wise by the pairing weights.
    pub fn apply_pairing_weights(&self, v: &[T]) -> Vec<T> {
        v.iter()
            .enumerate()
            .map(|(i, x)| self.pairing_weight(i) * *x)
            .collect()
    }

    fn check_vector(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput("vector coordinate"));
        }
        Ok(())
    }

    /// `||v||` in this space.
    pub fn norm_eval(&self, v: &[T]) -> Result<T> {
        self.check_vector(v)?;
        Ok(match &self.family {
            NormFamily::Lp { p } => lp_norm(v, *p),
            NormFamily::WeightedLp { p, weights } => {
                let scaled: Vec<T> = v.iter().zip(weights).map(|(x, w)| *x * *w).collect();
                lp_norm(&scaled, *p)
            }
            NormFamily::DiscreteLp { p, cell_measures } => match p {
                Exponent::Infinity => v.iter().fold(T::zero(), |m, x| m.max(x.abs())),
                Exponent::Finite(p) => {
                    if *p == T::one() {
                        v.iter()
                            .zip(cell_measures)
                            .fold(T::zero(), |acc, (x, mu)| acc + *mu * x.abs())
                    } else {
                        let s = v
                            .iter()
                            .zip(cell_measures)
                            .fold(T::zero(), |acc, (x, mu)| acc + *mu * x.abs().powf(*p));
                        s.powf(T::one() / *p)
                    }
                }
            },
            NormFamily::Polyhedral { .. } => self.polyhedral_gauge(v)?,
        })
    }

    /// `sup { <f, x> : x in B_X }` under this space's pairing; the norm of
    /// `f` in the dual space.
    pub fn dual_norm_eval(&self, f: &[T]) -> Result<T> {
        self.check_vector(f)?;
        Ok(match &self.family {
            NormFamily::Lp { p } => lp_norm(f, p.conjugate()),
            NormFamily::WeightedLp { p, weights } => {
                let scaled: Vec<T> = f.iter().zip(weights).map(|(x, w)| *x / *w).collect();
                lp_norm(&scaled, p.conjugate())
            }
            NormFamily::DiscreteLp { p, cell_measures } => {
                let q = p.conjugate();
                match q {
                    Exponent::Infinity => f.iter().fold(T::zero(), |m, x| m.max(x.abs())),
                    Exponent::Finite(q) => {
                        if q == T::one() {
                            f.iter()
                                .zip(cell_measures)
                                .fold(T::zero(), |acc, (x, mu)| acc + *mu * x.abs())
                        } else {
                            let s = f
                                .iter()
                                .zip(cell_measures)
                                .fold(T::zero(), |acc, (x, mu)| acc + *mu * x.abs().powf(q));
                            s.powf(T::one() / q)
                        }
                    }
                }
            }
            NormFamily::Polyhedral { vertices } => vertices
                .iter()
                .map(|v| crate::linalg::dot(f, v).abs())
                .fold(T::zero(), T::max),
        })
    }

    /// Maximizes `<c, x>` over the unit ball and returns the maximizer with
    /// the value (`= dual_norm_eval(c)`). Ties break by the lowest-index
    /// rule, so certificates are reproducible.
    pub fn ball_argmax(&self, c: &[T]) -> Result<(Vec<T>, T)> {
        self.check_vector(c)?;
        if c.iter().all(|x| *x == T::zero()) {
            return Err(Error::ZeroDirection);
        }
        Ok(match &self.family {
            NormFamily::Lp { p } => lp_ball_argmax(c, *p),
            NormFamily::WeightedLp { p, weights } => {
                // substitute u = w .* x, reduce to the plain ball
                let cw: Vec<T> = c.iter().zip(weights).map(|(ci, w)| *ci / *w).collect();
                let (u, value) = lp_ball_argmax(&cw, *p);
                let x = u.iter().zip(weights).map(|(ui, w)| *ui / *w).collect();
                (x, value)
            }
            NormFamily::DiscreteLp { p, cell_measures } => {
                discrete_ball_argmax(c, *p, cell_measures)
            }
            NormFamily::Polyhedral { .. } => {
                let mut best: Option<(Vec<T>, T)> = None;
                for v in self.vertex_iter() {
                    let val = crate::linalg::dot(c, &v);
                    if best.as_ref().map_or(true, |(_, bv)| val > *bv) {
                        best = Some((v, val));
                    }
                }
                best.unwrap()
            }
        })
    }

    /// A functional of dual norm one pairing to `||v||`; the `ball_argmax`
    /// of the dual ball, with the same deterministic tie-breaking.
    pub fn norming_functional(&self, v: &[T]) -> Result<Functional<T>> {
        self.check_vector(v)?;
        if v.iter().all(|x| *x == T::zero()) {
            return Err(Error::ZeroVector);
        }
        let coords = match &self.family {
            NormFamily::Lp { p } => norming_lp(v, *p),
            NormFamily::WeightedLp { p, weights } => {
                let scaled: Vec<T> = v.iter().zip(weights).map(|(x, w)| *x * *w).collect();
                let f = norming_lp(&scaled, *p);
                f.iter().zip(weights).map(|(fi, w)| *fi * *w).collect()
            }
            NormFamily::DiscreteLp { p, cell_measures } => match p {
                Exponent::Infinity => {
                    let k = argmax_abs_lowest(v);
                    let mut f = vec![T::zero(); self.dim];
                    f[k] = sign_or_one(v[k]) / cell_measures[k];
                    f
                }
                Exponent::Finite(p) => {
                    if *p == T::one() {
                        v.iter().map(|x| sign_or_one(*x)).collect()
                    } else {
                        let n = self.norm_eval(v)?;
                        v.iter()
                            .map(|x| sign_or_one(*x) * (x.abs() / n).powf(*p - T::one()))
                            .collect()
                    }
                }
            },
            NormFamily::Polyhedral { .. } => {
                // dual multipliers of the gauge program
                let (_, duals) = self.polyhedral_gauge_with_duals(v)?;
                duals
            }
        };
        Ok(Functional {
            coords,
            space: DualSpace::of(self.clone()),
        })
    }

    /// Iterates the full symmetric vertex list (representative, negation,
    /// representative, ...) without materializing it.
    fn vertex_iter(&self) -> impl Iterator<Item = Vec<T>> + '_ {
        let reps: &[Vec<T>] = match &self.family {
            NormFamily::Polyhedral { vertices } => vertices,
            _ => &[],
        };
        reps.iter().flat_map(|v| {
            let neg: Vec<T> = v.iter().map(|x| -*x).collect();
            [v.clone(), neg]
        })
    }

    /// Full symmetric vertex list of the unit ball. Closed under negation;
    /// synthesized for `l_1`- and `l_infinity`-type families. Sign-vector
    /// enumeration refuses dimensions above `vertex_cap`.
    pub fn vertices(&self, vertex_cap: usize) -> Result<Vec<Vec<T>>> {
        match &self.family {
            NormFamily::Polyhedral { .. } => Ok(self.vertex_iter().collect()),
            NormFamily::Lp { p } => match p {
                Exponent::Finite(p) if *p == T::one() => Ok(cross_polytope_vertices(
                    self.dim,
                    |_| T::one(),
                )),
                Exponent::Infinity => sign_vertices(self.dim, vertex_cap, |_| T::one()),
                _ => Err(Error::NotPolyhedral),
            },
            NormFamily::WeightedLp { p, weights } => match p {
                Exponent::Finite(p) if *p == T::one() => Ok(cross_polytope_vertices(
                    self.dim,
                    |i| T::one() / weights[i],
                )),
                Exponent::Infinity => {
                    sign_vertices(self.dim, vertex_cap, |i| T::one() / weights[i])
                }
                _ => Err(Error::NotPolyhedral),
            },
            NormFamily::DiscreteLp { p, cell_measures } => match p {
                Exponent::Finite(p) if *p == T::one() => Ok(cross_polytope_vertices(
                    self.dim,
                    |i| T::one() / cell_measures[i],
                )),
                Exponent::Infinity => sign_vertices(self.dim, vertex_cap, |_| T::one()),
                _ => Err(Error::NotPolyhedral),
            },
        }
    }

    /// One vertex per `+-` pair, in the same deterministic order as
    /// [`NormedSpace::vertices`]. Halves the column count of the vertex-pair
    /// programs, which are invariant under joint negation.
    pub fn vertex_representatives(&self, vertex_cap: usize) -> Result<Vec<Vec<T>>> {
        match &self.family {
            NormFamily::Polyhedral { vertices } => Ok(vertices.clone()),
            _ => {
                let full = self.vertices(vertex_cap)?;
                if full.len() == 2 * self.dim {
                    // cross-polytope layout: representative, negation, ...
                    Ok(full.into_iter().step_by(2).collect())
                } else {
                    // sign-vector layout: the top coordinate bit splits pairs
                    Ok(full.into_iter().take(1 << (self.dim - 1)).collect())
                }
            }
        }
    }

    /// The dual space as a first-class descriptor, when the family has one
    /// (`l_p` dualizes to `l_p'`; polyhedral duals stay implicit).
    pub fn dual_space(&self) -> Option<NormedSpace<T>> {
        match &self.family {
            NormFamily::Lp { p } => Some(NormedSpace {
                dim: self.dim,
                family: NormFamily::Lp { p: p.conjugate() },
            }),
            NormFamily::WeightedLp { p, weights } => Some(NormedSpace {
                dim: self.dim,
                family: NormFamily::WeightedLp {
                    p: p.conjugate(),
                    weights: weights.iter().map(|w| T::one() / *w).collect(),
                },
            }),
            NormFamily::DiscreteLp { p, cell_measures } => Some(NormedSpace {
                dim: self.dim,
                family: NormFamily::DiscreteLp {
                    p: p.conjugate(),
                    cell_measures: cell_measures.clone(),
                },
            }),
            NormFamily::Polyhedral { .. } => None,
        }
    }

    /// Vertices of the dual unit ball (in functional coordinates), when the
    /// dual ball is polyhedral with a known vertex list.
    pub fn dual_vertices(&self, vertex_cap: usize) -> Result<Vec<Vec<T>>> {
        match self.dual_space() {
            Some(dual) => dual.vertices(vertex_cap),
            None => Err(Error::DualNotRepresentable),
        }
    }

    /// For inner-product families: the diagonal `s` with
    /// `x in B_X  <=>  s .* x in B_{l_2}`. `None` when the ball is not an
    /// ellipsoid of this diagonal kind.
    pub fn hilbert_scaling(&self) -> Option<Vec<T>> {
        match &self.family {
            NormFamily::Lp { p } if p.is_two() => Some(vec![T::one(); self.dim]),
            NormFamily::WeightedLp { p, weights } if p.is_two() => Some(weights.clone()),
            NormFamily::DiscreteLp { p, cell_measures } if p.is_two() => {
                Some(cell_measures.iter().map(|mu| mu.sqrt()).collect())
            }
            _ => None,
        }
    }

    pub fn is_l1_type(&self) -> bool {
        match &self.family {
            NormFamily::Lp { p }
            | NormFamily::WeightedLp { p, .. }
            | NormFamily::DiscreteLp { p, .. } => p.is_one(),
            NormFamily::Polyhedral { .. } => false,
        }
    }

    /// `true` when `vertices` would succeed under the given cap.
    pub fn has_vertices(&self, vertex_cap: usize) -> bool {
        match &self.family {
            NormFamily::Polyhedral { .. } => true,
            NormFamily::Lp { p }
            | NormFamily::WeightedLp { p, .. }
            | NormFamily::DiscreteLp { p, .. } => {
                p.is_one() || (p.is_infinite() && self.dim <= vertex_cap)
            }
        }
    }

    fn polyhedral_gauge(&self, v: &[T]) -> Result<T> {
        Ok(self.polyhedral_gauge_with_duals(v)?.0)
    }

    /// Gauge of the symmetric vertex hull by linear programming; the dual
    /// multipliers are a norming functional.
    fn polyhedral_gauge_with_duals(&self, v: &[T]) -> Result<(T, Vec<T>)> {
        if v.iter().all(|x| *x == T::zero()) {
            return Ok((T::zero(), vec![T::zero(); self.dim]));
        }
        let verts: Vec<Vec<T>> = self.vertex_iter().collect();
        let a = Mat::from_fn(self.dim, verts.len(), |i, j| verts[j][i]);
        let c = vec![T::one(); verts.len()];
        let sol = solve_lp(&a, v, &c)?;
        Ok((sol.objective, sol.duals))
    }
}

/// Marker for "the dual of the wrapped space". Polyhedral duals have no
/// vertex description of their own, so functionals carry the primal space
/// and evaluate their norm through `dual_norm_eval`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSpace<T> {
    primal: NormedSpace<T>,
}

impl<T: Real> DualSpace<T> {
    pub fn of(primal: NormedSpace<T>) -> Self {
        Self { primal }
    }

    pub fn primal(&self) -> &NormedSpace<T> {
        &self.primal
    }

    pub fn dim(&self) -> usize {
        self.primal.dim()
    }

    /// Norm of a functional living in this dual.
    pub fn norm_eval(&self, f: &[T]) -> Result<T> {
        self.primal.dual_norm_eval(f)
    }

    /// The dual as a plain space descriptor, when representable.
    pub fn as_normed_space(&self) -> Option<NormedSpace<T>> {
        self.primal.dual_space()
    }
}

/// A dual vector tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional<T> {
    pub coords: Vec<T>,
    pub space: DualSpace<T>,
}

impl<T: Real> Functional<T> {
    /// Action on a primal vector, under the primal space's pairing.
    pub fn apply(&self, v: &[T]) -> T {
        self.space.primal().pairing(&self.coords, v)
    }

    pub fn norm(&self) -> Result<T> {
        self.space.norm_eval(&self.coords)
    }
}

fn lp_norm<T: Real>(v: &[T], p: Exponent<T>) -> T {
    match p {
        Exponent::Infinity => v.iter().fold(T::zero(), |m, x| m.max(x.abs())),
        Exponent::Finite(p) => {
            if p == T::one() {
                v.iter().fold(T::zero(), |acc, x| acc + x.abs())
            } else if p == real::<T>(2.0) {
                v.iter()
                    .fold(T::zero(), |acc, x| acc + *x * *x)
                    .sqrt()
            } else {
                v.iter()
                    .fold(T::zero(), |acc, x| acc + x.abs().powf(p))
                    .powf(T::one() / p)
            }
        }
    }
}

fn argmax_abs_lowest<T: Real>(v: &[T]) -> usize {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    k
}

fn lp_ball_argmax<T: Real>(c: &[T], p: Exponent<T>) -> (Vec<T>, T) {
    match p {
        // ball is the cross-polytope: concentrate on the largest coordinate
        Exponent::Finite(p) if p == T::one() => {
            let k = argmax_abs_lowest(c);
            let mut x = vec![T::zero(); c.len()];
            x[k] = sign_or_one(c[k]);
            (x, c[k].abs())
        }
        // ball is the cube: the sign vector
        Exponent::Infinity => {
            let x: Vec<T> = c.iter().map(|ci| sign_or_one(*ci)).collect();
            let value = c.iter().fold(T::zero(), |acc, ci| acc + ci.abs());
            (x, value)
        }
        Exponent::Finite(p) => {
            let q = p / (p - T::one());
            let value = lp_norm(c, Exponent::Finite(q));
            let e = q - T::one();
            let x: Vec<T> = c
                .iter()
                .map(|ci| sign_or_one(*ci) * (ci.abs() / value).powf(e))
                .collect();
            (x, value)
        }
    }
}

fn discrete_ball_argmax<T: Real>(c: &[T], p: Exponent<T>, mu: &[T]) -> (Vec<T>, T) {
    match p {
        Exponent::Finite(p) if p == T::one() => {
            // L_1(mu) ball: spike of height 1/mu_k on the best cell
            let k = argmax_abs_lowest(c);
            let mut x = vec![T::zero(); c.len()];
            x[k] = sign_or_one(c[k]) / mu[k];
            (x, c[k].abs())
        }
        Exponent::Infinity => {
            let x: Vec<T> = c.iter().map(|ci| sign_or_one(*ci)).collect();
            let value = c
                .iter()
                .zip(mu)
                .fold(T::zero(), |acc, (ci, m)| acc + *m * ci.abs());
            (x, value)
        }
        Exponent::Finite(p) => {
            let q = p / (p - T::one());
            let value = c
                .iter()
                .zip(mu)
                .fold(T::zero(), |acc, (ci, m)| acc + *m * ci.abs().powf(q))
                .powf(T::one() / q);
            let e = q - T::one();
            let x: Vec<T> = c
                .iter()
                .map(|ci| sign_or_one(*ci) * (ci.abs() / value).powf(e))
                .collect();
            (x, value)
        }
    }
}

fn norming_lp<T: Real>(v: &[T], p: Exponent<T>) -> Vec<T> {
    match p {
        Exponent::Finite(p) if p == T::one() => v.iter().map(|x| sign_or_one(*x)).collect(),
        Exponent::Infinity => {
            let k = argmax_abs_lowest(v);
            let mut f = vec![T::zero(); v.len()];
            f[k] = sign_or_one(v[k]);
            f
        }
        Exponent::Finite(p) => {
            let n = lp_norm(v, Exponent::Finite(p));
            v.iter()
                .map(|x| sign_or_one(*x) * (x.abs() / n).powf(p - T::one()))
                .collect()
        }
    }
}

fn cross_polytope_vertices<T: Real>(dim: usize, scale: impl Fn(usize) -> T) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut v = vec![T::zero(); dim];
        v[i] = scale(i);
        let neg: Vec<T> = v.iter().map(|x| -*x).collect();
        out.push(v);
        out.push(neg);
    }
    out
}

fn sign_vertices<T: Real>(
    dim: usize,
    cap: usize,
    scale: impl Fn(usize) -> T,
) -> Result<Vec<Vec<T>>> {
    if dim > cap {
        return Err(Error::VertexBudgetExceeded { dim, cap });
    }
    let mut out = Vec::with_capacity(1usize << dim);
    for mask in 0..(1usize << dim) {
        let v: Vec<T> = (0..dim)
            .map(|i| {
                let s = if (mask >> i) & 1 == 0 {
                    T::one()
                } else {
                    -T::one()
                };
                s * scale(i)
            })
            .collect();
        out.push(v);
    }
    Ok(out)
}

fn matrix_rank<T: Real>(m: &Mat<T>) -> usize {
    let mut a = m.clone();
    let rows = a.nrows();
    let cols = a.ncols();
    let eps = real::<T>(1e-10) * (T::one() + a.max_abs());
    let mut rank = 0usize;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let mut best = rank;
        for i in rank + 1..rows {
            if a[(i, c)].abs() > a[(best, c)].abs() {
                best = i;
            }
        }
        if a[(best, c)].abs() <= eps {
            continue;
        }
        for j in 0..cols {
            let tmp = a[(rank, j)];
            a[(rank, j)] = a[(best, j)];
            a[(best, j)] = tmp;
        }
        for i in rank + 1..rows {
            let f = a[(i, c)] / a[(rank, c)];
            if f != T::zero() {
                for j in 0..cols {
                    let sub = f * a[(rank, j)];
                    a[(i, j)] = a[(i, j)] - sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// JSON descriptors
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceRepr<T: Real> {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Exponent<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<T>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell_measures: Option<Vec<T>>,
}

impl<T: Real + Serialize> Serialize for NormedSpace<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.family {
            NormFamily::Lp { p } => SpaceRepr {
                family: "lp".into(),
                p: Some(*p),
                dim: Some(self.dim),
                weights: None,
                vertices: None,
                cell_measures: None,
            },
            NormFamily::WeightedLp { p, weights } => SpaceRepr {
                family: "weighted_lp".into(),
                p: Some(*p),
                dim: None,
                weights: Some(weights.clone()),
                vertices: None,
                cell_measures: None,
            },
            NormFamily::Polyhedral { vertices } => SpaceRepr {
                family: "polyhedral".into(),
                p: None,
                dim: None,
                weights: None,
                vertices: Some(vertices.clone()),
                cell_measures: None,
            },
            NormFamily::DiscreteLp { p, cell_measures } => SpaceRepr {
                family: "discrete_lp".into(),
                p: Some(*p),
                dim: None,
                weights: None,
                vertices: None,
                cell_measures: Some(cell_measures.clone()),
            },
        };
        repr.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for NormedSpace<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpaceRepr::<T>::deserialize(d)?;
        let need_p = || repr.p.ok_or_else(|| D::Error::custom("missing p"));
        let space = match repr.family.as_str() {
            "lp" => {
                let dim = repr.dim.ok_or_else(|| D::Error::custom("missing dim"))?;
                NormedSpace::lp(need_p()?, dim)
            }
            "weighted_lp" => {
                let weights = repr
                    .weights
                    .ok_or_else(|| D::Error::custom("missing weights"))?;
                NormedSpace::weighted_lp(need_p()?, weights)
            }
            "polyhedral" => {
                let vertices = repr
                    .vertices
                    .ok_or_else(|| D::Error::custom("missing vertices"))?;
                NormedSpace::polyhedral(vertices)
            }
            "discrete_lp" => {
                let cells = repr
                    .cell_measures
                    .ok_or_else(|| D::Error::custom("missing cell_measures"))?;
                NormedSpace::discrete_lp(need_p()?, cells)
            }
            other => return Err(D::Error::custom(format!("unknown family {other:?}"))),
        }
        .map_err(D::Error::custom)?;
        if let Some(dim) = repr.dim {
            if dim != space.dim() {
                return Err(D::Error::custom("dim does not match coordinate arrays"));
            }
        }
        Ok(space)
    }
}

/// Default vertex budget re-exported for callers that do not thread a config.
pub fn default_vertex_cap() -> usize {
    DEFAULT_VERTEX_CAP
}
