//! Maximization of a bilinear form over a product of unit balls.
//!
//! `sup { x^T M y }` over `B_X x B_Y` is the operator norm of the associated
//! map and also the pricing subproblem of column generation; the same
//! routine over the dual balls gives the injective norm. Exact dispatch:
//! vertex scan when one ball is a polytope with a known vertex list, largest
//! singular value when both balls are diagonal ellipsoids. Otherwise a
//! seeded multistart of alternating linear maximizations returns a lower
//! bound, flagged as such.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::banach::NormedSpace;
use crate::config::SolverConfig;
use crate::error::Result;
use crate::linalg::{svd, Mat};
use crate::scalar::{real, Real};

#[derive(Debug, Clone)]
pub struct BilinearMax<T> {
    pub value: T,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Whether the value is the exact supremum or a search lower bound.
    pub exact: bool,
}

/// Maximizes plain-coordinate `x^T m y` for `x` in the ball of `x_space`,
/// treating `c` as a flat linear functional via `ball_argmax` on the
/// weighted coordinates. Returns `(x, value)`; a zero functional yields the
/// zero vector.
pub(crate) fn flat_ball_argmax<T: Real>(space: &NormedSpace<T>, c: &[T]) -> Result<(Vec<T>, T)> {
    let scaled: Vec<T> = c
        .iter()
        .enumerate()
        .map(|(i, ci)| *ci / space.pairing_weight(i))
        .collect();
    if scaled.iter().all(|x| *x == T::zero()) {
        return Ok((vec![T::zero(); space.dim()], T::zero()));
    }
    space.ball_argmax(&scaled)
}

/// `sup { x^T m y : x in B_X, y in B_Y }` with `m` in plain coordinates.
pub fn primal_sup<T: Real>(
    m: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<BilinearMax<T>> {
    debug_assert_eq!(m.nrows(), x_space.dim());
    debug_assert_eq!(m.ncols(), y_space.dim());

    if let (Some(sx), Some(sy)) = (x_space.hilbert_scaling(), y_space.hilbert_scaling()) {
        return hilbert_sup(m, &sx, &sy);
    }
    if x_space.has_vertices(cfg.vertex_cap) {
        let verts = x_space.vertices(cfg.vertex_cap)?;
        return scan_x_vertices(m, &verts, y_space);
    }
    if y_space.has_vertices(cfg.vertex_cap) {
        let verts = y_space.vertices(cfg.vertex_cap)?;
        let t = scan_x_vertices(&m.transpose(), &verts, x_space)?;
        return Ok(BilinearMax {
            value: t.value,
            x: t.y,
            y: t.x,
            exact: true,
        });
    }
    multistart_alternating(m, x_space, y_space, cfg)
}

fn hilbert_sup<T: Real>(m: &Mat<T>, sx: &[T], sy: &[T]) -> Result<BilinearMax<T>> {
    let a = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / (sx[i] * sy[j]));
    let dec = svd(&a)?;
    if dec.sigma.is_empty() || dec.sigma[0] == T::zero() {
        return Ok(BilinearMax {
            value: T::zero(),
            x: vec![T::zero(); m.nrows()],
            y: vec![T::zero(); m.ncols()],
            exact: true,
        });
    }
    let x: Vec<T> = dec
        .u
        .col(0)
        .iter()
        .zip(sx)
        .map(|(u, s)| *u / *s)
        .collect();
    let y: Vec<T> = dec
        .v
        .col(0)
        .iter()
        .zip(sy)
        .map(|(v, s)| *v / *s)
        .collect();
    Ok(BilinearMax {
        value: dec.sigma[0],
        x,
        y,
        exact: true,
    })
}

fn scan_x_vertices<T: Real>(
    m: &Mat<T>,
    verts: &[Vec<T>],
    y_space: &NormedSpace<T>,
) -> Result<BilinearMax<T>> {
    let mut best: Option<BilinearMax<T>> = None;
    for v in verts {
        let c = m.tr_matvec(v);
        let (y, value) = flat_ball_argmax(y_space, &c)?;
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(BilinearMax {
                value,
                x: v.clone(),
                y,
                exact: true,
            });
        }
    }
    Ok(best.expect("vertex list is nonempty"))
}

fn multistart_alternating<T: Real>(
    m: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<BilinearMax<T>> {
    let mut best: Option<BilinearMax<T>> = None;
    let starts = cfg.multistarts.max(1);
    for start in 0..starts {
        let y0 = start_direction(y_space.dim(), cfg.seed, start as u64);
        if let Some(cand) = alternate_from(m, x_space, y_space, &y0)? {
            if best.as_ref().map_or(true, |b| cand.value > b.value) {
                best = Some(cand);
            }
        }
    }
    Ok(best.map_or_else(
        || BilinearMax {
            value: T::zero(),
            x: vec![T::zero(); x_space.dim()],
            y: vec![T::zero(); y_space.dim()],
            exact: false,
        },
        |mut b| {
            b.exact = false;
            b
        },
    ))
}

/// Gauss-Seidel alternating ascent; each half-step is an exact linear
/// maximization, so the value is nondecreasing and converges to a
/// bi-maximal pair.
pub fn alternate_from<T: Real>(
    m: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    y0: &[T],
) -> Result<Option<BilinearMax<T>>> {
    let mut y = y0.to_vec();
    let mut x = vec![T::zero(); x_space.dim()];
    let mut value = T::zero();
    let tol = real::<T>(1e-13);
    for _ in 0..64 {
        let cx = m.matvec(&y);
        let (nx, _) = flat_ball_argmax(x_space, &cx)?;
        x = nx;
        let cy = m.tr_matvec(&x);
        let (ny, v) = flat_ball_argmax(y_space, &cy)?;
        y = ny;
        if v <= value + tol * (T::one() + value.abs()) {
            value = value.max(v);
            break;
        }
        value = v;
    }
    if x.iter().all(|t| *t == T::zero()) {
        return Ok(None);
    }
    Ok(Some(BilinearMax {
        value,
        x,
        y,
        exact: false,
    }))
}

/// `sup { f^T n g : f in B_{X*}, g in B_{Y*} }` with `n` in plain
/// coordinates (functional coordinates on both sides).
pub fn dual_sup<T: Real>(
    n: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<BilinearMax<T>> {
    debug_assert_eq!(n.nrows(), x_space.dim());
    debug_assert_eq!(n.ncols(), y_space.dim());

    let dual_scaling = |s: &NormedSpace<T>| s.dual_space().and_then(|d| d.hilbert_scaling());
    if let (Some(sx), Some(sy)) = (dual_scaling(x_space), dual_scaling(y_space)) {
        return hilbert_sup(n, &sx, &sy);
    }
    if let Ok(verts) = x_space.dual_vertices(cfg.vertex_cap) {
        return scan_dual_vertices(n, &verts, y_space);
    }
    if let Ok(verts) = y_space.dual_vertices(cfg.vertex_cap) {
        let t = scan_dual_vertices(&n.transpose(), &verts, x_space)?;
        return Ok(BilinearMax {
            value: t.value,
            x: t.y,
            y: t.x,
            exact: true,
        });
    }
    dual_multistart(n, x_space, y_space, cfg)
}

/// Best response over `B_{Y*}` against a fixed flat functional-side vector:
/// `sup_g h^T g = || h ./ omega ||_Y`, attained at the norming functional.
fn dual_best_response<T: Real>(space: &NormedSpace<T>, h: &[T]) -> Result<(Vec<T>, T)> {
    let v: Vec<T> = h
        .iter()
        .enumerate()
        .map(|(i, hi)| *hi / space.pairing_weight(i))
        .collect();
    if v.iter().all(|t| *t == T::zero()) {
        return Ok((vec![T::zero(); space.dim()], T::zero()));
    }
    let value = space.norm_eval(&v)?;
    let f = space.norming_functional(&v)?;
    Ok((f.coords, value))
}

fn scan_dual_vertices<T: Real>(
    n: &Mat<T>,
    verts: &[Vec<T>],
    y_space: &NormedSpace<T>,
) -> Result<BilinearMax<T>> {
    let mut best: Option<BilinearMax<T>> = None;
    for f in verts {
        let h = n.tr_matvec(f);
        let (g, value) = dual_best_response(y_space, &h)?;
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(BilinearMax {
                value,
                x: f.clone(),
                y: g,
                exact: true,
            });
        }
    }
    Ok(best.expect("vertex list is nonempty"))
}

fn dual_multistart<T: Real>(
    n: &Mat<T>,
    x_space: &NormedSpace<T>,
    y_space: &NormedSpace<T>,
    cfg: &SolverConfig,
) -> Result<BilinearMax<T>> {
    let tol = real::<T>(1e-13);
    let mut best: Option<BilinearMax<T>> = None;
    for start in 0..cfg.multistarts.max(1) {
        let mut g = start_direction::<T>(y_space.dim(), cfg.seed ^ 0x5bd1, start as u64);
        let mut f = vec![T::zero(); x_space.dim()];
        let mut value = T::zero();
        for _ in 0..64 {
            let hf = n.matvec(&g);
            let (nf, _) = dual_best_response(x_space, &hf)?;
            f = nf;
            let hg = n.tr_matvec(&f);
            let (ng, v) = dual_best_response(y_space, &hg)?;
            g = ng;
            if v <= value + tol * (T::one() + value.abs()) {
                value = value.max(v);
                break;
            }
            value = v;
        }
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(BilinearMax {
                value,
                x: f,
                y: g,
                exact: false,
            });
        }
    }
    Ok(best.unwrap())
}

/// Deterministic per-start direction: uniform coordinates from a stream
/// derived from `(seed, start)`.
fn start_direction<T: Real>(dim: usize, seed: u64, start: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(start.wrapping_add(1)),
    );
    (0..dim)
        .map(|_| real::<T>(rng.gen_range(-1.0..=1.0)))
        .collect()
}
