//! Projective, injective, and nuclear tensor norms on finite-dimensional
//! Banach spaces.
//!
//! The crate computes `||z||_pi` by exact oracles where the geometry allows
//! (Hilbert factors via singular values, an `l_1` factor via row sums,
//! polyhedral pairs via linear programming) and by column generation with
//! dual certificates otherwise. On top of the solvers sit the attainment
//! tools: certification of a decomposition against a norm-one dual operator,
//! Caratheodory reduction to at most `dim(X) dim(Y) + 1` atoms, a
//! perturbation constructor that snaps near-attaining atoms onto the set
//! where the dual pairs to one, and norm-one projection builders feeding a
//! truncate-project-solve approximation pipeline.
//!
//! All numeric code is generic over the scalar (see [`scalar::Real`]);
//! the `f64` aliases below are the intended entry points.

pub mod attain;
pub mod banach;
pub mod config;
pub mod error;
pub mod linalg;
pub mod pi_property;
pub mod projnorm;
pub mod scalar;
pub mod tensor;

mod bilinear;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` concrete aliases; the CLI and most tests work with these.
pub type Space64 = banach::NormedSpace<f64>;
pub type Exponent64 = banach::Exponent<f64>;
pub type Functional64 = banach::Functional<f64>;
pub type Tensor64 = tensor::Tensor<f64>;
pub type Decomposition64 = tensor::Decomposition<f64>;
pub type DualOperator64 = tensor::DualOperator<f64>;
pub type ProjNormResult64 = projnorm::ProjNormResult<f64>;
pub type OpNormResult64 = projnorm::OpNormResult<f64>;
pub type Certificate64 = attain::Certificate<f64>;
pub type Projection64 = pi_property::Projection<f64>;
pub type SeriesTensor64 = pi_property::SeriesTensor<f64>;
