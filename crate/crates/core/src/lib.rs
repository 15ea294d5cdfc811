//! Sparse subdivision bifiltration: a linear-size approximation of the
//! multicover bifiltration of a finite point set.
//!
//! The pipeline is
//!
//! 1. [`geometry`]: load a point cloud (l2 or l∞) or a finite metric;
//! 2. [`greedy`]: greedy permutation, insertion radii and covering sequences;
//! 3. [`sparseballs`]: sparse-ball radius functions and covering weights;
//! 4. [`lpsolver`]: first-intersection scales of sparse balls through an
//!    LP-type solver for `min s  s.t. |p_i - z|^2 <= alpha_i s + beta_i`;
//! 5. [`bifiltration`]: poset elements, order-complex chains and their
//!    multicritical grades, plus the text output format.
//!
//! [`oracle`] holds brute-force reference implementations used to verify
//! the construction on small inputs.
//!
//! All numerical code is generic over a [`Real`] scalar (`f64` or `f32`);
//! the aliases at the crate root fix the scalar to `f64`.

pub mod bifiltration;
pub mod error;
pub mod geometry;
pub mod greedy;
pub mod lpsolver;
pub mod oracle;
mod scalar;
pub mod sparseballs;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bifiltration::{BuildOptions, Grade, SizeReport};
pub use geometry::{MetricKind, Norm, TableFormat};
pub use sparseballs::RadiusVariant;

/// Point set with `f64` coordinates.
pub type PointSet = geometry::PointSet<f64>;
/// Persistent net over `f64` distances.
pub type PersistentNet = greedy::PersistentNet<f64>;
/// Sparse-ball system over `f64`.
pub type SparseBallSystem = sparseballs::SparseBallSystem<f64>;
/// Covering-weight staircase over `f64` scales.
pub type WeightStaircase = sparseballs::WeightStaircase<f64>;
/// Problem (M) constraint over `f64`.
pub type Constraint = lpsolver::Constraint<f64>;
/// Poset element over `f64` scales.
pub type PosetElement = bifiltration::PosetElement<f64>;
/// Order-complex simplex over `f64` scales.
pub type ChainSimplex = bifiltration::ChainSimplex<f64>;
/// Full build result over `f64`.
pub type Bifiltration = bifiltration::Bifiltration<f64>;

/// Single-precision variants.
pub mod f32 {
    pub type PointSet = crate::geometry::PointSet<f32>;
    pub type PersistentNet = crate::greedy::PersistentNet<f32>;
    pub type SparseBallSystem = crate::sparseballs::SparseBallSystem<f32>;
    pub type Constraint = crate::lpsolver::Constraint<f32>;
}
