//! Random lacunary subsets of polynomial-growth integer sequences.
//!
//! The crate builds finite truncations of integer sequences (polynomial
//! sequences, primes, geometric sequences and their sumsets), cuts them along
//! dyadic or gross annular partitions, draws random subsets with independent
//! Bernoulli selectors, and certifies two properties of the result at desk
//! scale:
//!
//! * **s-independence**: no relation `ζ_1 q_1 + … + ζ_m q_m = 0` with
//!   `Σζ_i = 0`, `Σ|ζ_i| ≤ 2s` holds over distinct elements `q_i`;
//! * **Weyl equidistribution**: the successive means
//!   `f_k(t) = (1/k) Σ_{j≤k} e^{2πi n_j θ}` decay away from rational
//!   obstructions.
//!
//! Density schedules and summing-matrix checks are generic over [`Scalar`], so
//! the same code runs in `f64`, `f32` or exact rationals.

pub mod equidistribution;
pub mod error;
pub mod integer_sets;
pub mod numeric;
pub mod partitions;
pub mod random_selection;
pub mod relations;
pub mod rng;
pub mod scalar;
mod serde_decimal;
pub mod stats;

pub use error::{Error, Result};
pub use integer_sets::{GrowthReport, IntegerSet};
pub use partitions::{BlockDecomposition, Partition, PartitionKind};
pub use relations::{IndependenceReport, Relation, RelationSet};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Density schedule with `f64` densities; the default for simulations.
pub type Schedule = random_selection::DensitySchedule<f64>;
/// Density schedule in exact rational arithmetic.
pub type ExactSchedule = random_selection::DensitySchedule<Rational>;
/// Summing-matrix report in `f64`.
pub type SummingReport = equidistribution::SummingMatrixReport<f64>;
/// Summing-matrix report in exact rational arithmetic.
pub type ExactSummingReport = equidistribution::SummingMatrixReport<Rational>;
