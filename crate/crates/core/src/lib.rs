//! Exact noncrossing-partition calculus, Weingarten integration over the
//! free quantum groups O⁺, S⁺, H⁺, B⁺, and operator-valued free cumulants
//! over a matrix base algebra.

pub mod algebra;
pub mod cumulants;
pub mod error;
pub mod infdiv;
pub mod invariance;
pub mod linalg;
pub mod matrix_models;
pub mod mobius;
pub mod partitions;
pub mod rational;
pub mod transforms;
pub mod verify;
pub mod weingarten;

pub use algebra::{BElem, BaseAlgebra};
pub use cumulants::{DistributionSpec, MomentSpec};
pub use error::{Error, Result};
pub use partitions::{enumerate, PartitionFamily, SetPartition};
pub use rational::Q;
