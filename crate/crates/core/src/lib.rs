//! Exact operator-valued monotone probability over matrix algebras.
//!
//! The base algebra is the algebra of `d x d` rational matrices. Random
//! vectors are described by their joint moment systems; the crate computes
//! mixed moments of monotone independent families, monotone cumulants, the
//! moment-cumulant formula, the composition algebra of multilinear series and
//! central limit moments, all with exact rational arithmetic.

pub mod clt;
pub mod cumulants;
pub mod error;
pub mod interp;
pub mod matrix;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod partitions;
pub mod random;
pub mod rational;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
pub use matrix::{BMatrix, Matrix, PolyMatrix};
pub use model::{BlockMatrix, MatrixModel};
pub use moments::{CumulantSystem, MomentSystem, Multilinear};
pub use rational::Rational;
