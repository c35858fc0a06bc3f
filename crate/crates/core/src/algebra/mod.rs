//! Exact scalar, polynomial and linear-algebra kernels over `Q` and `GF(p)`.

mod field;
mod matrix;
mod poly;
mod subspace;

pub use field::{is_prime, Field, Prime, Scalar};
pub use matrix::{Eigenspace, Eigenspaces, Matrix, Rref};
pub use poly::{Poly, RootSet};
pub use subspace::{MatrixSubspace, Subspace};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^32")]
    ModulusTooLarge(u64),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree {degree} is not below the characteristic {characteristic}")]
    DegreeVsCharacteristic { degree: usize, characteristic: u64 },
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged matrix rows")]
    Ragged,
    #[error("field mismatch")]
    FieldMismatch,
}
