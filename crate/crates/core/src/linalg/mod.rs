//! Small self-contained numerical kernels, generic over [`Real`](crate::Real).

mod cholesky;
mod eigen;
mod quadrature;
mod sparse;

pub use cholesky::EnvelopeCholesky;
pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use quadrature::{gauss_legendre, integrate, maximize, QUADRATURE_TOLERANCE};
pub use sparse::{expmv, lanczos_smallest, SparseSymmetric};
