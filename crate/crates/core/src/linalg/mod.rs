//! Eigensolvers: implicit-QL for symmetric tridiagonal matrices, banded
//! storage with Cholesky and inertia counting, and shift-invert Lanczos.

mod banded;
mod lanczos;
mod tridiag;

pub use banded::{BandCholesky, BandedSym};
pub use lanczos::{lowest_eigenpairs, Eigenpairs, LanczosOptions};
pub use tridiag::tridiagonal_eigen;

