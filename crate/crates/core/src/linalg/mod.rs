//! Small dense linear algebra, generic over the scalar type.

mod decomp;
mod eigen;
mod expm;
mod matrix;
mod subspace;
mod sym_eigen;

pub use decomp::{cholesky, det, inverse, orthonormal_columns, orthonormalize, Lu};
pub use eigen::{eigenvalues, Eigenvalue};
pub use expm::expm;
pub use matrix::{add, axpy, check_dim, dot, norm, normalized, scaled, sub, unit, Matrix};
pub use subspace::{angle_to_subspace, gap, principal_angles, span_basis};
pub use sym_eigen::{min_eigenvalue, sym_eigen, SymEigen};
