//! Shared numerical substrate: radial grids and functions, quadrature,
//! symmetric tridiagonal eigensolvers, the radial Fourier transform and
//! scalar root finding.

mod fit;
mod function;
pub(crate) mod grid;
pub mod quadrature;
mod radial;
mod roots;
mod transform;
mod tridiag;

pub use fit::linear_fit;
pub use function::{Origin, RadialFunction};
pub use grid::{GridScheme, RadialGrid};
pub use radial::{radial_eigensolve, radial_operator, Eigenpair, RadialOperator};
pub use roots::{bisect_bracket, find_root_scalar};
pub use transform::{radial_fourier, radial_fourier_at_zero, FourierTransform, TAIL_THRESHOLD};
pub use tridiag::{Factorization, SymTridiagonal};

/// Default tolerances of the numerical substrate.
pub mod tol {
    pub const EIGEN_RESIDUAL: f64 = 1e-8;
    pub const QUADRATURE: f64 = 1e-10;
    pub const ROOT: f64 = 1e-12;
}
