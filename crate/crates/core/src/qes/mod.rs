//! Quasi-exact solvability: exact closure of the transformed operators on
//! finite elliptic-monomial spaces, and the resulting small eigenproblems.

pub mod closure;
pub mod eigen;
pub mod monomial;
pub mod operator;

pub use closure::{closure_at, detect_closure, find_closures, Family, QesEigenproblem};
pub use eigen::{eigen_coefficients, qes_energies, residual, wavefunction, wavefunction_at, Prefactor, Wavefunction};
pub use monomial::{combination, poly_in_s, EllipticCombination, EllipticMonomial, Sector};
pub use operator::{apply_operator, LinearOp, OperatorImage, OperatorKind, OperatorSpec};
