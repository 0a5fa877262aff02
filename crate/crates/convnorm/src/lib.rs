//! Numerical (p, r)-norms and maximizers of convolution operators.
//!
//! The library computes operator norms of cyclic-convolution operators by a
//! nonlinear fixed-point iteration built from the improving operator
//! B = B_p^r B_r^p, evaluates the closed-form upper bounds (Riesz-Thorin,
//! Fourier, Hardy, Setterqvist) for the Laplace-transform constants, and
//! cross-validates everything against exact discrete oracles on Z/m, the
//! spectral formula at p = 2, and lemma-level concentration inequalities.

pub mod bounds;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod laplace;
pub mod oracle;
mod quad;

pub use error::{Error, Result};
pub use exponents::ExponentTriple;
pub use grid::{GridFunction, KernelSpec, SampledKernel};
pub use num_complex::Complex64;
