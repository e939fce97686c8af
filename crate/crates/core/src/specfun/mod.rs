//! Special functions and quadrature.
//!
//! Incomplete Beta convention: `B(z; p, q) = ∫₀^z t^{p−1} (1−t)^{q−1} dt`,
//! unnormalized, with the upper limit first. The hypergeometric function is
//! written `₂F₁(a, b; c; z)` with the argument last, so the two argument
//! orders deliberately differ.

mod gamma;
mod hypergeometric;
mod quadrature;

pub use gamma::{beta, gamma, ln_gamma, rgamma};
pub(crate) use hypergeometric::incomplete_beta_split;
pub use hypergeometric::{hyp2f1, incomplete_beta};
pub use quadrature::{adaptive_quad, QuadratureConfig};
