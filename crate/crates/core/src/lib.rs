//! Numerical toolkit for the screening function of the neutral Thomas-Fermi atom.
//!
//! The crate contains a high-accuracy reference solver for
//! `χ'' = χ^{3/2} / √x`, the Baker and Coulson-March series, three closed-form
//! approximants (Sommerfeld, Müller-1, Müller-2), their variational actions and
//! the fitting machinery that fixes their parameters.
//!
//! Everything is expressed in Thomas-Fermi units; see [`analysis::physical_scales`]
//! for the conversion to atomic units.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod expansions;
pub mod format;
pub mod models;
pub mod ode;
pub mod reference;
pub mod roots;
pub mod specfun;
pub mod variational;

pub use analysis::{ErrorReport, Mueller1Mode, PhysicalScales, RelErrorBound};
pub use error::{Error, Result};
pub use expansions::{BakerCoefficients, CoulsonMarchParams};
pub use models::{ModelParams, Mueller1Params, Mueller2Params, ScreeningModel, SommerfeldParams};
pub use reference::{ReferenceSolution, ShootingOutcome, SlopeClass, SolutionTable};
pub use specfun::QuadratureConfig;
pub use variational::{ActionBreakdown, FitResult};

/// Initial slope of the neutral-atom screening function as usually quoted
/// (six decimals). The solver recomputes it; this value is only used for
/// defaults and cross-checks.
pub const NEUTRAL_SLOPE: f64 = 1.588072;
