//! Photon production from a sudden change of refractive index inside a
//! dielectric sphere.
//!
//! The crate is organised bottom-up:
//!
//! * [`special_functions`]: half-integer Bessel/Neumann functions, the
//!   pseudo-Wronskian and its diagonal limit, large-order bounds.
//! * [`matching`]: static mode structure at the bubble wall (A, B, C, Ξ).
//! * [`kernel`]: the angular-momentum kernel `F(x, y)`, its diagonal `D(x)`,
//!   the factorized approximation and the step cutoff profiles.
//! * [`spectrum`]: `dN/dx`, total photon number and mean energy.
//! * [`oracles`]: independent identity checks used by the test suite and by
//!   the `check` command.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration with breakpoints.

pub mod error;
pub mod kernel;
pub mod matching;
pub mod oracles;
pub mod quadrature;
pub mod special_functions;
pub mod spectrum;

pub use error::{Error, Result};
pub use kernel::{AFactors, CutoffProfile, KernelValue, Truncation};
pub use matching::{MatchingCoefficients, MediumConfig};
pub use oracles::IdentityReport;
pub use quadrature::QuadratureSpec;
pub use special_functions::{BesselPair, ModeOrder};
pub use spectrum::{KernelMode, SpectrumResult};
