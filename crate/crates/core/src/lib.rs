//! Numerical machinery for the fractional single-phase-lag (SPL) heat equation
//!
//! ```text
//! ρ c τ_q^α D^α ∂_t u + a τ_q^α D^α u + ρ c ∂_t u + a u − ∇·(k ∇u) = F
//! ```
//!
//! with homogeneous Dirichlet data, where `D^α` is the Caputo derivative of
//! order `α ∈ (0,1)`. Two independent solution routes are provided:
//!
//! * [`spectral`]: the explicit 1D Fourier solution whose time factors are
//!   multinomial Mittag-Leffler functions ([`mittag`]).
//! * [`rothe`]: backward-Euler (Rothe) time stepping with discrete fractional
//!   convolutions ([`fracops`]) and P1 finite elements in space.
//!
//! [`crossval`] compares the two, [`verify`] runs the property suites.

pub mod crossval;
pub mod dd;
pub mod error;
pub mod fracops;
pub mod gamma;
pub mod mittag;
pub mod params;
pub mod rothe;
pub mod scenario;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use fracops::{KernelSamples, SampledPath, TimeGrid};
pub use mittag::{MlEvaluation, MlMethod, MlQuery, SeriesControl, SplCoefficients};
pub use params::ModelParams;
pub use rothe::{EstimateLedger, FemSystem, Mesh1D, RotheRun};
pub use spectral::{SpectralConfig, SpectralModel, SpectralSolution};
