//! Zeta-regularized determinants of Laplace-type operators on finite
//! cylinders `[0, r] × Y`, separated into one-dimensional mode problems over
//! the spectrum of a tangential operator `B`, together with gluing checks in
//! the adiabatic limit and large-parameter asymptotics.

pub mod asymptotics;
pub mod cylinder;
pub mod error;
pub mod gluing;
pub mod modes;
pub mod scan;
pub mod special;
pub mod spectral;
pub mod sum;

pub use cylinder::{cylinder_logdet, gluing_residual, CylinderBc, RegScalar};
pub use error::{Error, Result};
pub use gluing::{adiabatic_bracket, q_logdet, CapOperator, DtnVariant};
pub use special::{ZetaScheme, ZetaValue};
pub use spectral::{EigenLine, ModelFile, SpectralInvariants, TangentialModel};
