//! Born-approximation scattering cross sections for a rigid two-atom rotor
//! moving in the plane and scattering from potentials made of several
//! radial peaks (two-slit analogues and gratings).
//!
//! Units are natural throughout: ħ = 1, lengths and masses in whatever
//! common scale the caller picks. The interesting quantities are the
//! dimensionless groups kα, kΔ and kd.
//!
//! Module map:
//!
//! * [`specfun`] integer-order Bessel functions of the first kind.
//! * [`model`] domain types and configuration validation.
//! * [`kinematics`] rotational channels, outgoing wavenumbers, momentum transfer.
//! * [`potentials`] analytic form factors and grating structure factors.
//! * [`born`] the cross-section engines, general and closed-form.
//! * [`oracle`] brute-force quadrature used to check the closed forms.
//! * [`analysis`] fringe visibility, peak spacing and suppression ratios.
//! * [`validate`] the self-check suite behind `rotor-scatter validate`.

pub mod analysis;
pub mod born;
mod error;
pub mod kinematics;
pub mod model;
pub mod oracle;
pub mod potentials;
pub mod specfun;
mod sum;
pub mod validate;

pub use error::Error;
pub use model::{
    CrossSectionProfile, EngineVariant, IncidentBeam, Molecule, Peak, PeakShape, PeakVariant,
    PotentialSpec, ProfileMetadata, ScatteringGeometry,
};
pub use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;
