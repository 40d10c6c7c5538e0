//! Domain types shared by every engine, plus configuration validation.

mod config;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    validate_config, validate_document, AmplitudeDoc, BeamDoc, ConfigDocument, ConfigErrors,
    EngineDoc, FieldError, GratingDoc, MoleculeDoc, PeakDoc, PotentialDoc, ScanDescription,
    ScanDoc, ShapeDoc, ThetaDoc, ThetaGrid, ValidatedConfig,
};

/// Tolerance on `Σ|ψ_l|² = 1` for a constructed beam.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{field}: {message}")]
pub struct ModelError {
    pub field: String,
    pub message: String,
}

impl ModelError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

/// Two atoms of mass `m` held a distance `2α` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    atom_mass: f64,
    half_separation: f64,
    moment_of_inertia: f64,
}

impl Molecule {
    pub fn new(atom_mass: f64, half_separation: f64) -> Result<Self, ModelError> {
        if !atom_mass.is_finite() || atom_mass <= 0.0 {
            return Err(ModelError::new("atom_mass", "atom_mass must be finite and > 0"));
        }
        if !half_separation.is_finite() {
            return Err(ModelError::new("half_separation", "half_separation must be finite"));
        }
        if half_separation < 0.0 {
            return Err(ModelError::new("half_separation", "half_separation must be ≥ 0"));
        }
        Ok(Self {
            atom_mass,
            half_separation,
            moment_of_inertia: 2.0 * atom_mass * half_separation * half_separation,
        })
    }

    pub fn atom_mass(&self) -> f64 {
        self.atom_mass
    }

    pub fn half_separation(&self) -> f64 {
        self.half_separation
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.moment_of_inertia
    }

    /// Mass of the whole molecule, `2m`.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.atom_mass
    }
}

/// Plane wave along +y with internal amplitudes `ψ_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidentBeam {
    wavenumber: f64,
    amplitudes: BTreeMap<i32, Complex64>,
}

impl IncidentBeam {
    /// Zero amplitudes are dropped; the rest must have unit norm within
    /// [`NORM_TOLERANCE`].
    pub fn new(
        wavenumber: f64,
        amplitudes: impl IntoIterator<Item = (i32, Complex64)>,
    ) -> Result<Self, ModelError> {
        check_wavenumber(wavenumber)?;
        let mut map = BTreeMap::new();
        for (l, psi) in amplitudes {
            if !psi.re.is_finite() || !psi.im.is_finite() {
                return Err(ModelError::new(
                    "amplitudes",
                    format!("amplitude for l={l} is not finite"),
                ));
            }
            if map.insert(l, psi).is_some() {
                return Err(ModelError::new(
                    "amplitudes",
                    format!("duplicate amplitude for l={l}"),
                ));
            }
        }
        map.retain(|_, psi| psi.norm_sqr() > 0.0);
        if map.is_empty() {
            return Err(ModelError::new(
                "amplitudes",
                "at least one nonzero amplitude is required",
            ));
        }
        let norm: f64 = map.values().map(|p| p.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(ModelError::new(
                "amplitudes",
                format!("amplitudes must have unit norm, got Σ|ψ|² = {norm}"),
            ));
        }
        Ok(Self { wavenumber, amplitudes: map })
    }

    /// The non-rotating state `l = 0`.
    pub fn ground_state(wavenumber: f64) -> Result<Self, ModelError> {
        Self::new(wavenumber, [(0, Complex64::new(1.0, 0.0))])
    }

    pub fn with_wavenumber(&self, wavenumber: f64) -> Result<Self, ModelError> {
        check_wavenumber(wavenumber)?;
        Ok(Self { wavenumber, amplitudes: self.amplitudes.clone() })
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn amplitudes(&self) -> &BTreeMap<i32, Complex64> {
        &self.amplitudes
    }

    /// `|ψ_l|²`, zero for absent states.
    pub fn weight(&self, l: i32) -> f64 {
        self.amplitudes.get(&l).map_or(0.0, |p| p.norm_sqr())
    }

    /// True when the beam is the pure state `l`.
    pub fn is_pure(&self, l: i32) -> bool {
        self.amplitudes.len() == 1 && self.amplitudes.contains_key(&l)
    }
}

fn check_wavenumber(k: f64) -> Result<(), ModelError> {
    if !k.is_finite() || k <= 0.0 {
        return Err(ModelError::new("wavenumber", "wavenumber must be finite and > 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakVariant {
    /// `V0 exp(-r²/Δ²)`
    Gaussian,
    /// `V0 (1 - r²/Δ²) exp(-r²/Δ²)`
    PolynomialGaussian,
}

impl PeakVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PeakVariant::Gaussian => "gaussian",
            PeakVariant::PolynomialGaussian => "polynomial_gaussian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(PeakVariant::Gaussian),
            "polynomial_gaussian" => Some(PeakVariant::PolynomialGaussian),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakShape {
    variant: PeakVariant,
    strength: f64,
    width: f64,
}

impl PeakShape {
    pub fn new(variant: PeakVariant, strength: f64, width: f64) -> Result<Self, ModelError> {
        if !strength.is_finite() {
            return Err(ModelError::new("strength", "strength must be finite"));
        }
        if !width.is_finite() || width <= 0.0 {
            return Err(ModelError::new("width", "width must be finite and > 0"));
        }
        Ok(Self { variant, strength, width })
    }

    pub fn gaussian(strength: f64, width: f64) -> Result<Self, ModelError> {
        Self::new(PeakVariant::Gaussian, strength, width)
    }

    pub fn polynomial_gaussian(strength: f64, width: f64) -> Result<Self, ModelError> {
        Self::new(PeakVariant::PolynomialGaussian, strength, width)
    }

    pub fn variant(&self) -> PeakVariant {
        self.variant
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Same shape with the strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { strength: self.strength * factor, ..*self }
    }

    /// Potential value at distance `r` from the peak center.
    pub fn value(&self, r: f64) -> f64 {
        let s = (r / self.width) * (r / self.width);
        let envelope = self.strength * (-s).exp();
        match self.variant {
            PeakVariant::Gaussian => envelope,
            PeakVariant::PolynomialGaussian => (1.0 - s) * envelope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center_x: f64,
    pub shape: PeakShape,
}

/// A potential built from radial peaks centered on the x axis.
///
/// Peaks are stored sorted by center (then shape), so every sum over them
/// runs in the same order regardless of how the list was supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    peaks: Vec<Peak>,
}

impl PotentialSpec {
    pub fn new(mut peaks: Vec<Peak>) -> Result<Self, ModelError> {
        if peaks.is_empty() {
            return Err(ModelError::new("peaks", "potential needs at least one peak"));
        }
        if let Some(p) = peaks.iter().find(|p| !p.center_x.is_finite()) {
            return Err(ModelError::new(
                "peaks",
                format!("peak center {} is not finite", p.center_x),
            ));
        }
        peaks.sort_by(|a, b| {
            a.center_x
                .total_cmp(&b.center_x)
                .then(a.shape.variant.cmp(&b.shape.variant))
                .then(a.shape.strength.total_cmp(&b.shape.strength))
                .then(a.shape.width.total_cmp(&b.shape.width))
        });
        Ok(Self { peaks })
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// Every peak strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            peaks: self
                .peaks
                .iter()
                .map(|p| Peak { center_x: p.center_x, shape: p.shape.scaled(factor) })
                .collect(),
        }
    }

    /// True when the set of centers maps onto itself under x → -x.
    pub fn has_mirror_symmetric_centers(&self) -> bool {
        let n = self.peaks.len();
        (0..n).all(|i| self.peaks[i].center_x == -self.peaks[n - 1 - i].center_x)
    }
}

/// Kinematics of one (θ, κ) evaluation point. `q = k ŷ - κ û`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringGeometry {
    pub theta: f64,
    pub kappa: f64,
    pub q_x: f64,
    pub q_y: f64,
    pub q_mag: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineVariant {
    /// Channel-summed Born cross section for the rotor.
    General,
    /// Point particle of mass 2m in twice the potential.
    Structureless,
    ClosedTwoGaussian,
    ClosedGrating,
    ClosedMixed,
    ClosedStructurelessTwoGaussian,
    ClosedStructurelessGrating,
    ClosedStructurelessMixed,
}

impl EngineVariant {
    pub const ALL: [EngineVariant; 8] = [
        EngineVariant::General,
        EngineVariant::Structureless,
        EngineVariant::ClosedTwoGaussian,
        EngineVariant::ClosedGrating,
        EngineVariant::ClosedMixed,
        EngineVariant::ClosedStructurelessTwoGaussian,
        EngineVariant::ClosedStructurelessGrating,
        EngineVariant::ClosedStructurelessMixed,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EngineVariant::General => "general",
            EngineVariant::Structureless => "structureless",
            EngineVariant::ClosedTwoGaussian => "closed_two_gaussian",
            EngineVariant::ClosedGrating => "closed_grating",
            EngineVariant::ClosedMixed => "closed_mixed",
            EngineVariant::ClosedStructurelessTwoGaussian => "closed_structureless_two_gaussian",
            EngineVariant::ClosedStructurelessGrating => "closed_structureless_grating",
            EngineVariant::ClosedStructurelessMixed => "closed_structureless_mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, EngineVariant::General | EngineVariant::Structureless)
    }

    pub fn has_internal_structure(&self) -> bool {
        matches!(
            self,
            EngineVariant::General
                | EngineVariant::ClosedTwoGaussian
                | EngineVariant::ClosedGrating
                | EngineVariant::ClosedMixed
        )
    }

    /// The without-internal-structure counterpart used in comparisons.
    pub fn structureless_partner(&self) -> EngineVariant {
        match self {
            EngineVariant::General | EngineVariant::Structureless => EngineVariant::Structureless,
            EngineVariant::ClosedTwoGaussian | EngineVariant::ClosedStructurelessTwoGaussian => {
                EngineVariant::ClosedStructurelessTwoGaussian
            }
            EngineVariant::ClosedGrating | EngineVariant::ClosedStructurelessGrating => {
                EngineVariant::ClosedStructurelessGrating
            }
            EngineVariant::ClosedMixed | EngineVariant::ClosedStructurelessMixed => {
                EngineVariant::ClosedStructurelessMixed
            }
        }
    }
}

impl fmt::Display for EngineVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inputs a profile was computed from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub engine: Option<EngineVariant>,
    pub molecule: Option<Molecule>,
    pub beam: Option<IncidentBeam>,
    pub potential: Option<PotentialSpec>,
}

/// `σ(θ)` sampled on a strictly ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionProfile {
    thetas: Vec<f64>,
    sigma: Vec<f64>,
    per_channel: Option<BTreeMap<(i32, i32), Vec<f64>>>,
    metadata: ProfileMetadata,
}

impl CrossSectionProfile {
    pub fn new(
        thetas: Vec<f64>,
        sigma: Vec<f64>,
        per_channel: Option<BTreeMap<(i32, i32), Vec<f64>>>,
        metadata: ProfileMetadata,
    ) -> Result<Self, ModelError> {
        if thetas.len() != sigma.len() {
            return Err(ModelError::new(
                "sigma",
                format!("{} thetas but {} sigma values", thetas.len(), sigma.len()),
            ));
        }
        if thetas.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(ModelError::new("thetas", "theta grid must be strictly ascending"));
        }
        if let Some(bad) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(ModelError::new(
                "sigma",
                format!("cross section {bad} is negative or not finite"),
            ));
        }
        if let Some(channels) = &per_channel {
            if channels.values().any(|c| c.len() != thetas.len()) {
                return Err(ModelError::new(
                    "per_channel",
                    "channel series length differs from grid",
                ));
            }
        }
        Ok(Self { thetas, sigma, per_channel, metadata })
    }

    /// Bare samples with no provenance, e.g. synthetic test profiles.
    pub fn from_samples(thetas: Vec<f64>, sigma: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(thetas, sigma, None, ProfileMetadata::default())
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn per_channel(&self) -> Option<&BTreeMap<(i32, i32), Vec<f64>>> {
        self.per_channel.as_ref()
    }

    pub fn metadata(&self) -> &ProfileMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}
