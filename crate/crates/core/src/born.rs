//! Born-approximation cross sections.
//!
//! Three kinds of engine live here:
//!
//! * the general channel sum for a rotor in any superposition of `l` states,
//! * the structureless reference (a point particle scattering off the same
//!   potential), and
//! * closed forms for the three potential families the model is built
//!   around: two equal Gaussians at `±d`, a `2N+1` Gaussian grating, and a
//!   polynomial-Gaussian at `+d` paired with a Gaussian at `-d`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::kinematics::{geometry, open_channels};
use crate::model::{
    CrossSectionProfile, EngineVariant, IncidentBeam, ModelError, Molecule, PeakVariant,
    PotentialSpec, ProfileMetadata,
};
use crate::potentials::{dirichlet_amplitude, ft_total};
use crate::specfun::{bessel_j, SpecFunError};
use crate::sum::NeumaierSum;

/// Relative tolerance used when recognising a closed-form potential family.
const SHAPE_MATCH: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BornError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("engine {variant} cannot be used here: {reason}")]
    UnsupportedVariant { variant: EngineVariant, reason: String },
    #[error("cross section is not finite at theta = {theta}")]
    NonFinite { theta: f64 },
}

/// Rotor matrix element of the potential between `l_in` and `l_out`.
///
/// `(1/2π) e^{-iΔl μ} [1 + (-1)^Δl] J_Δl(α|q|) Ṽ(q)` with `Δl = l_in - l_out`.
pub fn matrix_element(
    spec: &PotentialSpec,
    molecule: &Molecule,
    k: f64,
    theta: f64,
    l_in: i32,
    l_out: i32,
    kappa: f64,
) -> Result<Complex64, BornError> {
    let dl = l_in as i64 - l_out as i64;
    if dl % 2 != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = geometry(k, kappa, theta);
    let order = i32::try_from(dl).map_err(|_| SpecFunError::OrderTooLarge(dl))?;
    let bessel = bessel_j(order, molecule.half_separation() * g.q_mag)?;
    let phase = Complex64::from_polar(1.0, -(dl as f64) * g.mu);
    Ok(phase * ft_total(spec, g.q_x, g.q_y) * (2.0 * bessel / TAU))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelContribution {
    pub l_in: i32,
    pub l_out: i32,
    pub sigma: f64,
}

/// `σ(θ)` with its channel-by-channel breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub sigma: f64,
    /// Every open channel in `(l_in, l_out)` order, parity-forbidden ones
    /// included with exactly zero.
    pub channels: Vec<ChannelContribution>,
}

/// `σ(θ) = (2π)³ (4m²/k) Σ |ψ_l|² |M_{l l'}|²` over open channels.
pub fn cross_section_general(
    theta: f64,
    molecule: &Molecule,
    beam: &IncidentBeam,
    spec: &PotentialSpec,
) -> Result<CrossSection, BornError> {
    let k = beam.wavenumber();
    let m = molecule.atom_mass();
    let prefactor = TAU.powi(3) * 4.0 * m * m / k;
    let mut total = NeumaierSum::default();
    let mut channels = Vec::new();
    for ch in open_channels(beam, molecule, false) {
        let sigma = if ch.is_parity_allowed() {
            let me = matrix_element(spec, molecule, k, theta, ch.l_in, ch.l_out, ch.kappa)?;
            prefactor * ch.weight * me.norm_sqr()
        } else {
            0.0
        };
        total.add(sigma);
        channels.push(ChannelContribution { l_in: ch.l_in, l_out: ch.l_out, sigma });
    }
    Ok(CrossSection { sigma: total.value(), channels })
}

/// `σ(θ) = 2π M²/k |Ṽ(k ŷ - k û)|²` for a point particle of mass `M`.
///
/// The rotor comparison uses `M = 2m` and a doubled potential; see
/// [`structureless_reference`].
pub fn cross_section_structureless(theta: f64, mass: f64, k: f64, spec: &PotentialSpec) -> f64 {
    let g = geometry(k, k, theta);
    TAU * mass * mass / k * ft_total(spec, g.q_x, g.q_y).norm_sqr()
}

/// Mass and potential of the point particle a rotor is compared against:
/// both atoms' mass, and the potential acting on both atoms.
pub fn structureless_reference(molecule: &Molecule, spec: &PotentialSpec) -> (f64, PotentialSpec) {
    (molecule.total_mass(), spec.scaled(2.0))
}

/// Parameters of the closed-form cross sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParams {
    /// Atom mass `m`.
    pub m: f64,
    pub v0: f64,
    pub delta: f64,
    /// Half the pair separation, or the grating spacing.
    pub d: f64,
    /// Grating half-count; unused by the two-peak forms.
    pub n: u32,
    pub alpha: f64,
    pub k: f64,
    /// Initial rotor state; the closed forms only cover `l = 0`.
    pub initial_l: i32,
}

impl ClosedFormParams {
    /// Reads the closed-form parameters off a model, checking that the
    /// potential belongs to the family `variant` describes.
    pub fn from_model(
        variant: EngineVariant,
        molecule: &Molecule,
        beam: &IncidentBeam,
        spec: &PotentialSpec,
    ) -> Result<Self, BornError> {
        let unsupported =
            |reason: &str| BornError::UnsupportedVariant { variant, reason: reason.to_string() };
        let initial_l = match beam.amplitudes().keys().collect::<Vec<_>>()[..] {
            [&l] => l,
            _ => return Err(unsupported("closed forms need a beam in a single l state")),
        };
        let peaks = spec.peaks();
        let base = Self {
            m: molecule.atom_mass(),
            v0: 0.0,
            delta: 0.0,
            d: 0.0,
            n: 0,
            alpha: molecule.half_separation(),
            k: beam.wavenumber(),
            initial_l,
        };
        let all_gaussian = peaks.iter().all(|p| p.shape.variant() == PeakVariant::Gaussian);
        let same_strength_width = peaks.iter().all(|p| {
            close(p.shape.strength(), peaks[0].shape.strength())
                && close(p.shape.width(), peaks[0].shape.width())
        });
        match variant {
            EngineVariant::ClosedTwoGaussian | EngineVariant::ClosedStructurelessTwoGaussian => {
                let [a, b] = peaks else {
                    return Err(unsupported("potential must be two Gaussian peaks"));
                };
                if !all_gaussian || !same_strength_width || !close(a.center_x, -b.center_x) {
                    return Err(unsupported("potential must be two equal Gaussians at ±d"));
                }
                Ok(Self { v0: a.shape.strength(), delta: a.shape.width(), d: b.center_x, ..base })
            }
            EngineVariant::ClosedGrating | EngineVariant::ClosedStructurelessGrating => {
                if peaks.len().is_multiple_of(2) || !all_gaussian || !same_strength_width {
                    return Err(unsupported("potential must be 2N+1 equal Gaussians"));
                }
                let n = peaks.len() / 2;
                let d = if n == 0 { 0.0 } else { peaks[2 * n].center_x / n as f64 };
                let evenly_spaced = peaks
                    .iter()
                    .enumerate()
                    .all(|(j, p)| close_abs(p.center_x, (j as f64 - n as f64) * d, d));
                if !evenly_spaced || (n > 0 && d <= 0.0) {
                    return Err(unsupported("grating peaks must sit at n·d for n = -N..N"));
                }
                let n = u32::try_from(n).map_err(|_| unsupported("grating too large"))?;
                Ok(Self {
                    v0: peaks[0].shape.strength(),
                    delta: peaks[0].shape.width(),
                    d,
                    n,
                    ..base
                })
            }
            EngineVariant::ClosedMixed | EngineVariant::ClosedStructurelessMixed => {
                let [g, p] = peaks else {
                    return Err(unsupported(
                        "potential must be a Gaussian and a polynomial-Gaussian",
                    ));
                };
                let shaped = g.shape.variant() == PeakVariant::Gaussian
                    && p.shape.variant() == PeakVariant::PolynomialGaussian;
                if !shaped
                    || !same_strength_width
                    || !close(g.center_x, -p.center_x)
                    || p.center_x < 0.0
                {
                    return Err(unsupported(
                        "potential must be a polynomial-Gaussian at +d and an equal Gaussian at -d",
                    ));
                }
                Ok(Self { v0: g.shape.strength(), delta: g.shape.width(), d: p.center_x, ..base })
            }
            EngineVariant::General | EngineVariant::Structureless => {
                Err(unsupported("not a closed-form variant"))
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SHAPE_MATCH * a.abs().max(b.abs())
}

fn close_abs(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= SHAPE_MATCH * scale.abs().max(a.abs())
}

/// Closed-form cross section for one of the three potential families.
///
/// The internal-structure forms sum over outgoing `l'` with the open-channel
/// condition `κ² > 0` enforced, using each channel's own `κ` in `|q|` and in
/// the interference phase.
pub fn cross_section_closed(
    variant: EngineVariant,
    theta: f64,
    params: &ClosedFormParams,
) -> Result<f64, BornError> {
    let ClosedFormParams { m, v0, delta, d, n, k, initial_l, .. } = *params;
    if variant.has_internal_structure() && initial_l != 0 {
        return Err(BornError::UnsupportedVariant {
            variant,
            reason: format!(
                "closed forms assume l = 0, got l = {initial_l}; use the general engine"
            ),
        });
    }
    let scale = m * m * delta.powi(4) * v0 * v0 / k;
    let sin_t = theta.sin();
    match variant {
        EngineVariant::ClosedTwoGaussian => {
            let sum = channel_sum(params, theta, |kappa, qd| {
                (-0.5 * qd * qd).exp() * (kappa * sin_t * d).cos().powi(2)
            })?;
            Ok(8.0 * PI * scale * sum)
        }
        EngineVariant::ClosedGrating => {
            let sum = channel_sum(params, theta, |kappa, qd| {
                (-0.5 * qd * qd).exp() * dirichlet_amplitude(kappa * sin_t * d, n).powi(2)
            })?;
            Ok(2.0 * PI * scale * sum)
        }
        EngineVariant::ClosedMixed => {
            let sum = channel_sum(params, theta, |kappa, qd| {
                (-0.5 * qd * qd).exp() * mixed_bracket(qd, kappa * sin_t * d)
            })?;
            Ok(2.0 * PI * scale * sum)
        }
        EngineVariant::ClosedStructurelessTwoGaussian => {
            let envelope = (-(k * delta).powi(2) * (1.0 - theta.cos())).exp();
            Ok(32.0 * PI * scale * envelope * (k * sin_t * d).cos().powi(2))
        }
        EngineVariant::ClosedStructurelessGrating => {
            let envelope = (-(k * delta).powi(2) * (1.0 - theta.cos())).exp();
            Ok(8.0 * PI * scale * envelope * dirichlet_amplitude(k * sin_t * d, n).powi(2))
        }
        EngineVariant::ClosedStructurelessMixed => {
            let qd = geometry(k, k, theta).q_mag * delta;
            let envelope = (-0.5 * qd * qd).exp();
            Ok(8.0 * PI * scale * envelope * mixed_bracket(qd, k * sin_t * d))
        }
        EngineVariant::General | EngineVariant::Structureless => {
            Err(BornError::UnsupportedVariant {
                variant,
                reason: "not a closed-form variant".into(),
            })
        }
    }
}

/// `1 + (qΔ)⁴/16 + (qΔ)²/2 · cos(2x)` with `x = κ d sinθ`.
fn mixed_bracket(qd: f64, x: f64) -> f64 {
    let q2 = qd * qd;
    1.0 + q2 * q2 / 16.0 + 0.5 * q2 * (2.0 * x).cos()
}

/// `Σ_{l' open} [1 + (-1)^{l'}]² J²_{l'}(α|q|) f(κ, |q|Δ)` for a beam in `l = 0`.
fn channel_sum(
    params: &ClosedFormParams,
    theta: f64,
    f: impl Fn(f64, f64) -> f64,
) -> Result<f64, BornError> {
    let molecule = Molecule::new(params.m, params.alpha)?;
    let beam = IncidentBeam::ground_state(params.k)?;
    let mut sum = NeumaierSum::default();
    for ch in open_channels(&beam, &molecule, true) {
        let g = geometry(params.k, ch.kappa, theta);
        let j = bessel_j(ch.l_out, params.alpha * g.q_mag)?;
        sum.add(4.0 * j * j * f(ch.kappa, g.q_mag * params.delta));
    }
    Ok(sum.value())
}

/// Evaluates `variant` on every angle of `thetas`, in parallel, keeping the
/// grid order.
///
/// [`EngineVariant::Structureless`] is evaluated for the comparison particle
/// of [`structureless_reference`], and the closed variants read their
/// parameters through [`ClosedFormParams::from_model`]. Only the general
/// engine fills the per-channel breakdown.
pub fn evaluate_profile(
    variant: EngineVariant,
    molecule: &Molecule,
    beam: &IncidentBeam,
    spec: &PotentialSpec,
    thetas: &[f64],
) -> Result<CrossSectionProfile, BornError> {
    let k = beam.wavenumber();
    let mut per_channel = None;
    let sigma: Vec<f64> = match variant {
        EngineVariant::General => {
            let rows = thetas
                .par_iter()
                .map(|&t| cross_section_general(t, molecule, beam, spec))
                .collect::<Result<Vec<_>, _>>()?;
            let mut channels: BTreeMap<(i32, i32), Vec<f64>> = BTreeMap::new();
            for (i, row) in rows.iter().enumerate() {
                for c in &row.channels {
                    channels.entry((c.l_in, c.l_out)).or_insert_with(|| vec![0.0; thetas.len()])
                        [i] = c.sigma;
                }
            }
            per_channel = Some(channels);
            rows.into_iter().map(|r| r.sigma).collect()
        }
        EngineVariant::Structureless => {
            let (mass, doubled) = structureless_reference(molecule, spec);
            thetas.par_iter().map(|&t| cross_section_structureless(t, mass, k, &doubled)).collect()
        }
        closed => {
            let params = ClosedFormParams::from_model(closed, molecule, beam, spec)?;
            thetas
                .par_iter()
                .map(|&t| cross_section_closed(closed, t, &params))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    if let Some(i) = sigma.iter().position(|s| !s.is_finite()) {
        return Err(BornError::NonFinite { theta: thetas[i] });
    }
    let metadata = ProfileMetadata {
        engine: Some(variant),
        molecule: Some(*molecule),
        beam: Some(beam.clone()),
        potential: Some(spec.clone()),
    };
    Ok(CrossSectionProfile::new(thetas.to_vec(), sigma, per_channel, metadata)?)
}
