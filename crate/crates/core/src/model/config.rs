//! The JSON configuration document and its validation.
//!
//! ```json
//! {
//!   "molecule": {"mass": 1, "alpha": 2.5},
//!   "beam": {"k": 1, "amplitudes": [{"l": 0, "re": 1, "im": 0}]},
//!   "potential": {"kind": "peaks", "peaks": [
//!     {"center": 4, "shape": {"variant": "polynomial_gaussian", "v0": 1, "delta": 1.5}},
//!     {"center": -4, "shape": {"variant": "gaussian", "v0": 1, "delta": 1.5}}]},
//!   "engine": {"variant": "closed_mixed"},
//!   "scan": {"theta": {"min": -1.5707963267948966, "max": 1.5707963267948966, "steps": 721},
//!            "k": [1]}
//! }
//! ```

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EngineVariant, IncidentBeam, Molecule, Peak, PeakShape, PeakVariant, PotentialSpec};
use crate::potentials::make_grating;

/// Amplitude sets whose norm is off by more than this are rejected.
const RENORMALIZE_WITHIN: f64 = 1e-6;
const MAX_ABS_L: i64 = 10_000;
const MAX_GRATING_N: i64 = 1_000_000;
const DEFAULT_THETA_STEPS: usize = 181;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub molecule: MoleculeDoc,
    pub beam: BeamDoc,
    pub potential: PotentialDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeDoc {
    pub mass: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamDoc {
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeDoc {
    pub l: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<Vec<PeakDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grating: Option<GratingDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakDoc {
    pub center: f64,
    pub shape: ShapeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDoc {
    pub variant: String,
    pub v0: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingDoc {
    pub n: i64,
    pub d: f64,
    pub shape: ShapeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineDoc {
    pub variant: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaDoc {
    pub min: f64,
    pub max: f64,
    pub steps: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

/// Every problem found in one configuration document.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Evenly spaced θ samples; both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ThetaGrid {
    pub fn new(min: f64, max: f64, steps: usize) -> Option<Self> {
        (min.is_finite() && max.is_finite() && min < max && steps >= 2).then_some(Self {
            min,
            max,
            steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                self.min * (1.0 - t) + self.max * t
            })
            .collect()
    }
}

impl Default for ThetaGrid {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_PI_2;
        Self { min: -h, max: h, steps: DEFAULT_THETA_STEPS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanDescription {
    pub theta: ThetaGrid,
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    pub molecule: Molecule,
    pub beam: IncidentBeam,
    pub potential: PotentialSpec,
    pub engine: EngineVariant,
    pub scan: ScanDescription,
}

impl ValidatedConfig {
    /// A document that validates back to `self`; the potential is written
    /// out as an explicit peak list.
    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            molecule: MoleculeDoc {
                mass: self.molecule.atom_mass(),
                alpha: self.molecule.half_separation(),
            },
            beam: BeamDoc {
                k: self.beam.wavenumber(),
                amplitudes: Some(
                    self.beam
                        .amplitudes()
                        .iter()
                        .map(|(&l, psi)| AmplitudeDoc { l: l as i64, re: psi.re, im: psi.im })
                        .collect(),
                ),
            },
            potential: PotentialDoc {
                kind: "peaks".into(),
                peaks: Some(
                    self.potential
                        .peaks()
                        .iter()
                        .map(|p| PeakDoc { center: p.center_x, shape: shape_doc(&p.shape) })
                        .collect(),
                ),
                grating: None,
            },
            engine: Some(EngineDoc { variant: self.engine.as_str().into() }),
            scan: Some(ScanDoc {
                theta: Some(ThetaDoc {
                    min: self.scan.theta.min,
                    max: self.scan.theta.max,
                    steps: self.scan.theta.steps as i64,
                }),
                k: Some(self.scan.k.clone()),
            }),
        }
    }
}

fn shape_doc(shape: &PeakShape) -> ShapeDoc {
    ShapeDoc {
        variant: shape.variant().as_str().into(),
        v0: shape.strength(),
        delta: shape.width(),
    }
}

/// Parses and validates a configuration document.
pub fn validate_config(raw: &str) -> Result<ValidatedConfig, ConfigErrors> {
    let doc: ConfigDocument = serde_json::from_str(raw).map_err(|e| {
        ConfigErrors(vec![FieldError {
            path: String::new(),
            message: format!("malformed JSON: {e}"),
        }])
    })?;
    validate_document(&doc)
}

pub fn validate_document(doc: &ConfigDocument) -> Result<ValidatedConfig, ConfigErrors> {
    let mut errs = Errors::default();

    let mass = errs.finite("molecule.mass", doc.molecule.mass);
    let alpha = errs.finite("molecule.alpha", doc.molecule.alpha);
    if matches!(mass, Some(m) if m <= 0.0) {
        errs.push("molecule.mass", "atom_mass must be > 0");
    }
    if matches!(alpha, Some(a) if a < 0.0) {
        errs.push("molecule.alpha", "half_separation must be ≥ 0");
    }

    let k = errs.finite("beam.k", doc.beam.k);
    if matches!(k, Some(k) if k <= 0.0) {
        errs.push("beam.k", "wavenumber must be > 0");
    }
    let amplitudes = validate_amplitudes(&mut errs, doc.beam.amplitudes.as_deref());
    let peaks = validate_potential(&mut errs, &doc.potential);

    let engine = match &doc.engine {
        None => Some(EngineVariant::General),
        Some(e) => {
            let v = EngineVariant::parse(&e.variant);
            if v.is_none() {
                errs.push("engine.variant", format!("unknown engine variant {:?}", e.variant));
            }
            v
        }
    };

    let theta = match doc.scan.as_ref().and_then(|s| s.theta.as_ref()) {
        None => Some(ThetaGrid::default()),
        Some(t) => {
            let min = errs.finite("scan.theta.min", t.min);
            let max = errs.finite("scan.theta.max", t.max);
            if t.steps < 2 {
                errs.push("scan.theta.steps", "steps must be ≥ 2");
            }
            match (min, max) {
                (Some(lo), Some(hi)) if lo >= hi => {
                    errs.push("scan.theta", "min must be < max");
                    None
                }
                (Some(lo), Some(hi)) if t.steps >= 2 => {
                    let grid = ThetaGrid::new(lo, hi, t.steps as usize);
                    if let Some(g) = &grid {
                        if g.values().windows(2).any(|w| w[0] >= w[1]) {
                            errs.push("scan.theta.steps", "too many steps for the θ range");
                        }
                    }
                    grid
                }
                _ => None,
            }
        }
    };

    let k_list = match doc.scan.as_ref().and_then(|s| s.k.as_ref()) {
        None => k.map(|k| vec![k]),
        Some(list) => {
            if list.is_empty() {
                errs.push("scan.k", "k list must not be empty");
            }
            for (i, &kv) in list.iter().enumerate() {
                let path = format!("scan.k[{i}]");
                if let Some(kv) = errs.finite(&path, kv) {
                    if kv <= 0.0 {
                        errs.push(&path, "wavenumber must be > 0");
                    }
                }
            }
            Some(list.clone())
        }
    };

    if !errs.0.is_empty() {
        return Err(ConfigErrors(errs.0));
    }
    // Everything below was checked above; constructor failures here would be bugs,
    // but are still reported rather than unwrapped.
    let build = || -> Result<ValidatedConfig, super::ModelError> {
        let molecule = Molecule::new(mass.unwrap(), alpha.unwrap())?;
        let beam = IncidentBeam::new(k.unwrap(), amplitudes.clone().unwrap())?;
        let potential = peaks.clone().unwrap();
        Ok(ValidatedConfig {
            molecule,
            beam,
            potential,
            engine: engine.unwrap(),
            scan: ScanDescription { theta: theta.unwrap(), k: k_list.clone().unwrap() },
        })
    };
    build().map_err(|e| ConfigErrors(vec![FieldError { path: e.field, message: e.message }]))
}

fn validate_amplitudes(
    errs: &mut Errors,
    amplitudes: Option<&[AmplitudeDoc]>,
) -> Option<Vec<(i32, Complex64)>> {
    let Some(list) = amplitudes else {
        return Some(vec![(0, Complex64::new(1.0, 0.0))]);
    };
    if list.is_empty() {
        errs.push("beam.amplitudes", "at least one amplitude is required");
        return None;
    }
    let before = errs.0.len();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(list.len());
    for (i, a) in list.iter().enumerate() {
        let re = errs.finite(&format!("beam.amplitudes[{i}].re"), a.re);
        let im = errs.finite(&format!("beam.amplitudes[{i}].im"), a.im);
        if a.l.abs() > MAX_ABS_L {
            errs.push(&format!("beam.amplitudes[{i}].l"), format!("|l| must be ≤ {MAX_ABS_L}"));
            continue;
        }
        if !seen.insert(a.l) {
            errs.push(&format!("beam.amplitudes[{i}].l"), format!("duplicate l = {}", a.l));
        }
        if let (Some(re), Some(im)) = (re, im) {
            out.push((a.l as i32, Complex64::new(re, im)));
        }
    }
    if errs.0.len() > before {
        return None;
    }
    let norm: f64 = out.iter().map(|(_, p)| p.norm_sqr()).sum();
    if (norm - 1.0).abs() > RENORMALIZE_WITHIN {
        errs.push(
            "beam.amplitudes",
            format!("Σ|ψ_l|² = {norm} is not within {RENORMALIZE_WITHIN:e} of 1"),
        );
        return None;
    }
    if (norm - 1.0).abs() > super::NORM_TOLERANCE {
        let scale = norm.sqrt().recip();
        for (_, p) in &mut out {
            *p *= scale;
        }
    }
    Some(out)
}

fn validate_shape(errs: &mut Errors, path: &str, doc: &ShapeDoc) -> Option<PeakShape> {
    let variant = PeakVariant::parse(&doc.variant);
    if variant.is_none() {
        errs.push(&format!("{path}.variant"), format!("unknown peak variant {:?}", doc.variant));
    }
    let v0 = errs.finite(&format!("{path}.v0"), doc.v0);
    let delta = errs.finite(&format!("{path}.delta"), doc.delta);
    if matches!(delta, Some(d) if d <= 0.0) {
        errs.push(&format!("{path}.delta"), "width must be > 0");
        return None;
    }
    PeakShape::new(variant?, v0?, delta?).ok()
}

fn validate_potential(errs: &mut Errors, doc: &PotentialDoc) -> Option<PotentialSpec> {
    match doc.kind.as_str() {
        "peaks" => {
            let Some(list) = &doc.peaks else {
                errs.push("potential.peaks", "required when kind is \"peaks\"");
                return None;
            };
            if list.is_empty() {
                errs.push("potential.peaks", "potential needs at least one peak");
                return None;
            }
            let mut peaks = Vec::with_capacity(list.len());
            for (i, p) in list.iter().enumerate() {
                let center = errs.finite(&format!("potential.peaks[{i}].center"), p.center);
                let shape = validate_shape(errs, &format!("potential.peaks[{i}].shape"), &p.shape);
                if let (Some(center_x), Some(shape)) = (center, shape) {
                    peaks.push(Peak { center_x, shape });
                }
            }
            if peaks.len() != list.len() {
                return None;
            }
            PotentialSpec::new(peaks).ok()
        }
        "grating" => {
            let Some(g) = &doc.grating else {
                errs.push("potential.grating", "required when kind is \"grating\"");
                return None;
            };
            if !(0..=MAX_GRATING_N).contains(&g.n) {
                errs.push("potential.grating.n", format!("n must be in 0..={MAX_GRATING_N}"));
            }
            let d = errs.finite("potential.grating.d", g.d);
            if matches!(d, Some(d) if d <= 0.0) {
                errs.push("potential.grating.d", "spacing must be > 0");
            }
            let shape = validate_shape(errs, "potential.grating.shape", &g.shape);
            match (d, shape) {
                (Some(d), Some(shape)) if d > 0.0 && (0..=MAX_GRATING_N).contains(&g.n) => {
                    match make_grating(g.n as u32, d, shape) {
                        Ok(spec) => Some(spec),
                        Err(e) => {
                            errs.push("potential.grating", e.message);
                            None
                        }
                    }
                }
                _ => None,
            }
        }
        other => {
            errs.push(
                "potential.kind",
                format!("kind must be \"peaks\" or \"grating\", got {other:?}"),
            );
            None
        }
    }
}

#[derive(Default)]
struct Errors(Vec<FieldError>);

impl Errors {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.0.push(FieldError { path: path.to_string(), message: message.into() });
    }

    fn finite(&mut self, path: &str, v: f64) -> Option<f64> {
        if v.is_finite() {
            Some(v)
        } else {
            self.push(path, format!("{v} is not a finite number"));
            None
        }
    }
}
