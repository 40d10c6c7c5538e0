//! Form factors of the peak shapes and of whole potentials.
//!
//! The transform convention is `Ṽ(q) = (1/2π) ∫ d²r e^{-iq·r} V(r)`.

use num_complex::Complex64;

use crate::model::{ModelError, Peak, PeakShape, PeakVariant, PotentialSpec};
use crate::sum::ComplexSum;

/// Below this `|sin(x/2)|` the Dirichlet factor switches to its Taylor form.
const DIRICHLET_GUARD: f64 = 1e-8;

/// Form factor of a single peak centered at the origin. Both shapes are
/// radial, so this depends only on `|q|`.
pub fn ft_peak(shape: &PeakShape, q_mag: f64) -> f64 {
    let v0 = shape.strength();
    let delta = shape.width();
    let qd = q_mag * delta;
    let envelope = (-0.25 * qd * qd).exp();
    match shape.variant() {
        PeakVariant::Gaussian => 0.5 * v0 * delta * delta * envelope,
        PeakVariant::PolynomialGaussian => 0.125 * v0 * qd * qd * delta * delta * envelope,
    }
}

/// `Σ_j e^{-i q_x c_j} Ṽ_j(|q|)` over the peaks of `spec`.
///
/// Peaks are summed in the spec's canonical order with compensation, so
/// the result does not depend on the order the peaks were supplied in.
pub fn ft_total(spec: &PotentialSpec, q_x: f64, q_y: f64) -> Complex64 {
    let q_mag = q_x.hypot(q_y);
    let mut acc = ComplexSum::default();
    for peak in spec.peaks() {
        let phase = q_x * peak.center_x;
        acc.add(Complex64::from_polar(ft_peak(&peak.shape, q_mag), -phase));
    }
    acc.value()
}

/// `sin((2N+1)x/2) / sin(x/2)`, the amplitude of `2N+1` equally spaced
/// scatterers.
pub fn dirichlet_amplitude(x: f64, n: u32) -> f64 {
    let a = 2.0 * n as f64 + 1.0;
    let s = (0.5 * x).sin();
    if s.abs() >= DIRICHLET_GUARD {
        return (0.5 * a * x).sin() / s;
    }
    // At x = 2πj + δ numerator and denominator both pick up (-1)^j, so only
    // the offset δ from the nearest multiple of 2π matters.
    let delta = x - std::f64::consts::TAU * (x / std::f64::consts::TAU).round();
    let u2 = 0.25 * delta * delta;
    let a2 = a * a;
    a * (1.0 - (a2 - 1.0) * u2 / 6.0 + (a2 - 1.0) * (3.0 * a2 - 7.0) * u2 * u2 / 360.0)
}

/// `2N+1` copies of `shape` at `x = n d`, `n = -N..=N`.
pub fn make_grating(n: u32, d: f64, shape: PeakShape) -> Result<PotentialSpec, ModelError> {
    if !d.is_finite() || d <= 0.0 {
        return Err(ModelError {
            field: "d".into(),
            message: "spacing must be finite and > 0".into(),
        });
    }
    let n = n as i64;
    let peaks = (-n..=n).map(|j| Peak { center_x: j as f64 * d, shape }).collect();
    PotentialSpec::new(peaks)
}
