//! Rotational channels and the kinematics of one outgoing direction.
//!
//! Energy conservation for the rotor reads
//! `κ²/4m + l_out²/2I = k²/4m + l_in²/2I`, which with `I = 2mα²` reduces to
//! `κ² = k² + (l_in² - l_out²)/α²`.

use crate::model::{IncidentBeam, Molecule, ScatteringGeometry};

/// Below this `|q|` the direction of `q`, and hence `μ`, is taken as 0.
pub const Q_ZERO: f64 = 1e-12;

/// One open `(l_in, l_out)` transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub l_in: i32,
    pub l_out: i32,
    pub kappa: f64,
    /// `|ψ_{l_in}|²`
    pub weight: f64,
}

impl Channel {
    /// Angular momentum transferred to the rotor's translation, `l_in - l_out`.
    pub fn transfer(&self) -> i64 {
        self.l_in as i64 - self.l_out as i64
    }

    /// False when the two-atom parity factor kills the matrix element.
    pub fn is_parity_allowed(&self) -> bool {
        self.transfer() % 2 == 0
    }
}

/// Outgoing wavenumber, or `None` for a closed channel.
///
/// Channels with `l_out² = l_in²` return `k` itself. A channel exactly at
/// threshold (`κ = 0`) counts as closed.
pub fn outgoing_wavenumber(k: f64, l_in: i32, l_out: i32, molecule: &Molecule) -> Option<f64> {
    let (li, lo) = (l_in as i64, l_out as i64);
    let gap = li * li - lo * lo;
    if gap == 0 {
        return Some(k);
    }
    let alpha = molecule.half_separation();
    if alpha == 0.0 {
        return None;
    }
    let radicand = k * k + gap as f64 / (alpha * alpha);
    (radicand > 0.0).then(|| radicand.sqrt())
}

/// Every open channel fed by the beam, sorted by `(l_in, l_out)`.
///
/// With `parity_only`, channels with odd `l_in - l_out` are left out.
pub fn open_channels(beam: &IncidentBeam, molecule: &Molecule, parity_only: bool) -> Vec<Channel> {
    let k = beam.wavenumber();
    let alpha = molecule.half_separation();
    let mut out = Vec::new();
    for (&l_in, psi) in beam.amplitudes() {
        let weight = psi.norm_sqr();
        let reach = ((l_in as f64).powi(2) + (k * alpha).powi(2)).sqrt();
        let bound = if reach.is_finite() { reach.floor() as i64 + 1 } else { i32::MAX as i64 };
        let bound = bound.max(l_in.unsigned_abs() as i64).min(i32::MAX as i64) as i32;
        for l_out in -bound..=bound {
            if parity_only && (l_in as i64 - l_out as i64) % 2 != 0 {
                continue;
            }
            if let Some(kappa) = outgoing_wavenumber(k, l_in, l_out, molecule) {
                out.push(Channel { l_in, l_out, kappa, weight });
            }
        }
    }
    out
}

/// Momentum transfer `q = k ŷ - κ û` for the outgoing direction `θ`
/// (measured from +y), and the angle `μ` of `-q`.
pub fn geometry(k: f64, kappa: f64, theta: f64) -> ScatteringGeometry {
    let (sin_t, cos_t) = theta.sin_cos();
    let q_x = -kappa * sin_t;
    // k - κ cosθ, rearranged so that forward scattering does not cancel.
    let half = (0.5 * theta).sin();
    let q_y = (k - kappa) + 2.0 * kappa * half * half;
    let q_mag = q_x.hypot(q_y);
    let mu = if q_mag < Q_ZERO { 0.0 } else { (kappa * sin_t).atan2(kappa * cos_t - k) };
    ScatteringGeometry { theta, kappa, q_x, q_y, q_mag, mu }
}
