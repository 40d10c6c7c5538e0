//! Fringe diagnostics on sampled cross-section profiles.
//!
//! Extrema are found by comparing each sample with its neighbours; a run of
//! equal samples counts once, at its midpoint. The values at strict extrema
//! are refined with the parabola through the three samples around them, so
//! that a fringe minimum falling between grid points still reads close to
//! its true depth.

use thiserror::Error;

use crate::model::CrossSectionProfile;

/// Fewest samples a visibility window may contain.
pub const MIN_WINDOW_SAMPLES: usize = 32;
/// Samples per fringe asked for when a profile is too coarse.
const SAMPLES_PER_FRINGE: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("window [{lo}, {hi}] contains no samples")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("window [{lo}, {hi}] holds {found} samples; at least {MIN_WINDOW_SAMPLES} are needed")]
    TooFewSamples { lo: f64, hi: f64, found: usize },
    #[error(
        "found {found} local maxima but {required} are needed; sample at least \
         {min_density:.3e} points per radian"
    )]
    InsufficientResolution { found: usize, required: usize, min_density: f64 },
    #[error("profiles are sampled on different theta grids")]
    GridMismatch,
    #[error("reference profile has zero visibility, so the ratio is undefined")]
    UndefinedRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Extremum {
    kind: Kind,
    theta: f64,
    value: f64,
}

/// Interior extrema of `sigma` sampled at `thetas`, in ascending θ.
fn extrema(thetas: &[f64], sigma: &[f64]) -> Vec<Extremum> {
    let n = sigma.len();
    let mut out = Vec::new();
    let mut start = 1;
    while start + 1 < n {
        let mut end = start;
        while end + 1 < n && sigma[end + 1] == sigma[start] {
            end += 1;
        }
        if end + 1 >= n {
            break;
        }
        let (left, here, right) = (sigma[start - 1], sigma[start], sigma[end + 1]);
        let kind = if left < here && right < here {
            Some(Kind::Max)
        } else if left > here && right > here {
            Some(Kind::Min)
        } else {
            None
        };
        if let Some(kind) = kind {
            let (theta, value) = if start == end {
                refine(&thetas[start - 1..=start + 1], &sigma[start - 1..=start + 1], kind)
            } else {
                (0.5 * (thetas[start] + thetas[end]), here)
            };
            out.push(Extremum { kind, theta, value });
        }
        start = end + 1;
    }
    out
}

/// Vertex of the parabola through three samples, kept on the correct side
/// of the middle sample (and a minimum never below zero).
fn refine(t: &[f64], s: &[f64], kind: Kind) -> (f64, f64) {
    let (t0, t1, t2) = (t[0], t[1], t[2]);
    let (s0, s1, s2) = (s[0], s[1], s[2]);
    let d01 = (s1 - s0) / (t1 - t0);
    let d12 = (s2 - s1) / (t2 - t1);
    let curvature = (d12 - d01) / (t2 - t0);
    if curvature == 0.0 || !curvature.is_finite() {
        return (t1, s1);
    }
    // s(t) = s1 + b (t - t1) + c (t - t1)², with b the centred slope.
    let b = d01 + curvature * (t1 - t0);
    let offset = -b / (2.0 * curvature);
    let vertex = s1 - b * b / (4.0 * curvature);
    let value = match kind {
        Kind::Max => vertex.max(s1),
        Kind::Min => vertex.clamp(0.0_f64.min(s1), s1),
    };
    let theta = (t1 + offset).clamp(t0, t2);
    (theta, value)
}

fn window_slice(
    profile: &CrossSectionProfile,
    (lo, hi): (f64, f64),
) -> Result<(&[f64], &[f64]), AnalysisError> {
    let thetas = profile.thetas();
    let first = thetas.partition_point(|&t| t < lo);
    let last = thetas.partition_point(|&t| t <= hi);
    if first >= last {
        return Err(AnalysisError::EmptyWindow { lo, hi });
    }
    if last - first < MIN_WINDOW_SAMPLES {
        return Err(AnalysisError::TooFewSamples { lo, hi, found: last - first });
    }
    Ok((&thetas[first..last], &profile.sigma()[first..last]))
}

fn contrast(found: &[Extremum]) -> f64 {
    let max = found.iter().filter(|e| e.kind == Kind::Max).map(|e| e.value).fold(None, fmax);
    let min = found.iter().filter(|e| e.kind == Kind::Min).map(|e| e.value).fold(None, fmin);
    match (max, min) {
        (Some(hi), Some(lo)) if hi + lo > 0.0 => ((hi - lo) / (hi + lo)).clamp(0.0, 1.0),
        _ => 0.0,
    }
}

fn fmax(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.max(v)))
}

fn fmin(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.min(v)))
}

/// `(σ_max - σ_min)/(σ_max + σ_min)` from the largest interior local maximum
/// and the smallest interior local minimum within `window`; 0 without both.
pub fn visibility(profile: &CrossSectionProfile, window: (f64, f64)) -> Result<f64, AnalysisError> {
    let (thetas, sigma) = window_slice(profile, window)?;
    Ok(contrast(&extrema(thetas, sigma)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeReport {
    pub visibility: f64,
    /// Local maxima inside the window, ascending.
    pub peak_thetas: Vec<f64>,
    /// Mean gap between consecutive maxima; `None` with fewer than two.
    pub mean_spacing: Option<f64>,
    pub window: (f64, f64),
}

pub fn fringe_report(
    profile: &CrossSectionProfile,
    window: (f64, f64),
) -> Result<FringeReport, AnalysisError> {
    let (thetas, sigma) = window_slice(profile, window)?;
    let found = extrema(thetas, sigma);
    let peak_thetas: Vec<f64> =
        found.iter().filter(|e| e.kind == Kind::Max).map(|e| e.theta).collect();
    Ok(FringeReport {
        visibility: contrast(&found),
        mean_spacing: mean_gap(&peak_thetas),
        peak_thetas,
        window,
    })
}

fn mean_gap(sorted: &[f64]) -> Option<f64> {
    (sorted.len() >= 2).then(|| (sorted[sorted.len() - 1] - sorted[0]) / (sorted.len() - 1) as f64)
}

/// Mean spacing of the `count + 1` local maxima closest to `near_theta`.
pub fn peak_spacing(
    profile: &CrossSectionProfile,
    near_theta: f64,
    count: usize,
) -> Result<f64, AnalysisError> {
    let required = count.max(1) + 1;
    let thetas = profile.thetas();
    let mut maxima: Vec<f64> = extrema(thetas, profile.sigma())
        .into_iter()
        .filter(|e| e.kind == Kind::Max)
        .map(|e| e.theta)
        .collect();
    if maxima.len() < required {
        let span = match (thetas.first(), thetas.last()) {
            (Some(a), Some(b)) if b > a => b - a,
            _ => 1.0,
        };
        let density = thetas.len() as f64 / span;
        let min_density = match mean_gap(&maxima) {
            Some(gap) => (SAMPLES_PER_FRINGE / gap).max(density),
            None => 2.0 * density,
        };
        return Err(AnalysisError::InsufficientResolution {
            found: maxima.len(),
            required,
            min_density,
        });
    }
    maxima.sort_by(|a, b| (a - near_theta).abs().total_cmp(&(b - near_theta).abs()));
    maxima.truncate(required);
    maxima.sort_by(f64::total_cmp);
    Ok(mean_gap(&maxima).expect("at least two maxima"))
}

/// `visibility(with) / visibility(without)`; below 1 means the internal
/// structure washed fringes out.
pub fn suppression_ratio(
    with_internal: &CrossSectionProfile,
    without: &CrossSectionProfile,
    window: (f64, f64),
) -> Result<f64, AnalysisError> {
    if with_internal.thetas() != without.thetas() {
        return Err(AnalysisError::GridMismatch);
    }
    let reference = visibility(without, window)?;
    if reference == 0.0 {
        return Err(AnalysisError::UndefinedRatio);
    }
    Ok(visibility(with_internal, window)? / reference)
}
