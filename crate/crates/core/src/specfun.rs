//! Integer-order Bessel functions of the first kind.
//!
//! All orders for a given argument come out of one normalized downward
//! (Miller) recurrence. The starting order depends on `x` alone, never on the
//! requested order, so [`bessel_j`] and [`bessel_j_batch`] agree bit for bit.
//! Arguments below [`SERIES_THRESHOLD`] use the ascending series instead,
//! where the recurrence coefficient `2m/x` would overflow.

use thiserror::Error;

/// Largest order accepted by [`bessel_j`] and [`bessel_j_batch`].
pub const MAX_ORDER: u32 = 20_000;

const SERIES_THRESHOLD: f64 = 1e-5;
/// Decades below unity at which the recurrence is started.
const START_DECADES: f64 = 340.0;
const START_MARGIN: usize = 12;
const SEED: f64 = 1e-300;
const RESCALE_ABOVE: f64 = 1e250;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("bessel argument must be finite and non-negative, got {0}")]
    Domain(f64),
    #[error("bessel order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge(i64),
}

/// Orders `0..=n_max` evaluated together by [`bessel_j_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrderRange {
    n_max: u32,
}

impl BesselOrderRange {
    pub fn new(n_max: u32) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.n_max as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `J_n(x)` for integer `n` (negative orders via `J_{-n} = (-1)^n J_n`).
pub fn bessel_j(n: i32, x: f64) -> Result<f64, SpecFunError> {
    let order = n.unsigned_abs();
    if order > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge(n as i64));
    }
    check_argument(x)?;
    let value = evaluate(order as usize, x)[order as usize];
    Ok(if n < 0 && order % 2 == 1 { -value } else { value })
}

/// `[J_0(x), J_1(x), ..., J_{n_max}(x)]`.
pub fn bessel_j_batch(range: BesselOrderRange, x: f64) -> Result<Vec<f64>, SpecFunError> {
    if range.n_max > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge(range.n_max as i64));
    }
    check_argument(x)?;
    Ok(evaluate(range.n_max as usize, x))
}

fn check_argument(x: f64) -> Result<(), SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecFunError::Domain(x));
    }
    Ok(())
}

fn evaluate(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_THRESHOLD {
        return ascending_series(n_max, x);
    }
    miller(n_max, x)
}

/// Three terms of the ascending series; enough for x < 1e-5.
fn ascending_series(n_max: usize, x: f64) -> Vec<f64> {
    let half = 0.5 * x;
    let y = half * half;
    let mut leading = 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            leading *= half / n as f64;
        }
        let n1 = n as f64 + 1.0;
        let correction = 1.0 - y / n1 + y * y / (2.0 * n1 * (n1 + 1.0));
        out.push(leading * correction);
    }
    out
}

/// Rough `-log10 |J_n(x)|` from the small-argument form `(ex/2n)^n / sqrt(2πn)`.
/// It overestimates `|J_n|` near the turning point, which only pushes the
/// start order further out.
fn decades_below_unity(n: f64, x: f64) -> f64 {
    0.5 * (std::f64::consts::TAU * n).log10() - n * (std::f64::consts::E * 0.5 * x / n).log10()
}

fn start_order(x: f64) -> usize {
    let mut lo = x.floor() as usize + 1;
    if decades_below_unity(lo as f64, x) >= START_DECADES {
        return lo + START_MARGIN;
    }
    let mut hi = 2 * lo;
    while decades_below_unity(hi as f64, x) < START_DECADES {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if decades_below_unity(mid as f64, x) < START_DECADES {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi + START_MARGIN
}

fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let start = start_order(x);
    let mut out = vec![0.0; n_max + 1];
    // `current` holds f_m, `above` holds f_{m+1}; f_{start+1} = 0.
    let mut above = 0.0;
    let mut current = SEED;
    // J_0 + 2 Σ_{k≥1} J_{2k} = 1
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        if m <= n_max {
            out[m] = current;
        }
        if m % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = (2.0 * m as f64 / x) * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(m) {
                *v *= s;
            }
        }
    }
    out[0] = current;
    norm += current;
    for v in &mut out {
        *v /= norm;
    }
    out
}
