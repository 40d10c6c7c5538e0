//! Brute-force reference values for the closed forms.
//!
//! Nothing here calls into [`crate::born`] or [`crate::specfun`]. The
//! angular integral of the rotor matrix element is done by the periodic
//! trapezoid rule, and the 2D Fourier transform of a single peak by a
//! tensor-product trapezoid rule carried out in 128-bit floating point:
//! at `qΔ = 12` the transform is ~1e-16 of the integrand's size, so an
//! `f64` sum could not resolve it at all.

use std::f64::consts::TAU;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{Molecule, PeakShape, PeakVariant, PotentialSpec};
use crate::potentials::ft_total;
use crate::sum::ComplexSum;

/// Node counts never exceed this, per dimension in 1D and in total in 2D.
pub const MAX_NODES: usize = 1 << 20;
const PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Starting node count; a power of two, at least 64.
    pub node_count: usize,
    /// Half-width of the 2D integration square in units of the peak width.
    pub radial_cutoff: f64,
    /// Convergence threshold between successive doublings.
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { node_count: 64, radial_cutoff: 12.0, abs_tol: 1e-12 }
    }
}

impl QuadratureSpec {
    fn check(&self) -> Result<(), OracleError> {
        if self.node_count < 64 || !self.node_count.is_power_of_two() || self.node_count > MAX_NODES
        {
            return Err(OracleError::InvalidSpec(format!(
                "node_count must be a power of two in 64..={MAX_NODES}, got {}",
                self.node_count
            )));
        }
        if !(self.radial_cutoff > 0.0 && self.radial_cutoff.is_finite()) {
            return Err(OracleError::InvalidSpec("radial_cutoff must be finite and > 0".into()));
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(OracleError::InvalidSpec("abs_tol must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("quadrature did not converge: last change {last_change:e} at {nodes} nodes")]
    NotConverged { nodes: usize, last_change: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

/// The rotor matrix element by direct quadrature of its angular integral,
///
/// `(1/2π) Ṽ(q) (1/2π) ∫ dφ e^{iΔl φ} [e^{iα q·n̂} + e^{-iα q·n̂}]`,
///
/// with `n̂ = (cos φ, sin φ)` the rotor axis and the two terms the two atoms.
/// Convergence is judged on the angular integral, whose size is O(1).
#[allow(clippy::too_many_arguments)]
pub fn matrix_element_quadrature(
    spec: &PotentialSpec,
    molecule: &Molecule,
    k: f64,
    theta: f64,
    l_in: i32,
    l_out: i32,
    kappa: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64, OracleError> {
    quad.check()?;
    let q_x = -kappa * theta.sin();
    let q_y = k - kappa * theta.cos();
    let alpha = molecule.half_separation();
    let dl = (l_in as i64 - l_out as i64) as f64;
    let integral = |n: usize| {
        let mut acc = ComplexSum::default();
        for j in 0..n {
            let phi = TAU * j as f64 / n as f64;
            let (s, c) = phi.sin_cos();
            let arg = alpha * (q_x * c + q_y * s);
            acc.add(Complex64::from_polar(2.0 * arg.cos(), dl * phi));
        }
        acc.value() / n as f64
    };
    let mut n = quad.node_count;
    let mut prev = integral(n);
    loop {
        if 2 * n > MAX_NODES {
            return Err(OracleError::NotConverged { nodes: n, last_change: f64::NAN });
        }
        n *= 2;
        let next = integral(n);
        let change = (next - prev).norm();
        if change < quad.abs_tol {
            return Ok(next * ft_total(spec, q_x, q_y) / TAU);
        }
        if 2 * n > MAX_NODES {
            return Err(OracleError::NotConverged { nodes: n, last_change: change });
        }
        prev = next;
    }
}

/// `(1/2π) ∫∫ e^{-i(q_x x + q_y y)} V(x, y) dx dy` for one peak at the origin,
/// over the square `|x|, |y| ≤ radial_cutoff·Δ`.
///
/// The grid is doubled per axis until successive sums agree to `abs_tol`
/// relative to the result (with a floor far below the peak's own scale).
pub fn ft_numeric(
    shape: &PeakShape,
    q_x: f64,
    q_y: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64, OracleError> {
    quad.check()?;
    if !(q_x.is_finite() && q_y.is_finite()) {
        return Err(OracleError::InvalidSpec("wavevector must be finite".into()));
    }
    let mut cc = Consts::new().expect("astro-float constant cache");
    let scale = 0.5 * shape.strength().abs() * shape.width() * shape.width();
    let mut n = quad.node_count;
    let mut prev = ft_grid(shape, q_x, q_y, quad.radial_cutoff, n, &mut cc);
    loop {
        if (2 * n) * (2 * n) > MAX_NODES {
            return Err(OracleError::NotConverged { nodes: n * n, last_change: f64::NAN });
        }
        n *= 2;
        let next = ft_grid(shape, q_x, q_y, quad.radial_cutoff, n, &mut cc);
        let change = (next - prev).norm();
        if change <= quad.abs_tol * next.norm().max(1e-20 * scale) {
            return Ok(next);
        }
        if (2 * n) * (2 * n) > MAX_NODES {
            return Err(OracleError::NotConverged { nodes: n * n, last_change: change });
        }
        prev = next;
    }
}

struct Mp<'a> {
    cc: &'a mut Consts,
}

impl Mp<'_> {
    fn f(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, PRECISION)
    }
    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PRECISION, RM)
    }
    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PRECISION, RM)
    }
    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PRECISION, RM)
    }
    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PRECISION, RM)
    }
    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(PRECISION, RM, self.cc)
    }
    fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(PRECISION, RM, self.cc)
    }
    fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(PRECISION, RM, self.cc)
    }
    fn pi(&mut self) -> BigFloat {
        self.cc.pi(PRECISION, RM)
    }
}

fn to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    v.to_string().parse().expect("astro-float renders a parseable number")
}

/// One trapezoid sum on an `n × n` grid. The integrand vanishes to e^{-144}
/// at the edges, so the periodic rule (edge nodes counted once) applies.
fn ft_grid(
    shape: &PeakShape,
    q_x: f64,
    q_y: f64,
    cutoff: f64,
    n: usize,
    cc: &mut Consts,
) -> Complex64 {
    let mut mp = Mp { cc };
    let delta = mp.f(shape.width());
    let half_width = mp.mul(&mp.f(cutoff), &delta);
    let h = mp.div(&mp.add(&half_width, &half_width), &mp.f(n as f64));

    // Per node along one axis: ρ = (x/Δ)², and e^{-ρ}·e^{-iqx} as (re, im).
    let axis = |q: f64, mp: &mut Mp| -> Vec<(BigFloat, BigFloat, BigFloat)> {
        let q = mp.f(q);
        (0..n)
            .map(|i| {
                let x = mp.sub(&mp.mul(&h, &mp.f(i as f64)), &half_width);
                let u = mp.div(&x, &delta);
                let rho = mp.mul(&u, &u);
                let g = mp.exp(&rho.neg());
                let phase = mp.mul(&q, &x);
                let (c, s) = (mp.cos(&phase), mp.sin(&phase));
                (rho, mp.mul(&g, &c), mp.mul(&g, &s).neg())
            })
            .collect()
    };
    let xs = axis(q_x, &mut mp);
    let ys = axis(q_y, &mut mp);

    let one = mp.f(1.0);
    let mut re = mp.f(0.0);
    let mut im = mp.f(0.0);
    for (rx, ax, bx) in &xs {
        for (ry, ay, by) in &ys {
            // (ax + i bx)(ay + i by)
            let pr = mp.sub(&mp.mul(ax, ay), &mp.mul(bx, by));
            let pi = mp.add(&mp.mul(ax, by), &mp.mul(bx, ay));
            match shape.variant() {
                PeakVariant::Gaussian => {
                    re = mp.add(&re, &pr);
                    im = mp.add(&im, &pi);
                }
                PeakVariant::PolynomialGaussian => {
                    let w = mp.sub(&one, &mp.add(rx, ry));
                    re = mp.add(&re, &mp.mul(&w, &pr));
                    im = mp.add(&im, &mp.mul(&w, &pi));
                }
            }
        }
    }
    let two_pi = {
        let p = mp.pi();
        mp.add(&p, &p)
    };
    let factor = mp.div(&mp.mul(&mp.mul(&h, &h), &mp.f(shape.strength())), &two_pi);
    Complex64::new(to_f64(&mp.mul(&re, &factor)), to_f64(&mp.mul(&im, &factor)))
}
