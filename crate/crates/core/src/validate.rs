//! Self-checks comparing the engines against oracles, identities and each
//! other. Each check reports its worst deviation against a fixed tolerance.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::born::{
    cross_section_closed, cross_section_general, cross_section_structureless, evaluate_profile,
    matrix_element, structureless_reference, ClosedFormParams,
};
use crate::kinematics::{open_channels, outgoing_wavenumber};
use crate::model::{EngineVariant, IncidentBeam, Molecule, Peak, PeakShape, PotentialSpec};
use crate::oracle::{ft_numeric, matrix_element_quadrature, QuadratureSpec};
use crate::potentials::{dirichlet_amplitude, ft_peak, ft_total, make_grating};
use crate::specfun::{bessel_j, bessel_j_batch, BesselOrderRange, SpecFunError};
use crate::{analysis, Complex64};

/// Seed of the random matrix-element draws; fixed so reports are reproducible.
pub const MATRIX_SEED: u64 = 0x5eed_2d07;
pub const MATRIX_DRAWS: usize = 512;

pub const TOL_BESSEL_SUM: f64 = 1e-10;
pub const TOL_BESSEL_RECURRENCE: f64 = 1e-10;
pub const TOL_BESSEL_ZERO: f64 = 1e-12;
pub const TOL_BESSEL_REL: f64 = 1e-12;
pub const TOL_BESSEL_ABS: f64 = 1e-14;
pub const TOL_FT_REL: f64 = 1e-8;
pub const TOL_FT_ABS_AT_ZERO: f64 = 1e-10;
pub const TOL_MATRIX_REL: f64 = 1e-10;
pub const TOL_MATRIX_ABS: f64 = 1e-13;
pub const TOL_SPECIALIZATION: f64 = 1e-12;
pub const TOL_LIMIT: f64 = 1e-6;
pub const TOL_DECOUPLING: f64 = 1e-6;
pub const TOL_MIRROR: f64 = 1e-12;
pub const TOL_GRATING_SCALING: f64 = 1e-9;
pub const TOL_GRATING_SPACING: f64 = 0.1;

pub const SPECIALIZATION_KS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];
pub const SPECIALIZATION_THETAS: usize = 181;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    Bessel,
    Ft,
    Matrix,
    Specialization,
    Limit,
    Decoupling,
    Parity,
    Symmetry,
    Grating,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 9] = [
        CheckGroup::Bessel,
        CheckGroup::Ft,
        CheckGroup::Matrix,
        CheckGroup::Specialization,
        CheckGroup::Limit,
        CheckGroup::Decoupling,
        CheckGroup::Parity,
        CheckGroup::Symmetry,
        CheckGroup::Grating,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckGroup::Bessel => "bessel",
            CheckGroup::Ft => "ft",
            CheckGroup::Matrix => "matrix",
            CheckGroup::Specialization => "specialization",
            CheckGroup::Limit => "limit",
            CheckGroup::Decoupling => "decoupling",
            CheckGroup::Parity => "parity",
            CheckGroup::Symmetry => "symmetry",
            CheckGroup::Grating => "grating",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.as_str() == s)
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub group: CheckGroup,
    /// Worst deviation in the units the tolerance is stated in.
    pub worst_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Where the worst deviation occurred, or why the check failed outright.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, group: CheckGroup, worst: Worst, tolerance: f64) -> Self {
        let pass = worst.failure.is_none() && worst.value <= tolerance;
        Self {
            name: name.to_string(),
            group,
            worst_deviation: worst.value,
            tolerance,
            pass,
            detail: worst.failure.unwrap_or(worst.at),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A Bessel evaluator under test; [`bessel_j`] unless a caller substitutes
/// a deliberately broken one to see the suite catch it.
pub type BesselFn = fn(i32, f64) -> Result<f64, SpecFunError>;

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Groups to run; all when empty.
    pub groups: Vec<CheckGroup>,
    pub bessel: BesselFn,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { groups: Vec::new(), bessel: bessel_j }
    }
}

pub fn run(options: &ValidateOptions) -> ValidationReport {
    let wanted = |g| options.groups.is_empty() || options.groups.contains(&g);
    let mut checks = Vec::new();
    for group in CheckGroup::ALL.into_iter().filter(|g| wanted(*g)) {
        checks.extend(match group {
            CheckGroup::Bessel => bessel_checks(options.bessel),
            CheckGroup::Ft => vec![ft_check()],
            CheckGroup::Matrix => vec![matrix_check()],
            CheckGroup::Specialization => specialization_checks(),
            CheckGroup::Limit => vec![limit_check()],
            CheckGroup::Decoupling => vec![decoupling_check()],
            CheckGroup::Parity => parity_checks(),
            CheckGroup::Symmetry => vec![mirror_check()],
            CheckGroup::Grating => grating_checks(),
        });
    }
    ValidationReport { checks }
}

/// Largest deviation seen so far and where; a hard failure (error, NaN)
/// overrides the value.
#[derive(Debug, Clone, Default)]
struct Worst {
    value: f64,
    at: String,
    failure: Option<String>,
}

impl Worst {
    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value.is_nan() {
            self.fail(format!("NaN deviation at {}", at()));
        } else if value > self.value || self.at.is_empty() {
            self.value = value;
            self.at = at();
        }
    }

    fn fail(&mut self, why: impl Into<String>) {
        if self.failure.is_none() {
            self.failure = Some(why.into());
        }
    }

    fn merge(mut self, other: Worst) -> Worst {
        if other.value > self.value || self.at.is_empty() {
            self.value = other.value;
            self.at = other.at;
        }
        if self.failure.is_none() {
            self.failure = other.failure;
        }
        self
    }
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn relative_deviation(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

// ---------------------------------------------------------------- bessel

/// Highest order kept in the sum-of-squares identity at `x`. Past the
/// turning point `n ≈ x` the terms fall off over a width of order `x^{1/3}`,
/// so a fixed margin is not enough: at `x = 1000`, stopping at `x + 40`
/// leaves out 4e-10 of the sum.
pub fn sum_of_squares_order(x: f64) -> u32 {
    (x + 40.0 + 8.0 * x.cbrt()).ceil() as u32
}

/// `J_n(x) = (1/2π) ∫_0^{2π} cos(nτ - x sin τ) dτ`, by the periodic
/// trapezoid rule with enough nodes to resolve both `n` and `x`.
pub fn bessel_by_integral(n: i32, x: f64) -> f64 {
    let nodes = (2 * (n.unsigned_abs() as usize + x.ceil() as usize) + 64).next_power_of_two();
    let mut acc = crate::sum::NeumaierSum::default();
    for j in 0..nodes {
        let tau = TAU * j as f64 / nodes as f64;
        acc.add((n as f64 * tau - x * tau.sin()).cos());
    }
    acc.value() / nodes as f64
}

fn bessel_checks(j: BesselFn) -> Vec<CheckResult> {
    let g = CheckGroup::Bessel;
    let mut out = Vec::new();

    let mut w = Worst::default();
    for x in [1.0, 10.0, 100.0, 1000.0] {
        let n_max = sum_of_squares_order(x);
        match bessel_j_batch(BesselOrderRange::new(n_max), x) {
            Ok(v) => {
                let s = v[0] * v[0] + 2.0 * v[1..].iter().map(|t| t * t).sum::<f64>();
                w.see((s - 1.0).abs(), || format!("x={x}"));
            }
            Err(e) => w.fail(e.to_string()),
        }
    }
    out.push(CheckResult::new("bessel.sum_of_squares", g, w, TOL_BESSEL_SUM));

    let mut w = Worst::default();
    for x in [0.1, 0.5, 2.0, 10.0, 77.7, 500.0, 1999.0] {
        match bessel_j_batch(BesselOrderRange::new(x as u32 + 60), x) {
            Ok(v) => {
                for n in 1..v.len() - 1 {
                    let r = (v[n - 1] + v[n + 1] - 2.0 * n as f64 / x * v[n]).abs();
                    w.see(r / v[n].abs().max(1.0), || format!("n={n} x={x}"));
                }
            }
            Err(e) => w.fail(e.to_string()),
        }
    }
    out.push(CheckResult::new("bessel.recurrence", g, w, TOL_BESSEL_RECURRENCE));

    let mut w = Worst::default();
    match j(0, 2.404825557695773) {
        Ok(v) => w.see(v.abs(), || "first zero of J0".into()),
        Err(e) => w.fail(e.to_string()),
    }
    out.push(CheckResult::new("bessel.first_zero", g, w, TOL_BESSEL_ZERO));

    // Reflection, against the integral representation rather than the
    // evaluator's own positive orders, so a sign slip cannot cancel out.
    let mut w = Worst::default();
    for n in -25..=25 {
        for x in [0.3, 1.0, 4.5, 12.0, 31.4] {
            match j(n, x) {
                Ok(v) => {
                    let reference = bessel_by_integral(n, x);
                    let dev =
                        (v - reference).abs() / (TOL_BESSEL_REL * reference.abs() + TOL_BESSEL_ABS);
                    w.see(dev, || format!("n={n} x={x}: {v:e} vs {reference:e}"));
                }
                Err(e) => w.fail(e.to_string()),
            }
        }
    }
    out.push(CheckResult::new("bessel.integral_oracle", g, w, 1.0));

    let mut w = Worst::default();
    for n in 0..60 {
        for x in [0.25, 3.0, 40.0, 900.0] {
            match (j(n, x), j(-n, x)) {
                (Ok(pos), Ok(neg)) => {
                    let expected = if n % 2 == 1 { -pos } else { pos };
                    let bits_differ = (neg.to_bits() != expected.to_bits()) as u8 as f64;
                    w.see(bits_differ, || format!("n={n} x={x}"));
                }
                (Err(e), _) | (_, Err(e)) => w.fail(e.to_string()),
            }
        }
    }
    out.push(CheckResult::new("bessel.reflection_exact", g, w, 0.0));
    out
}

// ---------------------------------------------------------------- ft

/// The q values the Fourier check visits: `qΔ = 0, 1, ..., 12` in a few
/// directions.
fn ft_cases() -> Vec<(PeakShape, f64, f64)> {
    let mut cases = Vec::new();
    for shape in [
        PeakShape::gaussian(1.0, 1.0).unwrap(),
        PeakShape::polynomial_gaussian(1.0, 1.0).unwrap(),
        PeakShape::gaussian(-0.7, 2.5).unwrap(),
        PeakShape::polynomial_gaussian(1.3, 0.6).unwrap(),
    ] {
        for (i, qd) in (0..=12).enumerate() {
            let angle = 0.37 * i as f64;
            let q = qd as f64 / shape.width();
            cases.push((shape, q * angle.cos(), q * angle.sin()));
        }
    }
    cases
}

fn ft_check() -> CheckResult {
    let quad = QuadratureSpec::default();
    let worst = ft_cases()
        .par_iter()
        .map(|&(shape, qx, qy)| {
            let mut w = Worst::default();
            let at = || format!("{:?} q=({qx:.4}, {qy:.4})", shape.variant());
            match ft_numeric(&shape, qx, qy, &quad) {
                Ok(numeric) => {
                    let analytic = ft_peak(&shape, qx.hypot(qy));
                    let diff = (numeric - Complex64::new(analytic, 0.0)).norm();
                    if analytic == 0.0 {
                        w.see(diff / TOL_FT_ABS_AT_ZERO * TOL_FT_REL, at);
                    } else {
                        w.see(diff / analytic.abs(), at);
                    }
                }
                Err(e) => w.fail(format!("{}: {e}", at())),
            }
            w
        })
        .reduce(Worst::default, Worst::merge);
    CheckResult::new("ft.peak_vs_quadrature", CheckGroup::Ft, worst, TOL_FT_REL)
}

// ---------------------------------------------------------------- matrix

#[derive(Debug, Clone)]
pub struct MatrixDraw {
    pub spec: PotentialSpec,
    pub molecule: Molecule,
    pub k: f64,
    pub theta: f64,
    pub l_in: i32,
    pub l_out: i32,
    pub kappa: f64,
}

/// Reproducible random draws covering k ∈ [0.5, 5], θ ∈ [0.05, 3],
/// α ∈ [0.5, 3], Δ ∈ [0.5, 3], |l - l'| ∈ {0, 2, 4}, both peak shapes.
pub fn matrix_draws(count: usize, seed: u64) -> Vec<MatrixDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.random_range(0.5..=5.0);
        let theta = rng.random_range(0.05..=3.0);
        let alpha = rng.random_range(0.5..=3.0);
        let delta = rng.random_range(0.5..=3.0);
        let d = rng.random_range(0.5..=5.0);
        let l_in = rng.random_range(-3..=3);
        let transfer = [0, 2, -2, 4, -4][out.len() % 5];
        let l_out = l_in - transfer;
        let shape = |rng: &mut ChaCha8Rng| {
            let v0 = rng.random_range(0.5..=2.0);
            if rng.random_bool(0.5) {
                PeakShape::gaussian(v0, delta).unwrap()
            } else {
                PeakShape::polynomial_gaussian(v0, delta).unwrap()
            }
        };
        let spec = PotentialSpec::new(vec![
            Peak { center_x: d, shape: shape(&mut rng) },
            Peak { center_x: -d, shape: shape(&mut rng) },
        ])
        .unwrap();
        let molecule = Molecule::new(1.0, alpha).unwrap();
        if let Some(kappa) = outgoing_wavenumber(k, l_in, l_out, &molecule) {
            out.push(MatrixDraw { spec, molecule, k, theta, l_in, l_out, kappa });
        }
    }
    out
}

/// Deviation of the closed-form matrix element from the quadrature oracle
/// in units of the allowed error, `max(1e-10·|oracle|, 1e-13·|Ṽ|/π)`: the
/// absolute floor is the 1e-13 allowance on the Bessel factor, carried
/// through the form factor it multiplies.
pub fn matrix_deviation(draw: &MatrixDraw) -> Result<f64, String> {
    let MatrixDraw { spec, molecule, k, theta, l_in, l_out, kappa } = draw;
    let closed = matrix_element(spec, molecule, *k, *theta, *l_in, *l_out, *kappa)
        .map_err(|e| e.to_string())?;
    let oracle = matrix_element_quadrature(
        spec,
        molecule,
        *k,
        *theta,
        *l_in,
        *l_out,
        *kappa,
        &QuadratureSpec::default(),
    )
    .map_err(|e| e.to_string())?;
    let q_x = -kappa * theta.sin();
    let q_y = k - kappa * theta.cos();
    let form = ft_total(spec, q_x, q_y).norm() / PI;
    let allowed = (TOL_MATRIX_REL * oracle.norm()).max(TOL_MATRIX_ABS * form);
    let diff = (closed - oracle).norm();
    Ok(if allowed == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / allowed
    })
}

fn matrix_check() -> CheckResult {
    let worst = matrix_draws(MATRIX_DRAWS, MATRIX_SEED)
        .par_iter()
        .enumerate()
        .map(|(i, draw)| {
            let mut w = Worst::default();
            let at = || {
                format!(
                    "draw {i}: k={:.4} θ={:.4} α={:.4} l={}→{}",
                    draw.k,
                    draw.theta,
                    draw.molecule.half_separation(),
                    draw.l_in,
                    draw.l_out
                )
            };
            match matrix_deviation(draw) {
                Ok(dev) => w.see(dev, at),
                Err(e) => w.fail(format!("{}: {e}", at())),
            }
            w
        })
        .reduce(Worst::default, Worst::merge);
    CheckResult::new("matrix.closed_vs_quadrature", CheckGroup::Matrix, worst, 1.0)
}

// ---------------------------------------------------------------- specialization

pub fn theta_grid(n: usize) -> Vec<f64> {
    crate::model::ThetaGrid::new(-FRAC_PI_2, FRAC_PI_2, n).expect("valid grid").values()
}

/// Model potentials for the three closed-form families.
pub fn specialization_models() -> Vec<(EngineVariant, Molecule, PotentialSpec)> {
    let gauss = PeakShape::gaussian(1.0, 1.0).unwrap();
    let two = PotentialSpec::new(vec![
        Peak { center_x: -2.0, shape: gauss },
        Peak { center_x: 2.0, shape: gauss },
    ])
    .unwrap();
    let grating = make_grating(2, 6.0, gauss).unwrap();
    let mixed = PotentialSpec::new(vec![
        Peak { center_x: 4.0, shape: PeakShape::polynomial_gaussian(1.0, 1.5).unwrap() },
        Peak { center_x: -4.0, shape: PeakShape::gaussian(1.0, 1.5).unwrap() },
    ])
    .unwrap();
    vec![
        (EngineVariant::ClosedTwoGaussian, Molecule::new(1.0, 1.0).unwrap(), two),
        (EngineVariant::ClosedGrating, Molecule::new(1.0, 0.8).unwrap(), grating),
        (EngineVariant::ClosedMixed, Molecule::new(1.0, 2.5).unwrap(), mixed),
    ]
}

/// Worst relative deviation between an engine and a closed form over the
/// specialization grid.
fn specialization_check(
    closed: EngineVariant,
    molecule: &Molecule,
    spec: &PotentialSpec,
) -> CheckResult {
    let thetas = theta_grid(SPECIALIZATION_THETAS);
    let internal = closed.has_internal_structure();
    let mut worst = Worst::default();
    for &k in &SPECIALIZATION_KS {
        let beam = IncidentBeam::ground_state(k).unwrap();
        let params = match ClosedFormParams::from_model(closed, molecule, &beam, spec) {
            Ok(p) => p,
            Err(e) => {
                worst.fail(e.to_string());
                continue;
            }
        };
        let (mass, doubled) = structureless_reference(molecule, spec);
        let w = thetas
            .par_iter()
            .map(|&theta| {
                let mut w = Worst::default();
                let engine = if internal {
                    cross_section_general(theta, molecule, &beam, spec).map(|c| c.sigma)
                } else {
                    Ok(cross_section_structureless(theta, mass, k, &doubled))
                };
                match (engine, cross_section_closed(closed, theta, &params)) {
                    (Ok(a), Ok(b)) => w.see(relative_deviation(a, b, 0.0), || {
                        format!("k={k} θ={theta:.6}: {a:e} vs {b:e}")
                    }),
                    (Err(e), _) | (_, Err(e)) => w.fail(e.to_string()),
                }
                w
            })
            .reduce(Worst::default, Worst::merge);
        worst = worst.merge(w);
    }
    let name = format!("specialization.{}", closed.as_str());
    CheckResult::new(&name, CheckGroup::Specialization, worst, TOL_SPECIALIZATION)
}

fn specialization_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (variant, molecule, spec) in specialization_models() {
        out.push(specialization_check(variant, &molecule, &spec));
        out.push(specialization_check(variant.structureless_partner(), &molecule, &spec));
    }
    out
}

// ---------------------------------------------------------------- limit

fn limit_check() -> CheckResult {
    let molecule = Molecule::new(1.0, 1e-8).unwrap();
    let mut worst = Worst::default();
    for (_, _, spec) in specialization_models() {
        for &k in &SPECIALIZATION_KS {
            let beam = IncidentBeam::ground_state(k).unwrap();
            let (mass, doubled) = structureless_reference(&molecule, &spec);
            for theta in theta_grid(SPECIALIZATION_THETAS) {
                match cross_section_general(theta, &molecule, &beam, &spec) {
                    Ok(g) => {
                        let s = cross_section_structureless(theta, mass, k, &doubled);
                        worst.see(relative_deviation(g.sigma, s, 0.0), || {
                            format!("k={k} θ={theta:.6}")
                        });
                    }
                    Err(e) => worst.fail(e.to_string()),
                }
            }
        }
    }
    CheckResult::new("limit.structureless", CheckGroup::Limit, worst, TOL_LIMIT)
}

// ---------------------------------------------------------------- decoupling

/// Share of `σ` carried by channels that change `|l|`, so `κ ≠ k`.
/// Zero where `σ` itself underflows.
pub fn inelastic_share(
    theta: f64,
    molecule: &Molecule,
    beam: &IncidentBeam,
    spec: &PotentialSpec,
) -> Result<f64, String> {
    let cs = cross_section_general(theta, molecule, beam, spec).map_err(|e| e.to_string())?;
    if cs.sigma == 0.0 {
        return Ok(0.0);
    }
    let off = crate::sum::neumaier(
        cs.channels
            .iter()
            .filter(|c| (c.l_in as i64).pow(2) != (c.l_out as i64).pow(2))
            .map(|c| c.sigma),
    );
    Ok(off / cs.sigma)
}

/// Large-Δ cases: `(α, Δ, k, l_in)`, each with `Δ/α ≥ 100`.
pub const DECOUPLING_CASES: [(f64, f64, f64, i32); 5] = [
    (0.01, 1.0, 1.0, 0),
    (0.01, 1.0, 20.0, 0),
    (0.1, 10.0, 20.0, 0),
    (0.1, 10.0, 35.0, 0),
    (0.01, 1.0, 20.0, 2),
];

fn decoupling_check() -> CheckResult {
    let mut worst = Worst::default();
    for (alpha, delta, k, l) in DECOUPLING_CASES {
        let molecule = Molecule::new(1.0, alpha).unwrap();
        let beam = IncidentBeam::new(k, [(l, Complex64::new(1.0, 0.0))]).unwrap();
        let shape = PeakShape::gaussian(1.0, delta).unwrap();
        let spec = PotentialSpec::new(vec![
            Peak { center_x: -3.0 * delta, shape },
            Peak { center_x: 3.0 * delta, shape },
        ])
        .unwrap();
        for theta in theta_grid(SPECIALIZATION_THETAS) {
            match inelastic_share(theta, &molecule, &beam, &spec) {
                Ok(s) => worst.see(s, || format!("α={alpha} Δ={delta} k={k} l={l} θ={theta:.6}")),
                Err(e) => worst.fail(e),
            }
        }
    }
    CheckResult::new("decoupling.large_delta", CheckGroup::Decoupling, worst, TOL_DECOUPLING)
}

// ---------------------------------------------------------------- parity

fn parity_beams() -> Vec<(Molecule, IncidentBeam)> {
    let superposed =
        IncidentBeam::new(3.0, [(-1, Complex64::new(0.6, 0.0)), (2, Complex64::new(0.0, 0.8))])
            .unwrap();
    vec![
        (Molecule::new(1.0, 2.5).unwrap(), IncidentBeam::ground_state(1.0).unwrap()),
        (Molecule::new(1.0, 1.0).unwrap(), IncidentBeam::ground_state(7.3).unwrap()),
        (Molecule::new(0.5, 1.2).unwrap(), superposed),
    ]
}

fn parity_checks() -> Vec<CheckResult> {
    let spec = specialization_models().remove(2).2;
    let mut odd = Worst::default();
    let mut threshold = Worst::default();
    for (molecule, beam) in parity_beams() {
        let k = beam.wavenumber();
        let alpha = molecule.half_separation();
        for theta in theta_grid(37) {
            let cs = match cross_section_general(theta, &molecule, &beam, &spec) {
                Ok(cs) => cs,
                Err(e) => {
                    odd.fail(e.to_string());
                    continue;
                }
            };
            for c in &cs.channels {
                if (c.l_in - c.l_out) % 2 != 0 {
                    odd.see(c.sigma.abs(), || format!("({}, {}) θ={theta:.4}", c.l_in, c.l_out));
                }
                let limit = (c.l_in as f64).powi(2) + (k * alpha).powi(2);
                let beyond = ((c.l_out as f64).powi(2) >= limit) as u8 as f64;
                threshold.see(beyond, || format!("({}, {}) present", c.l_in, c.l_out));
            }
            // Every open channel must be listed, and only those.
            let expected = open_channels(&beam, &molecule, false).len();
            if cs.channels.len() != expected {
                threshold.fail(format!("{} channels listed, {expected} open", cs.channels.len()));
            }
        }
    }
    vec![
        CheckResult::new("parity.odd_channels_zero", CheckGroup::Parity, odd, 0.0),
        CheckResult::new("parity.closed_channels_absent", CheckGroup::Parity, threshold, 0.0),
    ]
}

// ---------------------------------------------------------------- symmetry

fn mirror_check() -> CheckResult {
    let mut worst = Worst::default();
    let mut models = specialization_models();
    models.push((
        EngineVariant::General,
        Molecule::new(1.0, 1.7).unwrap(),
        make_grating(3, 2.5, PeakShape::polynomial_gaussian(0.8, 0.9).unwrap()).unwrap(),
    ));
    for (_, molecule, spec) in models {
        debug_assert!(spec.has_mirror_symmetric_centers());
        for &k in &SPECIALIZATION_KS {
            let beam = IncidentBeam::ground_state(k).unwrap();
            for theta in theta_grid(91).into_iter().filter(|t| *t > 0.0) {
                let plus = cross_section_general(theta, &molecule, &beam, &spec);
                let minus = cross_section_general(-theta, &molecule, &beam, &spec);
                match (plus, minus) {
                    (Ok(a), Ok(b)) => worst.see(relative_deviation(a.sigma, b.sigma, 0.0), || {
                        format!("k={k} θ=±{theta:.6}")
                    }),
                    (Err(e), _) | (_, Err(e)) => worst.fail(e.to_string()),
                }
            }
        }
    }
    CheckResult::new("symmetry.mirror", CheckGroup::Symmetry, worst, TOL_MIRROR)
}

// ---------------------------------------------------------------- grating

/// `σ_N(0)/σ_0(0)` for the structureless engine on a Gaussian grating.
pub fn forward_scaling(n: u32) -> f64 {
    let shape = PeakShape::gaussian(1.0, 1.0).unwrap();
    let molecule = Molecule::new(1.0, 1.0).unwrap();
    let sigma0 = |n| {
        let (mass, doubled) =
            structureless_reference(&molecule, &make_grating(n, 6.0, shape).unwrap());
        cross_section_structureless(0.0, mass, 1.0, &doubled)
    };
    sigma0(n) / sigma0(0)
}

pub const SPACING_K: f64 = 1e4;
pub const SPACING_D: f64 = 1.0;
pub const SPACING_N: u32 = 50;
pub const SPACING_SAMPLES: usize = 100_000;
pub const SPACING_WINDOW: (f64, f64) = (0.0, 5e-5);
pub const SPACING_FRINGES: usize = 5;

/// First-fringe spacing of the structureless 101-peak grating near θ = 0,
/// and the estimate `2π/(kd(2N+1))` it is compared with.
pub fn grating_spacing() -> Result<(f64, f64), String> {
    let shape = PeakShape::gaussian(1.0, 1.0).unwrap();
    let spec = make_grating(SPACING_N, SPACING_D, shape).map_err(|e| e.to_string())?;
    let molecule = Molecule::new(1.0, 1.0).unwrap();
    let beam = IncidentBeam::ground_state(SPACING_K).unwrap();
    let thetas = crate::model::ThetaGrid::new(SPACING_WINDOW.0, SPACING_WINDOW.1, SPACING_SAMPLES)
        .expect("valid grid")
        .values();
    let profile = evaluate_profile(EngineVariant::Structureless, &molecule, &beam, &spec, &thetas)
        .map_err(|e| e.to_string())?;
    let spacing = analysis::peak_spacing(&profile, SPACING_WINDOW.0, SPACING_FRINGES)
        .map_err(|e| e.to_string())?;
    let expected = TAU / (SPACING_K * SPACING_D * (2 * SPACING_N + 1) as f64);
    Ok((spacing, expected))
}

fn grating_checks() -> Vec<CheckResult> {
    let g = CheckGroup::Grating;
    let mut scaling = Worst::default();
    for n in [1u32, 2, 10] {
        let expected = ((2 * n + 1) as f64).powi(2);
        scaling.see(relative_deviation(forward_scaling(n), expected, 0.0), || format!("N={n}"));
    }
    let mut dirichlet = Worst::default();
    for n in [0u32, 1, 2, 10, 50] {
        let bound = (2 * n + 1) as f64;
        for i in 0..2000 {
            let x = -20.0 + 40.0 * i as f64 / 1999.0;
            let excess = (dirichlet_amplitude(x, n).abs() / bound - 1.0).max(0.0);
            dirichlet.see(excess, || format!("N={n} x={x:.4}"));
        }
    }
    let mut spacing = Worst::default();
    match grating_spacing() {
        Ok((s, e)) => spacing.see((s - e).abs() / e, || format!("measured {s:e}, expected {e:e}")),
        Err(e) => spacing.fail(e),
    }
    vec![
        CheckResult::new("grating.forward_scaling", g, scaling, TOL_GRATING_SCALING),
        CheckResult::new("grating.dirichlet_bound", g, dirichlet, 1e-12),
        CheckResult::new("grating.first_fringe_spacing", g, spacing, TOL_GRATING_SPACING),
    ]
}
