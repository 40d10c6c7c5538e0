use std::f64::consts::{FRAC_PI_2, PI};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rotor_core::born::evaluate_profile;
use rotor_core::oracle::{ft_numeric, QuadratureSpec};
use rotor_core::potentials::make_grating;
use rotor_core::specfun::{bessel_j, bessel_j_batch, BesselOrderRange};
use rotor_core::{EngineVariant, IncidentBeam, Molecule, Peak, PeakShape, PotentialSpec};

fn bessel(c: &mut Criterion) {
    c.bench_function("bessel_j n=5 x=7.3", |b| b.iter(|| bessel_j(black_box(5), black_box(7.3))));
    c.bench_function("bessel_j_batch n_max=50 x=10", |b| {
        b.iter(|| bessel_j_batch(BesselOrderRange::new(50), black_box(10.0)))
    });
    c.bench_function("bessel_j_batch n_max=1100 x=1000", |b| {
        b.iter(|| bessel_j_batch(BesselOrderRange::new(1100), black_box(1000.0)))
    });
}

fn profiles(c: &mut Criterion) {
    let thetas: Vec<f64> = (0..181).map(|i| -FRAC_PI_2 + PI * i as f64 / 180.0).collect();
    let shape = PeakShape::gaussian(1.0, 1.0).unwrap();
    let pair =
        PotentialSpec::new(vec![Peak { center_x: -2.0, shape }, Peak { center_x: 2.0, shape }])
            .unwrap();
    let molecule = Molecule::new(1.0, 1.0).unwrap();
    let beam = IncidentBeam::ground_state(10.0).unwrap();
    c.bench_function("general profile 181 θ, kα=10", |b| {
        b.iter(|| evaluate_profile(EngineVariant::General, &molecule, &beam, &pair, &thetas))
    });

    let grating = make_grating(50, 1.0, shape).unwrap();
    let wide = IncidentBeam::ground_state(1e4).unwrap();
    let fine: Vec<f64> = (0..100_000).map(|i| 5e-5 * i as f64 / 99_999.0).collect();
    let mut group = c.benchmark_group("grating");
    group.sample_size(10);
    group.bench_function("structureless N=50, 1e5 θ", |b| {
        b.iter(|| evaluate_profile(EngineVariant::Structureless, &molecule, &wide, &grating, &fine))
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let shape = PeakShape::polynomial_gaussian(1.0, 1.0).unwrap();
    let quad = QuadratureSpec::default();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("ft_numeric qΔ=6", |b| b.iter(|| ft_numeric(&shape, 3.6, 4.8, &quad)));
    group.finish();
}

criterion_group!(benches, bessel, profiles, oracle);
criterion_main!(benches);
