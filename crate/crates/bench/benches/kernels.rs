//! Benchmarks for the numerical kernels that dominate real workloads:
//! time-domain integration, envelope fitting, monodromy propagation,
//! stability-map assembly, and the full feasibility-report chain.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use parmol::{
    measure_growth_rate, monodromy, scenario_report, simulate_mathieu, simulate_retarded,
    stability_map, DipoleTransition, GratingKinematics, MediumPair, Orientation, PlateGeometry,
    Scenario,
};

const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;

fn grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
        .collect()
}

/// The benchmark feasibility scenario: 1-Debye transition at 1e11 rad/s,
/// 0.1 um standoff, 10% corrugation, 1 km/s, principal resonance.
fn baseline_scenario() -> Scenario {
    let transition = DipoleTransition::two_level(1e11, 1e-18).unwrap();
    let speed = 1e5;
    let period = std::f64::consts::PI * speed / 1e11;
    Scenario {
        transition,
        grating: GratingKinematics::new(1e-5, 0.1, period, speed).unwrap(),
        medium: MediumPair::vacuum_over_conductor(Orientation::Perpendicular),
        delta_n: Some(1.0),
        beam_density: Some(1e17),
        plate: Some(PlateGeometry::new(1.0, 10.0).unwrap()),
    }
}

/// Classical strong-coupling oscillator used by the delay-equation bench.
fn retarded_inputs() -> (DipoleTransition, GratingKinematics, MediumPair) {
    let omega0 = 1e9;
    let r0 = 0.15 * SPEED_OF_LIGHT / omega0; // round-trip phase 0.3 rad
    let k = 0.1 * 4.0 * r0.powi(3) * omega0 * omega0;
    let t = DipoleTransition::classical(omega0, k.sqrt(), 1.0).unwrap();
    let g = GratingKinematics::new(r0, 0.0, 1.0, 0.0).unwrap();
    let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
    (t, g, m)
}

fn bench_integration(c: &mut Criterion) {
    c.bench_function("mathieu_100_periods_256_steps", |b| {
        b.iter(|| {
            simulate_mathieu(
                black_box(1.0),
                black_box(1e-3),
                black_box(0.05),
                black_box(2.0),
                (1.0, 0.0),
                100.0,
                256,
            )
            .unwrap()
        })
    });

    let (t, g, m) = retarded_inputs();
    c.bench_function("retarded_50_periods_256_steps", |b| {
        b.iter(|| {
            simulate_retarded(black_box(&t), &g, &m, (1e-18, 0.0), 50.0, 256).unwrap()
        })
    });
}

fn bench_growth_fit(c: &mut Criterion) {
    let traj = simulate_mathieu(1.0, 1e-3, 0.05, 2.0, (1.0, 0.0), 400.0, 256).unwrap();
    c.bench_function("growth_fit_400_periods", |b| {
        b.iter(|| measure_growth_rate(black_box(&traj), 0.5).unwrap())
    });
}

fn bench_floquet(c: &mut Criterion) {
    c.bench_function("monodromy_512_steps", |b| {
        b.iter(|| monodromy(black_box(1.0), 1e-3, 0.05, 2.0, 512).unwrap())
    });

    let nus = grid(1.8, 2.2, 21);
    let amps = grid(0.0, 0.1, 21);
    c.bench_function("stability_map_21x21_256_steps", |b| {
        b.iter(|| stability_map(black_box(1.0), 1e-3, &nus, &amps, 256).unwrap())
    });
}

fn bench_estimators(c: &mut Criterion) {
    let s = baseline_scenario();
    c.bench_function("scenario_report_baseline", |b| {
        b.iter(|| scenario_report(black_box(&s)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_integration,
    bench_growth_fit,
    bench_floquet,
    bench_estimators
);
criterion_main!(benches);
