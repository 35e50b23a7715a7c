//! Independent-route consistency checks: every quantity that can be computed
//! two ways must agree, with no shared code between the routes beyond the
//! integrator primitives.

use num_complex::Complex64;
use parmol::{
    floquet_exponent, measure_growth_rate, monodromy, radiative_rate, simulate_mathieu,
    simulate_retarded, stability_map, threshold_amplitude, DipoleTransition, GratingKinematics,
    MediumPair, Orientation, ThresholdOutcome,
};

const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;

/// Floquet exponents vs time-domain envelope fits over a (γ̂, A, ν̂) grid.
/// Wherever the exponent is resolvable (|σ| > 5e-4 ω₀), the envelope fit of a
/// 400-period trajectory must agree within 5 %.
#[test]
fn floquet_exponents_match_time_domain_envelopes() {
    let mut compared = 0;
    for gamma in [1e-3, 5e-3] {
        for a_drive in [0.02, 0.05, 0.1] {
            for nu_hat in [1.9, 2.0, 2.06] {
                let sigma_f =
                    floquet_exponent(&monodromy(1.0, gamma, a_drive, nu_hat, 1024).unwrap())
                        .exponent;
                if sigma_f.abs() <= 5e-4 {
                    continue; // too slow to measure against a finite horizon
                }
                // Detuned stable solutions beat at the difference between the
                // drive and the Floquet quasi-frequency; the fit window must
                // span several beats for the envelope slope to converge.
                let horizon = if sigma_f < 0.0 { 1000.0 } else { 400.0 };
                let traj =
                    simulate_mathieu(1.0, gamma, a_drive, nu_hat, (1.0, 0.0), horizon, 256)
                        .unwrap();
                let fit = measure_growth_rate(&traj, 0.5).unwrap();
                assert!(
                    (fit.omega_pp - sigma_f).abs() <= 0.05 * sigma_f.abs(),
                    "gamma={gamma}, A={a_drive}, nu={nu_hat}: envelope {:.4e} vs exponent {:.4e}",
                    fit.omega_pp,
                    sigma_f
                );
                compared += 1;
            }
        }
    }
    assert!(compared >= 10, "only {compared} grid points were resolvable");
}

/// Newton-solve the exact characteristic equation of the delay oscillator,
///   λ² + γ̂λ + 1 − s·(1 + λθ [+ λ²θ²])·e^{−λθ} = 0,
/// and return Re λ of the root near λ = i.
fn characteristic_envelope(gamma_hat: f64, s: f64, theta: f64, parallel: bool) -> f64 {
    let mut lambda = Complex64::new(0.0, 1.0);
    for _ in 0..80 {
        let e = (-lambda * theta).exp();
        let mut bracket = 1.0 + lambda * theta;
        let mut dbracket = Complex64::new(theta, 0.0);
        if parallel {
            bracket += lambda * lambda * theta * theta;
            dbracket += 2.0 * lambda * theta * theta;
        }
        let f = lambda * lambda + gamma_hat * lambda + 1.0 - s * bracket * e;
        let fp = 2.0 * lambda + gamma_hat - s * (dbracket - bracket * theta) * e;
        lambda -= f / fp;
    }
    lambda.re
}

/// The delay integrator vs the characteristic root, both orientations, at a
/// retardation (θ₀ = 0.8) far outside the near zone.  The parallel residual
/// must also confirm the damping cancellation: |σ| < 0.1 γ̂.
#[test]
fn retarded_envelopes_match_characteristic_roots_for_both_orientations() {
    let s_bar = 0.2;
    let r0 = 0.4 * SPEED_OF_LIGHT; // θ₀ = 0.8 at ω₀ = 1, ε₁ = 1
    let theta = 0.8;
    let k = s_bar * 4.0 * r0.powi(3);
    let transition = DipoleTransition::classical(1.0, k.sqrt(), 1.0).unwrap();
    let grating = GratingKinematics::new(r0, 0.0, 1.0, 0.0).unwrap();

    for (orientation, s, parallel) in [
        (Orientation::Perpendicular, s_bar, false),
        (Orientation::Parallel, s_bar / 2.0, true),
    ] {
        let medium = MediumPair::vacuum_over_conductor(orientation);
        let gamma_hat = radiative_rate(&transition, &medium);
        let sigma_root = characteristic_envelope(gamma_hat, s, theta, parallel);
        let traj =
            simulate_retarded(&transition, &grating, &medium, (1.0, 0.0), 150.0, 256).unwrap();
        let fit = measure_growth_rate(&traj, 0.5).unwrap();
        assert!(
            (fit.omega_pp - sigma_root).abs() <= 0.05 * sigma_root.abs().max(0.01 * gamma_hat),
            "{orientation:?}: envelope {:.4e} vs characteristic root {sigma_root:.4e}",
            fit.omega_pp
        );
        if parallel {
            assert!(
                sigma_root.abs() < 0.1 * gamma_hat,
                "parallel damping should nearly cancel: residual {sigma_root:.3e} vs gamma {gamma_hat:.3e}"
            );
        } else {
            assert!(
                sigma_root < -0.5 * gamma_hat,
                "perpendicular dipole should damp strongly: {sigma_root:.3e} vs gamma {gamma_hat:.3e}"
            );
        }
    }
}

/// Map contour vs independent bisection on the second tongue (ν ≈ ω₀), plus a
/// spot check that the parallel map assembly stored each exponent exactly
/// where a serial monodromy puts it.
#[test]
fn second_tongue_contour_agrees_with_bisection() {
    let gamma = 1e-3;
    let nu_ratios: Vec<f64> = (0..11).map(|i| 0.95 + 0.01 * i as f64).collect();
    let amplitudes: Vec<f64> = (0..41).map(|j| 0.0075 * j as f64).collect();
    let map = stability_map(1.0, gamma, &nu_ratios, &amplitudes, 512).unwrap();

    let at_resonance = map
        .contour
        .iter()
        .find(|(nu, _)| (*nu - 1.0).abs() < 1e-9)
        .expect("contour point at nu_ratio = 1");
    let bisected = match threshold_amplitude(1.0, gamma, 1.0, 512).unwrap() {
        ThresholdOutcome::Unstable { a_threshold } => a_threshold,
        other => panic!("expected a second-tongue instability, got {other:?}"),
    };
    let cell = amplitudes[1] - amplitudes[0];
    assert!(
        (at_resonance.1 - bisected).abs() <= cell,
        "contour {} vs bisection {bisected} (cell {cell})",
        at_resonance.1
    );

    for (i, j) in [(0, 0), (5, 20), (10, 40)] {
        let direct = floquet_exponent(
            &monodromy(1.0, gamma, amplitudes[j], nu_ratios[i], 512).unwrap(),
        )
        .exponent;
        assert_eq!(
            map.exponents[i][j], direct,
            "map cell ({i},{j}) differs from a serial recomputation"
        );
    }
}

/// The analytic growth law ω″ = ω₀A/4 − γ and the Floquet exponent separate
/// smoothly: inside the reported validity limit they agree to the stated
/// tolerance, and well beyond it they visibly do not.
#[test]
fn growth_law_validity_limit_is_a_real_boundary() {
    let gamma = 1e-3;
    let rel_tol = 0.02;
    let limit = parmol::growth_law_validity_limit(1.0, gamma, 512, rel_tol).unwrap();
    assert!(limit >= 0.03, "limit {limit} unexpectedly tight");

    let deviation = |a_drive: f64| {
        let sigma =
            floquet_exponent(&monodromy(1.0, gamma, a_drive, 2.0, 512).unwrap()).exponent;
        let predicted = a_drive / 4.0 - gamma;
        (sigma - predicted).abs() / predicted.abs().max(a_drive / 4.0)
    };
    assert!(
        deviation(limit) <= rel_tol,
        "deviation at the limit {limit} exceeds the tolerance"
    );
    if limit <= 0.5 {
        assert!(
            deviation(1.0) > rel_tol,
            "first-order law still holds at A = 1; the limit {limit} is too conservative"
        );
    }
}
