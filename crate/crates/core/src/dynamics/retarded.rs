//! Delay-differential integration of the dipole with the full retarded
//! boundary field, the check on the near-zone expansion used everywhere else.
//!
//! In dimensionless time τ = ω₀t the oscillator above a perfect conductor
//! reads
//!
//!   p″(τ) = −p(τ) − γ̂·p′(τ)
//!           + s(τ)·[ p(τ−θ) + θ·p′(τ−θ) + θ²·p″(τ−θ) (∥ only) ],
//!
//! with θ(τ) = 2R(τ)√ε₁·ω₀/c the round-trip retardation,
//! s = (e²/m)/(4R³ε₁ω₀²) (⊥) or /(8R³ε₁ω₀²) (∥) the instantaneous image
//! coupling, and γ̂ = γ/ω₀ the free-space radiation reaction written as local
//! damping.  Expanding the delayed bracket for small θ shows the boundary term
//! contributes a second −γ̂·p′ for ⊥ (total damping 2γ) and +γ̂·p′ for ∥
//! (total 0), which is exactly what [`crate::boundary::effective_coefficients`]
//! encodes — so this integrator and the expanded ones must agree in the deep
//! near zone, and their drift apart at larger θ measures the expansion error.
//!
//! Integration uses the method of steps: fixed-grid RK4 whose delayed values
//! come from cubic Hermite interpolation of the stored (p, p′) history.  The
//! delayed acceleration needed by the ∥ term is the interpolant's second
//! derivative (O(h²) accurate; it enters only at O(θ²), so the error it adds
//! is far below the RK4 truncation).  The delay is computed from the
//! instantaneous standoff, and the pre-start history is the frozen initial
//! condition: p ≡ p₀, p′ ≡ ṗ₀/ω₀, p″ ≡ 0 for τ < 0.

use std::f64::consts::PI;

use crate::constants::SPEED_OF_LIGHT;
use crate::dynamics::{
    assemble, check_grid, require_finite, rk4_step, RunMeta, Trajectory,
};
use crate::quantities::{
    radiative_rate, DipoleTransition, GratingKinematics, MediumPair, Orientation, Surface,
};
use crate::{Error, Result};

/// Fewest integration steps the shortest retardation may span; below this the
/// Hermite history lookup would reach into the step being built.
const MIN_DELAY_STEPS: f64 = 4.0;

pub fn simulate_retarded(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
    ic: (f64, f64),
    horizon_periods: f64,
    steps_per_period: usize,
) -> Result<Trajectory> {
    require_finite("ic.p", ic.0)?;
    require_finite("ic.p_dot", ic.1)?;
    if !matches!(medium.surface(), Surface::PerfectConductor) {
        return Err(Error::Unsupported(
            "retarded integration is only available above a perfect conductor".to_string(),
        ));
    }
    if medium.eps1() == 0.0 {
        return Err(Error::Domain(
            "eps1 = 0: image coupling divides by eps1".to_string(),
        ));
    }
    let n_steps = check_grid(horizon_periods, steps_per_period)?;
    let h = 2.0 * PI / steps_per_period as f64;

    let omega0 = transition.omega0();
    let eps1 = medium.eps1();
    let sqrt_eps1 = eps1.sqrt();
    let r0 = grating.r0();
    let a = grating.corrugation();
    let nu_hat = grating.nu() / omega0;
    let gamma_hat = radiative_rate(transition, medium) / omega0;
    let k = transition.coupling_strength();
    let (q_denom, parallel) = match medium.orientation() {
        Orientation::Perpendicular => (4.0, false),
        Orientation::Parallel => (8.0, true),
    };

    let theta_min = 2.0 * r0 * (1.0 - a) * sqrt_eps1 * omega0 / SPEED_OF_LIGHT;
    if theta_min < MIN_DELAY_STEPS * h {
        return Err(Error::Config(format!(
            "round-trip retardation at closest approach spans {:.2} integration steps \
             (need at least {MIN_DELAY_STEPS}); increase steps_per_period",
            theta_min / h
        )));
    }

    let ic_hat = [ic.0, ic.1 / omega0];
    let mut hp: Vec<f64> = Vec::with_capacity(n_steps + 1);
    let mut hv: Vec<f64> = Vec::with_capacity(n_steps + 1);
    hp.push(ic_hat[0]);
    hv.push(ic_hat[1]);

    let mut y = ic_hat;
    for i in 0..n_steps {
        let tau_i = i as f64 * h;
        let mut deriv = |tau: f64, state: &[f64; 2]| {
            let standoff = r0 * (1.0 + a * (nu_hat * tau).cos());
            let theta = 2.0 * standoff * sqrt_eps1 * omega0 / SPEED_OF_LIGHT;
            let s = k / (q_denom * standoff.powi(3) * eps1 * omega0 * omega0);
            let (pd, vd, ad) = history_at(&hp, &hv, h, ic_hat, tau - theta);
            let mut bracket = pd + theta * vd;
            if parallel {
                bracket += theta * theta * ad;
            }
            [
                state[1],
                -state[0] - gamma_hat * state[1] + s * bracket,
            ]
        };
        y = rk4_step(&mut deriv, tau_i, &y, h);
        hp.push(y[0]);
        hv.push(y[1]);
    }

    let tau_grid: Vec<f64> = (0..=n_steps).map(|i| i as f64 * h).collect();
    Ok(assemble(
        tau_grid,
        hp,
        hv,
        None,
        RunMeta {
            model: "retarded".to_string(),
            omega0,
            params: vec![
                ("r0".to_string(), r0),
                ("corrugation".to_string(), a),
                ("nu".to_string(), grating.nu()),
                ("eps1".to_string(), eps1),
                (
                    "shift_ratio_at_r0".to_string(),
                    k / (q_denom * r0.powi(3) * eps1 * omega0 * omega0),
                ),
                (
                    "retardation_theta0".to_string(),
                    2.0 * r0 * sqrt_eps1 * omega0 / SPEED_OF_LIGHT,
                ),
            ],
            steps_per_period,
            horizon_periods,
            seed: None,
        },
    ))
}

/// History lookup: (p, p′, p″) at τ_d from the cubic Hermite interpolant of
/// the stored grid, or the frozen initial condition for τ_d < 0.
fn history_at(hp: &[f64], hv: &[f64], h: f64, ic_hat: [f64; 2], tau_d: f64) -> (f64, f64, f64) {
    if tau_d < 0.0 {
        return (ic_hat[0], ic_hat[1], 0.0);
    }
    let j = ((tau_d / h) as usize).min(hp.len().saturating_sub(2));
    let u = (tau_d - j as f64 * h) / h;
    let (p0, v0) = (hp[j], hv[j]);
    let (p1, v1) = (hp[j + 1], hv[j + 1]);
    let u2 = u * u;
    let u3 = u2 * u;
    // Value basis.
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    let value = h00 * p0 + h * h10 * v0 + h01 * p1 + h * h11 * v1;
    // First derivative basis (d/du, then /h for d/dτ).
    let d00 = 6.0 * u2 - 6.0 * u;
    let d10 = 3.0 * u2 - 4.0 * u + 1.0;
    let d01 = -6.0 * u2 + 6.0 * u;
    let d11 = 3.0 * u2 - 2.0 * u;
    let deriv = (d00 * p0 + d01 * p1) / h + d10 * v0 + d11 * v1;
    // Second derivative basis.
    let s00 = 12.0 * u - 6.0;
    let s10 = 6.0 * u - 4.0;
    let s01 = -12.0 * u + 6.0;
    let s11 = 6.0 * u - 2.0;
    let second = (s00 * p0 + s01 * p1) / (h * h) + (s10 * v0 + s11 * v1) / h;
    (value, deriv, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        measure_growth_rate, simulate_exact_modulation, DEFAULT_FIT_WINDOW,
    };
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    /// Synthetic classical transition at ω₀ = 1 rad/s with a chosen image
    /// coupling s̄ = K/(4R₀³) (⊥, vacuum over conductor, mass 1 g).
    fn synthetic_transition(s_bar: f64, r0: f64) -> DipoleTransition {
        let k = s_bar * 4.0 * r0.powi(3);
        DipoleTransition::classical(1.0, k.sqrt(), 1.0).unwrap()
    }

    fn static_grating(r0: f64) -> GratingKinematics {
        // v = 0: the standoff never changes; period length is irrelevant.
        GratingKinematics::new(r0, 0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn far_from_the_surface_only_free_space_damping_remains() {
        // R₀ = 10³ λ₀ makes the boundary coupling s ~ 1e-14; the envelope
        // must decay at γ/2, the free-space radiation-reaction rate.
        let gamma_hat = 1e-2;
        let r0 = 1e3 * 2.0 * PI * SPEED_OF_LIGHT;
        let k = gamma_hat * 3.0 * SPEED_OF_LIGHT.powi(3) / 2.0;
        let t = DipoleTransition::classical(1.0, k.sqrt(), 1.0).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let traj =
            simulate_retarded(&t, &static_grating(r0), &m, (1.0, 0.0), 120.0, 256).unwrap();
        let fit = measure_growth_rate(&traj, DEFAULT_FIT_WINDOW).unwrap();
        assert_relative_eq!(fit.omega_pp, -gamma_hat / 2.0, max_relative = 0.02);
    }

    #[test]
    fn perpendicular_dipole_damps_at_twice_free_space() {
        // s̄ = 0.15, θ₀ = 0.4.  To leading order in s̄ the delayed bracket
        // adds a second −γ̂ṗ, so the envelope decays at γ̂ = s̄θ₀³/3 = 3.2e-3;
        // at this coupling the image shift also drags the carrier down ~8%,
        // which softens the boundary damping by O(10%).  The integrator must
        // match the exact characteristic root of
        //   λ² + γ̂λ + 1 − s̄(1 + λθ₀)e^{−λθ₀} = 0
        // to 1%, and that root must sit within 15% of the leading-order −γ̂.
        let s_bar = 0.15;
        let theta0 = 0.4f64;
        let r0 = 0.2 * SPEED_OF_LIGHT;
        let t = synthetic_transition(s_bar, r0);
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let gamma_hat = radiative_rate(&t, &m);
        assert_relative_eq!(
            gamma_hat,
            s_bar * theta0.powi(3) / 3.0,
            max_relative = 1e-12
        );

        // Newton iteration for the root near λ = i (f' = 2λ + γ̂ + s̄θ₀²λe^{−λθ₀}).
        let mut lambda = Complex64::new(0.0, 1.0);
        for _ in 0..50 {
            let e = (-lambda * theta0).exp();
            let f = lambda * lambda + gamma_hat * lambda + 1.0
                - s_bar * (1.0 + lambda * theta0) * e;
            let fp = 2.0 * lambda + gamma_hat + s_bar * theta0 * theta0 * lambda * e;
            lambda -= f / fp;
        }
        let sigma = lambda.re;

        let traj =
            simulate_retarded(&t, &static_grating(r0), &m, (1.0, 0.0), 150.0, 256).unwrap();
        let fit = measure_growth_rate(&traj, DEFAULT_FIT_WINDOW).unwrap();
        assert_relative_eq!(fit.omega_pp, sigma, max_relative = 0.01);
        assert_relative_eq!(sigma, -gamma_hat, max_relative = 0.15);
    }

    #[test]
    fn parallel_dipole_damping_cancels() {
        // Same geometry, parallel orientation: the reflected wave returns in
        // phase and cancels the free-space damping at O(θ³).
        let s_bar = 0.15;
        let r0 = 0.2 * SPEED_OF_LIGHT;
        let t = synthetic_transition(s_bar, r0);
        let m = MediumPair::vacuum_over_conductor(Orientation::Parallel);
        let gamma_hat = radiative_rate(&t, &m);
        let traj =
            simulate_retarded(&t, &static_grating(r0), &m, (1.0, 0.0), 150.0, 256).unwrap();
        let fit = measure_growth_rate(&traj, DEFAULT_FIT_WINDOW).unwrap();
        assert!(
            fit.omega_pp.abs() <= 0.05 * gamma_hat,
            "parallel envelope rate {} vs free-space gamma {}",
            fit.omega_pp,
            gamma_hat
        );
    }

    #[test]
    fn deep_near_zone_matches_the_expanded_equation() {
        // R₀ = 0.01 λ₀ (θ₀ ≈ 0.126): the retarded and expanded oscillators
        // may drift apart only through O(θ²) corrections.
        let omega0 = 1e11;
        let lambda0 = 2.0 * PI * SPEED_OF_LIGHT / omega0;
        let r0 = 0.01 * lambda0;
        let s_bar = 1e-4;
        let k = s_bar * 4.0 * r0.powi(3) * omega0 * omega0;
        let t = DipoleTransition::classical(omega0, k.sqrt(), 1.0).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let g = static_grating(r0);
        let ic = (1e-18, 0.0);
        let retarded = simulate_retarded(&t, &g, &m, ic, 50.0, 256).unwrap();
        let expanded = simulate_exact_modulation(&t, &g, &m, ic, 50.0, 256).unwrap();
        let scale = expanded.p.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let max_dev = retarded
            .p
            .iter()
            .zip(&expanded.p)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        assert!(
            max_dev / scale < 5e-4,
            "retarded vs expanded deviation {:.2e}",
            max_dev / scale
        );
    }

    #[test]
    fn quiescent_dipole_stays_exactly_zero() {
        let t = synthetic_transition(0.15, 0.2 * SPEED_OF_LIGHT);
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let traj = simulate_retarded(
            &t,
            &static_grating(0.2 * SPEED_OF_LIGHT),
            &m,
            (0.0, 0.0),
            20.0,
            256,
        )
        .unwrap();
        assert!(traj.p.iter().all(|&x| x == 0.0));
        assert!(traj.p_dot.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let t = synthetic_transition(0.1, 0.2 * SPEED_OF_LIGHT);
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let g = GratingKinematics::new(0.2 * SPEED_OF_LIGHT, 0.05, 0.2 * SPEED_OF_LIGHT, 1e5)
            .unwrap();
        let a = simulate_retarded(&t, &g, &m, (1.0, 0.0), 30.0, 256).unwrap();
        let b = simulate_retarded(&t, &g, &m, (1.0, 0.0), 30.0, 256).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.p_dot, b.p_dot);
    }

    #[test]
    fn unresolvable_delay_is_rejected() {
        // θ₀ ≈ 6.7e-4 ≪ 4h: the grid cannot resolve the retardation.
        let t = DipoleTransition::classical(1e11, 1e-10, 1e-27).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let err = simulate_retarded(&t, &static_grating(1e-7), &m, (1.0, 0.0), 10.0, 256)
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("steps_per_period"));
    }

    #[test]
    fn dielectric_surface_is_rejected() {
        let t = synthetic_transition(0.1, 0.2 * SPEED_OF_LIGHT);
        let m = MediumPair::new(
            1.0,
            Surface::Dielectric {
                eps2: Complex64::new(2.0, 0.0),
            },
            Orientation::Perpendicular,
        )
        .unwrap();
        assert!(matches!(
            simulate_retarded(
                &t,
                &static_grating(0.2 * SPEED_OF_LIGHT),
                &m,
                (1.0, 0.0),
                10.0,
                256
            ),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hermite_interpolation_reproduces_smooth_histories() {
        // Fill a grid with cos τ and check value/derivative/second-derivative
        // recovery mid-segment at h = 2π/256.
        let h = 2.0 * PI / 256.0;
        let n = 512;
        let hp: Vec<f64> = (0..=n).map(|i| (i as f64 * h).cos()).collect();
        let hv: Vec<f64> = (0..=n).map(|i| -(i as f64 * h).sin()).collect();
        let tau = 101.37 * h;
        let (p, v, a) = history_at(&hp, &hv, h, [1.0, 0.0], tau);
        assert_relative_eq!(p, tau.cos(), epsilon = 1e-8);
        assert_relative_eq!(v, -tau.sin(), epsilon = 1e-6);
        assert_relative_eq!(a, -tau.cos(), epsilon = 1e-3);
    }
}
