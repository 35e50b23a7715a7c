//! Oscillator–population dynamics of a two-level transition above the
//! surface, the minimal step beyond the fixed-amplitude classical picture.
//!
//! The dipole obeys the image-shifted oscillator equation with every image
//! term scaled by the population difference Δn (inverted molecules, Δn > 0,
//! see an amplifying image; saturated ones, Δn = 0, none):
//!
//!   p̈ + Γ(R)ṗ + (ω₀² − Δ(R)·Δn)p = (2ω₀d²/ħ)·Δn·E_ext,
//!
//! while the population exchanges energy with the external field and relaxes
//! radiatively toward the pump-maintained value Δn_pump:
//!
//!   dΔn/dt = −γ(Δn − Δn_pump) − (2/ħω₀)·E_ext·ṗ.
//!
//! Γ and Δ are the effective coefficients of
//! [`crate::boundary::effective_coefficients`] evaluated at the instantaneous
//! standoff R(t) = R₀(1 + a·cos νt).  The model is linear in p for a frozen
//! Δn, so its parametric growth rate at resonance is the classical one scaled
//! by Δn — the property the tests pin down.  Δn is not clamped to [−1, 1]
//! during integration; leaving the physical range signals a drive too strong
//! for this weak-field model.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::constants::HBAR;
use crate::dynamics::{assemble, check_grid, require_finite, rk4_step, RunMeta, Trajectory};
use crate::quantities::{radiative_rate, DipoleTransition, GratingKinematics, MediumPair, Surface};
use crate::{boundary, Error, Result};

/// Time-dependent external driving field E_ext(t) (statV/cm, t in seconds).
#[derive(Clone)]
pub struct ExternalField {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    description: String,
}

impl ExternalField {
    /// No external drive.
    pub fn none() -> Self {
        ExternalField {
            f: Arc::new(|_| 0.0),
            description: "none".to_string(),
        }
    }

    /// E₀·cos(ωt + φ).
    pub fn sinusoid(amplitude: f64, omega: f64, phase: f64) -> Self {
        ExternalField {
            f: Arc::new(move |t| amplitude * (omega * t + phase).cos()),
            description: format!(
                "sinusoid(amplitude={amplitude:.6e} statV/cm, omega={omega:.6e} rad/s, phase={phase:.6})"
            ),
        }
    }

    /// Arbitrary field; `description` is carried for reporting.
    pub fn new(f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, description: impl Into<String>) -> Self {
        ExternalField {
            f,
            description: description.into(),
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for ExternalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalField")
            .field("description", &self.description)
            .finish()
    }
}

/// Initial condition of a Bloch run, including the pump-maintained population
/// difference the relaxation pulls toward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    /// Dipole moment p (esu·cm).
    pub p: f64,
    /// ṗ (esu·cm/s).
    pub p_dot: f64,
    /// Initial population difference Δn ∈ [−1, 1].
    pub delta_n: f64,
    /// Pump-maintained population difference Δn_pump ∈ [−1, 1].
    pub delta_n_pump: f64,
}

pub fn simulate_bloch(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
    state0: BlochState,
    field: &ExternalField,
    horizon_periods: f64,
    steps_per_period: usize,
) -> Result<Trajectory> {
    if transition.dipole_moment().is_none() {
        return Err(Error::InvalidParameter(
            "population dynamics need a two-level transition (dipole moment)".to_string(),
        ));
    }
    require_finite("state0.p", state0.p)?;
    require_finite("state0.p_dot", state0.p_dot)?;
    for (name, value) in [
        ("delta_n", state0.delta_n),
        ("delta_n_pump", state0.delta_n_pump),
    ] {
        require_finite(name, value)?;
        if value.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [-1, 1], got {value}"
            )));
        }
    }
    let n_steps = check_grid(horizon_periods, steps_per_period)?;

    let omega0 = transition.omega0();
    let r0 = grating.r0();
    let a = grating.corrugation();
    let nu_hat = grating.nu() / omega0;
    let at_r0 = boundary::effective_coefficients(transition, r0, medium)?;
    let gamma = radiative_rate(transition, medium);
    let gamma_hat = gamma / omega0;
    let (damping_const, damping_cubed) = match medium.surface() {
        Surface::PerfectConductor => (at_r0.damping_rate, 0.0),
        Surface::Dielectric { .. } => (gamma, at_r0.damping_rate - gamma),
    };
    let s_bar = at_r0.freq_shift_sq / (omega0 * omega0);
    let k_over_omega0_sq = transition.coupling_strength() / (omega0 * omega0);
    let feedback = 2.0 / (HBAR * omega0);
    let pump = state0.delta_n_pump;

    let h = 2.0 * PI / steps_per_period as f64;
    let mut deriv = |tau: f64, y: &[f64; 3]| {
        let cube = (1.0 + a * (nu_hat * tau).cos()).powi(-3);
        let damping_hat = (damping_const + damping_cubed * cube) / omega0;
        let e_ext = field.evaluate(tau / omega0);
        let [p, v, dn] = *y;
        [
            v,
            -damping_hat * v - (1.0 - s_bar * cube * dn) * p + k_over_omega0_sq * dn * e_ext,
            -gamma_hat * (dn - pump) - feedback * e_ext * v,
        ]
    };

    let mut tau_grid = Vec::with_capacity(n_steps + 1);
    let mut p = Vec::with_capacity(n_steps + 1);
    let mut v = Vec::with_capacity(n_steps + 1);
    let mut dn = Vec::with_capacity(n_steps + 1);
    let mut y = [state0.p, state0.p_dot / omega0, state0.delta_n];
    tau_grid.push(0.0);
    p.push(y[0]);
    v.push(y[1]);
    dn.push(y[2]);
    for i in 0..n_steps {
        y = rk4_step(&mut deriv, i as f64 * h, &y, h);
        tau_grid.push((i + 1) as f64 * h);
        p.push(y[0]);
        v.push(y[1]);
        dn.push(y[2]);
    }

    Ok(assemble(
        tau_grid,
        p,
        v,
        Some(dn),
        RunMeta {
            model: "bloch".to_string(),
            omega0,
            params: vec![
                ("r0".to_string(), r0),
                ("corrugation".to_string(), a),
                ("nu".to_string(), grating.nu()),
                ("eps1".to_string(), medium.eps1()),
                ("delta_n0".to_string(), state0.delta_n),
                ("delta_n_pump".to_string(), pump),
                ("freq_shift_sq_at_r0".to_string(), at_r0.freq_shift_sq),
                ("gamma".to_string(), gamma),
            ],
            steps_per_period,
            horizon_periods,
            seed: None,
        },
    ))
}
