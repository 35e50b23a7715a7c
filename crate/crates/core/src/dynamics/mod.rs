//! Time-domain integration of the dipole above a corrugated surface.
//!
//! Four models of increasing fidelity, all integrated with fixed-step RK4 in
//! the dimensionless time τ = ω₀t:
//!
//! * [`simulate_mathieu`] — the linearized oscillator
//!   p̈ + 2γṗ + ω₀²(1 + A·cos νt)p = 0, the analytically tractable reference.
//! * [`simulate_exact_modulation`] — the image-field oscillator with the full
//!   1/R³(t) dependence of the shift, R(t) = R₀(1 + a·cos νt), of which the
//!   Mathieu form is the first order in a.
//! * [`simulate_retarded`] — drops the near-zone expansion entirely and feeds
//!   back the boundary field at the retarded time t − 2R/c (delay
//!   differential equation, method of steps).
//! * [`simulate_bloch`] — couples the oscillator to a two-level population
//!   difference Δn, which scales the image shift and relaxes toward a pumped
//!   value.
//!
//! `horizon_periods` always counts carrier periods 2π/ω₀ and
//! `steps_per_period` is the RK4 resolution of one carrier period.
//! Trajectories are reported in physical units (seconds, esu·cm).
//! Everything is deterministic: same inputs, bit-identical outputs.

mod bloch;
mod growth;
mod retarded;
mod rk4;

pub use bloch::{simulate_bloch, BlochState, ExternalField};
pub use growth::{measure_growth_rate, GrowthFit, DEFAULT_FIT_WINDOW};
pub use retarded::simulate_retarded;

pub(crate) use rk4::rk4_step;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::HBAR;
use crate::quantities::{radiative_rate, DipoleTransition, GratingKinematics, MediumPair, Surface};
use crate::{boundary, Error, Result};

/// Minimum RK4 steps per carrier period accepted by any integrator.
pub const MIN_STEPS_PER_PERIOD: usize = 64;

/// Guard against accidentally requesting a trajectory that will not fit in
/// memory (steps × horizon).
const MAX_TOTAL_STEPS: usize = 20_000_000;

/// Description of a finished run: which model, at what resolution, with which
/// named parameters.  Carried by every [`Trajectory`] so output files can
/// record how they were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    /// Model identifier: "mathieu", "exact-modulation", "retarded" or "bloch".
    pub model: String,
    /// Carrier frequency ω₀ (rad/s) used to scale the dimensionless time.
    pub omega0: f64,
    /// Named scalar parameters of the run, in the order they were applied.
    pub params: Vec<(String, f64)>,
    /// RK4 steps per carrier period.
    pub steps_per_period: usize,
    /// Integration horizon in carrier periods.
    pub horizon_periods: f64,
    /// Seed used for the initial condition, when one was drawn.
    pub seed: Option<u64>,
}

/// A sampled dipole trajectory in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times (s), uniformly spaced from 0.
    pub times: Vec<f64>,
    /// Dipole moment p (esu·cm).
    pub p: Vec<f64>,
    /// ṗ (esu·cm/s).
    pub p_dot: Vec<f64>,
    /// Population difference Δn when the model evolves one.
    pub delta_n: Option<Vec<f64>>,
    pub meta: RunMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrate p̈ + 2γṗ + ω₀²(1 + A·cos νt)p = 0.
///
/// `omega0` is the full natural frequency including any static shift the
/// caller has already folded in; `gamma` is the amplitude decay rate of the
/// undriven oscillator (the ṗ coefficient is 2γ).  `ic` is (p, ṗ) at t = 0 in
/// physical units.  `nu = 0` is allowed and turns the drive into a constant
/// detuning 1 + A.
pub fn simulate_mathieu(
    omega0: f64,
    gamma: f64,
    drive_amplitude: f64,
    nu: f64,
    ic: (f64, f64),
    horizon_periods: f64,
    steps_per_period: usize,
) -> Result<Trajectory> {
    require_positive_finite("omega0", omega0)?;
    require_nonnegative_finite("gamma", gamma)?;
    require_finite("drive_amplitude", drive_amplitude)?;
    require_nonnegative_finite("nu", nu)?;
    require_finite("ic.p", ic.0)?;
    require_finite("ic.p_dot", ic.1)?;
    let n_steps = check_grid(horizon_periods, steps_per_period)?;

    let gamma_hat = gamma / omega0;
    let nu_hat = nu / omega0;
    let h = 2.0 * PI / steps_per_period as f64;
    let mut deriv = |tau: f64, y: &[f64; 2]| {
        [
            y[1],
            -2.0 * gamma_hat * y[1] - (1.0 + drive_amplitude * (nu_hat * tau).cos()) * y[0],
        ]
    };
    let (tau, p, v) = integrate_pair(&mut deriv, [ic.0, ic.1 / omega0], h, n_steps);
    Ok(assemble(
        tau,
        p,
        v,
        None,
        RunMeta {
            model: "mathieu".to_string(),
            omega0,
            params: vec![
                ("gamma".to_string(), gamma),
                ("drive_amplitude".to_string(), drive_amplitude),
                ("nu".to_string(), nu),
            ],
            steps_per_period,
            horizon_periods,
            seed: None,
        },
    ))
}

/// Integrate the image-field oscillator with the exact 1/R³ modulation of the
/// standoff, R(t) = R₀(1 + a·cos νt):
///
///   p̈ + Γ(R)ṗ + (ω₀² − Δ(R₀)·(R₀/R)³)p = 0,
///
/// where Γ and Δ come from [`boundary::effective_coefficients`].  Above a
/// perfect conductor Γ is R-independent; for a lossy dielectric its absorption
/// part scales as 1/R³ as well and is modulated accordingly.
pub fn simulate_exact_modulation(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
    ic: (f64, f64),
    horizon_periods: f64,
    steps_per_period: usize,
) -> Result<Trajectory> {
    require_finite("ic.p", ic.0)?;
    require_finite("ic.p_dot", ic.1)?;
    let n_steps = check_grid(horizon_periods, steps_per_period)?;

    let omega0 = transition.omega0();
    let r0 = grating.r0();
    let a = grating.corrugation();
    let nu_hat = grating.nu() / omega0;
    // Validates the medium (ε₁ ≠ 0, no surface-mode pole) once; every
    // R-dependence below is an exact 1/R³ rescaling of these coefficients.
    let at_r0 = boundary::effective_coefficients(transition, r0, medium)?;
    let gamma = radiative_rate(transition, medium);
    let (damping_const, damping_cubed) = match medium.surface() {
        Surface::PerfectConductor => (at_r0.damping_rate, 0.0),
        Surface::Dielectric { .. } => (gamma, at_r0.damping_rate - gamma),
    };
    let s_bar = at_r0.freq_shift_sq / (omega0 * omega0);

    let h = 2.0 * PI / steps_per_period as f64;
    let mut deriv = |tau: f64, y: &[f64; 2]| {
        let cube = (1.0 + a * (nu_hat * tau).cos()).powi(-3);
        let gamma_hat = (damping_const + damping_cubed * cube) / omega0;
        [y[1], -gamma_hat * y[1] - (1.0 - s_bar * cube) * y[0]]
    };
    let (tau, p, v) = integrate_pair(&mut deriv, [ic.0, ic.1 / omega0], h, n_steps);
    Ok(assemble(
        tau,
        p,
        v,
        None,
        RunMeta {
            model: "exact-modulation".to_string(),
            omega0,
            params: vec![
                ("r0".to_string(), r0),
                ("corrugation".to_string(), a),
                ("nu".to_string(), grating.nu()),
                ("eps1".to_string(), medium.eps1()),
                ("freq_shift_sq_at_r0".to_string(), at_r0.freq_shift_sq),
                ("damping_rate_at_r0".to_string(), at_r0.damping_rate),
            ],
            steps_per_period,
            horizon_periods,
            seed: None,
        },
    ))
}

/// Draw a fluctuation-scale initial condition (p, ṗ) with a uniformly random
/// phase: p = δp·cos φ, ṗ = −δp·ω₀·sin φ.
///
/// The amplitude δp is the transition's characteristic dipole scale — the
/// matrix element d for a two-level transition, or e·√(ħ/2mω₀) (charge times
/// zero-point length) for a classical oscillator.  The linear models don't
/// care about the overall scale, only the phase; the draw is deterministic in
/// `seed`.
pub fn fluctuation_ic(transition: &DipoleTransition, seed: u64) -> (f64, f64) {
    let scale = match transition.dipole_moment() {
        Some(d) => d,
        None => {
            // classical() guarantees charge and mass are present
            let q = transition.charge().expect("classical transition has charge");
            let m = transition.mass().expect("classical transition has mass");
            q * (HBAR / (2.0 * m * transition.omega0())).sqrt()
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = rng.random::<f64>() * 2.0 * PI;
    (
        scale * phase.cos(),
        -scale * transition.omega0() * phase.sin(),
    )
}

fn integrate_pair(
    deriv: &mut impl FnMut(f64, &[f64; 2]) -> [f64; 2],
    ic_hat: [f64; 2],
    h: f64,
    n_steps: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut tau_grid = Vec::with_capacity(n_steps + 1);
    let mut p = Vec::with_capacity(n_steps + 1);
    let mut v = Vec::with_capacity(n_steps + 1);
    let mut y = ic_hat;
    tau_grid.push(0.0);
    p.push(y[0]);
    v.push(y[1]);
    for i in 0..n_steps {
        let tau = i as f64 * h;
        y = rk4_step(deriv, tau, &y, h);
        tau_grid.push((i + 1) as f64 * h);
        p.push(y[0]);
        v.push(y[1]);
    }
    (tau_grid, p, v)
}

fn assemble(
    tau: Vec<f64>,
    p: Vec<f64>,
    v: Vec<f64>,
    delta_n: Option<Vec<f64>>,
    meta: RunMeta,
) -> Trajectory {
    let omega0 = meta.omega0;
    Trajectory {
        times: tau.into_iter().map(|t| t / omega0).collect(),
        p,
        p_dot: v.into_iter().map(|w| w * omega0).collect(),
        delta_n,
        meta,
    }
}

fn check_grid(horizon_periods: f64, steps_per_period: usize) -> Result<usize> {
    if !horizon_periods.is_finite() || horizon_periods <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "horizon_periods must be finite and > 0, got {horizon_periods}"
        )));
    }
    if steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(Error::InvalidParameter(format!(
            "steps_per_period must be at least {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"
        )));
    }
    let n_steps = (horizon_periods * steps_per_period as f64).round() as usize;
    if n_steps == 0 {
        return Err(Error::InvalidParameter(
            "horizon shorter than one integration step".to_string(),
        ));
    }
    if n_steps > MAX_TOTAL_STEPS {
        return Err(Error::InvalidParameter(format!(
            "run would take {n_steps} steps (> {MAX_TOTAL_STEPS}); lower horizon_periods or steps_per_period"
        )));
    }
    Ok(n_steps)
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {value}"
        )));
    }
    Ok(())
}

fn require_nonnegative_finite(name: &str, value: f64) -> Result<()> {
    require_finite(name, value)?;
    if value < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be >= 0, got {value}"
        )));
    }
    Ok(())
}

fn require_positive_finite(name: &str, value: f64) -> Result<()> {
    require_finite(name, value)?;
    if value <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {value}"
        )));
    }
    Ok(())
}
