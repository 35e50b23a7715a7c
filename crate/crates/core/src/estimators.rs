//! Closed-form feasibility estimators: modulation depth, instability
//! threshold, growth rate, interaction length and radiated power for a
//! molecular beam flying over a grating.
//!
//! The chain: the grating modulates the standoff R(t) = R₀(1 + a·cos νt),
//! which modulates the image-induced frequency shift Δ ∝ 1/R³ and turns the
//! oscillator into a parametrically driven one with effective drive
//! A = 3a·Δ(R₀)/ω₀² (times the population difference Δn for a two-level
//! transition).  At the principal resonance ν = 2ω₀ the envelope grows at
//! ω″ = ω₀A/4 against a damping of Γ/2, giving the threshold A > 4γ/ω₀ for a
//! perpendicular dipole above a conductor — equivalently, purely in geometry,
//!
//!   (9a / 256π³ε₁^{3/2}) · (λ₀/R₀)³ > 1,
//!
//! a statement about how deep in the near zone the beam must fly.
//! [`scenario_report`] assembles all of it, plus coherent-emission power for
//! a beam of given density, into one structure with validity notes.

use std::f64::consts::PI;

use crate::boundary::{effective_coefficients, EffectiveCoefficients};
use crate::constants::{BOLTZMANN, ERG_PER_S_IN_WATT, HBAR};
use crate::emit::Json;
use crate::quantities::{
    radiative_rate, DipoleTransition, GratingKinematics, MediumPair, Orientation, Surface,
    TransitionMode, ValidityFlags,
};
use crate::{Error, Result};

/// Where the parametric drive strength came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSource {
    /// Classical oscillator: full image interaction.
    Classical,
    /// Two-level transition: image interaction scaled by Δn.
    TwoLevel { delta_n: f64 },
}

/// Effective parametric drive amplitude A in
/// p̈ + Γṗ + ω₀²(1 + A·cos νt)p = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricDrive {
    pub a_drive: f64,
    pub source: DriveSource,
}

/// Modulation depth A = 3a·Δ(R₀)/ω₀² (× Δn for a two-level transition).
///
/// `delta_n` must be given iff the transition is two-level; full inversion is
/// `Some(1.0)`.
pub fn drive_amplitude(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
    delta_n: Option<f64>,
) -> Result<ParametricDrive> {
    let coeffs = effective_coefficients(transition, grating.r0(), medium)?;
    let omega0 = transition.omega0();
    let geometric = 3.0 * grating.corrugation() * coeffs.freq_shift_sq / (omega0 * omega0);
    match (transition.mode(), delta_n) {
        (TransitionMode::Classical, None) => Ok(ParametricDrive {
            a_drive: geometric,
            source: DriveSource::Classical,
        }),
        (TransitionMode::Classical, Some(_)) => Err(Error::InvalidParameter(
            "delta_n only applies to a two-level transition".to_string(),
        )),
        (TransitionMode::TwoLevel, Some(dn)) => {
            if !dn.is_finite() || dn.abs() > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "delta_n must lie in [-1, 1], got {dn}"
                )));
            }
            Ok(ParametricDrive {
                a_drive: geometric * dn,
                source: DriveSource::TwoLevel { delta_n: dn },
            })
        }
        (TransitionMode::TwoLevel, None) => Err(Error::InvalidParameter(
            "a two-level transition needs delta_n (1.0 = full inversion)".to_string(),
        )),
    }
}

/// Left-hand side of the geometric threshold condition
/// (9a / 256π³ε₁^{3/2})·(λ₀/R₀)³; values > 1 mean the principal-resonance
/// drive exceeds 4γ/ω₀.
///
/// The identity is derived for a perpendicular dipole above a perfect
/// conductor (where the near-surface damping is exactly 2γ); other
/// configurations are rejected rather than silently misapplied.
pub fn threshold_lhs(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
) -> Result<f64> {
    if medium.orientation() != Orientation::Perpendicular {
        return Err(Error::Unsupported(
            "threshold identity applies to the perpendicular orientation only".to_string(),
        ));
    }
    if !matches!(medium.surface(), Surface::PerfectConductor) {
        return Err(Error::Unsupported(
            "threshold identity applies to a perfect-conductor surface only".to_string(),
        ));
    }
    if medium.eps1() == 0.0 {
        return Err(Error::Domain(
            "eps1 = 0: threshold expression divides by eps1^(3/2)".to_string(),
        ));
    }
    let ratio = transition.lambda0() / grating.r0();
    Ok(9.0 * grating.corrugation() / (256.0 * PI.powi(3) * medium.eps1().powf(1.5))
        * ratio.powi(3))
}

/// The λ₀/R₀ ratio at which the threshold condition becomes an equality for
/// corrugation `a` in upper medium `eps1`: flying deeper (larger λ₀/R₀) than
/// this crosses into instability.
pub fn threshold_crossover_ratio(corrugation: f64, eps1: f64) -> Result<f64> {
    if !(corrugation > 0.0 && corrugation < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "corrugation must lie in (0, 1), got {corrugation}"
        )));
    }
    if !(eps1 > 0.0 && eps1.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps1 must be finite and > 0, got {eps1}"
        )));
    }
    Ok((256.0 * PI.powi(3) * eps1.powf(1.5) / (9.0 * corrugation)).cbrt())
}

/// Distance a molecule travels per e-folding of the parametric gain,
/// v/ω″ (cm).  None when there is no growth or no motion.
pub fn excitation_length(speed: f64, omega_pp: f64) -> Option<f64> {
    (speed > 0.0 && omega_pp > 0.0).then(|| speed / omega_pp)
}

/// Growth-rate bundle at the principal parametric resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEstimate {
    /// Parametric gain ω″ = ω₀A/4 (1/s), assuming resonant drive ν = 2ω₀.
    pub omega_pp: f64,
    /// Free-space radiative decay rate γ (1/s).
    pub gamma: f64,
    /// ṗ coefficient near the surface (1/s): 2γ perpendicular above a
    /// conductor, 0 parallel, γ plus absorption for a lossy dielectric.
    pub damping_coefficient: f64,
    /// Net envelope rate ω″ − (damping coefficient)/2 (1/s).
    pub omega_pp_net: f64,
    /// v/ω″ (cm), when positive and moving.
    pub excitation_length: Option<f64>,
    /// True when the net envelope rate is positive.
    pub above_threshold: bool,
}

/// Evaluate the growth chain for a transition flying over the grating.
pub fn growth_rate(
    transition: &DipoleTransition,
    grating: &GratingKinematics,
    medium: &MediumPair,
    delta_n: Option<f64>,
) -> Result<GrowthEstimate> {
    let drive = drive_amplitude(transition, grating, medium, delta_n)?;
    let coeffs = effective_coefficients(transition, grating.r0(), medium)?;
    let gamma = radiative_rate(transition, medium);
    let omega_pp = transition.omega0() * drive.a_drive / 4.0;
    let omega_pp_net = omega_pp - coeffs.damping_rate / 2.0;
    Ok(GrowthEstimate {
        omega_pp,
        gamma,
        damping_coefficient: coeffs.damping_rate,
        omega_pp_net,
        excitation_length: excitation_length(grating.speed(), omega_pp),
        above_threshold: omega_pp_net > 0.0,
    })
}

/// Emitting plate: the grating area the beam flies over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateGeometry {
    width: f64,
    length: f64,
}

impl PlateGeometry {
    /// Width and length in cm.
    pub fn new(width: f64, length: f64) -> Result<Self> {
        for (name, v) in [("width", width), ("length", length)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "plate {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(PlateGeometry { width, length })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn area(&self) -> f64 {
        self.width * self.length
    }
}

/// Spontaneous and coherent emission from the molecule layer above the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRadiationEstimate {
    /// One molecule's spontaneous power γħω₀ (erg/s).
    pub single_power: f64,
    /// Molecules over the plate: n·(width·length·R₀).
    pub n_total: f64,
    /// Molecules within one coherence cell n·λ²R₀ (λ the in-medium
    /// wavelength), capped at n_total.
    pub n_bunch: f64,
    /// True when the plate area, not λ², limited the coherence cell.
    pub bunch_limited_by_plate: bool,
    /// N_total·(single power) (erg/s).
    pub incoherent_power: f64,
    /// N_bunch²·(single power) (erg/s): the in-phase dipoles radiate as one
    /// large dipole.
    pub coherent_power: f64,
}

impl BeamRadiationEstimate {
    pub fn single_power_watts(&self) -> f64 {
        self.single_power / ERG_PER_S_IN_WATT
    }

    pub fn incoherent_power_watts(&self) -> f64 {
        self.incoherent_power / ERG_PER_S_IN_WATT
    }

    pub fn coherent_power_watts(&self) -> f64 {
        self.coherent_power / ERG_PER_S_IN_WATT
    }
}

/// Radiated power for a beam of density `beam_density` (1/cm³) filling a
/// layer of thickness R₀ above the plate.
pub fn radiated_power(
    transition: &DipoleTransition,
    medium: &MediumPair,
    beam_density: f64,
    plate: &PlateGeometry,
    r0: f64,
) -> Result<BeamRadiationEstimate> {
    if !(beam_density.is_finite() && beam_density > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beam density must be finite and > 0, got {beam_density}"
        )));
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "standoff must be finite and > 0, got {r0}"
        )));
    }
    if medium.eps1() == 0.0 {
        return Err(Error::Domain(
            "eps1 = 0: in-medium wavelength diverges".to_string(),
        ));
    }
    let gamma = radiative_rate(transition, medium);
    let single_power = gamma * HBAR * transition.omega0();
    let lambda_medium = transition.lambda0() / medium.eps1().sqrt();
    let n_total = beam_density * plate.area() * r0;
    let n_bunch_raw = beam_density * lambda_medium * lambda_medium * r0;
    let bunch_limited_by_plate = n_bunch_raw > n_total;
    let n_bunch = n_bunch_raw.min(n_total);
    Ok(BeamRadiationEstimate {
        single_power,
        n_total,
        n_bunch,
        bunch_limited_by_plate,
        incoherent_power: n_total * single_power,
        coherent_power: n_bunch * n_bunch * single_power,
    })
}

/// Equilibrium population contrast |Δn| of a two-level transition at
/// temperature T: tanh(ħω₀/2k_BT).  This is the thermal baseline an
/// experiment starts from; a pump that inverts the medium overrides it.
pub fn thermal_population_contrast(omega0: f64, temperature: f64) -> Result<f64> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega0 must be finite and > 0, got {omega0}"
        )));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be finite and > 0, got {temperature}"
        )));
    }
    Ok((HBAR * omega0 / (2.0 * BOLTZMANN * temperature)).tanh())
}

/// Everything needed to assess one experimental configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub transition: DipoleTransition,
    pub grating: GratingKinematics,
    pub medium: MediumPair,
    /// Population difference for a two-level transition.
    pub delta_n: Option<f64>,
    /// Beam density (1/cm³) for the radiated-power estimate.
    pub beam_density: Option<f64>,
    /// Plate geometry for the radiated-power estimate.
    pub plate: Option<PlateGeometry>,
}

/// Full feasibility assessment of a [`Scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub omega0: f64,
    pub lambda0: f64,
    /// Washboard modulation frequency 2πv/L (rad/s).
    pub nu: f64,
    /// Nearest parametric resonance order N (ν ≈ 2ω₀/N), when moving.
    pub resonance_order: Option<usize>,
    /// (ν − 2ω₀/N)/(2ω₀/N) for that order.
    pub resonance_detune: Option<f64>,
    pub validity: ValidityFlags,
    pub coefficients: EffectiveCoefficients,
    pub drive: ParametricDrive,
    pub growth: GrowthEstimate,
    /// Geometric threshold LHS (perpendicular/conductor only).
    pub threshold_lhs: Option<f64>,
    /// λ₀/R₀ needed to reach threshold at this corrugation.
    pub crossover_wavelength_ratio: Option<f64>,
    pub radiation: Option<BeamRadiationEstimate>,
    /// Caveats about applicability of the estimates.
    pub notes: Vec<String>,
}

/// Assemble the full report.  Errors are attributed to the scenario input
/// that caused them.
pub fn scenario_report(s: &Scenario) -> Result<ScenarioReport> {
    let t = &s.transition;
    let g = &s.grating;
    let m = &s.medium;
    let coefficients =
        effective_coefficients(t, g.r0(), m).map_err(|e| e.attribute("medium"))?;
    let drive = drive_amplitude(t, g, m, s.delta_n).map_err(|e| e.attribute("delta_n"))?;
    let growth = growth_rate(t, g, m, s.delta_n).map_err(|e| e.attribute("delta_n"))?;
    let validity = g.validity_flags(t, m);

    let lhs = match threshold_lhs(t, g, m) {
        Ok(v) => Some(v),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e.attribute("medium")),
    };
    // A flat grating never reaches threshold at any depth, so the crossover
    // ratio only exists for a > 0.
    let crossover = if lhs.is_some() && g.corrugation() > 0.0 {
        Some(threshold_crossover_ratio(g.corrugation(), m.eps1()).map_err(|e| e.attribute("grating"))?)
    } else {
        None
    };

    let nu = g.nu();
    let (resonance_order, resonance_detune) = if nu > 0.0 {
        let order = (2.0 * t.omega0() / nu).round().max(1.0);
        let target = 2.0 * t.omega0() / order;
        (Some(order as usize), Some((nu - target) / target))
    } else {
        (None, None)
    };

    let radiation = match (s.beam_density, &s.plate) {
        (Some(density), Some(plate)) => Some(
            radiated_power(t, m, density, plate, g.r0()).map_err(|e| e.attribute("beam"))?,
        ),
        _ => None,
    };

    let mut notes = Vec::new();
    if g.speed() == 0.0 {
        notes.push(
            "grating speed is zero: the standoff never oscillates, so there is no parametric drive"
                .to_string(),
        );
    }
    if let Some(detune) = resonance_detune {
        if detune.abs() > 0.05 {
            notes.push(format!(
                "modulation is {:+.1}% off the N={} resonance; growth figures assume resonant drive",
                100.0 * detune,
                resonance_order.unwrap_or(1)
            ));
        }
    }
    if !validity.near_zone {
        notes.push(format!(
            "standoff is not deep in the near zone (R0*sqrt(eps1)/lambda0 = {:.2e}); \
             the static-image coefficients overestimate the interaction",
            validity.near_zone_ratio
        ));
    }
    if !validity.standoff_below_period {
        notes.push(
            "standoff exceeds the grating period; higher spatial harmonics average the \
             corrugation down and the single-harmonic modulation depth is optimistic"
                .to_string(),
        );
    }
    if drive.a_drive.abs() >= 1.0 {
        notes.push(format!(
            "modulation depth |A| = {:.3e} is outside the linear regime",
            drive.a_drive
        ));
    }
    if let DriveSource::TwoLevel { delta_n } = drive.source {
        if delta_n <= 0.0 {
            notes.push(
                "population difference <= 0: the medium absorbs instead of amplifying".to_string(),
            );
        }
    }
    if let Some(r) = &radiation {
        if r.bunch_limited_by_plate {
            notes.push(
                "coherence cell lambda^2 exceeds the plate area; N_bunch capped at N_total"
                    .to_string(),
            );
        }
    }
    if s.beam_density.is_some() != s.plate.is_some() {
        notes.push(
            "radiated-power estimate skipped: it needs both beam density and plate geometry"
                .to_string(),
        );
    }

    Ok(ScenarioReport {
        omega0: t.omega0(),
        lambda0: t.lambda0(),
        nu,
        resonance_order,
        resonance_detune,
        validity,
        coefficients,
        drive,
        growth,
        threshold_lhs: lhs,
        crossover_wavelength_ratio: crossover,
        radiation,
        notes,
    })
}

impl ScenarioReport {
    pub fn to_json(&self) -> Json {
        let drive = match self.drive.source {
            DriveSource::Classical => Json::obj([
                ("amplitude", Json::Num(self.drive.a_drive)),
                ("source", Json::Str("classical".to_string())),
            ]),
            DriveSource::TwoLevel { delta_n } => Json::obj([
                ("amplitude", Json::Num(self.drive.a_drive)),
                ("source", Json::Str("two-level".to_string())),
                ("delta_n", Json::Num(delta_n)),
            ]),
        };
        let resonance = match (self.resonance_order, self.resonance_detune) {
            (Some(order), Some(detune)) => Json::obj([
                ("order", Json::Int(order as i64)),
                ("relative_detune", Json::Num(detune)),
            ]),
            _ => Json::Null,
        };
        let radiation = match &self.radiation {
            Some(r) => Json::obj([
                ("single_power_erg_per_s", Json::Num(r.single_power)),
                ("n_total", Json::Num(r.n_total)),
                ("n_bunch", Json::Num(r.n_bunch)),
                ("bunch_limited_by_plate", Json::Bool(r.bunch_limited_by_plate)),
                ("incoherent_power_erg_per_s", Json::Num(r.incoherent_power)),
                ("coherent_power_erg_per_s", Json::Num(r.coherent_power)),
                ("coherent_power_watt", Json::Num(r.coherent_power_watts())),
            ]),
            None => Json::Null,
        };
        Json::obj([
            ("omega0_rad_per_s", Json::Num(self.omega0)),
            ("lambda0_cm", Json::Num(self.lambda0)),
            ("nu_rad_per_s", Json::Num(self.nu)),
            ("resonance", resonance),
            (
                "validity",
                Json::obj([
                    ("near_zone", Json::Bool(self.validity.near_zone)),
                    ("near_zone_ratio", Json::Num(self.validity.near_zone_ratio)),
                    (
                        "standoff_below_period",
                        Json::Bool(self.validity.standoff_below_period),
                    ),
                ]),
            ),
            (
                "coefficients",
                Json::obj([
                    ("damping_rate_per_s", Json::Num(self.coefficients.damping_rate)),
                    (
                        "freq_shift_sq_per_s2",
                        Json::Num(self.coefficients.freq_shift_sq),
                    ),
                    ("retardation_s", Json::Num(self.coefficients.retardation)),
                ]),
            ),
            ("drive", drive),
            (
                "growth",
                Json::obj([
                    ("omega_pp_per_s", Json::Num(self.growth.omega_pp)),
                    ("gamma_per_s", Json::Num(self.growth.gamma)),
                    (
                        "damping_coefficient_per_s",
                        Json::Num(self.growth.damping_coefficient),
                    ),
                    ("omega_pp_net_per_s", Json::Num(self.growth.omega_pp_net)),
                    (
                        "excitation_length_cm",
                        Json::from_option(self.growth.excitation_length),
                    ),
                    ("above_threshold", Json::Bool(self.growth.above_threshold)),
                ]),
            ),
            (
                "threshold",
                Json::obj([
                    ("lhs", Json::from_option(self.threshold_lhs)),
                    (
                        "crossover_lambda0_over_r0",
                        Json::from_option(self.crossover_wavelength_ratio),
                    ),
                ]),
            ),
            ("radiation", radiation),
            (
                "notes",
                Json::Arr(self.notes.iter().map(|n| Json::Str(n.clone())).collect()),
            ),
        ])
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("parametric excitation feasibility report\n");
        out.push_str("========================================\n");
        out.push_str(&format!(
            "transition   omega0 = {:.6e} rad/s   lambda0 = {:.6e} cm\n",
            self.omega0, self.lambda0
        ));
        match (self.resonance_order, self.resonance_detune) {
            (Some(order), Some(detune)) => out.push_str(&format!(
                "modulation   nu = {:.6e} rad/s   nearest resonance N = {order} (detune {:+.2}%)\n",
                self.nu,
                100.0 * detune
            )),
            _ => out.push_str(&format!("modulation   nu = {:.6e} rad/s (static)\n", self.nu)),
        }
        out.push_str(&format!(
            "image        freq shift^2 = {:.6e} 1/s^2   damping = {:.6e} 1/s   delay = {:.6e} s\n",
            self.coefficients.freq_shift_sq,
            self.coefficients.damping_rate,
            self.coefficients.retardation
        ));
        let source = match self.drive.source {
            DriveSource::Classical => "classical".to_string(),
            DriveSource::TwoLevel { delta_n } => format!("two-level, delta_n = {delta_n}"),
        };
        out.push_str(&format!(
            "drive        A = {:.6e} ({source})\n",
            self.drive.a_drive
        ));
        match (self.threshold_lhs, self.crossover_wavelength_ratio) {
            (Some(lhs), Some(ratio)) => out.push_str(&format!(
                "threshold    LHS = {:.6e} (>1 is above threshold)   crossover lambda0/R0 = {:.4}\n",
                lhs, ratio
            )),
            _ => out.push_str("threshold    geometric criterion not applicable here\n"),
        }
        out.push_str(&format!(
            "growth       omega'' = {:.6e} 1/s   gamma = {:.6e} 1/s   net = {:.6e} 1/s\n",
            self.growth.omega_pp, self.growth.gamma, self.growth.omega_pp_net
        ));
        match self.growth.excitation_length {
            Some(l) => out.push_str(&format!("             e-folding length = {:.4} cm\n", l)),
            None => out.push_str("             e-folding length: n/a (no growth or no motion)\n"),
        }
        out.push_str(&format!(
            "verdict      {}\n",
            if self.growth.above_threshold {
                "above threshold: parametric excitation grows"
            } else {
                "below threshold: damping wins"
            }
        ));
        if let Some(r) = &self.radiation {
            out.push_str(&format!(
                "radiation    W1 = {:.6e} erg/s   N_total = {:.4e}   N_bunch = {:.4e}\n",
                r.single_power, r.n_total, r.n_bunch
            ));
            out.push_str(&format!(
                "             P_incoherent = {:.4e} W   P_coherent = {:.4e} W\n",
                r.incoherent_power_watts(),
                r.coherent_power_watts()
            ));
        }
        if !self.notes.is_empty() {
            out.push_str("notes\n");
            for n in &self.notes {
                out.push_str(&format!("  - {n}\n"));
            }
        }
        out
    }
}
