//! Parameter types and unit handling.
//!
//! Everything inside the crate works in Gaussian CGS: lengths in cm, time in s,
//! dipole moments in esu·cm, fields in statV/cm.  Laboratory-friendly inputs
//! (Debye, µm, km/s, …) are converted once at the boundary by [`from_si`]; the
//! conversions are exact multiplications, so round trips are lossless to
//! floating-point accuracy.
//!
//! The types here describe the experiment: a dipole-active transition
//! ([`DipoleTransition`]), the corrugated flight path above the grating
//! ([`GratingKinematics`]), the dielectric pair above/below the surface
//! ([`MediumPair`]), and the parametric-resonance bookkeeping
//! ([`ResonanceSpec`]).  Constructors validate; the physics routines can then
//! assume well-formed inputs.

use std::str::FromStr;

use num_complex::Complex64;

use crate::constants::{DEBYE, ELEMENTARY_CHARGE, ELECTRON_MASS, HBAR, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Relative tolerance used when deciding whether ν sits on a parametric
/// resonance ν = 2ω₀/N.
pub const RESONANCE_REL_TOL: f64 = 1e-6;

/// A standoff counts as "near zone" when R₀√ε₁ is below this fraction of λ₀.
pub const NEAR_ZONE_FACTOR: f64 = 0.1;

/// Relative tolerance for the classical ↔ two-level consistency check
/// e²/m = 2ω₀d²/ħ when both parameterizations are supplied.
const BRIDGE_REL_TOL: f64 = 1e-9;

/// Input units accepted at the SI/laboratory boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiUnit {
    /// Dipole moment in Debye → esu·cm.
    Debye,
    /// Length in micrometers → cm.
    Micrometer,
    /// Speed in km/s → cm/s.
    KmPerS,
    /// Number density per cm³ (already CGS).
    PerCm3,
    /// Temperature in kelvin (CGS keeps kelvin).
    Kelvin,
    /// Angular frequency in rad/s (already CGS).
    HzAngular,
}

impl SiUnit {
    /// Multiplicative factor taking a value in this unit to Gaussian CGS.
    pub fn cgs_factor(self) -> f64 {
        match self {
            SiUnit::Debye => DEBYE,
            SiUnit::Micrometer => 1.0e-4,
            SiUnit::KmPerS => 1.0e5,
            SiUnit::PerCm3 => 1.0,
            SiUnit::Kelvin => 1.0,
            SiUnit::HzAngular => 1.0,
        }
    }
}

impl FromStr for SiUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "debye" | "Debye" | "D" => Ok(SiUnit::Debye),
            "um" | "micrometer" | "micron" => Ok(SiUnit::Micrometer),
            "km/s" | "km_per_s" => Ok(SiUnit::KmPerS),
            "1/cm3" | "per_cm3" | "cm^-3" => Ok(SiUnit::PerCm3),
            "K" | "kelvin" => Ok(SiUnit::Kelvin),
            "rad/s" | "hz_angular" => Ok(SiUnit::HzAngular),
            other => Err(Error::InvalidParameter(format!("unknown unit '{other}'"))),
        }
    }
}

/// Convert a laboratory value to Gaussian CGS.
///
/// Rejects non-finite input; the conversion itself is a single multiplication.
pub fn from_si(value: f64, unit: SiUnit) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite value {value:?} for unit {unit:?}"
        )));
    }
    Ok(value * unit.cgs_factor())
}

/// How the oscillator strength of the transition was specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionMode {
    /// Point charge `e` of mass `m` on a spring.
    Classical,
    /// Two-level system with transition dipole moment `d`.
    TwoLevel,
}

/// A dipole-active transition at angular frequency ω₀.
///
/// The classical and two-level pictures are linked by the correspondence
/// e²/m ↔ 2ω₀d²/ħ, which maps the classical radiation-reaction results onto
/// the quantum transition.  Either parameterization (or both, checked against
/// each other) may be supplied; [`DipoleTransition::coupling_strength`] always
/// yields e²/m in CGS (cm³/s²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleTransition {
    omega0: f64,
    charge: Option<f64>,
    mass: Option<f64>,
    dipole: Option<f64>,
    mode: TransitionMode,
}

impl DipoleTransition {
    /// Classical oscillator: charge in esu, mass in g.
    pub fn classical(omega0: f64, charge: f64, mass: f64) -> Result<Self> {
        require_positive("omega0", omega0)?;
        require_positive("charge", charge)?;
        require_positive("mass", mass)?;
        Ok(DipoleTransition {
            omega0,
            charge: Some(charge),
            mass: Some(mass),
            dipole: None,
            mode: TransitionMode::Classical,
        })
    }

    /// Two-level transition with dipole moment d in esu·cm.
    pub fn two_level(omega0: f64, dipole: f64) -> Result<Self> {
        require_positive("omega0", omega0)?;
        require_positive("dipole", dipole)?;
        Ok(DipoleTransition {
            omega0,
            charge: None,
            mass: None,
            dipole: Some(dipole),
            mode: TransitionMode::TwoLevel,
        })
    }

    /// Both parameterizations at once.  Fails unless e²/m = 2ω₀d²/ħ holds to
    /// within 10⁻⁹ relative, rather than silently preferring one of the two.
    pub fn with_both(omega0: f64, charge: f64, mass: f64, dipole: f64) -> Result<Self> {
        require_positive("omega0", omega0)?;
        require_positive("charge", charge)?;
        require_positive("mass", mass)?;
        require_positive("dipole", dipole)?;
        let classical = charge * charge / mass;
        let bridged = 2.0 * omega0 * dipole * dipole / HBAR;
        let mismatch = (classical - bridged).abs() / classical.max(bridged);
        if mismatch > BRIDGE_REL_TOL {
            return Err(Error::Config(format!(
                "classical and two-level parameterizations disagree: \
                 e²/m = {classical:.6e} but 2ω₀d²/ħ = {bridged:.6e} \
                 (relative mismatch {mismatch:.2e})"
            )));
        }
        Ok(DipoleTransition {
            omega0,
            charge: Some(charge),
            mass: Some(mass),
            dipole: Some(dipole),
            mode: TransitionMode::TwoLevel,
        })
    }

    /// Transition angular frequency (rad/s).
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Free-space wavelength λ₀ = 2πc/ω₀ (cm).
    pub fn lambda0(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.omega0
    }

    /// Oscillator coupling e²/m (cm³/s²); for a two-level system the
    /// correspondence value 2ω₀d²/ħ.
    pub fn coupling_strength(&self) -> f64 {
        match (self.charge, self.mass) {
            (Some(e), Some(m)) => e * e / m,
            _ => {
                let d = self.dipole.expect("constructor guarantees a parameterization");
                2.0 * self.omega0 * d * d / HBAR
            }
        }
    }

    /// Transition dipole moment (esu·cm), if the two-level picture applies.
    pub fn dipole_moment(&self) -> Option<f64> {
        self.dipole
    }

    /// Oscillator charge (esu), if the classical picture applies.
    pub fn charge(&self) -> Option<f64> {
        self.charge
    }

    /// Oscillator mass (g), if the classical picture applies.
    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn mode(&self) -> TransitionMode {
        self.mode
    }
}

/// Dipole orientation relative to the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Perpendicular,
    Parallel,
}

/// What lies below the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    /// |ε₂| → ∞: image factors are exactly ±1.
    PerfectConductor,
    /// Finite, possibly lossy permittivity ε₂ (physics convention e^{−iωt},
    /// so Im ε₂ > 0 means absorption).
    Dielectric { eps2: Complex64 },
}

impl Surface {
    /// Lossy-dielectric surface with ε₂ = re + i·im, for callers that do not
    /// want to depend on a complex-number type.
    pub fn dielectric(re: f64, im: f64) -> Surface {
        Surface::Dielectric {
            eps2: Complex64::new(re, im),
        }
    }
}

/// Transparent medium of permittivity ε₁ above a surface, plus the dipole
/// orientation used for image-field formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumPair {
    eps1: f64,
    surface: Surface,
    orientation: Orientation,
}

impl MediumPair {
    /// ε₁ = 1 above a perfect conductor; the workhorse configuration.
    pub fn vacuum_over_conductor(orientation: Orientation) -> Self {
        MediumPair {
            eps1: 1.0,
            surface: Surface::PerfectConductor,
            orientation,
        }
    }

    /// General pair.  ε₁ may be any non-negative number: plasma-filled upper
    /// half-spaces approach ε₁ → 0, and the radiative rate is well defined
    /// there (it vanishes).  Routines that divide by ε₁ reject zero themselves.
    pub fn new(eps1: f64, surface: Surface, orientation: Orientation) -> Result<Self> {
        if !eps1.is_finite() || eps1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps1 must be finite and non-negative, got {eps1}"
            )));
        }
        if let Surface::Dielectric { eps2 } = surface {
            if !eps2.re.is_finite() || !eps2.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "eps2 must be finite, got {eps2}"
                )));
            }
        }
        Ok(MediumPair {
            eps1,
            surface,
            orientation,
        })
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
}

/// Flight path above the grating: mean standoff R₀, relative corrugation `a`,
/// grating period L, molecule speed v.  The instantaneous standoff is
/// R(t) = R₀(1 + a·cos νt) with ν = 2πv/L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingKinematics {
    r0: f64,
    a: f64,
    l: f64,
    v: f64,
}

impl GratingKinematics {
    pub fn new(r0: f64, a: f64, l: f64, v: f64) -> Result<Self> {
        require_positive("r0", r0)?;
        require_positive("l", l)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "speed v must be finite and >= 0, got {v}"
            )));
        }
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "corrugation amplitude a must be finite and >= 0, got {a}"
            )));
        }
        if a >= 1.0 {
            // R(t) would touch or cross the surface.
            return Err(Error::InvalidParameter(format!(
                "corrugation amplitude must be < 1, got {a}"
            )));
        }
        Ok(GratingKinematics { r0, a, l, v })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn corrugation(&self) -> f64 {
        self.a
    }

    pub fn period_length(&self) -> f64 {
        self.l
    }

    pub fn speed(&self) -> f64 {
        self.v
    }

    /// Modulation angular frequency ν = 2πv/L (rad/s); zero for a molecule at
    /// rest.
    pub fn nu(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.v / self.l
    }

    /// Modulation period T = L/v (s); infinite for a molecule at rest.
    pub fn period(&self) -> f64 {
        self.l / self.v
    }

    /// Standoff at modulation phase φ = νt.
    pub fn standoff_at_phase(&self, phase: f64) -> f64 {
        self.r0 * (1.0 + self.a * phase.cos())
    }

    /// Diagnostic flags for the regime assumptions.  These are reported, never
    /// enforced: a scenario outside the near zone is meaningful, the 1/R³
    /// image formulas just stop being the whole story.
    pub fn validity_flags(&self, t: &DipoleTransition, m: &MediumPair) -> ValidityFlags {
        let near_zone_ratio = self.r0 * m.eps1().sqrt() / t.lambda0();
        ValidityFlags {
            near_zone: near_zone_ratio <= NEAR_ZONE_FACTOR,
            near_zone_ratio,
            standoff_below_period: self.r0 < self.l,
        }
    }
}

/// Regime diagnostics for a grating scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityFlags {
    /// R₀√ε₁ ≤ λ₀ × [`NEAR_ZONE_FACTOR`]: quasi-static image formulas apply.
    pub near_zone: bool,
    /// The raw ratio R₀√ε₁/λ₀ behind the flag.
    pub near_zone_ratio: f64,
    /// R₀ < L: the molecule actually resolves individual grating periods.
    pub standoff_below_period: bool,
}

/// Which parametric resonance ν = 2ω₀/N is being targeted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonanceSpec {
    order: u32,
}

impl ResonanceSpec {
    pub fn new(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "resonance order must be >= 1".to_string(),
            ));
        }
        Ok(ResonanceSpec { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The modulation frequency this resonance wants: ν = 2ω₀/N.
    pub fn target_nu(&self, omega0: f64) -> f64 {
        2.0 * omega0 / self.order as f64
    }

    /// Signed relative detuning (ν − 2ω₀/N)/(2ω₀/N).
    pub fn relative_detune(&self, nu: f64, omega0: f64) -> f64 {
        let target = self.target_nu(omega0);
        (nu - target) / target
    }

    /// True when ν matches the resonance to within `rel_tol`
    /// (use [`RESONANCE_REL_TOL`] for the default).
    pub fn is_resonant(&self, nu: f64, omega0: f64, rel_tol: f64) -> bool {
        self.relative_detune(nu, omega0).abs() <= rel_tol
    }
}

/// Free-space-style radiative decay constant of the transition in a medium of
/// permittivity ε₁:
///
/// γ = 2·(e²/m)·ω₀²√ε₁/(3c³),
///
/// which for a two-level system becomes 4ω₀³d²√ε₁/(3ħc³).  This γ is the
/// coefficient convention in which the free oscillator obeys
/// p̈ + γṗ + ω₀²p = 0 (energy decays at rate γ, amplitude at γ/2).
pub fn radiative_rate(t: &DipoleTransition, m: &MediumPair) -> f64 {
    2.0 * t.coupling_strength() * t.omega0() * t.omega0() * m.eps1().sqrt()
        / (3.0 * SPEED_OF_LIGHT.powi(3))
}

/// Grating geometry solved for the N-th parametric resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceGeometry {
    /// Washboard frequency ν = 2πv/L (rad/s).
    pub nu: f64,
    /// Transition frequency that resonates: ω₀ = Nν/2 (rad/s).
    pub omega0: f64,
    /// Radiated free-space wavelength λ₀ = 2πc/ω₀ (cm).
    pub lambda0: f64,
}

/// Given speed and grating period, which transition does the N-th resonance
/// pick out?  For N = 1 the wavelength collapses to λ₀ = 2cL/v: centimeter
/// waves for thermal speeds and micron-scale gratings.
pub fn resonance_geometry(v: f64, l: f64, order: u32) -> Result<ResonanceGeometry> {
    require_positive("v", v)?;
    require_positive("l", l)?;
    let spec = ResonanceSpec::new(order)?;
    let nu = 2.0 * std::f64::consts::PI * v / l;
    let omega0 = spec.order() as f64 * nu / 2.0;
    Ok(ResonanceGeometry {
        nu,
        omega0,
        lambda0: 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega0,
    })
}

/// Permittivity of a cold electron plasma at frequency ω:
/// ε₁ = 1 − ωₚ²/ω² with ωₚ² = 4πnₑe²/mₑ.
///
/// May be zero or negative near and below the plasma frequency; the caller
/// decides what to do with that (an upper half-space needs ε₁ ≥ 0 here).
pub fn plasma_epsilon(n_e: f64, omega: f64) -> Result<f64> {
    if !n_e.is_finite() || n_e < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "electron density must be finite and >= 0, got {n_e}"
        )));
    }
    require_positive("omega", omega)?;
    let wp2 = 4.0 * std::f64::consts::PI * n_e * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
        / ELECTRON_MASS;
    Ok(1.0 - wp2 / (omega * omega))
}

/// Electron density at which ωₚ = ω, i.e. where [`plasma_epsilon`] crosses
/// zero: nₑ = ω²mₑ/(4πe²).
pub fn plasma_critical_density(omega: f64) -> f64 {
    omega * omega * ELECTRON_MASS
        / (4.0 * std::f64::consts::PI * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE)
}

/// Shared positivity check with a uniform error message.
fn require_positive(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {value}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn debye_converts_exactly() {
        assert_eq!(from_si(1.0, SiUnit::Debye).unwrap(), 1.0e-18);
        assert_eq!(from_si(0.1, SiUnit::Micrometer).unwrap(), 1.0e-5);
        assert_eq!(from_si(0.0, SiUnit::KmPerS).unwrap(), 0.0);
    }

    #[test]
    fn unknown_unit_is_rejected() {
        assert!("furlongs".parse::<SiUnit>().is_err());
        assert!(from_si(f64::NAN, SiUnit::Debye).is_err());
    }

    proptest! {
        #[test]
        fn si_round_trip_is_lossless(value in 1e-30f64..1e30) {
            for unit in [
                SiUnit::Debye,
                SiUnit::Micrometer,
                SiUnit::KmPerS,
                SiUnit::PerCm3,
                SiUnit::Kelvin,
                SiUnit::HzAngular,
            ] {
                let cgs = from_si(value, unit).unwrap();
                let back = cgs / unit.cgs_factor();
                prop_assert!((back - value).abs() <= 1e-14 * value.abs());
            }
        }

        #[test]
        fn washboard_frequency_times_period_is_two_pi(
            v in 1e2f64..1e7,
            l in 1e-6f64..1e-2,
        ) {
            let g = GratingKinematics::new(1e-5, 0.1, l, v).unwrap();
            let product = g.nu() * g.period();
            prop_assert!((product - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        }

        #[test]
        fn plasma_epsilon_decreases_with_density(
            n in 1e8f64..1e14,
            omega in 1e10f64..1e12,
        ) {
            let lo = plasma_epsilon(n, omega).unwrap();
            let hi = plasma_epsilon(n * 2.0, omega).unwrap();
            prop_assert!(hi < lo);
            prop_assert!(lo < 1.0);
        }
    }

    #[test]
    fn radiative_rate_for_electron_oscillator() {
        // Independent arithmetic: 2e²ω₀²/(3m_ec³) at ω₀ = 1e11 rad/s.
        let t = DipoleTransition::classical(1e11, ELEMENTARY_CHARGE, ELECTRON_MASS).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        assert_relative_eq!(radiative_rate(&t, &m), 6.266_4e-2, max_relative = 1e-3);
    }

    #[test]
    fn radiative_rate_for_one_debye_transition() {
        // 4ω₀³d²/(3ħc³) at d = 1 D, ω₀ = 1e11 rad/s.
        let t = DipoleTransition::two_level(1e11, DEBYE).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        assert_relative_eq!(radiative_rate(&t, &m), 4.692_5e-8, max_relative = 1e-3);
    }

    #[test]
    fn radiative_rate_vanishes_with_eps1() {
        let t = DipoleTransition::two_level(1e11, DEBYE).unwrap();
        let m = MediumPair::new(
            0.0,
            Surface::PerfectConductor,
            Orientation::Perpendicular,
        )
        .unwrap();
        assert_eq!(radiative_rate(&t, &m), 0.0);
    }

    #[test]
    fn radiative_rate_scales_as_frequency_squared_classical() {
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let g1 = radiative_rate(
            &DipoleTransition::classical(1e10, ELEMENTARY_CHARGE, ELECTRON_MASS).unwrap(),
            &m,
        );
        let g2 = radiative_rate(
            &DipoleTransition::classical(1e11, ELEMENTARY_CHARGE, ELECTRON_MASS).unwrap(),
            &m,
        );
        assert_relative_eq!(g2 / g1, 100.0, max_relative = 1e-12);
    }

    #[test]
    fn radiative_rate_scales_as_frequency_cubed_two_level() {
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        let g1 = radiative_rate(&DipoleTransition::two_level(1e10, DEBYE).unwrap(), &m);
        let g2 = radiative_rate(&DipoleTransition::two_level(1e11, DEBYE).unwrap(), &m);
        assert_relative_eq!(g2 / g1, 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn correspondence_bridge_is_checked_when_both_given() {
        let omega0 = 1e11;
        let d = DEBYE;
        // Pick the classical pair that satisfies the bridge exactly.
        let k = 2.0 * omega0 * d * d / HBAR;
        let mass = 1.0e-20;
        let charge = (k * mass).sqrt();
        let t = DipoleTransition::with_both(omega0, charge, mass, d).unwrap();
        assert_relative_eq!(t.coupling_strength(), k, max_relative = 1e-12);

        // Perturb the mass by 1%: the mismatch must be rejected.
        let err = DipoleTransition::with_both(omega0, charge, mass * 1.01, d);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn resonance_geometry_for_thermal_beam() {
        // v = 1 km/s, L = 0.1 µm, fundamental resonance.
        let g = resonance_geometry(1e5, 1e-5, 1).unwrap();
        assert_relative_eq!(g.nu, 6.283_2e10, max_relative = 1e-4);
        assert_relative_eq!(g.omega0, 3.141_6e10, max_relative = 1e-4);
        assert_relative_eq!(g.lambda0, 5.995_8, max_relative = 1e-4);
    }

    #[test]
    fn second_order_resonance_doubles_omega_and_halves_lambda() {
        let g1 = resonance_geometry(1e5, 1e-5, 1).unwrap();
        let g2 = resonance_geometry(1e5, 1e-5, 2).unwrap();
        assert_relative_eq!(g2.omega0, 2.0 * g1.omega0, max_relative = 1e-12);
        assert_relative_eq!(g2.lambda0, g1.lambda0 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn plasma_epsilon_reference_points() {
        assert_eq!(plasma_epsilon(0.0, 1e11).unwrap(), 1.0);
        assert_relative_eq!(
            plasma_epsilon(1e12, 1e11).unwrap(),
            0.681_74,
            max_relative = 1e-4
        );
        // Critical density closes the loop: ε₁(n_crit) = 0.
        let n_crit = plasma_critical_density(1e11);
        assert_relative_eq!(n_crit, 3.141_9e12, max_relative = 1e-4);
        assert!(plasma_epsilon(n_crit, 1e11).unwrap().abs() < 1e-12);
    }

    #[test]
    fn corrugation_validation() {
        assert!(GratingKinematics::new(1e-5, 1.5, 1e-5, 1e5).is_err());
        assert!(GratingKinematics::new(1e-5, 1.0, 1e-5, 1e5).is_err());
        assert!(GratingKinematics::new(1e-5, 0.0, 1e-5, 1e5).is_ok());
        // A molecule at rest is allowed; it simply has no modulation.
        let at_rest = GratingKinematics::new(1e-5, 0.1, 1e-5, 0.0).unwrap();
        assert_eq!(at_rest.nu(), 0.0);
    }

    #[test]
    fn validity_flags_for_cm_wave_scenario() {
        let t = DipoleTransition::two_level(1e11, DEBYE).unwrap();
        let m = MediumPair::vacuum_over_conductor(Orientation::Perpendicular);
        // R₀ = 0.1 µm, L tuned to the fundamental at v = 1 km/s.
        let l = std::f64::consts::PI * 1e5 / 1e11;
        let g = GratingKinematics::new(1e-5, 0.1, l, 1e5).unwrap();
        let flags = g.validity_flags(&t, &m);
        assert!(flags.near_zone);
        assert!(flags.near_zone_ratio < 1e-4);
        // The tension of this scenario: the standoff exceeds the period.
        assert!(!flags.standoff_below_period);
    }

    #[test]
    fn resonance_predicate_uses_relative_tolerance() {
        let spec = ResonanceSpec::new(1).unwrap();
        let omega0 = 1e11;
        assert!(spec.is_resonant(2e11, omega0, RESONANCE_REL_TOL));
        assert!(spec.is_resonant(2e11 * (1.0 + 5e-7), omega0, RESONANCE_REL_TOL));
        assert!(!spec.is_resonant(2e11 * (1.0 + 5e-6), omega0, RESONANCE_REL_TOL));
    }
}
