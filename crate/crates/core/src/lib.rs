//! Parametric self-excitation of molecular dipole oscillations above a grating.
//!
//! A polar molecule flying at speed `v` along a grating of period `L` sees its
//! distance to the surface modulated at the washboard frequency `ν = 2πv/L`.
//! The image field reflected by the surface pulls the dipole's eigenfrequency
//! by a term ∝ 1/R³, so the modulation drives a damped Mathieu equation for the
//! dipole moment.  Near the parametric resonances `ν = 2ω₀/N` the oscillation
//! self-excites once the drive beats radiative damping.
//!
//! The crate is organized along that chain:
//!
//! * [`quantities`] — unit boundary (Gaussian CGS inside), transition, grating
//!   and medium descriptions, radiative rate, resonance geometry, plasma ε₁.
//! * [`boundary`] — image dipole, static near field, retarded boundary field of
//!   a dipole above a conducting plane, and the effective damping/shift
//!   coefficients obtained by expanding that field in the retardation.
//! * [`dynamics`] — fixed-step integrators for the Mathieu model, the exact
//!   1/R³ modulation, the retarded delay equation, and the two-level Bloch
//!   system, plus envelope growth-rate measurement.
//! * [`floquet`] — monodromy matrices, Floquet exponents, threshold amplitude
//!   by bisection, and stability maps over the (ν/ω₀, drive) plane.
//! * [`estimators`] — closed-form drive amplitude, threshold criterion, growth
//!   rate, radiated power, and a combined scenario report.
//! * [`emit`] — deterministic CSV/JSON/SVG serialization.
//!
//! All internal physics is in Gaussian CGS units; convert at the boundary with
//! [`quantities::from_si`].

pub mod boundary;
pub mod constants;
pub mod dynamics;
pub mod emit;
mod error;
pub mod estimators;
pub mod floquet;
pub mod quantities;

pub use boundary::{
    boundary_field_retarded, effective_coefficients, free_space_field, image_dipole, image_factor,
    near_field, DipoleState, EffectiveCoefficients,
};
pub use dynamics::{
    fluctuation_ic, measure_growth_rate, simulate_bloch, simulate_exact_modulation,
    simulate_mathieu, simulate_retarded, BlochState, ExternalField, GrowthFit, RunMeta, Trajectory,
    DEFAULT_FIT_WINDOW,
};
pub use error::Error;
pub use estimators::{
    drive_amplitude, excitation_length, growth_rate, radiated_power, scenario_report,
    thermal_population_contrast, threshold_crossover_ratio, threshold_lhs, BeamRadiationEstimate,
    DriveSource, GrowthEstimate, ParametricDrive, PlateGeometry, Scenario, ScenarioReport,
};
pub use floquet::{
    floquet_exponent, growth_law_validity_limit, monodromy, stability_map, threshold_amplitude,
    Monodromy, StabilityMap, StabilityVerdict, ThresholdOutcome, TongueTip,
    GAMMA_RESOLUTION_FLOOR,
};
pub use quantities::{
    from_si, plasma_critical_density, plasma_epsilon, radiative_rate, resonance_geometry,
    DipoleTransition, GratingKinematics, MediumPair, Orientation, ResonanceGeometry, ResonanceSpec,
    SiUnit, Surface, TransitionMode, ValidityFlags,
};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
