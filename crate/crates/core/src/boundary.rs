//! Image-dipole fields above a flat interface and their effective
//! damping/shift coefficients.
//!
//! A dipole p at height R above the interface between media ε₁ (top) and ε₂
//! (bottom) induces an image p′ = ∓p(ε₁ − ε₂)/(ε₁ + ε₂) a distance R below the
//! surface (upper sign: perpendicular, lower: parallel — the convention used
//! everywhere in this module).  The static near field the image exerts back on
//! the dipole is
//!
//!   E = −(∓3 − 1)·p′/(16R³ε₁),
//!
//! which for a perfect conductor collapses to +p/(4R³ε₁) (⊥) and +p/(8R³ε₁)
//! (∥).  Keeping the round-trip retardation t₁ = 2R√ε₁/c, the reflected field
//! of a perfect conductor is
//!
//!   E_b = (1∓1)·p̈(t−t₁)/(4Rc²) + ṗ(t−t₁)/((3∓1)R²c√ε₁)
//!       + p(t−t₁)/(2(3∓1)R³ε₁).
//!
//! Expanding E_b to third order in t₁ (near zone, R ≪ λ₀) reproduces the
//! static 1/R³ term, cancels the ṗ term, and leaves a ⃛p contribution equal to
//! ±1 × the free-space radiation reaction: the perpendicular dipole damps at
//! twice the free-space rate, the parallel one not at all, at this order.  See
//! docs/boundary-expansion.md for the step-by-step algebra.  The resulting
//! oscillator is
//!
//!   p̈ + Γ·ṗ + (ω₀² − Δ)p = 0,
//!
//! with Γ and Δ packaged as [`EffectiveCoefficients`].

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::quantities::{radiative_rate, DipoleTransition, MediumPair, Orientation, Surface};
use crate::{Error, Result};

/// Snapshot of a dipole's moment and its time derivatives, the inputs the
/// field formulas need.  `p_dddot` is only required by the free-space
/// radiation-reaction term and may be omitted elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleState {
    /// Dipole moment (esu·cm).
    pub p: f64,
    /// ṗ (esu·cm/s).
    pub p_dot: f64,
    /// p̈ (esu·cm/s²).
    pub p_ddot: f64,
    /// ⃛p (esu·cm/s³), when known.
    pub p_dddot: Option<f64>,
}

impl DipoleState {
    pub fn new(p: f64, p_dot: f64, p_ddot: f64) -> Self {
        DipoleState {
            p,
            p_dot,
            p_ddot,
            p_dddot: None,
        }
    }
}

/// Image-moment factor p′/p for the medium's orientation: ∓(ε₁ − ε₂)/(ε₁ + ε₂).
///
/// For a perfect conductor this is exactly +1 (⊥) or −1 (∥), with no limit
/// arithmetic involved.  Fails on the surface-mode pole ε₁ + ε₂ = 0.
pub fn image_factor(m: &MediumPair) -> Result<Complex64> {
    let sign = match m.orientation() {
        Orientation::Perpendicular => -1.0,
        Orientation::Parallel => 1.0,
    };
    match m.surface() {
        Surface::PerfectConductor => Ok(Complex64::new(-sign, 0.0)),
        Surface::Dielectric { eps2 } => {
            let denom = eps2 + m.eps1();
            if denom.norm() == 0.0 {
                return Err(Error::SurfacePole);
            }
            Ok(sign * (Complex64::new(m.eps1(), 0.0) - eps2) / denom)
        }
    }
}

/// Image dipole moment p′ induced below the surface.  Complex for lossy ε₂
/// (the imaginary part is the quadrature component of the image response).
pub fn image_dipole(p: f64, m: &MediumPair) -> Result<Complex64> {
    Ok(image_factor(m)? * p)
}

/// Static near field of the image acting back on the dipole (statV/cm),
/// E = −(∓3 − 1)p′/(16R³ε₁).
pub fn near_field(p: f64, r: f64, m: &MediumPair) -> Result<Complex64> {
    require_standoff(r)?;
    require_eps1_nonzero(m)?;
    let p_img = image_dipole(p, m)?;
    let orient = match m.orientation() {
        // −(−3−1)/16 = +1/4 and −(3−1)/16 = −1/8.
        Orientation::Perpendicular => 0.25,
        Orientation::Parallel => -0.125,
    };
    Ok(p_img * orient / (r.powi(3) * m.eps1()))
}

/// Free-space radiation-reaction field E = 2⃛p√ε₁/(3c³) (statV/cm).
pub fn free_space_field(p_dddot: f64, eps1: f64) -> f64 {
    2.0 * p_dddot * eps1.sqrt() / (3.0 * SPEED_OF_LIGHT.powi(3))
}

/// Retarded boundary field of a dipole above a perfect conductor (statV/cm).
///
/// `history` must already be evaluated at the retarded time t − t₁; this
/// routine only applies the coefficients.  Only the perfect-conductor surface
/// has a closed retarded form here; finite ε₂ is rejected.
pub fn boundary_field_retarded(history: &DipoleState, r: f64, m: &MediumPair) -> Result<f64> {
    require_standoff(r)?;
    require_eps1_nonzero(m)?;
    if !matches!(m.surface(), Surface::PerfectConductor) {
        return Err(Error::Unsupported(
            "retarded boundary field is only available for a perfect conductor".to_string(),
        ));
    }
    let eps1 = m.eps1();
    let sqrt_eps1 = eps1.sqrt();
    let c = SPEED_OF_LIGHT;
    Ok(match m.orientation() {
        Orientation::Perpendicular => {
            history.p_dot / (2.0 * r * r * c * sqrt_eps1) + history.p / (4.0 * r.powi(3) * eps1)
        }
        Orientation::Parallel => {
            history.p_ddot / (2.0 * r * c * c)
                + history.p_dot / (4.0 * r * r * c * sqrt_eps1)
                + history.p / (8.0 * r.powi(3) * eps1)
        }
    })
}

/// Effective oscillator coefficients after expanding the boundary field in the
/// retardation: p̈ + damping_rate·ṗ + (ω₀² − freq_shift_sq)·p = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    /// Coefficient of ṗ (1/s).  2γ for ⊥ above a conductor (free-space
    /// reaction plus an equal boundary contribution), 0 for ∥ (they cancel).
    pub damping_rate: f64,
    /// Downward shift of ω₀² (1/s²): (e²/m)/(4R³ε₁) for ⊥, /(8R³ε₁) for ∥.
    pub freq_shift_sq: f64,
    /// Round-trip retardation t₁ = 2R√ε₁/c (s) that was expanded in.
    pub retardation: f64,
}

/// Compute [`EffectiveCoefficients`] for a transition at standoff `r`.
///
/// For a perfect conductor both the 1/R³ shift and the interference of the
/// reflected wave with the free-space radiation reaction are included.  For a
/// finite ε₂ only the near-field image is available: the shift follows from
/// Re p′, a lossy surface adds an absorption term ∝ Im ε₂/R³ to the damping,
/// and the damping is otherwise the free-space γ (the reflected-wave
/// interference term has no closed form here).
pub fn effective_coefficients(
    t: &DipoleTransition,
    r: f64,
    m: &MediumPair,
) -> Result<EffectiveCoefficients> {
    require_standoff(r)?;
    require_eps1_nonzero(m)?;
    let gamma = radiative_rate(t, m);
    let k = t.coupling_strength();
    let retardation = 2.0 * r * m.eps1().sqrt() / SPEED_OF_LIGHT;
    match m.surface() {
        Surface::PerfectConductor => {
            let (damping, denom) = match m.orientation() {
                Orientation::Perpendicular => (2.0 * gamma, 4.0),
                Orientation::Parallel => (0.0, 8.0),
            };
            Ok(EffectiveCoefficients {
                damping_rate: damping,
                freq_shift_sq: k / (denom * r.powi(3) * m.eps1()),
                retardation,
            })
        }
        Surface::Dielectric { .. } => {
            // χ = E/p from the near field; ω₀² − Kχ is the shifted square
            // frequency, so Re χ shifts and Im χ damps.
            let chi = near_field(1.0, r, m)?;
            Ok(EffectiveCoefficients {
                damping_rate: gamma + k * chi.im / t.omega0(),
                freq_shift_sq: k * chi.re,
                retardation,
            })
        }
    }
}

fn require_standoff(r: f64) -> Result<()> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!(
            "standoff R must be finite and > 0, got {r}"
        )));
    }
    Ok(())
}

fn require_eps1_nonzero(m: &MediumPair) -> Result<()> {
    if m.eps1() == 0.0 {
        return Err(Error::Domain(
            "eps1 = 0: image-field expressions divide by eps1".to_string(),
        ));
    }
    Ok(())
}
