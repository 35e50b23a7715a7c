//! Floquet stability analysis of the damped parametric oscillator
//! p̈ + 2γṗ + ω₀²(1 + A·cos νt)p = 0.
//!
//! The equation has periodic coefficients with period T = 2π/ν, so its
//! long-time behaviour is fixed by the monodromy matrix M: propagate the two
//! unit initial conditions over one modulation period and read off the
//! multipliers (eigenvalues of M).  The leading Floquet exponent
//! Re λ = ln max|μ| / T is the envelope growth rate and is directly
//! comparable with time-domain envelope fits and with the analytic
//! first-order result ω″ = ω₀A/4 − γ at the principal resonance ν = 2ω₀.
//!
//! [`stability_map`] charts the exponent over a (ν/ω₀, A) grid, extracts the
//! zero-growth contour and locates the instability tongues ν = 2ω₀/N; their
//! tips lift off A = 0 once γ > 0, which is the experimental threshold
//! condition.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::rk4_step;
use crate::{Error, Result};

/// Fewest RK4 steps per modulation period.
pub const MIN_STEPS_PER_MODULATION_PERIOD: usize = 256;

/// Fewest RK4 steps per carrier period 2π/ω₀ (binds when ν ≪ ω₀, where one
/// modulation period contains many carrier oscillations).
pub const MIN_STEPS_PER_CARRIER_PERIOD: f64 = 64.0;

/// Relative width at which the threshold bisection stops.
const THRESHOLD_REL_TOL: f64 = 1e-4;

/// Damping ratios γ/ω₀ below this are smaller than the round-off noise of
/// multiplier magnitudes, so a bisection would chase numerical dust.
/// [`threshold_amplitude`] refuses such inputs; callers can test against this
/// constant to fall back to the closed-form threshold.
pub const GAMMA_RESOLUTION_FLOOR: f64 = 1e-10;

/// Monodromy matrix of one modulation period, in the state (p, dp/dτ) with
/// τ = ω₀t.
#[derive(Debug, Clone, PartialEq)]
pub struct Monodromy {
    /// Column j is the state after one period started from unit IC j.
    pub matrix: [[f64; 2]; 2],
    pub omega0: f64,
    pub gamma: f64,
    pub drive_amplitude: f64,
    pub nu: f64,
    pub steps_per_period: usize,
}

/// Stability verdict derived from a [`Monodromy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    /// Leading Floquet exponent Re λ (1/s); positive means growth.
    pub exponent: f64,
    /// The two Floquet multipliers (eigenvalues of the monodromy matrix).
    pub multipliers: (Complex64, Complex64),
    /// True when the envelope strictly decays (exponent < 0).
    pub stable: bool,
}

/// Outcome of a threshold search over A ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdOutcome {
    /// Instability sets in at this drive amplitude.
    Unstable { a_threshold: f64 },
    /// Still stable at the stated maximal amplitude.
    StableUpTo(f64),
}

/// A parametric-resonance tongue tip located on the zero-growth contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TongueTip {
    /// ν/ω₀ at the tip.
    pub nu_ratio: f64,
    /// Threshold amplitude at the tip.
    pub a_threshold: f64,
    /// Resonance order N from ν = 2ω₀/N.
    pub order: usize,
}

/// Floquet exponents over a (ν/ω₀, A) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    /// Modulation/carrier frequency ratios (ascending).
    pub nu_ratios: Vec<f64>,
    /// Drive amplitudes (ascending).
    pub drive_amplitudes: Vec<f64>,
    /// exponents[i][j]: Re λ/ω₀ at (nu_ratios[i], drive_amplitudes[j]).
    pub exponents: Vec<Vec<f64>>,
    /// γ/ω₀ the map was computed with.
    pub gamma_ratio: f64,
    /// Zero-growth boundary: per column with a sign change, the (ν/ω₀,
    /// interpolated A) of the first upward crossing.
    pub contour: Vec<(f64, f64)>,
    /// Local minima of the contour, labelled with the resonance order.
    pub tongue_tips: Vec<TongueTip>,
}

/// Propagate the two unit initial conditions over one modulation period
/// T = 2π/ν with fixed-step RK4 in τ = ω₀t.
pub fn monodromy(
    omega0: f64,
    gamma: f64,
    drive_amplitude: f64,
    nu: f64,
    steps_per_period: usize,
) -> Result<Monodromy> {
    validate_oscillator(omega0, gamma, drive_amplitude)?;
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "modulation frequency nu must be finite and > 0, got {nu}"
        )));
    }
    let nu_hat = nu / omega0;
    if steps_per_period < MIN_STEPS_PER_MODULATION_PERIOD {
        return Err(Error::InvalidParameter(format!(
            "steps_per_period must be at least {MIN_STEPS_PER_MODULATION_PERIOD}, got {steps_per_period}"
        )));
    }
    if (steps_per_period as f64) * nu_hat < MIN_STEPS_PER_CARRIER_PERIOD {
        return Err(Error::InvalidParameter(format!(
            "steps_per_period = {steps_per_period} resolves one carrier period with \
             {:.1} steps at nu/omega0 = {nu_hat:.3e} (need {MIN_STEPS_PER_CARRIER_PERIOD}); \
             increase steps_per_period",
            steps_per_period as f64 * nu_hat
        )));
    }

    let gamma_hat = gamma / omega0;
    let period = 2.0 * std::f64::consts::PI / nu_hat;
    let h = period / steps_per_period as f64;
    let mut deriv = |tau: f64, y: &[f64; 2]| {
        [
            y[1],
            -2.0 * gamma_hat * y[1] - (1.0 + drive_amplitude * (nu_hat * tau).cos()) * y[0],
        ]
    };
    let mut columns = [[0.0; 2]; 2];
    for (j, ic) in [[1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
        let mut y = ic;
        for i in 0..steps_per_period {
            y = rk4_step(&mut deriv, i as f64 * h, &y, h);
        }
        columns[j] = y;
    }
    Ok(Monodromy {
        // Stored row-major: matrix[r][c] maps IC column c to state row r.
        matrix: [
            [columns[0][0], columns[1][0]],
            [columns[0][1], columns[1][1]],
        ],
        omega0,
        gamma,
        drive_amplitude,
        nu,
        steps_per_period,
    })
}

/// Multipliers and leading exponent of a monodromy matrix.
pub fn floquet_exponent(m: &Monodromy) -> StabilityVerdict {
    let a = m.matrix;
    let trace = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = trace * trace - 4.0 * det;
    let multipliers = if disc >= 0.0 {
        let root = disc.sqrt();
        (
            Complex64::new(0.5 * (trace + root), 0.0),
            Complex64::new(0.5 * (trace - root), 0.0),
        )
    } else {
        let imag = 0.5 * (-disc).sqrt();
        (
            Complex64::new(0.5 * trace, imag),
            Complex64::new(0.5 * trace, -imag),
        )
    };
    let period_tau = 2.0 * std::f64::consts::PI * m.omega0 / m.nu;
    let leading = multipliers.0.norm().max(multipliers.1.norm());
    let exponent = leading.ln() / period_tau * m.omega0;
    StabilityVerdict {
        exponent,
        multipliers,
        stable: exponent < 0.0,
    }
}

/// Bisect the drive amplitude A ∈ [0, 1] for the onset of instability at
/// fixed ν.  Requires γ/ω₀ above the numerical resolution floor: the
/// experimentally relevant radiative γ/ω₀ ~ 1e-19 moves multiplier magnitudes
/// by far less than round-off, and a bisection there would return noise —
/// use the analytic threshold for such parameters instead.
pub fn threshold_amplitude(
    omega0: f64,
    gamma: f64,
    nu: f64,
    steps_per_period: usize,
) -> Result<ThresholdOutcome> {
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter(
            "threshold search needs gamma > 0; an undamped oscillator has zero threshold \
             at every resonance"
                .to_string(),
        ));
    }
    if gamma / omega0 < GAMMA_RESOLUTION_FLOOR {
        return Err(Error::Domain(format!(
            "gamma/omega0 = {:.3e} is below the ~{GAMMA_RESOLUTION_FLOOR:.0e} resolution of \
             numerically computed Floquet multipliers; the threshold is invisible to the \
             bisection at double precision",
            gamma / omega0
        )));
    }
    let exponent_at = |a_drive: f64| -> Result<f64> {
        Ok(floquet_exponent(&monodromy(omega0, gamma, a_drive, nu, steps_per_period)?).exponent)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    if exponent_at(hi)? < 0.0 {
        return Ok(ThresholdOutcome::StableUpTo(hi));
    }
    while hi - lo > THRESHOLD_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if exponent_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdOutcome::Unstable {
        a_threshold: 0.5 * (lo + hi),
    })
}

/// Largest drive amplitude (at the principal resonance ν = 2ω₀) up to which
/// the first-order growth law ω″ = ω₀A/4 − γ tracks the computed Floquet
/// exponent within `rel_tol`.  Scanned in steps of 0.01 up to A = 1.
pub fn growth_law_validity_limit(
    omega0: f64,
    gamma: f64,
    steps_per_period: usize,
    rel_tol: f64,
) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in (0, 1), got {rel_tol}"
        )));
    }
    let nu = 2.0 * omega0;
    let mut last_good = 0.0;
    for i in 1..=100 {
        let a_drive = i as f64 * 0.01;
        let m = monodromy(omega0, gamma, a_drive, nu, steps_per_period)?;
        let exponent = floquet_exponent(&m).exponent;
        let predicted = omega0 * a_drive / 4.0 - gamma;
        let scale = predicted.abs().max(omega0 * a_drive / 4.0);
        if (exponent - predicted).abs() > rel_tol * scale {
            break;
        }
        last_good = a_drive;
    }
    Ok(last_good)
}

/// Chart Re λ/ω₀ over the (ν/ω₀, A) grid, extract the zero-growth contour
/// and locate tongue tips.  Columns are computed in parallel; results are
/// assembled by index, so the output is deterministic.
pub fn stability_map(
    omega0: f64,
    gamma: f64,
    nu_ratios: &[f64],
    drive_amplitudes: &[f64],
    steps_per_period: usize,
) -> Result<StabilityMap> {
    validate_oscillator(omega0, gamma, 0.0)?;
    if nu_ratios.len() < 2 || drive_amplitudes.len() < 2 {
        return Err(Error::InvalidParameter(
            "stability map needs at least 2 grid points per axis".to_string(),
        ));
    }
    require_ascending("nu_ratios", nu_ratios)?;
    require_ascending("drive_amplitudes", drive_amplitudes)?;
    if nu_ratios[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "nu_ratios must be positive".to_string(),
        ));
    }
    if drive_amplitudes[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "drive_amplitudes must be non-negative".to_string(),
        ));
    }

    let exponents: Vec<Vec<f64>> = nu_ratios
        .par_iter()
        .map(|&nu_ratio| {
            let nu = nu_ratio * omega0;
            drive_amplitudes
                .iter()
                .map(|&a_drive| {
                    let m = monodromy(omega0, gamma, a_drive, nu, steps_per_period)?;
                    Ok(floquet_exponent(&m).exponent / omega0)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let crossings: Vec<Option<f64>> = exponents
        .iter()
        .map(|column| first_upward_crossing(drive_amplitudes, column))
        .collect();
    let contour: Vec<(f64, f64)> = nu_ratios
        .iter()
        .zip(&crossings)
        .filter_map(|(&nu, &c)| c.map(|a| (nu, a)))
        .collect();
    let tongue_tips = find_tongue_tips(nu_ratios, &crossings);

    Ok(StabilityMap {
        nu_ratios: nu_ratios.to_vec(),
        drive_amplitudes: drive_amplitudes.to_vec(),
        exponents,
        gamma_ratio: gamma / omega0,
        contour,
        tongue_tips,
    })
}

/// First A at which the exponent crosses from ≤ 0 to > 0, linearly
/// interpolated.  A column already unstable at its smallest amplitude is
/// clamped to that amplitude.
fn first_upward_crossing(amplitudes: &[f64], exponents: &[f64]) -> Option<f64> {
    if exponents[0] > 0.0 {
        return Some(amplitudes[0]);
    }
    for j in 0..exponents.len() - 1 {
        let (e0, e1) = (exponents[j], exponents[j + 1]);
        if e0 <= 0.0 && e1 > 0.0 {
            let fraction = -e0 / (e1 - e0);
            return Some(amplitudes[j] + fraction * (amplitudes[j + 1] - amplitudes[j]));
        }
    }
    None
}

/// Local minima of the per-column crossing amplitudes.  A plateau of equal
/// values counts once, at its centre.  A gap (no crossing) beside a candidate
/// counts as "higher": the neighbouring column is stable everywhere in the
/// scanned range.  Map-boundary columns are never reported — the map cannot
/// tell whether the contour keeps falling outside it.
fn find_tongue_tips(nu_ratios: &[f64], crossings: &[Option<f64>]) -> Vec<TongueTip> {
    let n = crossings.len();
    let mut tips = Vec::new();
    let mut i = 0;
    while i < n {
        let Some(value) = crossings[i] else {
            i += 1;
            continue;
        };
        // Extend a plateau of exactly equal crossing values.
        let mut j = i;
        while j + 1 < n && crossings[j + 1] == Some(value) {
            j += 1;
        }
        let left_higher = i > 0 && crossings[i - 1].map_or(true, |v| v > value);
        let right_higher = j + 1 < n && crossings[j + 1].map_or(true, |v| v > value);
        if left_higher && right_higher {
            let nu_tip = 0.5 * (nu_ratios[i] + nu_ratios[j]);
            let order = (2.0 / nu_tip).round().max(1.0) as usize;
            tips.push(TongueTip {
                nu_ratio: nu_tip,
                a_threshold: value,
                order,
            });
        }
        i = j + 1;
    }
    tips
}

fn validate_oscillator(omega0: f64, gamma: f64, drive_amplitude: f64) -> Result<()> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "omega0 must be finite and > 0, got {omega0}"
        )));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )));
    }
    if !drive_amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "drive_amplitude must be finite, got {drive_amplitude}"
        )));
    }
    Ok(())
}

// Non-descending rather than strictly ascending: a degenerate axis (all
// values equal) is a legitimate way to scan a single row or column.
fn require_ascending(name: &str, values: &[f64]) -> Result<()> {
    for w in values.windows(2) {
        if !(w[1] >= w[0]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and non-descending"
            )));
        }
    }
    Ok(())
}
