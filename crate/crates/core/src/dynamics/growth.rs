//! Envelope growth/decay extraction from an oscillatory trajectory.
//!
//! Parametric gain and radiative damping both act on the envelope of a fast
//! carrier, so the estimator works on the local maxima of |p|: find them,
//! sharpen each with a three-point parabola, then least-squares fit
//! ln|p|_peak against time.  The slope is the envelope rate ω″ (positive =
//! exponential growth), directly comparable with Floquet exponents and the
//! analytic ω₀A/4 − γ prediction.

use crate::dynamics::Trajectory;
use crate::{Error, Result};

/// Fraction of the run (counted from the end) used by default when fitting
/// the envelope, skipping initial transients.
pub const DEFAULT_FIT_WINDOW: f64 = 0.8;

/// Fewest envelope peaks accepted for a fit.
const MIN_EXTREMA: usize = 10;

/// Peak-to-peak ln|p| mean square below which the envelope is treated as
/// constant (r² of the zero-slope fit defined as 1 instead of 0/0 noise).
const FLAT_ENVELOPE_VARIANCE: f64 = 1e-12;

/// Result of an envelope fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    /// Envelope rate (1/s): d ln|p|/dt of the peak sequence.
    pub omega_pp: f64,
    /// Coefficient of determination of the linear ln-fit.
    pub r_squared: f64,
    /// Number of refined peaks entering the fit.
    pub n_extrema: usize,
    /// Set when r² < 0.9: the envelope is not a clean single exponential
    /// (beats, transients, or threshold-straddling drive).
    pub low_confidence: bool,
}

/// Fit the envelope rate of `traj` over the trailing `fit_window` fraction of
/// its time span (see [`DEFAULT_FIT_WINDOW`]).
pub fn measure_growth_rate(traj: &Trajectory, fit_window: f64) -> Result<GrowthFit> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fit_window must lie in (0, 1], got {fit_window}"
        )));
    }
    if traj.len() < 3 {
        return Err(Error::InsufficientData(
            "trajectory has fewer than 3 samples".to_string(),
        ));
    }
    let t0 = traj.times[0];
    let t_end = *traj.times.last().unwrap();
    let t_start = t_end - fit_window * (t_end - t0);

    let mut peaks: Vec<(f64, f64)> = Vec::new(); // (t_peak, ln |p|_peak)
    for i in 1..traj.len() - 1 {
        if traj.times[i] < t_start {
            continue;
        }
        let (ym, y0, yp) = (traj.p[i - 1].abs(), traj.p[i].abs(), traj.p[i + 1].abs());
        // Strict rise on the left avoids double-counting flat runs.
        if y0 > ym && y0 >= yp && y0 > 0.0 {
            peaks.push(refine_peak(
                traj.times[i - 1],
                traj.times[i],
                traj.times[i + 1],
                ym,
                y0,
                yp,
            ));
        }
    }
    if peaks.len() < MIN_EXTREMA {
        return Err(Error::InsufficientData(format!(
            "only {} envelope peaks in the fit window (need {MIN_EXTREMA}); \
             lengthen the run or widen fit_window",
            peaks.len()
        )));
    }

    let n = peaks.len() as f64;
    let t_mean = peaks.iter().map(|(t, _)| t).sum::<f64>() / n;
    let l_mean = peaks.iter().map(|(_, l)| l).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut stl = 0.0;
    let mut sll = 0.0;
    for &(t, l) in &peaks {
        let dt = t - t_mean;
        let dl = l - l_mean;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    let slope = stl / stt;
    let ss_res = (sll - slope * stl).max(0.0);
    let r_squared = if sll / n < FLAT_ENVELOPE_VARIANCE {
        1.0
    } else {
        1.0 - ss_res / sll
    };
    Ok(GrowthFit {
        omega_pp: slope,
        r_squared,
        n_extrema: peaks.len(),
        low_confidence: r_squared < 0.9,
    })
}

/// Sharpen a sampled maximum with the parabola through its three points.
/// Falls back to the raw sample when the points are not concave.
fn refine_peak(tm: f64, t0: f64, tp: f64, ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let curvature = ym - 2.0 * y0 + yp;
    if curvature >= 0.0 {
        return (t0, y0.ln());
    }
    let h = 0.5 * (tp - tm);
    let delta = 0.5 * (ym - yp) / curvature * h;
    let delta = delta.clamp(-h, h);
    let y_peak = y0 - (ym - yp) * (ym - yp) / (8.0 * curvature);
    (t0 + delta, y_peak.ln())
}
