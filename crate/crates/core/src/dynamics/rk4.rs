//! Fixed-step classical Runge–Kutta integration over small state arrays.
//!
//! All integrators in this crate run in the dimensionless time τ = ω₀t with a
//! step chosen as a fixed fraction of the carrier period, so an adaptive
//! scheme would buy nothing: the solution oscillates at a known rate
//! everywhere.  A fixed grid also keeps runs bit-for-bit reproducible and
//! gives the delayed-field integrator a uniform history to interpolate on.

/// One classical fourth-order Runge–Kutta step for y' = f(t, y).
pub(crate) fn rk4_step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &offset(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &offset(y, &k2, 0.5 * h));
    let k4 = f(t + h, &offset(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn offset<const N: usize>(y: &[f64; N], k: &[f64; N], scale: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += scale * k[i];
    }
    out
}
