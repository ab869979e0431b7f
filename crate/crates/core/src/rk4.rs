//! Classical fixed-step fourth-order Runge-Kutta.
//!
//! This is the independent oracle the closed forms are checked against, so it
//! is deliberately plain: fixed step, no adaptivity, no dense output tricks.
//! The right-hand side may fail (overflow of `cosh` for large pendulum
//! angles), in which case integration stops with the error.

use crate::Result;

/// One RK4 step of size `h` from `(t, y)`.
pub fn step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N]> {
    let k1 = f(t, y)?;
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &y2)?;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &y2)?;
    for i in 0..N {
        y2[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &y2)?;
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrate from `t0` to `t1` in `n` equal steps, returning the final state.
pub fn integrate<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    n: usize,
) -> Result<[f64; N]> {
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = step(f, t0 + i as f64 * h, &y, h)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Overflow(format!(
                "state became non-finite at t = {:.6}",
                t0 + (i + 1) as f64 * h
            )));
        }
    }
    Ok(y)
}

/// Integrate over a strictly increasing time grid starting at `t0 = 0`,
/// taking `steps_per_segment` RK4 steps between consecutive grid times, and
/// return the state at every grid time.
pub fn integrate_grid<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    times: &[f64],
    y0: [f64; N],
    steps_per_segment: usize,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    let mut t_prev = 0.0;
    for &t in times {
        if t > t_prev {
            y = integrate(f, t_prev, t, y, steps_per_segment)?;
        }
        t_prev = t;
        out.push(y);
    }
    Ok(out)
}
