//! Numerical kernel shared by the rest of the crate: a fixed-step RK4
//! integrator, small symmetric matrices, integer delay lines and
//! period-synchronous harmonic analysis.

mod delay;
mod spectrum;
mod sym;

pub use delay::DelayLine;
pub use spectrum::{harmonic_amplitude, thd, Spectrum};
pub use sym::{sym_eig_extremes, SymMatrix};

use crate::error::{Error, Result};

/// Simulation step: 1000 samples per 60 Hz cycle.
pub const DT: f64 = 1.0 / 60_000.0;

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<const N: usize, F>(f: F, x: &[f64; N], t: f64, dt: f64) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let check = |k: [f64; N], at: f64| -> Result<[f64; N]> {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::IntegrationFault { t: at })
        }
    };
    let axpy = |a: f64, k: &[f64; N]| -> [f64; N] {
        let mut y = *x;
        for i in 0..N {
            y[i] += a * k[i];
        }
        y
    };
    let h2 = 0.5 * dt;
    let k1 = check(f(t, x), t)?;
    let k2 = check(f(t + h2, &axpy(h2, &k1)), t + h2)?;
    let k3 = check(f(t + h2, &axpy(h2, &k2)), t + h2)?;
    let k4 = check(f(t + dt, &axpy(dt, &k3)), t + dt)?;
    let mut out = *x;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Number of samples covering `seconds` at step `dt`, rounded to nearest.
pub fn samples_for(seconds: f64, dt: f64) -> usize {
    (seconds / dt).round() as usize
}
