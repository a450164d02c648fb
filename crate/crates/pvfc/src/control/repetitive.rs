use crate::numerics::DelayLine;

/// Repetitive filter `ẋ = ω_c(−x + x(t−τ) + e(t−τ))` for one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitiveState {
    pub x_rc: f64,
    x_delay: DelayLine,
    e_delay: DelayLine,
}

impl RepetitiveState {
    pub fn new(delay_samples: usize) -> Self {
        RepetitiveState {
            x_rc: 0.0,
            x_delay: DelayLine::new(delay_samples),
            e_delay: DelayLine::new(delay_samples),
        }
    }

    /// Forward-Euler update from the delay taps; `frozen` holds `x_rc` (anti-windup).
    pub fn advance(&mut self, e: f64, omega_c: f64, dt: f64, frozen: bool) {
        let xd = self.x_delay.push(self.x_rc);
        let ed = self.e_delay.push(e);
        if !frozen {
            self.x_rc += dt * omega_c * (-self.x_rc + xd + ed);
        }
    }
}

/// Current-loop gains of the law `u = k1·i + k2·(i* − i + x_rc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentGains {
    pub k1: f64,
    pub k2: f64,
    pub omega_c: f64,
}

/// Evaluates the law, clamps to `±limit`, and advances the filter.
pub fn repetitive_step(
    state: &mut RepetitiveState,
    e: f64,
    i_meas: f64,
    i_ref: f64,
    gains: &CurrentGains,
    limit: f64,
    dt: f64,
) -> f64 {
    let u = gains.k1 * i_meas + gains.k2 * (i_ref - i_meas + state.x_rc);
    let clamped = u.clamp(-limit, limit);
    state.advance(e, gains.omega_c, dt, clamped != u);
    clamped
}
