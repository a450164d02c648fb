/// Duty ceiling of the fuel-cell boost converters.
pub const FC_MAX_DUTY: f64 = 0.95;
/// Proportional gain on the normalised power error.
pub const FC_KP: f64 = 50.0;

/// Duty command: feed-forward `0.95·p_ref/P_rated` plus `K_p·(p_ref − p_meas)/P_rated`,
/// clamped to `[0, 0.95]`. Powers are generator totals.
pub fn fc_power_control(p_ref: f64, p_meas: f64, p_rated: f64) -> f64 {
    let ff = FC_MAX_DUTY * p_ref / p_rated;
    (ff + FC_KP * (p_ref - p_meas) / p_rated).clamp(0.0, FC_MAX_DUTY)
}

/// Stack power demand realised by a duty command.
pub fn fc_demand_from_duty(duty: f64, p_rated: f64) -> f64 {
    p_rated * duty.clamp(0.0, FC_MAX_DUTY) / FC_MAX_DUTY
}
