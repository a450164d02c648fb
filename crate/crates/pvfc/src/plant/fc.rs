use serde::{Deserialize, Serialize};

/// Fuel-cell generator: identical stacks sharing the demand equally, each a
/// first-order lag with a ramp limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcGenParams {
    pub stacks: u32,
    pub rated_per_stack: f64,
    pub time_constant: f64,
    /// Generator-level ramp limit, W/s.
    pub ramp_limit: f64,
    pub min_power: f64,
}

impl Default for FcGenParams {
    fn default() -> Self {
        FcGenParams {
            stacks: 2,
            rated_per_stack: 50e3,
            time_constant: 0.1,
            ramp_limit: 500e3,
            min_power: 0.0,
        }
    }
}

impl FcGenParams {
    pub fn rated(&self) -> f64 {
        self.stacks as f64 * self.rated_per_stack
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FcState {
    pub stack_power: Vec<f64>,
}

impl FcState {
    pub fn new(params: &FcGenParams) -> Self {
        FcState {
            stack_power: vec![0.0; params.stacks as usize],
        }
    }

    pub fn total(&self) -> f64 {
        self.stack_power.iter().sum()
    }
}

/// Advances the generator toward `p_ref` (total W) over `dt`; returns total output.
///
/// # Panics
/// If `p_ref` is outside `[0, rated]`.
pub fn fc_step(p_ref: f64, state: &mut FcState, params: &FcGenParams, dt: f64) -> f64 {
    assert!(
        (0.0..=params.rated() * (1.0 + 1e-12)).contains(&p_ref),
        "fuel-cell reference {p_ref} W outside [0, {}]",
        params.rated()
    );
    if state.stack_power.len() != params.stacks as usize {
        state.stack_power.resize(params.stacks as usize, 0.0);
    }
    let share = p_ref / params.stacks as f64;
    let blend = -(-dt / params.time_constant).exp_m1();
    let max_delta = params.ramp_limit / params.stacks as f64 * dt;
    for p in &mut state.stack_power {
        let delta = (blend * (share - *p)).clamp(-max_delta, max_delta);
        *p = (*p + delta).clamp(params.min_power, params.rated_per_stack);
    }
    state.total()
}
