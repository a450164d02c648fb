//! Supervisory energy management: demand clamping, apparent-power limiting,
//! PV/FC/dump-load split, and sag-mode power references.

use crate::signal::SagStatus;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Demand {
    pub p_star: f64,
    pub q_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Normal,
    Sag,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::Normal => 0,
            Mode::Sag => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmsLimits {
    pub s_max: f64,
    pub p_fc_rated: f64,
    /// Rated phase-current amplitude, A.
    pub i_rated: f64,
    /// Nominal phase-voltage amplitude, V.
    pub v_hat: f64,
    /// Reactive-support gain during sags.
    pub k_q: f64,
    /// Fraction of the available PV power committed to the grid during sags.
    pub sag_pv_headroom: f64,
}

impl Default for EmsLimits {
    fn default() -> Self {
        let v_hat = 260.0 * (2.0f64 / 3.0).sqrt();
        let s_max = 220e3;
        EmsLimits {
            s_max,
            p_fc_rated: 100e3,
            i_rated: 2.0 * s_max / (3.0 * v_hat),
            v_hat,
            k_q: 1.75,
            sag_pv_headroom: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmsDecision {
    pub mode: Mode,
    pub p_fc_ref: f64,
    pub p_dump_ref: f64,
    pub q_grid_ref: f64,
    /// Set in sag mode only; in normal mode the dc loop produces P_grid*.
    pub p_grid_ref: Option<f64>,
    /// Demanded real power after clamping to plant capability.
    pub p_clamped: f64,
}

/// Normal-mode flowchart: clamp, prioritise P over Q, split between PV, FC and dump load.
pub fn ems_normal(demand: Demand, p_pv: f64, limits: &EmsLimits) -> EmsDecision {
    let p_pv = p_pv.max(0.0);
    let p_clamped = demand.p_star.min(p_pv + limits.p_fc_rated).max(0.0);
    let s = p_clamped.hypot(demand.q_star);
    let q_grid_ref = if s > limits.s_max {
        demand.q_star.signum()
            * (limits.s_max * limits.s_max - p_clamped * p_clamped)
                .max(0.0)
                .sqrt()
    } else {
        demand.q_star
    };
    let (p_fc_ref, p_dump_ref) = if p_pv >= p_clamped {
        (0.0, p_pv - p_clamped)
    } else {
        ((p_clamped - p_pv).min(limits.p_fc_rated), 0.0)
    };
    EmsDecision {
        mode: Mode::Normal,
        p_fc_ref,
        p_dump_ref,
        q_grid_ref,
        p_grid_ref: None,
        p_clamped,
    }
}

/// Sag-mode real and reactive references under the dynamic current limit.
///
/// # Panics
/// If `sag` is not active.
pub fn sag_power_refs(
    sag: &SagStatus,
    limits: &EmsLimits,
    p_pre_sag: f64,
    p_available: f64,
) -> (f64, f64) {
    assert!(sag.active, "sag_power_refs requires an active sag");
    let f = sag.min_fraction.clamp(0.0, 1.0);
    let s_dyn = 1.5 * f * limits.v_hat * limits.i_rated;
    let q = (limits.k_q * (1.0 - f) * s_dyn).clamp(0.0, s_dyn);
    let p_circle = (s_dyn * s_dyn - q * q).max(0.0).sqrt();
    let p = p_pre_sag.min(p_circle).min(p_available).max(0.0);
    (p, q)
}

/// Inputs the EMS reads each control period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmsInputs {
    pub demand: Demand,
    pub p_pv: f64,
    pub p_fc: f64,
    pub sag: SagStatus,
}

/// One EMS evaluation. In sag mode the FC is commanded to zero and the
/// dump load absorbs whatever FC output the grid reference cannot take
/// while the stacks ramp down.
pub fn ems_step(inputs: &EmsInputs, limits: &EmsLimits, pre_sag: &PreSag) -> EmsDecision {
    if !inputs.sag.active {
        return ems_normal(inputs.demand, inputs.p_pv, limits);
    }
    let (p, q) = sag_power_refs(
        &inputs.sag,
        limits,
        pre_sag.p_grid,
        limits.sag_pv_headroom * pre_sag.p_pv_available,
    );
    EmsDecision {
        mode: Mode::Sag,
        p_fc_ref: 0.0,
        p_dump_ref: (inputs.p_fc - 0.9 * p).max(0.0),
        q_grid_ref: q,
        p_grid_ref: Some(p),
        p_clamped: p,
    }
}

/// Quantities latched just before a sag is detected.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PreSag {
    pub p_grid: f64,
    pub p_pv_available: f64,
}
