//! Runtime controllers: the dc-link disturbance-rejection loop, repetitive
//! current loops, reference generation for normal and sag modes, PV MPPT,
//! and fuel-cell power regulation.

mod dc;
mod fc;
mod gains;
mod mppt;
mod refs;
mod repetitive;

pub use dc::{
    curtailment_ref_sag, dc_control, dc_observer_step, power_ref_normal, DcObserver,
    DcObserverState,
};
pub use fc::{fc_demand_from_duty, fc_power_control, FC_KP, FC_MAX_DUTY};
pub use gains::{rates_from_tau, ControllerGains};
pub use mppt::{mppt_po, Mppt};
pub use refs::{current_refs_normal, current_refs_sag, EPS_D, EPS_V};
pub use repetitive::{repetitive_step, CurrentGains, RepetitiveState};
