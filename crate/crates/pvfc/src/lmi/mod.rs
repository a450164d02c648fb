//! Affine LMIs, a small interior-point solver, and the two synthesis
//! problems used by the controllers: the dc-link disturbance observer and
//! the robust delayed state feedback for the current loops.

mod affine;
mod feedback;
pub mod gains_file;
mod observer;
mod solver;

pub use affine::{lmi_min_eig, AffineLmi, LmiBuilder, MatVar, VarSpace};
pub use feedback::{
    balance_feedback, feedback_from_gains, gains_from_feedback, synth_current_feedback,
    synth_current_feedback_with, verify_feedback_certificate, FeedbackSynthesisResult,
    PolytopicPlant, FEEDBACK_VAR_BOUND,
};
pub use observer::{
    dc_link_model, observer_gain, observer_lmi, observer_poles_real, synth_dc_observer,
    synth_dc_observer_with, ObserverSynthesisResult, OBSERVER_MARGIN_FLOOR,
};
pub use solver::{solve_lmi, LmiSolution, Objective, SolveOptions};
