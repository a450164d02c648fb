//! Averaged plant physics: PV array, fuel-cell generator, dc link, VSC with
//! series RL interface, and the grid source.

mod dynamics;
mod fc;
mod grid;
mod pv;

pub use dynamics::{
    lumped_rl, plant_step, pv_output, CurrentLaw, Disturbance, ElectricalParams, PlantInputs,
    PlantParams, PlantState, StepReport, Terminal, Uncertainty, COLLAPSE_VOLTAGE,
};
pub use fc::{fc_step, FcGenParams, FcState};
pub use grid::{grid_voltages, GridSource, SagSchedule, SagSpec};
pub use pv::{pv_current, ModuleParams, Mpp, PvArrayParams};
