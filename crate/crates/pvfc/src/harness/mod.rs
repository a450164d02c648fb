//! Scenario definition, simulation orchestration, metrics and CSV output.

mod config;
mod engine;
mod metrics;
mod series;
mod synth;

pub use config::{
    builtin_case, CurrentOverride, DemandStep, EmsConfig, Expectations, GainsSource,
    IntervalExpectation, IrradianceStep, NoiseConfig, PlantOverrides, SagExpectation,
    ScenarioConfig, Target,
};
pub use engine::simulate;
pub use metrics::{compute_metrics, IntervalMetrics, MetricsReport, SagMetrics, Stat, Verdict};
pub use series::{Channel, TimeSeries};
pub use synth::{
    check_certificates, resolve_gains, synth_gains, CertificateCheck, SynthOutcome, SynthParams,
};

use crate::error::Result;

/// Resolves gains, simulates, and evaluates the scenario's expectations.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(TimeSeries, MetricsReport)> {
    cfg.validate()?;
    let gains = resolve_gains(cfg)?;
    let series = simulate(cfg, &gains)?;
    let report = compute_metrics(&series, cfg)?;
    Ok((series, report))
}
