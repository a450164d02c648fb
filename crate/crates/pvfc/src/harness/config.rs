use crate::error::{Error, Result};
use crate::plant::{
    ElectricalParams, FcGenParams, GridSource, PlantParams, PvArrayParams, SagSchedule, SagSpec,
    Uncertainty,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::series::Channel;

/// Demand set-point taking effect at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandStep {
    pub t: f64,
    pub p: f64,
    #[serde(default)]
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrradianceStep {
    pub t: f64,
    pub g: f64,
}

/// Optional replacements for the default plant data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantOverrides {
    pub c: Option<f64>,
    pub r: Option<f64>,
    pub l: Option<f64>,
    pub v_hat: Option<f64>,
    pub grid_frequency: Option<f64>,
    pub pv: Option<PvArrayParams>,
    pub fc: Option<FcGenParams>,
}

impl PlantOverrides {
    /// Nominal electrical data with overrides applied.
    pub fn electrical(&self) -> ElectricalParams {
        let mut e = ElectricalParams::default();
        if let Some(v) = self.c {
            e.c = v;
        }
        if let Some(v) = self.r {
            e.r = v;
        }
        if let Some(v) = self.l {
            e.l = v;
        }
        if let Some(v) = self.v_hat {
            e.v_hat = v;
        }
        if let Some(v) = self.grid_frequency {
            e.grid_frequency = v;
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmsConfig {
    /// Supervisory period, s.
    pub period: f64,
    pub s_max: f64,
    pub k_q: f64,
    pub sag_pv_headroom: f64,
    /// P&O duty increment per period.
    pub mppt_step: f64,
    pub temperature_c: f64,
}

impl Default for EmsConfig {
    fn default() -> Self {
        EmsConfig {
            period: 1e-3,
            s_max: 220e3,
            k_q: 1.75,
            sag_pv_headroom: 0.95,
            mppt_step: 5e-4,
            temperature_c: 25.0,
        }
    }
}

/// Where controller gains come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainsSource {
    /// Solve both LMI problems for the nominal plant at start-up.
    Synthesize {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_tau_i")]
        tau_i: f64,
        #[serde(default = "default_omega_c")]
        omega_c: f64,
        #[serde(default = "default_spread")]
        spread: f64,
    },
    /// Load a gains file produced by `synth`.
    File { path: PathBuf },
}

fn default_alpha() -> f64 {
    50.0
}
fn default_tau_i() -> f64 {
    2e-3
}
fn default_omega_c() -> f64 {
    1000.0
}
fn default_spread() -> f64 {
    0.3
}

impl Default for GainsSource {
    fn default() -> Self {
        GainsSource::Synthesize {
            alpha: default_alpha(),
            tau_i: default_tau_i(),
            omega_c: default_omega_c(),
            spread: default_spread(),
        }
    }
}

/// Explicit current-loop gains, e.g. the published `k1`, `k2` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentOverride {
    pub k1: f64,
    pub k2: f64,
}

/// Band-limited Gaussian disturbances injected into the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// RMS of the dc-link current disturbance, A.
    pub dc_current: f64,
    /// RMS of the αβ current-slope disturbance, A/s.
    pub current_slope: f64,
    /// First-order shaping bandwidth, Hz.
    pub bandwidth: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            dc_current: 0.0,
            current_slope: 0.0,
            bandwidth: 500.0,
        }
    }
}

/// Tolerance band around a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub value: f64,
    #[serde(default)]
    pub rel: f64,
    #[serde(default)]
    pub abs: f64,
}

impl Target {
    pub fn rel(value: f64, rel: f64) -> Self {
        Target {
            value,
            rel,
            abs: 0.0,
        }
    }
    pub fn abs(value: f64, abs: f64) -> Self {
        Target {
            value,
            rel: 0.0,
            abs,
        }
    }
    pub fn range(lo: f64, hi: f64) -> Self {
        Target {
            value: 0.5 * (lo + hi),
            rel: 0.0,
            abs: 0.5 * (hi - lo),
        }
    }
    pub fn tolerance(&self) -> f64 {
        self.abs.max(self.rel * self.value.abs())
    }
    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.tolerance()
    }
}

/// Expected steady-state means on the interval starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalExpectation {
    pub start: f64,
    pub p_grid: Option<Target>,
    pub q_grid: Option<Target>,
    pub p_fc: Option<Target>,
    pub p_dump: Option<Target>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SagExpectation {
    /// Per-phase current amplitude ceiling, A.
    pub current_limit: f64,
    /// Applied to unbalanced sags only.
    pub p_ripple_max: f64,
    pub thd_max_percent: f64,
    pub q_line_hz: f64,
    /// Sags (by index) whose steady window must keep v_dc within the band.
    pub v_dc_band_sags: Vec<usize>,
    pub v_dc_band: f64,
    pub q_positive: bool,
}

impl Default for SagExpectation {
    fn default() -> Self {
        let v_hat = ElectricalParams::default().v_hat;
        SagExpectation {
            current_limit: 1.02 * 2.0 * 220e3 / (3.0 * v_hat),
            p_ripple_max: 0.05,
            thd_max_percent: 5.0,
            q_line_hz: 120.0,
            v_dc_band_sags: Vec::new(),
            v_dc_band: 0.005,
            q_positive: true,
        }
    }
}

/// Pass/fail targets evaluated after a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Expectations {
    pub intervals: Vec<IntervalExpectation>,
    /// Relative v_dc band enforced on steady windows of normal intervals.
    pub v_dc_band: Option<f64>,
    pub sag: Option<SagExpectation>,
}

/// A complete scenario, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub duration: f64,
    pub dt: f64,
    pub decimation: usize,
    pub v_dc_ref: f64,
    pub demand: Vec<DemandStep>,
    pub irradiance: Vec<IrradianceStep>,
    pub sags: Vec<SagSpec>,
    pub plant: PlantOverrides,
    pub uncertainty: Uncertainty,
    pub gains: GainsSource,
    pub current_override: Option<CurrentOverride>,
    pub ems: EmsConfig,
    pub seed: u64,
    pub noise: NoiseConfig,
    pub channels: Vec<Channel>,
    /// Settling time excluded after every schedule or sag edge, s.
    pub transient_window: f64,
    pub expect: Expectations,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "custom".into(),
            duration: 10.0,
            dt: crate::numerics::DT,
            decimation: 10,
            v_dc_ref: 800.0,
            demand: vec![DemandStep {
                t: 0.0,
                p: 0.0,
                q: 0.0,
            }],
            irradiance: vec![IrradianceStep { t: 0.0, g: 1000.0 }],
            sags: Vec::new(),
            plant: PlantOverrides::default(),
            uncertainty: Uncertainty::default(),
            gains: GainsSource::default(),
            current_override: None,
            ems: EmsConfig::default(),
            seed: 0,
            noise: NoiseConfig::default(),
            channels: Channel::ALL.to_vec(),
            transient_window: 0.3,
            expect: Expectations::default(),
        }
    }
}

fn check_sorted<T>(items: &[T], t: impl Fn(&T) -> f64, what: &str) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Config(format!("{what} schedule is empty")));
    }
    if items.iter().any(|x| !t(x).is_finite()) {
        return Err(Error::Config(format!(
            "{what} schedule has a non-finite time"
        )));
    }
    if items.windows(2).any(|w| t(&w[1]) <= t(&w[0])) {
        return Err(Error::Config(format!(
            "{what} schedule is not strictly increasing in time"
        )));
    }
    Ok(())
}

/// Value of a step schedule at `t` (the first entry also covers earlier times).
fn step_value<T: Copy>(items: &[T], t: f64, time: impl Fn(&T) -> f64) -> T {
    let k = items.partition_point(|x| time(x) <= t);
    items[k.saturating_sub(1)]
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.dt > 0.0 && self.dt < self.duration) {
            return Err(Error::Config(format!(
                "step {} must be positive and below the duration",
                self.dt
            )));
        }
        if self.decimation == 0 {
            return Err(Error::Config("decimation must be at least 1".into()));
        }
        if !(self.v_dc_ref > 0.0) {
            return Err(Error::Config("v_dc_ref must be positive".into()));
        }
        check_sorted(&self.demand, |d| d.t, "demand")?;
        check_sorted(&self.irradiance, |g| g.t, "irradiance")?;
        if self.demand.iter().any(|d| !(d.p >= 0.0 && d.q.is_finite())) {
            return Err(Error::Config(
                "demand P must be non-negative and Q finite".into(),
            ));
        }
        if self
            .irradiance
            .iter()
            .any(|g| !(g.g >= 0.0 && g.g.is_finite()))
        {
            return Err(Error::Config("irradiance must be non-negative".into()));
        }
        SagSchedule::new(self.sags.clone())?;
        self.uncertainty.validate()?;
        if !(self.ems.period >= self.dt) {
            return Err(Error::Config("EMS period must be at least one step".into()));
        }
        if self.channels.is_empty() {
            return Err(Error::Config("channel list is empty".into()));
        }
        if !(self.transient_window >= 0.0) {
            return Err(Error::Config(
                "transient window must be non-negative".into(),
            ));
        }
        let e = self.plant.electrical();
        if !(e.c > 0.0 && e.r >= 0.0 && e.l > 0.0 && e.v_hat > 0.0 && e.grid_frequency > 0.0) {
            return Err(Error::Config("plant overrides must be positive".into()));
        }
        if let Some(fc) = &self.plant.fc {
            if fc.stacks == 0
                || !(fc.rated_per_stack > 0.0 && fc.time_constant > 0.0 && fc.ramp_limit > 0.0)
            {
                return Err(Error::Config(
                    "fuel-cell parameters must be positive".into(),
                ));
            }
        }
        if let GainsSource::Synthesize {
            alpha,
            tau_i,
            omega_c,
            spread,
        } = self.gains
        {
            if !(alpha > 0.0 && tau_i > 0.0 && omega_c > 0.0 && (0.0..1.0).contains(&spread)) {
                return Err(Error::Config("synthesis parameters out of range".into()));
            }
        }
        Ok(())
    }

    pub fn demand_at(&self, t: f64) -> DemandStep {
        step_value(&self.demand, t, |d| d.t)
    }

    pub fn irradiance_at(&self, t: f64) -> f64 {
        step_value(&self.irradiance, t, |g| g.t).g
    }

    pub fn plant_params(&self) -> Result<PlantParams> {
        let electrical = self.plant.electrical();
        Ok(PlantParams {
            electrical,
            uncertainty: self.uncertainty,
            pv: self.plant.pv.unwrap_or_default(),
            fc: self.plant.fc.unwrap_or_default(),
            grid: GridSource {
                frequency: electrical.grid_frequency,
                v_hat: electrical.v_hat,
                sags: SagSchedule::new(self.sags.clone())?,
            },
        })
    }

    /// Interior edges: schedule steps and sag boundaries, sorted and deduplicated.
    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .demand
            .iter()
            .map(|d| d.t)
            .chain(self.irradiance.iter().map(|g| g.t))
            .chain(self.sags.iter().flat_map(|s| [s.start, s.end]))
            .filter(|&t| t > 0.0 && t < self.duration)
            .collect();
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        e
    }

    pub fn with_uncertainty(mut self, k: f64) -> Self {
        self.uncertainty = Uncertainty::uniform(k);
        self
    }
}

const P_RATED_RIPPLE_CASES: f64 = 0.05;

fn normal_expectations(intervals: Vec<IntervalExpectation>) -> Expectations {
    Expectations {
        intervals,
        v_dc_band: Some(0.005),
        sag: None,
    }
}

fn sag_case(name: &str, g: f64) -> ScenarioConfig {
    let sags = vec![
        SagSpec {
            start: 1.0,
            end: 3.0,
            retained: [0.7, 1.0, 1.0],
        },
        SagSpec {
            start: 4.0,
            end: 6.0,
            retained: [0.65, 0.65, 1.0],
        },
        SagSpec {
            start: 7.0,
            end: 9.0,
            retained: [0.6, 0.6, 0.6],
        },
    ];
    let normal_p = if g < 1000.0 {
        Some(Target::rel(129.5e3, 0.03))
    } else {
        None
    };
    let intervals = [0.0, 3.0, 6.0, 9.0]
        .into_iter()
        .map(|start| IntervalExpectation {
            start,
            p_grid: normal_p,
            ..Default::default()
        })
        .collect();
    ScenarioConfig {
        name: name.into(),
        demand: vec![DemandStep {
            t: 0.0,
            p: 150e3,
            q: 0.0,
        }],
        irradiance: vec![IrradianceStep { t: 0.0, g }],
        sags,
        uncertainty: Uncertainty::uniform(1.3),
        expect: Expectations {
            intervals,
            v_dc_band: None,
            sag: Some(SagExpectation {
                p_ripple_max: P_RATED_RIPPLE_CASES,
                v_dc_band_sags: vec![1],
                ..Default::default()
            }),
        },
        ..Default::default()
    }
}

/// The four reference scenarios, 10 s each with the dc link regulated to 800 V
/// and plant R, L, C set 30 % above nominal.
pub fn builtin_case(id: u32) -> Result<ScenarioConfig> {
    let p_steps = [(0.0, 150e3), (2.0, 220e3), (4.0, 80e3), (6.0, 150e3)];
    let irr = vec![
        IrradianceStep { t: 0.0, g: 1000.0 },
        IrradianceStep { t: 6.0, g: 300.0 },
        IrradianceStep { t: 8.0, g: 1000.0 },
    ];
    let p_grid = [150e3, 200e3, 80e3, 129.5e3, 150e3];
    let starts = [0.0, 2.0, 4.0, 6.0, 8.0];
    match id {
        1 => {
            let p_fc = [50e3, 100e3, 0.0, 100e3, 50e3];
            let intervals = (0..5)
                .map(|k| IntervalExpectation {
                    start: starts[k],
                    p_grid: Some(Target::rel(p_grid[k], 0.02)),
                    q_grid: Some(Target::abs(0.0, 2e3)),
                    p_fc: Some(if p_fc[k] > 0.0 {
                        Target::rel(p_fc[k], 0.03)
                    } else {
                        Target::abs(0.0, 3e3)
                    }),
                    p_dump: (k == 2).then_some(Target::rel(20e3, 0.05)),
                })
                .collect();
            Ok(ScenarioConfig {
                name: "case1".into(),
                demand: p_steps
                    .iter()
                    .map(|&(t, p)| DemandStep { t, p, q: 0.0 })
                    .collect(),
                irradiance: irr,
                uncertainty: Uncertainty::uniform(1.3),
                expect: normal_expectations(intervals),
                ..Default::default()
            })
        }
        2 => {
            let q = [100e3, 150e3, 150e3, 100e3];
            let q_targets = [
                Target::rel(100e3, 0.02),
                Target::range(89e3, 95e3),
                Target::rel(150e3, 0.02),
                Target::rel(100e3, 0.02),
                Target::rel(100e3, 0.02),
            ];
            let intervals = (0..5)
                .map(|k| IntervalExpectation {
                    start: starts[k],
                    p_grid: Some(Target::rel(p_grid[k], 0.02)),
                    q_grid: Some(q_targets[k]),
                    ..Default::default()
                })
                .collect();
            Ok(ScenarioConfig {
                name: "case2".into(),
                demand: p_steps
                    .iter()
                    .zip(q)
                    .map(|(&(t, p), q)| DemandStep { t, p, q })
                    .collect(),
                irradiance: irr,
                uncertainty: Uncertainty::uniform(1.3),
                expect: normal_expectations(intervals),
                ..Default::default()
            })
        }
        3 => Ok(sag_case("case3", 1000.0)),
        4 => Ok(sag_case("case4", 300.0)),
        _ => Err(Error::Config(format!(
            "unknown builtin case {id}; expected 1..=4"
        ))),
    }
}
