use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A voltage sag applied at the grid bus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SagSpec {
    pub start: f64,
    pub end: f64,
    /// Retained per-phase fractions (a, b, c).
    pub retained: [f64; 3],
}

impl SagSpec {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

/// Validated, sorted, non-overlapping list of sags.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SagSchedule(Vec<SagSpec>);

impl SagSchedule {
    pub fn new(mut sags: Vec<SagSpec>) -> Result<Self> {
        for s in &sags {
            if !(s.start < s.end) || !s.start.is_finite() || !s.end.is_finite() {
                return Err(Error::Config(format!(
                    "sag [{}, {}] has start ≥ end",
                    s.start, s.end
                )));
            }
            if s.retained.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
                return Err(Error::Config(format!(
                    "sag retained fractions {:?} outside (0, 1]",
                    s.retained
                )));
            }
        }
        sags.sort_by(|a, b| a.start.total_cmp(&b.start));
        if let Some(w) = sags.windows(2).find(|w| w[1].start < w[0].end) {
            return Err(Error::Config(format!(
                "sags [{}, {}] and [{}, {}] overlap",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
        Ok(SagSchedule(sags))
    }

    pub fn sags(&self) -> &[SagSpec] {
        &self.0
    }

    pub fn factors(&self, t: f64) -> [f64; 3] {
        self.0
            .iter()
            .find(|s| s.contains(t))
            .map_or([1.0; 3], |s| s.retained)
    }
}

/// Ideal 60 Hz source with programmable sags.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSource {
    pub frequency: f64,
    pub v_hat: f64,
    pub sags: SagSchedule,
}

impl GridSource {
    pub fn voltages(&self, t: f64) -> [f64; 3] {
        grid_voltages(t, self.sags.sags(), self.v_hat, self.frequency)
    }
}

/// Phase voltages at `t`: balanced set scaled per phase by any active sag.
pub fn grid_voltages(t: f64, sags: &[SagSpec], v_hat: f64, frequency: f64) -> [f64; 3] {
    let k = sags
        .iter()
        .find(|s| s.contains(t))
        .map_or([1.0; 3], |s| s.retained);
    let th = 2.0 * PI * frequency * t;
    [
        k[0] * v_hat * th.cos(),
        k[1] * v_hat * (th - 2.0 * PI / 3.0).cos(),
        k[2] * v_hat * (th + 2.0 * PI / 3.0).cos(),
    ]
}
