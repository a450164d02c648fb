use std::collections::VecDeque;

/// Detection threshold (per unit of nominal amplitude).
pub const SAG_DETECT_PU: f64 = 0.90;
/// Release threshold; all phases must exceed it to clear.
pub const SAG_CLEAR_PU: f64 = 0.95;

/// Per-phase one-cycle sliding peak of |v|.
#[derive(Debug, Clone)]
pub struct AmplitudeTracker {
    window: usize,
    n: u64,
    phases: [VecDeque<(u64, f64)>; 3],
}

impl AmplitudeTracker {
    pub fn new(window: usize) -> Self {
        assert!(window > 0);
        AmplitudeTracker {
            window,
            n: 0,
            phases: Default::default(),
        }
    }

    pub fn push(&mut self, v: [f64; 3]) -> [f64; 3] {
        let n = self.n;
        self.n += 1;
        for (q, x) in self.phases.iter_mut().zip(v) {
            let x = x.abs();
            while q.back().is_some_and(|&(_, y)| y <= x) {
                q.pop_back();
            }
            q.push_back((n, x));
            while q.front().is_some_and(|&(k, _)| k + self.window as u64 <= n) {
                q.pop_front();
            }
        }
        self.amplitudes()
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        let peak = |q: &VecDeque<(u64, f64)>| q.front().map_or(0.0, |&(_, y)| y);
        [
            peak(&self.phases[0]),
            peak(&self.phases[1]),
            peak(&self.phases[2]),
        ]
    }

    pub fn is_primed(&self) -> bool {
        self.n >= self.window as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SagStatus {
    pub active: bool,
    pub amplitudes: [f64; 3],
    /// Smallest per-phase amplitude relative to nominal, capped at 1.
    pub min_fraction: f64,
    pub onset: Option<f64>,
}

impl SagStatus {
    pub fn inactive(nominal: f64) -> Self {
        SagStatus {
            active: false,
            amplitudes: [nominal; 3],
            min_fraction: 1.0,
            onset: None,
        }
    }
}

fn min_fraction(amplitudes: &[f64; 3], nominal: f64) -> f64 {
    amplitudes
        .iter()
        .fold(f64::INFINITY, |m, a| m.min(a / nominal))
        .clamp(f64::MIN_POSITIVE, 1.0)
}

/// Stateless threshold test: would a sag be detected from an idle state?
pub fn detect_sag(amplitudes: [f64; 3], nominal: f64) -> SagStatus {
    let frac = min_fraction(&amplitudes, nominal);
    SagStatus {
        active: frac < SAG_DETECT_PU,
        amplitudes,
        min_fraction: frac,
        onset: None,
    }
}

/// Hysteretic sag detector fed by an [`AmplitudeTracker`].
#[derive(Debug, Clone)]
pub struct SagDetector {
    nominal: f64,
    status: SagStatus,
}

impl SagDetector {
    pub fn new(nominal: f64) -> Self {
        SagDetector {
            nominal,
            status: SagStatus::inactive(nominal),
        }
    }

    pub fn status(&self) -> SagStatus {
        self.status
    }

    pub fn update(&mut self, amplitudes: [f64; 3], t: f64) -> SagStatus {
        let frac = min_fraction(&amplitudes, self.nominal);
        let active = if self.status.active {
            frac < SAG_CLEAR_PU
        } else {
            frac < SAG_DETECT_PU
        };
        let onset = match (self.status.active, active) {
            (false, true) => Some(t),
            (true, true) => self.status.onset,
            _ => None,
        };
        self.status = SagStatus {
            active,
            amplitudes,
            min_fraction: frac,
            onset,
        };
        self.status
    }
}
