use crate::error::{Error, Result};
use crate::numerics::{harmonic_amplitude, thd};
use serde::Serialize;
use std::fmt::Write as _;

use super::config::{ScenarioConfig, Target};
use super::series::{Channel, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    fn of(x: &[f64]) -> Stat {
        if x.is_empty() {
            return Stat {
                mean: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in x {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        Stat {
            mean: sum / x.len() as f64,
            min: lo,
            max: hi,
        }
    }
}

/// Quality figures over the steady part of a sag interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SagMetrics {
    pub sag_index: usize,
    pub unbalanced: bool,
    pub thd_percent: [f64; 3],
    pub current_peak: [f64; 3],
    /// max |p − p̄| / p̄.
    pub p_ripple: f64,
    /// Dominant frequency of the reactive-power oscillation, Hz.
    pub q_dominant_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalMetrics {
    pub start: f64,
    pub end: f64,
    /// Start of the steady window (after the transient exclusion).
    pub steady_start: f64,
    pub samples: usize,
    pub p_grid: Stat,
    pub q_grid: Stat,
    pub p_pv: Stat,
    pub p_fc: Stat,
    pub p_dump: Stat,
    pub v_dc: Stat,
    /// Largest relative v_dc deviation over the whole interval.
    pub v_dc_overshoot: f64,
    /// Largest relative v_dc deviation over the steady window.
    pub v_dc_steady_dev: f64,
    /// Fraction of steady samples inside ±0.5 % of the reference.
    pub v_dc_band_occupancy: f64,
    pub sag: Option<SagMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub v_dc_ref: f64,
    pub intervals: Vec<IntervalMetrics>,
    pub verdicts: Vec<Verdict>,
}

impl MetricsReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    /// Plain-text table of interval means followed by one line per verdict.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {}", self.scenario);
        let _ = writeln!(
            s,
            "{:>12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8}",
            "interval_s", "P_grid_kW", "Q_kvar", "P_pv_kW", "P_fc_kW", "P_d_kW", "vdc_dev%", "THD%"
        );
        for iv in &self.intervals {
            let thd = iv.sag.as_ref().map_or(String::from("-"), |m| {
                format!("{:.2}", m.thd_percent.iter().cloned().fold(0.0, f64::max))
            });
            let _ = writeln!(
                s,
                "{:>12} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>8.3} {:>8}",
                format!("{}-{}", iv.start, iv.end),
                iv.p_grid.mean / 1e3,
                iv.q_grid.mean / 1e3,
                iv.p_pv.mean / 1e3,
                iv.p_fc.mean / 1e3,
                iv.p_dump.mean / 1e3,
                100.0 * iv.v_dc_steady_dev,
                thd
            );
        }
        for v in &self.verdicts {
            let _ = writeln!(
                s,
                "[{}] {}: {}",
                if v.pass { "PASS" } else { "FAIL" },
                v.name,
                v.detail
            );
        }
        s
    }
}

fn require(ts: &TimeSeries, chans: &[Channel]) -> Result<()> {
    match chans.iter().find(|&&c| !ts.has(c)) {
        Some(c) => Err(Error::Config(format!("series lacks channel {}", c.name()))),
        None => Ok(()),
    }
}

/// Indices `[lo, hi)` of samples with `a ≤ t < b` (or `≤ b` when `closed`).
fn span(t: &[f64], a: f64, b: f64, closed: bool) -> (usize, usize) {
    let eps = 1e-9;
    let lo = t.partition_point(|&x| x < a - eps);
    let hi = if closed {
        t.partition_point(|&x| x <= b + eps)
    } else {
        t.partition_point(|&x| x < b - eps)
    };
    (lo, hi.max(lo))
}

fn sag_metrics(
    ts: &TimeSeries,
    lo: usize,
    hi: usize,
    f0: f64,
    index: usize,
    unbalanced: bool,
) -> Result<SagMetrics> {
    let dt = ts
        .sample_period()
        .ok_or_else(|| Error::Config("series too short".into()))?;
    let per_cycle = (1.0 / (f0 * dt)).round() as usize;
    let fs = per_cycle as f64 * f0;
    let cycles = (hi - lo) / per_cycle.max(1);
    let mut thd_percent = [f64::NAN; 3];
    let mut current_peak = [0.0; 3];
    let (p_ripple, q_dominant_hz);
    for (k, ch) in [Channel::IA, Channel::IB, Channel::IC]
        .into_iter()
        .enumerate()
    {
        let x = &ts.get(ch)[lo..hi];
        current_peak[k] = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let p = &ts.get(Channel::PGrid)[lo..hi];
    let pm = Stat::of(p).mean;
    p_ripple = p.iter().fold(0.0f64, |m, v| m.max((v - pm).abs())) / pm.abs().max(1.0);
    if cycles >= 1 {
        let w0 = hi - cycles * per_cycle;
        let n_harm = (per_cycle / 2).saturating_sub(1).clamp(1, 40);
        for (k, ch) in [Channel::IA, Channel::IB, Channel::IC]
            .into_iter()
            .enumerate()
        {
            thd_percent[k] = thd(&ts.get(ch)[w0..hi], f0, fs, n_harm).unwrap_or(f64::NAN);
        }
        let q = &ts.get(Channel::QGrid)[w0..hi];
        let qm = Stat::of(q).mean;
        let q0: Vec<f64> = q.iter().map(|v| v - qm).collect();
        let (mut best, mut best_a) = (0.0, -1.0);
        for k in 1..=n_harm.min(20) {
            let a = harmonic_amplitude(&q0, k as f64 * f0, fs);
            if a > best_a {
                best_a = a;
                best = k as f64 * f0;
            }
        }
        q_dominant_hz = best;
    } else {
        q_dominant_hz = f64::NAN;
    }
    Ok(SagMetrics {
        sag_index: index,
        unbalanced,
        thd_percent,
        current_peak,
        p_ripple,
        q_dominant_hz,
    })
}

/// Per-interval statistics and verdicts against `cfg.expect`.
pub fn compute_metrics(ts: &TimeSeries, cfg: &ScenarioConfig) -> Result<MetricsReport> {
    require(
        ts,
        &[
            Channel::Time,
            Channel::VDc,
            Channel::PGrid,
            Channel::QGrid,
            Channel::PPv,
            Channel::PFc,
            Channel::PDump,
        ],
    )?;
    let t = ts.get(Channel::Time);
    let f0 = cfg.plant.electrical().grid_frequency;
    let v_ref = cfg.v_dc_ref;
    let end_t = t.last().copied().unwrap_or(0.0).min(cfg.duration);
    let mut bounds = vec![0.0];
    bounds.extend(cfg.edges().into_iter().filter(|&e| e < end_t));
    bounds.push(end_t);

    let mut intervals = Vec::new();
    for (k, w) in bounds.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let last = k + 2 == bounds.len();
        let (alo, ahi) = span(t, a, b, last);
        let steady_start = (a + cfg.transient_window).min(b);
        let (lo, hi) = span(t, steady_start, b, last);
        let st = |c: Channel| Stat::of(&ts.get(c)[lo..hi]);
        let dev = |x: &[f64]| {
            x.iter()
                .fold(0.0f64, |m, v| m.max((v - v_ref).abs() / v_ref))
        };
        let vdc = ts.get(Channel::VDc);
        let steady_v = &vdc[lo..hi];
        let in_band = steady_v
            .iter()
            .filter(|v| ((*v - v_ref) / v_ref).abs() <= 0.005)
            .count();
        let sag_idx = cfg
            .sags
            .iter()
            .position(|s| a >= s.start - 1e-9 && b <= s.end + 1e-9);
        let sag = match sag_idx {
            Some(i) if hi > lo => {
                require(ts, &[Channel::IA, Channel::IB, Channel::IC])?;
                let r = cfg.sags[i].retained;
                let unbalanced = r.iter().any(|x| (x - r[0]).abs() > 1e-12);
                Some(sag_metrics(ts, lo, hi, f0, i, unbalanced)?)
            }
            _ => None,
        };
        intervals.push(IntervalMetrics {
            start: a,
            end: b,
            steady_start,
            samples: hi - lo,
            p_grid: st(Channel::PGrid),
            q_grid: st(Channel::QGrid),
            p_pv: st(Channel::PPv),
            p_fc: st(Channel::PFc),
            p_dump: st(Channel::PDump),
            v_dc: st(Channel::VDc),
            v_dc_overshoot: dev(&vdc[alo..ahi]),
            v_dc_steady_dev: dev(steady_v),
            v_dc_band_occupancy: if hi > lo {
                in_band as f64 / (hi - lo) as f64
            } else {
                f64::NAN
            },
            sag,
        });
    }
    let verdicts = evaluate(cfg, &intervals);
    Ok(MetricsReport {
        scenario: cfg.name.clone(),
        v_dc_ref: v_ref,
        intervals,
        verdicts,
    })
}

fn check(name: String, x: f64, target: &Target, unit: f64, unit_name: &str) -> Verdict {
    Verdict {
        pass: target.contains(x),
        detail: format!(
            "{:.3} {unit_name} (target {:.3} ± {:.3})",
            x / unit,
            target.value / unit,
            target.tolerance() / unit
        ),
        name,
    }
}

fn bound(name: String, x: f64, limit: f64, what: &str) -> Verdict {
    Verdict {
        pass: x <= limit,
        detail: format!("{what} {x:.4} (limit {limit:.4})"),
        name,
    }
}

fn evaluate(cfg: &ScenarioConfig, intervals: &[IntervalMetrics]) -> Vec<Verdict> {
    let mut out = Vec::new();
    let e = &cfg.expect;
    let label = |iv: &IntervalMetrics| format!("[{}, {}] s", iv.start, iv.end);
    for x in &e.intervals {
        let Some(iv) = intervals
            .iter()
            .find(|iv| (iv.start - x.start).abs() < 1e-6)
        else {
            out.push(Verdict {
                name: format!("interval at {} s", x.start),
                pass: false,
                detail: "no such interval in the run".into(),
            });
            continue;
        };
        let l = label(iv);
        if let Some(tg) = &x.p_grid {
            out.push(check(
                format!("{l} P_grid mean"),
                iv.p_grid.mean,
                tg,
                1e3,
                "kW",
            ));
        }
        if let Some(tg) = &x.q_grid {
            out.push(check(
                format!("{l} Q_grid mean"),
                iv.q_grid.mean,
                tg,
                1e3,
                "kvar",
            ));
        }
        if let Some(tg) = &x.p_fc {
            out.push(check(format!("{l} P_fc mean"), iv.p_fc.mean, tg, 1e3, "kW"));
        }
        if let Some(tg) = &x.p_dump {
            out.push(check(
                format!("{l} P_dump mean"),
                iv.p_dump.mean,
                tg,
                1e3,
                "kW",
            ));
        }
    }
    if let Some(band) = e.v_dc_band {
        for iv in intervals
            .iter()
            .filter(|iv| iv.sag.is_none() && iv.samples > 0)
        {
            out.push(bound(
                format!("{} v_dc steady band", label(iv)),
                iv.v_dc_steady_dev,
                band,
                "max |Δv|/v*",
            ));
        }
    }
    if let Some(se) = &e.sag {
        for (i, _) in cfg.sags.iter().enumerate() {
            let ivs: Vec<&IntervalMetrics> = intervals
                .iter()
                .filter(|iv| iv.sag.as_ref().is_some_and(|m| m.sag_index == i))
                .collect();
            if ivs.is_empty() {
                out.push(Verdict {
                    name: format!("sag {i}"),
                    pass: false,
                    detail: "no steady samples".into(),
                });
                continue;
            }
            for iv in ivs {
                let m = iv.sag.as_ref().expect("filtered");
                let l = format!("sag {i} {}", label(iv));
                let peak = m.current_peak.iter().cloned().fold(0.0, f64::max);
                out.push(bound(
                    format!("{l} current peak"),
                    peak,
                    se.current_limit,
                    "A",
                ));
                if se.q_positive {
                    out.push(Verdict {
                        name: format!("{l} Q_grid > 0"),
                        pass: iv.q_grid.mean > 0.0,
                        detail: format!("mean {:.2} kvar", iv.q_grid.mean / 1e3),
                    });
                }
                if m.unbalanced {
                    out.push(bound(
                        format!("{l} P ripple"),
                        m.p_ripple,
                        se.p_ripple_max,
                        "max |Δp|/p̄",
                    ));
                    let thd = m.thd_percent.iter().cloned().fold(f64::NAN, f64::max);
                    out.push(Verdict {
                        name: format!("{l} current THD"),
                        pass: thd < se.thd_max_percent,
                        detail: format!(
                            "{:.3} % (limit {} %), per phase {:.3?}",
                            thd, se.thd_max_percent, m.thd_percent
                        ),
                    });
                    out.push(Verdict {
                        name: format!("{l} Q oscillation line"),
                        pass: (m.q_dominant_hz - se.q_line_hz).abs() < 1e-6,
                        detail: format!("{} Hz (expected {} Hz)", m.q_dominant_hz, se.q_line_hz),
                    });
                }
                if se.v_dc_band_sags.contains(&i) {
                    out.push(bound(
                        format!("{l} v_dc band"),
                        iv.v_dc_steady_dev,
                        se.v_dc_band,
                        "max |Δv|/v*",
                    ));
                }
            }
        }
    }
    out
}
