use super::fc::{fc_step, FcGenParams, FcState};
use super::grid::GridSource;
use super::pv::PvArrayParams;
use crate::error::{Error, Result};
use crate::numerics::rk4_step;
use crate::signal::{clarke, AlphaBeta};
use serde::{Deserialize, Serialize};

/// Below this dc-link voltage a previously energised link is declared collapsed.
pub const COLLAPSE_VOLTAGE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub r: f64,
    pub l: f64,
    pub c: f64,
}

impl Default for Uncertainty {
    fn default() -> Self {
        Uncertainty {
            r: 1.0,
            l: 1.0,
            c: 1.0,
        }
    }
}

impl Uncertainty {
    pub fn uniform(k: f64) -> Self {
        Uncertainty { r: k, l: k, c: k }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r", self.r), ("l", self.l), ("c", self.c)] {
            if !(0.7..=1.3).contains(&v) {
                return Err(Error::Config(format!(
                    "uncertainty factor {name} = {v} outside [0.7, 1.3]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectricalParams {
    pub c: f64,
    pub r: f64,
    pub l: f64,
    pub grid_frequency: f64,
    pub v_hat: f64,
}

impl Default for ElectricalParams {
    fn default() -> Self {
        let (r, l) = lumped_rl(1e-3, 0.25e-3, 0.002, 0.06, 220e3, 260.0, 60.0);
        ElectricalParams {
            c: 12e-3,
            r,
            l,
            grid_frequency: 60.0,
            v_hat: 260.0 * (2.0f64 / 3.0).sqrt(),
        }
    }
}

/// Filter impedance plus transformer series impedance given in per unit on
/// the transformer base (`s_base` VA, `v_ll` V line-to-line).
pub fn lumped_rl(
    r_f: f64,
    l_f: f64,
    r_pu: f64,
    x_pu: f64,
    s_base: f64,
    v_ll: f64,
    f: f64,
) -> (f64, f64) {
    let z_base = v_ll * v_ll / s_base;
    let w = 2.0 * std::f64::consts::PI * f;
    (r_f + r_pu * z_base, l_f + x_pu * z_base / w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantParams {
    pub electrical: ElectricalParams,
    pub uncertainty: Uncertainty,
    pub pv: PvArrayParams,
    pub fc: FcGenParams,
    pub grid: GridSource,
}

impl PlantParams {
    pub fn r(&self) -> f64 {
        self.electrical.r * self.uncertainty.r
    }
    pub fn l(&self) -> f64 {
        self.electrical.l * self.uncertainty.l
    }
    pub fn c(&self) -> f64 {
        self.electrical.c * self.uncertainty.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub t: f64,
    pub v_dc: f64,
    pub i: AlphaBeta,
    pub v_pv: f64,
    pub pv_duty: f64,
    pub fc: FcState,
    pub p_pv: f64,
    pub p_fc: f64,
    pub p_dump: f64,
    /// VSC output power averaged over the last step, including the dump load.
    pub p_terminal: f64,
}

impl PlantState {
    pub fn new(v_dc: f64, fc: &FcGenParams) -> Self {
        PlantState {
            t: 0.0,
            v_dc,
            i: AlphaBeta::ZERO,
            v_pv: 0.0,
            pv_duty: 0.0,
            fc: FcState::new(fc),
            p_pv: 0.0,
            p_fc: 0.0,
            p_dump: 0.0,
            p_terminal: 0.0,
        }
    }
}

/// Repetitive current law `u = k1·i + k2·(i* + x_rc − i)` evaluated
/// continuously through the step; `i_ref` and `x_rc` hold their values at
/// both step ends and are interpolated linearly in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentLaw {
    pub k1: f64,
    pub k2: f64,
    pub i_ref: [AlphaBeta; 2],
    pub x_rc: [AlphaBeta; 2],
    /// Modulation limit on |u|.
    pub limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terminal {
    /// VSC voltage held over the step (clamped to v_dc/2).
    Held(AlphaBeta),
    /// Closed-loop current law, integrated exactly.
    Law(CurrentLaw),
}

/// Additive disturbance channels: dc current (A) and αβ current slopes (A/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Disturbance {
    pub dc: f64,
    pub ab: AlphaBeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantInputs {
    pub terminal: Terminal,
    pub pv_duty: f64,
    /// Generator-level fuel-cell power demand, W.
    pub fc_demand: f64,
    pub dump_power: f64,
    pub irradiance: f64,
    pub temperature_c: f64,
    pub zeta: Disturbance,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// Modulation limit engaged during the step.
    pub saturated: bool,
}

fn phi(a: f64, h: f64) -> (f64, f64) {
    // φ1 = ∫0^h e^{-a(h-s)} ds, φ2 = (1/h)∫0^h s e^{-a(h-s)} ds
    let x = a * h;
    if x.abs() < 1e-3 {
        let p1 = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
        let p2 = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
        (p1, p2)
    } else {
        let em = (-x).exp_m1();
        (-em / a, (x + em) / (a * a * h))
    }
}

/// Exact solution of `di/dt = −a·i + b0 + (b1 − b0)·s/h` after `h`.
fn etd(i0: f64, a: f64, b0: f64, b1: f64, h: f64) -> f64 {
    let (p1, p2) = phi(a, h);
    i0 * (-a * h).exp() + b0 * p1 + (b1 - b0) * p2
}

struct Segment {
    i0: AlphaBeta,
    i1: AlphaBeta,
    v0: AlphaBeta,
    v1: AlphaBeta,
    h: f64,
}

/// Energy delivered by the VSC to the RL branch and grid over a segment.
fn segment_energy(s: &Segment, r: f64, l: f64, zeta: AlphaBeta) -> f64 {
    let stored = 0.5 * l * (s.i1.norm_sq() - s.i0.norm_sq());
    let loss = r * 0.5 * (s.i0.norm_sq() + s.i1.norm_sq()) * s.h;
    let grid = 0.5 * (s.v0.dot(s.i0) + s.v1.dot(s.i1)) * s.h;
    let noise = l * zeta.dot((s.i0 + s.i1) * 0.5) * s.h;
    1.5 * (stored + loss + grid - noise)
}

fn lerp(a: AlphaBeta, b: AlphaBeta, w: f64) -> AlphaBeta {
    a + (b - a) * w
}

fn law_step(
    p: &PlantParams,
    law: &CurrentLaw,
    i0: AlphaBeta,
    t: f64,
    h: f64,
    zeta: AlphaBeta,
) -> (AlphaBeta, f64, bool) {
    let (r, l) = (p.r(), p.l());
    let v0 = clarke_at(&p.grid, t);
    let v1 = clarke_at(&p.grid, t + h);
    let (k1, k2) = (law.k1, law.k2);
    // Reference plus repetitive state: the law acts on `w = i* + x_rc`.
    let w0 = law.i_ref[0] + law.x_rc[0];
    let w1 = law.i_ref[1] + law.x_rc[1];
    let cmd = |i: AlphaBeta, w: AlphaBeta| i * k1 + (w - i) * k2;
    let a_cl = (r - k1 + k2) / l;
    let b = |w: AlphaBeta, v: AlphaBeta| ((w * k2) - v) * (1.0 / l) + zeta;
    let closed =
        |i0: AlphaBeta, wa: AlphaBeta, wb: AlphaBeta, va: AlphaBeta, vb: AlphaBeta, h: f64| {
            let (b0, b1) = (b(wa, va), b(wb, vb));
            AlphaBeta::new(
                etd(i0.alpha, a_cl, b0.alpha, b1.alpha, h),
                etd(i0.beta, a_cl, b0.beta, b1.beta, h),
            )
        };
    let u0 = cmd(i0, w0);
    if u0.norm() <= law.limit {
        let i1 = closed(i0, w0, w1, v0, v1, h);
        let e = segment_energy(&Segment { i0, i1, v0, v1, h }, r, l, zeta);
        return (i1, e, false);
    }
    // Saturated start: hold the clipped command until the unconstrained
    // command (linearised along the open-loop path) re-enters the limit.
    let u_sat = if u0.norm() > 0.0 {
        u0 * (law.limit / u0.norm())
    } else {
        AlphaBeta::ZERO
    };
    let a_ol = r / l;
    let di0 = (u_sat - v0 - i0 * r) * (1.0 / l) + zeta;
    let dref = (w1 - w0) * (1.0 / h);
    let u1 = di0 * (k1 - k2) + dref * k2;
    let (qa, qb, qc) = (
        u1.norm_sq(),
        2.0 * u0.dot(u1),
        u0.norm_sq() - law.limit * law.limit,
    );
    let mut s_c = h;
    if qa > 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let root = (-qb - disc.sqrt()) / (2.0 * qa);
            if root > 0.0 && root < h {
                s_c = root;
            }
        }
    }
    let open = |i0: AlphaBeta, va: AlphaBeta, vb: AlphaBeta, h: f64| {
        let bo = |v: AlphaBeta| (u_sat - v) * (1.0 / l) + zeta;
        let (b0, b1) = (bo(va), bo(vb));
        AlphaBeta::new(
            etd(i0.alpha, a_ol, b0.alpha, b1.alpha, h),
            etd(i0.beta, a_ol, b0.beta, b1.beta, h),
        )
    };
    let w = s_c / h;
    let vc = lerp(v0, v1, w);
    let ic = open(i0, v0, vc, s_c);
    let mut e = segment_energy(
        &Segment {
            i0,
            i1: ic,
            v0,
            v1: vc,
            h: s_c,
        },
        r,
        l,
        zeta,
    );
    if s_c >= h {
        return (ic, e, true);
    }
    let wc = lerp(w0, w1, w);
    let i1 = closed(ic, wc, w1, vc, v1, h - s_c);
    e += segment_energy(
        &Segment {
            i0: ic,
            i1,
            v0: vc,
            v1,
            h: h - s_c,
        },
        r,
        l,
        zeta,
    );
    (i1, e, true)
}

fn clarke_at(grid: &GridSource, t: f64) -> AlphaBeta {
    let v = grid.voltages(t);
    clarke(v[0], v[1], v[2])
}

/// PV output at array voltage `v_pv`; the boost diode blocks reverse current.
pub fn pv_output(p: &PlantParams, v_pv: f64, irradiance: f64, temperature_c: f64) -> Result<f64> {
    if v_pv <= 0.0 || irradiance <= 0.0 {
        return Ok(0.0);
    }
    Ok((v_pv * p.pv.current(v_pv, irradiance, temperature_c)?).max(0.0))
}

/// Advances the plant by one step of length `dt`.
pub fn plant_step(
    state: &PlantState,
    inputs: &PlantInputs,
    p: &PlantParams,
    dt: f64,
) -> Result<(PlantState, StepReport)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let (r, l, c) = (p.r(), p.l(), p.c());
    let t = state.t;
    let duty = inputs.pv_duty.clamp(0.0, 1.0);
    let v_pv = (1.0 - duty) * state.v_dc;
    let p_pv = pv_output(p, v_pv, inputs.irradiance, inputs.temperature_c)?;
    let mut fc = state.fc.clone();
    let p_fc0 = state.fc.total();
    let p_fc = fc_step(
        inputs.fc_demand.clamp(0.0, p.fc.rated()),
        &mut fc,
        &p.fc,
        dt,
    );
    let p_in = p_pv + 0.5 * (p_fc0 + p_fc);
    let p_dump = inputs.dump_power.max(0.0);
    let zeta = inputs.zeta;

    let (i1, w1, report) = match inputs.terminal {
        Terminal::Held(u_cmd) => {
            let lim = 0.5 * state.v_dc.max(0.0);
            let u = if u_cmd.norm() > lim {
                u_cmd * (lim / u_cmd.norm())
            } else {
                u_cmd
            };
            let saturated = u != u_cmd;
            let grid = &p.grid;
            let f = |tt: f64, x: &[f64; 3]| {
                let v = clarke_at(grid, tt);
                let i = AlphaBeta::new(x[1], x[2]);
                let p_t = 1.5 * u.dot(i) + p_dump;
                let vdc = x[0].max(0.0).sqrt();
                [
                    2.0 * (p_in - p_t + vdc * zeta.dc) / c,
                    (-r * i.alpha + u.alpha - v.alpha) / l + zeta.ab.alpha,
                    (-r * i.beta + u.beta - v.beta) / l + zeta.ab.beta,
                ]
            };
            let x0 = [state.v_dc * state.v_dc, state.i.alpha, state.i.beta];
            let x1 = rk4_step(f, &x0, t, dt)?;
            (
                AlphaBeta::new(x1[1], x1[2]),
                x1[0],
                StepReport { saturated },
            )
        }
        Terminal::Law(law) => {
            let (i1, e_ac, saturated) = law_step(p, &law, state.i, t, dt, zeta.ab);
            let e_t = e_ac + p_dump * dt;
            let w1 =
                state.v_dc * state.v_dc + 2.0 * (p_in * dt - e_t + state.v_dc * zeta.dc * dt) / c;
            (i1, w1, StepReport { saturated })
        }
    };
    if !(w1.is_finite() && i1.is_finite()) {
        return Err(Error::IntegrationFault { t });
    }
    let v_dc = w1.max(0.0).sqrt();
    if state.v_dc > COLLAPSE_VOLTAGE && v_dc <= COLLAPSE_VOLTAGE {
        return Err(Error::DcCollapse { t: t + dt, v_dc });
    }
    let p_terminal = p_in + state.v_dc * zeta.dc - 0.5 * c * (w1 - state.v_dc * state.v_dc) / dt;
    Ok((
        PlantState {
            t: t + dt,
            v_dc,
            i: i1,
            v_pv,
            pv_duty: duty,
            fc,
            p_pv,
            p_fc,
            p_dump,
            p_terminal,
        },
        report,
    ))
}
