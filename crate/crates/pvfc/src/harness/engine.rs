use crate::control::{
    current_refs_normal, current_refs_sag, dc_control, fc_demand_from_duty, fc_power_control,
    power_ref_normal, ControllerGains, DcObserver, DcObserverState, Mppt, RepetitiveState,
};
use crate::ems::{ems_step, Demand, EmsDecision, EmsInputs, EmsLimits, Mode, PreSag};
use crate::error::Result;
use crate::numerics::{samples_for, DelayLine};
use crate::plant::{
    plant_step, CurrentLaw, Disturbance, Mpp, PlantInputs, PlantParams, PlantState, Terminal,
};
use crate::signal::{
    clarke, instantaneous_pq, inverse_clarke, AlphaBeta, AmplitudeTracker, SagDetector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::ScenarioConfig;
use super::series::TimeSeries;

/// Largest boost duty the MPPT may command.
const MAX_PV_DUTY: f64 = 0.98;

/// First-order shaped Gaussian noise with stationary RMS `sigma`.
struct Shaped {
    a: f64,
    b: f64,
    x: f64,
}

impl Shaped {
    fn new(sigma: f64, bandwidth: f64, dt: f64) -> Self {
        let a = (-2.0 * std::f64::consts::PI * bandwidth * dt).exp();
        Shaped {
            a,
            b: sigma * (1.0 - a * a).sqrt(),
            x: 0.0,
        }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        if self.b == 0.0 {
            return 0.0;
        }
        let w: f64 = StandardNormal.sample(rng);
        self.x = self.a * self.x + self.b * w;
        self.x
    }
}

/// Maximum power point and open-circuit voltage, cached per irradiance level.
struct PvCache {
    key: Option<u64>,
    mpp: Mpp,
    voc: f64,
}

impl PvCache {
    fn get(&mut self, p: &PlantParams, g: f64, temp: f64) -> Result<(Mpp, f64)> {
        if self.key != Some(g.to_bits()) {
            self.mpp = p.pv.mpp(g, temp)?;
            self.voc = p.pv.open_circuit_voltage(g, temp)?;
            self.key = Some(g.to_bits());
        }
        Ok((self.mpp, self.voc))
    }
}

/// Runs the closed-loop plant for the configured duration and returns the decimated record.
pub fn simulate(cfg: &ScenarioConfig, gains: &ControllerGains) -> Result<TimeSeries> {
    cfg.validate()?;
    gains.validate()?;
    let params = cfg.plant_params()?;
    let dt = cfg.dt;
    let f0 = params.grid.frequency;
    let c_nom = params.electrical.c;
    let r_nom = params.electrical.r;
    let temp = cfg.ems.temperature_c;
    let n_steps = samples_for(cfg.duration, dt);
    let ems_every = samples_for(cfg.ems.period, dt).max(1);
    let period = samples_for(1.0 / f0, dt);
    let quarter = samples_for(0.25 / f0, dt);
    let limits = EmsLimits {
        s_max: cfg.ems.s_max,
        p_fc_rated: params.fc.rated(),
        i_rated: 2.0 * cfg.ems.s_max / (3.0 * params.grid.v_hat),
        v_hat: params.grid.v_hat,
        k_q: cfg.ems.k_q,
        sag_pv_headroom: cfg.ems.sag_pv_headroom,
    };

    let mut pv_cache = PvCache {
        key: None,
        mpp: Mpp {
            voltage: 0.0,
            current: 0.0,
            power: 0.0,
        },
        voc: 0.0,
    };
    let mut state = PlantState::new(cfg.v_dc_ref, &params.fc);
    let (_, voc0) = pv_cache.get(&params, cfg.irradiance_at(0.0), temp)?;
    state.v_pv = voc0.min(state.v_dc);
    let mut pv_duty = 1.0 - state.v_pv / state.v_dc;
    state.pv_duty = pv_duty;

    let observer = DcObserver::new(gains.observer_gain()?, dt);
    let mut obs = DcObserverState {
        v_hat: state.v_dc,
        xi_hat: 0.0,
    };
    let mut rc = [RepetitiveState::new(period), RepetitiveState::new(period)];

    // Histories are primed with the pre-fault (balanced) grid.
    let mut vd = [DelayLine::new(quarter), DelayLine::new(quarter)];
    for k in (1..=quarter).rev() {
        let v = voltage_ab(&params, -(k as f64) * dt);
        vd[0].push(v.alpha);
        vd[1].push(v.beta);
    }
    let mut tracker = AmplitudeTracker::new(period);
    for k in (1..=period).rev() {
        tracker.push(params.grid.voltages(-(k as f64) * dt));
    }
    let mut detector = SagDetector::new(params.grid.v_hat);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut n_dc = Shaped::new(cfg.noise.dc_current, cfg.noise.bandwidth, dt);
    let mut n_a = Shaped::new(cfg.noise.current_slope, cfg.noise.bandwidth, dt);
    let mut n_b = Shaped::new(cfg.noise.current_slope, cfg.noise.bandwidth, dt);

    let mut mode = Mode::Normal;
    let mut pre_sag = PreSag::default();
    let mut mppt = Mppt::new(cfg.ems.mppt_step);
    let mut decision = EmsDecision {
        mode,
        p_fc_ref: 0.0,
        p_dump_ref: 0.0,
        q_grid_ref: 0.0,
        p_grid_ref: None,
        p_clamped: 0.0,
    };
    let mut fc_demand = 0.0;
    let mut last_p_ref = 0.0;
    let mut held = [AlphaBeta::ZERO; 2];
    let mut saturated = false;

    let mut series = TimeSeries::with_capacity(n_steps / cfg.decimation + 2);
    let record = |series: &mut TimeSeries, t: f64, s: &PlantState, v_abc: [f64; 3], mode: Mode| {
        let v = clarke(v_abc[0], v_abc[1], v_abc[2]);
        let (p, q) = instantaneous_pq(v, s.i);
        let i = inverse_clarke(s.i);
        series.push([
            t,
            s.v_dc,
            i[0],
            i[1],
            i[2],
            v_abc[0],
            v_abc[1],
            v_abc[2],
            p,
            q,
            s.p_pv,
            s.fc.total(),
            s.p_dump,
            mode.code() as f64,
        ]);
    };

    for n in 0..n_steps {
        let t = n as f64 * dt;
        state.t = t;
        let v_abc = params.grid.voltages(t);
        let v = clarke(v_abc[0], v_abc[1], v_abc[2]);
        let v_next = voltage_ab(&params, t + dt);
        vd[0].push(v.alpha);
        vd[1].push(v.beta);
        let vd_now = AlphaBeta::new(vd[0].tap(), vd[1].tap());
        let vd_next = AlphaBeta::new(vd[0].tap_ahead(1), vd[1].tap_ahead(1));
        let sag = detector.update(tracker.push(v_abc), t);

        if n % cfg.decimation == 0 {
            record(&mut series, t, &state, v_abc, mode);
        }

        let g = cfg.irradiance_at(t);
        let p_fc = state.fc.total();
        if n % ems_every == 0 {
            match (mode, sag.active) {
                (Mode::Normal, true) => {
                    pre_sag = PreSag {
                        p_grid: last_p_ref,
                        p_pv_available: state.p_pv,
                    };
                    mode = Mode::Sag;
                }
                (Mode::Sag, false) => {
                    mode = Mode::Normal;
                    mppt.reset();
                }
                _ => {}
            }
            let d = cfg.demand_at(t);
            decision = ems_step(
                &EmsInputs {
                    demand: Demand {
                        p_star: d.p,
                        q_star: d.q,
                    },
                    p_pv: state.p_pv,
                    p_fc,
                    sag,
                },
                &limits,
                &pre_sag,
            );
            let duty = fc_power_control(decision.p_fc_ref, p_fc, params.fc.rated());
            fc_demand = fc_demand_from_duty(duty, params.fc.rated());
            if mode == Mode::Normal {
                pv_duty = (pv_duty + mppt.update(state.p_pv, state.v_pv)).clamp(0.0, MAX_PV_DUTY);
            }
        }

        // dc-link loop
        let u = dc_control(state.v_dc, cfg.v_dc_ref, obs.xi_hat, gains.k_dc);
        obs = observer.step(obs, state.v_dc, u);
        let p_ref = match mode {
            Mode::Normal => {
                let p_src = state.p_pv + p_fc - decision.p_dump_ref;
                let p = power_ref_normal(p_src, state.v_dc, u, c_nom);
                last_p_ref = p;
                p
            }
            Mode::Sag => {
                // The PV converter absorbs the link imbalance: withhold C·u of dc current.
                // VSC output is estimated from measured grid power plus nominal series loss;
                // the observer picks up the remainder.
                let p_t = instantaneous_pq(v, state.i).0
                    + 1.5 * r_nom * state.i.norm_sq()
                    + decision.p_dump_ref;
                let p_cmd = p_t - p_fc - c_nom * state.v_dc * u;
                let (mpp, voc) = pv_cache.get(&params, g, temp)?;
                let v_pv = params.pv.voltage_for_power(p_cmd, g, temp, &mpp, voc)?;
                pv_duty = (1.0 - v_pv / state.v_dc).clamp(0.0, MAX_PV_DUTY);
                decision.p_grid_ref.unwrap_or(0.0)
            }
        };
        let q_ref = decision.q_grid_ref;
        let refs = match mode {
            Mode::Normal => [
                current_refs_normal(v, p_ref, q_ref),
                current_refs_normal(v_next, p_ref, q_ref),
            ],
            Mode::Sag => [
                current_refs_sag(v, vd_now, p_ref, q_ref),
                current_refs_sag(v_next, vd_next, p_ref, q_ref),
            ],
        };
        let r0 = refs[0].unwrap_or(held[1]);
        let r1 = refs[1].unwrap_or(r0);
        held = [r0, r1];

        // The filter update needs only delayed taps, so both step ends are known
        // up front; anti-windup uses the previous step's saturation flag.
        let x0 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        let e = r0 - state.i;
        rc[0].advance(e.alpha, gains.omega_c, dt, saturated);
        rc[1].advance(e.beta, gains.omega_c, dt, saturated);
        let x1 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        let law = CurrentLaw {
            k1: gains.k1,
            k2: gains.k2,
            i_ref: [r0, r1],
            x_rc: [x0, x1],
            limit: 0.5 * state.v_dc,
        };
        let inputs = PlantInputs {
            terminal: Terminal::Law(law),
            pv_duty,
            fc_demand,
            dump_power: decision.p_dump_ref,
            irradiance: g,
            temperature_c: temp,
            zeta: Disturbance {
                dc: n_dc.next(&mut rng),
                ab: AlphaBeta::new(n_a.next(&mut rng), n_b.next(&mut rng)),
            },
        };
        let (next, report) = plant_step(&state, &inputs, &params, dt)?;
        saturated = report.saturated;
        state = next;
    }
    if n_steps % cfg.decimation == 0 {
        let t = n_steps as f64 * dt;
        state.t = t;
        record(&mut series, t, &state, params.grid.voltages(t), mode);
    }
    Ok(series)
}

fn voltage_ab(p: &PlantParams, t: f64) -> AlphaBeta {
    let v = p.grid.voltages(t);
    clarke(v[0], v[1], v[2])
}
