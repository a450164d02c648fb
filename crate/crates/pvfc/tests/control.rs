use nalgebra::Vector2;
use proptest::prelude::*;
use pvfc::control::{
    current_refs_normal, current_refs_sag, curtailment_ref_sag, dc_control, dc_observer_step,
    fc_demand_from_duty, fc_power_control, mppt_po, power_ref_normal, rates_from_tau,
    repetitive_step, CurrentGains, DcObserver, DcObserverState, Mppt, RepetitiveState, FC_MAX_DUTY,
};
use pvfc::lmi::synth_dc_observer;
use pvfc::numerics::{thd, DT};
use pvfc::plant::{
    plant_step, CurrentLaw, Disturbance, ElectricalParams, FcGenParams, FcState, GridSource,
    PlantInputs, PlantParams, PlantState, PvArrayParams, SagSchedule, Terminal, Uncertainty,
};
use pvfc::signal::{instantaneous_pq, inverse_clarke, AlphaBeta};
use std::f64::consts::PI;

const V_HAT: f64 = 212.289_9;

fn rotating(amp: f64, t: f64, phase: f64) -> AlphaBeta {
    let th = 2.0 * PI * 60.0 * t + phase;
    AlphaBeta::new(amp * th.cos(), amp * th.sin())
}

#[test]
fn dc_law_examples() {
    assert_eq!(dc_control(800.0, 800.0, 0.0, 100.0), 0.0);
    assert_eq!(dc_control(810.0, 800.0, 0.0, 100.0), 1000.0);
    assert_eq!(dc_control(800.0, 800.0, -7.0, 100.0), -7.0);
    assert_eq!(power_ref_normal(75e3, 800.0, 0.0, 12e-3), 75e3);
    assert!((power_ref_normal(100e3, 800.0, 1000.0, 12e-3) - 109.6e3).abs() < 1e-6);
    assert_eq!(power_ref_normal(0.0, 800.0, 0.0, 12e-3), 0.0);
    assert_eq!(curtailment_ref_sag(0.0, 12e-3), 0.0);
    assert!((curtailment_ref_sag(1000.0, 12e-3) - 12.0).abs() < 1e-12);
}

#[test]
fn dc_error_decays_at_k_dc() {
    // v̇ = ξ − u with exact cancellation: e(t) = e(0)·e^{−k t}.
    let (k, xi) = (100.0, 37.0);
    let mut v = 810.0;
    let dt = DT;
    for n in 1..=(0.05 / dt) as usize {
        let u = dc_control(v, 800.0, xi, k);
        v += dt * (xi - u);
        let bound = 10.0 * (-k * n as f64 * dt).exp() * 1.01;
        assert!((v - 800.0).abs() <= bound);
    }
    let half = 2f64.ln() / k;
    assert!((half - 6.93e-3).abs() < 1e-5);
}

#[test]
fn observer_with_exact_state_stays_put() {
    let g = Vector2::new(1146.0, 328_000.0);
    let s = DcObserverState {
        v_hat: 800.0,
        xi_hat: 0.0,
    };
    let n = dc_observer_step(s, 800.0, 0.0, &g, DT);
    assert!((n.v_hat - 800.0).abs() < 1e-9 && n.xi_hat.abs() < 1e-9);
    // Zero gain: pure model propagation, v̂ integrates ξ̂ − u.
    let s = DcObserverState {
        v_hat: 800.0,
        xi_hat: 60.0,
    };
    let n = dc_observer_step(s, 0.0, 0.0, &Vector2::zeros(), 1e-3);
    assert!((n.v_hat - 800.06).abs() < 1e-9 && n.xi_hat == 60.0);
}

#[test]
fn observer_recovers_constant_disturbance() {
    let alpha = 50.0;
    let obs = DcObserver::new(synth_dc_observer(alpha).unwrap().gain().unwrap(), DT);
    let xi = 10.0;
    let mut v = 800.0;
    let mut s = DcObserverState::default();
    let n = (5.0 / alpha / DT).round() as usize;
    for _ in 0..n {
        s = obs.step(s, v, 0.0);
        v += DT * xi;
    }
    assert!((s.xi_hat - xi).abs() <= 0.01 * xi, "ξ̂ = {}", s.xi_hat);
    assert!((s.v_hat - v).abs() < 1e-2);
}

#[test]
fn rates_follow_time_constant() {
    let (lambda, k_dc) = rates_from_tau(2e-3);
    assert_eq!((lambda, k_dc), (500.0, 100.0));
    assert!(lambda >= 5.0 * k_dc);
}

#[test]
fn normal_reference_example() {
    assert_eq!(
        current_refs_normal(AlphaBeta::new(V_HAT, 0.0), 0.0, 0.0),
        Some(AlphaBeta::ZERO)
    );
    let i = current_refs_normal(AlphaBeta::new(V_HAT, 0.0), 150e3, 0.0).unwrap();
    assert!((i.alpha - 471.0).abs() < 0.1, "i_α = {}", i.alpha);
    assert_eq!(i.beta, 0.0);
    assert_eq!(
        current_refs_normal(AlphaBeta::new(0.5, 0.0), 1e3, 0.0),
        None
    );
}

#[test]
fn sag_references_match_normal_on_balanced_grid() {
    for k in 0..16 {
        let t = k as f64 / 960.0;
        let v = rotating(V_HAT, t, 0.0);
        let vd = rotating(V_HAT, t - 0.25 / 60.0, 0.0);
        let a = current_refs_normal(v, 90e3, 40e3).unwrap();
        let b = current_refs_sag(v, vd, 90e3, 40e3).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm());
    }
    assert_eq!(
        current_refs_sag(AlphaBeta::new(1.0, 0.0), AlphaBeta::new(1.0, 0.0), 1e3, 0.0),
        None
    );
}

/// Unbalanced set with a negative-sequence part: phase a retained at `k`.
fn unbalanced(t: f64, k: [f64; 3]) -> AlphaBeta {
    let th = 2.0 * PI * 60.0 * t;
    let a = k[0] * V_HAT * th.cos();
    let b = k[1] * V_HAT * (th - 2.0 * PI / 3.0).cos();
    let c = k[2] * V_HAT * (th + 2.0 * PI / 3.0).cos();
    pvfc::signal::clarke(a, b, c)
}

#[test]
fn sag_references_hold_real_power_constant() {
    let (p_ref, q_ref) = (80e3, 60e3);
    let mut p = Vec::new();
    let mut q = Vec::new();
    let mut ia = Vec::new();
    for n in 0..1000 {
        let t = n as f64 * DT;
        let v = unbalanced(t, [0.7, 1.0, 1.0]);
        let vd = unbalanced(t - 0.25 / 60.0, [0.7, 1.0, 1.0]);
        let i = current_refs_sag(v, vd, p_ref, q_ref).unwrap();
        let pq = instantaneous_pq(v, i);
        p.push(pq.0);
        q.push(pq.1);
        ia.push(inverse_clarke(i)[0]);
    }
    let ripple = p.iter().fold(0.0f64, |m, x| m.max((x - p_ref).abs()));
    assert!(ripple < 1e-3 * p_ref, "ripple {ripple}");
    // q oscillates at twice the line frequency.
    let spec = pvfc::numerics::Spectrum::analyze(&q, 60.0, 60_000.0, 4).unwrap();
    assert!(spec.harmonic(2) > 1e3);
    assert!(
        spec.harmonic(1) < 1e-6 * spec.harmonic(2) && spec.harmonic(3) < 1e-6 * spec.harmonic(2)
    );
    assert!(thd(&ia, 60.0, 60_000.0, 40).unwrap() < 0.5);
}

#[test]
fn two_phase_sag_currents_are_sinusoidal() {
    let phase = |p: usize| -> Vec<f64> {
        (0..1000)
            .map(|n| {
                let t = n as f64 * DT;
                let k = [0.7, 0.7, 1.0];
                let i =
                    current_refs_sag(unbalanced(t, k), unbalanced(t - 0.25 / 60.0, k), 80e3, 30e3)
                        .unwrap();
                inverse_clarke(i)[p]
            })
            .collect()
    };
    for p in 0..3 {
        assert!(thd(&phase(p), 60.0, 60_000.0, 40).unwrap() < 0.5);
    }
}

#[test]
fn repetitive_law_arithmetic() {
    let g = CurrentGains {
        k1: 3.0,
        k2: 7.0,
        omega_c: 1000.0,
    };
    let mut s = RepetitiveState::new(1000);
    assert_eq!(repetitive_step(&mut s, 0.0, 0.0, 5.0, &g, 1e9, DT), 35.0);
    let mut s = RepetitiveState::new(1000);
    assert_eq!(repetitive_step(&mut s, 0.0, 5.0, 5.0, &g, 1e9, DT), 15.0);
    // Clamp and freeze.
    let mut s = RepetitiveState::new(1);
    s.x_rc = 1.0;
    assert_eq!(repetitive_step(&mut s, 4.0, 0.0, 5.0, &g, 10.0, DT), 10.0);
    assert_eq!(s.x_rc, 1.0);
}

#[test]
fn repetitive_filter_accumulates_delayed_error() {
    let mut s = RepetitiveState::new(3);
    for _ in 0..3 {
        s.advance(2.0, 1000.0, DT, false);
    }
    assert_eq!(s.x_rc, 0.0);
    s.advance(2.0, 1000.0, DT, false);
    assert!((s.x_rc - DT * 1000.0 * 2.0).abs() < 1e-15);
}

fn rl_params() -> PlantParams {
    PlantParams {
        electrical: ElectricalParams {
            v_hat: 0.0,
            ..Default::default()
        },
        uncertainty: Uncertainty::default(),
        pv: PvArrayParams::default(),
        fc: FcGenParams::default(),
        grid: GridSource {
            frequency: 60.0,
            v_hat: 0.0,
            sags: SagSchedule::default(),
        },
    }
}

/// Per-cycle peak and RMS tracking error on the bare RL plant under the repetitive law.
fn rl_tracking(k2: f64, cycles: usize) -> Vec<(f64, f64)> {
    let p = rl_params();
    let mut s = PlantState::new(800.0, &p.fc);
    s.fc = FcState {
        stack_power: vec![0.0, 0.0],
    };
    let mut rc = [RepetitiveState::new(1000), RepetitiveState::new(1000)];
    let omega_c = 1000.0;
    let amp = 100.0;
    let mut out = Vec::new();
    let (mut peak, mut sq) = (0.0f64, 0.0f64);
    for n in 0..cycles * 1000 {
        let t = n as f64 * DT;
        let r0 = rotating(amp, t, 0.0);
        let e = r0 - s.i;
        if n > 0 && n % 1000 == 0 {
            out.push((peak, (sq / 1000.0).sqrt()));
            peak = 0.0;
            sq = 0.0;
        }
        peak = peak.max(e.norm());
        sq += e.alpha * e.alpha;
        let x0 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        rc[0].advance(e.alpha, omega_c, DT, false);
        rc[1].advance(e.beta, omega_c, DT, false);
        let x1 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        let inputs = PlantInputs {
            terminal: Terminal::Law(CurrentLaw {
                k1: 0.0,
                k2,
                i_ref: [r0, rotating(amp, t + DT, 0.0)],
                x_rc: [x0, x1],
                limit: 400.0,
            }),
            pv_duty: 0.0,
            fc_demand: 0.0,
            dump_power: 0.0,
            irradiance: 0.0,
            temperature_c: 25.0,
            zeta: Disturbance::default(),
        };
        s = plant_step(&s, &inputs, &p, DT).unwrap().0;
    }
    out.push((peak, (sq / 1000.0).sqrt()));
    out
}

#[test]
fn repetitive_learning_reduces_error() {
    let e = rl_tracking(0.2, 12);
    // The first cycle is the unlearned response; learning starts one period in.
    for w in e[1..6].windows(2) {
        assert!(w[1].0 < w[0].0, "per-cycle peak errors {:?}", &e[..6]);
    }
}

#[test]
fn repetitive_loop_tracks_fundamental_at_runtime_gain() {
    let e = rl_tracking(8190.74, 11);
    let rms_ref = 100.0 / 2f64.sqrt();
    let last = e[10].1;
    assert!(last < 5e-3 * rms_ref, "cycle-11 RMS error {last}");
}

#[test]
fn mppt_rules() {
    // Power rose after a voltage increase: keep increasing voltage (lower duty).
    assert!(mppt_po(101.0, 501.0, (100.0, 500.0), 0.01) < 0.0);
    // Power fell after a voltage increase: reverse.
    assert!(mppt_po(99.0, 501.0, (100.0, 500.0), 0.01) > 0.0);
    assert!(mppt_po(99.0, 499.0, (100.0, 500.0), 0.01) < 0.0);
    // Cold start first move lowers the voltage.
    assert!(Mppt::new(0.01).update(0.0, 700.0) > 0.0);
}

#[test]
fn mppt_reaches_rated_power_from_open_circuit() {
    let pv = PvArrayParams::default();
    let v_dc = 800.0;
    let voc = pv.open_circuit_voltage(1000.0, 25.0).unwrap();
    let mut d = 1.0 - voc / v_dc;
    let mut m = Mppt::new(5e-4);
    let mut p = 0.0;
    for _ in 0..500 {
        let v = (1.0 - d) * v_dc;
        p = pv.power(v, 1000.0, 25.0).unwrap();
        d = (d + m.update(p, v)).clamp(0.0, 0.9);
    }
    assert!((p - 100e3).abs() <= 2e3, "P = {p}");
}

#[test]
fn fc_control_examples() {
    assert_eq!(fc_power_control(50e3, 0.0, 100e3), FC_MAX_DUTY);
    // At balance only the feed-forward term remains.
    assert!((fc_power_control(50e3, 50e3, 100e3) - 0.475).abs() < 1e-12);
    assert_eq!(fc_power_control(0.0, 50e3, 100e3), 0.0);
    assert_eq!(fc_demand_from_duty(FC_MAX_DUTY, 100e3), 100e3);
}

#[test]
fn fc_loop_settles() {
    let p = FcGenParams::default();
    let mut s = FcState::new(&p);
    let dt = 1e-3;
    let mut out = 0.0;
    for _ in 0..500 {
        let duty = fc_power_control(50e3, out, p.rated());
        out = pvfc::plant::fc_step(fc_demand_from_duty(duty, p.rated()), &mut s, &p, dt);
    }
    assert!((out - 50e3).abs() <= 1e3, "P_fc = {out}");
}

proptest! {
    #[test]
    fn references_round_trip(al in -400.0..400.0f64, be in -400.0..400.0f64, p in -2e5..2e5f64, q in -2e5..2e5f64) {
        let v = AlphaBeta::new(al, be);
        prop_assume!(v.norm() > 10.0);
        let (pp, qq) = instantaneous_pq(v, current_refs_normal(v, p, q).unwrap());
        prop_assert!((pp - p).abs() <= 1e-9 * (1.0 + p.abs().max(q.abs())));
        prop_assert!((qq - q).abs() <= 1e-9 * (1.0 + p.abs().max(q.abs())));
    }

    #[test]
    fn sag_references_deliver_p_exactly(t in 0.0..0.1f64, ka in 0.3..1.0f64, kb in 0.3..1.0f64, p in 0.0..2e5f64, q in 0.0..1e5f64) {
        let k = [ka, kb, 1.0];
        let v = unbalanced(t, k);
        let vd = unbalanced(t - 0.25 / 60.0, k);
        if let Some(i) = current_refs_sag(v, vd, p, q) {
            let (pp, _) = instantaneous_pq(v, i);
            prop_assert!((pp - p).abs() <= 1e-6 * (1.0 + p));
        }
    }

    #[test]
    fn fc_duty_in_range(r in 0.0..100e3f64, m in 0.0..100e3f64) {
        let d = fc_power_control(r, m, 100e3);
        prop_assert!((0.0..=FC_MAX_DUTY).contains(&d));
    }
}
