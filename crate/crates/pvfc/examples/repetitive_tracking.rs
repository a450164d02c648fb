//! Repetitive current control on the bare RL filter: per-cycle tracking error
//! with and without the internal-model filter, at a deliberately weak gain.
use pvfc::control::RepetitiveState;
use pvfc::numerics::DT;
use pvfc::plant::{
    plant_step, CurrentLaw, Disturbance, ElectricalParams, FcGenParams, GridSource, PlantInputs,
    PlantParams, PlantState, PvArrayParams, SagSchedule, Terminal, Uncertainty,
};
use pvfc::signal::AlphaBeta;
use std::f64::consts::PI;

fn reference(t: f64) -> AlphaBeta {
    let th = 2.0 * PI * 60.0 * t;
    AlphaBeta::new(100.0 * th.cos(), 100.0 * th.sin())
}

fn run(k2: f64, learn: bool, cycles: usize) -> pvfc::Result<Vec<f64>> {
    let p = PlantParams {
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
    };
    let mut s = PlantState::new(800.0, &p.fc);
    let mut rc = [RepetitiveState::new(1000), RepetitiveState::new(1000)];
    let mut rms = Vec::new();
    let mut sq = 0.0;
    for n in 0..cycles * 1000 {
        let t = n as f64 * DT;
        let e = reference(t) - s.i;
        sq += e.norm_sq();
        if (n + 1) % 1000 == 0 {
            rms.push((sq / 1000.0).sqrt());
            sq = 0.0;
        }
        let x0 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        if learn {
            rc[0].advance(e.alpha, 1000.0, DT, false);
            rc[1].advance(e.beta, 1000.0, DT, false);
        }
        let x1 = AlphaBeta::new(rc[0].x_rc, rc[1].x_rc);
        let law = CurrentLaw {
            k1: 0.0,
            k2,
            i_ref: [reference(t), reference(t + DT)],
            x_rc: [x0, x1],
            limit: 400.0,
        };
        let inputs = PlantInputs {
            terminal: Terminal::Law(law),
            pv_duty: 0.0,
            fc_demand: 0.0,
            dump_power: 0.0,
            irradiance: 0.0,
            temperature_c: 25.0,
            zeta: Disturbance::default(),
        };
        s = plant_step(&s, &inputs, &p, DT)?.0;
    }
    Ok(rms)
}

fn main() -> pvfc::Result<()> {
    let k2 = 0.5;
    let plain = run(k2, false, 10)?;
    let learned = run(k2, true, 10)?;
    println!("k2 = {k2}, reference 100 A peak; per-cycle RMS error |e| in A");
    println!("{:>5} {:>12} {:>12}", "cycle", "P only", "repetitive");
    for (k, (a, b)) in plain.iter().zip(&learned).enumerate() {
        println!("{:>5} {a:>12.4} {b:>12.4}", k + 1);
    }
    Ok(())
}
