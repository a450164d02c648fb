//! Current references under an unbalanced sag: the delayed-voltage law keeps
//! real power flat while reactive power swings at twice line frequency.
use pvfc::control::{current_refs_normal, current_refs_sag};
use pvfc::ems::{sag_power_refs, EmsLimits};
use pvfc::numerics::thd;
use pvfc::signal::{clarke, detect_sag, instantaneous_pq, inverse_clarke, AlphaBeta};
use std::f64::consts::PI;

fn grid(t: f64, k: [f64; 3], v_hat: f64) -> AlphaBeta {
    let th = 2.0 * PI * 60.0 * t;
    clarke(
        k[0] * v_hat * th.cos(),
        k[1] * v_hat * (th - 2.0 * PI / 3.0).cos(),
        k[2] * v_hat * (th + 2.0 * PI / 3.0).cos(),
    )
}

fn main() {
    let limits = EmsLimits::default();
    let k = [0.7, 1.0, 1.0];
    let sag = detect_sag(k.map(|x| x * limits.v_hat), limits.v_hat);
    let (p, q) = sag_power_refs(&sag, &limits, 100e3, 95e3);
    println!("1PG 30%: P* = {:.1} kW, Q* = {:.1} kvar", p / 1e3, q / 1e3);

    for (name, delayed) in [("normal refs", false), ("delayed-voltage refs", true)] {
        let (mut p_lo, mut p_hi, mut q_lo, mut q_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        let mut ia = Vec::with_capacity(1000);
        for n in 0..1000 {
            let t = n as f64 / 60_000.0;
            let v = grid(t, k, limits.v_hat);
            let i = if delayed {
                current_refs_sag(v, grid(t - 0.25 / 60.0, k, limits.v_hat), p, q)
            } else {
                current_refs_normal(v, p, q)
            }
            .unwrap_or(AlphaBeta::ZERO);
            let (pp, qq) = instantaneous_pq(v, i);
            (p_lo, p_hi, q_lo, q_hi) = (p_lo.min(pp), p_hi.max(pp), q_lo.min(qq), q_hi.max(qq));
            ia.push(inverse_clarke(i)[0]);
        }
        let h = thd(&ia, 60.0, 60_000.0, 40).unwrap_or(f64::NAN);
        println!(
            "{name:>22}: p ∈ [{:.2}, {:.2}] kW, q ∈ [{:.2}, {:.2}] kvar, THD(i_a) = {h:.3} %",
            p_lo / 1e3,
            p_hi / 1e3,
            q_lo / 1e3,
            q_hi / 1e3
        );
    }
}
