//! Normal-mode energy management decisions for a sweep of demands.
use pvfc::ems::{ems_normal, Demand, EmsLimits};

fn main() {
    let limits = EmsLimits::default();
    let p_pv = 100e3;
    println!(
        "{:>8} {:>8} | {:>8} {:>8} {:>8} {:>8}",
        "P* kW", "Q* kvar", "P kW", "P_fc kW", "dump kW", "Q kvar"
    );
    for (p, q) in [
        (50e3, 0.0),
        (80e3, 0.0),
        (150e3, 0.0),
        (150e3, 150e3),
        (220e3, 0.0),
        (200e3, 200e3),
    ] {
        let d = ems_normal(
            Demand {
                p_star: p,
                q_star: q,
            },
            p_pv,
            &limits,
        );
        println!(
            "{:>8.1} {:>8.1} | {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
            p / 1e3,
            q / 1e3,
            d.p_clamped / 1e3,
            d.p_fc_ref / 1e3,
            d.p_dump_ref / 1e3,
            d.q_grid_ref / 1e3
        );
    }
}
