//! Run the dc-link observer error dynamics from a few initial errors and
//! compare against the certified exponential envelope.
use nalgebra::{Matrix2, Vector2};
use pvfc::lmi::synth_dc_observer;

fn main() -> pvfc::Result<()> {
    let alpha = 50.0;
    let r = synth_dc_observer(alpha)?;
    let g = r.gain()?;
    let (lo, hi) = r.k_dc.eig_extremes();
    let kappa = (hi / lo).sqrt();
    println!(
        "alpha = {alpha}, gain = [{:.4e}, {:.4e}], kappa = {kappa:.1}",
        g[0], g[1]
    );

    let m = Matrix2::new(-g[0], 1.0, -g[1], 0.0);
    for e0 in [
        Vector2::new(5.0, 0.0),
        Vector2::new(0.0, 500.0),
        Vector2::new(-3.0, 200.0),
    ] {
        let mut worst: f64 = 0.0;
        for k in 1..=200 {
            let t = k as f64 * 1e-3;
            let e = (m * t).exp() * e0;
            worst = worst.max(e.norm() / (kappa * (-alpha * t).exp() * e0.norm()));
        }
        println!(
            "e0 = [{:>6.1}, {:>6.1}]  worst |e|/envelope = {worst:.2e}",
            e0[0], e0[1]
        );
    }
    Ok(())
}
