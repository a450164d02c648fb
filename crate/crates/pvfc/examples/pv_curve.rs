//! Print the PV array P–V curve and maximum power point at a few irradiance levels.
use pvfc::plant::PvArrayParams;

fn main() -> pvfc::Result<()> {
    let pv = PvArrayParams::default();
    for g in [1000.0, 600.0, 300.0] {
        let mpp = pv.mpp(g, 25.0)?;
        let voc = pv.open_circuit_voltage(g, 25.0)?;
        println!(
            "G = {g:>6} W/m²  Voc = {voc:.1} V  MPP = {:.2} kW at {:.1} V",
            mpp.power / 1e3,
            mpp.voltage
        );
        for k in 0..=10 {
            let v = voc * k as f64 / 10.0;
            println!("    {v:>7.1} V  {:>8.2} kW", pv.power(v, g, 25.0)? / 1e3);
        }
    }
    Ok(())
}
