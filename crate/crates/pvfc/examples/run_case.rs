//! Run a builtin scenario and print its metrics report.
//!
//! `cargo run --release --example run_case -- 3`
use pvfc::harness::{builtin_case, run_scenario};

fn main() -> pvfc::Result<()> {
    let id = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let cfg = builtin_case(id)?;
    let (series, report) = run_scenario(&cfg)?;
    println!(
        "{}: {} samples over {} s",
        cfg.name,
        series.len(),
        cfg.duration
    );
    print!("{}", report.render());
    Ok(())
}
