//! Solve the observer and robust current-loop LMIs and print the resulting gains file.
use pvfc::harness::{synth_gains, SynthParams};

fn main() -> pvfc::Result<()> {
    let outcome = synth_gains(&SynthParams::default())?;
    println!("{}", outcome.summary());
    print!("{}", outcome.gains_file().render());
    Ok(())
}
