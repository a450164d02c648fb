use clap::{Args, Parser, Subcommand};
use pvfc::control::ControllerGains;
use pvfc::harness::{
    builtin_case, check_certificates, compute_metrics, run_scenario, synth_gains, Channel,
    GainsSource, ScenarioConfig, SynthParams, TimeSeries,
};
use pvfc::lmi::gains_file::GainsFile;
use pvfc::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Hybrid PV/fuel-cell plant: gain synthesis, scenario runs and reports.
#[derive(Parser)]
#[command(name = "pvfc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the observer and current-loop LMIs and write a gains file.
    Synth {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, default_value = "gains.txt")]
        out: PathBuf,
    },
    /// Simulate a builtin case or a JSON scenario and evaluate its criteria.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// CSV output path (default: <scenario name>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use this gains file instead of synthesising.
        #[arg(long)]
        gains: Option<PathBuf>,
        /// Uniform R, L, C uncertainty factor overriding the scenario's.
        #[arg(long)]
        uncertainty: Option<f64>,
        /// Also write the metrics report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check the synthesis certificates of a gains file (or of fresh synthesis).
    Verify {
        #[arg(long)]
        gains: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Re-derive metrics and verdicts from a CSV produced by `run`.
    Report {
        csv: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 50.0)]
    alpha: f64,
    /// Current-loop time constant; λ = 1/τ_i and k_dc = λ/5.
    #[arg(long, default_value_t = 2e-3)]
    tau_i: f64,
    #[arg(long, default_value_t = 1000.0)]
    omega_c: f64,
    /// Relative half-width of the R, L uncertainty box.
    #[arg(long, default_value_t = 0.3)]
    spread: f64,
}

impl SynthArgs {
    fn params(&self) -> SynthParams {
        SynthParams {
            alpha: self.alpha,
            tau_i: self.tau_i,
            omega_c: self.omega_c,
            spread: self.spread,
            ..Default::default()
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioArgs {
    /// Builtin case 1..=4.
    #[arg(long)]
    case: Option<u32>,
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> pvfc::Result<ScenarioConfig> {
        match (&self.case, &self.config) {
            (Some(id), _) => builtin_case(*id),
            (None, Some(path)) => ScenarioConfig::load(path),
            (None, None) => Err(Error::Config(
                "either --case or --config is required".into(),
            )),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Io(_) => 2,
        Error::SynthesisFailure { .. } => 3,
        _ => 1,
    }
}

fn verdict(pass: bool) -> ExitCode {
    ExitCode::from(if pass { 0 } else { 1 })
}

fn execute(cmd: Cmd) -> pvfc::Result<ExitCode> {
    match cmd {
        Cmd::Synth { synth, out } => {
            let outcome = synth_gains(&synth.params())?;
            println!("{}", outcome.summary());
            outcome.gains_file().save(&out)?;
            println!("gains written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run {
            scenario,
            out,
            gains,
            uncertainty,
            json,
        } => {
            let mut cfg = scenario.load()?;
            if let Some(path) = gains {
                cfg.gains = GainsSource::File { path };
            }
            if let Some(k) = uncertainty {
                cfg = cfg.with_uncertainty(k);
            }
            let (series, report) = run_scenario(&cfg)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.name)));
            let file = std::fs::File::create(&out)?;
            series.write_csv(std::io::BufWriter::new(file), &cfg.channels)?;
            if let Some(path) = json {
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&report).expect("report serialises"),
                )?;
            }
            print!("{}", report.render());
            println!("series written to {}", out.display());
            Ok(verdict(report.passed()))
        }
        Cmd::Verify { gains, synth } => {
            let p = synth.params();
            let (g, nu) = match gains {
                Some(path) => {
                    let file = GainsFile::load(&path)?;
                    (ControllerGains::from_gains_file(&file)?, file.get("nu"))
                }
                None => {
                    let o = synth_gains(&p)?;
                    (o.gains, Some(o.observer.nu))
                }
            };
            let check = check_certificates(&g, nu, &p)?;
            println!("{}", check.render(g.alpha));
            Ok(verdict(check.passed(g.alpha)))
        }
        Cmd::Report { csv, scenario } => {
            let cfg = scenario.load()?;
            let file = std::fs::File::open(&csv)
                .map_err(|e| Error::Config(format!("{}: {e}", csv.display())))?;
            let series = TimeSeries::read_csv(std::io::BufReader::new(file))?;
            if !series.has(Channel::Time) {
                return Err(Error::Config("CSV has no samples".into()));
            }
            let report = compute_metrics(&series, &cfg)?;
            print!("{}", report.render());
            Ok(verdict(report.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
