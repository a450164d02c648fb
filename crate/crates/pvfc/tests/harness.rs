use pvfc::harness::{
    builtin_case, check_certificates, run_scenario, synth_gains, Channel, CurrentOverride,
    DemandStep, GainsSource, IrradianceStep, ScenarioConfig, SynthParams, TimeSeries,
};
use pvfc::Error;
use std::path::Path;
use std::process::Command;

/// A quiet 0.1 s scenario: no sun, no demand, so the link should sit at its reference.
fn idle(duration: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: "idle".into(),
        duration,
        demand: vec![DemandStep {
            t: 0.0,
            p: 0.0,
            q: 0.0,
        }],
        irradiance: vec![IrradianceStep { t: 0.0, g: 0.0 }],
        ..Default::default()
    }
}

#[test]
fn builtin_cases_are_valid() {
    for id in 1..=4 {
        let c = builtin_case(id).unwrap();
        c.validate().unwrap();
        assert!(c.duration > 0.0 && !c.demand.is_empty());
    }
    assert!(matches!(builtin_case(0), Err(Error::Config(_))));
    assert!(matches!(builtin_case(5), Err(Error::Config(_))));
    assert_eq!(builtin_case(3).unwrap().sags.len(), 3);
}

#[test]
fn config_json_round_trip() {
    for id in 1..=4 {
        let c = builtin_case(id).unwrap();
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}

#[test]
fn config_defaults_and_strictness() {
    let c = ScenarioConfig::from_json(r#"{"name": "x", "duration": 0.5}"#).unwrap();
    assert_eq!(c.dt, 1.0 / 60_000.0);
    assert_eq!(c.v_dc_ref, 800.0);
    assert_eq!(c.gains, GainsSource::default());
    assert!(matches!(
        ScenarioConfig::from_json(r#"{"duraton": 0.5}"#),
        Err(Error::Config(_))
    ));
    assert!(ScenarioConfig::from_json("not json").is_err());
    let bad = ScenarioConfig {
        duration: -1.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    let unsorted = ScenarioConfig {
        demand: vec![
            DemandStep {
                t: 1.0,
                p: 0.0,
                q: 0.0,
            },
            DemandStep {
                t: 0.5,
                p: 0.0,
                q: 0.0,
            },
        ],
        ..Default::default()
    };
    assert!(unsorted.validate().is_err());
    assert!(ScenarioConfig::default()
        .with_uncertainty(1.3)
        .validate()
        .is_ok());
    assert!(ScenarioConfig::default()
        .with_uncertainty(2.0)
        .validate()
        .is_err());
}

#[test]
fn channel_names_round_trip() {
    for c in Channel::ALL {
        assert_eq!(Channel::from_name(c.name()), Some(c));
    }
    assert_eq!(Channel::from_name("bogus"), None);
}

#[test]
fn synthesis_defaults() {
    let o = synth_gains(&SynthParams::default()).unwrap();
    assert_eq!(o.gains.k_dc, 100.0);
    assert_eq!(o.gains.lambda, 500.0);
    assert_eq!(o.gains.omega_c, 1000.0);
    assert!(o.gains.k2 > 0.0);
    assert!(o.runtime_certificate.0);
    let check = check_certificates(&o.gains, Some(o.observer.nu), &o.params).unwrap();
    assert!(check.passed(o.gains.alpha));
    let bad = SynthParams {
        tau_i: 0.0,
        ..Default::default()
    };
    assert!(matches!(synth_gains(&bad), Err(Error::InvalidInput(_))));
}

#[test]
fn idle_plant_holds_link_voltage() {
    let cfg = idle(0.1);
    let (series, report) = run_scenario(&cfg).unwrap();
    assert!(report.passed());
    let v = series.get(Channel::VDc);
    assert_eq!(v.len(), series.len());
    assert!(
        v.iter().all(|x| (x - 800.0).abs() < 2.0),
        "v_dc range {:?}",
        v.iter()
            .fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)))
    );
    assert!(series.get(Channel::PPv).iter().all(|p| p.abs() < 1.0));
    let dt = series.sample_period().unwrap();
    assert!((dt - 10.0 / 60_000.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip_and_header() {
    let (series, _) = run_scenario(&idle(0.02)).unwrap();
    let text = series.to_csv_string(&Channel::ALL);
    let header = text.lines().next().unwrap();
    assert_eq!(header, Channel::ALL.map(|c| c.name()).join(","));
    let back = TimeSeries::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.len(), series.len());
    for c in Channel::ALL {
        for (a, b) in back.get(c).iter().zip(series.get(c)) {
            assert!(
                (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                "{} {a} vs {b}",
                c.name()
            );
        }
    }
    // A subset of channels keeps the rest empty.
    let sub = TimeSeries::read_csv(
        series
            .to_csv_string(&[Channel::Time, Channel::VDc])
            .as_bytes(),
    )
    .unwrap();
    assert!(sub.has(Channel::VDc) && !sub.has(Channel::IA));
    assert!(TimeSeries::read_csv("time_s,nonsense\n0,1\n".as_bytes()).is_err());
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = idle(0.03);
    cfg.noise.dc_current = 5.0;
    cfg.seed = 11;
    let a = run_scenario(&cfg).unwrap().0.to_csv_string(&Channel::ALL);
    let b = run_scenario(&cfg).unwrap().0.to_csv_string(&Channel::ALL);
    assert_eq!(a, b);
    cfg.seed = 12;
    assert_ne!(
        a,
        run_scenario(&cfg).unwrap().0.to_csv_string(&Channel::ALL)
    );
}

#[test]
fn published_current_gains_run() {
    let mut cfg = idle(0.05);
    cfg.demand = vec![DemandStep {
        t: 0.0,
        p: 0.0,
        q: 20e3,
    }];
    cfg.current_override = Some(CurrentOverride {
        k1: -0.1649,
        k2: 12197.0,
    });
    let (series, _) = run_scenario(&cfg).unwrap();
    let q = series.get(Channel::QGrid);
    let tail = &q[q.len() / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert!((mean - 20e3).abs() < 0.05 * 20e3, "Q = {mean}");
}

fn pvfc(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pvfc"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let (code, _) = pvfc(&["synth", "--out", "g.txt"], d);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(d.join("g.txt")).unwrap();
    assert!(text.contains("K_dc.0.1 = "));
    assert_eq!(pvfc(&["verify", "--gains", "g.txt"], d).0, 0);

    std::fs::write(d.join("idle.json"), idle(0.02).to_json()).unwrap();
    let (code, stdout) = pvfc(
        &[
            "run",
            "--config",
            "idle.json",
            "--gains",
            "g.txt",
            "--out",
            "idle.csv",
        ],
        d,
    );
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(
        pvfc(&["report", "idle.csv", "--config", "idle.json"], d).0,
        0
    );

    let mut strict = idle(0.02);
    strict.expect.v_dc_band = Some(1e-12);
    strict.noise.dc_current = 20.0;
    std::fs::write(d.join("strict.json"), strict.to_json()).unwrap();
    assert_eq!(
        pvfc(&["run", "--config", "strict.json", "--out", "s.csv"], d).0,
        1
    );

    assert_eq!(pvfc(&["run", "--case", "9"], d).0, 2);
    assert_eq!(pvfc(&["run", "--config", "missing.json"], d).0, 2);
    std::fs::write(d.join("bad.txt"), "K_dc.0.0 = oops\n").unwrap();
    assert_eq!(pvfc(&["verify", "--gains", "bad.txt"], d).0, 2);
    assert_eq!(
        pvfc(&["synth", "--tau-i", "1e-9", "--out", "x.txt"], d).0,
        3
    );
}
