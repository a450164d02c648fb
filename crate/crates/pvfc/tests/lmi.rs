use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;
use pvfc::lmi::gains_file::GainsFile;
use pvfc::lmi::{
    feedback_from_gains, gains_from_feedback, lmi_min_eig, observer_lmi, observer_poles_real,
    solve_lmi, synth_current_feedback, synth_dc_observer, verify_feedback_certificate, AffineLmi,
    Objective, PolytopicPlant, SolveOptions,
};
use pvfc::numerics::SymMatrix;
use pvfc::Error;

fn nominal_plant() -> PolytopicPlant {
    // R ≈ 1.61 mΩ, L ≈ 0.30 mH: filter plus transformer leakage.
    let (r, l) = pvfc::plant::lumped_rl(1e-3, 0.25e-3, 0.002, 0.06, 220e3, 260.0, 60.0);
    PolytopicPlant::current_loop(r, l, 0.3, 1000.0, 1.0 / 60.0)
}

fn scalar(m: f64) -> SymMatrix {
    SymMatrix::diag(&[m])
}

#[test]
fn min_eig_examples() {
    let minus_i = AffineLmi::new(
        SymMatrix::diag(&[-1.0, -1.0]),
        vec![(0, SymMatrix::zeros(2))],
    )
    .unwrap();
    for x in [-5.0, 0.0, 3.0] {
        assert!((lmi_min_eig(&minus_i, &[x]).unwrap() + 1.0).abs() < 1e-12);
    }
    let split = AffineLmi::new(
        SymMatrix::diag(&[-1.0, -1.0]),
        vec![(0, SymMatrix::diag(&[1.0, -1.0]))],
    )
    .unwrap();
    assert!((lmi_min_eig(&split, &[0.0]).unwrap() + 1.0).abs() < 1e-12);
    let shifted = AffineLmi::new(
        SymMatrix::diag(&[-2.0, -2.0]),
        vec![(0, SymMatrix::identity(2))],
    )
    .unwrap();
    assert!((lmi_min_eig(&shifted, &[3.0]).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn min_eig_reports_missing_variable() {
    let lmi = AffineLmi::new(scalar(0.0), vec![(2, scalar(1.0))]).unwrap();
    assert_eq!(
        lmi_min_eig(&lmi, &[1.0, 2.0]),
        Err(Error::IncompleteAssignment(2))
    );
}

#[test]
fn scalar_lyapunov_is_feasible() {
    // P > 0 and AᵀP + PA = −2P < 0 for A = −1.
    let lmis = vec![
        AffineLmi::new(scalar(0.0), vec![(0, scalar(-1.0))]).unwrap(),
        AffineLmi::new(scalar(0.0), vec![(0, scalar(-2.0))]).unwrap(),
    ];
    let sol = solve_lmi(&lmis, 1, &Objective::Feasibility, &SolveOptions::default()).unwrap();
    assert!(sol.z[0] > 0.0);
    assert!(sol.margin < -1e-6);
}

#[test]
fn contradictory_lmis_fail() {
    // P > 0 and P < −I.
    let lmis = vec![
        AffineLmi::new(scalar(0.0), vec![(0, scalar(-1.0))]).unwrap(),
        AffineLmi::new(scalar(1.0), vec![(0, scalar(1.0))]).unwrap(),
    ];
    let r = solve_lmi(&lmis, 1, &Objective::Feasibility, &SolveOptions::default());
    match r {
        Err(Error::SynthesisFailure { best_margin, .. }) => assert!(best_margin > 0.0),
        other => panic!("expected synthesis failure, got {other:?}"),
    }
}

#[test]
fn minimisation_reaches_boundary() {
    // min x s.t. 1 − x < 0: optimum at x = 1 + floor.
    let lmi = AffineLmi::new(scalar(1.0), vec![(0, scalar(-1.0))]).unwrap();
    let sol = solve_lmi(
        &[lmi],
        1,
        &Objective::Minimize(vec![1.0]),
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(sol.z[0] > 1.0 && sol.z[0] < 1.01, "x = {}", sol.z[0]);
}

#[test]
fn observer_at_fifty() {
    let r = synth_dc_observer(50.0).unwrap();
    assert!(r.k_dc.is_positive_definite());
    assert!(r.margin < -1e-6);
    assert!(r.epsilon > 0.0 && r.epsilon <= 1.2);
    assert!((r.nu - r.epsilon * r.epsilon).abs() <= 1e-12 * r.nu.max(1e-300));
    let poles = observer_poles_real(&r.gain().unwrap());
    assert!(poles.iter().all(|&p| p <= -50.0), "{poles:?}");
    // Certificate round-trip.
    let (lmi, z) = observer_lmi(50.0, &r.k_dc, &r.l_dc, r.nu).unwrap();
    assert!(lmi_min_eig(&lmi, &z).unwrap() < 0.0);
}

#[test]
fn observer_slow_rate_and_eigenvalue_oracle() {
    let r = synth_dc_observer(1.0).unwrap();
    let g = r.gain().unwrap();
    let m = Matrix2::new(-g[0], 1.0, -g[1], 0.0);
    for ev in m.complex_eigenvalues().iter() {
        assert!(ev.re <= -1.0 + 1e-9, "eigenvalue {ev}");
    }
}

#[test]
fn observer_rejects_zero_rate() {
    assert!(matches!(
        synth_dc_observer(0.0),
        Err(Error::InvalidInput(_))
    ));
    assert!(synth_dc_observer(-3.0).is_err());
}

#[test]
fn printed_observer_gain_is_not_a_certificate() {
    let k = SymMatrix::from_rows(&[&[3.6043, -0.0359], &[-0.0359, 0.00007]]).unwrap();
    assert!(!k.is_positive_definite());
}

#[test]
fn feedback_sign_pattern_and_certificate() {
    let plant = nominal_plant();
    let r = synth_current_feedback(&plant, 500.0).unwrap();
    let (f1, f2) = (r.f[(0, 0)], r.f[(0, 1)]);
    assert!(f1 < 0.0 && f2 > 0.0, "F = [{f1}, {f2}]");
    assert!((1e3..1e5).contains(&f1.abs()) && (1e3..1e5).contains(&f2.abs()));
    assert_eq!(r.vertex_margins.len(), 4);
    assert!(r.vertex_margins.iter().all(|&m| m < 0.0));
    assert!(r.x.is_positive_definite() && r.w.is_positive_definite() && r.gamma > 0.0);
    // F = Y·X⁻¹.
    let fy = &r.y * r.x.as_matrix().clone().try_inverse().unwrap();
    assert!((&fy - &r.f).amax() <= 1e-9 * r.f.amax());
    assert!(verify_feedback_certificate(&plant, &r.f, 500.0).0);
    // Delay-free vertex closed loops are Hurwitz.
    for (a, b) in &plant.vertices {
        let cl = a + b * &r.f;
        for ev in cl.complex_eigenvalues().iter() {
            assert!(ev.re < 0.0);
        }
    }
}

#[test]
fn scalar_delay_free_plant() {
    let plant = PolytopicPlant {
        vertices: vec![(
            DMatrix::from_element(1, 1, -1.0),
            DMatrix::from_element(1, 1, 1.0),
        )],
        a_d: DMatrix::zeros(1, 1),
        tau: 0.0,
        g: DMatrix::identity(1, 1),
        h: DMatrix::from_element(1, 1, 1e-4),
    };
    let r = synth_current_feedback(&plant, 0.1).unwrap();
    assert!(r.vertex_margins[0] < 0.0);
    assert!(-1.0 + r.f[(0, 0)] < 0.0);
}

#[test]
fn unreachable_rate_fails() {
    let r = synth_current_feedback(&nominal_plant(), 1e9);
    assert!(matches!(r, Err(Error::SynthesisFailure { .. })), "{r:?}");
}

#[test]
fn zero_gain_on_unstable_vertex_is_rejected() {
    let mut plant = nominal_plant();
    plant.vertices[0].0[(0, 0)] = 1.0;
    let (ok, margin) = verify_feedback_certificate(&plant, &DMatrix::zeros(1, 2), 500.0);
    assert!(!ok);
    assert!(margin >= 0.0);
}

#[test]
fn printed_current_gains_assemble() {
    let f = feedback_from_gains(-0.1649, 1.2197e4, 1.0);
    assert!((f[(0, 0)] + 1.2197e4).abs() < 1.0);
    assert!((f[(0, 1)] - 1.2197e4).abs() < 1.0);
    let (k1, k2) = gains_from_feedback(&f);
    assert!((k1 + 0.1649).abs() < 1e-9 && (k2 - 1.2197e4).abs() < 1e-9);
}

#[test]
fn performance_weight_scaling_keeps_verdict() {
    let plant = nominal_plant();
    let f = synth_current_feedback(&plant, 500.0).unwrap().f;
    let mut scaled = plant.clone();
    scaled.g *= 10.0;
    scaled.h *= 10.0;
    assert_eq!(
        verify_feedback_certificate(&plant, &f, 500.0).0,
        verify_feedback_certificate(&scaled, &f, 500.0).0
    );
}

#[test]
fn gains_file_round_trip() {
    let mut g = GainsFile::new();
    g.comment("test").set("k_dc", 100.0).set_matrix(
        "K_dc",
        &DMatrix::from_row_slice(2, 2, &[1.5, -0.25, -0.25, 3.0]),
    );
    let text = g.render();
    assert!(text.contains("K_dc.0.1 = "));
    let back = GainsFile::parse(&text).unwrap();
    assert_eq!(back.entries(), g.entries());
    assert_eq!(back.matrix("K_dc", 2, 2).unwrap()[(1, 0)], -0.25);
}

#[test]
fn gains_file_rejects_malformed_lines() {
    assert!(matches!(
        GainsFile::parse("k_dc 100"),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        GainsFile::parse("k_dc = fast"),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        GainsFile::parse("k dc = 1"),
        Err(Error::Config(_))
    ));
    assert!(GainsFile::parse("# only a comment\n\n")
        .unwrap()
        .entries()
        .is_empty());
    assert!(GainsFile::parse("x = 1").unwrap().require("y").is_err());
}

proptest! {
    #[test]
    fn assembled_matrix_is_symmetric(c in -5.0..5.0f64, d in -5.0..5.0f64, z0 in -3.0..3.0f64, z1 in -3.0..3.0f64) {
        let c0 = SymMatrix::from_rows(&[&[c, d], &[d, -c]]).unwrap();
        let c1 = SymMatrix::from_rows(&[&[1.0, c], &[c, 2.0]]).unwrap();
        let lmi = AffineLmi::new(c0, vec![(0, c1), (1, SymMatrix::identity(2))]).unwrap();
        let m = lmi.assemble(&[z0, z1]).unwrap();
        prop_assert!((&m - m.transpose()).amax() == 0.0);
    }

    #[test]
    fn gains_values_round_trip(v in prop::num::f64::NORMAL) {
        let mut g = GainsFile::new();
        g.set("x", v);
        prop_assert_eq!(GainsFile::parse(&g.render()).unwrap().get("x"), Some(v));
    }
}
