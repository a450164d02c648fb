use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use pvfc::numerics::{
    rk4_step, samples_for, sym_eig_extremes, thd, DelayLine, Spectrum, SymMatrix, DT,
};
use pvfc::Error;
use std::f64::consts::PI;

#[test]
fn rk4_constant_state() {
    let x = rk4_step(|_, _| [0.0], &[5.0], 0.0, 1e-4).unwrap();
    assert_eq!(x, [5.0]);
}

#[test]
fn rk4_exponential_decay() {
    let x = rk4_step(|_, x: &[f64; 1]| [-x[0]], &[1.0], 0.0, 0.1).unwrap();
    assert!((x[0] - (-0.1f64).exp()).abs() < 1e-6);
}

#[test]
fn rk4_unit_ramp() {
    let x = rk4_step(|_, _| [1.0], &[0.0], 0.0, 0.02).unwrap();
    assert_relative_eq!(x[0], 0.02, max_relative = 1e-15);
}

#[test]
fn rk4_rejects_non_finite_derivative() {
    let r = rk4_step(|_, _| [f64::NAN], &[1.0], 0.5, 0.1);
    assert!(matches!(r, Err(Error::IntegrationFault { .. })));
    assert!(matches!(
        rk4_step(|_, _| [0.0], &[1.0], 0.0, 0.0),
        Err(Error::InvalidInput(_))
    ));
}

fn rk4_global_error(dt: f64) -> f64 {
    let n = (1.0 / dt).round() as usize;
    let mut x = [1.0];
    for k in 0..n {
        x = rk4_step(|_, x: &[f64; 1]| [-x[0]], &x, k as f64 * dt, dt).unwrap();
    }
    (x[0] - (-1.0f64).exp()).abs()
}

#[test]
fn rk4_is_fourth_order() {
    for dt in [0.1, 0.05, 0.025] {
        let ratio = rk4_global_error(dt) / rk4_global_error(dt / 2.0);
        assert!(ratio >= 14.0, "dt = {dt}: error ratio {ratio}");
    }
}

#[test]
fn eig_examples() {
    assert_eq!(
        sym_eig_extremes(&DMatrix::identity(2, 2)).unwrap(),
        (1.0, 1.0)
    );
    let (lo, hi) =
        sym_eig_extremes(&DMatrix::from_diagonal(&nalgebra::dvector![-3.0, 7.0])).unwrap();
    assert_relative_eq!(lo, -3.0, max_relative = 1e-12);
    assert_relative_eq!(hi, 7.0, max_relative = 1e-12);
    let (lo, hi) = sym_eig_extremes(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
    assert_relative_eq!(lo, 1.0, max_relative = 1e-12);
    assert_relative_eq!(hi, 3.0, max_relative = 1e-12);
}

#[test]
fn eig_rejects_asymmetric() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    assert!(matches!(sym_eig_extremes(&m), Err(Error::InvalidInput(_))));
    assert!(SymMatrix::new(DMatrix::zeros(9, 9)).is_err());
}

#[test]
fn positive_definiteness() {
    assert!(SymMatrix::identity(3).is_positive_definite());
    assert!(!SymMatrix::diag(&[1.0, 0.0]).is_positive_definite());
    // The printed observer K_dc has a negative determinant.
    let k = SymMatrix::from_rows(&[&[3.6043, -0.0359], &[-0.0359, 0.00007]]).unwrap();
    assert!(!k.is_positive_definite());
    assert!(k.eig_extremes().0 < 0.0);
}

fn tone(n: usize, harmonics: &[(f64, f64)]) -> Vec<f64> {
    (0..n)
        .map(|s| {
            let th = 2.0 * PI * s as f64 / n as f64;
            harmonics.iter().map(|&(k, a)| a * (k * th).sin()).sum()
        })
        .collect()
}

#[test]
fn thd_examples() {
    let fs = 60_000.0;
    assert!(thd(&tone(1000, &[(1.0, 1.0)]), 60.0, fs, 40).unwrap().abs() < 0.01);
    assert!(
        (thd(&tone(1000, &[(1.0, 1.0), (5.0, 0.05)]), 60.0, fs, 40).unwrap() - 5.0).abs() < 0.05
    );
    let x = tone(1000, &[(1.0, 1.0), (5.0, 0.03), (7.0, 0.04)]);
    assert!((thd(&x, 60.0, fs, 40).unwrap() - 5.0).abs() < 0.05);
}

#[test]
fn thd_errors() {
    let fs = 60_000.0;
    assert!(matches!(
        thd(&vec![0.0; 1000], 60.0, fs, 40),
        Err(Error::UndefinedThd)
    ));
    // 1.5 cycles is not a synchronous window.
    assert!(thd(&tone(1500, &[(1.0, 1.0)]), 60.0, fs, 40).is_err());
    // Nyquist: 100 samples per cycle cannot carry 50 harmonics.
    assert!(thd(&tone(100, &[(1.0, 1.0)]), 60.0, 6000.0, 50).is_err());
}

#[test]
fn spectrum_reads_amplitudes() {
    let x = tone(1000, &[(1.0, 2.0), (3.0, 0.5)]);
    let s = Spectrum::analyze(&x, 60.0, 60_000.0, 5).unwrap();
    assert_relative_eq!(s.harmonic(1), 2.0, epsilon = 1e-9);
    assert_relative_eq!(s.harmonic(3), 0.5, epsilon = 1e-9);
    assert!(s.harmonic(2).abs() < 1e-9);
}

#[test]
fn delay_line_exhaustive() {
    for n in 1..=1000usize {
        let mut d = DelayLine::new(n);
        for k in 0..(2 * n + 3) {
            let out = d.push(k as f64);
            let want = if k >= n { (k - n) as f64 } else { 0.0 };
            assert_eq!(out, want, "n = {n}, k = {k}");
            assert_eq!(d.is_primed(), k + 1 >= n);
        }
    }
}

#[test]
fn delay_line_taps() {
    let mut d = DelayLine::with_initial(4, -1.0);
    assert_eq!(d.tap(), -1.0);
    for k in 0..6 {
        d.push(k as f64);
    }
    // Pushed 0..=5; tap is 4 pushes back, tap_ahead(1) is 3 back.
    assert_eq!(d.tap(), 2.0);
    assert_eq!(d.tap_ahead(1), 3.0);
    assert_eq!(d.tap_ahead(3), 5.0);
}

#[test]
fn step_maps_cycle_to_integer_samples() {
    assert_eq!(samples_for(1.0 / 60.0, DT), 1000);
    assert_eq!(samples_for(0.25 / 60.0, DT), 250);
    assert_eq!(samples_for(10.0, DT), 600_000);
}

proptest! {
    #[test]
    fn eig_invariant_under_permutation(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64,
                                       d in -10.0..10.0f64, e in -10.0..10.0f64, f in -10.0..10.0f64) {
        let m = DMatrix::from_row_slice(3, 3, &[a, b, c, b, d, e, c, e, f]);
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let pm = &p * &m * p.transpose();
        let (l1, h1) = sym_eig_extremes(&m).unwrap();
        let (l2, h2) = sym_eig_extremes(&pm).unwrap();
        let scale = m.amax().max(1.0);
        prop_assert!((l1 - l2).abs() <= 1e-9 * scale);
        prop_assert!((h1 - h2).abs() <= 1e-9 * scale);
    }

    #[test]
    fn thd_scale_invariant(k in 1e-3..1e3f64, h5 in 0.0..0.2f64, h7 in 0.0..0.2f64) {
        let x = tone(1000, &[(1.0, 1.0), (5.0, h5), (7.0, h7)]);
        let y: Vec<f64> = x.iter().map(|v| v * k).collect();
        let a = thd(&x, 60.0, 60_000.0, 40).unwrap();
        let b = thd(&y, 60.0, 60_000.0, 40).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn delay_returns_value_pushed_len_ago(len in 1usize..300, xs in prop::collection::vec(-1e6..1e6f64, 1..900)) {
        let mut d = DelayLine::new(len);
        for (k, &x) in xs.iter().enumerate() {
            let out = d.push(x);
            if k >= len {
                prop_assert_eq!(out, xs[k - len]);
            }
        }
    }
}
