use proptest::prelude::*;
use pvfc::signal::{
    clarke, detect_sag, instantaneous_pq, inverse_clarke, AlphaBeta, AmplitudeTracker, SagDetector,
    SAG_CLEAR_PU, SAG_DETECT_PU,
};
use std::f64::consts::PI;

const S3: f64 = 0.866_025_403_784_438_6;

fn near(a: AlphaBeta, b: AlphaBeta) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn clarke_examples() {
    assert!(near(clarke(1.0, -0.5, -0.5), AlphaBeta::new(1.0, 0.0)));
    assert!(near(clarke(0.0, S3, -S3), AlphaBeta::new(0.0, 1.0)));
    assert!(near(clarke(1.0, 1.0, 1.0), AlphaBeta::ZERO));
    let [a, b, c] = inverse_clarke(AlphaBeta::new(1.0, 0.0));
    assert!((a - 1.0).abs() < 1e-15 && (b + 0.5).abs() < 1e-15 && (c + 0.5).abs() < 1e-15);
}

#[test]
fn balanced_set_keeps_its_amplitude() {
    for k in 0..12 {
        let th = 2.0 * PI * k as f64 / 12.0;
        let v = clarke(
            212.0 * th.cos(),
            212.0 * (th - 2.0 * PI / 3.0).cos(),
            212.0 * (th + 2.0 * PI / 3.0).cos(),
        );
        assert!((v.norm() - 212.0).abs() < 1e-9);
        assert!((v.alpha - 212.0 * th.cos()).abs() < 1e-9);
    }
}

#[test]
fn power_examples() {
    let v = AlphaBeta::new(1.0, 0.0);
    assert_eq!(instantaneous_pq(v, AlphaBeta::new(1.0, 0.0)), (1.5, 0.0));
    // Current lagging voltage by 90° carries positive reactive power.
    assert_eq!(instantaneous_pq(v, AlphaBeta::new(0.0, -1.0)), (0.0, 1.5));
    assert_eq!(instantaneous_pq(v, AlphaBeta::ZERO), (0.0, 0.0));
}

#[test]
fn static_sag_thresholds() {
    let nominal = 212.0;
    assert!(!detect_sag([nominal; 3], nominal).active);
    let s = detect_sag([0.7 * nominal, nominal, nominal], nominal);
    assert!(s.active);
    assert!((s.min_fraction - 0.7).abs() < 1e-12);
    assert!(!detect_sag([0.91 * nominal; 3], nominal).active);
    assert!(detect_sag([0.6 * nominal; 3], nominal).active);
    assert_eq!(detect_sag([1.2 * nominal; 3], nominal).min_fraction, 1.0);
}

#[test]
fn detector_hysteresis() {
    let nominal = 100.0;
    let mut d = SagDetector::new(nominal);
    assert!(!d.update([92.0; 3], 0.0).active);
    let s = d.update([85.0, 100.0, 100.0], 0.1);
    assert!(s.active && s.onset == Some(0.1));
    // Between the thresholds the state is held.
    let s = d.update([92.0, 100.0, 100.0], 0.2);
    assert!(s.active && s.onset == Some(0.1));
    assert!(!d.update([96.0, 100.0, 100.0], 0.3).active);
    assert!(!d.update([92.0, 100.0, 100.0], 0.4).active);
    assert!(d.status().onset.is_none());
    assert!(SAG_DETECT_PU < SAG_CLEAR_PU);
}

#[test]
fn tracker_recovers_amplitude_after_one_cycle() {
    let mut tr = AmplitudeTracker::new(1000);
    let mut amps = [0.0; 3];
    for n in 0..1500 {
        let th = 2.0 * PI * n as f64 / 1000.0;
        let k = if n >= 400 { [0.7, 1.0, 1.0] } else { [1.0; 3] };
        amps = tr.push([
            k[0] * 212.0 * th.cos(),
            k[1] * 212.0 * (th - 2.0 * PI / 3.0).cos(),
            k[2] * 212.0 * (th + 2.0 * PI / 3.0).cos(),
        ]);
    }
    assert!(tr.is_primed());
    // One full cycle after the step the window only holds sagged samples.
    assert!((amps[0] - 0.7 * 212.0).abs() < 1e-3 * 212.0, "{amps:?}");
    assert!((amps[1] - 212.0).abs() < 1e-3 * 212.0);
}

#[test]
fn tracker_detects_sag_within_a_cycle() {
    let mut tr = AmplitudeTracker::new(1000);
    let mut d = SagDetector::new(212.0);
    let mut onset = None;
    for n in 0..3000 {
        let t = n as f64 / 60_000.0;
        let th = 2.0 * PI * 60.0 * t;
        let k = if n >= 1500 { 0.6 } else { 1.0 };
        let v = [
            k * 212.0 * th.cos(),
            k * 212.0 * (th - 2.0 * PI / 3.0).cos(),
            k * 212.0 * (th + 2.0 * PI / 3.0).cos(),
        ];
        let amps = tr.push(v);
        if !tr.is_primed() {
            continue;
        }
        let s = d.update(amps, t);
        if onset.is_none() && s.active {
            onset = s.onset;
        }
    }
    let t0 = 1500.0 / 60_000.0;
    let lag = onset.expect("sag not detected") - t0;
    assert!((0.0..=1.0 / 60.0).contains(&lag), "lag {lag}");
}

proptest! {
    #[test]
    fn clarke_is_linear(a in -1e3..1e3f64, b in -1e3..1e3f64, c in -1e3..1e3f64,
                        x in -1e3..1e3f64, y in -1e3..1e3f64, z in -1e3..1e3f64, k in -5.0..5.0f64) {
        let lhs = clarke(a + k * x, b + k * y, c + k * z);
        let rhs = clarke(a, b, c) + clarke(x, y, z) * k;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn inverse_clarke_round_trips(al in -1e3..1e3f64, be in -1e3..1e3f64) {
        let x = AlphaBeta::new(al, be);
        let [a, b, c] = inverse_clarke(x);
        prop_assert!((a + b + c).abs() < 1e-9);
        prop_assert!((clarke(a, b, c) - x).norm() < 1e-9);
    }

    #[test]
    fn power_is_bilinear(va in -500.0..500.0f64, vb in -500.0..500.0f64, ia in -500.0..500.0f64,
                         ib in -500.0..500.0f64, k in -3.0..3.0f64) {
        let v = AlphaBeta::new(va, vb);
        let i = AlphaBeta::new(ia, ib);
        let (p, q) = instantaneous_pq(v, i);
        let (pk, qk) = instantaneous_pq(v * k, i);
        let (pi, qi) = instantaneous_pq(v, i * k);
        prop_assert!((pk - k * p).abs() < 1e-6 && (pi - k * p).abs() < 1e-6);
        prop_assert!((qk - k * q).abs() < 1e-6 && (qi - k * q).abs() < 1e-6);
        // |S|² = p² + q².
        let s = 1.5 * v.norm() * i.norm();
        prop_assert!((p * p + q * q - s * s).abs() <= 1e-9 * (1.0 + s * s));
    }

    #[test]
    fn tracker_never_exceeds_window_peak(xs in prop::collection::vec(-1e3..1e3f64, 1..400), w in 1usize..50) {
        let mut tr = AmplitudeTracker::new(w);
        for (n, &x) in xs.iter().enumerate() {
            let a = tr.push([x, -x, 0.5 * x])[0];
            let lo = n.saturating_sub(w - 1);
            let want = xs[lo..=n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert_eq!(a, want);
        }
    }
}
