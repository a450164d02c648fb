use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Harmonic amplitudes of a periodic signal; `magnitudes[0]` is the fundamental.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub fundamental_hz: f64,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Amplitudes at 1..=n_harmonics times `f0` from a period-synchronous window.
    pub fn analyze(samples: &[f64], f0: f64, fs: f64, n_harmonics: usize) -> Result<Self> {
        check_window(samples.len(), f0, fs, n_harmonics)?;
        let magnitudes = (1..=n_harmonics)
            .map(|k| harmonic_amplitude(samples, k as f64 * f0, fs))
            .collect();
        Ok(Spectrum {
            fundamental_hz: f0,
            magnitudes,
        })
    }

    pub fn harmonic(&self, k: usize) -> f64 {
        self.magnitudes[k - 1]
    }

    pub fn thd_percent(&self) -> Result<f64> {
        let a1 = self.magnitudes[0];
        if !(a1 > 0.0) {
            return Err(Error::UndefinedThd);
        }
        let h: f64 = self.magnitudes[1..].iter().map(|a| a * a).sum();
        Ok(100.0 * h.sqrt() / a1)
    }
}

/// Single-bin DFT amplitude at frequency `f` (peak units).
pub fn harmonic_amplitude(samples: &[f64], f: f64, fs: f64) -> f64 {
    let w = 2.0 * PI * f / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (n, &x) in samples.iter().enumerate() {
        let (s, c) = (w * n as f64).sin_cos();
        re += x * c;
        im -= x * s;
    }
    2.0 * (re * re + im * im).sqrt() / samples.len() as f64
}

/// Total harmonic distortion in percent over harmonics 2..=n_harmonics.
pub fn thd(samples: &[f64], f0: f64, fs: f64, n_harmonics: usize) -> Result<f64> {
    Spectrum::analyze(samples, f0, fs, n_harmonics)?.thd_percent()
}

fn check_window(len: usize, f0: f64, fs: f64, n: usize) -> Result<()> {
    if !(f0 > 0.0 && fs > 0.0) || n < 1 {
        return Err(Error::InvalidInput(
            "f0, fs must be positive and n ≥ 1".into(),
        ));
    }
    if fs <= 2.0 * n as f64 * f0 {
        return Err(Error::InvalidInput(format!(
            "fs = {fs} Hz cannot resolve {n} harmonics of {f0} Hz"
        )));
    }
    let periods = len as f64 * f0 / fs;
    if periods < 1.0 - 1e-9 || (periods - periods.round()).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "window of {len} samples is not an integer number of periods ({periods:.4})"
        )));
    }
    Ok(())
}
