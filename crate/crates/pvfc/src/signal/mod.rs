//! Stationary-frame transforms, instantaneous power and sag detection.

mod sag;

pub use sag::{detect_sag, AmplitudeTracker, SagDetector, SagStatus, SAG_CLEAR_PU, SAG_DETECT_PU};

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// A quantity in the stationary αβ frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

impl AlphaBeta {
    pub const ZERO: AlphaBeta = AlphaBeta {
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Self {
        AlphaBeta { alpha, beta }
    }

    pub fn dot(self, o: AlphaBeta) -> f64 {
        self.alpha * o.alpha + self.beta * o.beta
    }

    /// `self.β·o.α − self.α·o.β`.
    pub fn cross(self, o: AlphaBeta) -> f64 {
        self.beta * o.alpha - self.alpha * o.beta
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite()
    }
}

impl Add for AlphaBeta {
    type Output = AlphaBeta;
    fn add(self, o: AlphaBeta) -> AlphaBeta {
        AlphaBeta::new(self.alpha + o.alpha, self.beta + o.beta)
    }
}

impl AddAssign for AlphaBeta {
    fn add_assign(&mut self, o: AlphaBeta) {
        *self = *self + o;
    }
}

impl Sub for AlphaBeta {
    type Output = AlphaBeta;
    fn sub(self, o: AlphaBeta) -> AlphaBeta {
        AlphaBeta::new(self.alpha - o.alpha, self.beta - o.beta)
    }
}

impl Neg for AlphaBeta {
    type Output = AlphaBeta;
    fn neg(self) -> AlphaBeta {
        AlphaBeta::new(-self.alpha, -self.beta)
    }
}

impl Mul<f64> for AlphaBeta {
    type Output = AlphaBeta;
    fn mul(self, k: f64) -> AlphaBeta {
        AlphaBeta::new(self.alpha * k, self.beta * k)
    }
}

/// Amplitude-invariant Clarke transform.
pub fn clarke(a: f64, b: f64, c: f64) -> AlphaBeta {
    AlphaBeta::new(
        (2.0 / 3.0) * (a - 0.5 * b - 0.5 * c),
        (2.0 / 3.0) * SQRT3_2 * (b - c),
    )
}

/// Inverse Clarke transform assuming zero zero-sequence component.
pub fn inverse_clarke(x: AlphaBeta) -> [f64; 3] {
    [
        x.alpha,
        -0.5 * x.alpha + SQRT3_2 * x.beta,
        -0.5 * x.alpha - SQRT3_2 * x.beta,
    ]
}

/// Instantaneous real and reactive power `(p, q)`.
pub fn instantaneous_pq(v: AlphaBeta, i: AlphaBeta) -> (f64, f64) {
    (1.5 * v.dot(i), 1.5 * v.cross(i))
}
