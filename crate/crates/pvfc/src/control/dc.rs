use nalgebra::{Matrix2, Vector2};

/// Estimated dc-link state `[v̂_dc, ξ̂_dc]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DcObserverState {
    pub v_hat: f64,
    pub xi_hat: f64,
}

/// Trapezoidal discretisation of `ẋ̂ = A x̂ + B u + g (v − v̂)` with held inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DcObserver {
    g: Vector2<f64>,
    phi: Matrix2<f64>,
    gamma: Matrix2<f64>,
}

impl DcObserver {
    pub fn new(g: Vector2<f64>, dt: f64) -> Self {
        let m = Matrix2::new(-g[0], 1.0, -g[1], 0.0);
        let i = Matrix2::identity();
        let lhs = (i - m * (0.5 * dt))
            .try_inverse()
            .expect("observer discretisation is singular");
        DcObserver {
            g,
            phi: lhs * (i + m * (0.5 * dt)),
            gamma: lhs * dt,
        }
    }

    pub fn gain(&self) -> Vector2<f64> {
        self.g
    }

    pub fn step(&self, s: DcObserverState, v_meas: f64, u: f64) -> DcObserverState {
        let x = Vector2::new(s.v_hat, s.xi_hat);
        let drive = Vector2::new(-u, 0.0) + self.g * v_meas;
        let n = self.phi * x + self.gamma * drive;
        DcObserverState {
            v_hat: n[0],
            xi_hat: n[1],
        }
    }
}

/// One observer step with injection gain `g = K_dc⁻¹·L_dc`.
pub fn dc_observer_step(
    s: DcObserverState,
    v_meas: f64,
    u: f64,
    g: &Vector2<f64>,
    dt: f64,
) -> DcObserverState {
    DcObserver::new(*g, dt).step(s, v_meas, u)
}

/// `u = k_dc·(v − v*) + ξ̂`.
pub fn dc_control(v_dc: f64, v_ref: f64, xi_hat: f64, k_dc: f64) -> f64 {
    k_dc * (v_dc - v_ref) + xi_hat
}

/// Grid power reference that balances the link: `P_src + C·v·u`.
pub fn power_ref_normal(p_src: f64, v_dc: f64, u: f64, c: f64) -> f64 {
    p_src + c * v_dc * u
}

/// dc current the PV converter must withhold during sags: `C·u`.
pub fn curtailment_ref_sag(u: f64, c: f64) -> f64 {
    c * u
}
