use crate::error::{Error, Result};
use crate::lmi::gains_file::GainsFile;
use crate::lmi::{gains_from_feedback, observer_gain};
use crate::numerics::SymMatrix;
use nalgebra::{DMatrix, Vector2};

/// Runtime gains for the dc-link and current loops.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerGains {
    pub k_dc: f64,
    pub alpha: f64,
    pub k_obs: SymMatrix,
    pub l_obs: Vector2<f64>,
    pub k1: f64,
    pub k2: f64,
    pub omega_c: f64,
    pub lambda: f64,
    pub tau_i: f64,
}

/// `(λ, k_dc)` from the current-loop time constant: `λ = 1/τ_i`, `k_dc = λ/5`.
pub fn rates_from_tau(tau_i: f64) -> (f64, f64) {
    let lambda = 1.0 / tau_i;
    (lambda, lambda / 5.0)
}

impl ControllerGains {
    pub fn observer_gain(&self) -> Result<Vector2<f64>> {
        observer_gain(&self.k_obs, &self.l_obs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_dc > 0.0) || !(self.omega_c > 0.0) {
            return Err(Error::Config("k_dc and omega_c must be positive".into()));
        }
        if !self.k_obs.is_positive_definite() {
            return Err(Error::Config(
                "observer K_dc is not positive definite".into(),
            ));
        }
        self.observer_gain()?;
        Ok(())
    }

    pub fn from_gains_file(g: &GainsFile) -> Result<Self> {
        let k = g.matrix("K_dc", 2, 2)?;
        let l = g.matrix("L_dc", 2, 1)?;
        let (k1, k2) = match (g.get("k1"), g.get("k2")) {
            (Some(a), Some(b)) => (a, b),
            _ => gains_from_feedback(&g.matrix("F", 1, 2)?),
        };
        let tau_i = g.get("tau_i").unwrap_or(2e-3);
        let (lam_default, kdc_default) = rates_from_tau(tau_i);
        let gains = ControllerGains {
            k_dc: g.get("k_dc").unwrap_or(kdc_default),
            alpha: g.require("alpha")?,
            k_obs: SymMatrix::new(k)?,
            l_obs: Vector2::new(l[(0, 0)], l[(1, 0)]),
            k1,
            k2,
            omega_c: g.require("omega_c")?,
            lambda: g.get("lambda").unwrap_or(lam_default),
            tau_i,
        };
        gains.validate()?;
        Ok(gains)
    }

    pub fn write_into(&self, g: &mut GainsFile) {
        g.set("tau_i", self.tau_i)
            .set("lambda", self.lambda)
            .set("k_dc", self.k_dc)
            .set("alpha", self.alpha)
            .set("omega_c", self.omega_c)
            .set_matrix("K_dc", self.k_obs.as_matrix())
            .set_matrix(
                "L_dc",
                &DMatrix::from_column_slice(2, 1, self.l_obs.as_slice()),
            )
            .set("k1", self.k1)
            .set("k2", self.k2);
    }
}
