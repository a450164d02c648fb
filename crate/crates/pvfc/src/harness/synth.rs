use crate::control::{rates_from_tau, ControllerGains};
use crate::error::{Error, Result};
use crate::lmi::gains_file::GainsFile;
use crate::lmi::{
    balance_feedback, gains_from_feedback, observer_poles_real, synth_current_feedback,
    synth_dc_observer, verify_feedback_certificate, FeedbackSynthesisResult,
    ObserverSynthesisResult, PolytopicPlant,
};
use crate::plant::ElectricalParams;
use nalgebra::DMatrix;

use super::config::{GainsSource, ScenarioConfig};

/// Inputs to the two synthesis problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub alpha: f64,
    pub tau_i: f64,
    pub omega_c: f64,
    /// Relative half-width of the R, L uncertainty box.
    pub spread: f64,
    pub r: f64,
    pub l: f64,
    pub grid_frequency: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        let e = ElectricalParams::default();
        SynthParams {
            alpha: 50.0,
            tau_i: 2e-3,
            omega_c: 1000.0,
            spread: 0.3,
            r: e.r,
            l: e.l,
            grid_frequency: e.grid_frequency,
        }
    }
}

impl SynthParams {
    pub fn plant(&self) -> PolytopicPlant {
        PolytopicPlant::current_loop(
            self.r,
            self.l,
            self.spread,
            self.omega_c,
            1.0 / self.grid_frequency,
        )
    }
}

/// Both certificates plus the runtime gains derived from them.
#[derive(Debug, Clone)]
pub struct SynthOutcome {
    pub params: SynthParams,
    pub observer: ObserverSynthesisResult,
    pub feedback: FeedbackSynthesisResult,
    /// Gain used at run time: the rebalanced `[−F2, F2]` when that certifies, else `F`.
    pub runtime_f: DMatrix<f64>,
    pub balanced: bool,
    pub runtime_certificate: (bool, f64),
    pub gains: ControllerGains,
}

/// Solves the observer (decay `alpha`) and robust feedback (decay `1/τ_i`) problems.
pub fn synth_gains(p: &SynthParams) -> Result<SynthOutcome> {
    if !(p.tau_i > 0.0 && p.alpha > 0.0 && p.omega_c > 0.0 && p.r >= 0.0 && p.l > 0.0) {
        return Err(Error::InvalidInput(
            "synthesis parameters must be positive".into(),
        ));
    }
    let (lambda, k_dc) = rates_from_tau(p.tau_i);
    let observer = synth_dc_observer(p.alpha)?;
    let plant = p.plant();
    let feedback = synth_current_feedback(&plant, lambda)?;
    let (runtime_f, balanced) = match balance_feedback(&plant, &feedback.f, lambda) {
        Some(fb) => (fb, true),
        None => (feedback.f.clone(), false),
    };
    let runtime_certificate = verify_feedback_certificate(&plant, &runtime_f, lambda);
    let (k1, k2) = gains_from_feedback(&runtime_f);
    let gains = ControllerGains {
        k_dc,
        alpha: p.alpha,
        k_obs: observer.k_dc.clone(),
        l_obs: observer.l_dc,
        k1,
        k2,
        omega_c: p.omega_c,
        lambda,
        tau_i: p.tau_i,
    };
    gains.validate()?;
    Ok(SynthOutcome {
        params: *p,
        observer,
        feedback,
        runtime_f,
        balanced,
        runtime_certificate,
        gains,
    })
}

impl SynthOutcome {
    pub fn gains_file(&self) -> GainsFile {
        let mut g = GainsFile::new();
        g.comment("controller gains").comment(format!(
            "R = {:e} ohm, L = {:e} H, uncertainty +/-{}%",
            self.params.r,
            self.params.l,
            self.params.spread * 100.0
        ));
        self.gains.write_into(&mut g);
        g.set("epsilon", self.observer.epsilon)
            .set("nu", self.observer.nu)
            .set("observer_margin", self.observer.margin)
            .set_matrix("F", &self.feedback.f)
            .set("gamma", self.feedback.gamma)
            .set_matrix("F_runtime", &self.runtime_f);
        g
    }

    /// Human-readable certificate summary.
    pub fn summary(&self) -> String {
        let g = self.observer.gain().map(|g| observer_poles_real(&g));
        let (lo, hi) = self.observer.k_dc.eig_extremes();
        let mut s = String::new();
        s += &format!(
            "observer: alpha = {}, eig(K_dc) = [{lo:.4e}, {hi:.4e}], LMI margin = {:.3e}, epsilon = {:.4e}\n",
            self.observer.alpha, self.observer.margin, self.observer.epsilon
        );
        if let Ok(p) = g {
            s += &format!("observer poles (real parts): {:.2}, {:.2}\n", p[0], p[1]);
        }
        s += &format!(
            "feedback: lambda = {}, F = [{:.2}, {:.2}], vertex margins = {:?}\n",
            self.gains.lambda,
            self.feedback.f[(0, 0)],
            self.feedback.f[(0, 1)],
            self.feedback
                .vertex_margins
                .iter()
                .map(|m| format!("{m:.3e}"))
                .collect::<Vec<_>>()
        );
        s += &format!(
            "runtime gains: k1 = {:.4}, k2 = {:.2} ({}), certificate = {} (margin {:.3e})\n",
            self.gains.k1,
            self.gains.k2,
            if self.balanced {
                "rebalanced"
            } else {
                "as synthesised"
            },
            self.runtime_certificate.0,
            self.runtime_certificate.1
        );
        s += &format!(
            "dc loop: k_dc = {}, omega_c = {}",
            self.gains.k_dc, self.gains.omega_c
        );
        s
    }
}

/// Gains for a scenario: synthesised for its nominal plant or loaded from file,
/// then any explicit current-loop override applied.
pub fn resolve_gains(cfg: &ScenarioConfig) -> Result<ControllerGains> {
    let mut gains = match &cfg.gains {
        GainsSource::Synthesize {
            alpha,
            tau_i,
            omega_c,
            spread,
        } => {
            let e = cfg.plant.electrical();
            let p = SynthParams {
                alpha: *alpha,
                tau_i: *tau_i,
                omega_c: *omega_c,
                spread: *spread,
                r: e.r,
                l: e.l,
                grid_frequency: e.grid_frequency,
            };
            synth_gains(&p)?.gains
        }
        GainsSource::File { path } => ControllerGains::from_gains_file(&GainsFile::load(path)?)?,
    };
    if let Some(o) = cfg.current_override {
        gains.k1 = o.k1;
        gains.k2 = o.k2;
    }
    Ok(gains)
}

/// Independent re-check of a gain set against both certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub observer_positive_definite: bool,
    /// λ_max of the observer LMI at the stored `(K_dc, L_dc, ν)`; `None` without ν.
    pub observer_margin: Option<f64>,
    pub observer_poles: [f64; 2],
    pub feedback_certified: bool,
    pub feedback_margin: f64,
    pub timescale_separated: bool,
}

impl CertificateCheck {
    pub fn passed(&self, alpha: f64) -> bool {
        self.observer_positive_definite
            && self.observer_margin.map_or(true, |m| m < -1e-6)
            && self.observer_poles.iter().all(|&p| p <= -alpha)
            && self.feedback_certified
            && self.timescale_separated
    }

    pub fn render(&self, alpha: f64) -> String {
        let mark = |b: bool| if b { "PASS" } else { "FAIL" };
        let margin = self.observer_margin;
        format!(
            "[{}] K_dc positive definite\n[{}] observer LMI margin {}\n[{}] observer poles {:.2}, {:.2} (≤ −{alpha})\n[{}] current-loop certificate (margin {:.3e})\n[{}] λ ≥ 5·k_dc",
            mark(self.observer_positive_definite),
            mark(margin.map_or(true, |m| m < -1e-6)),
            margin.map_or("not checked (no nu)".to_string(), |m| format!("{m:.3e}")),
            mark(self.observer_poles.iter().all(|&p| p <= -alpha)),
            self.observer_poles[0],
            self.observer_poles[1],
            mark(self.feedback_certified),
            self.feedback_margin,
            mark(self.timescale_separated),
        )
    }
}

/// Checks `gains` (and the observer multiplier `nu`, if known) for the plant in `p`.
pub fn check_certificates(
    gains: &ControllerGains,
    nu: Option<f64>,
    p: &SynthParams,
) -> Result<CertificateCheck> {
    let g = gains.observer_gain()?;
    let observer_margin = match nu {
        Some(nu) => {
            let (lmi, z) = crate::lmi::observer_lmi(gains.alpha, &gains.k_obs, &gains.l_obs, nu)?;
            Some(crate::lmi::lmi_min_eig(&lmi, &z)?)
        }
        None => None,
    };
    let f = crate::lmi::feedback_from_gains(gains.k1, gains.k2, 1.0);
    let (feedback_certified, feedback_margin) =
        verify_feedback_certificate(&p.plant(), &f, gains.lambda);
    Ok(CertificateCheck {
        observer_positive_definite: gains.k_obs.is_positive_definite(),
        observer_margin,
        observer_poles: observer_poles_real(&g),
        feedback_certified,
        feedback_margin,
        timescale_separated: gains.lambda >= 5.0 * gains.k_dc * (1.0 - 1e-12),
    })
}
