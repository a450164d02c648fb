use super::affine::{eye, AffineLmi, LmiBuilder, MatVar, VarSpace};
use super::solver::{solve_lmi, Objective, SolveOptions};
use crate::error::{Error, Result};
use crate::numerics::SymMatrix;
use nalgebra::{DMatrix, Matrix2, Vector2};

/// Double-integrator model of the dc link: state `[v_dc, ξ_dc]`, input `u`.
pub fn dc_link_model() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let b = DMatrix::from_row_slice(2, 1, &[-1.0, 0.0]);
    let b_xi = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let c = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    (a, b, b_xi, c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverSynthesisResult {
    pub alpha: f64,
    pub k_dc: SymMatrix,
    pub l_dc: Vector2<f64>,
    pub epsilon: f64,
    pub nu: f64,
    /// λ_max of the assembled LMI at the solution.
    pub margin: f64,
}

impl ObserverSynthesisResult {
    /// Injection gain `K_dc⁻¹·L_dc`.
    pub fn gain(&self) -> Result<Vector2<f64>> {
        observer_gain(&self.k_dc, &self.l_dc)
    }

    /// Bound on transient amplification, `sqrt(λ_max/λ_min)` of `K_dc`.
    pub fn envelope_factor(&self) -> f64 {
        let (lo, hi) = self.k_dc.eig_extremes();
        (hi / lo).sqrt()
    }
}

pub fn observer_gain(k_dc: &SymMatrix, l_dc: &Vector2<f64>) -> Result<Vector2<f64>> {
    let k = Matrix2::new(
        k_dc.get(0, 0),
        k_dc.get(0, 1),
        k_dc.get(1, 0),
        k_dc.get(1, 1),
    );
    let kinv = k
        .try_inverse()
        .ok_or_else(|| Error::Config("K_dc is singular".into()))?;
    Ok(kinv * l_dc)
}

/// Real parts of the eigenvalues of `A_dc − g·C_dc` (characteristic `s² + g1 s + g2`).
pub fn observer_poles_real(g: &Vector2<f64>) -> [f64; 2] {
    let disc = g[0] * g[0] - 4.0 * g[1];
    if disc < 0.0 {
        [-0.5 * g[0]; 2]
    } else {
        let r = disc.sqrt();
        [0.5 * (-g[0] - r), 0.5 * (-g[0] + r)]
    }
}

struct ObserverLmis {
    lmis: Vec<AffineLmi>,
    k: MatVar,
    l: MatVar,
    nu: usize,
    n_vars: usize,
}

fn build(alpha: f64, radius: f64) -> Result<ObserverLmis> {
    let (a, _b, b_xi, c) = dc_link_model();
    let mut vs = VarSpace::new();
    let k = vs.symmetric(2);
    let l = vs.general(2, 1);
    let nu = vs.scalar();

    let mut main = LmiBuilder::new(&[2, 1]);
    main.he(0, &a.transpose(), &k, &eye(2))
        .he(0, &(-eye(2)), &l, &c)
        .constant(0, 0, &(c.transpose() * &c))
        .term(0, 0, &(eye(2) * (2.0 * alpha)), &k, false, &eye(2))
        .term(0, 1, &eye(2), &k, false, &b_xi)
        .scaled_identity(1, nu, -1.0);
    let mut pos = LmiBuilder::new(&[2]);
    pos.term(0, 0, &(-eye(2)), &k, false, &eye(2));
    // Pole-magnitude region |s| < r for A_dc − K⁻¹L·C_dc; without it ν has
    // no positive minimiser (arbitrarily fast observers drive the gain to 0).
    let mut disk = LmiBuilder::new(&[2, 2]);
    disk.term(0, 0, &(-eye(2) * radius), &k, false, &eye(2))
        .term(1, 1, &(-eye(2) * radius), &k, false, &eye(2))
        .term(0, 1, &eye(2), &k, false, &a)
        .term(0, 1, &(-eye(2)), &l, false, &c);
    Ok(ObserverLmis {
        lmis: vec![main.build()?, pos.build()?, disk.build()?],
        k,
        l,
        nu,
        n_vars: vs.len(),
    })
}

/// Assembled observer LMI for given `K_dc`, `L_dc`, `ν` — for certificate round-trips.
pub fn observer_lmi(
    alpha: f64,
    k_dc: &SymMatrix,
    l_dc: &Vector2<f64>,
    nu: f64,
) -> Result<(AffineLmi, Vec<f64>)> {
    let p = build(alpha, DEFAULT_RADIUS_FACTOR * alpha)?;
    let mut z = vec![0.0; p.n_vars];
    let (kid, lid) = (p.k.ids(), p.l.ids());
    z[kid[0]] = k_dc.get(0, 0);
    z[kid[1]] = k_dc.get(0, 1);
    z[kid[2]] = k_dc.get(1, 1);
    z[lid[0]] = l_dc[0];
    z[lid[1]] = l_dc[1];
    z[p.nu] = nu;
    Ok((p.lmis[0].clone(), z))
}

/// Observer poles are confined to `|s| < DEFAULT_RADIUS_FACTOR·α`.
pub const DEFAULT_RADIUS_FACTOR: f64 = 20.0;

/// Minimises ν (= ε²) subject to the observer LMI with decay rate `alpha`.
///
/// ν is driven onto the feasibility boundary, so the main LMI margin equals the
/// solver floor; [`OBSERVER_MARGIN_FLOOR`] keeps it clear of round-off.
pub fn synth_dc_observer(alpha: f64) -> Result<ObserverSynthesisResult> {
    let opts = SolveOptions {
        margin_floor: OBSERVER_MARGIN_FLOOR,
        ..Default::default()
    };
    synth_dc_observer_with(alpha, DEFAULT_RADIUS_FACTOR * alpha, &opts)
}

pub const OBSERVER_MARGIN_FLOOR: f64 = 1e-5;

pub fn synth_dc_observer_with(
    alpha: f64,
    radius: f64,
    opts: &SolveOptions,
) -> Result<ObserverSynthesisResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(radius > alpha) {
        return Err(Error::InvalidInput(format!(
            "pole radius {radius} must exceed alpha {alpha}"
        )));
    }
    let p = build(alpha, radius)?;
    let mut cost = vec![0.0; p.n_vars];
    cost[p.nu] = 1.0;
    let sol = solve_lmi(&p.lmis, p.n_vars, &Objective::Minimize(cost), opts)?;
    let kv = p.k.value(&sol.z);
    let lv = p.l.value(&sol.z);
    let k_dc = SymMatrix::new(kv)?;
    let l_dc = Vector2::new(lv[(0, 0)], lv[(1, 0)]);
    let nu = sol.z[p.nu];
    let margin = super::affine::lmi_min_eig(&p.lmis[0], &sol.z)?;
    let res = ObserverSynthesisResult {
        alpha,
        k_dc,
        l_dc,
        epsilon: nu.sqrt(),
        nu,
        margin,
    };
    let g = res.gain()?;
    let worst = observer_poles_real(&g)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > -alpha * (1.0 - 1e-9) {
        return Err(Error::SynthesisFailure {
            reason: format!("observer pole real part {worst:.3} exceeds −α"),
            best_margin: margin,
        });
    }
    Ok(res)
}
