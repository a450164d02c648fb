use super::affine::{eye, AffineLmi, LmiBuilder, MatVar, VarSpace};
use super::solver::{solve_lmi, Objective, SolveOptions};
use crate::error::{Error, Result};
use crate::numerics::SymMatrix;
use nalgebra::DMatrix;

/// Polytopic plant `ẋ = A_i x + A_d x(t−τ) + B_i u` with performance output `z = G x + H u`.
#[derive(Debug, Clone)]
pub struct PolytopicPlant {
    pub vertices: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    pub a_d: DMatrix<f64>,
    pub tau: f64,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
}

impl PolytopicPlant {
    /// Series-RL current loop with repetitive filter, over the box
    /// `R/L ∈ [ρ1_min, ρ1_max]`, `1/L ∈ [ρ2_min, ρ2_max]`.
    pub fn current_loop(r: f64, l: f64, spread: f64, omega_c: f64, tau: f64) -> Self {
        let (lo, hi) = (1.0 - spread, 1.0 + spread);
        let rho1 = [lo * r / (hi * l), hi * r / (lo * l)];
        let rho2 = [1.0 / (hi * l), 1.0 / (lo * l)];
        let mut vertices = Vec::with_capacity(4);
        for &p1 in &rho1 {
            for &p2 in &rho2 {
                let a = DMatrix::from_row_slice(2, 2, &[-p1, 0.0, 0.0, -omega_c]);
                let b = DMatrix::from_row_slice(2, 1, &[p2, 0.0]);
                vertices.push((a, b));
            }
        }
        PolytopicPlant {
            vertices,
            a_d: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -omega_c, omega_c]),
            tau,
            g: eye(2),
            h: DMatrix::from_element(2, 1, 1e-4),
        }
    }

    pub fn n(&self) -> usize {
        self.a_d.nrows()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let p = self.g.nrows();
        let ok = !self.vertices.is_empty()
            && self.a_d.ncols() == n
            && self
                .vertices
                .iter()
                .all(|(a, b)| a.shape() == (n, n) && b.shape() == (n, 1))
            && self.g.ncols() == n
            && self.h.shape() == (p, 1);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "inconsistent polytopic plant dimensions".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSynthesisResult {
    pub lambda: f64,
    pub x: SymMatrix,
    pub w: SymMatrix,
    pub y: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub gamma: f64,
    pub vertex_margins: Vec<f64>,
}

/// Which matrix plays the role of `Y` in the vertex LMIs.
enum Gain<'a> {
    Free(MatVar),
    Fixed(&'a DMatrix<f64>),
}

struct Vars {
    x: MatVar,
    w: MatVar,
    gamma: usize,
    n_vars: usize,
}

fn vertex_lmis(
    plant: &PolytopicPlant,
    lambda: f64,
    gain: &Gain,
    v: &Vars,
) -> Result<Vec<AffineLmi>> {
    let n = plant.n();
    let p = plant.g.nrows();
    let mut out = Vec::new();
    for (a, b) in &plant.vertices {
        let mut lb = LmiBuilder::new(&[n, n, p]);
        lb.he(0, a, &v.x, &eye(n))
            .term(0, 0, &eye(n), &v.w, false, &eye(n))
            .term(0, 0, &(eye(n) * (2.0 * lambda)), &v.x, false, &eye(n))
            .term(0, 1, &plant.a_d, &v.x, false, &eye(n))
            .term(0, 2, &eye(n), &v.x, false, &plant.g.transpose())
            .term(1, 1, &(-eye(n)), &v.w, false, &eye(n))
            .scaled_identity(2, v.gamma, -1.0);
        match gain {
            Gain::Free(y) => {
                lb.he(0, b, y, &eye(n))
                    .term(0, 2, &eye(n), y, true, &plant.h.transpose());
            }
            Gain::Fixed(f) => {
                // Y = F·X, so B·Y = (B·F)·X and Yᵀ·Hᵀ = X·Fᵀ·Hᵀ.
                lb.he(0, &(b * *f), &v.x, &eye(n)).term(
                    0,
                    2,
                    &eye(n),
                    &v.x,
                    false,
                    &(f.transpose() * plant.h.transpose()),
                );
            }
        }
        out.push(lb.build()?);
    }
    let mut px = LmiBuilder::new(&[n]);
    px.term(0, 0, &(-eye(n)), &v.x, false, &eye(n));
    out.push(px.build()?);
    let mut pw = LmiBuilder::new(&[n]);
    pw.term(0, 0, &(-eye(n)), &v.w, false, &eye(n));
    out.push(pw.build()?);
    // Normalisation X ⪯ I: the vertex LMIs are homogeneous in (X, W, Y, γ).
    let mut norm = LmiBuilder::new(&[n]);
    norm.term(0, 0, &eye(n), &v.x, false, &eye(n))
        .constant(0, 0, &(-eye(n)));
    out.push(norm.build()?);
    let _ = v.n_vars;
    Ok(out)
}

/// Robust state feedback `u = F·x` certified at every vertex with decay rate `lambda`.
///
/// The vertex LMIs are homogeneous, so the gain magnitude follows the variable box;
/// [`FEEDBACK_VAR_BOUND`] lands `F` in the 10⁴ range.
pub fn synth_current_feedback(
    plant: &PolytopicPlant,
    lambda: f64,
) -> Result<FeedbackSynthesisResult> {
    let opts = SolveOptions {
        var_bound: FEEDBACK_VAR_BOUND,
        ..Default::default()
    };
    synth_current_feedback_with(plant, lambda, &opts)
}

pub const FEEDBACK_VAR_BOUND: f64 = 1e4;

/// Rebalances `F` to `[−F2, F2]` (zero direct current feedback, `k1 = 0`), which gives
/// unit DC gain from reference to current. Returns `None` unless the rebalanced gain
/// still carries a decay certificate at `lambda`.
pub fn balance_feedback(
    plant: &PolytopicPlant,
    f: &DMatrix<f64>,
    lambda: f64,
) -> Option<DMatrix<f64>> {
    if f.shape() != (1, 2) {
        return None;
    }
    let k2 = f[(0, 1)];
    let fb = DMatrix::from_row_slice(1, 2, &[-k2, k2]);
    verify_feedback_certificate(plant, &fb, lambda)
        .0
        .then_some(fb)
}

pub fn synth_current_feedback_with(
    plant: &PolytopicPlant,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<FeedbackSynthesisResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    plant.validate()?;
    let n = plant.n();
    let mut vs = VarSpace::new();
    let x = vs.symmetric(n);
    let y = vs.general(1, n);
    let w = vs.symmetric(n);
    let gamma = vs.scalar();
    let vars = Vars {
        x,
        w,
        gamma,
        n_vars: vs.len(),
    };
    let lmis = vertex_lmis(plant, lambda, &Gain::Free(y.clone()), &vars)?;
    let sol = solve_lmi(&lmis, vars.n_vars, &Objective::Feasibility, opts)?;
    let xv = vars.x.value(&sol.z);
    let yv = y.value(&sol.z);
    let xinv = xv
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SynthesisFailure {
            reason: "X is singular".into(),
            best_margin: sol.margin,
        })?;
    let f = &yv * xinv;
    let vertex_margins = lmis[..plant.vertices.len()]
        .iter()
        .map(|l| super::affine::lmi_min_eig(l, &sol.z))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeedbackSynthesisResult {
        lambda,
        x: SymMatrix::new(xv)?,
        w: SymMatrix::new(vars.w.value(&sol.z))?,
        y: yv,
        f,
        gamma: sol.z[vars.gamma],
        vertex_margins,
    })
}

/// Searches for `X ≻ 0, W ≻ 0` certifying a fixed gain `F`; returns the verdict and best margin.
pub fn verify_feedback_certificate(
    plant: &PolytopicPlant,
    f: &DMatrix<f64>,
    lambda: f64,
) -> (bool, f64) {
    if plant.validate().is_err() || f.shape() != (1, plant.n()) || f.iter().any(|v| !v.is_finite())
    {
        return (false, f64::INFINITY);
    }
    let n = plant.n();
    let mut vs = VarSpace::new();
    let x = vs.symmetric(n);
    let w = vs.symmetric(n);
    let gamma = vs.scalar();
    let vars = Vars {
        x,
        w,
        gamma,
        n_vars: vs.len(),
    };
    let lmis = match vertex_lmis(plant, lambda, &Gain::Fixed(f), &vars) {
        Ok(l) => l,
        Err(_) => return (false, f64::INFINITY),
    };
    match solve_lmi(
        &lmis,
        vars.n_vars,
        &Objective::Feasibility,
        &SolveOptions::default(),
    ) {
        Ok(sol) => (true, sol.margin),
        Err(Error::SynthesisFailure { best_margin, .. }) => (false, best_margin),
        Err(_) => (false, f64::INFINITY),
    }
}

/// Assembles `F = [k1 − k2·C_u, k2]` from the scalar current-loop gains.
pub fn feedback_from_gains(k1: f64, k2: f64, c_u: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, 2, &[k1 - k2 * c_u, k2])
}

/// Inverse of [`feedback_from_gains`] with `C_u = 1`.
pub fn gains_from_feedback(f: &DMatrix<f64>) -> (f64, f64) {
    (f[(0, 0)] + f[(0, 1)], f[(0, 1)])
}
