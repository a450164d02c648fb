//! Log-barrier interior-point method for small systems of strict LMIs.
//!
//! Phase I minimises a common shift `s` with `F_k(z) ≺ s·I` until the point
//! is strictly feasible; phase II (when an objective is given) follows the
//! central path of `t·cᵀz − Σ log det(−F_k(z) − floor·I)`. Every scalar is
//! additionally boxed to `|z_i| < var_bound` so homogeneous problems stay
//! bounded.

use super::affine::{lmi_min_eig, AffineLmi};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Maximise the smallest margin (most interior point within the box).
    Feasibility,
    /// Minimise `Σ c_i z_i` subject to every LMI holding with `margin_floor`.
    Minimize(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub margin_floor: f64,
    pub var_bound: f64,
    /// Relative optimality gap for `Minimize`, relative shift tolerance for `Feasibility`.
    pub rel_tol: f64,
    pub max_newton: usize,
    pub initial: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            margin_floor: 1e-6,
            var_bound: 1e6,
            rel_tol: 1e-3,
            max_newton: 20_000,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub z: Vec<f64>,
    /// Largest eigenvalue over all LMIs at `z` (negative when feasible).
    pub margin: f64,
    pub objective: f64,
    pub newton_steps: usize,
}

/// `G(y) = c0 + Σ y_i C_i`, required to stay negative definite.
struct Block {
    c0: DMatrix<f64>,
    coeffs: Vec<(usize, DMatrix<f64>)>,
}

impl Block {
    fn slack(&self, y: &[f64]) -> DMatrix<f64> {
        let mut g = self.c0.clone();
        for (i, c) in &self.coeffs {
            g += c * y[*i];
        }
        -g
    }
}

struct Barrier {
    blocks: Vec<Block>,
    cost: Vec<f64>,
    n: usize,
}

struct Eval {
    f: f64,
    g: DVector<f64>,
    h: DMatrix<f64>,
}

impl Barrier {
    fn degree(&self) -> f64 {
        self.blocks.iter().map(|b| b.c0.nrows()).sum::<usize>() as f64
    }

    fn cost(&self, y: &[f64]) -> f64 {
        self.cost.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    fn value(&self, y: &[f64], t: f64) -> Option<f64> {
        let mut f = t * self.cost(y);
        for b in &self.blocks {
            let chol = b.slack(y).cholesky()?;
            f -= 2.0
                * chol
                    .l_dirty()
                    .diagonal()
                    .iter()
                    .map(|d| d.ln())
                    .sum::<f64>();
        }
        f.is_finite().then_some(f)
    }

    fn eval(&self, y: &[f64], t: f64) -> Option<Eval> {
        let n = self.n;
        let mut g = DVector::from_iterator(n, self.cost.iter().map(|c| t * c));
        let mut h = DMatrix::zeros(n, n);
        let mut f = t * self.cost(y);
        for b in &self.blocks {
            let chol = b.slack(y).cholesky()?;
            f -= 2.0
                * chol
                    .l_dirty()
                    .diagonal()
                    .iter()
                    .map(|d| d.ln())
                    .sum::<f64>();
            let sinv = chol.inverse();
            let ms: Vec<(usize, DMatrix<f64>)> =
                b.coeffs.iter().map(|(i, c)| (*i, &sinv * c)).collect();
            for (a, (i, mi)) in ms.iter().enumerate() {
                g[*i] += mi.trace();
                for (j, mj) in &ms[a..] {
                    let v = (mi * mj).trace();
                    h[(*i, *j)] += v;
                    if i != j {
                        h[(*j, *i)] += v;
                    }
                }
            }
        }
        f.is_finite().then_some(Eval { f, g, h })
    }

    /// Damped Newton centering at barrier weight `t`. `stop` may end early.
    fn center(
        &self,
        y: &mut Vec<f64>,
        t: f64,
        budget: &mut usize,
        stop: &dyn Fn(&[f64]) -> bool,
    ) -> Result<bool> {
        for _ in 0..100 {
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            let e = self
                .eval(y, t)
                .ok_or_else(|| Error::ModelFault("barrier left domain".into()))?;
            let dy = newton_direction(&e.h, &e.g);
            let dec = -e.g.dot(&dy);
            if !(dec > 1e-10) {
                return Ok(stop(y));
            }
            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = y
                    .iter()
                    .zip(dy.iter())
                    .map(|(v, d)| v + alpha * d)
                    .collect();
                if let Some(f) = self.value(&trial, t) {
                    if f <= e.f - 0.25 * alpha * dec {
                        *y = trial;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-14 {
                    return Ok(stop(y));
                }
            }
            if stop(y) {
                return Ok(true);
            }
        }
        Ok(stop(y))
    }
}

fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let scale = h.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    loop {
        let mut hr = h.clone();
        for i in 0..hr.nrows() {
            hr[(i, i)] += reg;
        }
        if let Some(ch) = hr.cholesky() {
            return -ch.solve(g);
        }
        reg = if reg == 0.0 {
            1e-14 * scale
        } else {
            reg * 100.0
        };
    }
}

fn box_blocks(n_vars: usize, bound: f64) -> Vec<Block> {
    let mut out = Vec::with_capacity(2 * n_vars);
    for i in 0..n_vars {
        for sign in [1.0, -1.0] {
            out.push(Block {
                c0: DMatrix::from_element(1, 1, -bound),
                coeffs: vec![(i, DMatrix::from_element(1, 1, sign))],
            });
        }
    }
    out
}

fn overall_margin(lmis: &[AffineLmi], z: &[f64]) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for l in lmis {
        worst = worst.max(lmi_min_eig(l, z)?);
    }
    Ok(worst)
}

/// Solves the system `F_k(z) ≺ 0` for all k, optionally minimising a linear cost.
pub fn solve_lmi(
    lmis: &[AffineLmi],
    n_vars: usize,
    objective: &Objective,
    opts: &SolveOptions,
) -> Result<LmiSolution> {
    if lmis.is_empty() {
        return Err(Error::InvalidInput("no LMIs given".into()));
    }
    let needed = lmis.iter().map(AffineLmi::n_vars).max().unwrap_or(0);
    if needed > n_vars {
        return Err(Error::IncompleteAssignment(needed - 1));
    }
    if let Objective::Minimize(c) = objective {
        if c.len() != n_vars {
            return Err(Error::InvalidInput(format!(
                "cost has {} entries, expected {n_vars}",
                c.len()
            )));
        }
    }
    let floor = opts.margin_floor;
    let mut budget = opts.max_newton;
    let mut z = opts.initial.clone().unwrap_or_else(|| vec![0.0; n_vars]);
    if z.len() != n_vars || z.iter().any(|v| !(v.abs() < opts.var_bound)) {
        return Err(Error::InvalidInput(
            "initial point outside the variable box".into(),
        ));
    }

    // Phase I over (z, s).
    let s_id = n_vars;
    let start = overall_margin(lmis, &z)?;
    let mut y = z.clone();
    y.push(start + start.abs().max(1.0));
    let mut blocks: Vec<Block> = lmis
        .iter()
        .map(|l| {
            let n = l.dim();
            let mut coeffs = l.coeffs().to_vec();
            coeffs.push((s_id, -DMatrix::identity(n, n)));
            Block {
                c0: l.constant().clone(),
                coeffs,
            }
        })
        .collect();
    blocks.extend(box_blocks(n_vars, opts.var_bound));
    let mut cost = vec![0.0; n_vars + 1];
    cost[s_id] = 1.0;
    let phase1 = Barrier {
        blocks,
        cost,
        n: n_vars + 1,
    };
    let deg1 = phase1.degree();
    let minimizing = matches!(objective, Objective::Minimize(_));
    let early = move |y: &[f64]| minimizing && y[s_id] < -2.0 * floor;
    let mut t = 1.0 / y[s_id].abs().max(1e-3);
    loop {
        let hit = phase1.center(&mut y, t, &mut budget, &early)?;
        if hit {
            break;
        }
        let s = y[s_id];
        let gap = deg1 / t;
        if s - gap > -floor {
            let margin = overall_margin(lmis, &y[..n_vars])?;
            return Err(Error::SynthesisFailure {
                reason: "no strictly feasible point".into(),
                best_margin: margin,
            });
        }
        if gap <= opts.rel_tol * s.abs().max(floor) || budget == 0 {
            break;
        }
        t *= 8.0;
    }
    z.copy_from_slice(&y[..n_vars]);
    let margin = overall_margin(lmis, &z)?;
    if !(margin < -floor) {
        return Err(Error::SynthesisFailure {
            reason: if budget == 0 {
                "iteration budget exhausted".into()
            } else {
                "margin above floor".into()
            },
            best_margin: margin,
        });
    }

    let c = match objective {
        Objective::Feasibility => {
            return Ok(LmiSolution {
                z,
                margin,
                objective: margin,
                newton_steps: opts.max_newton - budget,
            });
        }
        Objective::Minimize(c) => c.clone(),
    };

    // Phase II: F_k(z) + floor·I ≺ 0.
    let mut blocks: Vec<Block> = lmis
        .iter()
        .map(|l| {
            let n = l.dim();
            Block {
                c0: l.constant() + DMatrix::identity(n, n) * floor,
                coeffs: l.coeffs().to_vec(),
            }
        })
        .collect();
    blocks.extend(box_blocks(n_vars, opts.var_bound));
    let phase2 = Barrier {
        blocks,
        cost: c.clone(),
        n: n_vars,
    };
    let deg2 = phase2.degree();
    let cost_of = |z: &[f64]| c.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
    let mut t = 1.0 / cost_of(&z).abs().max(1e-9);
    let never = |_: &[f64]| false;
    loop {
        phase2.center(&mut z, t, &mut budget, &never)?;
        let gap = deg2 / t;
        if gap <= opts.rel_tol * cost_of(&z).abs().max(1e-300) || budget == 0 || t > 1e300 {
            break;
        }
        t *= 8.0;
    }
    let margin = overall_margin(lmis, &z)?;
    if !(margin < -floor * 0.5) {
        return Err(Error::SynthesisFailure {
            reason: "lost feasibility in phase II".into(),
            best_margin: margin,
        });
    }
    Ok(LmiSolution {
        objective: cost_of(&z),
        z,
        margin,
        newton_steps: opts.max_newton - budget,
    })
}
