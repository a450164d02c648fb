use crate::signal::AlphaBeta;

/// Minimum |v| for the normal-mode references.
pub const EPS_V: f64 = 1.0;
/// Minimum |v × ṽ| for the delayed-voltage references.
pub const EPS_D: f64 = 1.0;

/// Currents delivering `(p, q)` at voltage `v`; `None` when |v| ≤ ε_v.
pub fn current_refs_normal(v: AlphaBeta, p: f64, q: f64) -> Option<AlphaBeta> {
    let d = v.norm_sq();
    if d <= EPS_V * EPS_V {
        return None;
    }
    let k = 2.0 / (3.0 * d);
    Some(AlphaBeta::new(
        k * (v.alpha * p + v.beta * q),
        k * (v.beta * p - v.alpha * q),
    ))
}

/// Delayed-voltage references: constant real power `p` under unbalance,
/// with `q` defined against the quarter-cycle-delayed voltage `vd`.
pub fn current_refs_sag(v: AlphaBeta, vd: AlphaBeta, p: f64, q: f64) -> Option<AlphaBeta> {
    let den = v.beta * vd.alpha - v.alpha * vd.beta;
    if den.abs() <= EPS_D {
        return None;
    }
    let k = 2.0 / (3.0 * den);
    Some(AlphaBeta::new(
        k * (v.beta * q - vd.beta * p),
        k * (vd.alpha * p - v.alpha * q),
    ))
}
