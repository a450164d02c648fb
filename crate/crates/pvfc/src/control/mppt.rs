/// Perturb-and-observe tracker acting on the boost duty ratio
/// (`v_pv = (1 − d)·v_dc`, so raising the voltage lowers the duty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mppt {
    pub step: f64,
    prev: Option<(f64, f64)>,
}

impl Mppt {
    pub fn new(step: f64) -> Self {
        Mppt { step, prev: None }
    }

    pub fn reset(&mut self) {
        self.prev = None;
    }

    pub fn update(&mut self, p_now: f64, v_now: f64) -> f64 {
        let prev = self.prev.unwrap_or((p_now, v_now));
        self.prev = Some((p_now, v_now));
        mppt_po(p_now, v_now, prev, self.step)
    }
}

/// Duty increment for one P&O iteration. With no voltage history the first
/// move lowers the voltage (a cold array sits at open circuit).
pub fn mppt_po(p_now: f64, v_now: f64, prev: (f64, f64), step: f64) -> f64 {
    let (p_prev, v_prev) = prev;
    let moved = v_now - v_prev;
    let last = if moved > 0.0 { 1.0 } else { -1.0 };
    let dir = if p_now >= p_prev { last } else { -last };
    -dir * step
}
