use super::GpcSynthesis;

/// Mutable controller memory: last applied input and the output/increment
/// histories read by the free response.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub u_prev: f64,
    /// `[Δu(k−1), Δu(k−2), …]`
    pub du_history: Vec<f64>,
    /// `[y(k−1), y(k−2), …]` before a step; the step prepends `y(k)`.
    pub y_history: Vec<f64>,
    pub u_min: f64,
    pub u_max: f64,
}

impl ControllerState {
    /// Resting state: constant output `y0`, no recent increments.
    pub fn at_rest(syn: &GpcSynthesis, u_prev: f64, y0: f64, limits: (f64, f64)) -> Self {
        Self {
            u_prev,
            du_history: vec![0.0; syn.du_history_len()],
            y_history: vec![y0; syn.y_history_len()],
            u_min: limits.0,
            u_max: limits.1,
        }
    }

    /// Unconstrained controller (no duty clamp), used for linear analysis.
    pub fn unconstrained(syn: &GpcSynthesis, u_prev: f64, y0: f64) -> Self {
        Self::at_rest(syn, u_prev, y0, (f64::NEG_INFINITY, f64::INFINITY))
    }

    /// Adapt history lengths to another synthesis, truncating or padding with
    /// zeros. `u_prev` is kept.
    pub fn resize_for(&mut self, syn: &GpcSynthesis) {
        self.du_history.resize(syn.du_history_len(), 0.0);
        self.y_history.resize(syn.y_history_len(), 0.0);
    }

    /// Free response `f_j = F_j·[y(k), y(k−1), …] + G′_j·[Δu(k−1), …]` for
    /// the current measurement.
    ///
    /// `Ã` carries the factor `Δ`, so `F_j(1) = 1` and the output part is
    /// evaluated as `y(k) + F_j·[y(k−i) − y(k)]`. The `F_j` coefficients are
    /// large and nearly cancel on a constant output; the deviation form keeps
    /// an equilibrium exact.
    pub fn free_response(&self, syn: &GpcSynthesis, y_meas: f64) -> Vec<f64> {
        let dev = self.output_deviations(y_meas);
        syn.f_polys()
            .iter()
            .zip(syn.gprime_polys())
            .map(|(f, gp)| y_meas + f.apply(&dev) + gp.apply(&self.du_history))
            .collect()
    }

    fn output_deviations(&self, y_meas: f64) -> Vec<f64> {
        self.shifted_outputs(y_meas)
            .iter()
            .map(|y| y - y_meas)
            .collect()
    }

    fn shifted_outputs(&self, y_meas: f64) -> Vec<f64> {
        let n = self.y_history.len();
        let mut ys = Vec::with_capacity(n);
        ys.push(y_meas);
        ys.extend(self.y_history.iter().take(n.saturating_sub(1)));
        ys
    }

    /// One control period: compute `Δu = Σ kⱼ(w − fⱼ)`, clamp the resulting
    /// input and record the increment that was actually applied.
    pub fn step(&mut self, syn: &GpcSynthesis, y_meas: f64, w_ref: f64) -> f64 {
        let dev = self.output_deviations(y_meas);
        let du: f64 = syn
            .k_row
            .iter()
            .zip(syn.f_polys().iter().zip(syn.gprime_polys()))
            .map(|(k, (f, gp))| k * ((w_ref - y_meas) - f.apply(&dev) - gp.apply(&self.du_history)))
            .sum();
        let u = (self.u_prev + du).clamp(self.u_min, self.u_max);
        let applied = u - self.u_prev;

        self.y_history = self.shifted_outputs(y_meas);
        if !self.du_history.is_empty() {
            self.du_history.rotate_right(1);
            self.du_history[0] = applied;
        }
        self.u_prev = u;
        u
    }
}
