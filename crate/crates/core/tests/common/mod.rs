//! Oracles shared by the integration suites. None of them touch the
//! Diophantine or RST machinery under test; predictions come from running
//! the CARIMA difference equation forward.

#![allow(dead_code)]

use boost_gpc::gpc::{ControllerState, GpcSynthesis};
use rand::Rng;

/// `y(k+1), …, y(k+p)` of `Ã·y(t) = B·Δu(t−1)` given `y(k), y(k−1), …`,
/// `Δu(k−1), Δu(k−2), …`, the current increment `Δu(k)` and zero increments
/// afterwards.
pub fn carima_forecast(
    a_tilde: &[f64],
    b: &[f64],
    y_hist: &[f64],
    du_hist: &[f64],
    du_now: f64,
    p: usize,
) -> Vec<f64> {
    let y_at = |ys: &Vec<f64>, j: isize| -> f64 {
        // ys holds predictions for k+1, k+2, …; j is the offset from k.
        if j >= 1 {
            ys[(j - 1) as usize]
        } else {
            y_hist.get((-j) as usize).copied().unwrap_or(0.0)
        }
    };
    let du_at = |j: isize| -> f64 {
        match j {
            0 => du_now,
            j if j > 0 => 0.0,
            j => du_hist.get((-j - 1) as usize).copied().unwrap_or(0.0),
        }
    };
    let mut ys = Vec::with_capacity(p);
    for j in 1..=p as isize {
        let mut v = 0.0;
        for (i, a) in a_tilde.iter().enumerate().skip(1) {
            v -= a * y_at(&ys, j - i as isize);
        }
        for (i, bi) in b.iter().enumerate() {
            v += bi * du_at(j - 1 - i as isize);
        }
        ys.push(v);
    }
    ys
}

/// Minimizer of `J(x) = Σ δ(g_j·x + f_j − w)² + λx²` by golden-section
/// search. Points are compared through the factored difference
/// `J(a) − J(b) = (a − b)·(Σ δ g_j(2(f_j − w) + g_j(a + b)) + λ(a + b))`,
/// which stays accurate near the minimum where `J` itself is flat.
pub fn golden_min(g: &[f64], f: &[f64], w: f64, lambda: f64, delta: f64, half_width: f64) -> f64 {
    let less = |a: f64, b: f64| -> bool {
        let s = a + b;
        let slope: f64 = g
            .iter()
            .zip(f)
            .map(|(gj, fj)| delta * gj * (2.0 * (fj - w) + gj * s))
            .sum::<f64>()
            + lambda * s;
        (a - b) * slope < 0.0
    };
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-half_width, half_width);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    for _ in 0..400 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if less(x1, x2) {
            hi = x2;
            x2 = x1;
            x1 = hi - phi * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + phi * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Cost-minimizing increment for the current controller state, computed from
/// forward simulation of the model alone.
pub fn oracle_increment(syn: &GpcSynthesis, st: &ControllerState, y_meas: f64, w: f64) -> f64 {
    let model = syn.model();
    let at = model.a_tilde();
    let mut b = vec![0.0; model.delay];
    b.extend_from_slice(model.b.coeffs());
    let mut y_hist = vec![y_meas];
    y_hist.extend_from_slice(&st.y_history);
    let cfg = syn.config();
    let p = cfg.horizon_p + cfg.delay_d;
    let f_all = carima_forecast(at.coeffs(), &b, &y_hist, &st.du_history, 0.0, p);
    let one = carima_forecast(at.coeffs(), &b, &y_hist, &st.du_history, 1.0, p);
    let f = &f_all[cfg.delay_d..];
    let g: Vec<f64> = one[cfg.delay_d..]
        .iter()
        .zip(f)
        .map(|(a, b)| a - b)
        .collect();
    golden_min(&g, f, w, cfg.lambda, cfg.delta_w, 1e4)
}

/// Monic polynomial `1 + a₁z⁻¹ + …` with all roots strictly inside the
/// circle of radius `rmax`.
pub fn random_stable_monic<R: Rng>(rng: &mut R, degree: usize, rmax: f64) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut left = degree;
    while left > 0 {
        let factor = if left >= 2 && rng.gen_bool(0.5) {
            let r = rng.gen_range(0.0..rmax);
            let th = rng.gen_range(0.0..std::f64::consts::PI);
            vec![1.0, -2.0 * r * th.cos(), r * r]
        } else {
            vec![1.0, -rng.gen_range(-rmax..rmax)]
        };
        left -= factor.len() - 1;
        poly = mul(&poly, &factor);
    }
    poly
}

pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Run the unconstrained controller against its own CARIMA model from a
/// unit output disturbance and report whether the response grows.
///
/// The loop runs `n` samples; the response is judged divergent when the
/// envelope over the final fifth exceeds both the envelope over the second
/// fifth and the roundoff floor a decayed response settles on.
pub fn linear_loop_diverges(syn: &GpcSynthesis, n: usize) -> bool {
    let model = syn.model();
    let at = model.a_tilde();
    let at = at.coeffs();
    let mut b = vec![0.0; model.delay];
    b.extend_from_slice(model.b.coeffs());

    let mut st = ControllerState::unconstrained(syn, 0.0, 0.0);
    let mut ys: Vec<f64> = vec![1.0];
    let mut dus: Vec<f64> = Vec::new();
    for k in 0..n {
        let y = ys[k];
        if !y.is_finite() || y.abs() > 1e150 {
            return true;
        }
        let u_prev = st.u_prev;
        let u = st.step(syn, y, 0.0);
        dus.push(u - u_prev);
        // y(k+1) = −Σ ã_i y(k+1−i) + Σ b_i Δu(k−i)
        let mut next = 0.0;
        for (i, a) in at.iter().enumerate().skip(1) {
            if k + 1 >= i {
                next -= a * ys[k + 1 - i];
            }
        }
        for (i, bi) in b.iter().enumerate() {
            if k >= i {
                next += bi * dus[k - i];
            }
        }
        ys.push(next);
    }
    let fifth = n / 5;
    let env = |r: std::ops::Range<usize>| ys[r].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let late = env(4 * fifth..n);
    late > env(fifth..2 * fifth) && late > 1e-9
}
