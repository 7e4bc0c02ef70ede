use serde::Serialize;

use super::SimTrace;

/// Sustained large-error instability: `|vo − ref| > LARGE_ERROR_FRACTION·ref`
/// for longer than `LARGE_ERROR_TIME`.
pub const LARGE_ERROR_FRACTION: f64 = 0.5;
pub const LARGE_ERROR_TIME: f64 = 20e-3;
/// Railed instability: duty at a limit for more than this many consecutive
/// periods without the error shrinking.
pub const RAILED_PERIODS: usize = 50;
/// Settling band relative to the final reference.
pub const SETTLING_BAND: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    /// `|mean(vo) − ref|` over the tail of the window, V.
    pub steady_state_error: f64,
    /// Largest `|vo − ref|` in the window, V.
    pub overshoot: f64,
    /// Time from the window start until `vo` stays inside the 2 % band;
    /// `None` if it never settles.
    pub settling_time_2pct: Option<f64>,
    pub unstable: bool,
    pub duty_railed_fraction: f64,
    pub ref_final: f64,
    pub window_start: f64,
    pub window_end: f64,
}

/// Metrics after the last event (the whole run when there are none).
pub fn metrics(trace: &SimTrace) -> SimMetrics {
    metrics_window(trace, trace.last_event_sample(), trace.len())
}

/// Metrics over samples `start..end` against the reference in force at the
/// end of the window.
///
/// # Panics
///
/// If the window is empty or out of range.
pub fn metrics_window(trace: &SimTrace, start: usize, end: usize) -> SimMetrics {
    assert!(start < end && end <= trace.len(), "empty metrics window");
    let vo = &trace.vo[start..end];
    let duty = &trace.duty[start..end];
    let refs = &trace.reference[start..end];
    let t = &trace.t[start..end];
    let ref_final = refs[refs.len() - 1];
    let n = vo.len();

    let tail = (n / 5).clamp(1, 200);
    let mean_tail = vo[n - tail..].iter().sum::<f64>() / tail as f64;
    let steady_state_error = (mean_tail - ref_final).abs();
    let overshoot = vo.iter().map(|v| (v - ref_final).abs()).fold(0.0, f64::max);

    let band = SETTLING_BAND * ref_final.abs();
    let settling_time_2pct = match vo.iter().rposition(|v| (v - ref_final).abs() > band) {
        None => Some(0.0),
        Some(i) if i + 1 < n => Some(t[i + 1] - t[0]),
        Some(_) => None,
    };

    let at_limit =
        |d: f64| (d - trace.duty_min).abs() <= 1e-12 || (d - trace.duty_max).abs() <= 1e-12;
    let railed = duty.iter().filter(|&&d| at_limit(d)).count();

    let ts = if trace.t.len() > 1 {
        trace.t[1] - trace.t[0]
    } else {
        LARGE_ERROR_TIME
    };
    let large_needed = (LARGE_ERROR_TIME / ts).round() as usize;
    let errors: Vec<f64> = vo.iter().zip(refs).map(|(v, r)| (v - r).abs()).collect();
    let large = longest_run(&errors, |i| {
        errors[i] > LARGE_ERROR_FRACTION * refs[i].abs()
    })
    .is_some_and(|(_, len)| len > large_needed);

    let railed_divergent = runs(n, |i| at_limit(duty[i])).into_iter().any(|(s, len)| {
        len > RAILED_PERIODS && errors[s + len - 1] >= errors[s] - 1e-9 * refs[s].abs()
    });

    SimMetrics {
        steady_state_error,
        overshoot,
        settling_time_2pct,
        unstable: trace.blowup || large || railed_divergent,
        duty_railed_fraction: railed as f64 / n as f64,
        ref_final,
        window_start: t[0],
        window_end: t[n - 1],
    }
}

/// Maximal runs `(start, len)` of consecutive indices satisfying `pred`.
fn runs(n: usize, pred: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if pred(i) {
            let s = i;
            while i < n && pred(i) {
                i += 1;
            }
            out.push((s, i - s));
        } else {
            i += 1;
        }
    }
    out
}

fn longest_run(v: &[f64], pred: impl Fn(usize) -> bool) -> Option<(usize, usize)> {
    runs(v.len(), pred).into_iter().max_by_key(|r| r.1)
}
