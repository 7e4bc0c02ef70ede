use num_complex::Complex64;

use super::{roots_ascending, NumericsError, Polynomial};

/// Continuous-time SISO transfer function `num(s)/den(s)`, coefficients in
/// ascending powers of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousTf {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn strip_high(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    c
}

impl ContinuousTf {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self, NumericsError> {
        let num = strip_high(num);
        let den = strip_high(den);
        if den.is_empty() || den.iter().all(|&d| d == 0.0) {
            return Err(NumericsError::InvalidTransferFunction(
                "denominator is zero".into(),
            ));
        }
        if num.is_empty() {
            return Err(NumericsError::InvalidTransferFunction(
                "empty numerator".into(),
            ));
        }
        if num.len() > den.len() && num.iter().skip(den.len()).any(|&c| c != 0.0) {
            return Err(NumericsError::InvalidTransferFunction(
                "improper: numerator degree exceeds denominator degree".into(),
            ));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(NumericsError::InvalidTransferFunction(
                "non-finite coefficient".into(),
            ));
        }
        Ok(Self { num, den })
    }

    pub fn gain(k: f64) -> Self {
        Self {
            num: vec![k],
            den: vec![1.0],
        }
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn is_strictly_proper(&self) -> bool {
        let deg_num = self.num.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        deg_num < self.order()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner_s(&self.num, s) / horner_s(&self.den, s)
    }

    pub fn dc_gain(&self) -> f64 {
        self.num[0] / self.den[0]
    }

    pub fn poles(&self) -> Result<Vec<Complex64>, NumericsError> {
        roots_ascending(&self.den)
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>, NumericsError> {
        if self.num.iter().all(|&c| c == 0.0) {
            return Ok(Vec::new());
        }
        roots_ascending(&self.num)
    }
}

fn horner_s<T>(c: &[f64], s: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<f64, Output = T> + From<f64>,
{
    c.iter().rev().fold(T::from(0.0), |acc, &x| acc * s + x)
}

/// Discrete transfer function `b(z⁻¹)/a(z⁻¹)` with monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteTf {
    b: Polynomial,
    a: Polynomial,
    sample_time: f64,
}

impl DiscreteTf {
    pub fn new(b: Polynomial, a: Polynomial, sample_time: f64) -> Result<Self, NumericsError> {
        if !(sample_time > 0.0 && sample_time.is_finite()) {
            return Err(NumericsError::InvalidSampleTime(sample_time));
        }
        let a0 = a.coeff(0);
        if a0 == 0.0 || !a0.is_finite() {
            return Err(NumericsError::InvalidTransferFunction(
                "denominator has zero leading coefficient".into(),
            ));
        }
        let b = b.scale(1.0 / a0);
        let mut a = a.scale(1.0 / a0);
        let mut ac = a.into_coeffs();
        ac[0] = 1.0;
        a = Polynomial::new(ac);
        Ok(Self { b, a, sample_time })
    }

    pub fn b(&self) -> &Polynomial {
        &self.b
    }

    pub fn a(&self) -> &Polynomial {
        &self.a
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    pub fn dc_gain(&self) -> f64 {
        self.b.dc() / self.a.dc()
    }

    /// Response to a unit step applied at `k = 0`.
    pub fn step_response(&self, n: usize) -> Vec<f64> {
        step_coeffs(self, n)
    }
}

/// First `n` coefficients of the power series `b/a`.
pub fn impulse_coeffs(tf: &DiscreteTf, n: usize) -> Vec<f64> {
    let a = tf.a.coeffs();
    let b = tf.b.coeffs();
    let mut h = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = b.get(k).copied().unwrap_or(0.0);
        for i in 1..a.len().min(k + 1) {
            v -= a[i] * h[k - i];
        }
        h.push(v);
    }
    h
}

/// First `n` samples of the unit-step response, i.e. the power series of
/// `b/(aΔ)`.
pub fn step_coeffs(tf: &DiscreteTf, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    impulse_coeffs(tf, n)
        .into_iter()
        .map(|h| {
            acc += h;
            acc
        })
        .collect()
}

fn binomial_poly(k: usize, sign: f64) -> Polynomial {
    // (1 + sign·z⁻¹)ᵏ
    let base = Polynomial::structural(vec![1.0, sign]);
    (0..k).fold(Polynomial::one(), |acc, _| {
        Polynomial::structural(super::convolve(acc.coeffs(), base.coeffs()))
    })
}

/// Bilinear (Tustin) discretization, `s = (2/Ts)(z − 1)/(z + 1)`.
///
/// Carried out in `z⁻¹` form: multiplying through by `(1 + z⁻¹)ⁿ`
/// maps `sᵏ` to `(2/Ts)ᵏ (1 − z⁻¹)ᵏ (1 + z⁻¹)ⁿ⁻ᵏ`.
pub fn tustin(ct: &ContinuousTf, ts: f64) -> Result<DiscreteTf, NumericsError> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(NumericsError::InvalidSampleTime(ts));
    }
    let n = ct.order();
    let k2 = 2.0 / ts;
    let map = |c: &[f64]| {
        let mut acc = vec![0.0; n + 1];
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            let term = super::convolve(
                binomial_poly(k, -1.0).coeffs(),
                binomial_poly(n - k, 1.0).coeffs(),
            );
            let w = ck * k2.powi(k as i32);
            for (i, t) in term.iter().enumerate() {
                acc[i] += w * t;
            }
        }
        acc
    };
    let b = map(ct.num());
    let a = map(ct.den());
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || a[0].abs() <= 1e-14 * scale {
        return Err(NumericsError::DegenerateDenominator);
    }
    DiscreteTf::new(Polynomial::new(b), Polynomial::new(a), ts)
}

fn cconvolve(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn cadd(acc: &mut Vec<Complex64>, term: &[Complex64], w: Complex64) {
    if acc.len() < term.len() {
        acc.resize(term.len(), Complex64::new(0.0, 0.0));
    }
    for (a, t) in acc.iter_mut().zip(term) {
        *a += w * t;
    }
}

fn cderiv(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &x)| k as f64 * x)
        .collect()
}

/// Step-invariant (zero-order-hold) discretization,
/// `G(z) = (1 − z⁻¹)·Z{G(s)/s}`.
///
/// Uses partial fractions of `G(s)/s`. Nonzero poles must be simple; at most
/// one free integrator in `G` is supported (a double pole of `G(s)/s` at the
/// origin).
pub fn zoh(ct: &ContinuousTf, ts: f64) -> Result<DiscreteTf, NumericsError> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(NumericsError::InvalidSampleTime(ts));
    }
    let num = ct.num();
    let mut den = ct.den().to_vec();
    let den_scale = den.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    // Factor out integrators: G = N / (sᵐ D₁).
    let mut integrators = 0;
    while den.len() > 1 && den[0].abs() <= 1e-14 * den_scale {
        den.remove(0);
        integrators += 1;
    }
    let origin_order = integrators + 1;
    if origin_order > 2 {
        return Err(NumericsError::UnsupportedPoleStructure(format!(
            "{integrators} integrators (at most one supported)"
        )));
    }

    let poles = if den.len() > 1 {
        roots_ascending(&den)?
    } else {
        Vec::new()
    };
    for (i, p) in poles.iter().enumerate() {
        if p.norm() <= 1e-12 {
            return Err(NumericsError::UnsupportedPoleStructure(
                "numerically repeated pole at the origin".into(),
            ));
        }
        for q in &poles[i + 1..] {
            if (p - q).norm() <= 1e-7 * p.norm().max(q.norm()) {
                return Err(NumericsError::UnsupportedPoleStructure(format!(
                    "repeated pole near {p}"
                )));
            }
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let d1 = cderiv(&den);
    let factors: Vec<Vec<Complex64>> = poles.iter().map(|p| vec![one, -(p * ts).exp()]).collect();
    let integ = vec![one, -one];

    let prod_except = |skip: Option<usize>| -> Vec<Complex64> {
        let mut acc = vec![one];
        for (j, f) in factors.iter().enumerate() {
            if Some(j) != skip {
                acc = cconvolve(&acc, f);
            }
        }
        acc
    };
    let all_poles = prod_except(None);
    let mut den_z = all_poles.clone();
    for _ in 1..origin_order {
        den_z = cconvolve(&den_z, &integ);
    }

    let mut num_z: Vec<Complex64> = vec![zero];
    // Nonzero simple poles: r/(s − p) → r(1 − z⁻¹)/(1 − e^{pTs}z⁻¹) after Δ.
    for (i, p) in poles.iter().enumerate() {
        let n_p: Complex64 = horner_s(num, *p);
        let d_p: Complex64 = horner_s(&d1, *p);
        let r = n_p / (p.powi(origin_order) * d_p);
        let mut term = cconvolve(&prod_except(Some(i)), &integ);
        for _ in 1..origin_order {
            term = cconvolve(&term, &integ);
        }
        cadd(&mut num_z, &term, r);
    }
    // Origin: c₁/s → c₁, and c₂/s² → c₂·Ts·z⁻¹/(1 − z⁻¹).
    let d0 = den[0];
    let c1 = if origin_order == 1 {
        num[0] / d0
    } else {
        let n1 = num.get(1).copied().unwrap_or(0.0);
        let dd1 = den.get(1).copied().unwrap_or(0.0);
        (n1 * d0 - num[0] * dd1) / (d0 * d0)
    };
    cadd(&mut num_z, &den_z, Complex64::new(c1, 0.0));
    if origin_order == 2 {
        let c2 = num[0] / d0;
        let mut term = vec![zero];
        term.extend(all_poles.iter().copied());
        cadd(&mut num_z, &term, Complex64::new(c2 * ts, 0.0));
    }

    let mut b: Vec<f64> = num_z.iter().map(|c| c.re).collect();
    let a: Vec<f64> = den_z.iter().map(|c| c.re).collect();
    if ct.is_strictly_proper() {
        b[0] = 0.0;
    }
    DiscreteTf::new(Polynomial::new(b), Polynomial::new(a), ts)
}
