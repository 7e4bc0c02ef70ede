use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Default relative tolerance below which trailing coefficients are dropped.
pub const TRIM_TOL: f64 = 1e-12;

/// Polynomial in the delay operator `z⁻¹`, stored in ascending order:
/// `coeffs[i]` multiplies `z⁻ⁱ`.
///
/// Construction through [`Polynomial::new`] trims trailing coefficients
/// whose magnitude is below `TRIM_TOL` times the largest coefficient.
/// [`Polynomial::structural`] keeps every coefficient, which matters when a
/// trailing coefficient cancels analytically but its root (at the origin)
/// still belongs to the closed loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        Self::with_trim(coeffs, TRIM_TOL)
    }

    pub fn with_trim(coeffs: impl Into<Vec<f64>>, rel_tol: f64) -> Self {
        let mut coeffs = coeffs.into();
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        while coeffs.len() > 1 {
            let last = *coeffs.last().unwrap();
            if last == 0.0 || last.abs() < rel_tol * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        if coeffs.is_empty() || scale == 0.0 {
            coeffs = vec![0.0];
        }
        Self { coeffs }
    }

    /// Keeps the coefficient vector exactly as given (an empty vector
    /// becomes the zero polynomial).
    pub fn structural(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    /// The differencing operator `Δ = 1 − z⁻¹`.
    pub fn delta() -> Self {
        Self {
            coeffs: vec![1.0, -1.0],
        }
    }

    /// `z⁻ᵏ`
    pub fn delay(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `z⁻ⁱ`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Multiply by `z⁻ᵏ`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Re-apply the default trim rule.
    pub fn trimmed(&self) -> Self {
        Self::new(self.coeffs.clone())
    }

    /// Evaluate at `z⁻¹ = x`.
    pub fn eval_inv(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Evaluate at a point of the z-plane, i.e. `Σ cᵢ z⁻ⁱ`.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * zi + c)
    }

    /// Sum of coefficients, the steady-state value `p(z = 1)`.
    pub fn dc(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Dot product of the coefficients with a sample history
    /// `[x(k), x(k−1), …]`; missing history counts as zero.
    pub fn apply(&self, history: &[f64]) -> f64 {
        self.coeffs.iter().zip(history).map(|(c, x)| c * x).sum()
    }

    /// Coefficient-wise infinity norm of `self − other`.
    pub fn distance_inf(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
    }

    fn add_raw(&self, other: &Self, sign: f64) -> Vec<f64> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| self.coeff(i) + sign * other.coeff(i))
            .collect()
    }
}

/// Convolution of two coefficient vectors, without trimming.
pub fn convolve(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Product of two polynomials, trimmed per the default rule.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    Polynomial::new(convolve(&p.coeffs, &q.coeffs))
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        poly_mul(self, rhs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::new(self.add_raw(rhs, 1.0))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::new(self.add_raw(rhs, -1.0))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c:+}·z⁻¹")?,
                _ => write!(f, "{c:+}·z^-{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn difference_of_squares() {
        let p = Polynomial::new(vec![1.0, -1.0]);
        let q = Polynomial::new(vec![1.0, 1.0]);
        assert_eq!((&p * &q).coeffs(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn identity_and_zero() {
        let p = Polynomial::new(vec![0.3, -2.0, 5.0]);
        assert_eq!(&p * &Polynomial::one(), p);
        assert!((&p * &Polynomial::zero()).is_zero());
        assert_eq!(Polynomial::new(vec![]).coeffs(), &[0.0]);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).coeffs(), &[0.0]);
    }

    #[test]
    fn trims_relative_to_largest() {
        let p = Polynomial::new(vec![2.0, 1.0, 1e-13]);
        assert_eq!(p.degree(), 1);
        let p = Polynomial::new(vec![2.0, 1.0, 1e-11]);
        assert_eq!(p.degree(), 2);
        let s = Polynomial::structural(vec![2.0, 1.0, 0.0]);
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn delta_times_second_order() {
        // Hand convolution of (1 − z⁻¹)(1 + a₁z⁻¹ + a₂z⁻²).
        let a = Polynomial::new(vec![1.0, -1.9, 0.95]);
        let at = &Polynomial::delta() * &a;
        assert_eq!(at.degree(), a.degree() + 1);
        let expect = [1.0, -2.9, 2.85, -0.95];
        for (c, e) in at.coeffs().iter().zip(expect) {
            assert!((c - e).abs() < 1e-15);
        }
    }

    #[test]
    fn apply_and_shift() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.apply(&[1.0, 1.0, 1.0]), 6.0);
        assert_eq!(p.apply(&[1.0]), 1.0);
        assert_eq!(p.shift(2).coeffs(), &[0.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(p.dc(), 6.0);
        assert!((p.eval_inv(0.5) - 2.75).abs() < 1e-15);
    }

    fn coeff_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, 1..6)
    }

    proptest! {
        #[test]
        fn mul_commutes(p in coeff_vec(), q in coeff_vec()) {
            let (p, q) = (Polynomial::new(p), Polynomial::new(q));
            let d = (&p * &q).distance_inf(&(&q * &p));
            prop_assert!(d < 1e-12);
        }

        #[test]
        fn mul_associates(p in coeff_vec(), q in coeff_vec(), r in coeff_vec()) {
            let (p, q, r) = (Polynomial::new(p), Polynomial::new(q), Polynomial::new(r));
            let lhs = &(&p * &q) * &r;
            let rhs = &p * &(&q * &r);
            let scale = lhs.max_abs().max(1.0);
            prop_assert!(lhs.distance_inf(&rhs) < 1e-12 * scale);
        }
    }
}
