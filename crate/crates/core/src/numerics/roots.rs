use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{NumericsError, Polynomial, TRIM_TOL};

/// Acceptance bound on `|p(r)| / max|cᵢ|` for every returned root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;

const SCHUR_MAX_ITER: usize = 10_000;
const POLISH_STEPS: usize = 3;

/// Roots in the z-plane of a polynomial stored in `z⁻¹` form.
///
/// `c₀ + c₁z⁻¹ + … + cₙz⁻ⁿ` is rewritten as `c₀zⁿ + c₁zⁿ⁻¹ + … + cₙ` and
/// rooted through the eigenvalues of its companion matrix. A zero trailing
/// coefficient yields a root at the origin; leading coefficients that vanish
/// (relative to `TRIM_TOL`) correspond to roots at infinity and are dropped.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>, NumericsError> {
    if p.is_zero() {
        return Err(NumericsError::ZeroPolynomial);
    }
    let scale = p.max_abs();
    let c: Vec<f64> = p.coeffs().iter().map(|c| c / scale).collect();
    let lead = c
        .iter()
        .position(|x| x.abs() >= TRIM_TOL)
        .expect("nonzero polynomial has a nonzero coefficient");
    let c = &c[lead..];
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut companion = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    let schur = Schur::try_new(companion, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(NumericsError::ConvergenceFailure)?;
    let eig = schur.complex_eigenvalues();

    let mut roots: Vec<Complex64> = eig.iter().map(|&z| polish(c, z)).collect();
    for r in &mut roots {
        if r.im.abs() <= 1e-14 * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    for r in &roots {
        if residual(c, *r) >= ROOT_RESIDUAL_TOL {
            return Err(NumericsError::ConvergenceFailure);
        }
    }
    roots.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    Ok(roots)
}

/// Roots of `c₀ + c₁x + … + cₙxⁿ` (ascending powers), e.g. a continuous
/// transfer-function polynomial in `s`.
pub fn roots_ascending(coeffs: &[f64]) -> Result<Vec<Complex64>, NumericsError> {
    let rev: Vec<f64> = coeffs.iter().rev().copied().collect();
    poly_roots(&Polynomial::structural(rev))
}

/// Horner evaluation of the positive-power form `c₀zⁿ + … + cₙ` and its
/// derivative.
fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &ci in c {
        der = der * z + val;
        val = val * z + ci;
    }
    (val, der)
}

/// Residual of a root of the max-normalized polynomial, measured in the
/// positive-power form inside the unit disc and in the `z⁻¹` form outside
/// it (so large roots are not penalized by `|z|ⁿ` growth).
fn residual(c: &[f64], z: Complex64) -> f64 {
    let n = (c.len() - 1) as i32;
    horner(c, z).0.norm() / z.norm().max(1.0).powi(n)
}

fn polish(c: &[f64], mut z: Complex64) -> Complex64 {
    let mut best = residual(c, z);
    for _ in 0..POLISH_STEPS {
        let (v, d) = horner(c, z);
        if d.norm() == 0.0 || best == 0.0 {
            break;
        }
        let next = z - v / d;
        let r = residual(c, next);
        if r < best {
            z = next;
            best = r;
        } else {
            break;
        }
    }
    z
}

/// Largest root modulus; zero for an empty root set.
pub fn max_modulus(roots: &[Complex64]) -> f64 {
    roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
