use super::GpcError;
use crate::numerics::Polynomial;

/// `E_j`, `F_j` for `j = 1..=P` with `1 = E_j·Ã + z⁻ʲ·F_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineTable {
    pub e: Vec<Polynomial>,
    pub f: Vec<Polynomial>,
}

impl DiophantineTable {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// `E_j` for 1-based `j`.
    pub fn e_j(&self, j: usize) -> &Polynomial {
        &self.e[j - 1]
    }

    /// `F_j` for 1-based `j`.
    pub fn f_j(&self, j: usize) -> &Polynomial {
        &self.f[j - 1]
    }

    /// `‖E_j·Ã + z⁻ʲ·F_j − 1‖∞`
    pub fn residual(&self, a_tilde: &Polynomial, j: usize) -> f64 {
        let ea = crate::numerics::convolve(self.e_j(j).coeffs(), a_tilde.coeffs());
        let zf = self.f_j(j).shift(j);
        let n = ea.len().max(zf.coeffs().len());
        (0..n)
            .map(|i| {
                let one = if i == 0 { 1.0 } else { 0.0 };
                (ea.get(i).copied().unwrap_or(0.0) + zf.coeff(i) - one).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solve the Diophantine identities recursively.
///
/// `E₁ = 1`, `F₁ = z(1 − Ã)`; each further step appends `f_{j,0}·z⁻ʲ` to `E`
/// and sets `F_{j+1} = z(F_j − f_{j,0}·Ã)`. `E_j` has `j` coefficients and
/// `F_j` has `deg Ã` coefficients, kept at full length.
pub fn diophantine(a_tilde: &Polynomial, horizon: usize) -> Result<DiophantineTable, GpcError> {
    let at = a_tilde.coeffs();
    if at[0] != 1.0 {
        return Err(GpcError::NotMonic(at[0]));
    }
    let n = at.len() - 1;
    let mut e_coeffs = Vec::with_capacity(horizon);
    let mut table = DiophantineTable {
        e: Vec::with_capacity(horizon),
        f: Vec::with_capacity(horizon),
    };
    if horizon == 0 {
        return Ok(table);
    }
    // F₁ = z(1 − Ã): f_{1,i} = −ã_{i+1}.
    let mut f: Vec<f64> = (0..n).map(|i| -at[i + 1]).collect();
    e_coeffs.push(1.0);
    table.e.push(Polynomial::structural(e_coeffs.clone()));
    table.f.push(Polynomial::structural(f.clone()));
    for _ in 1..horizon {
        let lead = f.first().copied().unwrap_or(0.0);
        e_coeffs.push(lead);
        f = (0..n)
            .map(|i| f.get(i + 1).copied().unwrap_or(0.0) - lead * at[i + 1])
            .collect();
        table.e.push(Polynomial::structural(e_coeffs.clone()));
        table.f.push(Polynomial::structural(f.clone()));
    }
    Ok(table)
}
