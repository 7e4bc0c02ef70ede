use nalgebra::DMatrix;

use super::{diophantine, CarimaModel, DiophantineTable, GpcConfig, GpcError};
use crate::numerics::{convolve, DiscreteTf, Polynomial};

/// Prediction structure `ŷ = G·ũ + F·y(k) + G′·Δu(k−1)` before the gain is
/// computed.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrices {
    pub config: GpcConfig,
    pub plant: DiscreteTf,
    pub model: CarimaModel,
    /// Step-response coefficients `g₀ … g_{P−1}`.
    pub step: Vec<f64>,
    /// `P × N_u` lower-triangular Toeplitz matrix of step coefficients.
    pub g_matrix: DMatrix<f64>,
    /// `F_{d+j}` for `j = 1..=P`, applied to `[y(k), y(k−1), …]`.
    pub f_polys: Vec<Polynomial>,
    /// Past-input part of `G_{d+j} = E_{d+j}·B`, applied to
    /// `[Δu(k−1), Δu(k−2), …]`.
    pub gprime_polys: Vec<Polynomial>,
}

/// A synthesized controller: prediction structure plus the receding-horizon
/// gain row `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpcSynthesis {
    pub matrices: PredictionMatrices,
    pub k_row: Vec<f64>,
}

impl GpcSynthesis {
    pub fn config(&self) -> &GpcConfig {
        &self.matrices.config
    }

    pub fn plant(&self) -> &DiscreteTf {
        &self.matrices.plant
    }

    pub fn model(&self) -> &CarimaModel {
        &self.matrices.model
    }

    pub fn f_polys(&self) -> &[Polynomial] {
        &self.matrices.f_polys
    }

    pub fn gprime_polys(&self) -> &[Polynomial] {
        &self.matrices.gprime_polys
    }

    pub fn g_matrix(&self) -> &DMatrix<f64> {
        &self.matrices.g_matrix
    }

    /// Number of past outputs the free response reads.
    pub fn y_history_len(&self) -> usize {
        self.f_polys()
            .iter()
            .map(|p| p.coeffs().len())
            .max()
            .unwrap_or(1)
    }

    /// Number of past increments the free response reads.
    pub fn du_history_len(&self) -> usize {
        self.gprime_polys()
            .iter()
            .map(|p| p.coeffs().len())
            .max()
            .unwrap_or(0)
    }

    /// `R(z⁻¹) = 1 + z⁻¹·Σ kⱼ·G′ⱼ(z⁻¹)`, the increment-side controller
    /// polynomial.
    pub fn r_poly(&self) -> Polynomial {
        let mut r = vec![0.0; self.du_history_len() + 1];
        r[0] = 1.0;
        for (k, gp) in self.k_row.iter().zip(self.gprime_polys()) {
            for (i, c) in gp.coeffs().iter().enumerate() {
                r[i + 1] += k * c;
            }
        }
        Polynomial::structural(r)
    }

    /// `S(z⁻¹) = Σ kⱼ·Fⱼ(z⁻¹)`, the output-feedback polynomial.
    pub fn s_poly(&self) -> Polynomial {
        let mut s = vec![0.0; self.y_history_len()];
        for (k, f) in self.k_row.iter().zip(self.f_polys()) {
            for (i, c) in f.coeffs().iter().enumerate() {
                s[i] += k * c;
            }
        }
        Polynomial::structural(s)
    }

    /// `T = Σ kⱼ`, the reference gain for a constant future setpoint.
    pub fn t_gain(&self) -> f64 {
        self.k_row.iter().sum()
    }
}

/// Build `G`, `F` and `G′` from the Diophantine table.
pub fn prediction_matrices(
    plant: &DiscreteTf,
    table: &DiophantineTable,
    cfg: &GpcConfig,
) -> Result<PredictionMatrices, GpcError> {
    cfg.validate()?;
    let p = cfg.horizon_p;
    let d = cfg.delay_d;
    if table.len() < p + d {
        return Err(GpcError::DimensionMismatch {
            need: p + d,
            have: table.len(),
        });
    }
    let model = CarimaModel::from_discrete(plant, d);
    let mut f_polys = Vec::with_capacity(p);
    let mut gprime_polys = Vec::with_capacity(p);
    let mut last_forced = Vec::new();
    for j in 1..=p {
        let g_j = convolve(table.e_j(d + j).coeffs(), model.b.coeffs());
        let (forced, past) = g_j.split_at(j.min(g_j.len()));
        f_polys.push(table.f_j(d + j).clone());
        gprime_polys.push(Polynomial::structural(past.to_vec()));
        last_forced = forced.to_vec();
    }
    let mut step = last_forced;
    step.resize(p, 0.0);

    let nu = cfg.horizon_nu;
    let g_matrix = DMatrix::from_fn(p, nu, |i, c| if i >= c { step[i - c] } else { 0.0 });
    Ok(PredictionMatrices {
        config: *cfg,
        plant: plant.clone(),
        model,
        step,
        g_matrix,
        f_polys,
        gprime_polys,
    })
}

/// First row of `(δGᵀG + λI)⁻¹·δGᵀ`.
pub fn gain(pm: PredictionMatrices) -> Result<GpcSynthesis, GpcError> {
    let cfg = pm.config;
    let k_row = if cfg.horizon_nu == 1 {
        scalar_gain(&pm.step, cfg.lambda, cfg.delta_w)?
    } else {
        matrix_gain(&pm.g_matrix, cfg.lambda, cfg.delta_w)?
    };
    Ok(GpcSynthesis {
        matrices: pm,
        k_row,
    })
}

fn scalar_gain(g: &[f64], lambda: f64, delta: f64) -> Result<Vec<f64>, GpcError> {
    let gg: f64 = g.iter().map(|x| x * x).sum();
    let den = delta * gg + lambda;
    if !(den > f64::EPSILON * (delta * gg).max(lambda).max(f64::MIN_POSITIVE)) {
        return Err(GpcError::SingularNormalMatrix);
    }
    Ok(g.iter().map(|x| delta * x / den).collect())
}

fn matrix_gain(g: &DMatrix<f64>, lambda: f64, delta: f64) -> Result<Vec<f64>, GpcError> {
    let nu = g.ncols();
    let normal = g.transpose() * g * delta + DMatrix::identity(nu, nu) * lambda;
    let chol = normal.cholesky().ok_or(GpcError::SingularNormalMatrix)?;
    let solved = chol.solve(&(g.transpose() * delta));
    if solved.iter().any(|x| !x.is_finite()) {
        return Err(GpcError::SingularNormalMatrix);
    }
    Ok(solved.row(0).iter().copied().collect())
}

/// Discrete plant → CARIMA model → Diophantine table → prediction matrices
/// → gain.
pub fn synthesize(plant: &DiscreteTf, cfg: &GpcConfig) -> Result<GpcSynthesis, GpcError> {
    cfg.validate()?;
    let model = CarimaModel::from_discrete(plant, cfg.delay_d);
    let table = diophantine(&model.a_tilde(), cfg.horizon_p + cfg.delay_d)?;
    gain(prediction_matrices(plant, &table, cfg)?)
}
