//! Closed-loop pole analysis of the GPC loop: characteristic polynomial,
//! verdicts, minimum-horizon search and parameter sweeps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gpc::{synthesize, GpcConfig, GpcError, GpcSynthesis};
use crate::numerics::{convolve, max_modulus, poly_roots, NumericsError, Polynomial};
use crate::plant::{discrete_plant, ConverterParams, PlantError, PlantModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("no stable prediction horizon in 1..={p_max}")]
    NoStableHorizon { p_max: usize },
    #[error(
        "horizon {horizon} is stable at the worst-case corner but not at R = {r} Ω, vo_ref = {vo_ref} V"
    )]
    CornerDominanceViolated { horizon: usize, r: f64, vo_ref: f64 },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("invalid stability margin {0}, need 0 ≤ margin < 1")]
    InvalidMargin(f64),
    #[error(transparent)]
    Gpc(#[from] GpcError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Characteristic polynomial in `z⁻¹`, kept at its structural length.
    pub char_poly: Polynomial,
    /// Closed-loop poles sorted by decreasing modulus.
    pub poles: Vec<Complex64>,
    pub max_modulus: f64,
    pub stable: bool,
    pub margin: f64,
}

impl StabilityReport {
    /// Number of poles with a nonzero imaginary part.
    pub fn complex_pole_count(&self) -> usize {
        self.poles.iter().filter(|p| p.im != 0.0).count()
    }

    /// Smallest pole modulus (the origin pole when present).
    pub fn min_modulus(&self) -> f64 {
        self.poles
            .iter()
            .map(|p| p.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `D(z⁻¹) = ΔA·R + z⁻¹⁻ᵈ·B·S`.
///
/// No trailing coefficients are trimmed: the last coefficient cancels
/// analytically for `N_u = 1`, and the resulting pole at the origin is part
/// of the loop.
pub fn closed_loop_charpoly(syn: &GpcSynthesis) -> Polynomial {
    let model = syn.model();
    let lhs = convolve(model.a_tilde().coeffs(), syn.r_poly().coeffs());
    let bs = convolve(model.b.coeffs(), syn.s_poly().coeffs());
    let lag = 1 + model.delay;
    let n = lhs.len().max(bs.len() + lag);
    let mut d = vec![0.0; n];
    for (i, c) in lhs.iter().enumerate() {
        d[i] += c;
    }
    for (i, c) in bs.iter().enumerate() {
        d[i + lag] += c;
    }
    Polynomial::structural(d)
}

fn check_margin(margin: f64) -> Result<(), StabilityError> {
    if (0.0..1.0).contains(&margin) {
        Ok(())
    } else {
        Err(StabilityError::InvalidMargin(margin))
    }
}

/// Poles and verdict. Stable iff every pole modulus is below `1 − margin`;
/// a modulus of exactly one is unstable.
pub fn assess(syn: &GpcSynthesis, margin: f64) -> Result<StabilityReport, StabilityError> {
    check_margin(margin)?;
    let char_poly = closed_loop_charpoly(syn);
    let poles = poly_roots(&char_poly)?;
    let max_modulus = max_modulus(&poles);
    Ok(StabilityReport {
        char_poly,
        poles,
        max_modulus,
        stable: max_modulus < 1.0 - margin,
        margin,
    })
}

/// Build the discrete plant, synthesize and assess in one go.
pub fn assess_design(
    params: &ConverterParams,
    cfg: &GpcConfig,
    model: &PlantModel,
    margin: f64,
) -> Result<StabilityReport, StabilityError> {
    let plant = discrete_plant(params, model)?;
    let syn = synthesize(&plant, cfg)?;
    assess(&syn, margin)
}

/// Smallest stable `P` in `1..=p_max`, scanning upward. Every field of `cfg`
/// except `horizon_p` is used as given; `horizon_nu` is capped at `P`.
pub fn min_horizon(
    params: &ConverterParams,
    cfg: &GpcConfig,
    p_max: usize,
    model: &PlantModel,
    margin: f64,
) -> Result<usize, StabilityError> {
    check_margin(margin)?;
    params.validate()?;
    let plant = discrete_plant(params, model)?;
    for p in 1..=p_max {
        let mut c = cfg.with_horizon(p);
        c.horizon_nu = c.horizon_nu.min(p);
        let syn = synthesize(&plant, &c)?;
        if assess(&syn, margin)?.stable {
            return Ok(p);
        }
    }
    Err(StabilityError::NoStableHorizon { p_max })
}

/// Cartesian grid over `P`, `λ`, `R` and `vo_ref`. Each axis must be
/// nonempty and strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub horizon_p: Vec<usize>,
    pub lambda: Vec<f64>,
    pub r: Vec<f64>,
    pub vo_ref: Vec<f64>,
}

impl SweepGrid {
    /// Single point at the given parameters and configuration.
    pub fn point(params: &ConverterParams, cfg: &GpcConfig) -> Self {
        Self {
            horizon_p: vec![cfg.horizon_p],
            lambda: vec![cfg.lambda],
            r: vec![params.r],
            vo_ref: vec![params.vo_ref],
        }
    }

    pub fn len(&self) -> usize {
        self.horizon_p.len() * self.lambda.len() * self.r.len() * self.vo_ref.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), StabilityError> {
        fn increasing<T: PartialOrd + Copy>(name: &str, v: &[T]) -> Result<(), StabilityError> {
            if v.is_empty() {
                return Err(StabilityError::InvalidGrid(format!(
                    "axis `{name}` is empty"
                )));
            }
            if v.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(StabilityError::InvalidGrid(format!(
                    "axis `{name}` is not strictly increasing"
                )));
            }
            Ok(())
        }
        increasing("P", &self.horizon_p)?;
        increasing("lambda", &self.lambda)?;
        increasing("R", &self.r)?;
        increasing("vref", &self.vo_ref)
    }

    /// Grid point at a flat index; `vo_ref` varies fastest, `P` slowest.
    fn at(&self, idx: usize) -> (usize, f64, f64, f64) {
        let nv = self.vo_ref.len();
        let nr = self.r.len();
        let nl = self.lambda.len();
        let v = idx % nv;
        let r = (idx / nv) % nr;
        let l = (idx / (nv * nr)) % nl;
        let p = idx / (nv * nr * nl);
        (self.horizon_p[p], self.lambda[l], self.r[r], self.vo_ref[v])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub horizon_p: usize,
    pub lambda: f64,
    pub r: f64,
    pub vo_ref: f64,
    pub result: Result<StabilityReport, StabilityError>,
}

impl SweepRecord {
    pub fn max_modulus(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.max_modulus)
    }

    pub fn stable(&self) -> Option<bool> {
        self.result.as_ref().ok().map(|r| r.stable)
    }
}

/// Assess every grid point independently. Points are evaluated in parallel;
/// records come back in grid order. A failure at one point is stored in that
/// record and does not stop the sweep.
pub fn sweep(
    params: &ConverterParams,
    base: &GpcConfig,
    grid: &SweepGrid,
    model: &PlantModel,
    margin: f64,
) -> Result<Vec<SweepRecord>, StabilityError> {
    grid.validate()?;
    check_margin(margin)?;
    let records = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (p, lambda, r, vo_ref) = grid.at(idx);
            let pt = params.with_load(r).with_vo_ref(vo_ref);
            let mut cfg = base.with_horizon(p).with_lambda(lambda);
            cfg.horizon_nu = cfg.horizon_nu.min(p);
            SweepRecord {
                horizon_p: p,
                lambda,
                r,
                vo_ref,
                result: pt
                    .validate()
                    .map_err(StabilityError::from)
                    .and_then(|_| assess_design(&pt, &cfg, model, margin)),
            }
        })
        .collect();
    Ok(records)
}

/// Result of a worst-case-corner design.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustHorizon {
    pub horizon: usize,
    /// `(R, vo_ref, report)` for each distinct corner at the chosen horizon.
    pub corners: Vec<(f64, f64, StabilityReport)>,
}

/// Minimum horizon at the corner of lightest load resistance and highest
/// reference, checked afterwards against every corner of the box.
pub fn robust_horizon(
    params: &ConverterParams,
    r_range: (f64, f64),
    vref_range: (f64, f64),
    cfg: &GpcConfig,
    p_max: usize,
    model: &PlantModel,
    margin: f64,
) -> Result<RobustHorizon, StabilityError> {
    for (name, (lo, hi)) in [("R", r_range), ("vref", vref_range)] {
        if !(lo <= hi) {
            return Err(StabilityError::InvalidGrid(format!(
                "{name} interval [{lo}, {hi}] is empty"
            )));
        }
    }
    let worst = params.with_load(r_range.0).with_vo_ref(vref_range.1);
    let horizon = min_horizon(&worst, cfg, p_max, model, margin)?;
    let mut c = cfg.with_horizon(horizon);
    c.horizon_nu = c.horizon_nu.min(horizon);

    let mut corners = Vec::new();
    for r in dedup([r_range.0, r_range.1]) {
        for v in dedup([vref_range.0, vref_range.1]) {
            let pt = params.with_load(r).with_vo_ref(v);
            pt.validate()?;
            let report = assess_design(&pt, &c, model, margin)?;
            if !report.stable {
                return Err(StabilityError::CornerDominanceViolated {
                    horizon,
                    r,
                    vo_ref: v,
                });
            }
            corners.push((r, v, report));
        }
    }
    Ok(RobustHorizon { horizon, corners })
}

fn dedup(v: [f64; 2]) -> Vec<f64> {
    if v[0] == v[1] {
        vec![v[0]]
    } else {
        v.to_vec()
    }
}
