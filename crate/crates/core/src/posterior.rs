//! Normalising constants of the conjugate prior on a colored cone, posterior quotients and
//! model criteria.
//!
//! With structure constants `(r_i, d_i)` and blocks `x_i` of `Uᵀπ(D/2)U`,
//!
//! ```text
//! log I(δ, D) = −A(δ−2)/2 − B
//!             + Σ_i [−(δ+r_i−3)/2 − 1/d_i]·log Det(x_i)
//!             + Σ_i log Γ_i(1 + d_i(δ+r_i−3)/2)
//! A = Σ r_i d_i log d_i,   B = ½ Σ r_i (1 + (r_i−1)d_i/2) log d_i
//! log Γ_i(λ) = r_i(r_i−1)d_i/4 · log 2π + Σ_{k=1..r_i} log Γ(λ − (k−1)d_i/2)
//! ```
//!
//! The constant is relative to Lebesgue measure induced by the Frobenius inner product on
//! the colored space; only differences between subgroups matter downstream.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::colored::ColoredSpace;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_log_det, inverse_pd, is_positive_definite, Matrix, SymMatrix};
use crate::perm::{canonical_generator, CyclicSubgroup, Permutation};

/// Prior shape used when none is given.
pub const DEFAULT_DELTA: f64 = 3.0;

/// Observation count plus whether a mean was estimated (costing one degree of freedom).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSize {
    pub n: usize,
    pub mean_estimated: bool,
}

impl SampleSize {
    pub fn new(n: usize, mean_estimated: bool) -> Self {
        Self { n, mean_estimated }
    }

    pub fn n_eff(&self) -> usize {
        if self.mean_estimated {
            self.n.saturating_sub(1)
        } else {
            self.n
        }
    }
}

/// One posterior landscape: data summary plus hyperparameters.
#[derive(Clone, Debug)]
pub struct GipsModel {
    s: SymMatrix,
    size: SampleSize,
    delta: f64,
    d: SymMatrix,
    u: SymMatrix,
    d_plus_u: SymMatrix,
}

impl GipsModel {
    /// `s` is the empirical covariance; the scatter entering the posterior is `n_eff·s`.
    pub fn new(s: SymMatrix, size: SampleSize, delta: f64, d: SymMatrix) -> Result<Self> {
        let p = s.dim();
        if p == 0 {
            return Err(Error::InvalidArgument("empty covariance matrix".into()));
        }
        d.check_dim(p)?;
        if !(delta.is_finite() && delta > 1.0) {
            return Err(Error::InvalidHyperparameter(format!(
                "delta must be a finite number > 1, got {delta}"
            )));
        }
        if size.n_eff() < 1 {
            return Err(Error::TooFewObservations(format!(
                "n = {} leaves no degrees of freedom",
                size.n
            )));
        }
        if !is_positive_definite(&d) {
            return Err(Error::NotPositiveDefinite("hyperparameter D".into()));
        }
        let u = s.scaled(size.n_eff() as f64);
        let d_plus_u = d.add(&u)?;
        if !is_positive_definite(&d_plus_u) {
            return Err(Error::NotPositiveDefinite("D + U".into()));
        }
        Ok(Self {
            s,
            size,
            delta,
            d,
            u,
            d_plus_u,
        })
    }

    /// `δ = 3`, `D = tr(S)/p·I`.
    pub fn with_defaults(s: SymMatrix, size: SampleSize) -> Result<Self> {
        let (delta, d) = default_hyperparameters(&s)?;
        Self::new(s, size, delta, d)
    }

    /// Builds from an `n × p` data matrix with default hyperparameters.
    pub fn from_data(z: &Matrix, mean_known_zero: bool) -> Result<Self> {
        let (s, _) = crate::linalg::sample_covariance(z, mean_known_zero)?;
        Self::with_defaults(s, SampleSize::new(z.rows(), !mean_known_zero))
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn s(&self) -> &SymMatrix {
        &self.s
    }

    pub fn sample_size(&self) -> SampleSize {
        self.size
    }

    pub fn n(&self) -> usize {
        self.size.n
    }

    pub fn n_eff(&self) -> usize {
        self.size.n_eff()
    }

    pub fn mean_estimated(&self) -> bool {
        self.size.mean_estimated
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn d(&self) -> &SymMatrix {
        &self.d
    }

    /// Scatter `U = n_eff·S`.
    pub fn u(&self) -> &SymMatrix {
        &self.u
    }
}

/// Result of evaluating one subgroup.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorEvaluation {
    pub subgroup: CyclicSubgroup,
    /// `log I(δ+n_eff, D+U) − log I(δ, D)`.
    pub log_quotient: f64,
    pub n0: usize,
    pub dim: usize,
    pub mle_exists: bool,
}

/// `δ = 3` and `D = tr(S)/p·I`.
pub fn default_hyperparameters(s: &SymMatrix) -> Result<(f64, SymMatrix)> {
    let p = s.dim();
    let trace = s.trace();
    if !(trace > 0.0 && trace.is_finite()) {
        return Err(Error::InvalidHyperparameter(format!(
            "default D needs tr(S) > 0, got {trace}"
        )));
    }
    Ok((DEFAULT_DELTA, SymMatrix::scaled_identity(p, trace / p as f64)))
}

/// `log Γ_i(λ)` for a block with multiplicity `r` and division degree `d`.
pub fn log_multi_gamma_block(r: usize, d: usize, lambda: f64) -> Result<f64> {
    let half_d = d as f64 / 2.0;
    let mut total = (r * r.saturating_sub(1) * d) as f64 / 4.0 * (2.0 * std::f64::consts::PI).ln();
    for k in 1..=r {
        let argument = lambda - (k - 1) as f64 * half_d;
        if !(argument > 0.0) {
            return Err(Error::Divergent { k, argument });
        }
        total += ln_gamma(argument);
    }
    Ok(total)
}

/// `log I_⟨σ⟩(δ, D)`. `D` is projected onto the colored space of `σ` first.
pub fn log_norm_constant(sigma: &Permutation, delta: f64, d: &SymMatrix) -> Result<f64> {
    log_norm_constant_in(&ColoredSpace::new(sigma), delta, d)
}

/// [`log_norm_constant`] with a prebuilt colored space.
pub fn log_norm_constant_in(space: &ColoredSpace, delta: f64, d: &SymMatrix) -> Result<f64> {
    if !(delta.is_finite() && delta > 1.0) {
        return Err(Error::InvalidHyperparameter(format!(
            "delta must be a finite number > 1, got {delta}"
        )));
    }
    if !is_positive_definite(d) {
        return Err(Error::NotPositiveDefinite("D".into()));
    }
    let decomposition = space.block_decompose(&d.scaled(0.5))?;
    let constants = space.constants();

    let mut a = 0.0;
    let mut b = 0.0;
    let mut total = 0.0;
    for (i, block) in decomposition.blocks.iter().enumerate() {
        let (r, dd) = (constants.r[i], constants.d[i]);
        let (r_f, d_f) = (r as f64, dd as f64);
        let log_d = d_f.ln();
        a += r_f * d_f * log_d;
        b += 0.5 * r_f * (1.0 + (r_f - 1.0) * d_f / 2.0) * log_d;

        let log_det = cholesky_log_det(block).map_err(|_| {
            Error::NotPositiveDefinite(format!("block {} of the projected D/2", i + 1))
        })?;
        total += (-(delta + r_f - 3.0) / 2.0 - 1.0 / d_f) * log_det;
        total += log_multi_gamma_block(r, dd, 1.0 + d_f * (delta + r_f - 3.0) / 2.0)?;
    }
    Ok(total - a * (delta - 2.0) / 2.0 - b)
}

/// `log I(δ+n_eff, D+U) − log I(δ, D)` for `⟨σ⟩`, evaluated at its canonical generator
/// so every generator of the same group yields the same bits.
pub fn log_posterior_quotient(model: &GipsModel, sigma: &Permutation) -> Result<PosteriorEvaluation> {
    if sigma.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: sigma.dim(),
        });
    }
    let subgroup = canonical_generator(sigma);
    evaluate_subgroup(model, &subgroup)
}

/// Posterior quotient of an already canonical subgroup.
pub fn evaluate_subgroup(model: &GipsModel, subgroup: &CyclicSubgroup) -> Result<PosteriorEvaluation> {
    let space = ColoredSpace::new(subgroup.generator());
    let posterior = log_norm_constant_in(
        &space,
        model.delta + model.n_eff() as f64,
        &model.d_plus_u,
    )?;
    let prior = log_norm_constant_in(&space, model.delta, &model.d)?;
    Ok(PosteriorEvaluation {
        subgroup: subgroup.clone(),
        log_quotient: posterior - prior,
        n0: space.n0(),
        dim: space.dimension(),
        mle_exists: model.n_eff() >= space.n0(),
    })
}

/// Probabilities proportional to `exp(log_weights)`, via a max-shifted softmax.
pub fn softmax(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Exact posterior probabilities over `subgroups` (normally the full enumeration), in the
/// input order.
pub fn exact_posterior_probabilities(
    model: &GipsModel,
    subgroups: &[CyclicSubgroup],
) -> Result<Vec<(CyclicSubgroup, f64)>> {
    if subgroups.is_empty() {
        return Err(Error::InvalidArgument("no subgroups to normalise over".into()));
    }
    let evaluations: Vec<PosteriorEvaluation> = subgroups
        .par_iter()
        .map(|g| evaluate_subgroup(model, g))
        .collect::<Result<_>>()?;
    Ok(probabilities_from_evaluations(&evaluations))
}

pub fn probabilities_from_evaluations(
    evaluations: &[PosteriorEvaluation],
) -> Vec<(CyclicSubgroup, f64)> {
    let logs: Vec<f64> = evaluations.iter().map(|e| e.log_quotient).collect();
    evaluations
        .iter()
        .map(|e| e.subgroup.clone())
        .zip(softmax(&logs))
        .collect()
}

/// Posterior odds `P(⟨a⟩ | data) / P(⟨b⟩ | data)`.
pub fn compare_posteriors(model: &GipsModel, a: &Permutation, b: &Permutation) -> Result<f64> {
    let la = log_posterior_quotient(model, a)?.log_quotient;
    let lb = log_posterior_quotient(model, b)?.log_quotient;
    Ok((la - lb).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCriteria {
    pub log_lik: f64,
    pub bic: f64,
    pub aic: f64,
    /// Free parameters, the colored-space dimension.
    pub k: usize,
}

/// Gaussian log-likelihood at `Σ̂ = π(S)` and the derived BIC/AIC.
///
/// The centred data are treated as `n_eff` zero-mean observations with scatter `n_eff·S`:
/// `log L = −(n_eff/2)·[p·log 2π + log Det Σ̂ + tr(Σ̂⁻¹S)]`. The BIC penalty uses the
/// raw `n`.
pub fn model_criteria(model: &GipsModel, sigma: &Permutation) -> Result<ModelCriteria> {
    let space = ColoredSpace::new(sigma);
    let n_eff = model.n_eff();
    if n_eff < space.n0() {
        return Err(Error::MleDoesNotExist {
            n_eff,
            n0: space.n0(),
        });
    }
    let sigma_hat = space.project(model.s())?;
    gaussian_criteria(&sigma_hat, model.s(), n_eff, model.n(), space.dimension())
}

pub(crate) fn gaussian_criteria(
    sigma_hat: &SymMatrix,
    s: &SymMatrix,
    n_eff: usize,
    n: usize,
    k: usize,
) -> Result<ModelCriteria> {
    let p = s.dim();
    let log_det = cholesky_log_det(sigma_hat)
        .map_err(|_| Error::NotPositiveDefinite("projected covariance".into()))?;
    let inv = inverse_pd(sigma_hat)?;
    let trace: f64 = (0..p)
        .map(|i| (0..p).map(|j| inv.get(i, j) * s.get(j, i)).sum::<f64>())
        .sum();
    let log_lik = -(n_eff as f64) / 2.0
        * (p as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + trace);
    let k_f = k as f64;
    Ok(ModelCriteria {
        log_lik,
        bic: -2.0 * log_lik + k_f * (n as f64).ln(),
        aic: -2.0 * log_lik + 2.0 * k_f,
        k,
    })
}
