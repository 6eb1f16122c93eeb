//! Synthetic scenarios with a planted symmetry: a Wishart draw projected onto the colored
//! space of `σ_true`, then Gaussian rows sampled from it.
//!
//! Randomness comes from `ChaCha20Rng::seed_from_u64(seed)` and `rand_distr::StandardNormal`.
//! The Wishart vectors are drawn first (row by row), then the data rows.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::colored::project;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, is_positive_definite, Matrix, SymMatrix};
use crate::perm::Permutation;

/// First ridge tried when the projected draw is not positive definite; doubled until it is.
pub const INITIAL_RIDGE: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct Scenario {
    /// `π(W) + ε·I`.
    pub sigma_true: SymMatrix,
    /// `n × p` sample from `N(0, sigma_true)`.
    pub data: Matrix,
    /// `ε` added to restore positive definiteness, if any.
    pub ridge: Option<f64>,
    pub wishart_shape: usize,
}

/// `W = Σ_{k ≤ shape} g_k g_kᵀ` with standard normal `g_k`.
pub fn wishart_identity<R: rand::Rng + ?Sized>(rng: &mut R, p: usize, shape: usize) -> SymMatrix {
    let mut w = SymMatrix::zeros(p);
    let mut g = vec![0.0; p];
    for _ in 0..shape {
        for x in g.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        for i in 0..p {
            for j in 0..=i {
                w.set(i, j, w.get(i, j) + g[i] * g[j]);
            }
        }
    }
    w
}

/// Rows `L z` with `Σ = LLᵀ` and `z` standard normal.
pub fn sample_gaussian<R: rand::Rng + ?Sized>(rng: &mut R, sigma: &SymMatrix, n: usize) -> Result<Matrix> {
    let p = sigma.dim();
    let l = cholesky(sigma)?;
    let mut data = Matrix::zeros(n, p);
    let mut z = vec![0.0; p];
    for row in 0..n {
        for x in z.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        for i in 0..p {
            data[(row, i)] = (0..=i).map(|k| l[(i, k)] * z[k]).sum();
        }
    }
    Ok(data)
}

/// Draws a scenario. `shape` defaults to `p`.
pub fn simulate_scenario(
    sigma_true: &Permutation,
    n: usize,
    seed: u64,
    shape: Option<usize>,
) -> Result<Scenario> {
    let p = sigma_true.dim();
    if p == 0 || n == 0 {
        return Err(Error::InvalidArgument("simulation needs p >= 1 and n >= 1".into()));
    }
    let shape = shape.unwrap_or(p);
    if shape == 0 {
        return Err(Error::InvalidArgument("Wishart shape must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let w = wishart_identity(&mut rng, p, shape);
    let mut target = project(&w, sigma_true)?;
    let mut ridge = None;
    if !is_positive_definite(&target) {
        let mut eps = INITIAL_RIDGE;
        loop {
            let candidate = target.add(&SymMatrix::scaled_identity(p, eps))?;
            if is_positive_definite(&candidate) {
                target = candidate;
                ridge = Some(eps);
                break;
            }
            eps *= 2.0;
        }
    }
    let data = sample_gaussian(&mut rng, &target, n)?;
    Ok(Scenario {
        sigma_true: target,
        data,
        ridge,
        wishart_shape: shape,
    })
}
