//! Estimation after a subgroup has been chosen: the symmetry-constrained MLE and the
//! partial-correlation graph heuristic.

use serde::{Deserialize, Serialize};

use crate::colored::ColoredSpace;
use crate::error::{Error, Result};
use crate::linalg::{inverse_pd, SymMatrix};
use crate::perm::{CyclicSubgroup, Permutation};
use crate::posterior::{gaussian_criteria, ModelCriteria, SampleSize};

#[derive(Clone, Debug)]
pub struct EstimationReport {
    /// `π_⟨σ⟩(S)`.
    pub sigma_hat: SymMatrix,
    pub subgroup: CyclicSubgroup,
    pub n0: usize,
    pub n_eff: usize,
    pub mle_exists: bool,
    pub dim: usize,
    /// Present when the MLE exists and `sigma_hat` is positive definite.
    pub criteria: Option<ModelCriteria>,
}

/// The MLE of the covariance under `⟨σ⟩`-invariance is the projection of `S`. It exists
/// (is positive definite almost surely) iff `n_eff ≥ n₀`; when it does not, the projection
/// is still returned as a regulariser and `mle_exists` is false.
///
/// Takes the full [`SampleSize`] because the BIC penalty uses the raw `n`.
pub fn mle_covariance(s: &SymMatrix, sigma: &Permutation, size: SampleSize) -> Result<EstimationReport> {
    let space = ColoredSpace::new(sigma);
    let sigma_hat = space.project(s)?;
    let n_eff = size.n_eff();
    let mle_exists = n_eff >= space.n0();
    let criteria = if mle_exists {
        gaussian_criteria(&sigma_hat, s, n_eff, size.n, space.dimension()).ok()
    } else {
        None
    };
    Ok(EstimationReport {
        sigma_hat,
        subgroup: space.subgroup().clone(),
        n0: space.n0(),
        n_eff,
        mle_exists,
        dim: space.dimension(),
        criteria,
    })
}

/// An edge `{i, j}` (0-based, `i < j`) with its partial correlation
/// `−k_ij / √(k_ii k_jj)`, `K = Σ̂⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub partial_correlation: f64,
}

/// All pairs with `|partial correlation| ≥ α`.
pub fn threshold_partial_correlations(sigma_hat: &SymMatrix, alpha: f64) -> Result<Vec<Edge>> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be a non-negative number, got {alpha}"
        )));
    }
    let k = inverse_pd(sigma_hat)
        .map_err(|_| Error::NotPositiveDefinite("covariance passed to thresholding".into()))?;
    let p = k.dim();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            let rho = -k.get(i, j) / (k.get(i, i) * k.get(j, j)).sqrt();
            if rho.abs() >= alpha {
                edges.push(Edge {
                    i,
                    j,
                    partial_correlation: rho,
                });
            }
        }
    }
    Ok(edges)
}

/// `i,j,partial_correlation` rows with 1-based indices.
pub fn edges_to_csv(edges: &[Edge]) -> String {
    let mut out = String::from("i,j,partial_correlation\n");
    for e in edges {
        out.push_str(&format!("{},{},{}\n", e.i + 1, e.j + 1, e.partial_correlation));
    }
    out
}

/// Adjacency-list form of an edge set, 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjacency {
    pub p: usize,
    pub alpha: f64,
    pub edge_count: usize,
    pub edges: Vec<[usize; 2]>,
    /// `neighbours[v-1]` lists the neighbours of variable `v`.
    pub neighbours: Vec<Vec<usize>>,
}

pub fn adjacency(p: usize, alpha: f64, edges: &[Edge]) -> Adjacency {
    let mut neighbours = vec![Vec::new(); p];
    for e in edges {
        neighbours[e.i].push(e.j + 1);
        neighbours[e.j].push(e.i + 1);
    }
    for list in &mut neighbours {
        list.sort_unstable();
    }
    Adjacency {
        p,
        alpha,
        edge_count: edges.len(),
        edges: edges.iter().map(|e| [e.i + 1, e.j + 1]).collect(),
        neighbours,
    }
}
