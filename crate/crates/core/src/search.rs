//! Exploring the space of cyclic subgroups: exhaustive enumeration, the
//! Metropolis–Hastings chain over permutations, and steepest-ascent hill climbing.
//!
//! All chains use `ChaCha20Rng::seed_from_u64(seed)` (rand_chacha 0.9). Each step draws
//! one transposition index with `random_range(0..p(p−1)/2)` and then one `f64` in `[0,1)`
//! for the acceptance test, in that order. Changing any of this changes every trace.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{
    canonical_generator, count_cyclic_subgroups, enumerate_cyclic_subgroups_with_limit,
    CyclicSubgroup, Permutation, DEFAULT_ENUMERATION_LIMIT,
};
use crate::posterior::{evaluate_subgroup, GipsModel, PosteriorEvaluation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Optimizer {
    BruteForce,
    MetropolisHastings,
    HillClimbing,
}

impl Optimizer {
    /// Short name used on the command line: `bf`, `mh`, `hc`.
    pub fn code(self) -> &'static str {
        match self {
            Optimizer::BruteForce => "bf",
            Optimizer::MetropolisHastings => "mh",
            Optimizer::HillClimbing => "hc",
        }
    }

    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "bf" | "brute_force" | "BF" => Ok(Optimizer::BruteForce),
            "mh" | "metropolis_hastings" | "MH" => Ok(Optimizer::MetropolisHastings),
            "hc" | "hill_climbing" | "HC" => Ok(Optimizer::HillClimbing),
            other => Err(Error::InvalidArgument(format!(
                "unknown optimizer {other:?} (expected bf, mh or hc)"
            ))),
        }
    }

    /// `bf` up to the enumeration limit, `mh` beyond.
    pub fn default_for(p: usize) -> Self {
        if p <= DEFAULT_ENUMERATION_LIMIT {
            Optimizer::BruteForce
        } else {
            Optimizer::MetropolisHastings
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub optimizer: Optimizer,
    pub best: PosteriorEvaluation,
    pub start: PosteriorEvaluation,
    /// Posterior quotients requested, cache hits included.
    pub evaluations: usize,
    /// Visited permutations: `σ_1..σ_T` for a chain, every canonical generator for brute
    /// force. Present only when requested.
    pub trace: Option<Vec<Permutation>>,
    /// Every subgroup with its quotient, in enumeration order (brute force only).
    pub landscape: Option<Vec<PosteriorEvaluation>>,
    /// Accepted states, starting point first (hill climbing only).
    pub path: Option<Vec<PosteriorEvaluation>>,
    pub acceptance_rate: Option<f64>,
    pub wall_time: Duration,
    /// Non-fatal notes, e.g. an iteration budget larger than the model space.
    pub diagnostics: Vec<String>,
}

/// Snapshot handed to progress callbacks.
#[derive(Clone, Copy, Debug)]
pub struct Progress<'a> {
    pub done: usize,
    pub total: usize,
    pub best: &'a PosteriorEvaluation,
}

/// Memoised posterior evaluation keyed by canonical subgroup.
pub struct PosteriorCache<'a> {
    model: &'a GipsModel,
    cache: HashMap<CyclicSubgroup, PosteriorEvaluation>,
    requests: usize,
}

impl<'a> PosteriorCache<'a> {
    pub fn new(model: &'a GipsModel) -> Self {
        Self {
            model,
            cache: HashMap::new(),
            requests: 0,
        }
    }

    pub fn evaluate(&mut self, sigma: &Permutation) -> Result<PosteriorEvaluation> {
        self.requests += 1;
        let key = canonical_generator(sigma);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let value = evaluate_subgroup(self.model, &key)?;
        self.cache.insert(key, value.clone());
        Ok(value)
    }

    pub fn requests(&self) -> usize {
        self.requests
    }

    /// Distinct subgroups actually computed.
    pub fn distinct(&self) -> usize {
        self.cache.len()
    }
}

/// Exhaustive search with the default enumeration limit.
pub fn brute_force(model: &GipsModel, save_all: bool) -> Result<SearchResult> {
    brute_force_with_limit(model, save_all, DEFAULT_ENUMERATION_LIMIT)
}

/// Evaluates every cyclic subgroup once, in parallel. The best is the largest quotient,
/// ties going to the smallest canonical generator; the result does not depend on the
/// number of worker threads.
pub fn brute_force_with_limit(
    model: &GipsModel,
    save_all: bool,
    limit: usize,
) -> Result<SearchResult> {
    let started = Instant::now();
    let p = model.dim();
    let subgroups = enumerate_cyclic_subgroups_with_limit(p, limit)?;
    let landscape: Vec<PosteriorEvaluation> = subgroups
        .par_iter()
        .map(|g| evaluate_subgroup(model, g))
        .collect::<Result<_>>()?;

    let mut best = &landscape[0];
    for e in &landscape[1..] {
        if e.log_quotient > best.log_quotient {
            best = e;
        }
    }
    // subgroups[0] is the trivial group
    let start = landscape[0].clone();
    Ok(SearchResult {
        optimizer: Optimizer::BruteForce,
        best: best.clone(),
        start,
        evaluations: landscape.len(),
        trace: save_all.then(|| subgroups.iter().map(|g| g.generator().clone()).collect()),
        landscape: Some(landscape),
        path: None,
        acceptance_rate: None,
        wall_time: started.elapsed(),
        diagnostics: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct MhOptions {
    pub max_iter: usize,
    pub seed: u64,
    /// Identity when `None`.
    pub start: Option<Permutation>,
    pub save_all: bool,
}

impl MhOptions {
    pub fn new(max_iter: usize, seed: u64) -> Self {
        Self {
            max_iter,
            seed,
            start: None,
            save_all: false,
        }
    }
}

/// Maps `0..p(p−1)/2` to pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn transposition_from_index(p: usize, mut index: usize) -> (usize, usize) {
    for i in 0..p {
        let row = p - 1 - i;
        if index < row {
            return (i, i + 1 + index);
        }
        index -= row;
    }
    panic!("transposition index out of range for p = {p}");
}

/// A uniform transposition `(i, j)`, `i < j`.
pub fn sample_transposition<R: Rng + ?Sized>(rng: &mut R, p: usize) -> (usize, usize) {
    let m = p * (p - 1) / 2;
    transposition_from_index(p, rng.random_range(0..m))
}

pub fn metropolis_hastings(model: &GipsModel, options: &MhOptions) -> Result<SearchResult> {
    metropolis_hastings_with_progress(model, options, &mut |_| {})
}

/// The Metropolis–Hastings chain over permutations with uniform transposition proposals
/// `σ′ = σ ∘ (i j)`, accepted with probability `min(1, exp(Δ log quotient))`.
///
/// The reported best is the best subgroup *evaluated*, rejected proposals included.
pub fn metropolis_hastings_with_progress(
    model: &GipsModel,
    options: &MhOptions,
    progress: &mut dyn FnMut(Progress<'_>),
) -> Result<SearchResult> {
    let started = Instant::now();
    let p = model.dim();
    if p < 2 {
        return Err(Error::InvalidArgument(
            "Metropolis-Hastings needs p >= 2 (no transpositions otherwise)".into(),
        ));
    }
    if options.max_iter < 2 {
        return Err(Error::InvalidArgument(format!(
            "max_iter must be at least 2, got {}",
            options.max_iter
        )));
    }
    let mut current = match &options.start {
        Some(s) if s.dim() != p => {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: s.dim(),
            })
        }
        Some(s) => s.clone(),
        None => Permutation::identity(p),
    };

    let mut diagnostics = Vec::new();
    if let Some(space) = count_cyclic_subgroups(p) {
        if options.max_iter as u128 > space {
            diagnostics.push(format!(
                "max_iter = {} exceeds the {} cyclic subgroups for p = {}; brute force would be exact and cheaper",
                options.max_iter, space, p
            ));
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(options.seed);
    let mut cache = PosteriorCache::new(model);
    let mut current_eval = cache.evaluate(&current)?;
    let start = current_eval.clone();
    let mut best = current_eval.clone();
    let mut accepted = 0usize;
    let mut trace = options.save_all.then(|| Vec::with_capacity(options.max_iter));

    for t in 1..=options.max_iter {
        let (i, j) = sample_transposition(&mut rng, p);
        let proposal = current.compose_with_transposition(i, j)?;
        let proposal_eval = cache.evaluate(&proposal)?;
        if proposal_eval.log_quotient > best.log_quotient {
            best = proposal_eval.clone();
        }
        let delta = proposal_eval.log_quotient - current_eval.log_quotient;
        let u: f64 = rng.random();
        if delta >= 0.0 || u < delta.exp() {
            current = proposal;
            current_eval = proposal_eval;
            accepted += 1;
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(current.clone());
        }
        progress(Progress {
            done: t,
            total: options.max_iter,
            best: &best,
        });
    }

    Ok(SearchResult {
        optimizer: Optimizer::MetropolisHastings,
        best,
        start,
        evaluations: cache.requests(),
        trace,
        landscape: None,
        path: None,
        acceptance_rate: Some(accepted as f64 / options.max_iter as f64),
        wall_time: started.elapsed(),
        diagnostics,
    })
}

pub fn hill_climb(
    model: &GipsModel,
    max_iter: Option<usize>,
    start: Option<&Permutation>,
) -> Result<SearchResult> {
    hill_climb_with_progress(model, max_iter, start, &mut |_| {})
}

/// Steepest ascent over the neighbours `σ ∘ (i j)`. Moves only on strict improvement;
/// among equally good neighbours the smallest `(i, j)` wins. Stops at a local maximum
/// or after `max_iter` moves.
pub fn hill_climb_with_progress(
    model: &GipsModel,
    max_iter: Option<usize>,
    start: Option<&Permutation>,
    progress: &mut dyn FnMut(Progress<'_>),
) -> Result<SearchResult> {
    let started = Instant::now();
    let p = model.dim();
    if p < 2 {
        return Err(Error::InvalidArgument("hill climbing needs p >= 2".into()));
    }
    let mut current = match start {
        Some(s) if s.dim() != p => {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: s.dim(),
            })
        }
        Some(s) => s.clone(),
        None => Permutation::identity(p),
    };
    let mut cache = PosteriorCache::new(model);
    let mut current_eval = cache.evaluate(&current)?;
    let start_eval = current_eval.clone();
    let mut path = vec![current_eval.clone()];
    let mut trace = vec![current.clone()];
    let limit = max_iter.unwrap_or(usize::MAX);
    let mut moves = 0;

    while moves < limit {
        let mut best_neighbour: Option<(Permutation, PosteriorEvaluation)> = None;
        for i in 0..p {
            for j in i + 1..p {
                let neighbour = current.compose_with_transposition(i, j)?;
                let e = cache.evaluate(&neighbour)?;
                let better = match &best_neighbour {
                    None => true,
                    Some((_, b)) => e.log_quotient > b.log_quotient,
                };
                if better {
                    best_neighbour = Some((neighbour, e));
                }
            }
        }
        let (neighbour, e) = best_neighbour.expect("p >= 2 gives at least one neighbour");
        if e.log_quotient <= current_eval.log_quotient {
            break;
        }
        current = neighbour;
        current_eval = e;
        moves += 1;
        path.push(current_eval.clone());
        trace.push(current.clone());
        progress(Progress {
            done: moves,
            total: limit,
            best: &current_eval,
        });
    }

    Ok(SearchResult {
        optimizer: Optimizer::HillClimbing,
        best: current_eval,
        start: start_eval,
        evaluations: cache.requests(),
        trace: Some(trace),
        landscape: None,
        path: Some(path),
        acceptance_rate: None,
        wall_time: started.elapsed(),
        diagnostics: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateEntry {
    pub subgroup: CyclicSubgroup,
    pub visits: usize,
    /// `visits / Φ(#⟨σ⟩)`.
    pub weight: f64,
    pub probability: f64,
}

/// Visit-frequency posterior estimate with the totient correction, sorted by descending
/// probability (ties by generator).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityEstimate {
    pub entries: Vec<EstimateEntry>,
}

impl ProbabilityEstimate {
    pub fn get(&self, subgroup: &CyclicSubgroup) -> f64 {
        self.entries
            .iter()
            .find(|e| &e.subgroup == subgroup)
            .map_or(0.0, |e| e.probability)
    }
}

/// Each subgroup of order `N` has `Φ(N)` generators, each a separate chain state; dividing
/// visit counts by `Φ(N)` undoes that multiplicity.
pub fn estimate_probabilities(trace: &[Permutation]) -> Result<ProbabilityEstimate> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    let mut counts: HashMap<CyclicSubgroup, usize> = HashMap::new();
    for sigma in trace {
        *counts.entry(canonical_generator(sigma)).or_default() += 1;
    }
    let mut entries: Vec<EstimateEntry> = counts
        .into_iter()
        .map(|(subgroup, visits)| {
            let weight = visits as f64 / subgroup.generator_count() as f64;
            EstimateEntry {
                subgroup,
                visits,
                weight,
                probability: 0.0,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.subgroup.cmp(&b.subgroup));
    let total: f64 = entries.iter().map(|e| e.weight).sum();
    for e in &mut entries {
        e.probability = e.weight / total;
    }
    entries.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.subgroup.cmp(&b.subgroup))
    });
    Ok(ProbabilityEstimate { entries })
}
