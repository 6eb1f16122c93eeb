//! Command-line front end. The binary is a thin wrapper around [`run`]; each subcommand
//! also has a library entry point (`cmd_*`) returning its report so it can be driven
//! from code and tests.
//!
//! Reports written with `--output` are pure functions of the inputs, flags and seed.
//! Wall-clock time is printed in the human summary only, never written to files.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::colored::{orbit_count, ColoredSpace, StructureConstants};
use crate::error::{Error, Result};
use crate::estimate::{adjacency, edges_to_csv, mle_covariance, threshold_partial_correlations, Adjacency, EstimationReport};
use crate::io::{default_header, matrix_to_csv, read_sym_matrix, read_table, write_text};
use crate::linalg::{orthogonality_defect, sample_covariance, SymMatrix};
use crate::perm::{parse_permutation, Permutation, DEFAULT_ENUMERATION_LIMIT};
use crate::posterior::{
    default_hyperparameters, evaluate_subgroup, probabilities_from_evaluations, GipsModel,
    ModelCriteria, PosteriorEvaluation, SampleSize,
};
use crate::search::{
    brute_force_with_limit, estimate_probabilities, hill_climb_with_progress,
    metropolis_hastings_with_progress, MhOptions, Optimizer, Progress, SearchResult,
};
use crate::simulate::simulate_scenario;

/// Version of the JSON layout of [`AnalysisReport`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "permsym",
    version,
    about = "Find cyclic permutation symmetries in Gaussian covariance structure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for the maximum a posteriori cyclic subgroup.
    FindMap(FindMapArgs),
    /// Project a covariance onto the colored space of a permutation (the constrained MLE).
    Project(ProjectArgs),
    /// Posterior probability table: exact (bf) or estimated from a chain (mh --save-all).
    Probs(FindMapArgs),
    /// Simulate a scenario with a planted symmetry.
    Simulate(SimulateArgs),
    /// Threshold the partial correlations of a covariance matrix.
    Threshold(ThresholdArgs),
    /// Print structure constants and basis diagnostics for a permutation.
    Constants(ConstantsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Data CSV: rows are observations, columns variables; header optional.
    #[arg(long, value_name = "PATH", conflicts_with = "covariance", required_unless_present = "covariance")]
    pub input: Option<PathBuf>,
    /// Square covariance CSV instead of data; needs --n.
    #[arg(long, value_name = "PATH", requires = "n")]
    pub covariance: Option<PathBuf>,
    /// Number of observations behind --covariance.
    #[arg(long)]
    pub n: Option<usize>,
    /// The mean was estimated from the data (default; costs one degree of freedom).
    #[arg(long, conflicts_with = "zero_mean")]
    pub center: bool,
    /// The mean is known to be zero: data are not centred and n_eff = n.
    #[arg(long)]
    pub zero_mean: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PriorArgs {
    /// Prior shape δ > 1 (default 3).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Prior scale D = d·I (default tr(S)/p).
    #[arg(long, conflicts_with = "d_matrix")]
    pub d_scale: Option<f64>,
    /// Prior scale D read from a square CSV.
    #[arg(long, value_name = "PATH")]
    pub d_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FindMapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// bf, mh or hc. Default: bf for p ≤ 9, mh otherwise.
    #[arg(long)]
    pub optimizer: Option<String>,
    /// Iterations (mh, required) or moves (hc, default unbounded).
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Starting permutation for mh/hc, cycle notation (default identity).
    #[arg(long)]
    pub start: Option<String>,
    /// Keep the visited permutations (needed for estimated probabilities).
    #[arg(long)]
    pub save_all: bool,
    /// Attach the posterior probability table.
    #[arg(long, requires = "save_all")]
    pub probabilities: bool,
    /// Evaluate this permutation only, no search.
    #[arg(long, value_name = "PERM")]
    pub perm: Option<String>,
    /// Largest p brute force will enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub enumeration_limit: usize,
    /// JSON report (find-map) or probability table, CSV or .json (probs).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// No progress bar or diagnostics on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Permutation in cycle notation, e.g. "(1,2)(3,4)".
    #[arg(long, value_name = "PERM")]
    pub perm: String,
    /// Projected matrix CSV; the report goes next to it with extension .report.json.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Number of variables.
    #[arg(long)]
    pub p: usize,
    /// Planted permutation (default: the full p-cycle).
    #[arg(long, value_name = "PERM")]
    pub perm: Option<String>,
    /// Rows to sample.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Wishart shape (default p).
    #[arg(long)]
    pub shape: Option<usize>,
    /// Directory receiving sigma_true.csv, data.csv and scenario.json.
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Covariance estimate, square CSV.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Keep edges with |partial correlation| ≥ alpha.
    #[arg(long)]
    pub alpha: f64,
    /// Edge CSV; the adjacency JSON goes next to it with extension .json.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    #[arg(long, value_name = "PERM")]
    pub perm: String,
    /// Ambient dimension (default: largest index in --perm).
    #[arg(long)]
    pub p: Option<usize>,
    /// Optional covariance CSV to report block leakage on.
    #[arg(long, value_name = "PATH")]
    pub covariance: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

/// Data summary plus prior, as loaded from the command line.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: GipsModel,
    pub header: Option<Vec<String>>,
}

pub fn load_model(input: &InputArgs, prior: &PriorArgs) -> Result<LoadedModel> {
    let (s, size, header) = load_covariance(input)?;
    let (default_delta, default_d) = default_hyperparameters(&s)?;
    let delta = prior.delta.unwrap_or(default_delta);
    let d = match (&prior.d_scale, &prior.d_matrix) {
        (Some(scale), _) => SymMatrix::scaled_identity(s.dim(), *scale),
        (None, Some(path)) => read_sym_matrix(path)?,
        (None, None) => default_d,
    };
    Ok(LoadedModel {
        model: GipsModel::new(s, size, delta, d)?,
        header,
    })
}

fn load_covariance(input: &InputArgs) -> Result<(SymMatrix, SampleSize, Option<Vec<String>>)> {
    let mean_estimated = !input.zero_mean;
    match (&input.input, &input.covariance) {
        (Some(path), None) => {
            let table = read_table(path)?;
            let (s, _) = sample_covariance(&table.values, !mean_estimated)?;
            Ok((s, SampleSize::new(table.values.rows(), mean_estimated), table.header))
        }
        (None, Some(path)) => {
            let n = input
                .n
                .ok_or_else(|| Error::InvalidArgument("--covariance needs --n".into()))?;
            let table = read_table(path)?;
            let s = SymMatrix::from_matrix(&table.values)?;
            Ok((s, SampleSize::new(n, mean_estimated), table.header))
        }
        _ => Err(Error::InvalidArgument(
            "exactly one of --input and --covariance is required".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub subgroup: String,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    /// `exact` or `estimated`.
    pub kind: String,
    /// Sorted by descending probability.
    pub rows: Vec<ProbabilityRow>,
}

impl ProbabilityTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subgroup,probability\n");
        for row in &self.rows {
            out.push_str(&format!("\"{}\",{:?}\n", row.subgroup, row.probability));
        }
        out
    }

    pub fn get(&self, subgroup: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.subgroup == subgroup)
            .map(|r| r.probability)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    /// `bf`, `mh`, `hc`, or `none` for a fixed permutation.
    pub optimizer: String,
    pub evaluations: usize,
    pub acceptance_rate: Option<f64>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub diagnostics: Vec<String>,
}

/// Result of `find-map`. Serialises losslessly to JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub p: usize,
    pub n: usize,
    pub n_eff: usize,
    pub mean_estimated: bool,
    pub delta: f64,
    pub d: SymMatrix,
    pub variables: Option<Vec<String>>,
    /// MAP subgroup, canonical generator in cycle notation.
    pub map: String,
    pub map_order: u64,
    pub log_posterior: f64,
    /// `log P(MAP) − log P(⟨id⟩)`.
    pub log_ratio_vs_identity: f64,
    pub start: String,
    /// `log P(MAP) − log P(start)`.
    pub log_ratio_vs_start: f64,
    pub n0: usize,
    pub dim: usize,
    pub mle_exists: bool,
    pub criteria: Option<ModelCriteria>,
    pub probabilities: Option<ProbabilityTable>,
    pub sigma_hat: SymMatrix,
    pub run: RunInfo,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Human-readable summary.
    pub fn summary(&self, wall_time: Option<std::time::Duration>) -> String {
        let mut s = String::new();
        s.push_str(&format!("The permutation {}\n", self.map));
        if self.run.optimizer != "none" {
            s.push_str(&format!(
                " - was found after {} posteriori calculations\n",
                self.run.evaluations
            ));
        }
        s.push_str(&format!(
            " - is {} times more likely than the {} permutation\n",
            format_odds(self.log_ratio_vs_start),
            self.start
        ));
        if self.start != "()" {
            s.push_str(&format!(
                " - is {} times more likely than the () permutation\n",
                format_odds(self.log_ratio_vs_identity)
            ));
        }
        s.push_str(&format!("Log_posteriori: {:.3}\n", self.log_posterior));
        s.push_str(&format!("n: {}\n", self.n));
        if self.mean_estimated {
            s.push_str(&format!(
                "One degree of freedom was lost by estimating the mean; {} degrees of freedom left.\n",
                self.n_eff
            ));
        } else {
            s.push_str("The mean is known to be zero; no degrees of freedom were lost.\n");
        }
        s.push_str(&format!("n0: {}\n", self.n0));
        if self.mle_exists {
            s.push_str(&format!(
                "The maximum likelihood estimator exists ({} >= {}).\n",
                self.n_eff, self.n0
            ));
        } else {
            s.push_str(&format!(
                "The maximum likelihood estimator does not exist ({} < {}); the projection is a regularised estimate.\n",
                self.n_eff, self.n0
            ));
        }
        s.push_str(&format!("Number of free parameters: {}\n", self.dim));
        if let Some(c) = &self.criteria {
            s.push_str(&format!("BIC: {:.3}\nAIC: {:.3}\n", c.bic, c.aic));
        }
        s.push_str(&format!("Optimizer: {}\n", self.run.optimizer));
        s.push_str(&format!("Posteriori calculations: {}\n", self.run.evaluations));
        if let Some(t) = wall_time {
            s.push_str(&format!("Time: {:.3} s\n", t.as_secs_f64()));
        }
        if let Some(rate) = self.run.acceptance_rate {
            s.push_str(&format!("Acceptance rate: {rate:.5}\n"));
        }
        if let Some(probs) = &self.probabilities {
            s.push_str(&format!("Posterior probabilities ({}):\n", probs.kind));
            for row in probs.rows.iter().take(10) {
                s.push_str(&format!("  {:<24} {:.7e}\n", row.subgroup, row.probability));
            }
            if probs.rows.len() > 10 {
                s.push_str(&format!("  ... {} more\n", probs.rows.len() - 10));
            }
        }
        s
    }
}

/// `exp(x)` with four significant digits, or `e^x` when it would overflow.
fn format_odds(log_ratio: f64) -> String {
    if log_ratio < 700.0 {
        format!("{:.4}", log_ratio.exp())
    } else {
        format!("e^{log_ratio:.3}")
    }
}

/// Outcome of `find-map` / `probs` before rendering.
pub struct FindMapOutcome {
    pub report: AnalysisReport,
    pub search: Option<SearchResult>,
}

fn parse_optional_perm(text: &Option<String>, p: usize) -> Result<Option<Permutation>> {
    text.as_deref().map(|t| parse_permutation(t, p)).transpose()
}

fn progress_printer(quiet: bool, label: &'static str) -> impl FnMut(Progress<'_>) {
    let mut last_percent = usize::MAX;
    move |progress: Progress<'_>| {
        if quiet {
            return;
        }
        let percent = if progress.total == usize::MAX {
            progress.done
        } else {
            progress.done * 100 / progress.total.max(1)
        };
        if percent != last_percent {
            last_percent = percent;
            let mut err = std::io::stderr().lock();
            let _ = if progress.total == usize::MAX {
                write!(err, "\r[{label}] move {} best {:.3}", progress.done, progress.best.log_quotient)
            } else {
                write!(
                    err,
                    "\r[{label}] {:>3}% ({}/{}) best {:.3}",
                    percent, progress.done, progress.total, progress.best.log_quotient
                )
            };
            if progress.done == progress.total {
                let _ = writeln!(err);
            }
        }
    }
}

/// Runs the configured search (or evaluates `--perm`) and assembles the report.
pub fn cmd_find_map(args: &FindMapArgs) -> Result<FindMapOutcome> {
    let loaded = load_model(&args.input, &args.prior)?;
    let model = &loaded.model;
    let p = model.dim();
    if args.probabilities && !args.save_all {
        return Err(Error::InvalidArgument(
            "--probabilities can only be used together with --save-all".into(),
        ));
    }
    let start = parse_optional_perm(&args.start, p)?;
    let identity_eval = || evaluate_subgroup(model, &crate::perm::CyclicSubgroup::trivial(p));

    let (best, start_eval, search, run) = if let Some(text) = &args.perm {
        let sigma = parse_permutation(text, p)?;
        let e = crate::posterior::log_posterior_quotient(model, &sigma)?;
        let run = RunInfo {
            optimizer: "none".into(),
            evaluations: 1,
            acceptance_rate: None,
            seed: None,
            max_iter: None,
            diagnostics: Vec::new(),
        };
        (e, identity_eval()?, None, run)
    } else {
        let optimizer = match &args.optimizer {
            Some(code) => Optimizer::from_code(code)?,
            None => Optimizer::default_for(p),
        };
        let result = match optimizer {
            Optimizer::BruteForce => {
                brute_force_with_limit(model, args.save_all, args.enumeration_limit)?
            }
            Optimizer::MetropolisHastings => {
                let max_iter = args.max_iter.ok_or_else(|| {
                    Error::InvalidArgument("--optimizer mh needs --max-iter".into())
                })?;
                let options = MhOptions {
                    max_iter,
                    seed: args.seed,
                    start: start.clone(),
                    save_all: args.save_all,
                };
                metropolis_hastings_with_progress(model, &options, &mut progress_printer(args.quiet, "mh"))?
            }
            Optimizer::HillClimbing => hill_climb_with_progress(
                model,
                args.max_iter,
                start.as_ref(),
                &mut progress_printer(args.quiet, "hc"),
            )?,
        };
        if !args.quiet {
            for d in &result.diagnostics {
                eprintln!("warning: {d}");
            }
        }
        let run = RunInfo {
            optimizer: optimizer.code().into(),
            evaluations: result.evaluations,
            acceptance_rate: result.acceptance_rate,
            seed: (optimizer == Optimizer::MetropolisHastings).then_some(args.seed),
            max_iter: if optimizer == Optimizer::BruteForce {
                None
            } else {
                args.max_iter
            },
            diagnostics: result.diagnostics.clone(),
        };
        (result.best.clone(), result.start.clone(), Some(result), run)
    };

    let identity = if start_eval.subgroup.generator().is_identity() {
        start_eval.clone()
    } else {
        identity_eval()?
    };

    let probabilities = if args.probabilities {
        Some(probability_table(search.as_ref())?)
    } else {
        None
    };

    let estimation = mle_covariance(model.s(), best.subgroup.generator(), model.sample_size())?;
    let report = build_report(&loaded, &best, &start_eval, &identity, &estimation, probabilities, run);
    Ok(FindMapOutcome { report, search })
}

fn build_report(
    loaded: &LoadedModel,
    best: &PosteriorEvaluation,
    start: &PosteriorEvaluation,
    identity: &PosteriorEvaluation,
    estimation: &EstimationReport,
    probabilities: Option<ProbabilityTable>,
    run: RunInfo,
) -> AnalysisReport {
    let model = &loaded.model;
    AnalysisReport {
        schema_version: SCHEMA_VERSION,
        p: model.dim(),
        n: model.n(),
        n_eff: model.n_eff(),
        mean_estimated: model.mean_estimated(),
        delta: model.delta(),
        d: model.d().clone(),
        variables: loaded.header.clone(),
        map: best.subgroup.to_string(),
        map_order: u64::try_from(best.subgroup.order()).unwrap_or(u64::MAX),
        log_posterior: best.log_quotient,
        log_ratio_vs_identity: best.log_quotient - identity.log_quotient,
        start: start.subgroup.generator().to_string(),
        log_ratio_vs_start: best.log_quotient - start.log_quotient,
        n0: best.n0,
        dim: best.dim,
        mle_exists: best.mle_exists,
        criteria: estimation.criteria,
        probabilities,
        sigma_hat: estimation.sigma_hat.clone(),
        run,
    }
}

fn probability_table(search: Option<&SearchResult>) -> Result<ProbabilityTable> {
    let search = search.ok_or_else(|| {
        Error::InvalidArgument("probabilities need a search (bf, or mh with --save-all)".into())
    })?;
    match search.optimizer {
        Optimizer::BruteForce => {
            let landscape = search.landscape.as_ref().expect("brute force keeps its landscape");
            let mut rows: Vec<ProbabilityRow> = probabilities_from_evaluations(landscape)
                .into_iter()
                .map(|(g, probability)| ProbabilityRow {
                    subgroup: g.to_string(),
                    probability,
                })
                .collect();
            // stable sort keeps enumeration order among ties
            rows.sort_by(|a, b| b.probability.total_cmp(&a.probability));
            Ok(ProbabilityTable {
                kind: "exact".into(),
                rows,
            })
        }
        Optimizer::MetropolisHastings => {
            let trace = search.trace.as_ref().ok_or_else(|| {
                Error::InvalidArgument("estimated probabilities need --save-all".into())
            })?;
            let estimate = estimate_probabilities(trace)?;
            Ok(ProbabilityTable {
                kind: "estimated".into(),
                rows: estimate
                    .entries
                    .into_iter()
                    .map(|e| ProbabilityRow {
                        subgroup: e.subgroup.to_string(),
                        probability: e.probability,
                    })
                    .collect(),
            })
        }
        Optimizer::HillClimbing => Err(Error::InvalidArgument(
            "probabilities are available for bf and mh only".into(),
        )),
    }
}

/// `probs`: the probability table alone.
pub fn cmd_probs(args: &FindMapArgs) -> Result<ProbabilityTable> {
    let mut args = args.clone();
    args.probabilities = true;
    args.perm = None;
    let optimizer = args.optimizer.as_deref().map(Optimizer::from_code).transpose()?;
    if matches!(optimizer, None | Some(Optimizer::BruteForce)) {
        args.save_all = true;
    } else if !args.save_all {
        return Err(Error::InvalidArgument(
            "estimated probabilities need --save-all".into(),
        ));
    }
    let outcome = cmd_find_map(&args)?;
    Ok(outcome.report.probabilities.expect("requested above"))
}

/// Report written by `project`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub schema_version: u32,
    pub permutation: String,
    pub subgroup: String,
    pub n: usize,
    pub n_eff: usize,
    pub n0: usize,
    pub dim: usize,
    pub mle_exists: bool,
    pub criteria: Option<ModelCriteria>,
    pub sigma_hat: SymMatrix,
}

pub fn cmd_project(args: &ProjectArgs) -> Result<(ProjectionReport, Option<Vec<String>>)> {
    let (s, size, header) = load_covariance(&args.input)?;
    let sigma = parse_permutation(&args.perm, s.dim())?;
    let est = mle_covariance(&s, &sigma, size)?;
    Ok((
        ProjectionReport {
            schema_version: SCHEMA_VERSION,
            permutation: sigma.to_string(),
            subgroup: est.subgroup.to_string(),
            n: size.n,
            n_eff: est.n_eff,
            n0: est.n0,
            dim: est.dim,
            mle_exists: est.mle_exists,
            criteria: est.criteria,
            sigma_hat: est.sigma_hat,
        },
        header,
    ))
}

/// Metadata written by `simulate` next to the CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub schema_version: u32,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub permutation: String,
    pub wishart_shape: usize,
    pub ridge: Option<f64>,
    pub rng: String,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<ScenarioInfo> {
    let sigma = match &args.perm {
        Some(text) => parse_permutation(text, args.p)?,
        None => Permutation::from_cycles(args.p, &[(0..args.p).collect()])?,
    };
    let scenario = simulate_scenario(&sigma, args.n, args.seed, args.shape)?;
    std::fs::create_dir_all(&args.output).map_err(|e| Error::Io {
        path: args.output.display().to_string(),
        source: e,
    })?;
    let header = default_header(args.p);
    write_text(
        &args.output.join("sigma_true.csv"),
        &matrix_to_csv(&scenario.sigma_true.to_matrix(), Some(&header)),
    )?;
    write_text(
        &args.output.join("data.csv"),
        &matrix_to_csv(&scenario.data, Some(&header)),
    )?;
    let info = ScenarioInfo {
        schema_version: SCHEMA_VERSION,
        p: args.p,
        n: args.n,
        seed: args.seed,
        permutation: sigma.to_string(),
        wishart_shape: scenario.wishart_shape,
        ridge: scenario.ridge,
        rng: "ChaCha20Rng::seed_from_u64 + StandardNormal".into(),
    };
    write_text(
        &args.output.join("scenario.json"),
        &(serde_json::to_string_pretty(&info)? + "\n"),
    )?;
    Ok(info)
}

pub fn cmd_threshold(args: &ThresholdArgs) -> Result<(String, Adjacency)> {
    let sigma_hat = read_sym_matrix(&args.input)?;
    let edges = threshold_partial_correlations(&sigma_hat, args.alpha)?;
    Ok((edges_to_csv(&edges), adjacency(sigma_hat.dim(), args.alpha, &edges)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub permutation: String,
    pub subgroup: String,
    pub p: usize,
    pub order: String,
    pub cycle_lengths: Vec<usize>,
    pub n0: usize,
    pub dim: usize,
    pub orbit_count: usize,
    pub constants: StructureConstants,
    pub block_sizes: Vec<usize>,
    pub orthogonality_defect: f64,
    pub leakage: Option<f64>,
}

pub fn cmd_constants(args: &ConstantsArgs) -> Result<ConstantsReport> {
    let p = match args.p {
        Some(p) => p,
        None => largest_index(&args.perm).max(1),
    };
    let sigma = parse_permutation(&args.perm, p)?;
    let space = ColoredSpace::new(&sigma);
    let leakage = match &args.covariance {
        Some(path) => Some(space.block_decompose(&read_sym_matrix(path)?)?.leakage),
        None => None,
    };
    Ok(ConstantsReport {
        permutation: sigma.to_string(),
        subgroup: space.subgroup().to_string(),
        p,
        order: space.subgroup().order().to_string(),
        cycle_lengths: sigma.cycles().lengths(),
        n0: space.n0(),
        dim: space.dimension(),
        orbit_count: orbit_count(&sigma),
        constants: space.constants().clone(),
        block_sizes: space.constants().block_sizes(),
        orthogonality_defect: orthogonality_defect(space.basis().matrix()),
        leakage,
    })
}

fn largest_index(text: &str) -> usize {
    let numbers: Vec<usize> = text
        .split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse().ok())
        .collect();
    let comma = text.contains(',');
    if comma {
        numbers.into_iter().max().unwrap_or(0)
    } else {
        // compact digit form: each digit is an index
        text.chars()
            .filter_map(|c| c.to_digit(10))
            .map(|d| d as usize)
            .max()
            .unwrap_or(0)
    }
}

fn report_path(output: &Path, suffix: &str) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}{suffix}"))
}

/// Parses arguments, runs the command, prints results. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::FindMap(args) => {
            let outcome = cmd_find_map(args)?;
            let wall = outcome.search.as_ref().map(|s| s.wall_time);
            print!("{}", outcome.report.summary(wall));
            if let Some(path) = &args.output {
                write_text(path, &outcome.report.to_json()?)?;
            }
        }
        Command::Probs(args) => {
            let table = cmd_probs(args)?;
            println!("{} posterior probabilities", table.kind);
            for row in &table.rows {
                println!("{:<24} {:.7e}", row.subgroup, row.probability);
            }
            if let Some(path) = &args.output {
                let text = if path.extension().is_some_and(|e| e == "json") {
                    serde_json::to_string_pretty(&table)? + "\n"
                } else {
                    table.to_csv()
                };
                write_text(path, &text)?;
            }
        }
        Command::Project(args) => {
            let (report, header) = cmd_project(args)?;
            let header = header.unwrap_or_else(|| default_header(report.sigma_hat.dim()));
            let csv = matrix_to_csv(&report.sigma_hat.to_matrix(), Some(&header));
            match &args.output {
                Some(path) => {
                    write_text(path, &csv)?;
                    write_text(
                        &report_path(path, ".report.json"),
                        &(serde_json::to_string_pretty(&report)? + "\n"),
                    )?;
                }
                None => print!("{csv}"),
            }
            if !args.quiet {
                eprintln!(
                    "projected onto <{}>: n0 = {}, n_eff = {}, MLE {}; {} free parameters",
                    report.subgroup,
                    report.n0,
                    report.n_eff,
                    if report.mle_exists { "exists" } else { "does not exist" },
                    report.dim
                );
            }
        }
        Command::Simulate(args) => {
            let info = cmd_simulate(args)?;
            if !args.quiet {
                println!(
                    "wrote {} rows for p = {} under {} to {}",
                    info.n,
                    info.p,
                    info.permutation,
                    args.output.display()
                );
                if let Some(eps) = info.ridge {
                    println!("projected Wishart draw was not positive definite; added {eps}·I");
                }
            }
        }
        Command::Threshold(args) => {
            let (csv, adj) = cmd_threshold(args)?;
            match &args.output {
                Some(path) => {
                    write_text(path, &csv)?;
                    write_text(
                        &report_path(path, ".json"),
                        &(serde_json::to_string_pretty(&adj)? + "\n"),
                    )?;
                }
                None => print!("{csv}"),
            }
            if !args.quiet {
                eprintln!("{} edges at alpha = {}", adj.edge_count, adj.alpha);
            }
        }
        Command::Constants(args) => {
            let report = cmd_constants(args)?;
            if let Some(path) = &args.output {
                write_text(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            if !args.quiet {
                println!("permutation:        {}", report.permutation);
                println!("canonical subgroup: {}", report.subgroup);
                println!("order N:            {}", report.order);
                println!("cycle lengths:      {:?}", report.cycle_lengths);
                println!("n0 (cycles):        {}", report.n0);
                println!("dimension:          {} (orbit count {})", report.dim, report.orbit_count);
                println!("L:                  {}", report.constants.len());
                println!("r:                  {:?}", report.constants.r);
                println!("d:                  {:?}", report.constants.d);
                println!("block sizes:        {:?}", report.block_sizes);
                println!("max |UᵀU − I|:      {:.3e}", report.orthogonality_defect);
                if let Some(l) = report.leakage {
                    println!("off-block leakage:  {l:.3e}");
                }
            }
        }
    }
    Ok(())
}
