//! Instance construction and solver runs for the CLI verbs.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spstiefel::matkit::{rand_gaussian, rand_symplectic};
use spstiefel::problems::{
    first_columns, gallery, sample_cloud, scale_max_abs, scale_spectral, spd_with_decay, symplectic_eig_oracle,
    BrockettTrace, Descriptor, ExtrinsicMean, NearestSymplectic, Problem, SymplecticEigen,
};
use spstiefel::{solve, Mat, MetricVariant, Point, Report, RetractionKind, StepRule, Termination};

use crate::config::{ProblemKind, RunConfig};
use crate::mtx::parse_matrix_market;
use crate::CliError;

/// A problem together with its starting point.
pub struct Instance {
    pub problem: Box<dyn Problem<f64>>,
    pub x0: Point,
    /// The SPD matrix of a `sympeig` instance.
    pub eig_matrix: Option<Mat>,
}

pub fn load_matrix(path: &Path) -> Result<Mat, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix_market(&text).map_err(|source| CliError::Mtx {
        path: path.to_path_buf(),
        source,
    })
}

/// First `2p` columns of `m`, divided by their largest absolute entry.
pub fn target_from_input(m: &Mat, p: usize) -> Result<Mat, CliError> {
    Ok(scale_max_abs(&first_columns(m, 2 * p)?)?)
}

/// Problem data are drawn from `seed`, the mean-problem cloud from `seed + 1`
/// and the starting point from `seed + 2`.
pub fn build_instance(cfg: &RunConfig) -> Result<Instance, CliError> {
    let (n, p, seed) = (cfg.n, cfg.p, cfg.seed);
    let input = cfg.input.as_deref();
    let source = input.map(|path| path.display().to_string());
    let descriptor = |name: &str| Descriptor {
        generator: name.to_string(),
        seed: Some(seed),
        source: source.clone(),
    };
    let mut eig_matrix = None;
    let problem: Box<dyn Problem<f64>> = match cfg.problem {
        ProblemKind::Nearest => {
            let a = match input {
                Some(path) => target_from_input(&load_matrix(path)?, p)?,
                None => scale_spectral(&rand_gaussian(2 * n, 2 * p, seed), 1.0)?,
            };
            Box::new(NearestSymplectic::new(a)?.with_descriptor(descriptor("nearest")))
        }
        ProblemKind::Brockett => {
            let a = match input {
                Some(path) => load_matrix(path)?,
                None => spd_with_decay(n, cfg.lambda, seed)?,
            };
            Box::new(BrockettTrace::new(&a, p)?.with_descriptor(descriptor("brockett")))
        }
        ProblemKind::Mean => {
            if input.is_some() {
                return Err(CliError::Config("the mean problem generates its samples; drop input".into()));
            }
            let center = rand_symplectic(n, p, cfg.init, seed)?;
            let cloud = sample_cloud(&center, cfg.samples, cfg.spread, seed + 1)?;
            Box::new(ExtrinsicMean::new(&cloud)?)
        }
        ProblemKind::Sympeig => {
            let m = match input {
                Some(path) => load_matrix(path)?,
                None => gallery(cfg.gallery, 2 * n)?,
            };
            let prob = SymplecticEigen::new(&m, p)?.with_descriptor(descriptor("sympeig"));
            eig_matrix = Some(m);
            Box::new(prob)
        }
    };
    let (n, p) = problem.dims();
    let x0 = rand_symplectic(n, p, cfg.init, seed + 2)?;
    Ok(Instance {
        problem,
        x0,
        eig_matrix,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Evals {
    pub cost: usize,
    pub egrad: usize,
    pub backtracks: usize,
    pub domain_errors: usize,
    pub infeasible_trials: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub label: String,
    pub problem: String,
    pub n: usize,
    pub p: usize,
    pub fval: f64,
    pub gradf: f64,
    pub feasi: f64,
    pub iter: usize,
    /// Wall-clock seconds.
    pub time: f64,
    pub termination: String,
    pub converged: bool,
    pub seed: u64,
    pub evals: Evals,
    /// Symplectic eigenvalues read off the final point (`sympeig` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    /// The `p` smallest symplectic eigenvalues from the dense oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<f64>>,
    pub config: BTreeMap<&'static str, String>,
}

pub struct RunResult {
    pub summary: Summary,
    pub report: Report,
}

impl RunResult {
    pub fn termination(&self) -> Termination {
        self.report.termination
    }
}

pub fn run(cfg: &RunConfig, inst: &Instance, label: &str) -> Result<RunResult, CliError> {
    let report = solve(
        inst.problem.as_ref(),
        &inst.x0,
        cfg.metric()?,
        cfg.retraction,
        &cfg.line_search,
        &cfg.stop,
    )?;
    let (n, p) = inst.problem.dims();
    let (eigenvalues, oracle) = match &inst.eig_matrix {
        Some(m) => {
            let est = spstiefel::problems::extract_eigenvalues(m, report.x.matrix())?;
            let mut d = symplectic_eig_oracle(m)?;
            d.truncate(p);
            (Some(est.values), Some(d))
        }
        None => (None, None),
    };
    let last = report.last();
    let e = &report.evals;
    let summary = Summary {
        label: label.to_string(),
        problem: cfg.problem.to_string(),
        n,
        p,
        fval: last.f,
        gradf: last.gradf,
        feasi: last.feasi,
        iter: last.iter,
        time: report.elapsed_secs,
        termination: report.termination.to_string(),
        converged: report.termination.converged(),
        seed: cfg.seed,
        evals: Evals {
            cost: e.cost,
            egrad: e.egrad,
            backtracks: e.backtracks,
            domain_errors: e.domain_errors,
            infeasible_trials: e.infeasible_trials,
        },
        eigenvalues,
        oracle,
        config: cfg.entries(),
    };
    Ok(RunResult { summary, report })
}

/// `ρ = 2^l` for `l = −3, …, 3`.
pub fn sweep_rhos() -> Vec<f64> {
    (-3..=3).map(|l| 2f64.powi(l)).collect()
}

/// One run per `ρ` on the same instance, in parallel; results keep `rhos` order.
pub fn sweep(cfg: &RunConfig, rhos: &[f64]) -> Result<Vec<RunResult>, CliError> {
    let inst = build_instance(cfg)?;
    rhos.par_iter()
        .map(|&rho| {
            let mut c = cfg.clone();
            c.rho = Some(rho);
            run(&c, &inst, &format!("rho={rho}"))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Metric variant I against II.
    Variant,
    /// Quasi-geodesic against Cayley.
    Retraction,
    /// BB1, BB2, ABB and the function-value ratio.
    StepRule,
    /// Monotone (`α = 0`) against non-monotone (`α = 0.85`).
    Alpha,
}

/// The configurations compared along `axis`, each with its label.
pub fn compare_configs(cfg: &RunConfig, axis: Axis) -> Vec<(String, RunConfig)> {
    let with = |label: String, f: &dyn Fn(&mut RunConfig)| {
        let mut c = cfg.clone();
        f(&mut c);
        (label, c)
    };
    match axis {
        Axis::Variant => [MetricVariant::I, MetricVariant::II]
            .into_iter()
            .map(|v| with(format!("variant={v}"), &|c| c.variant = v))
            .collect(),
        Axis::Retraction => [RetractionKind::QuasiGeodesic, RetractionKind::CayleyLowRank]
            .into_iter()
            .map(|r| with(format!("retraction={r}"), &|c| c.retraction = r))
            .collect(),
        Axis::StepRule => [StepRule::Bb1, StepRule::Bb2, StepRule::Abb, StepRule::ModifiedRatio]
            .into_iter()
            .map(|s| with(format!("step_rule={s}"), &|c| c.line_search.step_rule = s))
            .collect(),
        Axis::Alpha => [0.0, 0.85]
            .into_iter()
            .map(|a| with(format!("alpha={a}"), &|c| c.line_search.alpha = a))
            .collect(),
    }
}

/// Runs every configuration of `axis` on one shared instance.
pub fn compare(cfg: &RunConfig, axis: Axis) -> Result<Vec<RunResult>, CliError> {
    let inst = build_instance(cfg)?;
    compare_configs(cfg, axis)
        .par_iter()
        .map(|(label, c)| run(c, &inst, label))
        .collect()
}
