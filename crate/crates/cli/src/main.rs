use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use spstiefel::Termination;
use spstiefel_cli::config::{ProblemKind, RunConfig};
use spstiefel_cli::experiment::{self, Axis, RunResult};
use spstiefel_cli::report;
use spstiefel_cli::CliError;

/// Riemannian gradient descent on the symplectic Stiefel manifold.
///
/// Exit status: 0 when every run stops on the gradient or step/function
/// tolerance, 1 when a run hits the iteration cap or the line search fails,
/// 2 on configuration, input or solver errors.
#[derive(Parser)]
#[command(name = "spstiefel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(RunArgs),
    /// Solve one instance for rho = 2^l, l = -3..3.
    Sweep(RunArgs),
    /// Solve one instance under several settings of one option.
    Compare {
        #[arg(long, value_enum)]
        axis: Axis,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Smallest symplectic eigenvalues of an SPD matrix by trace minimization.
    Sympeig(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// nearest, brockett, mean or sympeig.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// I or II.
    #[arg(long)]
    variant: Option<String>,
    /// qgeo or cayley.
    #[arg(long)]
    retraction: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// bb1, bb2, abb or ratio.
    #[arg(long)]
    step_rule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// MatrixMarket file with the problem matrix.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    eps_grad: Option<f64>,
    #[arg(long)]
    eps_x: Option<f64>,
    #[arg(long)]
    eps_f: Option<f64>,
    /// Any other configuration key, as key=value; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn config(&self, forced: Option<ProblemKind>) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if forced == Some(ProblemKind::Sympeig) {
            cfg.p = 1;
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags: [(&str, Option<String>); 16] = [
            ("problem", self.problem.clone()),
            ("n", self.n.map(|v| v.to_string())),
            ("p", self.p.map(|v| v.to_string())),
            ("rho", self.rho.map(|v| v.to_string())),
            ("variant", self.variant.clone()),
            ("retraction", self.retraction.clone()),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("step_rule", self.step_rule.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("input", self.input.as_ref().map(|v| v.display().to_string())),
            ("out", self.out.as_ref().map(|v| v.display().to_string())),
            ("max_iter", self.max_iter.map(|v| v.to_string())),
            ("eps_grad", self.eps_grad.map(|v| v.to_string())),
            ("eps_x", self.eps_x.map(|v| v.to_string())),
            ("eps_f", self.eps_f.map(|v| v.to_string())),
            ("problem", forced.map(|k| k.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Output directory named on the command line, for error reports that
    /// happen before the configuration is complete.
    fn out_hint(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| RunConfig::default().out)
    }
}

fn status(runs: &[&RunResult], out: &std::path::Path) -> ExitCode {
    if let Some(failed) = runs.iter().find(|r| r.termination() == Termination::LineSearchFailure) {
        report::write_error(
            out,
            "line_search_failure",
            format!("{}: no acceptable step after {} iterations", failed.summary.label, failed.summary.iter),
        );
    }
    if runs.iter().all(|r| r.termination().converged()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn create_out(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))
}

fn single(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let inst = experiment::build_instance(cfg)?;
    let result = experiment::run(cfg, &inst, &cfg.problem.to_string())?;
    create_out(cfg)?;
    report::write_trajectory(&cfg.out.join("trajectory.csv"), &result.report.rows)?;
    report::write_json(&cfg.out.join("summary.json"), &result.summary)?;
    report::write_matrix(&cfg.out.join("point.mtx"), result.report.x.matrix())?;
    let s = &result.summary;
    info!("{}: fval {:e}, gradf {:e}, feasi {:e}, {} iterations, {}", s.label, s.fval, s.gradf, s.feasi, s.iter, s.termination);
    println!("{}", serde_json::to_string(s).map_err(|e| CliError::Report(e.to_string()))?);
    Ok(status(&[&result], &cfg.out))
}

fn many(cfg: &RunConfig, runs: Vec<RunResult>, stem: &str) -> Result<ExitCode, CliError> {
    create_out(cfg)?;
    report::write_merged(&cfg.out.join(format!("{stem}_trajectories.csv")), &runs)?;
    report::write_summary_table(&cfg.out.join(format!("{stem}.csv")), &runs)?;
    let summaries: Vec<_> = runs.iter().map(|r| &r.summary).collect();
    report::write_json(&cfg.out.join("summary.json"), &summaries)?;
    for s in &summaries {
        println!("{}\t{}\tfval {:e}\tgradf {:e}\titer {}", s.label, s.termination, s.fval, s.gradf, s.iter);
    }
    Ok(status(&runs.iter().collect::<Vec<_>>(), &cfg.out))
}

fn execute(command: &Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Solve(args) => single(&args.config(None)?),
        Command::Sympeig(args) => single(&args.config(Some(ProblemKind::Sympeig))?),
        Command::Sweep(args) => {
            let cfg = args.config(None)?;
            let runs = experiment::sweep(&cfg, &experiment::sweep_rhos())?;
            many(&cfg, runs, "sweep")
        }
        Command::Compare { axis, run } => {
            let cfg = run.config(None)?;
            let runs = experiment::compare(&cfg, *axis)?;
            many(&cfg, runs, "compare")
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            let out = match &cli.command {
                Command::Solve(a) | Command::Sweep(a) | Command::Sympeig(a) => a.out_hint(),
                Command::Compare { run, .. } => run.out_hint(),
            };
            report::write_error(&out, e.kind(), e.to_string());
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
