//! Riemannian gradient descent with a non-monotone backtracking line search.

mod linesearch;

pub use linesearch::{
    nonmonotone_accept, nonmonotone_update, trial_step, LineSearchConfig, NonMonotoneState,
    StepHistory, StepRule,
};

use std::time::Instant;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::manifold::{feasibility_tol, riemannian_gradient, MetricSpec, SymplecticPoint};
use crate::problems::Problem;
use crate::retraction::{DescentStep, RetractionKind};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopConfig {
    pub eps_grad: f64,
    pub eps_x: f64,
    pub eps_f: f64,
    pub max_iter: usize,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self {
            eps_grad: 1e-5,
            eps_x: 1e-5,
            eps_f: 1e-8,
            max_iter: 1000,
        }
    }
}

impl StopConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_grad", self.eps_grad), ("eps_x", self.eps_x), ("eps_f", self.eps_f)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    GradTol,
    StepAndFunTol,
    MaxIter,
    LineSearchFailure,
}

impl Termination {
    pub fn converged(self) -> bool {
        matches!(self, Self::GradTol | Self::StepAndFunTol)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GradTol => "GradTol",
            Self::StepAndFunTol => "StepAndFunTol",
            Self::MaxIter => "MaxIter",
            Self::LineSearchFailure => "LineSearchFailure",
        })
    }
}

/// One logged iterate. Row 0 is the starting point (`t = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRow {
    pub iter: usize,
    pub f: f64,
    /// `‖grad f‖_F`.
    pub gradf: f64,
    /// `‖XᵀJX − J‖_F`.
    pub feasi: f64,
    /// Accepted step size that produced this iterate.
    pub t: f64,
    pub backtracks: usize,
    pub c: f64,
    pub q: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub cost: usize,
    pub egrad: usize,
    pub backtracks: usize,
    pub domain_errors: usize,
    /// Trial points rejected because their feasibility residual exceeded the bound.
    pub infeasible_trials: usize,
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub rows: Vec<IterRow>,
    pub termination: Termination,
    pub x: SymplecticPoint<T>,
    pub evals: EvalCounts,
    /// Set when some iterate's feasibility residual exceeded the bound.
    pub degraded: bool,
    pub elapsed_secs: f64,
}

impl<T> SolveReport<T> {
    pub fn last(&self) -> &IterRow {
        self.rows.last().expect("report holds at least the starting row")
    }

    pub fn iterations(&self) -> usize {
        self.last().iter
    }
}

/// Runs the method from `x0` until one of the stopping rules fires.
pub fn solve<T: Real, P: Problem<T> + ?Sized>(
    problem: &P,
    x0: &SymplecticPoint<T>,
    metric: MetricSpec,
    retraction: RetractionKind,
    ls: &LineSearchConfig,
    stop: &StopConfig,
) -> Result<SolveReport<T>> {
    ls.validate()?;
    stop.validate()?;
    let (n, p) = problem.dims();
    if x0.n() != n || x0.p() != p {
        return Err(Error::dims(
            "solve",
            format!("point on Sp({}, {})", 2 * p, 2 * n),
            format!("{}x{}", x0.matrix().rows(), x0.matrix().cols()),
        ));
    }
    let started = Instant::now();
    let beta = T::lit(ls.beta);
    let delta = T::lit(ls.delta);
    let alpha = T::lit(ls.alpha);
    let gamma_min = T::lit(ls.gamma_min);
    let feas_tol = feasibility_tol::<T>();
    let sqrt_2n = T::from_usize_lossy(2 * n).sqrt();

    let mut evals = EvalCounts::default();
    let mut x = x0.clone();
    let mut f = problem.cost(x.matrix());
    let mut egrad = problem.egrad(x.matrix());
    evals.cost += 1;
    evals.egrad += 1;
    let mut rg = riemannian_gradient(&x, &egrad, metric)?;
    let mut state = NonMonotoneState::new(f);
    let mut degraded = false;

    let row = |k: usize, f: T, gradf: T, feasi: T, t: T, bt: usize, st: &NonMonotoneState<T>| IterRow {
        iter: k,
        f: f.to_f64_lossy(),
        gradf: gradf.to_f64_lossy(),
        feasi: feasi.to_f64_lossy(),
        t: t.to_f64_lossy(),
        backtracks: bt,
        c: st.c.to_f64_lossy(),
        q: st.q.to_f64_lossy(),
    };
    let feasi0 = x.residual();
    degraded |= !(feasi0 <= feas_tol);
    let mut gradf = rg.grad.matrix().frobenius_norm();
    let mut rows = vec![row(0, f, gradf, feasi0, T::zero(), 0, &state)];

    // Previous iterate, gradient and value for the BB rules.
    let mut prev: Option<(SymplecticPoint<T>, crate::matkit::DenseMatrix<T>, T)> = None;
    let mut small_step = false;
    let mut k = 0usize;

    let termination = loop {
        if gradf <= T::lit(stop.eps_grad) {
            break Termination::GradTol;
        }
        if small_step {
            break Termination::StepAndFunTol;
        }
        if k >= stop.max_iter {
            break Termination::MaxIter;
        }

        // Df(X)[−grad] = −g(grad, grad) = −⟨∇f̄, grad⟩.
        let dir_deriv = -egrad.inner(rg.grad.matrix());
        let gamma = match &prev {
            None => {
                let g0 = f.abs();
                ls.clamp(if g0 > T::zero() && g0.is_finite() { g0 } else { T::one() })
            }
            Some((xp, gp, fp)) => trial_step(
                &StepHistory {
                    x_prev: xp.matrix(),
                    x: x.matrix(),
                    grad_prev: gp,
                    grad: rg.grad.matrix(),
                    f_prev: *fp,
                    f,
                    dir_deriv,
                },
                k,
                ls,
            ),
        };

        let step = DescentStep::new(retraction, &x, &rg)?;
        let mut t = gamma;
        let mut accepted = None;
        for h in 0..=ls.max_backtracks {
            if h > 0 {
                t = t * delta;
                evals.backtracks += 1;
                if t < gamma_min {
                    break;
                }
            }
            let y = match step.retract(t) {
                Ok(y) => y,
                Err(Error::Domain { .. }) => {
                    evals.domain_errors += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            // Very long steps lose feasibility to cancellation; shrink like a domain error.
            if !(y.residual() <= feas_tol) {
                evals.infeasible_trials += 1;
                continue;
            }
            let f_trial = problem.cost(y.matrix());
            evals.cost += 1;
            if f_trial.is_finite() && nonmonotone_accept(f_trial, &state, t, dir_deriv, beta) {
                accepted = Some((y, f_trial, h));
                break;
            }
        }
        let Some((y, f_new, backtracks)) = accepted else {
            warn!("line search failed at iteration {k} (gamma {:e})", gamma.to_f64_lossy());
            break Termination::LineSearchFailure;
        };

        let dx = (y.matrix() - x.matrix()).frobenius_norm() / sqrt_2n;
        let df = (f_new - f).abs() / (f.abs() + T::one());
        small_step = dx < T::lit(stop.eps_x) && df < T::lit(stop.eps_f);

        let new_egrad = problem.egrad(y.matrix());
        evals.egrad += 1;
        let new_rg = riemannian_gradient(&y, &new_egrad, metric)?;
        prev = Some((x, rg.grad.into_matrix(), f));
        x = y;
        f = f_new;
        egrad = new_egrad;
        rg = new_rg;
        state = nonmonotone_update(&state, f, alpha);
        k += 1;

        gradf = rg.grad.matrix().frobenius_norm();
        let feasi = x.residual();
        if !(feasi <= feas_tol) && !degraded {
            warn!("feasibility residual {:e} at iteration {k}", feasi.to_f64_lossy());
            degraded = true;
        }
        rows.push(row(k, f, gradf, feasi, t, backtracks, &state));
        debug!(
            "iter {k}: f={:e} gradf={:e} t={:e} bt={backtracks}",
            f.to_f64_lossy(),
            gradf.to_f64_lossy(),
            t.to_f64_lossy()
        );
    };

    Ok(SolveReport {
        rows,
        termination,
        x,
        evals,
        degraded,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::MetricVariant;
    use crate::matkit::{rand_gaussian, rand_symplectic, DenseMatrix, InitStrategy};
    use crate::problems::{symplectic_eig_oracle, BrockettTrace, NearestSymplectic};
    use crate::problems::spd_with_decay;

    #[test]
    fn feasible_target_stops_at_iteration_zero() {
        let x = rand_symplectic::<f64>(3, 1, InitStrategy::RightExponential, 1).unwrap();
        let prob = NearestSymplectic::new(x.matrix().clone()).unwrap();
        let rep = solve(
            &prob,
            &x,
            MetricSpec::default(),
            RetractionKind::CayleyLowRank,
            &LineSearchConfig::default(),
            &StopConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.termination, Termination::GradTol);
        assert_eq!(rep.iterations(), 0);
        assert_eq!(rep.rows.len(), 1);
    }

    #[test]
    fn reference_value_decreases_and_dominates() {
        let a = rand_gaussian::<f64>(12, 4, 3).scale(0.3);
        let prob = NearestSymplectic::new(a).unwrap();
        let x0 = SymplecticPoint::new(crate::matkit::canonical(6, 2)).unwrap();
        for kind in [RetractionKind::QuasiGeodesic, RetractionKind::CayleyLowRank] {
            let rep = solve(
                &prob,
                &x0,
                MetricSpec::default(),
                kind,
                &LineSearchConfig::default(),
                &StopConfig::default(),
            )
            .unwrap();
            assert!(rep.termination.converged(), "{kind}: {}", rep.termination);
            for w in rep.rows.windows(2) {
                assert!(w[1].c < w[0].c);
                assert!(w[1].f <= w[1].c);
                assert_eq!(w[1].iter, w[0].iter + 1);
            }
            assert!(!rep.degraded);
        }
    }

    #[test]
    fn brockett_reaches_the_trace_bound() {
        let a: DenseMatrix<f64> = spd_with_decay(4, 1.1, 5).unwrap();
        let d = symplectic_eig_oracle(&a).unwrap();
        let bound = 2.0 * d[0];
        let prob = BrockettTrace::new(&a, 1).unwrap();
        let x0 = SymplecticPoint::new(crate::matkit::canonical(4, 1)).unwrap();
        for variant in [MetricVariant::I, MetricVariant::II] {
            let stop = StopConfig {
                eps_grad: 1e-8,
                eps_x: 1e-12,
                eps_f: 1e-15,
                ..Default::default()
            };
            let rep = solve(
                &prob,
                &x0,
                MetricSpec::with_default_rho(variant),
                RetractionKind::CayleyLowRank,
                &LineSearchConfig::default(),
                &stop,
            )
            .unwrap();
            let f = rep.last().f;
            assert!(f >= bound - 1e-9 && f <= bound + 1e-7, "{variant}: {f} vs {bound}");
        }
    }

    #[test]
    fn overflowing_quasi_geodesic_trials_are_shrunk() {
        // γ₀ = f(X⁰) is large here, so the first trial exponential overflows.
        let a: DenseMatrix<f64> = spd_with_decay(10, 1.01, 1).unwrap();
        let prob = BrockettTrace::new(&a, 2).unwrap();
        let x0 = rand_symplectic::<f64>(10, 2, InitStrategy::RightExponential, 3).unwrap();
        let rep = solve(
            &prob,
            &x0,
            MetricSpec::default(),
            RetractionKind::QuasiGeodesic,
            &LineSearchConfig::default(),
            &StopConfig::default(),
        )
        .unwrap();
        assert!(rep.evals.domain_errors > 0);
        assert!(rep.termination.converged(), "{}", rep.termination);
    }

    #[test]
    fn rejects_mismatched_start() {
        let prob = NearestSymplectic::new(rand_gaussian::<f64>(6, 2, 1)).unwrap();
        let x0 = SymplecticPoint::new(crate::matkit::canonical(2, 1)).unwrap();
        let err = solve(
            &prob,
            &x0,
            MetricSpec::default(),
            RetractionKind::CayleyLowRank,
            &LineSearchConfig::default(),
            &StopConfig::default(),
        );
        assert!(err.is_err());
    }
}
