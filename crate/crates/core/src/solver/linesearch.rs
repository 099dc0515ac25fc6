//! Trial steps and the non-monotone acceptance test.

use crate::error::{Error, Result};
use crate::matkit::DenseMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepRule {
    Bb1,
    Bb2,
    /// BB1 on odd iterations, BB2 on even ones.
    Abb,
    ModifiedRatio,
}

impl std::str::FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bb1" => Ok(Self::Bb1),
            "bb2" => Ok(Self::Bb2),
            "abb" => Ok(Self::Abb),
            "ratio" | "modified-ratio" | "modifiedratio" => Ok(Self::ModifiedRatio),
            other => Err(Error::InvalidParameter(format!("unknown step rule {other:?}"))),
        }
    }
}

impl std::fmt::Display for StepRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bb1 => "bb1",
            Self::Bb2 => "bb2",
            Self::Abb => "abb",
            Self::ModifiedRatio => "ratio",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchConfig {
    pub beta: f64,
    pub delta: f64,
    pub alpha: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub step_rule: StepRule,
    /// Backtracking cap per iteration.
    pub max_backtracks: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            beta: 1e-4,
            delta: 0.1,
            alpha: 0.85,
            gamma_min: 1e-15,
            gamma_max: 1e15,
            step_rule: StepRule::Abb,
            max_backtracks: 50,
        }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(self.beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0,1), got {}", self.beta)));
        }
        if !open(self.delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0,1], got {}", self.alpha)));
        }
        if !(self.gamma_min > 0.0 && self.gamma_min < self.gamma_max && self.gamma_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < gamma_min < gamma_max, got {} and {}",
                self.gamma_min, self.gamma_max
            )));
        }
        Ok(())
    }

    pub fn clamp<T: Real>(&self, gamma: T) -> T {
        let lo = T::lit(self.gamma_min);
        let hi = T::lit(self.gamma_max);
        if gamma.is_nan() {
            return hi;
        }
        gamma.max(lo).min(hi)
    }
}

/// Data from the previous iterate needed by the BB-type rules.
#[derive(Clone, Debug)]
pub struct StepHistory<'a, T> {
    pub x_prev: &'a DenseMatrix<T>,
    pub x: &'a DenseMatrix<T>,
    pub grad_prev: &'a DenseMatrix<T>,
    pub grad: &'a DenseMatrix<T>,
    pub f_prev: T,
    pub f: T,
    /// `Df(X)[Z]` at the current iterate for the search direction `Z`.
    pub dir_deriv: T,
}

/// Trial step `γ_k` for `k >= 1`, clamped to `[γ_min, γ_max]`. Zero
/// denominators yield `γ_max`.
pub fn trial_step<T: Real>(h: &StepHistory<'_, T>, k: usize, cfg: &LineSearchConfig) -> T {
    let rule = match cfg.step_rule {
        StepRule::Abb if k % 2 == 1 => StepRule::Bb1,
        StepRule::Abb => StepRule::Bb2,
        r => r,
    };
    let ratio = |num: T, den: T| if den == T::zero() { T::infinity() } else { num / den };
    let gamma = match rule {
        StepRule::Bb1 | StepRule::Bb2 => {
            let s = h.x - h.x_prev;
            let y = h.grad - h.grad_prev;
            let sy = s.inner(&y).abs();
            if rule == StepRule::Bb1 {
                ratio(s.inner(&s), sy)
            } else {
                ratio(sy, y.inner(&y))
            }
        }
        StepRule::ModifiedRatio => ratio(T::two() * (h.f - h.f_prev).abs(), h.dir_deriv.abs()),
        StepRule::Abb => unreachable!("resolved above"),
    };
    cfg.clamp(gamma)
}

/// Reference value `c` and weight `q` of the non-monotone rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonMonotoneState<T> {
    pub c: T,
    pub q: T,
}

impl<T: Real> NonMonotoneState<T> {
    /// `q₀ = 1`, `c₀ = f(X⁰)`.
    pub fn new(f0: T) -> Self {
        Self { c: f0, q: T::one() }
    }
}

/// `f_trial <= c + β·t·⟨grad f, Z⟩`.
pub fn nonmonotone_accept<T: Real>(f_trial: T, state: &NonMonotoneState<T>, t: T, inner_grad_dir: T, beta: T) -> bool {
    f_trial <= state.c + beta * t * inner_grad_dir
}

/// `q_k = αq_{k−1} + 1`, `c_k = (αq_{k−1}c_{k−1} + f_k)/q_k`.
pub fn nonmonotone_update<T: Real>(state: &NonMonotoneState<T>, f_new: T, alpha: T) -> NonMonotoneState<T> {
    let aq = alpha * state.q;
    let q = aq + T::one();
    NonMonotoneState {
        c: (aq * state.c + f_new) / q,
        q,
    }
}
