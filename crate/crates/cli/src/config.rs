//! Run configuration: a flat `key = value` file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spstiefel::matkit::InitStrategy;
use spstiefel::problems::Gallery;
use spstiefel::{LineSearchConfig, MetricSpec, MetricVariant, RetractionKind, StepRule, StopConfig};

use crate::{fmt_f64, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Nearest,
    Brockett,
    Mean,
    Sympeig,
}

impl FromStr for ProblemKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "brockett" => Ok(Self::Brockett),
            "mean" => Ok(Self::Mean),
            "sympeig" => Ok(Self::Sympeig),
            other => Err(CliError::Config(format!(
                "unknown problem {other:?} (expected nearest, brockett, mean or sympeig)"
            ))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Nearest => "nearest",
            Self::Brockett => "brockett",
            Self::Mean => "mean",
            Self::Sympeig => "sympeig",
        })
    }
}

fn init_name(s: InitStrategy) -> &'static str {
    match s {
        InitStrategy::Canonical => "canonical",
        InitStrategy::RightExponential => "rexp",
        InitStrategy::FullExponential => "full",
    }
}

fn parse_init(s: &str) -> Result<InitStrategy, CliError> {
    match s {
        "canonical" | "1" => Ok(InitStrategy::Canonical),
        "rexp" | "2" => Ok(InitStrategy::RightExponential),
        "full" | "3" => Ok(InitStrategy::FullExponential),
        other => Err(CliError::Config(format!("unknown init {other:?} (expected canonical, rexp or full)"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub p: usize,
    /// Matrix used by `sympeig` when no input file is given.
    pub gallery: Gallery,
    /// Spectral decay of the generated Brockett matrix.
    pub lambda: f64,
    /// Sample count and spread of the generated mean-problem cloud.
    pub samples: usize,
    pub spread: f64,
    pub init: InitStrategy,
    pub variant: MetricVariant,
    /// `None` selects the variant's default.
    pub rho: Option<f64>,
    pub retraction: RetractionKind,
    pub line_search: LineSearchConfig,
    pub stop: StopConfig,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Nearest,
            n: 10,
            p: 2,
            gallery: Gallery::Lehmer,
            lambda: 1.01,
            samples: 100,
            spread: 0.1,
            init: InitStrategy::RightExponential,
            variant: MetricVariant::I,
            rho: None,
            retraction: RetractionKind::CayleyLowRank,
            line_search: LineSearchConfig::default(),
            stop: StopConfig::default(),
            seed: 1,
            input: None,
            out: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value {value:?} for {key}")))
}

fn via<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

impl RunConfig {
    /// Applies one setting; dashes in `key` are read as underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let k = key.as_str();
        match k {
            "problem" => self.problem = value.parse()?,
            "n" => self.n = parse(k, value)?,
            "p" => self.p = parse(k, value)?,
            "gallery" => self.gallery = via(value.parse())?,
            "lambda" => self.lambda = parse(k, value)?,
            "samples" => self.samples = parse(k, value)?,
            "spread" => self.spread = parse(k, value)?,
            "init" => self.init = parse_init(value)?,
            "variant" => self.variant = via(value.parse())?,
            "rho" => self.rho = if value == "default" { None } else { Some(parse(k, value)?) },
            "retraction" => self.retraction = via(value.parse())?,
            "alpha" => self.line_search.alpha = parse(k, value)?,
            "beta" => self.line_search.beta = parse(k, value)?,
            "delta" => self.line_search.delta = parse(k, value)?,
            "gamma_min" => self.line_search.gamma_min = parse(k, value)?,
            "gamma_max" => self.line_search.gamma_max = parse(k, value)?,
            "step_rule" => self.line_search.step_rule = via(value.parse::<StepRule>())?,
            "max_backtracks" => self.line_search.max_backtracks = parse(k, value)?,
            "eps_grad" => self.stop.eps_grad = parse(k, value)?,
            "eps_x" => self.stop.eps_x = parse(k, value)?,
            "eps_f" => self.stop.eps_f = parse(k, value)?,
            "max_iter" => self.stop.max_iter = parse(k, value)?,
            "seed" => self.seed = parse(k, value)?,
            "input" => self.input = (!value.is_empty()).then(|| PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got {raw:?}", no + 1)))?;
            self.set(k, v)
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn metric(&self) -> Result<MetricSpec, CliError> {
        via(MetricSpec::new(self.rho.unwrap_or_else(|| self.variant.default_rho()), self.variant))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.metric()?;
        via(self.line_search.validate())?;
        via(self.stop.validate())?;
        if let Some(input) = &self.input {
            if !input.is_file() {
                return Err(CliError::Config(format!("input file {} does not exist", input.display())));
            }
        }
        if self.input.is_none() && (self.p == 0 || self.p > self.n) {
            return Err(CliError::Config(format!("need 1 <= p <= n, got n={} p={}", self.n, self.p)));
        }
        if self.problem == ProblemKind::Mean && self.samples == 0 {
            return Err(CliError::Config("samples must be positive".into()));
        }
        Ok(())
    }

    /// Every setting as text, in a form `set` accepts back.
    pub fn entries(&self) -> BTreeMap<&'static str, String> {
        let ls = &self.line_search;
        let st = &self.stop;
        BTreeMap::from([
            ("problem", self.problem.to_string()),
            ("n", self.n.to_string()),
            ("p", self.p.to_string()),
            ("gallery", self.gallery.to_string()),
            ("lambda", fmt_f64(self.lambda)),
            ("samples", self.samples.to_string()),
            ("spread", fmt_f64(self.spread)),
            ("init", init_name(self.init).to_string()),
            ("variant", self.variant.to_string()),
            ("rho", self.rho.map_or("default".into(), fmt_f64)),
            ("retraction", self.retraction.to_string()),
            ("alpha", fmt_f64(ls.alpha)),
            ("beta", fmt_f64(ls.beta)),
            ("delta", fmt_f64(ls.delta)),
            ("gamma_min", fmt_f64(ls.gamma_min)),
            ("gamma_max", fmt_f64(ls.gamma_max)),
            ("step_rule", ls.step_rule.to_string()),
            ("max_backtracks", ls.max_backtracks.to_string()),
            ("eps_grad", fmt_f64(st.eps_grad)),
            ("eps_x", fmt_f64(st.eps_x)),
            ("eps_f", fmt_f64(st.eps_f)),
            ("max_iter", st.max_iter.to_string()),
            ("seed", self.seed.to_string()),
            ("input", self.input.as_ref().map_or(String::new(), |p| p.display().to_string())),
            ("out", self.out.display().to_string()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nproblem = brockett\nn=6 # trailing\np = 3\nstep-rule = bb2\n\nrho = 0.25\n")
            .unwrap();
        c.set("n", "8").unwrap();
        assert_eq!((c.problem, c.n, c.p), (ProblemKind::Brockett, 8, 3));
        assert_eq!(c.line_search.step_rule, StepRule::Bb2);
        assert_eq!(c.metric().unwrap().rho(), 0.25);
        c.validate().unwrap();
    }

    #[test]
    fn entries_round_trip() {
        let mut c = RunConfig::default();
        c.set("variant", "II").unwrap();
        c.set("eps_grad", "1e-7").unwrap();
        let mut d = RunConfig::default();
        for (k, v) in c.entries() {
            d.set(k, &v).unwrap();
        }
        assert_eq!(c, d);
    }

    #[test]
    fn bad_settings_are_rejected() {
        let mut c = RunConfig::default();
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("n", "ten").is_err());
        assert!(c.apply_text("n 4").is_err());
        c.set("rho", "-1").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("input", "/nonexistent/file.mtx").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("p", "11").unwrap();
        assert!(c.validate().is_err());
    }
}
