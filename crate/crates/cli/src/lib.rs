//! Experiment runner: strict configuration, named experiments over the core
//! library, deterministic CSV/JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{Config, KeySpec, RawConfig};
pub use error::RunError;
pub use report::{Outcome, Record};

/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "FOCKSCOPE_OUT";

/// Everything an experiment may read while it runs.
pub struct Context {
    pub config: Config,
    pool: rayon::ThreadPool,
}

impl Context {
    pub fn new(config: Config) -> Result<Self, RunError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads())
            .build()
            .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
        Ok(Self { config, pool })
    }

    /// Independent stream `stream` of the run seed; the same stream yields the
    /// same numbers regardless of the thread count.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let seed = self.config.seed().expect("randomized experiments are only started with a seed");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }

    /// Order-preserving parallel map on the run's pool.
    pub fn par_map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect())
    }

    /// [`Context::par_map`] over fallible work; the first error in item order wins.
    pub fn try_par_map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>, RunError>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> Result<R, RunError> + Sync + Send,
    {
        self.par_map(items, f).into_iter().collect()
    }
}

pub struct Experiment {
    pub name: &'static str,
    /// One line on what is checked.
    pub about: &'static str,
    pub keys: &'static [KeySpec],
    pub randomized: bool,
    pub run: fn(&Context) -> Result<Outcome, RunError>,
}

pub fn find(name: &str) -> Result<&'static Experiment, RunError> {
    experiments::ALL.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = experiments::ALL.iter().map(|e| e.name).collect();
        RunError::Usage(format!("unknown experiment `{name}`; known: {}", names.join(", ")))
    })
}

/// Command-line values that take precedence over the configuration file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Resolves the configuration for `exp` and runs it, without writing anything.
pub fn execute(exp: &Experiment, raw: &RawConfig, ov: &Overrides) -> Result<(Outcome, report::RunInfo<'static>), RunError> {
    let mut raw = raw.clone();
    if let Some(s) = ov.seed {
        raw.set("seed", s.to_string());
    }
    if let Some(t) = ov.threads {
        raw.set("threads", t.to_string());
    }
    let config = Config::resolve(&raw, exp.keys)?;
    if exp.randomized && config.seed().is_none() {
        return Err(RunError::Config(format!("experiment `{}` is randomized and needs a seed (`seed = …` or --seed)", exp.name)));
    }
    let info = report::RunInfo { experiment: exp.name, seed: config.seed(), threads: config.threads(), config: config.echo() };
    let ctx = Context::new(config)?;
    let outcome = (exp.run)(&ctx)?;
    if outcome.records.is_empty() {
        return Err(RunError::Precondition(format!("experiment `{}` produced no results", exp.name)));
    }
    Ok((outcome, info))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violations(usize),
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violations(_) => 2,
        }
    }
}

/// Runs an experiment and writes its artifacts into `out`.
pub fn run_experiment(name: &str, config_text: &str, out: &Path, ov: &Overrides) -> Result<(Status, Outcome), RunError> {
    let exp = find(name)?;
    let raw = RawConfig::parse(config_text)?;
    let (outcome, info) = execute(exp, &raw, ov)?;
    report::emit(out, &info, &outcome)?;
    let v = outcome.violations().len();
    let status = if v == 0 { Status::Pass } else { Status::Violations(v) };
    Ok((status, outcome))
}

/// `FOCKSCOPE_OUT` wins over `--out`.
pub fn resolve_out(cli: Option<PathBuf>, env: Option<OsString>) -> Result<PathBuf, RunError> {
    match env.filter(|v| !v.is_empty()) {
        Some(v) => Ok(PathBuf::from(v)),
        None => cli.ok_or_else(|| RunError::Usage(format!("no output directory: pass --out or set {OUT_ENV}"))),
    }
}

pub fn exit_code(result: &Result<Status, RunError>) -> u8 {
    match result {
        Ok(s) => s.exit_code(),
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_out() {
        let p = resolve_out(Some("a".into()), Some("b".into())).unwrap();
        assert_eq!(p, PathBuf::from("b"));
        assert_eq!(resolve_out(Some("a".into()), None).unwrap(), PathBuf::from("a"));
        assert!(matches!(resolve_out(None, None), Err(RunError::Usage(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(Status::Pass)), 0);
        assert_eq!(exit_code(&Ok(Status::Violations(3))), 2);
        assert_eq!(exit_code(&Err(RunError::Config("x".into()))), 1);
    }

    #[test]
    fn unknown_experiment_is_usage_error() {
        assert!(matches!(find("nope"), Err(RunError::Usage(_))));
    }

    #[test]
    fn randomized_experiment_needs_seed() {
        let exp = find("mollifier").unwrap();
        assert!(exp.randomized);
        let err = execute(exp, &RawConfig::default(), &Overrides::default()).err().unwrap();
        assert!(matches!(err, RunError::Config(ref m) if m.contains("seed")), "{err}");
    }
}
