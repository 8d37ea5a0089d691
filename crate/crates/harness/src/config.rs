//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! oracle.kind = fixed          # fixed | random | exact_adversary | approx_adversary
//! oracle.matrix = games/pennies.json
//! oracle.T = 2                 # approx_adversary horizon
//! learner.kind = optimistic_mwu
//! learner.T = 256
//! learner.eta = 0.25
//! learner.seed = 7
//! k = 2
//! mode = float                 # exact | float
//! repetitions = 4
//! output.dir = out/
//! bounds.c = 8
//! ```
//!
//! `MQL_SEED` in the environment supplies the default for `learner.seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use mql_core::learners::{LearnerConfig, LearnerKind, DEFAULT_ETA};
use mql_core::Mode;

use crate::bounds::DEFAULT_C;

pub const SEED_ENV: &str = "MQL_SEED";

const KEYS: &[&str] = &[
    "oracle.kind",
    "oracle.matrix",
    "oracle.T",
    "learner.kind",
    "learner.T",
    "learner.eta",
    "learner.seed",
    "k",
    "mode",
    "repetitions",
    "output.dir",
    "bounds.c",
];

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSetup {
    /// Hidden matrix read from a file.
    Fixed {
        matrix: PathBuf,
    },
    /// A fresh random matrix in `[-1, 1]` per repetition, drawn from the seed.
    Random,
    ExactAdversary,
    ApproxAdversary {
        horizon: usize,
    },
}

impl OracleSetup {
    pub fn name(&self) -> &'static str {
        match self {
            OracleSetup::Fixed { .. } => "fixed",
            OracleSetup::Random => "random",
            OracleSetup::ExactAdversary => "exact_adversary",
            OracleSetup::ApproxAdversary { .. } => "approx_adversary",
        }
    }

    pub fn is_adversary(&self) -> bool {
        matches!(
            self,
            OracleSetup::ExactAdversary | OracleSetup::ApproxAdversary { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub oracle: OracleSetup,
    pub learner: LearnerConfig,
    /// Required for adversaries and random games; read from the file for
    /// fixed games.
    pub k: Option<usize>,
    pub mode: Mode,
    pub repetitions: usize,
    pub output_dir: Option<PathBuf>,
    pub bounds_c: f64,
}

/// Raw key/value pairs, later entries winning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            raw.set_pair(line)
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Applies one `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> anyhow::Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key = value, got `{pair}`"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown config key `{key}` (known: {})", KEYS.join(", "));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("bad value for {key}: {e}"))
            })
            .transpose()
    }

    pub fn build(&self) -> anyhow::Result<ExperimentConfig> {
        let oracle = match self.get("oracle.kind").unwrap_or("fixed") {
            "fixed" => OracleSetup::Fixed {
                matrix: self
                    .get("oracle.matrix")
                    .map(PathBuf::from)
                    .ok_or_else(|| anyhow!("oracle.kind = fixed needs oracle.matrix"))?,
            },
            "random" => OracleSetup::Random,
            "exact_adversary" | "exact" => OracleSetup::ExactAdversary,
            "approx_adversary" | "approx" => OracleSetup::ApproxAdversary {
                horizon: self
                    .parsed("oracle.T")?
                    .ok_or_else(|| anyhow!("approx_adversary needs oracle.T"))?,
            },
            other => bail!("unknown oracle.kind `{other}`"),
        };
        let kind: LearnerKind = self.parsed("learner.kind")?.unwrap_or(LearnerKind::Uniform);
        let default_t = match &oracle {
            OracleSetup::ApproxAdversary { horizon } => *horizon,
            _ => 0,
        };
        let mut learner = LearnerConfig::new(kind, self.parsed("learner.T")?.unwrap_or(default_t));
        learner.eta = self.parsed("learner.eta")?.unwrap_or(DEFAULT_ETA);
        learner.seed = match self.parsed("learner.seed")? {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|e| anyhow!("bad {SEED_ENV}: {e}"))?,
                Err(_) => 0,
            },
        };
        let mode_default = if oracle.is_adversary() {
            Mode::ExactRational
        } else {
            Mode::Float
        };
        let config = ExperimentConfig {
            oracle,
            learner,
            k: self.parsed("k")?,
            mode: self.parsed("mode")?.unwrap_or(mode_default),
            repetitions: self.parsed("repetitions")?.unwrap_or(1),
            output_dir: self.get("output.dir").map(PathBuf::from),
            bounds_c: self.parsed("bounds.c")?.unwrap_or(DEFAULT_C),
        };
        config.validate()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.oracle.is_adversary() && self.mode != Mode::ExactRational {
            bail!("{} requires mode = exact", self.oracle.name());
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if !matches!(self.oracle, OracleSetup::Fixed { .. }) && self.k.is_none() {
            bail!("{} needs k", self.oracle.name());
        }
        if !(self.bounds_c > 0.0) {
            bail!("bounds.c must be positive");
        }
        if let Some(k) = self.k {
            self.learner.validate(k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let raw = RawConfig::parse(
            "# demo\noracle.kind = approx_adversary\noracle.T = 2\nk = 8\nlearner.kind = omwu # inline\n",
        )
        .unwrap();
        let c = raw.build().unwrap();
        assert_eq!(c.oracle, OracleSetup::ApproxAdversary { horizon: 2 });
        assert_eq!(c.learner.kind, LearnerKind::OptimisticMwu);
        assert_eq!(c.learner.horizon, 2);
        assert_eq!(c.mode, Mode::ExactRational);
    }

    #[test]
    fn rejects_float_adversary_and_unknown_keys() {
        let mut raw =
            RawConfig::parse("oracle.kind = exact_adversary\nk = 6\nmode = float").unwrap();
        assert!(raw.build().is_err());
        raw.set("mode", "exact").unwrap();
        assert!(raw.build().is_ok());
        assert!(raw.set("learner.rate", "1").is_err());
        assert!(RawConfig::parse("just words").is_err());
    }
}
