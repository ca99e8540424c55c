//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::{CaseStudySpec, DisconnectedPolicy, SweepSpec, SweepVariable, Topology, DEFAULT_MAX_RETRIES};
use crate::analytic::{CmrgForm, EvalOptions, FloorPolicy};
use crate::error::{Error, Result};

/// Parsed configuration: later assignments override earlier ones, so
/// command-line overrides can simply be inserted after the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (idx, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "empty key".into(),
                });
            }
            map.set(key, value.trim());
        }
        Ok(map)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_value(key, v),
        }
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value(key, s))
                    .collect()
            })
            .transpose()
    }

    fn check_known(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::domain(format!("unknown configuration key `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn policy(&self) -> Result<DisconnectedPolicy> {
        let max_retries = self.parsed("max_retries", DEFAULT_MAX_RETRIES)?;
        match self.get("policy").unwrap_or("regenerate") {
            "regenerate" => Ok(DisconnectedPolicy::Regenerate { max_retries }),
            "reachable-only" => Ok(DisconnectedPolicy::ReachableOnly),
            other => Err(Error::domain(format!("unknown policy `{other}`"))),
        }
    }

    pub fn eval(&self) -> Result<EvalOptions<f64>> {
        let mut opts = EvalOptions::default();
        opts.degree_floor = self.parsed("degree_floor", opts.degree_floor)?;
        opts.floor_policy = match self.get("floor_policy").unwrap_or("error") {
            "error" => FloorPolicy::Error,
            "clamp" => FloorPolicy::Clamp,
            other => return Err(Error::domain(format!("unknown floor policy `{other}`"))),
        };
        opts.cmrg_form = match self.get("cmrg_form").unwrap_or("unrolled") {
            "unrolled" => CmrgForm::Unrolled,
            "as-printed" => CmrgForm::AsPrinted,
            other => return Err(Error::domain(format!("unknown CM-RG form `{other}`"))),
        };
        Ok(opts)
    }

    fn tiered_defaults(&self) -> Result<(usize, usize, f64, f64)> {
        Ok((
            self.parsed("n1", 20)?,
            self.parsed("n2", 100)?,
            self.parsed("p11", 0.5)?,
            self.parsed("p12", 0.25)?,
        ))
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::domain(format!("bad value `{value}` for `{key}`")))
}

const COMMON_KEYS: &[&str] = &[
    "runs",
    "seed",
    "lambda",
    "policy",
    "max_retries",
    "degree_floor",
    "floor_policy",
    "cmrg_form",
];

const SWEEP_KEYS: &[&str] = &[
    "topology", "sweep", "values", "n", "k", "p_edge", "exponent", "d_min", "d_max", "n1", "n2", "k1", "p11", "p12",
    "p22",
];

const CASE_STUDY_KEYS: &[&str] = &["n1", "n2", "p11", "p12", "p22_values", "k1_values"];

impl Topology {
    /// Reads `topology` (`full-mesh`, `poisson`, `power-law` or `tiered`)
    /// and its parameters, defaulting to the N = 300 settings.
    pub fn from_config(cfg: &ConfigMap) -> Result<Self> {
        let n = cfg.parsed("n", 300)?;
        let k = cfg.parsed("k", 1)?;
        Ok(match cfg.get("topology").unwrap_or("full-mesh") {
            "full-mesh" => Topology::FullMesh { n, k },
            "poisson" => Topology::Poisson {
                n,
                k,
                p_edge: cfg.parsed("p_edge", 1.0 / 60.0)?,
            },
            "power-law" => Topology::PowerLaw {
                n,
                k,
                exponent: cfg.parsed("exponent", 2.0)?,
                d_min: cfg.parsed("d_min", 5)?,
                d_max: cfg.parsed("d_max", 200)?,
            },
            "tiered" => {
                let (n1, n2, p11, p12) = cfg.tiered_defaults()?;
                Topology::Tiered {
                    n1,
                    n2,
                    k1: cfg.parsed("k1", 1)?,
                    p11,
                    p12,
                    p22: cfg.parsed("p22", 0.2)?,
                }
            }
            other => return Err(Error::domain(format!("unknown topology `{other}`"))),
        })
    }
}

impl SweepSpec {
    /// Builds a sweep from configuration keys. Unset keys default to the
    /// N = 300 penetration sweep with 200 runs per point.
    pub fn from_config(cfg: &ConfigMap) -> Result<Self> {
        let known: Vec<&str> = COMMON_KEYS.iter().chain(SWEEP_KEYS).copied().collect();
        cfg.check_known(&known)?;
        let topology = Topology::from_config(cfg)?;
        let variable = match cfg.get("sweep") {
            None if topology.is_tiered() => SweepVariable::P22,
            None | Some("k") => SweepVariable::K,
            Some("p22") => SweepVariable::P22,
            Some("k1") => SweepVariable::K1,
            Some(other) => return Err(Error::domain(format!("unknown sweep variable `{other}`"))),
        };
        let values = match cfg.list("values")? {
            Some(v) => v,
            None if variable == SweepVariable::K => SweepSpec::penetration_grid(),
            None => {
                return Err(Error::domain(format!(
                    "sweep over `{}` needs `values`",
                    variable.as_str()
                )))
            }
        };
        let spec = SweepSpec {
            topology,
            variable,
            values,
            runs_per_point: cfg.parsed("runs", 200)?,
            master_seed: cfg.parsed("seed", 1)?,
            lambda: cfg.parsed("lambda", 1.0)?,
            policy: cfg.policy()?,
            eval: cfg.eval()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl CaseStudySpec {
    /// Builds the tier-1/tier-2 grid from configuration keys; defaults are
    /// `N1 = 20`, `N2 = 100`, `p11 = 0.5`, `p12 = 0.25`.
    pub fn from_config(cfg: &ConfigMap) -> Result<Self> {
        let known: Vec<&str> = COMMON_KEYS.iter().chain(CASE_STUDY_KEYS).copied().collect();
        cfg.check_known(&known)?;
        let (n1, n2, p11, p12) = cfg.tiered_defaults()?;
        let spec = CaseStudySpec {
            n1,
            n2,
            p11,
            p12,
            lambda: cfg.parsed("lambda", 1.0)?,
            p22_values: cfg.list("p22_values")?.unwrap_or_else(|| vec![0.1, 0.3, 0.5]),
            k1_values: cfg.list("k1_values")?.unwrap_or_else(|| vec![1, 5, 10, 20]),
            runs_per_point: cfg.parsed("runs", 200)?,
            master_seed: cfg.parsed("seed", 1)?,
            policy: cfg.policy()?,
            eval: cfg.eval()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}
