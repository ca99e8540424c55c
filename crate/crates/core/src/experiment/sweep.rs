use serde::{Deserialize, Serialize};

use super::{relative_error, simulate_ensemble, DisconnectedPolicy, Topology};
use crate::analytic::EvalOptions;
use crate::error::{Error, Result};
use crate::sim::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// SDN penetration `k/N`; the point uses `k = max(1, round(N * value))`.
    K,
    /// Tier-2 peering probability of a tiered template.
    P22,
    /// Tier-1 cluster size of a tiered template.
    K1,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::K => "k",
            SweepVariable::P22 => "p22",
            SweepVariable::K1 => "k1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub topology: Topology,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub runs_per_point: usize,
    pub master_seed: u64,
    pub lambda: f64,
    pub policy: DisconnectedPolicy,
    pub eval: EvalOptions<f64>,
}

impl SweepSpec {
    /// Default penetration grid `0.0, 0.1, ..., 1.0`.
    pub fn penetration_grid() -> Vec<f64> {
        (0..=10).map(|i| i as f64 / 10.0).collect()
    }

    pub fn new(topology: Topology, values: Vec<f64>, runs_per_point: usize, master_seed: u64) -> Self {
        let variable = if topology.is_tiered() {
            SweepVariable::P22
        } else {
            SweepVariable::K
        };
        Self {
            topology,
            variable,
            values,
            runs_per_point,
            master_seed,
            lambda: 1.0,
            policy: DisconnectedPolicy::default(),
            eval: EvalOptions::default(),
        }
    }

    /// The topology for one sweep value.
    pub fn instantiate(&self, value: f64) -> Result<Topology> {
        let mut topo = self.topology.clone();
        match (self.variable, &mut topo) {
            (
                SweepVariable::K,
                Topology::FullMesh { n, k } | Topology::Poisson { n, k, .. } | Topology::PowerLaw { n, k, .. },
            ) => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::domain(format!("penetration {value} outside [0, 1]")));
                }
                *k = ((*n as f64 * value).round() as usize).max(1);
            }
            (SweepVariable::P22, Topology::Tiered { p22, .. }) => *p22 = value,
            (SweepVariable::K1, Topology::Tiered { k1, .. }) => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::domain(format!("k1 = {value} is not a positive integer")));
                }
                *k1 = value as usize;
            }
            (variable, _) => {
                return Err(Error::domain(format!(
                    "cannot sweep `{}` over this topology",
                    variable.as_str()
                )))
            }
        }
        topo.validate(self.lambda)?;
        Ok(topo)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::domain("sweep needs at least one value"));
        }
        if self.runs_per_point == 0 {
            return Err(Error::domain("runs_per_point must be at least 1"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sweep values must be finite"));
        }
        for &v in &self.values {
            self.instantiate(v)?;
        }
        Ok(())
    }
}

/// One sweep point: closed form against the simulated ensemble mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub sweep_value: f64,
    pub analytic: f64,
    pub sim_mean: f64,
    pub sim_std_err: f64,
    pub rel_error: f64,
    /// `analytic <= sim_mean + 2 * sim_std_err`.
    pub jensen_ok: bool,
    pub runs: usize,
    /// Seed of this point's batch.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn run_point(spec: &SweepSpec, value: f64) -> ComparisonRow {
    let seed = derive_seed(spec.master_seed, value.to_bits());
    let mut row = ComparisonRow {
        sweep_value: value,
        analytic: f64::NAN,
        sim_mean: f64::NAN,
        sim_std_err: f64::NAN,
        rel_error: f64::NAN,
        jensen_ok: false,
        runs: spec.runs_per_point,
        seed,
        error: None,
    };
    let topo = match spec.instantiate(value) {
        Ok(t) => t,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let mut errors = Vec::new();
    let sim = simulate_ensemble(&topo, spec.lambda, spec.runs_per_point, seed, spec.policy);
    let realized = match &sim {
        Ok(r) => {
            row.sim_mean = r.stats.mean;
            row.sim_std_err = r.stats.std_err;
            r.realized
        }
        Err(e) => {
            errors.push(format!("simulation: {e}"));
            None
        }
    };
    match topo.analytic(spec.lambda, &spec.eval, realized.as_ref()) {
        Ok(a) => row.analytic = a,
        Err(e) => errors.push(format!("analytic: {e}")),
    }
    if errors.is_empty() {
        row.rel_error = relative_error(row.analytic, row.sim_mean);
        row.jensen_ok = row.analytic <= row.sim_mean + 2.0 * row.sim_std_err;
    } else {
        let msg = errors.join("; ");
        log::warn!("sweep point {value}: {msg}");
        row.error = Some(msg);
    }
    row
}

/// Evaluates every sweep value; rows come back sorted by value. A failing
/// point is recorded in its row and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ComparisonRow>> {
    if spec.values.is_empty() {
        return Err(Error::domain("sweep needs at least one value"));
    }
    if spec.runs_per_point == 0 {
        return Err(Error::domain("runs_per_point must be at least 1"));
    }
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values.into_iter().map(|v| run_point(spec, v)).collect())
}
