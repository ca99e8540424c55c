use serde::{Deserialize, Serialize};

use super::{relative_error, simulate_ensemble, DisconnectedPolicy, Topology};
use crate::analytic::{core_convergence_time_with, CoreEstimate, EvalOptions};
use crate::error::{Error, Result};
use crate::model::TieredCoreSpec;
use crate::sim::{derive_seed, RunStats};

/// Grid over tier-2 peering density and tier-1 cluster size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudySpec {
    pub n1: usize,
    pub n2: usize,
    pub p11: f64,
    pub p12: f64,
    pub lambda: f64,
    pub p22_values: Vec<f64>,
    pub k1_values: Vec<usize>,
    pub runs_per_point: usize,
    pub master_seed: u64,
    pub policy: DisconnectedPolicy,
    pub eval: EvalOptions<f64>,
}

impl CaseStudySpec {
    fn core(&self, p22: f64, k1: usize) -> TieredCoreSpec<f64> {
        TieredCoreSpec {
            n1: self.n1,
            n2: self.n2,
            k1,
            p11: self.p11,
            p12: self.p12,
            p22,
            lambda: self.lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p22_values.is_empty() || self.k1_values.is_empty() {
            return Err(Error::domain("case study needs p22 and k1 values"));
        }
        if self.runs_per_point == 0 {
            return Err(Error::domain("runs_per_point must be at least 1"));
        }
        for &p22 in &self.p22_values {
            for &k1 in &self.k1_values {
                self.core(p22, k1).validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyCell {
    pub p22: f64,
    pub k1: usize,
    pub estimate: Option<CoreEstimate<f64>>,
    pub sim: Option<RunStats<f64>>,
    /// Relative error of `t_total` against the simulated mean; NaN when
    /// either side is missing.
    pub rel_error: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// For one `p22`, the smallest `k1 > 1` whose analytic total beats the
/// single-AS baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestK1 {
    pub p22: f64,
    pub baseline: Option<f64>,
    pub k1: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    /// Row-major over sorted `p22`, then sorted `k1`.
    pub cells: Vec<CaseStudyCell>,
    pub best: Vec<BestK1>,
}

fn run_cell(spec: &CaseStudySpec, p22: f64, k1: usize) -> CaseStudyCell {
    let seed = derive_seed(derive_seed(spec.master_seed, p22.to_bits()), k1 as u64);
    let core = spec.core(p22, k1);
    let mut errors = Vec::new();
    let estimate = core_convergence_time_with(&core, &spec.eval)
        .map_err(|e| errors.push(format!("analytic: {e}")))
        .ok();
    let topo = Topology::Tiered {
        n1: spec.n1,
        n2: spec.n2,
        k1,
        p11: spec.p11,
        p12: spec.p12,
        p22,
    };
    let sim = simulate_ensemble(&topo, spec.lambda, spec.runs_per_point, seed, spec.policy)
        .map(|r| r.stats)
        .map_err(|e| errors.push(format!("simulation: {e}")))
        .ok();
    let rel_error = match (&estimate, &sim) {
        (Some(e), Some(s)) => relative_error(e.t_total, s.mean),
        _ => f64::NAN,
    };
    let error = (!errors.is_empty()).then(|| {
        let msg = errors.join("; ");
        log::warn!("case study p22 = {p22}, k1 = {k1}: {msg}");
        msg
    });
    CaseStudyCell {
        p22,
        k1,
        estimate,
        sim,
        rel_error,
        seed,
        error,
    }
}

pub fn run_case_study(spec: &CaseStudySpec) -> Result<CaseStudyReport> {
    if spec.p22_values.is_empty() || spec.k1_values.is_empty() {
        return Err(Error::domain("case study needs p22 and k1 values"));
    }
    if spec.runs_per_point == 0 {
        return Err(Error::domain("runs_per_point must be at least 1"));
    }
    let mut p22s = spec.p22_values.clone();
    p22s.sort_by(f64::total_cmp);
    p22s.dedup();
    let mut k1s = spec.k1_values.clone();
    k1s.sort_unstable();
    k1s.dedup();

    let mut cells = Vec::new();
    let mut best = Vec::new();
    for &p22 in &p22s {
        let row: Vec<CaseStudyCell> = k1s.iter().map(|&k1| run_cell(spec, p22, k1)).collect();
        let baseline = core_convergence_time_with(&spec.core(p22, 1), &spec.eval)
            .ok()
            .map(|e| e.t_total);
        let k1 = baseline.and_then(|base| {
            row.iter()
                .filter(|c| c.k1 > 1)
                .find(|c| c.estimate.as_ref().is_some_and(|e| e.t_total < base))
                .map(|c| c.k1)
        });
        best.push(BestK1 { p22, baseline, k1 });
        cells.extend(row);
    }
    Ok(CaseStudyReport { cells, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> CaseStudySpec {
        CaseStudySpec {
            n1: 6,
            n2: 20,
            p11: 0.5,
            p12: 0.4,
            lambda: 1.0,
            p22_values: vec![0.5, 0.1],
            k1_values: vec![6, 1, 3],
            runs_per_point: 20,
            master_seed: 11,
            policy: DisconnectedPolicy::default(),
            eval: EvalOptions::default(),
        }
    }

    #[test]
    fn grid_layout_and_best_cluster() {
        let report = run_case_study(&spec()).unwrap();
        let layout: Vec<(f64, usize)> = report.cells.iter().map(|c| (c.p22, c.k1)).collect();
        assert_eq!(layout, vec![(0.1, 1), (0.1, 3), (0.1, 6), (0.5, 1), (0.5, 3), (0.5, 6)]);
        assert!(report
            .cells
            .iter()
            .all(|c| c.error.is_none() && c.rel_error.is_finite()));
        for b in &report.best {
            let base = b.baseline.unwrap();
            if let Some(k1) = b.k1 {
                let cell = report.cells.iter().find(|c| c.p22 == b.p22 && c.k1 == k1).unwrap();
                assert!(cell.estimate.unwrap().t_total < base);
            }
        }
    }

    #[test]
    fn unreachable_transit_is_marked() {
        let mut s = spec();
        s.p12 = 0.0;
        s.k1_values = vec![1];
        s.p22_values = vec![0.5];
        s.runs_per_point = 2;
        let report = run_case_study(&s).unwrap();
        let cell = &report.cells[0];
        assert!(cell.estimate.is_none() && cell.sim.is_none());
        assert!(cell.error.as_ref().unwrap().contains("unreachable"));
        assert_eq!(report.best[0].k1, None);
    }
}
