//! Closed-form expected convergence times.
//!
//! The expected time is `(1/lambda) sum_x sum_i P_sdn(x) / D(i|x)` with the
//! bgp-degree `D(i|x)` supplied per topology family. Random-graph families
//! substitute `E[D(i|x)]`, which biases the result low (Jensen).

mod core;
mod degree;

use serde::{Deserialize, Serialize};

pub use self::core::{core_convergence_time, core_convergence_time_with, CoreEstimate};
pub use self::degree::{
    cmrg_closed_form, cmrg_recursion, degree_cmrg_first, degree_full_mesh, degree_poisson, mean_residual_degree,
    CmrgForm,
};

use crate::error::{Error, Result};
use crate::graph::DegreeSequenceStats;
use crate::model::{informed_unchecked, p_sdn_distribution, DegreeSpec, ModelParams, StepContext, TopologySpec};
use crate::scalar::{Field, Real};

/// Default floor below which an expected bgp-degree is considered degenerate.
pub const DEFAULT_DEGREE_FLOOR: f64 = 1e-6;

/// What to do with an expected degree below the floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FloorPolicy {
    #[default]
    Error,
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions<F> {
    pub degree_floor: F,
    pub floor_policy: FloorPolicy,
    pub cmrg_form: CmrgForm,
}

impl<F: Real> Default for EvalOptions<F> {
    fn default() -> Self {
        Self {
            degree_floor: F::from_f64_lossy(DEFAULT_DEGREE_FLOOR),
            floor_policy: FloorPolicy::Error,
            cmrg_form: CmrgForm::Unrolled,
        }
    }
}

/// Bgp-degrees indexed by `(x, i)`; row `x` holds `D(1|x) ..= D(N-k|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgpDegreeProfile<T> {
    pub values: Vec<Vec<T>>,
}

impl<T: Clone> BgpDegreeProfile<T> {
    /// `D(i|x)`, `None` outside the step range.
    pub fn get(&self, step: usize, sdn_hit_step: usize) -> Option<T> {
        self.values
            .get(sdn_hit_step)
            .and_then(|row| row.get(step.checked_sub(1)?))
            .cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEstimate<T> {
    /// `E[T]` in units of time (scaled by `1/lambda`).
    pub expected_time: T,
    /// `E[T | x]` for each cluster-hit step `x`.
    pub per_x_expectation: Vec<T>,
    pub profile: BgpDegreeProfile<T>,
    pub p_sdn: Vec<T>,
}

fn assemble<T: Field>(params: &ModelParams<T>, profile: BgpDegreeProfile<T>) -> Result<ConvergenceEstimate<T>> {
    let p_sdn = p_sdn_distribution(params)?;
    let lambda = params.lambda.clone();
    let step_sums: Vec<T> = profile
        .values
        .iter()
        .map(|row| T::accumulate(row.iter().map(|d| T::one() / d.clone())))
        .collect();
    let weighted = T::accumulate(step_sums.iter().zip(&p_sdn).map(|(s, p)| s.clone() * p.clone()));
    Ok(ConvergenceEstimate {
        expected_time: weighted / lambda.clone(),
        per_x_expectation: step_sums.into_iter().map(|s| s / lambda.clone()).collect(),
        profile,
        p_sdn,
    })
}

/// Exact full-mesh convergence time over any field (rationals included).
pub fn full_mesh_convergence_time<T: Field>(params: &ModelParams<T>) -> Result<ConvergenceEstimate<T>> {
    params.validate()?;
    let (n, k, steps) = (params.n_total, params.k_cluster, params.steps());
    let values = (0..=steps)
        .map(|x| (1..=steps).map(|i| T::count(n - informed_unchecked(i, x, k))).collect())
        .collect();
    assemble(params, BgpDegreeProfile { values })
}

fn check_floor<F: Real>(row: &mut [F], x: usize, opts: &EvalOptions<F>) -> Result<()> {
    for (idx, d) in row.iter_mut().enumerate() {
        if !(*d >= opts.degree_floor) {
            match opts.floor_policy {
                FloorPolicy::Clamp if !d.is_nan() => *d = opts.degree_floor,
                _ => {
                    return Err(Error::Degenerate {
                        step: idx + 1,
                        x,
                        degree: d.to_f64_lossy(),
                        floor: opts.degree_floor.to_f64_lossy(),
                    })
                }
            }
        }
    }
    Ok(())
}

fn build_profile<F: Real>(
    params: &ModelParams<F>,
    opts: &EvalOptions<F>,
    mut row_fn: impl FnMut(usize) -> Result<Vec<F>>,
) -> Result<BgpDegreeProfile<F>> {
    let values = (0..=params.steps())
        .map(|x| {
            let mut row = row_fn(x)?;
            check_floor(&mut row, x, opts)?;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BgpDegreeProfile { values })
}

/// Resolves a configuration-model degree description to `(mu_d, cv_d)`.
pub fn degree_moments<F: Real>(degrees: &DegreeSpec<F>) -> Result<(F, F)> {
    match degrees {
        DegreeSpec::Moments { mu_d, cv_d } => Ok((*mu_d, *cv_d)),
        DegreeSpec::Sequence(seq) => {
            let stats = DegreeSequenceStats::from_degrees(seq)?;
            Ok((F::from_f64_lossy(stats.mu_d), F::from_f64_lossy(stats.cv_d)))
        }
    }
}

/// Expected convergence time with default options.
pub fn convergence_time<F: Real>(spec: &TopologySpec<F>) -> Result<ConvergenceEstimate<F>> {
    convergence_time_with(spec, &EvalOptions::default())
}

pub fn convergence_time_with<F: Real>(spec: &TopologySpec<F>, opts: &EvalOptions<F>) -> Result<ConvergenceEstimate<F>> {
    spec.validate()?;
    match spec {
        TopologySpec::FullMesh { params } => full_mesh_convergence_time(params),
        TopologySpec::Poisson { params, p_edge } => {
            let (n, k, steps) = (params.n_total, params.k_cluster, params.steps());
            let profile = build_profile(params, opts, |x| {
                Ok((1..=steps)
                    .map(|i| degree::poisson_unchecked(n, informed_unchecked(i, x, k), *p_edge))
                    .collect())
            })?;
            assemble(params, profile)
        }
        TopologySpec::ConfigModel { params, degrees } => {
            let (mu_d, cv_d) = degree_moments(degrees)?;
            let profile = build_profile(params, opts, |x| {
                degree::cmrg_row(params, mu_d, cv_d, x, opts.cmrg_form)
            })?;
            assemble(params, profile)
        }
        TopologySpec::TieredCore(_) => Err(Error::domain("tiered cores are evaluated with core_convergence_time")),
    }
}

/// Configuration-model `E[D(i|x)]` under the given options (form and floor).
pub fn degree_cmrg_with<F: Real>(
    ctx: StepContext,
    params: &ModelParams<F>,
    mu_d: F,
    cv_d: F,
    opts: &EvalOptions<F>,
) -> Result<F> {
    let mut value = [cmrg_closed_form(ctx, params, mu_d, cv_d, opts.cmrg_form)?];
    check_floor(&mut value, ctx.sdn_hit_step, opts).map_err(|e| match e {
        Error::Degenerate { x, degree, floor, .. } => Error::Degenerate {
            step: ctx.step,
            x,
            degree,
            floor,
        },
        other => other,
    })?;
    Ok(value[0])
}

/// Configuration-model `E[D(i|x)]` with default options.
pub fn degree_cmrg<F: Real>(ctx: StepContext, params: &ModelParams<F>, mu_d: F, cv_d: F) -> Result<F> {
    degree_cmrg_with(ctx, params, mu_d, cv_d, &EvalOptions::default())
}
