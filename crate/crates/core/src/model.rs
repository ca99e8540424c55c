//! Shared model types, the informed-node count `n(i|x)` and the
//! distribution of the step at which the SDN cluster is first reached.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Global parameters of the dissemination model.
///
/// `n_total` ASes, of which `k_cluster` are centralized behind one
/// controller; every BGP hop takes an exponential time with rate `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub n_total: usize,
    pub k_cluster: usize,
    pub lambda: T,
}

impl<T: Field> ModelParams<T> {
    pub fn new(n_total: usize, k_cluster: usize, lambda: T) -> Result<Self> {
        let params = Self {
            n_total,
            k_cluster,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::domain("n_total must be at least 1"));
        }
        if self.k_cluster < 1 || self.k_cluster > self.n_total {
            return Err(Error::domain(format!(
                "k_cluster = {} outside [1, {}]",
                self.k_cluster, self.n_total
            )));
        }
        if !(self.lambda > T::zero()) {
            return Err(Error::domain(format!("lambda must be positive, got {:?}", self.lambda)));
        }
        Ok(())
    }

    /// Number of dissemination steps, `N - k`.
    pub fn steps(&self) -> usize {
        self.n_total - self.k_cluster
    }

    /// Same network with a different rate.
    pub fn with_lambda(&self, lambda: T) -> Self {
        Self { lambda, ..self.clone() }
    }
}

/// Degree information for a configuration-model network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DegreeSpec<F> {
    Sequence(Vec<usize>),
    Moments { mu_d: F, cv_d: F },
}

/// Tier-1/tier-2 Internet core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieredCoreSpec<F> {
    pub n1: usize,
    pub n2: usize,
    /// SDN cluster size among tier-1 ASes.
    pub k1: usize,
    pub p11: F,
    pub p12: F,
    pub p22: F,
    pub lambda: F,
}

impl<F: Real> TieredCoreSpec<F> {
    pub fn validate(&self) -> Result<()> {
        if self.k1 < 1 || self.k1 > self.n1 {
            return Err(Error::domain(format!("k1 = {} outside [1, n1 = {}]", self.k1, self.n1)));
        }
        if self.n2 == 0 {
            return Err(Error::domain("n2 must be at least 1"));
        }
        for (name, p) in [("p11", self.p11), ("p12", self.p12), ("p22", self.p22)] {
            check_probability(name, p)?;
        }
        if !(self.lambda > F::zero()) {
            return Err(Error::domain("lambda must be positive"));
        }
        Ok(())
    }
}

/// Declarative description of a network model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TopologySpec<F> {
    FullMesh {
        params: ModelParams<F>,
    },
    Poisson {
        params: ModelParams<F>,
        p_edge: F,
    },
    ConfigModel {
        params: ModelParams<F>,
        degrees: DegreeSpec<F>,
    },
    TieredCore(TieredCoreSpec<F>),
}

impl<F: Real> TopologySpec<F> {
    pub fn validate(&self) -> Result<()> {
        match self {
            TopologySpec::FullMesh { params } => params.validate(),
            TopologySpec::Poisson { params, p_edge } => {
                params.validate()?;
                check_probability("p_edge", *p_edge)
            }
            TopologySpec::ConfigModel { params, degrees } => {
                params.validate()?;
                match degrees {
                    DegreeSpec::Sequence(seq) => {
                        if seq.len() != params.n_total {
                            return Err(Error::domain(format!(
                                "degree sequence has {} entries for {} nodes",
                                seq.len(),
                                params.n_total
                            )));
                        }
                        if seq.contains(&0) {
                            return Err(Error::domain("degrees must be at least 1"));
                        }
                        Ok(())
                    }
                    DegreeSpec::Moments { mu_d, cv_d } => {
                        if !(*mu_d > F::zero()) || *cv_d < F::zero() {
                            return Err(Error::domain("need mu_d > 0 and cv_d >= 0"));
                        }
                        Ok(())
                    }
                }
            }
            TopologySpec::TieredCore(spec) => spec.validate(),
        }
    }

    /// Flat-model parameters; `None` for the tiered core.
    pub fn params(&self) -> Option<&ModelParams<F>> {
        match self {
            TopologySpec::FullMesh { params }
            | TopologySpec::Poisson { params, .. }
            | TopologySpec::ConfigModel { params, .. } => Some(params),
            TopologySpec::TieredCore(_) => None,
        }
    }
}

pub(crate) fn check_probability<F: Real>(name: &str, p: F) -> Result<()> {
    if p >= F::zero() && p <= F::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} outside [0, 1]")))
    }
}

/// The pair `(i, x)`: dissemination step and the step at which the cluster
/// was first reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepContext {
    pub step: usize,
    pub sdn_hit_step: usize,
}

impl StepContext {
    /// Validates `1 <= step <= N-k` and `0 <= sdn_hit_step <= N-k`.
    pub fn new<T: Field>(step: usize, sdn_hit_step: usize, params: &ModelParams<T>) -> Result<Self> {
        let ctx = Self { step, sdn_hit_step };
        ctx.validate(params)?;
        Ok(ctx)
    }

    pub fn validate<T: Field>(&self, params: &ModelParams<T>) -> Result<()> {
        let last = params.steps();
        if last == 0 {
            return Err(Error::domain("no steps remain: cluster covers the whole network"));
        }
        if self.step < 1 || self.step > last {
            return Err(Error::domain(format!(
                "step i = {} outside [1, N-k = {last}]",
                self.step
            )));
        }
        if self.sdn_hit_step > last {
            return Err(Error::domain(format!(
                "sdn_hit_step x = {} outside [0, N-k = {last}]",
                self.sdn_hit_step
            )));
        }
        Ok(())
    }
}

/// `n(i|x)` without bounds checks. Callers guarantee validity.
#[inline]
pub(crate) fn informed_unchecked(step: usize, x: usize, k: usize) -> usize {
    if step <= x {
        step
    } else {
        step + k - 1
    }
}

/// Number of nodes holding the update at step `i` given cluster contact at
/// step `x`: `i` before contact, `i + k - 1` after.
pub fn informed_count<T: Field>(ctx: StepContext, params: &ModelParams<T>) -> Result<usize> {
    ctx.validate(params)?;
    Ok(informed_unchecked(ctx.step, ctx.sdn_hit_step, params.k_cluster))
}

fn check_hit_step<T: Field>(x: usize, params: &ModelParams<T>) -> Result<()> {
    params.validate()?;
    if x > params.steps() {
        return Err(Error::domain(format!("x = {x} outside [0, N-k = {}]", params.steps())));
    }
    Ok(())
}

/// Probability that the cluster first receives the update at step `x`:
/// `k/(N-x) * prod_{j<x} (1 - k/(N-j))`.
pub fn p_sdn<T: Field>(x: usize, params: &ModelParams<T>) -> Result<T> {
    check_hit_step(x, params)?;
    let (n, k) = (params.n_total, params.k_cluster);
    Ok(T::count(k) / T::count(n - x) * T::survival_product(n, k, x))
}

/// `p_sdn(x)` for every `x` in `[0, N-k]`.
pub fn p_sdn_distribution<T: Field>(params: &ModelParams<T>) -> Result<Vec<T>> {
    params.validate()?;
    let (n, k) = (params.n_total, params.k_cluster);
    let kk = T::count(k);
    Ok(T::survival_products(n, k, params.steps() + 1)
        .into_iter()
        .enumerate()
        .map(|(x, s)| kk.clone() / T::count(n - x) * s)
        .collect())
}
