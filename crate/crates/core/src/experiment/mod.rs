//! Analytic-versus-simulation experiments: penetration sweeps and the
//! tier-1/tier-2 case study.
//!
//! Every Monte Carlo run draws a fresh graph, cluster and announcer from
//! its own derived seed, so the simulated mean is an ensemble average over
//! the random topology as well as the clocks.

mod case_study;
mod config;
mod emit;
mod sweep;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{convergence_time_with, core_convergence_time_with, EvalOptions};
use crate::error::{Error, Result};
use crate::graph::{
    ensure_reachable, gen_config_model_with_rng, gen_full_mesh, gen_poisson_with_rng, gen_power_law_degrees_with_rng,
    gen_tiered_core_with_rng, seeded_rng, DegreeSequenceStats, Forwarding, Graph,
};
use crate::model::{DegreeSpec, ModelParams, TieredCoreSpec, TopologySpec};
use crate::sim::{derive_seed, disseminate, CoveragePolicy, RunStats};

pub use case_study::{run_case_study, BestK1, CaseStudyCell, CaseStudyReport, CaseStudySpec};
pub use config::ConfigMap;
pub use emit::{
    emit, emit_case_study, format_sig9, parse_csv, write_case_study_csv, write_csv, write_json, OutputFormat,
    CASE_STUDY_HEADER, CSV_HEADER,
};
pub use sweep::{run_sweep, ComparisonRow, SweepSpec, SweepVariable};

/// Retries used by the regenerate policy unless configured otherwise.
pub const DEFAULT_MAX_RETRIES: u32 = 100;

/// What to do when a sampled graph leaves nodes unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisconnectedPolicy {
    /// Resample the graph, up to `max_retries` times.
    Regenerate { max_retries: u32 },
    /// Keep the graph and time coverage of the reachable nodes only.
    ReachableOnly,
}

impl Default for DisconnectedPolicy {
    fn default() -> Self {
        DisconnectedPolicy::Regenerate {
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

/// A concrete random-topology family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Topology {
    FullMesh {
        n: usize,
        k: usize,
    },
    Poisson {
        n: usize,
        k: usize,
        p_edge: f64,
    },
    /// Erased configuration model over i.i.d. power-law degrees.
    PowerLaw {
        n: usize,
        k: usize,
        exponent: f64,
        d_min: usize,
        d_max: usize,
    },
    Tiered {
        n1: usize,
        n2: usize,
        k1: usize,
        p11: f64,
        p12: f64,
        p22: f64,
    },
}

impl Topology {
    pub fn node_count(&self) -> usize {
        match *self {
            Topology::FullMesh { n, .. } | Topology::Poisson { n, .. } | Topology::PowerLaw { n, .. } => n,
            Topology::Tiered { n1, n2, .. } => n1 + n2,
        }
    }

    pub fn is_tiered(&self) -> bool {
        matches!(self, Topology::Tiered { .. })
    }

    pub fn tiered_spec(&self, lambda: f64) -> Option<TieredCoreSpec<f64>> {
        match *self {
            Topology::Tiered {
                n1,
                n2,
                k1,
                p11,
                p12,
                p22,
            } => Some(TieredCoreSpec {
                n1,
                n2,
                k1,
                p11,
                p12,
                p22,
                lambda,
            }),
            _ => None,
        }
    }

    fn flat_params(&self, lambda: f64) -> Result<ModelParams<f64>> {
        match *self {
            Topology::FullMesh { n, k } | Topology::Poisson { n, k, .. } | Topology::PowerLaw { n, k, .. } => {
                ModelParams::new(n, k, lambda)
            }
            Topology::Tiered { .. } => Err(Error::domain("tiered topology has no flat parameters")),
        }
    }

    pub fn validate(&self, lambda: f64) -> Result<()> {
        match *self {
            Topology::Tiered { .. } => self.tiered_spec(lambda).expect("tiered").validate(),
            Topology::Poisson { p_edge, .. } => {
                self.flat_params(lambda)?;
                crate::model::check_probability("p_edge", p_edge)
            }
            Topology::PowerLaw {
                n,
                exponent,
                d_min,
                d_max,
                ..
            } => {
                self.flat_params(lambda)?;
                if d_min < 1 || d_min > d_max || d_max >= n || !(exponent > 1.0) {
                    return Err(Error::domain(format!(
                        "power law needs 1 <= d_min <= d_max < n and exponent > 1 \
                         (d_min = {d_min}, d_max = {d_max}, n = {n}, exponent = {exponent})"
                    )));
                }
                Ok(())
            }
            Topology::FullMesh { .. } => self.flat_params(lambda).map(|_| ()),
        }
    }

    /// Closed-form expected convergence time. Configuration-model networks
    /// use the given realized degree statistics.
    pub fn analytic(
        &self,
        lambda: f64,
        opts: &EvalOptions<f64>,
        realized: Option<&DegreeSequenceStats>,
    ) -> Result<f64> {
        let spec = match *self {
            Topology::FullMesh { .. } => TopologySpec::FullMesh {
                params: self.flat_params(lambda)?,
            },
            Topology::Poisson { p_edge, .. } => TopologySpec::Poisson {
                params: self.flat_params(lambda)?,
                p_edge,
            },
            Topology::PowerLaw { .. } => {
                let stats = realized.ok_or_else(|| Error::domain("no realized degree statistics"))?;
                TopologySpec::ConfigModel {
                    params: self.flat_params(lambda)?,
                    degrees: DegreeSpec::Moments {
                        mu_d: stats.mu_d,
                        cv_d: stats.cv_d,
                    },
                }
            }
            Topology::Tiered { .. } => {
                let spec = self.tiered_spec(lambda).expect("tiered");
                return Ok(core_convergence_time_with(&spec, opts)?.t_total);
            }
        };
        Ok(convergence_time_with(&spec, opts)?.expected_time)
    }
}

impl Topology {
    /// One graph with its cluster, drawn from `seed`.
    pub fn sample_graph(&self, seed: u64) -> Result<Graph> {
        self.validate(1.0)?;
        Sampler::new(self)?.graph(&mut seeded_rng(seed))
    }
}

/// Draws graphs of one topology family.
struct Sampler<'a> {
    topology: &'a Topology,
    mesh: Option<Graph>,
}

impl<'a> Sampler<'a> {
    fn new(topology: &'a Topology) -> Result<Self> {
        let mesh = match *topology {
            Topology::FullMesh { n, .. } => Some(gen_full_mesh(n)?),
            _ => None,
        };
        Ok(Self { topology, mesh })
    }

    fn announcer<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self.topology {
            Topology::Tiered { n1, n2, .. } => n1 + rng.gen_range(0..n2),
            _ => rng.gen_range(0..self.topology.node_count()),
        }
    }

    fn graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match *self.topology {
            Topology::FullMesh { k, .. } => self.mesh.clone().expect("mesh").with_random_cluster(k, rng),
            Topology::Poisson { n, k, p_edge } => gen_poisson_with_rng(n, p_edge, rng)?.with_random_cluster(k, rng),
            Topology::PowerLaw {
                n,
                k,
                exponent,
                d_min,
                d_max,
            } => {
                let degrees = gen_power_law_degrees_with_rng(n, exponent, d_min, d_max, rng)?;
                gen_config_model_with_rng(&degrees, rng)?
                    .graph
                    .with_random_cluster(k, rng)
            }
            Topology::Tiered { .. } => gen_tiered_core_with_rng(&self.topology.tiered_spec(1.0).expect("tiered"), rng),
        }
    }
}

struct RunSample {
    time: f64,
    retries: u32,
    degrees: Option<Vec<usize>>,
}

fn sample_run(sampler: &Sampler<'_>, lambda: f64, policy: DisconnectedPolicy, seed: u64) -> Result<RunSample> {
    let mut rng = seeded_rng(seed);
    let announcer = sampler.announcer(&mut rng);
    let first = sampler.graph(&mut rng)?;
    let forwarding = Forwarding::for_graph(&first);
    let (graph, retries, coverage) = match policy {
        DisconnectedPolicy::Regenerate { max_retries } => {
            let r = ensure_reachable(first, announcer, forwarding, max_retries, |_| sampler.graph(&mut rng))?;
            (r.graph, r.retries, CoveragePolicy::Strict)
        }
        DisconnectedPolicy::ReachableOnly => (first, 0, CoveragePolicy::ReachableOnly),
    };
    let trace = disseminate(&graph, announcer, lambda, forwarding, coverage, &mut rng)?;
    let degrees = matches!(sampler.topology, Topology::PowerLaw { .. }).then(|| graph.degrees());
    Ok(RunSample {
        time: trace.convergence_time,
        retries,
        degrees,
    })
}

/// Monte Carlo results over independently sampled graphs.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub stats: RunStats<f64>,
    /// Convergence time of each run, in run order.
    pub times: Vec<f64>,
    /// Total graph regenerations over all runs.
    pub retries: u64,
    /// Degree statistics pooled over every simulated graph
    /// (configuration-model topologies only).
    pub realized: Option<DegreeSequenceStats>,
}

/// Runs `runs` independent samples; run `i` uses `derive_seed(seed, i)`.
pub fn simulate_ensemble(
    topology: &Topology,
    lambda: f64,
    runs: usize,
    seed: u64,
    policy: DisconnectedPolicy,
) -> Result<EnsembleResult> {
    topology.validate(lambda)?;
    if runs == 0 {
        return Err(Error::domain("runs must be at least 1"));
    }
    let sampler = Sampler::new(topology)?;
    let results: Vec<Result<RunSample>> = (0..runs)
        .into_par_iter()
        .map(|i| sample_run(&sampler, lambda, policy, derive_seed(seed, i as u64)))
        .collect();
    let mut samples = Vec::with_capacity(runs);
    for (index, r) in results.into_iter().enumerate() {
        samples.push(r.map_err(|e| Error::Run {
            index,
            source: Box::new(e),
        })?);
    }
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let retries = samples.iter().map(|s| u64::from(s.retries)).sum();
    if retries > 0 {
        log::info!("{retries} graph regenerations over {runs} runs");
    }
    let realized = if matches!(topology, Topology::PowerLaw { .. }) {
        let pooled: Vec<usize> = samples
            .iter()
            .flat_map(|s| s.degrees.clone().unwrap_or_default())
            .collect();
        Some(DegreeSequenceStats::from_degrees(&pooled)?)
    } else {
        None
    };
    Ok(EnsembleResult {
        stats: RunStats::from_samples(&times)?,
        times,
        retries,
        realized,
    })
}

/// `|analytic - simulated| / simulated`, zero when both vanish.
pub fn relative_error(analytic: f64, simulated: f64) -> f64 {
    if analytic == simulated {
        0.0
    } else {
        (analytic - simulated).abs() / simulated.abs()
    }
}
