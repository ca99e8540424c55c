//! BGP convergence time in inter-domain networks where some ASes delegate
//! routing to a shared SDN controller.
//!
//! The crate evaluates the closed-form Markov-chain model for full-mesh,
//! Erdős–Rényi and configuration-model topologies and for a tier-1/tier-2
//! Internet core, and checks it against a discrete-event simulator.
//!
//! The analytic core is generic over the scalar: [`scalar::Field`] covers
//! exact rationals (full mesh only), [`scalar::Real`] covers `f32`/`f64`.
//!
//! ```
//! use bgp_sdn::{full_mesh_convergence_time, ModelParams, Exact};
//!
//! let params = ModelParams::new(4, 2, Exact::from_integer(1.into())).unwrap();
//! let t = full_mesh_convergence_time(&params).unwrap().expected_time;
//! assert_eq!(t, bgp_sdn::scalar::exact(4, 3));
//! ```

// `!(x > 0)` is how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod model;
pub mod scalar;
pub mod sim;

pub use analytic::{
    convergence_time, convergence_time_with, core_convergence_time, core_convergence_time_with, degree_cmrg,
    degree_cmrg_first, degree_full_mesh, degree_poisson, full_mesh_convergence_time, mean_residual_degree,
    BgpDegreeProfile, CmrgForm, ConvergenceEstimate, CoreEstimate, EvalOptions, FloorPolicy,
};
pub use error::{Error, Result};
pub use graph::{DegreeSequenceStats, EdgeKind, Graph, Tier};
pub use model::{
    informed_count, p_sdn, p_sdn_distribution, DegreeSpec, ModelParams, StepContext, TieredCoreSpec, TopologySpec,
};
pub use sim::{simulate_batch, simulate_once, simulate_tiered, DisseminationTrace, RunConfig, RunStats};

/// Arbitrary-precision rational scalar.
pub type Exact = num_rational::BigRational;

pub type ModelParamsF64 = ModelParams<f64>;
pub type TopologySpecF64 = TopologySpec<f64>;
pub type TieredCoreSpecF64 = TieredCoreSpec<f64>;
pub type ConvergenceEstimateF64 = ConvergenceEstimate<f64>;
pub type CoreEstimateF64 = CoreEstimate<f64>;
pub type RunConfigF64 = RunConfig<f64>;
pub type RunStatsF64 = RunStats<f64>;
pub type DisseminationTraceF64 = DisseminationTrace<f64>;

pub type ModelParamsF32 = ModelParams<f32>;
pub type ConvergenceEstimateF32 = ConvergenceEstimate<f32>;
pub type ModelParamsExact = ModelParams<Exact>;
pub type ConvergenceEstimateExact = ConvergenceEstimate<Exact>;
