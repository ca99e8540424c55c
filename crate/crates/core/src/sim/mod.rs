//! Discrete-event realization of the dissemination model.
//!
//! Every uninformed node with at least one informed eligible neighbor holds
//! one exponential clock of rate `lambda` (times a weight under tiered
//! per-provider transit). Each step draws a fresh residual for every
//! frontier node, in node order, and fires the minimum. Reaching any cluster
//! member informs the whole cluster at the same instant.

mod batch;
mod stats;

use std::collections::BTreeSet;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{seeded_rng, Eligibility, Forwarding, Graph, Tier};
use crate::scalar::Real;

pub use batch::{derive_seed, simulate_batch, simulate_batch_times};
pub use stats::RunStats;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Announcer {
    Fixed(usize),
    /// Redrawn for every run: uniform over all nodes, or over tier-2 nodes
    /// on tiered graphs.
    #[default]
    Uniform,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoveragePolicy {
    /// Every node must be reachable; otherwise the run fails.
    #[default]
    Strict,
    /// Stop once every reachable node is informed.
    ReachableOnly,
}

#[derive(Debug, Clone)]
pub struct RunConfig<F> {
    pub graph: Graph,
    pub announcer: Announcer,
    pub lambda: F,
    pub rng_seed: u64,
    pub forwarding: Forwarding,
    pub coverage: CoveragePolicy,
}

impl<F: Real> RunConfig<F> {
    /// Uniform announcer, strict coverage, forwarding chosen from the graph.
    pub fn new(graph: Graph, lambda: F, rng_seed: u64) -> Self {
        let forwarding = Forwarding::for_graph(&graph);
        Self {
            graph,
            announcer: Announcer::Uniform,
            lambda,
            rng_seed,
            forwarding,
            coverage: CoveragePolicy::Strict,
        }
    }

    pub fn with_announcer(mut self, announcer: Announcer) -> Self {
        self.announcer = announcer;
        self
    }

    pub fn with_forwarding(mut self, forwarding: Forwarding) -> Self {
        self.forwarding = forwarding;
        self
    }

    pub fn with_coverage(mut self, coverage: CoveragePolicy) -> Self {
        self.coverage = coverage;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > F::zero()) || !self.lambda.is_finite() {
            return Err(Error::domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.graph.node_count() == 0 {
            return Err(Error::domain("empty graph"));
        }
        if let Announcer::Fixed(a) = self.announcer {
            if a >= self.graph.node_count() {
                return Err(Error::domain(format!("announcer {a} is not a node")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent<F> {
    pub time: F,
    /// Nodes informed at this instant, sorted.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisseminationTrace<F> {
    pub announcer: usize,
    pub events: Vec<TraceEvent<F>>,
    pub convergence_time: F,
}

impl<F: Real> DisseminationTrace<F> {
    /// One line per event: `time node_ids...`.
    pub fn write_lines(&self, mut out: impl Write) -> Result<()> {
        for event in &self.events {
            write!(out, "{}", event.time)?;
            for u in &event.nodes {
                write!(out, " {u}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn informed_count(&self) -> usize {
        self.events.iter().map(|e| e.nodes.len()).sum()
    }
}

/// Picks the announcer for one run.
pub fn draw_announcer<R: Rng + ?Sized>(graph: &Graph, announcer: Announcer, rng: &mut R) -> Result<usize> {
    match announcer {
        Announcer::Fixed(a) => Ok(a),
        Announcer::Uniform if graph.is_tiered() => {
            let tier2: Vec<usize> = (0..graph.node_count())
                .filter(|&u| graph.tier(u) == Tier::Tier2)
                .collect();
            if tier2.is_empty() {
                return Err(Error::domain("tiered graph has no tier-2 node to announce"));
            }
            Ok(tier2[rng.gen_range(0..tier2.len())])
        }
        Announcer::Uniform => Ok(rng.gen_range(0..graph.node_count())),
    }
}

pub fn simulate_once<F: Real>(cfg: &RunConfig<F>) -> Result<DisseminationTrace<F>> {
    cfg.validate()?;
    let mut rng = seeded_rng(cfg.rng_seed);
    let announcer = draw_announcer(&cfg.graph, cfg.announcer, &mut rng)?;
    disseminate(
        &cfg.graph,
        announcer,
        cfg.lambda,
        cfg.forwarding,
        cfg.coverage,
        &mut rng,
    )
}

/// [`simulate_once`] restricted to tiered graphs and tiered forwarding.
pub fn simulate_tiered<F: Real>(cfg: &RunConfig<F>) -> Result<DisseminationTrace<F>> {
    if !cfg.graph.is_tiered() {
        return Err(Error::domain("tiered simulation needs a graph with tier roles"));
    }
    if cfg.forwarding == Forwarding::Flat {
        return Err(Error::domain("tiered simulation needs tiered forwarding"));
    }
    simulate_once(cfg)
}

/// Runs one dissemination from `announcer`, drawing clocks from `rng`.
pub fn disseminate<F: Real, R: Rng + ?Sized>(
    graph: &Graph,
    announcer: usize,
    lambda: F,
    forwarding: Forwarding,
    coverage: CoveragePolicy,
    rng: &mut R,
) -> Result<DisseminationTrace<F>> {
    let elig = Eligibility::new(graph, announcer, forwarding)?;
    let n = graph.node_count();
    let reachable = elig.reachable().into_iter().filter(|&r| r).count();
    if coverage == CoveragePolicy::Strict && reachable < n {
        return Err(Error::Unreachable { reachable, total: n });
    }

    let mut state = Frontier::new(n);
    let first = state.contact(graph, announcer);
    state.inform(&elig, &first);
    let mut events = vec![TraceEvent {
        time: F::zero(),
        nodes: first,
    }];
    let mut time = F::zero();
    while state.count < reachable {
        let mut best: Option<(F, usize)> = None;
        for &v in &state.frontier {
            let weight = F::from_u32(elig.clock_weight(v, state.sources[v])).expect("small integer");
            let u = F::sample_open01(rng);
            let dt = -(F::one() - u).ln() / (lambda * weight);
            if best.is_none_or(|(b, _)| dt < b) {
                best = Some((dt, v));
            }
        }
        let (dt, fired) = best.ok_or(Error::Unreachable {
            reachable: state.count,
            total: n,
        })?;
        time = time + dt;
        let nodes = state.contact(graph, fired);
        state.inform(&elig, &nodes);
        events.push(TraceEvent { time, nodes });
    }
    Ok(DisseminationTrace {
        announcer,
        events,
        convergence_time: time,
    })
}

struct Frontier {
    informed: Vec<bool>,
    sources: Vec<u32>,
    frontier: BTreeSet<usize>,
    count: usize,
}

impl Frontier {
    fn new(n: usize) -> Self {
        Self {
            informed: vec![false; n],
            sources: vec![0; n],
            frontier: BTreeSet::new(),
            count: 0,
        }
    }

    /// Nodes that become informed when `v` is reached.
    fn contact(&self, graph: &Graph, v: usize) -> Vec<usize> {
        if graph.in_cluster(v) {
            graph.cluster().iter().copied().filter(|&c| !self.informed[c]).collect()
        } else {
            vec![v]
        }
    }

    fn inform(&mut self, elig: &Eligibility<'_>, nodes: &[usize]) {
        for &u in nodes {
            self.informed[u] = true;
            self.frontier.remove(&u);
        }
        self.count += nodes.len();
        let graph = elig.graph();
        for &u in nodes {
            for (j, &v) in graph.neighbors(u).iter().enumerate() {
                if !self.informed[v] && elig.forwards(u, j) {
                    self.sources[v] += 1;
                    if elig.clock_weight(v, self.sources[v]) > 0 {
                        self.frontier.insert(v);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_full_mesh, gen_poisson, EdgeKind, TieredRules};

    fn mesh(n: usize, cluster: &[usize]) -> Graph {
        gen_full_mesh(n).unwrap().with_cluster(cluster.iter().copied()).unwrap()
    }

    #[test]
    fn whole_cluster_converges_instantly() {
        let cfg = RunConfig::new(mesh(5, &[0, 1, 2, 3, 4]), 1.0, 3);
        let trace = simulate_once(&cfg).unwrap();
        assert_eq!(trace.convergence_time, 0.0);
        assert_eq!(trace.events.len(), 1);
        assert_eq!(trace.events[0].nodes, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn single_node() {
        let trace = simulate_once(&RunConfig::new(mesh(1, &[0]), 1.0, 0)).unwrap();
        assert_eq!(trace.convergence_time, 0.0);
    }

    #[test]
    fn cluster_joins_in_one_event() {
        for seed in 0..50 {
            let cfg = RunConfig::new(mesh(8, &[2, 5, 6]), 1.0, seed);
            let trace = simulate_once(&cfg).unwrap();
            let with_cluster: Vec<_> = trace.events.iter().filter(|e| e.nodes.contains(&5)).collect();
            assert_eq!(with_cluster.len(), 1);
            assert_eq!(with_cluster[0].nodes, vec![2, 5, 6]);
            assert_eq!(trace.informed_count(), 8);
            assert!(trace.events.windows(2).all(|w| w[0].time < w[1].time));
        }
    }

    #[test]
    fn unreachable_is_reported() {
        let g = gen_poisson(6, 0.0, 0).unwrap().with_cluster([0]).unwrap();
        let cfg = RunConfig::new(g.clone(), 1.0, 0).with_announcer(Announcer::Fixed(1));
        assert!(matches!(
            simulate_once(&cfg),
            Err(Error::Unreachable { reachable: 1, total: 6 })
        ));
        let cfg = cfg.with_coverage(CoveragePolicy::ReachableOnly);
        let trace = simulate_once(&cfg).unwrap();
        assert_eq!(trace.convergence_time, 0.0);
        assert_eq!(trace.informed_count(), 1);
    }

    #[test]
    fn rate_scaling_is_exact() {
        let g = gen_poisson(60, 0.2, 1).unwrap().with_cluster([4, 9, 30]).unwrap();
        let slow = simulate_once(&RunConfig::new(g.clone(), 1.0, 17)).unwrap();
        let fast = simulate_once(&RunConfig::new(g, 2.0, 17)).unwrap();
        assert_eq!(slow.events.len(), fast.events.len());
        for (a, b) in slow.events.iter().zip(&fast.events) {
            assert_eq!(a.nodes, b.nodes);
            assert_eq!(a.time / 2.0, b.time);
        }
    }

    #[test]
    fn trace_lines() {
        let g = Graph::from_edges(2, [(0, 1, None)], vec![Tier::Flat; 2]).unwrap();
        let cfg = RunConfig::new(g, 1.0f64, 5).with_announcer(Announcer::Fixed(0));
        let trace = simulate_once(&cfg).unwrap();
        let mut buf = Vec::new();
        trace.write_lines(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "0 0");
        assert_eq!(lines[1], format!("{} 1", trace.convergence_time));
    }

    #[test]
    fn generic_over_f32() {
        let trace = simulate_once(&RunConfig::new(mesh(10, &[0]), 1.0f32, 2)).unwrap();
        assert!(trace.convergence_time > 0.0);
    }

    #[test]
    fn tiered_rules_apply() {
        let roles = vec![Tier::Tier1, Tier::Tier2, Tier::Tier2];
        let g = Graph::from_edges(
            3,
            [(0, 1, Some(EdgeKind::Transit12)), (0, 2, Some(EdgeKind::Transit12))],
            roles,
        )
        .unwrap();
        let cfg = RunConfig::new(g.clone(), 1.0, 1).with_announcer(Announcer::Fixed(1));
        let trace = simulate_tiered(&cfg).unwrap();
        assert_eq!(
            trace.events.iter().map(|e| e.nodes[0]).collect::<Vec<_>>(),
            vec![1, 0, 2]
        );
        let tier1 = cfg.clone().with_announcer(Announcer::Fixed(0));
        assert!(simulate_tiered(&tier1).is_err());
        let literal = cfg.with_forwarding(Forwarding::Tiered(TieredRules::LITERAL));
        assert!(simulate_tiered(&literal).is_ok());
        assert!(simulate_tiered(&RunConfig::new(mesh(3, &[0]), 1.0, 1)).is_err());
    }
}
