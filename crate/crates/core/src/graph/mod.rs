//! Concrete topologies: adjacency, tier roles, SDN cluster membership.

mod edgelist;
mod forwarding;
mod gen;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use edgelist::{read_edge_list, write_edge_list};
pub use forwarding::{
    ensure_reachable, reachable_count, Eligibility, Forwarding, PeerRoutes, Reachable, TieredRules, TransitClocks,
};
pub use gen::{
    gen_config_model, gen_config_model_with_rng, gen_full_mesh, gen_poisson, gen_poisson_with_rng,
    gen_power_law_degrees, gen_power_law_degrees_with_rng, gen_tiered_core, gen_tiered_core_with_rng, seeded_rng,
    ConfigModelGraph, SimRng,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Flat,
    Tier1,
    Tier2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Tier-1 to tier-1 peering.
    Peer11,
    /// Tier-1 provider to tier-2 customer.
    Transit12,
    /// Tier-2 to tier-2 peering.
    Peer22,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Peer11 => "peer11",
            EdgeKind::Transit12 => "transit12",
            EdgeKind::Peer22 => "peer22",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "peer11" => Ok(EdgeKind::Peer11),
            "transit12" => Ok(EdgeKind::Transit12),
            "peer22" => Ok(EdgeKind::Peer22),
            other => Err(format!("unknown edge kind `{other}`")),
        }
    }
}

/// An undirected simple graph with node roles and an SDN cluster.
///
/// Neighbor lists are sorted; for tiered graphs `kinds[u][j]` labels the
/// edge `(u, adjacency[u][j])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    kinds: Option<Vec<Vec<EdgeKind>>>,
    roles: Vec<Tier>,
    cluster: Vec<usize>,
    in_cluster: Vec<bool>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, duplicate
    /// edges, out-of-range endpoints and kinds inconsistent with roles.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Option<EdgeKind>)>,
        roles: Vec<Tier>,
    ) -> Result<Self> {
        if roles.len() != n {
            return Err(Error::domain(format!("{} roles for {n} nodes", roles.len())));
        }
        let tiered = roles.iter().any(|&r| r != Tier::Flat);
        if tiered && roles.contains(&Tier::Flat) {
            return Err(Error::domain("tiered graph mixes flat and tiered roles"));
        }
        let mut seen = HashSet::new();
        let mut adj: Vec<Vec<(usize, Option<EdgeKind>)>> = vec![Vec::new(); n];
        for (u, v, kind) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
            if kind.is_some() != tiered {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}): edge kinds are required exactly for tiered graphs"
                )));
            }
            if let Some(kind) = kind {
                let ok = match kind {
                    EdgeKind::Peer11 => roles[u] == Tier::Tier1 && roles[v] == Tier::Tier1,
                    EdgeKind::Peer22 => roles[u] == Tier::Tier2 && roles[v] == Tier::Tier2,
                    EdgeKind::Transit12 => roles[u] != roles[v],
                };
                if !ok {
                    return Err(Error::domain(format!(
                        "edge ({u}, {v}) labelled {kind} joins {:?} and {:?}",
                        roles[u], roles[v]
                    )));
                }
            }
            adj[u].push((v, kind));
            adj[v].push((u, kind));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(v, _)| v);
        }
        let adjacency = adj.iter().map(|l| l.iter().map(|&(v, _)| v).collect()).collect();
        let kinds = tiered.then(|| {
            adj.iter()
                .map(|l| l.iter().map(|&(_, k)| k.expect("checked above")).collect())
                .collect()
        });
        Ok(Self {
            adjacency,
            kinds,
            roles,
            cluster: Vec::new(),
            in_cluster: vec![false; n],
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    /// Edge kinds aligned with [`Graph::neighbors`]; `None` for flat graphs.
    pub fn neighbor_kinds(&self, u: usize) -> Option<&[EdgeKind]> {
        self.kinds.as_ref().map(|k| k[u].as_slice())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn tier(&self, u: usize) -> Tier {
        self.roles[u]
    }

    pub fn roles(&self) -> &[Tier] {
        &self.roles
    }

    pub fn is_tiered(&self) -> bool {
        self.kinds.is_some()
    }

    /// Sorted cluster members.
    pub fn cluster(&self) -> &[usize] {
        &self.cluster
    }

    pub fn in_cluster(&self, u: usize) -> bool {
        self.in_cluster[u]
    }

    /// Edges `(u, v, kind)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Option<EdgeKind>)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(u, list)| {
            list.iter()
                .enumerate()
                .filter(move |&(_, &v)| u < v)
                .map(move |(j, &v)| (u, v, self.kinds.as_ref().map(|k| k[u][j])))
        })
    }

    /// Nodes eligible for cluster membership: tier-1 in tiered graphs,
    /// everyone otherwise.
    pub fn cluster_candidates(&self) -> Vec<usize> {
        if self.is_tiered() {
            (0..self.node_count())
                .filter(|&u| self.roles[u] == Tier::Tier1)
                .collect()
        } else {
            (0..self.node_count()).collect()
        }
    }

    pub fn with_cluster(mut self, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut cluster: Vec<usize> = members.into_iter().collect();
        cluster.sort_unstable();
        cluster.dedup();
        let mut in_cluster = vec![false; self.node_count()];
        for &u in &cluster {
            if u >= self.node_count() {
                return Err(Error::domain(format!("cluster member {u} is not a node")));
            }
            if self.is_tiered() && self.roles[u] != Tier::Tier1 {
                return Err(Error::domain(format!("cluster member {u} is not tier-1")));
            }
            in_cluster[u] = true;
        }
        self.cluster = cluster;
        self.in_cluster = in_cluster;
        Ok(self)
    }

    /// Assigns a uniformly random cluster of `k` candidates, independent of
    /// degrees.
    pub fn with_random_cluster<R: Rng + ?Sized>(self, k: usize, rng: &mut R) -> Result<Self> {
        let candidates = self.cluster_candidates();
        if k > candidates.len() {
            return Err(Error::domain(format!(
                "cluster of {k} exceeds {} candidate nodes",
                candidates.len()
            )));
        }
        let picked: Vec<usize> = index::sample(rng, candidates.len(), k)
            .into_iter()
            .map(|i| candidates[i])
            .collect();
        self.with_cluster(picked)
    }

    pub fn degree_stats(&self) -> Result<DegreeSequenceStats> {
        DegreeSequenceStats::from_degrees(&self.degrees())
    }
}

/// Summary of a degree sequence: mean, coefficient of variation, range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeSequenceStats {
    pub mu_d: f64,
    /// Population standard deviation over the mean.
    pub cv_d: f64,
    pub min_d: usize,
    pub max_d: usize,
}

impl DegreeSequenceStats {
    pub fn from_degrees(degrees: &[usize]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::domain("empty degree sequence"));
        }
        let n = degrees.len() as f64;
        let mu = degrees.iter().map(|&d| d as f64).sum::<f64>() / n;
        if mu <= 0.0 {
            return Err(Error::domain("degree sequence has zero mean"));
        }
        let var = degrees.iter().map(|&d| (d as f64 - mu).powi(2)).sum::<f64>() / n;
        Ok(Self {
            mu_d: mu,
            cv_d: var.sqrt() / mu,
            min_d: *degrees.iter().min().unwrap(),
            max_d: *degrees.iter().max().unwrap(),
        })
    }
}
