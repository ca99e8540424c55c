use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{EdgeKind, Graph, Tier};
use crate::error::{Error, Result};

/// How a tier-2 customer that is not a peer of the announcer accumulates
/// rate from its informed providers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitClocks {
    /// One clock per informed provider.
    #[default]
    PerProvider,
    /// A single clock per customer, however many providers are informed.
    PerCustomer,
}

/// Where the announcer's tier-2 peers may take their route from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeerRoutes {
    /// Only over the direct peering link to the announcer.
    #[default]
    DirectOnly,
    /// From the announcer or from any informed provider.
    AnySource,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieredRules {
    pub transit_clocks: TransitClocks,
    pub peer_routes: PeerRoutes,
}

impl TieredRules {
    /// Tier-1 forwards to every customer and customers hold one clock each.
    pub const LITERAL: TieredRules = TieredRules {
        transit_clocks: TransitClocks::PerCustomer,
        peer_routes: PeerRoutes::AnySource,
    };
}

/// Which edges carry the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Forwarding {
    /// Every informed node forwards over every edge.
    Flat,
    /// Tier-1/tier-2 eligible paths.
    Tiered(TieredRules),
}

impl Forwarding {
    /// Tiered rules with defaults for tiered graphs, flat otherwise.
    pub fn for_graph(graph: &Graph) -> Self {
        if graph.is_tiered() {
            Forwarding::Tiered(TieredRules::default())
        } else {
            Forwarding::Flat
        }
    }
}

/// Forwarding decisions for one announcer on one graph.
#[derive(Debug, Clone)]
pub struct Eligibility<'g> {
    graph: &'g Graph,
    announcer: usize,
    rules: Option<TieredRules>,
    announcer_peer: Vec<bool>,
}

impl<'g> Eligibility<'g> {
    pub fn new(graph: &'g Graph, announcer: usize, forwarding: Forwarding) -> Result<Self> {
        if announcer >= graph.node_count() {
            return Err(Error::domain(format!(
                "announcer {announcer} is not a node of a {}-node graph",
                graph.node_count()
            )));
        }
        let rules = match forwarding {
            Forwarding::Flat => None,
            Forwarding::Tiered(rules) => {
                if !graph.is_tiered() {
                    return Err(Error::domain("tiered forwarding needs a graph with tier roles"));
                }
                if graph.tier(announcer) != Tier::Tier2 {
                    return Err(Error::domain(format!("announcer {announcer} is not a tier-2 node")));
                }
                Some(rules)
            }
        };
        let mut announcer_peer = vec![false; graph.node_count()];
        if let Some(kinds) = graph.neighbor_kinds(announcer) {
            for (&v, &kind) in graph.neighbors(announcer).iter().zip(kinds) {
                announcer_peer[v] = kind == EdgeKind::Peer22;
            }
        }
        Ok(Self {
            graph,
            announcer,
            rules,
            announcer_peer,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn announcer(&self) -> usize {
        self.announcer
    }

    /// Whether node `u` forwards over its `j`-th edge.
    pub fn forwards(&self, u: usize, j: usize) -> bool {
        let Some(rules) = self.rules else {
            return true;
        };
        if u == self.announcer {
            return true;
        }
        if self.graph.tier(u) != Tier::Tier1 {
            return false;
        }
        let v = self.graph.neighbors(u)[j];
        match self.graph.neighbor_kinds(u).expect("tiered graph")[j] {
            EdgeKind::Peer11 => true,
            EdgeKind::Transit12 => {
                v != self.announcer && !(rules.peer_routes == PeerRoutes::DirectOnly && self.announcer_peer[v])
            }
            EdgeKind::Peer22 => false,
        }
    }

    /// Clock rate multiplier for an uninformed node with `sources` informed
    /// eligible neighbors.
    pub fn clock_weight(&self, v: usize, sources: u32) -> u32 {
        match self.rules {
            Some(rules)
                if rules.transit_clocks == TransitClocks::PerProvider
                    && self.graph.tier(v) == Tier::Tier2
                    && !self.announcer_peer[v] =>
            {
                sources
            }
            _ => sources.min(1),
        }
    }

    /// Nodes that can ever be informed, with the cluster acting as one node.
    pub fn reachable(&self) -> Vec<bool> {
        let g = self.graph;
        let mut seen = vec![false; g.node_count()];
        let mut queue = VecDeque::new();
        let visit = |u: usize, seen: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
            if seen[u] {
                return;
            }
            if g.in_cluster(u) {
                for &c in g.cluster() {
                    seen[c] = true;
                    queue.push_back(c);
                }
            } else {
                seen[u] = true;
                queue.push_back(u);
            }
        };
        visit(self.announcer, &mut seen, &mut queue);
        while let Some(u) = queue.pop_front() {
            for (j, &v) in g.neighbors(u).iter().enumerate() {
                if !seen[v] && self.forwards(u, j) {
                    visit(v, &mut seen, &mut queue);
                }
            }
        }
        seen
    }
}

pub fn reachable_count(graph: &Graph, announcer: usize, forwarding: Forwarding) -> Result<usize> {
    Ok(Eligibility::new(graph, announcer, forwarding)?
        .reachable()
        .into_iter()
        .filter(|&r| r)
        .count())
}

/// A graph on which every node is reachable, and how many regenerations it
/// took to get one.
#[derive(Debug, Clone)]
pub struct Reachable {
    pub graph: Graph,
    pub retries: u32,
}

/// Returns `graph` if the announcer reaches every node, else calls
/// `regen(attempt)` for attempts `1..=max_retries` until one does.
pub fn ensure_reachable(
    graph: Graph,
    announcer: usize,
    forwarding: Forwarding,
    max_retries: u32,
    mut regen: impl FnMut(u32) -> Result<Graph>,
) -> Result<Reachable> {
    let mut graph = graph;
    let mut attempt = 0;
    loop {
        let reachable = reachable_count(&graph, announcer, forwarding)?;
        if reachable == graph.node_count() {
            return Ok(Reachable {
                graph,
                retries: attempt,
            });
        }
        if attempt == max_retries {
            return Err(Error::Unreachable {
                reachable,
                total: graph.node_count(),
            });
        }
        attempt += 1;
        graph = regen(attempt)?;
    }
}
