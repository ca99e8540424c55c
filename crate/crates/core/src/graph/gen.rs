use std::collections::HashSet;

use rand::distributions::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DegreeSequenceStats, EdgeKind, Graph, Tier};
use crate::error::{Error, Result};
use crate::model::TieredCoreSpec;
use crate::scalar::Real;

/// Random number generator used by every generator and the simulator.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gen_full_mesh(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::domain("full mesh needs at least one node"));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, None)));
    Graph::from_edges(n, edges, vec![Tier::Flat; n])
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("edge probability {p} outside [0, 1]")))
    }
}

/// Erdős–Rényi graph; each unordered pair is present independently with
/// probability `p_edge`.
pub fn gen_poisson(n: usize, p_edge: f64, seed: u64) -> Result<Graph> {
    gen_poisson_with_rng(n, p_edge, &mut seeded_rng(seed))
}

pub fn gen_poisson_with_rng<R: Rng + ?Sized>(n: usize, p_edge: f64, rng: &mut R) -> Result<Graph> {
    if n == 0 {
        return Err(Error::domain("graph needs at least one node"));
    }
    check_p(p_edge)?;
    if p_edge == 1.0 {
        return gen_full_mesh(n);
    }
    let mut edges = Vec::new();
    if p_edge > 0.0 {
        // geometric skipping over the pairs (v, w), w < v
        let log_q = (1.0 - p_edge).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = Open01.sample(rng);
            let skip = ((1.0 - r).ln() / log_q).floor();
            if skip >= (n * n) as f64 {
                break;
            }
            w += 1 + skip as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v, None));
            }
        }
    }
    Graph::from_edges(n, edges, vec![Tier::Flat; n])
}

fn check_power_law(n: usize, exponent: f64, d_min: usize, d_max: usize) -> Result<()> {
    if d_min < 1 || d_min > d_max || d_max >= n {
        return Err(Error::domain(format!(
            "need 1 <= d_min <= d_max < n, got d_min = {d_min}, d_max = {d_max}, n = {n}"
        )));
    }
    if !(exponent > 1.0) {
        return Err(Error::domain(format!(
            "power-law exponent must exceed 1, got {exponent}"
        )));
    }
    Ok(())
}

/// I.i.d. degrees from the discrete power law `P(d) ~ d^-exponent` on
/// `[d_min, d_max]`, by inverse transform. An odd total is fixed by bumping a
/// uniformly chosen entry below `d_max`.
pub fn gen_power_law_degrees(n: usize, exponent: f64, d_min: usize, d_max: usize, seed: u64) -> Result<Vec<usize>> {
    gen_power_law_degrees_with_rng(n, exponent, d_min, d_max, &mut seeded_rng(seed))
}

pub fn gen_power_law_degrees_with_rng<R: Rng + ?Sized>(
    n: usize,
    exponent: f64,
    d_min: usize,
    d_max: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_power_law(n, exponent, d_min, d_max)?;
    let mut cdf = Vec::with_capacity(d_max - d_min + 1);
    let mut total = 0.0;
    for d in d_min..=d_max {
        total += (d as f64).powf(-exponent);
        cdf.push(total);
    }
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            d_min + idx
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let below: Vec<usize> = (0..n).filter(|&i| degrees[i] < d_max).collect();
        match below.choose(rng) {
            Some(&i) => degrees[i] += 1,
            None => {
                return Err(Error::domain(format!(
                    "odd degree sum with every entry at d_max = {d_max}; parity cannot be fixed"
                )))
            }
        }
    }
    Ok(degrees)
}

/// Configuration-model graph together with its realized degree statistics.
#[derive(Debug, Clone)]
pub struct ConfigModelGraph {
    pub graph: Graph,
    pub realized: DegreeSequenceStats,
    pub erased_self_loops: usize,
    pub erased_multi_edges: usize,
}

/// Erased configuration model: uniform stub matching, then self-loops
/// dropped and parallel edges collapsed.
pub fn gen_config_model(degrees: &[usize], seed: u64) -> Result<ConfigModelGraph> {
    gen_config_model_with_rng(degrees, &mut seeded_rng(seed))
}

pub fn gen_config_model_with_rng<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<ConfigModelGraph> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::domain("empty degree sequence"));
    }
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return Err(Error::domain("degree sum is odd; fix parity before matching stubs"));
    }
    if let Some(&max) = degrees.iter().max() {
        if max >= n && n > 1 {
            return Err(Error::domain(format!("max degree {max} must be below n = {n}")));
        }
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u, d))
        .collect();
    stubs.shuffle(rng);
    let mut seen = HashSet::with_capacity(stubs.len() / 2);
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    let (mut loops, mut multi) = (0, 0);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v {
            loops += 1;
        } else if !seen.insert((u, v)) {
            multi += 1;
        } else {
            edges.push((u, v, None));
        }
    }
    let graph = Graph::from_edges(n, edges, vec![Tier::Flat; n])?;
    let realized = graph.degree_stats()?;
    Ok(ConfigModelGraph {
        graph,
        realized,
        erased_self_loops: loops,
        erased_multi_edges: multi,
    })
}

/// Tier-1/tier-2 core: nodes `0..n1` are tier-1, `n1..n1+n2` tier-2. Three
/// independent Bernoulli layers, then `k1` tier-1 nodes drawn uniformly as
/// the SDN cluster.
pub fn gen_tiered_core<F: Real>(spec: &TieredCoreSpec<F>, seed: u64) -> Result<Graph> {
    gen_tiered_core_with_rng(spec, &mut seeded_rng(seed))
}

pub fn gen_tiered_core_with_rng<F: Real, R: Rng + ?Sized>(spec: &TieredCoreSpec<F>, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    let (n1, n2) = (spec.n1, spec.n2);
    let n = n1 + n2;
    let p11 = spec.p11.to_f64_lossy();
    let p12 = spec.p12.to_f64_lossy();
    let p22 = spec.p22.to_f64_lossy();
    let mut edges = Vec::new();
    for u in 0..n1 {
        for v in u + 1..n1 {
            if rng.gen_bool(p11) {
                edges.push((u, v, Some(EdgeKind::Peer11)));
            }
        }
    }
    for u in 0..n1 {
        for v in n1..n {
            if rng.gen_bool(p12) {
                edges.push((u, v, Some(EdgeKind::Transit12)));
            }
        }
    }
    for u in n1..n {
        for v in u + 1..n {
            if rng.gen_bool(p22) {
                edges.push((u, v, Some(EdgeKind::Peer22)));
            }
        }
    }
    let roles = (0..n).map(|u| if u < n1 { Tier::Tier1 } else { Tier::Tier2 }).collect();
    Graph::from_edges(n, edges, roles)?.with_random_cluster(spec.k1, rng)
}
