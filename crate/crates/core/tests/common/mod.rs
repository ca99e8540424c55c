//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn harmonic(m: usize) -> f64 {
    (1..=m).rev().map(|j| 1.0 / j as f64).sum()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Distribution of the position of the first cluster member (nodes
/// `0..k`) over all orderings of `n` nodes.
pub fn first_hit_by_enumeration(n: usize, k: usize) -> Vec<BigRational> {
    let perms = permutations(n);
    let mut counts = vec![0i64; n - k + 1];
    for p in &perms {
        let pos = p.iter().position(|&u| u < k).expect("k >= 1");
        counts[pos] += 1;
    }
    let total = perms.len() as i64;
    counts.into_iter().map(|c| rational(c, total)).collect()
}

/// Exact expected time to inform every node reachable from `announcer`
/// when each uninformed node adjacent to an informed one fires at rate 1
/// and touching the cluster informs all of it. Solved over informed
/// subsets.
pub fn ctmc_expected_time(adj: &[Vec<usize>], cluster: &[usize], announcer: usize) -> BigRational {
    let n = adj.len();
    assert!(n <= 20);
    let cluster_mask: u32 = cluster.iter().map(|&c| 1u32 << c).sum();
    let close = |mask: u32| {
        if mask & cluster_mask != 0 {
            mask | cluster_mask
        } else {
            mask
        }
    };
    fn solve(
        mask: u32,
        adj: &[Vec<usize>],
        close: &dyn Fn(u32) -> u32,
        memo: &mut HashMap<u32, BigRational>,
    ) -> BigRational {
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let frontier: Vec<usize> = (0..adj.len())
            .filter(|&v| mask & (1 << v) == 0 && adj[v].iter().any(|&u| mask & (1 << u) != 0))
            .collect();
        let value = if frontier.is_empty() {
            BigRational::from_integer(0.into())
        } else {
            let r = BigRational::from_integer((frontier.len() as i64).into());
            let mut acc = BigRational::from_integer(1.into());
            for &v in &frontier {
                acc += solve(close(mask | (1 << v)), adj, close, memo);
            }
            acc / r
        };
        memo.insert(mask, value.clone());
        value
    }
    let mut memo = HashMap::new();
    solve(close(1 << announcer), adj, &close, &mut memo)
}

/// [`ctmc_expected_time`] averaged over a uniform announcer.
pub fn ctmc_uniform_announcer(adj: &[Vec<usize>], cluster: &[usize]) -> BigRational {
    let n = adj.len();
    let sum = (0..n).fold(BigRational::from_integer(0.into()), |acc, a| {
        acc + ctmc_expected_time(adj, cluster, a)
    });
    sum / BigRational::from_integer((n as i64).into())
}

pub fn complete_graph(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect()
}

/// A uniformly random simple `d`-regular graph on `n` nodes, by rejecting
/// stub matchings with loops or repeated edges.
pub fn random_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Vec<Vec<usize>> {
    'retry: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
        stubs.shuffle(rng);
        let mut adj = vec![Vec::new(); n];
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u].contains(&v) {
                continue 'retry;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        return adj;
    }
}

/// Mean of `values`, with its standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
