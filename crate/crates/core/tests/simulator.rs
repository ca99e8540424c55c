mod common;

use bgp_sdn::experiment::{simulate_ensemble, DisconnectedPolicy, Topology};
use bgp_sdn::graph::{gen_full_mesh, gen_poisson, gen_tiered_core, Forwarding, TieredRules};
use bgp_sdn::sim::{simulate_batch_times, Announcer};
use bgp_sdn::{
    core_convergence_time, simulate_batch, simulate_once, simulate_tiered, Error, RunConfig, Tier, TieredCoreSpec,
};
use common::*;

#[test]
fn two_nodes_converge_after_one_exponential() {
    let g = gen_full_mesh(2).unwrap().with_cluster([0]).unwrap();
    let stats = simulate_batch(&RunConfig::new(g, 1.0f64, 11), 100_000).unwrap();
    assert!((stats.mean - 1.0).abs() < 0.02, "{}", stats.mean);
    let g = gen_full_mesh(2).unwrap().with_cluster([1]).unwrap();
    let stats = simulate_batch(&RunConfig::new(g, 4.0f64, 12), 100_000).unwrap();
    assert!((stats.mean - 0.25).abs() < 0.02 * 0.25, "{}", stats.mean);
}

#[test]
fn small_full_mesh_matches_exact_value() {
    let g = gen_full_mesh(4).unwrap().with_cluster([1, 3]).unwrap();
    let stats = simulate_batch(&RunConfig::new(g, 1.0f64, 99), 100_000).unwrap();
    let z = (stats.mean - 4.0 / 3.0) / stats.std_err;
    assert!(z.abs() < 3.0, "mean {} (z = {z:.2})", stats.mean);
}

#[test]
fn large_full_mesh_matches_harmonic_number() {
    let g = gen_full_mesh(300).unwrap().with_cluster([17]).unwrap();
    let stats = simulate_batch(&RunConfig::new(g, 1.0f64, 3), 200).unwrap();
    let z = (stats.mean - harmonic(299)) / stats.std_err;
    assert!(z.abs() < 3.0, "mean {} (z = {z:.2})", stats.mean);
}

#[test]
fn one_run_has_zero_spread() {
    let g = gen_full_mesh(10).unwrap().with_cluster([0]).unwrap();
    let cfg = RunConfig::new(g, 1.0f64, 8);
    let stats = simulate_batch(&cfg, 1).unwrap();
    let times = simulate_batch_times(&cfg, 1).unwrap();
    assert_eq!(stats.mean, times[0]);
    assert_eq!(stats.std_err, 0.0);
    assert_eq!(simulate_batch(&cfg, 50).unwrap(), simulate_batch(&cfg, 50).unwrap());
}

/// Holding times on a full mesh with a single-node cluster and a fixed
/// announcer: step `i` waits Exp(λ (N - i)).
#[test]
fn holding_times_follow_the_frontier_rate() {
    let (n, lambda, runs) = (12usize, 1.5, 40_000);
    let g = gen_full_mesh(n).unwrap().with_cluster([n - 1]).unwrap();
    let mut holds = vec![Vec::with_capacity(runs); n - 1];
    for seed in 0..runs as u64 {
        let cfg = RunConfig::new(g.clone(), lambda, seed).with_announcer(Announcer::Fixed(0));
        let trace = simulate_once(&cfg).unwrap();
        assert_eq!(trace.events.len(), n);
        for (step, w) in trace.events.windows(2).enumerate() {
            holds[step].push(w[1].time - w[0].time);
        }
    }
    for (idx, h) in holds.iter().enumerate() {
        let rate = lambda * (n - 1 - idx) as f64;
        let (mean, se) = mean_se(h);
        assert!(
            ((mean - 1.0 / rate) / se).abs() < 4.0,
            "step {}: {mean} vs {}",
            idx + 1,
            1.0 / rate
        );
        let var = h.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (h.len() - 1) as f64;
        let cv = var.sqrt() / mean;
        assert!((cv - 1.0).abs() < 0.05, "step {}: cv {cv}", idx + 1);
        let tail = h.iter().filter(|&&t| t > 1.0 / rate).count() as f64 / h.len() as f64;
        assert!((tail - (-1.0f64).exp()).abs() < 0.01, "step {}: tail {tail}", idx + 1);
    }
}

#[test]
fn rate_doubling_halves_every_event_time() {
    for seed in 0..20 {
        let g = gen_poisson(80, 0.1, seed).unwrap().with_cluster([1, 2, 3, 40]).unwrap();
        let cfg = RunConfig::new(g, 0.7, seed).with_coverage(bgp_sdn::sim::CoveragePolicy::ReachableOnly);
        let a = simulate_once(&cfg).unwrap();
        let b = simulate_once(&RunConfig { lambda: 1.4, ..cfg }).unwrap();
        assert_eq!(a.events.len(), b.events.len());
        for (x, y) in a.events.iter().zip(&b.events) {
            assert_eq!(x.nodes, y.nodes);
            assert_eq!(x.time, 2.0 * y.time);
        }
    }
}

fn tiered(n1: usize, n2: usize, k1: usize, p11: f64, p12: f64, p22: f64) -> TieredCoreSpec<f64> {
    TieredCoreSpec {
        n1,
        n2,
        k1,
        p11,
        p12,
        p22,
        lambda: 1.0,
    }
}

#[test]
fn full_tier2_peering_covers_tier2_in_one_hop() {
    let spec = tiered(6, 30, 1, 0.5, 1.0, 1.0);
    let runs = 20_000;
    let mut last_tier2 = Vec::with_capacity(runs);
    for seed in 0..runs as u64 {
        let g = gen_tiered_core(&spec, seed).unwrap();
        let announcer = 6 + (seed as usize % 30);
        let cfg = RunConfig::new(g.clone(), 1.0, seed)
            .with_announcer(Announcer::Fixed(announcer))
            .with_forwarding(Forwarding::for_graph(&g));
        let trace = simulate_tiered(&cfg).unwrap();
        let t = trace
            .events
            .iter()
            .filter(|e| e.nodes.iter().any(|&u| g.tier(u) == Tier::Tier2))
            .map(|e| e.time)
            .fold(0.0, f64::max);
        last_tier2.push(t);
    }
    let (mean, se) = mean_se(&last_tier2);
    let z = (mean - harmonic(29)) / se;
    assert!(z.abs() < 4.0, "{mean} vs {} (z = {z:.2})", harmonic(29));
}

#[test]
fn missing_transit_leaves_the_core_unreachable() {
    let spec = tiered(5, 20, 1, 0.5, 0.0, 0.3);
    let g = gen_tiered_core(&spec, 4).unwrap();
    let cfg = RunConfig::new(g.clone(), 1.0, 4)
        .with_announcer(Announcer::Fixed(7))
        .with_forwarding(Forwarding::for_graph(&g));
    assert!(matches!(simulate_tiered(&cfg), Err(Error::Unreachable { .. })));
    let literal = cfg.with_forwarding(Forwarding::Tiered(TieredRules::LITERAL));
    assert!(matches!(simulate_tiered(&literal), Err(Error::Unreachable { .. })));
}

#[test]
fn tier1_announcer_is_rejected() {
    let g = gen_tiered_core(&tiered(5, 20, 1, 0.5, 0.5, 0.3), 1).unwrap();
    let cfg = RunConfig::new(g.clone(), 1.0, 1)
        .with_announcer(Announcer::Fixed(0))
        .with_forwarding(Forwarding::for_graph(&g));
    assert!(matches!(simulate_tiered(&cfg), Err(Error::Domain(_))));
}

#[test]
fn tiered_core_estimate_tracks_simulation() {
    let spec = tiered(20, 100, 1, 0.5, 0.25, 0.2);
    let est = core_convergence_time(&spec).unwrap();
    assert!((est.t_x_tier1 - 0.2).abs() < 1e-12);
    let topo = Topology::Tiered {
        n1: 20,
        n2: 100,
        k1: 1,
        p11: 0.5,
        p12: 0.25,
        p22: 0.2,
    };
    let sim = simulate_ensemble(&topo, 1.0, 5000, 2024, DisconnectedPolicy::default()).unwrap();
    let rel = (est.t_total - sim.stats.mean).abs() / sim.stats.mean;
    println!(
        "tiered core: analytic {:.4}, simulated {:.4} ± {:.4}",
        est.t_total, sim.stats.mean, sim.stats.std_err
    );
    assert!(rel < 0.25, "analytic {} vs simulated {}", est.t_total, sim.stats.mean);
}

#[test]
fn traces_are_atomic_and_monotone() {
    let mut rng = seeded_rng_for(9);
    for seed in 0..500u64 {
        let n = 5 + (seed as usize % 40);
        let g = gen_poisson(n, 0.3, seed).unwrap();
        let k = 1 + (seed as usize % n);
        let g = g.with_random_cluster(k, &mut rng).unwrap();
        let cfg = RunConfig::new(g.clone(), 1.0, seed).with_coverage(bgp_sdn::sim::CoveragePolicy::ReachableOnly);
        let trace = simulate_once(&cfg).unwrap();
        let mut informed = vec![false; n];
        let mut count = 0;
        let mut prev = -1.0;
        for e in &trace.events {
            assert!(e.time > prev || (e.time == 0.0 && prev < 0.0));
            prev = e.time;
            assert!(!e.nodes.is_empty());
            for &u in &e.nodes {
                assert!(!informed[u]);
                informed[u] = true;
            }
            count += e.nodes.len();
            let hit = g.cluster().iter().filter(|&&c| informed[c]).count();
            assert!(hit == 0 || hit == g.cluster().len());
        }
        assert_eq!(count, trace.informed_count());
    }
}

fn seeded_rng_for(seed: u64) -> bgp_sdn::graph::SimRng {
    bgp_sdn::graph::seeded_rng(seed)
}
