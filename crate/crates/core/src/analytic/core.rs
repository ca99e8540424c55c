//! Tier-1/tier-2 Internet core: `E[T] = max(E[T_peering], E[T_transit])`.

use serde::{Deserialize, Serialize};

use super::{convergence_time_with, full_mesh_convergence_time, EvalOptions};
use crate::error::{Error, Result};
use crate::model::{ModelParams, TieredCoreSpec, TopologySpec};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreEstimate<F> {
    /// Announcer's tier-2 peers, reached directly.
    pub t_peering: F,
    /// Until the first tier-1 provider holds the update.
    pub t_x_tier1: F,
    /// Spread over the tier-1 peering graph (with its SDN cluster).
    pub t_tier1: F,
    /// Tier-1 providers to the remaining tier-2 customers.
    pub t_tier1_tier2: F,
    pub t_transit: F,
    pub t_total: F,
}

/// Full-mesh time with a single-node cluster on `size` nodes; sizes 0 and 1
/// need no dissemination.
fn single_source_mesh<F: Real>(size: usize, lambda: F) -> Result<F> {
    if size <= 1 {
        return Ok(F::zero());
    }
    Ok(full_mesh_convergence_time(&ModelParams::new(size, 1, lambda)?)?.expected_time)
}

fn rounded_size<F: Real>(value: F) -> usize {
    value.round().max(F::zero()).to_usize().unwrap_or(0)
}

pub fn core_convergence_time<F: Real>(spec: &TieredCoreSpec<F>) -> Result<CoreEstimate<F>> {
    core_convergence_time_with(spec, &EvalOptions::default())
}

pub fn core_convergence_time_with<F: Real>(spec: &TieredCoreSpec<F>, opts: &EvalOptions<F>) -> Result<CoreEstimate<F>> {
    spec.validate()?;
    if spec.n1 == 0 || spec.p12 == F::zero() {
        return Err(Error::UnreachableTransit(format!(
            "no tier-1 provider links (n1 = {}, p12 = {})",
            spec.n1, spec.p12
        )));
    }
    let n1 = F::count(spec.n1);
    let n2 = F::count(spec.n2);
    let peers = rounded_size(n2 * spec.p22);
    let non_peers = rounded_size(n2 * (F::one() - spec.p22));

    let t_peering = single_source_mesh(peers, spec.lambda)?;
    let t_x_tier1 = F::one() / (spec.lambda * spec.p12 * n1);
    let tier1 = TopologySpec::Poisson {
        params: ModelParams::new(spec.n1, spec.k1, spec.lambda)?,
        p_edge: spec.p11,
    };
    let t_tier1 = convergence_time_with(&tier1, opts)?.expected_time;
    let t_tier1_tier2 = single_source_mesh(non_peers, n1 * spec.p12 * spec.lambda)?;
    let t_transit = t_x_tier1 + t_tier1 + t_tier1_tier2;
    Ok(CoreEstimate {
        t_peering,
        t_x_tier1,
        t_tier1,
        t_tier1_tier2,
        t_transit,
        t_total: t_peering.max(t_transit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k1: usize, p22: f64) -> TieredCoreSpec<f64> {
        TieredCoreSpec {
            n1: 20,
            n2: 100,
            k1,
            p11: 0.5,
            p12: 0.25,
            p22,
            lambda: 1.0,
        }
    }

    fn harmonic(m: usize) -> f64 {
        (1..=m).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn case_study_grid_first_hop() {
        let est = core_convergence_time(&spec(1, 0.2)).unwrap();
        assert!((est.t_x_tier1 - 0.2).abs() < 1e-15);
        assert!((est.t_peering - harmonic(19)).abs() < 1e-12);
        assert!((est.t_tier1_tier2 - harmonic(79) / 5.0).abs() < 1e-12);
        assert!((est.t_transit - (est.t_x_tier1 + est.t_tier1 + est.t_tier1_tier2)).abs() < 1e-12);
        assert_eq!(est.t_total, est.t_peering.max(est.t_transit));
    }

    #[test]
    fn all_tier2_peer_leaves_no_transit_customers() {
        let est = core_convergence_time(&spec(3, 1.0)).unwrap();
        assert_eq!(est.t_tier1_tier2, 0.0);
        assert!((est.t_peering - harmonic(99)).abs() < 1e-12);
    }

    #[test]
    fn full_tier1_cluster_and_full_peering() {
        let est = core_convergence_time(&spec(20, 1.0)).unwrap();
        assert_eq!(est.t_tier1, 0.0);
        assert_eq!(est.t_total, est.t_peering);
    }

    #[test]
    fn no_provider_links_is_unreachable() {
        let mut s = spec(1, 0.3);
        s.p12 = 0.0;
        assert!(matches!(core_convergence_time(&s), Err(Error::UnreachableTransit(_))));
    }

    #[test]
    fn both_branches_can_dominate() {
        let peering = core_convergence_time(&spec(20, 0.9)).unwrap();
        assert!(peering.t_peering > peering.t_transit);
        let transit = core_convergence_time(&spec(1, 0.1)).unwrap();
        assert!(transit.t_transit > transit.t_peering);
    }

    #[test]
    fn rate_enters_first_hop() {
        let mut s = spec(1, 0.2);
        s.lambda = 2.0;
        let est = core_convergence_time(&s).unwrap();
        assert!((est.t_x_tier1 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn total_nonincreasing_in_cluster_size() {
        for p22 in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let totals: Vec<f64> = (1..=20)
                .map(|k1| core_convergence_time(&spec(k1, p22)).unwrap().t_total)
                .collect();
            for w in totals.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "p22 {p22}: {totals:?}");
            }
        }
    }
}
