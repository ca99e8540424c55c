use rayon::prelude::*;

use super::{disseminate, draw_announcer, RunConfig, RunStats};
use crate::error::{Error, Result};
use crate::graph::seeded_rng;
use crate::scalar::Real;

/// Seed for stream `index` under `master` (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Convergence times of `runs` independent runs on the configured graph,
/// in run order. Run `i` uses seed `derive_seed(cfg.rng_seed, i)`.
pub fn simulate_batch_times<F: Real>(cfg: &RunConfig<F>, runs: usize) -> Result<Vec<F>> {
    cfg.validate()?;
    if runs == 0 {
        return Err(Error::domain("runs must be at least 1"));
    }
    let results: Vec<Result<F>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(cfg.rng_seed, i as u64));
            let announcer = draw_announcer(&cfg.graph, cfg.announcer, &mut rng)?;
            disseminate(
                &cfg.graph,
                announcer,
                cfg.lambda,
                cfg.forwarding,
                cfg.coverage,
                &mut rng,
            )
            .map(|t| t.convergence_time)
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Run {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn simulate_batch<F: Real>(cfg: &RunConfig<F>, runs: usize) -> Result<RunStats<F>> {
    RunStats::from_samples(&simulate_batch_times(cfg, runs)?)
}
