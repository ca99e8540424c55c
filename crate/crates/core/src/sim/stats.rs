use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Summary of a batch of Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats<F> {
    pub runs: usize,
    pub mean: F,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single run.
    pub std_dev: F,
    pub std_err: F,
    pub ci95: (F, F),
}

impl<F: Real> RunStats<F> {
    pub fn from_samples(samples: &[F]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("no samples to summarize"));
        }
        let n = F::count(samples.len());
        let mean = F::accumulate(samples.iter().copied()) / n;
        let std_dev = if samples.len() > 1 {
            let ss = F::accumulate(samples.iter().map(|&t| (t - mean) * (t - mean)));
            (ss / (n - F::one())).sqrt()
        } else {
            F::zero()
        };
        let std_err = std_dev / n.sqrt();
        let half = F::from_f64_lossy(1.96) * std_err;
        Ok(Self {
            runs: samples.len(),
            mean,
            std_dev,
            std_err,
            ci95: (mean - half, mean + half),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample() {
        let s = RunStats::from_samples(&[2.5]).unwrap();
        assert_eq!((s.runs, s.mean, s.std_dev, s.std_err), (1, 2.5, 0.0, 0.0));
        assert_eq!(s.ci95, (2.5, 2.5));
    }

    #[test]
    fn known_values() {
        let s = RunStats::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.std_dev - sd).abs() < 1e-15);
        assert!((s.std_err - sd / 2.0).abs() < 1e-15);
        assert!((s.ci95.1 - s.mean - 1.96 * s.std_err).abs() < 1e-15);
        assert!(RunStats::<f64>::from_samples(&[]).is_err());
    }
}
