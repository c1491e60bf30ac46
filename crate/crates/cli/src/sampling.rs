//! Sample points of a region.

use cone_verify::Region64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::args::Strategy;
use crate::error::{CliError, CliResult};

/// Rejection attempts per requested random sample.
const MAX_ATTEMPTS_PER_SAMPLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSamplingPlan {
    pub strategy: Strategy,
    pub count: usize,
    pub seed: u64,
    pub skip_singularity_radius: f64,
}

impl RegionSamplingPlan {
    /// Points inside `region` and outside the skip balls around `singularities`.
    ///
    /// `Random` draws `count` points uniformly. `Grid` places `m = ⌊count^{1/n}⌋`
    /// cell centres per axis of the bounding box and keeps those inside the
    /// region, so it may return fewer than `count` points.
    pub fn samples(&self, region: &Region64, singularities: &[Vec<f64>]) -> CliResult<Vec<Vec<f64>>> {
        let r2 = self.skip_singularity_radius * self.skip_singularity_radius;
        let keep = |x: &[f64]| {
            self.skip_singularity_radius <= 0.0
                || singularities.iter().all(|s| s.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > r2)
        };
        if self.count == 0 {
            return Ok(Vec::new());
        }
        match self.strategy {
            Strategy::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut out = Vec::with_capacity(self.count);
                for _ in 0..self.count * MAX_ATTEMPTS_PER_SAMPLE {
                    let x = region
                        .sample_uniform(&mut rng)
                        .ok_or_else(|| CliError::Usage("sampling needs a bounded region".into()))?;
                    if keep(&x) {
                        out.push(x);
                        if out.len() == self.count {
                            return Ok(out);
                        }
                    }
                }
                Err(CliError::Usage("skip radius excludes nearly the whole region".into()))
            }
            Strategy::Grid => {
                let bounds: Vec<(f64, f64)> = match region {
                    Region64::Box(b) => b.clone(),
                    Region64::Ball { center, radius } => center.iter().map(|c| (c - radius, c + radius)).collect(),
                    Region64::Unbounded => return Err(CliError::Usage("sampling needs a bounded region".into())),
                };
                let n = bounds.len();
                let mut m = (self.count as f64).powf(1.0 / n as f64).floor().max(1.0) as usize;
                while (m + 1).checked_pow(n as u32).is_some_and(|p| p <= self.count) {
                    m += 1;
                }
                let mut out = Vec::new();
                let mut idx = vec![0usize; n];
                loop {
                    let x: Vec<f64> = idx
                        .iter()
                        .zip(&bounds)
                        .map(|(&i, &(lo, hi))| lo + (hi - lo) * (i as f64 + 0.5) / m as f64)
                        .collect();
                    if region.contains(&x) && keep(&x) {
                        out.push(x);
                    }
                    let mut axis = 0;
                    while axis < n {
                        idx[axis] += 1;
                        if idx[axis] < m {
                            break;
                        }
                        idx[axis] = 0;
                        axis += 1;
                    }
                    if axis == n {
                        return Ok(out);
                    }
                }
            }
        }
    }
}
