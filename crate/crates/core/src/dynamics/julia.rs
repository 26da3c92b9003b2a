use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use super::{repelling_fixed_point, require_degree};
use crate::rational::FixedPoint;
use crate::sphere::PointCloud;
use crate::{Error, ExtendedComplex, RationalMap, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRule {
    /// Branch `⌊u · d / 2^64⌋` for the next 64-bit output `u` of
    /// xoshiro256** seeded through SplitMix64 from `seed`.
    UniformRandom,
    /// Branch `step mod d`.
    Cycling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JuliaSampleConfig {
    pub n_points: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub branch_rule: BranchRule,
}

impl Default for JuliaSampleConfig {
    fn default() -> Self {
        JuliaSampleConfig { n_points: 5000, burn_in: 64, seed: 0, branch_rule: BranchRule::UniformRandom }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JuliaSample {
    pub cloud: PointCloud,
    /// Steps whose preimage computation failed and was retried.
    pub skipped: usize,
    pub start: FixedPoint,
}

fn lexicographic(a: &ExtendedComplex, b: &ExtendedComplex) -> std::cmp::Ordering {
    match (a.finite(), b.finite()) {
        (Some(z), Some(w)) => z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    }
}

/// Backward iteration from the repelling fixed point. Preimages are sorted
/// lexicographically (`∞` last) before a branch is chosen, so the chain is
/// reproducible for a fixed seed.
pub fn julia_sample(f: &RationalMap, cfg: &JuliaSampleConfig) -> Result<JuliaSample> {
    require_degree(f, 2)?;
    if cfg.n_points == 0 {
        return Err(Error::InvalidInput("n_points must be at least 1".into()));
    }
    let start = repelling_fixed_point(f)?;
    let d = f.degree() as u128;
    let mut rng = Xoshiro256StarStar::seed_from_u64(cfg.seed);
    let total = cfg.burn_in + cfg.n_points;
    let max_skips = 1000 + total;

    let mut points = Vec::with_capacity(cfg.n_points);
    let mut current = start.point;
    let mut previous = start.point;
    let mut skipped = 0usize;
    let mut step = 0usize;
    while step < total {
        let branch = match cfg.branch_rule {
            BranchRule::UniformRandom => ((rng.next_u64() as u128 * d) >> 64) as usize,
            BranchRule::Cycling => step % d as usize,
        };
        let mut pre = match f.preimages(current) {
            Ok(p) if p.len() == d as usize => p,
            _ => {
                skipped += 1;
                if skipped > max_skips {
                    return Err(Error::InvalidInput(format!("backward iteration starved after {skipped} retries")));
                }
                current = previous;
                continue;
            }
        };
        pre.sort_by(lexicographic);
        previous = current;
        current = pre[branch];
        if step >= cfg.burn_in {
            points.push(current);
        }
        step += 1;
    }
    Ok(JuliaSample { cloud: PointCloud::new(points)?, skipped, start })
}
