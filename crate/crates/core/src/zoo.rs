//! Canonical strategies: wait-for-mommy, Anderson–Weber and uniformly random play.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_n, Tactic};
use crate::rational::{q, to_f64, Q};
use crate::strategy::{ItinerarySampler, Periodic, Strategy, TacticSampler};

/// Largest `n` for which the Anderson–Weber table is materialised.
pub const AW_TABLE_MAX_N: usize = 5;
/// Largest `n` for which the uniform strategy's `n^n` table is materialised.
pub const UNIFORM_TABLE_MAX_N: usize = 4;

/// The baby (always at location 1) and the mommy (visits `1, 2, …, n`).
pub fn wait_for_mommy_pair(n: usize) -> Result<(Strategy, Strategy)> {
    check_n(n)?;
    Ok((
        Strategy::point_mass(Tactic::constant(n, 1)?, "baby"),
        Strategy::point_mass(Tactic::identity(n)?, "mommy"),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockMode {
    /// One block of `n - 1` rounds, then the first round of a fresh block.
    TruncatedSingleGame,
    /// Independent blocks of `n - 1` rounds for as long as the game runs.
    MultiBlock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AwConfig {
    pub n: usize,
    pub theta: Q,
    pub block_mode: BlockMode,
    pub horizon: Option<usize>,
}

impl AwConfig {
    pub fn truncated(n: usize, theta: Q) -> Self {
        AwConfig {
            n,
            theta,
            block_mode: BlockMode::TruncatedSingleGame,
            horizon: None,
        }
    }

    pub fn multi_block(n: usize, theta: Q, horizon: usize) -> Self {
        AwConfig {
            n,
            theta,
            block_mode: BlockMode::MultiBlock,
            horizon: Some(horizon),
        }
    }
}

/// Draws one block: stay put with probability `theta`, otherwise sweep `n - 1`
/// distinct locations in random order.
fn push_block(n: usize, theta: f64, rng: &mut dyn RngCore, out: &mut Vec<usize>) {
    if rng.random::<f64>() < theta {
        let loc = rng.random_range(0..n);
        out.extend(std::iter::repeat_n(loc, n - 1));
    } else {
        let mut locations: Vec<usize> = (0..n).collect();
        for i in 0..n - 1 {
            let j = rng.random_range(i..n);
            locations.swap(i, j);
            out.push(locations[i]);
        }
    }
}

#[derive(Debug, Clone)]
pub struct AwMultiBlock {
    n: usize,
    theta: f64,
}

impl ItinerarySampler for AwMultiBlock {
    fn n(&self) -> usize {
        self.n
    }

    fn extend(&self, rng: &mut dyn RngCore, out: &mut Vec<usize>) {
        push_block(self.n, self.theta, rng, out);
    }
}

#[derive(Debug, Clone)]
pub struct AwTruncated {
    n: usize,
    theta: f64,
}

impl TacticSampler for AwTruncated {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Tactic {
        let mut rounds = Vec::with_capacity(2 * self.n);
        push_block(self.n, self.theta, rng, &mut rounds);
        push_block(self.n, self.theta, rng, &mut rounds);
        rounds.truncate(self.n);
        Tactic::from_zero_based(rounds)
    }
}

/// Exact table of the first `n` rounds: block of `n - 1` rounds, then a
/// uniformly distributed round (the first round of a fresh block).
fn aw_table(n: usize, theta: &Q) -> Vec<(Tactic, Q)> {
    let stay = theta / Q::from_integer(n.into());
    let sweep_count: usize = (1..=n).product(); // ordered (n-1)-tuples of distinct locations
    let sweep = (Q::one() - theta) / Q::from_integer(sweep_count.into());
    let last = q(1, n as i64);

    let mut blocks: Vec<(Vec<usize>, Q)> = (0..n).map(|l| (vec![l; n - 1], stay.clone())).collect();
    let mut prefix = Vec::new();
    fn sweeps(n: usize, prefix: &mut Vec<usize>, w: &Q, out: &mut Vec<(Vec<usize>, Q)>) {
        if prefix.len() == n - 1 {
            out.push((prefix.clone(), w.clone()));
            return;
        }
        for l in 0..n {
            if !prefix.contains(&l) {
                prefix.push(l);
                sweeps(n, prefix, w, out);
                prefix.pop();
            }
        }
    }
    sweeps(n, &mut prefix, &sweep, &mut blocks);

    let last = &last;
    blocks
        .iter()
        .flat_map(|(block, w)| {
            (0..n).map(move |r| {
                let mut rounds = block.clone();
                rounds.push(r);
                (Tactic::from_zero_based(rounds), w * last)
            })
        })
        .collect()
}

/// Anderson–Weber strategy with stay probability `theta`.
///
/// A table is attached for `n <= 5`; in multi-block mode it describes the
/// first `n` rounds, which is all the exact engine sees.
pub fn anderson_weber(cfg: &AwConfig) -> Result<Strategy> {
    check_n(cfg.n)?;
    if cfg.theta < Q::zero() || cfg.theta > Q::one() {
        return Err(Error::InvalidArgument("theta must lie in [0, 1]".into()));
    }
    let theta = to_f64(&cfg.theta);
    let name = format!("aw(theta={})", crate::rational::to_decimal(&cfg.theta));
    let sampler: Arc<dyn ItinerarySampler> = match cfg.block_mode {
        BlockMode::TruncatedSingleGame => Arc::new(Periodic(AwTruncated { n: cfg.n, theta })),
        BlockMode::MultiBlock => {
            if cfg.horizon.is_none() {
                return Err(Error::InvalidArgument("multi-block mode requires a horizon".into()));
            }
            Arc::new(AwMultiBlock { n: cfg.n, theta })
        }
    };
    if cfg.n <= AW_TABLE_MAX_N {
        Strategy::from_table(cfg.n, name, aw_table(cfg.n, &cfg.theta))?.with_sampler(sampler)
    } else {
        Strategy::from_sampler(name, sampler)
    }
}

#[derive(Debug, Clone)]
pub struct UniformSampler {
    n: usize,
}

impl ItinerarySampler for UniformSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn extend(&self, rng: &mut dyn RngCore, out: &mut Vec<usize>) {
        out.extend((0..self.n).map(|_| rng.random_range(0..self.n)));
    }
}

/// Every round an independent uniformly random location. Table for `n <= 4`.
pub fn uniform_random_strategy(n: usize) -> Result<Strategy> {
    check_n(n)?;
    let sampler = Arc::new(UniformSampler { n });
    if n <= UNIFORM_TABLE_MAX_N {
        let all = Tactic::all(n)?;
        let w = q(1, all.len() as i64);
        Strategy::from_table(n, "uniform", all.into_iter().map(|t| (t, w.clone())).collect())?
            .with_sampler(sampler)
    } else {
        Strategy::from_sampler("uniform", sampler)
    }
}
