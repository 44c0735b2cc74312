//! Seeded Monte Carlo estimates of the expected waiting time.
//!
//! Trial `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! outcome of every trial is fixed by the seed alone and the integer
//! reductions make estimates identical for any number of workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{same_n, Binding};
use crate::par::map_indexed;
use crate::rational::{to_f64, to_fraction, Q};
use crate::strategy::{ItinerarySampler, Strategy};
use crate::zoo::{anderson_weber, AwConfig};

const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub n: usize,
    pub trials: u64,
    pub horizon: usize,
    pub mean: f64,
    pub std_error: f64,
    pub meet_fraction: f64,
    pub seed: u64,
    /// Sum of all (censored) waiting times.
    pub total_wait: u64,
    pub met: u64,
}

impl MCEstimate {
    fn from_sums(n: usize, trials: u64, horizon: usize, seed: u64, sums: Sums) -> Self {
        let t = trials as f64;
        let mean = sums.total as f64 / t;
        let std_error = if trials > 1 {
            // T·Σz² - (Σz)² is exact in integers.
            let spread = trials as u128 * sums.squares - (sums.total as u128) * (sums.total as u128);
            (spread as f64 / (t * (t - 1.0)) / t).sqrt()
        } else {
            0.0
        };
        MCEstimate {
            n,
            trials,
            horizon,
            mean,
            std_error,
            meet_fraction: sums.met as f64 / t,
            seed,
            total_wait: sums.total,
            met: sums.met,
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    total: u64,
    squares: u128,
    met: u64,
}

/// Plays one game up to `horizon` rounds; returns the meeting round or `horizon + 1`.
fn play_trial(
    a: &dyn ItinerarySampler,
    b: &dyn ItinerarySampler,
    horizon: usize,
    rng: &mut dyn RngCore,
    path_a: &mut Vec<usize>,
    path_b: &mut Vec<usize>,
) -> usize {
    let n = a.n();
    let binding = Binding::random(n, rng);
    path_a.clear();
    path_b.clear();
    for round in 0..horizon {
        while path_a.len() <= round {
            a.extend(rng, path_a);
        }
        while path_b.len() <= round {
            b.extend(rng, path_b);
        }
        if binding.apply(path_a[round]) == path_b[round] {
            return round + 1;
        }
    }
    horizon + 1
}

/// Estimates `E W(σ_A, σ_B)` for the game censored at `horizon` rounds.
pub fn estimate_expected_waiting(
    a: &Strategy,
    b: &Strategy,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> Result<MCEstimate> {
    same_n(a.n(), b.n())?;
    let n = a.n();
    if horizon < n {
        return Err(Error::InvalidArgument(format!("horizon {horizon} is shorter than n={n}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let (sa, sb) = (a.sampler(), b.sampler());
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = trials.div_ceil(CHUNK as u64) as usize;
    let parts = map_indexed(chunks, |c| {
        let start = c as u64 * CHUNK as u64;
        let end = trials.min(start + CHUNK as u64);
        let mut sums = Sums::default();
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        for trial in start..end {
            let mut rng = base.clone();
            rng.set_stream(trial);
            let z = play_trial(sa.as_ref(), sb.as_ref(), horizon, &mut rng, &mut pa, &mut pb);
            sums.total += z as u64;
            sums.squares += (z as u128) * (z as u128);
            sums.met += u64::from(z <= horizon);
        }
        sums
    });
    let sums = parts.into_iter().fold(Sums::default(), |acc, s| Sums {
        total: acc.total + s.total,
        squares: acc.squares + s.squares,
        met: acc.met + s.met,
    });
    Ok(MCEstimate::from_sums(n, trials, horizon, seed, sums))
}

/// One row of an Anderson–Weber θ scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AwScanRow {
    pub theta: String,
    pub theta_value: f64,
    pub estimate: MCEstimate,
}

/// Symmetric multi-block Anderson–Weber play for every `θ`, all with the same
/// seed (common random numbers across rows).
pub fn aw_scan(n: usize, thetas: &[Q], horizon: usize, trials: u64, seed: u64) -> Result<Vec<AwScanRow>> {
    thetas
        .iter()
        .map(|theta| {
            let s = anderson_weber(&AwConfig::multi_block(n, theta.clone(), horizon))?;
            Ok(AwScanRow {
                theta: to_fraction(theta),
                theta_value: to_f64(theta),
                estimate: estimate_expected_waiting(&s, &s, horizon, trials, seed)?,
            })
        })
        .collect()
}

/// Row with the smallest estimated mean (first on ties).
pub fn best_row(rows: &[AwScanRow]) -> Option<&AwScanRow> {
    rows.iter()
        .reduce(|best, r| if r.estimate.mean < best.estimate.mean { r } else { best })
}

pub fn aw_scan_csv(rows: &[AwScanRow]) -> String {
    let mut out = String::from("theta,n,horizon,trials,mean,std_error,meet_fraction,mean_over_n,seed\n");
    for r in rows {
        let e = &r.estimate;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.theta_value,
            e.n,
            e.horizon,
            e.trials,
            e.mean,
            e.std_error,
            e.meet_fraction,
            e.mean / e.n as f64,
            e.seed
        ));
    }
    out
}

/// A fresh per-process random seed, for callers that record it.
pub fn auto_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    std::collections::hash_map::RandomState::new().build_hasher().finish()
}
