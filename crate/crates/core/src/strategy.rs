//! Mixed strategies: exact finite-support tables, procedural samplers, or both.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::model::{check_n, Tactic};
use crate::rational::{to_f64, to_fraction, Q};

/// Produces a player's itinerary round by round.
///
/// `extend` appends at least one round to `out` (0-based locations) and may
/// inspect what was already drawn, so a sampler can describe strategies that
/// play beyond the first `n` rounds.
pub trait ItinerarySampler: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;

    fn extend(&self, rng: &mut dyn RngCore, out: &mut Vec<usize>);

    /// Draws the first `n` rounds as a tactic.
    fn sample_tactic(&self, rng: &mut dyn RngCore) -> Tactic {
        let mut rounds = Vec::with_capacity(self.n());
        while rounds.len() < self.n() {
            self.extend(rng, &mut rounds);
        }
        rounds.truncate(self.n());
        Tactic::from_zero_based(rounds)
    }
}

/// Draws an `n`-round tactic and repeats it with period `n` when asked for more rounds.
pub trait TacticSampler: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn draw(&self, rng: &mut dyn RngCore) -> Tactic;
}

/// Adapter turning a [`TacticSampler`] into a periodic [`ItinerarySampler`].
#[derive(Debug)]
pub struct Periodic<T>(pub T);

impl<T: TacticSampler> ItinerarySampler for Periodic<T> {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn extend(&self, rng: &mut dyn RngCore, out: &mut Vec<usize>) {
        let n = self.0.n();
        if out.len() < n {
            out.clear();
            out.extend_from_slice(self.0.draw(rng).rounds());
        } else {
            let start = out.len() - n;
            out.extend_from_within(start..start + n);
        }
    }

    fn sample_tactic(&self, rng: &mut dyn RngCore) -> Tactic {
        self.0.draw(rng)
    }
}

/// Samples from an explicit table by inverting the cumulative float weights.
#[derive(Debug, Clone)]
pub struct TableSampler {
    n: usize,
    tactics: Vec<Tactic>,
    cumulative: Vec<f64>,
}

impl TableSampler {
    pub fn new(n: usize, support: &[(Tactic, Q)]) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(support.len());
        for (_, w) in support {
            acc += to_f64(w);
            cumulative.push(acc);
        }
        TableSampler {
            n,
            tactics: support.iter().map(|(t, _)| t.clone()).collect(),
            cumulative,
        }
    }
}

impl TacticSampler for TableSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Tactic {
        let total = *self.cumulative.last().expect("non-empty table");
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.tactics.len() - 1);
        self.tactics[idx].clone()
    }
}

/// A probability distribution over tactics.
#[derive(Clone)]
pub struct Strategy {
    n: usize,
    name: String,
    support: Option<Vec<(Tactic, Q)>>,
    sampler: Option<Arc<dyn ItinerarySampler>>,
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Strategy")
            .field("n", &self.n)
            .field("name", &self.name)
            .field("support_len", &self.support.as_ref().map(Vec::len))
            .field("sampler", &self.sampler)
            .finish()
    }
}

impl Strategy {
    /// Exact table. Duplicate tactics are merged and zero weights dropped; the
    /// weights must be non-negative and sum to exactly 1.
    pub fn from_table(n: usize, name: impl Into<String>, support: Vec<(Tactic, Q)>) -> Result<Self> {
        check_n(n)?;
        let mut merged: BTreeMap<Tactic, Q> = BTreeMap::new();
        let mut total = Q::zero();
        for (tactic, weight) in support {
            if tactic.n() != n {
                return Err(Error::MismatchedN(n, tactic.n()));
            }
            if weight.is_negative() {
                return Err(Error::BadWeights(format!("negative weight {}", to_fraction(&weight))));
            }
            total += &weight;
            *merged.entry(tactic).or_insert_with(Q::zero) += weight;
        }
        if total != Q::one() {
            return Err(Error::BadWeights(to_fraction(&total)));
        }
        let support: Vec<_> = merged.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(Strategy {
            n,
            name: name.into(),
            support: Some(support),
            sampler: None,
        })
    }

    pub fn point_mass(tactic: Tactic, name: impl Into<String>) -> Self {
        Strategy {
            n: tactic.n(),
            name: name.into(),
            support: Some(vec![(tactic, Q::one())]),
            sampler: None,
        }
    }

    pub fn from_sampler(name: impl Into<String>, sampler: Arc<dyn ItinerarySampler>) -> Result<Self> {
        check_n(sampler.n())?;
        Ok(Strategy {
            n: sampler.n(),
            name: name.into(),
            support: None,
            sampler: Some(sampler),
        })
    }

    /// Attaches a procedural sampler that must draw from the same distribution as the table.
    pub fn with_sampler(mut self, sampler: Arc<dyn ItinerarySampler>) -> Result<Self> {
        if sampler.n() != self.n {
            return Err(Error::MismatchedN(self.n, sampler.n()));
        }
        self.sampler = Some(sampler);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Option<&[(Tactic, Q)]> {
        self.support.as_deref()
    }

    /// The table, or an error naming the strategy when only a sampler exists.
    pub fn require_support(&self) -> Result<&[(Tactic, Q)]> {
        self.support()
            .ok_or_else(|| Error::NoSupportTable(self.name.clone()))
    }

    pub fn has_procedural_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    /// The procedural sampler if present, otherwise one derived from the table
    /// (periodic beyond round `n`).
    pub fn sampler(&self) -> Arc<dyn ItinerarySampler> {
        match (&self.sampler, &self.support) {
            (Some(s), _) => Arc::clone(s),
            (None, Some(table)) => Arc::new(Periodic(TableSampler::new(self.n, table))),
            (None, None) => unreachable!("constructors guarantee a table or a sampler"),
        }
    }

    /// Sampler drawing directly from the table, ignoring any procedural sampler.
    pub fn table_sampler(&self) -> Result<TableSampler> {
        Ok(TableSampler::new(self.n, self.require_support()?))
    }
}
