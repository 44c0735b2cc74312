//! Exact distributional quantities over a uniformly random binding.
//!
//! Two engines are available: exhaustive enumeration of all `n!` bindings, and
//! inclusion–exclusion over partial matchings of the cell set. Both produce
//! exact rationals and are cross-checked in the tests.

mod agreement;
mod enumerate;
mod rook;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

pub use agreement::{engine_scan, EngineScan};
pub use enumerate::BindingDistribution;

use crate::error::{Error, Result};
use crate::model::{cells_disjoint, cells_with_first_round, pair_set, same_n, Cell, PairSet, Tactic};
use crate::rational::{factorial, falling_factorial, fraction_string, fraction_strings, to_decimal, Q};
use crate::strategy::Strategy;

/// Which exact route to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Enumeration,
    InclusionExclusion,
}

/// Complexity envelopes of the two engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest `n` for which all `n!` bindings are enumerated.
    pub enumeration_max_n: usize,
    /// Largest cell count for full inclusion–exclusion.
    pub max_cells: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            enumeration_max_n: 10,
            max_cells: 24,
        }
    }
}

/// `P(Z > k)` for `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivalCurve {
    pub n: usize,
    #[serde(with = "fraction_strings")]
    pub values: Vec<Q>,
}

impl SurvivalCurve {
    /// `E Z = Σ_k P(Z > k)`.
    pub fn expectation(&self) -> Q {
        self.values.iter().fold(Q::zero(), |acc, v| acc + v)
    }
}

/// Moments of `X`, the number of constraint cells hit by the binding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub m: usize,
    #[serde(with = "fraction_string")]
    pub mean: Q,
    #[serde(with = "fraction_string")]
    pub variance: Q,
    #[serde(with = "fraction_string")]
    pub second_moment: Q,
    #[serde(with = "fraction_string")]
    pub third_moment: Q,
    #[serde(with = "fraction_string")]
    pub fourth_moment: Q,
    /// `E|X - EX|^4`.
    #[serde(with = "fraction_string")]
    pub fourth_central: Q,
}

impl MomentReport {
    /// From raw moments `E X^k`, `k = 0..=4`.
    pub(crate) fn from_raw(n: usize, m: usize, raw: [Q; 5]) -> Self {
        let [_, m1, m2, m3, m4] = raw;
        let mu = m1.clone();
        let variance = &m2 - &mu * &mu;
        let fourth_central = &m4 - Q::from_integer(4.into()) * &mu * &m3
            + Q::from_integer(6.into()) * &mu * &mu * &m2
            - Q::from_integer(3.into()) * &mu * &mu * &mu * &mu;
        MomentReport {
            n,
            m,
            mean: mu,
            variance,
            second_moment: m2,
            third_moment: m3,
            fourth_moment: m4,
            fourth_central,
        }
    }
}

/// The full exact evaluation of a tactic pair, as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairEvaluation {
    pub n: usize,
    pub tactic_a: Tactic,
    pub tactic_b: Tactic,
    #[serde(with = "fraction_string")]
    pub w: Q,
    pub w_decimal: String,
    #[serde(with = "fraction_strings")]
    pub survival: Vec<Q>,
    pub survival_decimal: Vec<String>,
    #[serde(with = "fraction_string")]
    pub p_no_meet: Q,
    pub p_no_meet_decimal: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactEngine {
    pub config: ExactConfig,
}

impl ExactEngine {
    pub fn new(config: ExactConfig) -> Result<Self> {
        if config.enumeration_max_n > 20 {
            return Err(Error::InvalidArgument(
                "enumeration cap above 20 overflows 64-bit binding counts".into(),
            ));
        }
        if config.max_cells > 64 {
            return Err(Error::InvalidArgument("cell cap above 64 is unsupported".into()));
        }
        Ok(ExactEngine { config })
    }

    fn check_cells(&self, m: usize) -> Result<()> {
        if m > self.config.max_cells {
            return Err(Error::CapExceeded {
                what: "constraint cells",
                value: m,
                cap: self.config.max_cells,
            });
        }
        Ok(())
    }

    fn check_enumeration(&self, n: usize) -> Result<()> {
        if n > self.config.enumeration_max_n {
            return Err(Error::CapExceeded {
                what: "n for enumeration",
                value: n,
                cap: self.config.enumeration_max_n,
            });
        }
        Ok(())
    }

    /// Number of permutations `π` of `n` with `π(a) != b` for every cell `(a, b)`.
    pub fn count_avoiding_permutations(&self, cells: &PairSet) -> Result<BigInt> {
        self.check_cells(cells.len())?;
        let profile = rook::matching_profile(cells.cells());
        Ok(rook::avoiding_count(&profile.rook_numbers(cells.len()), cells.n()).into())
    }

    /// Tallies `Z` and `X` over every binding (enumeration engine).
    pub fn binding_distribution(&self, a: &Tactic, b: &Tactic) -> Result<BindingDistribution> {
        same_n(a.n(), b.n())?;
        self.check_enumeration(a.n())?;
        Ok(enumerate::enumerate(a, b))
    }

    pub fn survival_curve(&self, a: &Tactic, b: &Tactic) -> Result<SurvivalCurve> {
        self.survival_curve_with(Engine::InclusionExclusion, a, b)
    }

    pub fn survival_curve_with(&self, engine: Engine, a: &Tactic, b: &Tactic) -> Result<SurvivalCurve> {
        same_n(a.n(), b.n())?;
        match engine {
            Engine::Enumeration => Ok(self.binding_distribution(a, b)?.survival_curve()),
            Engine::InclusionExclusion => {
                let n = a.n();
                let cells = cells_with_first_round(a, b);
                self.check_cells(cells.len())?;
                let plain: Vec<Cell> = cells.iter().map(|&(c, _)| c).collect();
                let profile = rook::matching_profile(&plain);
                let total = BigInt::from(factorial(n));
                let values = (0..=n)
                    .map(|k| {
                        // Cells first seen before round k (0-based) form the prefix.
                        let prefix = cells.partition_point(|&(_, round)| round < k);
                        let avoid = rook::avoiding_count(&profile.rook_numbers(prefix), n);
                        Q::new(avoid.into(), total.clone())
                    })
                    .collect();
                Ok(SurvivalCurve { n, values })
            }
        }
    }

    /// `w(τ_A, τ_B)`, the expected truncated waiting time over the binding.
    pub fn expected_waiting_time(&self, a: &Tactic, b: &Tactic) -> Result<Q> {
        Ok(self.survival_curve(a, b)?.expectation())
    }

    pub fn expected_waiting_time_with(&self, engine: Engine, a: &Tactic, b: &Tactic) -> Result<Q> {
        match engine {
            Engine::Enumeration => Ok(self.binding_distribution(a, b)?.expected_waiting_time()),
            Engine::InclusionExclusion => self.expected_waiting_time(a, b),
        }
    }

    /// `P(X = 0)`: no rendezvous within `n` rounds.
    pub fn prob_no_rendezvous(&self, a: &Tactic, b: &Tactic) -> Result<Q> {
        self.prob_no_rendezvous_with(Engine::InclusionExclusion, a, b)
    }

    pub fn prob_no_rendezvous_with(&self, engine: Engine, a: &Tactic, b: &Tactic) -> Result<Q> {
        match engine {
            Engine::Enumeration => Ok(self.binding_distribution(a, b)?.prob_no_rendezvous()),
            Engine::InclusionExclusion => {
                let cells = pair_set(a, b)?;
                let count = self.count_avoiding_permutations(&cells)?;
                Ok(Q::new(count, BigInt::from(factorial(a.n()))))
            }
        }
    }

    /// Moments of `X` through factorial moments:
    /// `E[X(X-1)…(X-j+1)] = r_j · j! · (n-j)! / n!`.
    ///
    /// Only matchings of up to four cells are counted, so there is no cell cap.
    pub fn moments(&self, a: &Tactic, b: &Tactic) -> Result<MomentReport> {
        let cells = pair_set(a, b)?;
        Ok(moments_from_cells(&cells))
    }

    pub fn moments_with(&self, engine: Engine, a: &Tactic, b: &Tactic) -> Result<MomentReport> {
        match engine {
            Engine::Enumeration => Ok(self.binding_distribution(a, b)?.moments()),
            Engine::InclusionExclusion => self.moments(a, b),
        }
    }

    /// Distribution of `X`: `P(X = k) = Σ_{j≥k} (-1)^{j-k} C(j,k) r_j (n-j)! / n!`.
    pub fn x_distribution(&self, a: &Tactic, b: &Tactic) -> Result<Vec<Q>> {
        let cells = pair_set(a, b)?;
        self.check_cells(cells.len())?;
        let n = a.n();
        let m = cells.len();
        let r = rook::matching_profile(cells.cells()).rook_numbers(m);
        let total = BigInt::from(factorial(n));
        Ok((0..=m)
            .map(|k| {
                let mut count = BigInt::zero();
                for (j, &rj) in r.iter().enumerate().take(m.min(n) + 1).skip(k) {
                    let term = BigInt::from(rj)
                        * BigInt::from(num_integer::binomial(j as u64, k as u64))
                        * BigInt::from(factorial(n - j));
                    if (j - k) % 2 == 0 {
                        count += term;
                    } else {
                        count -= term;
                    }
                }
                Q::new(count, total.clone())
            })
            .collect())
    }

    /// Survival curve, `w` and `P(X = 0)` in one record.
    pub fn evaluate(&self, a: &Tactic, b: &Tactic) -> Result<PairEvaluation> {
        let survival = self.survival_curve(a, b)?;
        let w = survival.expectation();
        let p_no_meet = survival.values[a.n()].clone();
        Ok(PairEvaluation {
            n: a.n(),
            tactic_a: a.clone(),
            tactic_b: b.clone(),
            w_decimal: to_decimal(&w),
            w,
            survival_decimal: survival.values.iter().map(to_decimal).collect(),
            survival: survival.values,
            p_no_meet_decimal: to_decimal(&p_no_meet),
            p_no_meet,
        })
    }

    /// `Φ⟨σ_A, σ_B⟩ = Σ w(τ_A, τ_B) σ_A(τ_A) σ_B(τ_B)`, the exact expected waiting time.
    pub fn bilinear_phi(&self, a: &Strategy, b: &Strategy) -> Result<Q> {
        same_n(a.n(), b.n())?;
        let mut cache = WaitingTimeCache::new(*self);
        cache.phi(a.require_support()?, b.require_support()?)
    }
}

/// Moments of `X` from the rook numbers `r_1..r_4` of a cell set.
pub fn moments_from_cells(cells: &PairSet) -> MomentReport {
    let n = cells.n();
    let r = rook::small_rook_numbers(cells.cells(), 4);
    let nfact = BigInt::from(factorial(n));
    // Falling factorial moments F_j = r_j · j! · (n-j)! / n! = r_j j! / (n)_j.
    let falling: Vec<Q> = (0..=4)
        .map(|j| {
            if j > n {
                return Q::zero();
            }
            let num = BigInt::from(r[j]) * BigInt::from(factorial(j)) * BigInt::from(factorial(n - j));
            Q::new(num, nfact.clone())
        })
        .collect();
    // Stirling numbers of the second kind: x^k = Σ_j S(k, j) x^(j falling).
    const STIRLING: [[i64; 5]; 5] = [
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [0, 1, 1, 0, 0],
        [0, 1, 3, 1, 0],
        [0, 1, 7, 6, 1],
    ];
    let raw: [Q; 5] = std::array::from_fn(|k| {
        (0..=4).fold(Q::zero(), |acc, j| {
            acc + Q::from_integer(STIRLING[k][j].into()) * &falling[j]
        })
    });
    MomentReport::from_raw(n, cells.len(), raw)
}

/// `E[X_e X_f]` for distinct cells: `1/(n(n-1))` when they share no row or column, else 0.
pub fn pairwise_product_expectation(e: Cell, f: Cell, n: usize) -> Result<Q> {
    if e == f {
        return Err(Error::InvalidArgument("cells must be distinct".into()));
    }
    joint_hit_probability(&[e, f], n)
}

/// Probability that the binding hits every given cell: `(n-k)!/n!` for a
/// pairwise-disjoint family of `k` cells, 0 otherwise.
pub fn joint_hit_probability(cells: &[Cell], n: usize) -> Result<Q> {
    for (i, &e) in cells.iter().enumerate() {
        for &f in &cells[i + 1..] {
            if e == f {
                return Err(Error::InvalidArgument("cells must be distinct".into()));
            }
            if !cells_disjoint(e, f) {
                return Ok(Q::zero());
            }
        }
    }
    if cells.len() > n {
        return Ok(Q::zero());
    }
    Ok(Q::new(
        BigInt::one(),
        BigInt::from(falling_factorial(n, cells.len())),
    ))
}

/// Unordered pairs of cells sharing neither a row nor a column.
pub fn disjoint_pair_count(cells: &PairSet) -> u64 {
    let c = cells.cells();
    let mut count = 0;
    for (i, &e) in c.iter().enumerate() {
        count += c[i + 1..].iter().filter(|&&f| cells_disjoint(e, f)).count() as u64;
    }
    count
}

/// Memoises `w` on canonical tactic pairs; `w` is invariant under relabelling
/// either player's locations and symmetric in its arguments.
pub struct WaitingTimeCache {
    engine: ExactEngine,
    values: HashMap<(Tactic, Tactic), Q>,
}

impl WaitingTimeCache {
    pub fn new(engine: ExactEngine) -> Self {
        WaitingTimeCache {
            engine,
            values: HashMap::new(),
        }
    }

    pub fn w(&mut self, a: &Tactic, b: &Tactic) -> Result<Q> {
        let (ca, cb) = (a.canonical(), b.canonical());
        let key = if ca <= cb { (ca, cb) } else { (cb, ca) };
        if let Some(v) = self.values.get(&key) {
            return Ok(v.clone());
        }
        let v = self.engine.expected_waiting_time(&key.0, &key.1)?;
        self.values.insert(key, v.clone());
        Ok(v)
    }

    /// Bilinear form over two weight tables (weights need not sum to 1).
    pub fn phi(&mut self, x: &[(Tactic, Q)], y: &[(Tactic, Q)]) -> Result<Q> {
        let x = aggregate_canonical(x);
        let y = aggregate_canonical(y);
        let mut total = Q::zero();
        for (ta, wa) in &x {
            for (tb, wb) in &y {
                total += self.w(ta, tb)? * wa * wb;
            }
        }
        Ok(total)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn aggregate_canonical(table: &[(Tactic, Q)]) -> Vec<(Tactic, Q)> {
    let mut merged: std::collections::BTreeMap<Tactic, Q> = Default::default();
    for (t, w) in table {
        *merged.entry(t.canonical()).or_insert_with(Q::zero) += w;
    }
    merged.into_iter().collect()
}
