//! The symmetric bound assembled from its passive/active components.

use rand::Rng;

use crate::error::Result;
use crate::exact::{ExactEngine, WaitingTimeCache};
use crate::model::{classify, Tactic, TacticKind};
use crate::rational::{qi, to_decimal, Q};
use crate::strategy::Strategy;

use super::{delta, epsilon, BoundReport, Check};

/// Splits a table strategy `a` into its passive part `a_P` and active part
/// `a_A` (unnormalised, `p = |a_P|`), then checks
///
/// - `Φ(a,a) = Φ(a_P,a_P) + Φ(a_A,a_A) + 2Φ(a_P,a_A)` exactly,
/// - `Φ(a_P,a_P) ≥ p²((n+1)/2 + δn)` and `Φ(a_A,a_A) ≥ (1-p)²((n+1)/2 + δn)`,
/// - `Φ(a_P,a_A) ≥ p(1-p)(n+1)/2`,
/// - `Φ(a,a) ≥ (n+1)/2 + εn`.
type Table = Vec<(Tactic, Q)>;

pub fn verify_theorem1_assembly(engine: &ExactEngine, strategy: &Strategy) -> Result<BoundReport> {
    let n = strategy.n();
    let support = strategy.require_support()?;
    let (passive, active): (Table, Table) = support
        .iter()
        .cloned()
        .partition(|(t, _)| classify(t) == TacticKind::Passive);
    let p = passive.iter().fold(qi(0), |acc, (_, w)| acc + w);
    let mut cache = WaitingTimeCache::new(*engine);
    let whole = cache.phi(support, support)?;
    let pp = cache.phi(&passive, &passive)?;
    let aa = cache.phi(&active, &active)?;
    let pa = cache.phi(&passive, &active)?;

    let half = (qi(n as i64) + qi(1)) / qi(2);
    let same_kind = &half + delta() * qi(n as i64);
    let q_active = qi(1) - &p;
    let mut checks = Check::equal(
        "Phi(a,a) = Phi_PP + Phi_AA + 2 Phi_PA",
        whole.clone(),
        &pp + &aa + qi(2) * &pa,
    )
    .to_vec();
    checks.push(Check::at_least("Phi_PP >= p^2 ((n+1)/2 + delta n)", pp, &p * &p * &same_kind));
    checks.push(Check::at_least(
        "Phi_AA >= (1-p)^2 ((n+1)/2 + delta n)",
        aa,
        &q_active * &q_active * &same_kind,
    ));
    checks.push(Check::at_least("Phi_PA >= p(1-p)(n+1)/2", pa, &p * &q_active * &half));
    checks.push(Check::at_least(
        "Phi(a,a) >= (n+1)/2 + eps n",
        whole.clone(),
        &half + epsilon() * qi(n as i64),
    ));
    Ok(BoundReport::from_checks(
        "theorem1-assembly",
        true,
        format!(
            "strategy={} n={} support={} p={} Phi={}",
            strategy.name(),
            n,
            support.len(),
            p,
            to_decimal(&whole)
        ),
        checks,
    ))
}

/// A table strategy on `support` distinct random tactics with random integer
/// weights in `1..=100`, normalised exactly.
pub fn random_rational_strategy<R: Rng + ?Sized>(n: usize, support: usize, rng: &mut R) -> Result<Strategy> {
    crate::model::check_n(n)?;
    let raw: Vec<(Tactic, i64)> = (0..support.max(1))
        .map(|_| (Tactic::random(n, rng), rng.random_range(1..=100)))
        .collect();
    let total: i64 = raw.iter().map(|(_, w)| w).sum();
    let table = raw
        .into_iter()
        .map(|(t, w)| (t, Q::new(w.into(), total.into())))
        .collect();
    Strategy::from_table(n, "random", table)
}
