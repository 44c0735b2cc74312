//! Per-pair verifiers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactEngine;
use crate::model::{cells_disjoint, classify, pair_set, PairSet, Tactic};
use crate::rational::{factorial, falling_factorial, q, qi, to_decimal, Q};

use super::{BoundReport, Check};

fn context(a: &Tactic, b: &Tactic, cells: &PairSet) -> String {
    format!("n={} m={} a=[{}] b=[{}]", a.n(), cells.len(), a, b)
}

fn nq(n: usize) -> Q {
    qi(n as i64)
}

/// `w ≥ (n+1)/2 + β²n/2` with `β = P(no rendezvous)`, plus the pointwise
/// survival bounds `P(Z > k) ≥ max(1 - k/n, β)` and the tail-sum identity.
pub fn verify_pb_waiting(engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
    let cells = pair_set(a, b)?;
    let n = a.n();
    let survival = engine.survival_curve(a, b)?;
    let beta = survival.values[n].clone();
    let w = engine.expected_waiting_time(a, b)?;
    let rhs = (nq(n) + qi(1)) / qi(2) + &beta * &beta * nq(n) / qi(2);
    let mut checks = vec![Check::at_least("w >= (n+1)/2 + beta^2 n/2", w.clone(), rhs)];
    checks.extend(Check::equal("w = sum_k P(Z>k)", w, survival.expectation()));
    for (k, s) in survival.values.iter().enumerate() {
        let floor = (qi(1) - q(k as i64, n as i64)).max(beta.clone());
        checks.push(Check::at_least(format!("P(Z>{k}) >= max(1-k/n, beta)"), s.clone(), floor));
    }
    Ok(BoundReport::from_checks(
        "pb-waiting",
        true,
        format!("{} beta={}", context(a, b, &cells), to_decimal(&beta)),
        checks,
    ))
}

/// `E X = m/n`, `E X^4 ≤ 15`, `E|X - EX|^4 ≤ 16` and the joint-hit caps for
/// every family of two, three and four distinct cells.
pub fn verify_moment_claims(engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
    let cells = pair_set(a, b)?;
    let n = a.n();
    let m = cells.len();
    let mom = engine.moments(a, b)?;
    let mut checks = Check::equal("E X = m/n", mom.mean.clone(), q(m as i64, n as i64)).to_vec();
    checks.push(Check::at_least("E X^4 <= 15", qi(15), mom.fourth_moment.clone()));
    checks.push(Check::at_least("E|X-EX|^4 <= 16", qi(16), mom.fourth_central.clone()));
    for size in 2..=4usize.min(n) {
        let cap = Q::new(BigInt::one(), BigInt::from(falling_factorial(n, size)));
        if let Some(worst) = max_joint_hit(&cells, size) {
            checks.push(Check::at_least(format!("max joint hit of {size} cells <= 1/(n)_{size}"), cap, worst));
        }
    }
    Ok(BoundReport::from_checks(
        "moment-claims",
        true,
        format!("{} E X^4={}", context(a, b, &cells), to_decimal(&mom.fourth_moment)),
        checks,
    ))
}

/// Largest probability that the binding hits all of `size` distinct cells,
/// over every such family. Counted directly: a family of pairwise disjoint
/// cells is hit by exactly `(n - size)!` bindings, any other family by none.
fn max_joint_hit(cells: &PairSet, size: usize) -> Option<Q> {
    let c = cells.cells();
    if c.len() < size {
        return None;
    }
    let n = cells.n();
    let mut best = Q::zero();
    let mut chosen = Vec::with_capacity(size);
    fn walk(c: &[(usize, usize)], start: usize, size: usize, chosen: &mut Vec<(usize, usize)>, found: &mut bool) {
        if *found {
            return;
        }
        if chosen.len() == size {
            *found = true;
            return;
        }
        for idx in start..c.len() {
            if chosen.iter().all(|&e| cells_disjoint(e, c[idx])) {
                chosen.push(c[idx]);
                walk(c, idx + 1, size, chosen, found);
                chosen.pop();
            }
        }
    }
    let mut found = false;
    walk(c, 0, size, &mut chosen, &mut found);
    if found {
        best = Q::new(BigInt::from(factorial(n - size)), BigInt::from(factorial(n)));
    }
    Some(best)
}

/// `(1 - λ)² (E Z)² / E Z²`, the Paley–Zygmund lower bound on `P(Z ≥ λ E Z)`.
pub fn paley_zygmund_bound(ez: &Q, ez2: &Q, lambda: &Q) -> Result<Q> {
    if ez2.is_zero() {
        return Err(Error::InvalidArgument("second moment must be positive".into()));
    }
    if ez2 < &Q::zero() || ez < &Q::zero() {
        return Err(Error::InvalidArgument("moments of a non-negative variable are non-negative".into()));
    }
    if lambda < &Q::zero() || lambda > &Q::one() {
        return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0, 1]")));
    }
    let slack = Q::one() - lambda;
    Ok(&slack * &slack * ez * ez / ez2)
}

/// If `m ≥ (1 - √(α/2)) n` and `Var X ≥ α`, then `P(X = 0) ≥ α²/128`.
///
/// Also checks the intermediate steps: `P((X-EX)² ≥ α/2) ≥ α²/64` and
/// `P(X = 0) ≥ P(X ≥ 2)`.
pub fn verify_var_pb(engine: &ExactEngine, a: &Tactic, b: &Tactic, alpha: &Q) -> Result<BoundReport> {
    if alpha <= &Q::zero() {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let cells = pair_set(a, b)?;
    let n = a.n();
    let m = cells.len();
    let mom = engine.moments(a, b)?;
    let short = qi(1) - q(m as i64, n as i64);
    let hypotheses = m <= n && &short * &short <= alpha / qi(2) && &mom.variance >= alpha;
    let dist = engine.x_distribution(a, b)?;
    let p0 = dist[0].clone();
    let p_many = dist.iter().skip(2).fold(Q::zero(), |acc, p| acc + p);
    let half_alpha = alpha / qi(2);
    let p_spread = dist
        .iter()
        .enumerate()
        .filter(|(x, _)| {
            let d = nq(*x) - &mom.mean;
            &d * &d >= half_alpha
        })
        .fold(Q::zero(), |acc, (_, p)| acc + p);
    let checks = vec![
        Check::at_least("P(X=0) >= alpha^2/128", p0.clone(), alpha * alpha / qi(128)),
        Check::at_least("P((X-EX)^2 >= alpha/2) >= alpha^2/64", p_spread, alpha * alpha / qi(64)),
        Check::at_least("P(X=0) >= P(X>=2)", p0, p_many),
    ];
    Ok(BoundReport::from_checks(
        "var-pb",
        hypotheses,
        format!(
            "{} alpha={} Var X={}",
            context(a, b, &cells),
            alpha,
            to_decimal(&mom.variance)
        ),
        checks,
    ))
}

/// With `D` disjoint cell pairs and `α = D / C(n,2)`, `Var X ≥ α`.
///
/// Covariances are recomputed from avoidance counts and compared with
/// `[e, f disjoint]/(n(n-1)) - 1/n²`; their sum must reproduce the variance.
pub fn verify_dp_var(engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
    let cells = pair_set(a, b)?;
    let n = a.n();
    let m = cells.len();
    let mom = engine.moments(a, b)?;
    let nf = BigInt::from(factorial(n));
    let p_hit = q(1, n as i64);
    let c = cells.cells();
    let mut disjoint = 0u64;
    let mut cov_sum = Q::zero();
    let mut mismatches = 0usize;
    let expected_disjoint = Q::new(BigInt::one(), BigInt::from(n * (n - 1))) - &p_hit * &p_hit;
    let expected_joint = -(&p_hit * &p_hit);
    for (i, &e) in c.iter().enumerate() {
        for &f in &c[i + 1..] {
            let pair = PairSet::from_zero_based(n, vec![e, f]);
            let neither = Q::new(engine.count_avoiding_permutations(&pair)?, nf.clone());
            // P(both hit) = 1 - P(e missed) - P(f missed) + P(both missed).
            let both = qi(1) - qi(2) * (qi(1) - &p_hit) + neither;
            let cov = both - &p_hit * &p_hit;
            let is_disjoint = cells_disjoint(e, f);
            if is_disjoint {
                disjoint += 1;
            }
            let expected = if is_disjoint { &expected_disjoint } else { &expected_joint };
            if &cov != expected {
                mismatches += 1;
            }
            cov_sum += cov;
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let alpha = Q::new(BigInt::from(disjoint), BigInt::from(pairs));
    let nn = nq(n);
    let identity = nq(m) * (&nn - qi(1)) / (&nn * &nn) - qi((m * m.saturating_sub(1)) as i64) / (&nn * &nn)
        + qi(2 * disjoint as i64) / (&nn * (&nn - qi(1)));
    let summed = nq(m) * &p_hit * (qi(1) - &p_hit) + qi(2) * cov_sum;
    let mut checks = vec![Check::at_least("Var X >= D/C(n,2)", mom.variance.clone(), alpha.clone())];
    checks.extend(Check::equal("Var X = variance identity", mom.variance.clone(), identity));
    checks.extend(Check::equal("Var X = sum of covariances", mom.variance.clone(), summed));
    checks.extend(Check::equal("covariance mismatches", qi(mismatches as i64), qi(0)));
    Ok(BoundReport::from_checks(
        "dp-var",
        true,
        format!("{} D={} alpha={}", context(a, b, &cells), disjoint, alpha),
        checks,
    ))
}

/// If `m ≤ 11n/12`, then `P(X = 0) ≥ 1/12` by Markov.
pub fn markov_corner_case(engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
    let cells = pair_set(a, b)?;
    let n = a.n();
    let m = cells.len();
    let hypotheses = 12 * m <= 11 * n;
    let p0 = engine.prob_no_rendezvous(a, b)?;
    Ok(BoundReport::from_checks(
        "markov-corner",
        hypotheses,
        context(a, b, &cells),
        vec![Check::at_least("P(X=0) >= 1/12", p0, q(1, 12))],
    ))
}

/// Two tactics of the same kind with `m ≥ 11n/12` give `Var X ≥ 1/32`.
pub fn verify_same_kind_variance(engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
    let cells = pair_set(a, b)?;
    let n = a.n();
    let m = cells.len();
    let hypotheses = classify(a) == classify(b) && 12 * m >= 11 * n;
    let mom = engine.moments(a, b)?;
    Ok(BoundReport::from_checks(
        "same-kind-variance",
        hypotheses,
        format!("{} kind={:?}/{:?}", context(a, b, &cells), classify(a), classify(b)),
        vec![Check::at_least("Var X >= 1/32", mom.variance, q(1, 32))],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize, it: &[usize]) -> Tactic {
        Tactic::new(n, it).unwrap()
    }

    fn engine() -> ExactEngine {
        ExactEngine::default()
    }

    #[test]
    fn pb_waiting_examples() {
        let e = engine();
        let id = Tactic::identity(4).unwrap();
        let r = verify_pb_waiting(&e, &id, &id).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].rhs, q(5, 2) + q(9, 32));

        let baby = Tactic::constant(2, 1).unwrap();
        let mommy = Tactic::identity(2).unwrap();
        let r = verify_pb_waiting(&e, &baby, &mommy).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].lhs, q(3, 2));
        assert_eq!(r.checks[0].rhs, q(3, 2));
        assert_eq!(r.margin, qi(0));

        let c = t(3, &[1, 1, 1]);
        let r = verify_pb_waiting(&e, &c, &c).unwrap();
        assert_eq!(r.checks[0].lhs, qi(3));
        assert_eq!(r.checks[0].rhs, q(8, 3));
        assert!(r.pass);
    }

    #[test]
    fn moment_claims_examples() {
        let e = engine();
        let id = Tactic::identity(4).unwrap();
        let r = verify_moment_claims(&e, &id, &id).unwrap();
        assert!(r.pass);
        assert_eq!(r.margin, qi(0));
        let c = Tactic::constant(5, 2).unwrap();
        let r = verify_moment_claims(&e, &c, &c).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().any(|k| k.rhs == q(1, 5)));
    }

    #[test]
    fn paley_zygmund_examples() {
        let alpha = q(1, 32);
        assert_eq!(
            paley_zygmund_bound(&alpha, &qi(16), &q(1, 2)).unwrap(),
            &alpha * &alpha / qi(64)
        );
        assert_eq!(paley_zygmund_bound(&qi(3), &qi(10), &qi(1)).unwrap(), qi(0));
        assert_eq!(paley_zygmund_bound(&qi(1), &qi(1), &qi(0)).unwrap(), qi(1));
        assert!(paley_zygmund_bound(&qi(0), &qi(0), &q(1, 2)).is_err());
        assert!(paley_zygmund_bound(&qi(1), &qi(1), &q(3, 2)).is_err());
    }

    #[test]
    fn var_pb_examples() {
        let e = engine();
        let id = Tactic::identity(8).unwrap();
        let r = verify_var_pb(&e, &id, &id, &q(1, 32)).unwrap();
        assert!(r.hypotheses_hold);
        assert!(r.pass);
        assert_eq!(r.checks[0].lhs, q(14833, 40320));

        let c = Tactic::constant(4, 1).unwrap();
        let r = verify_var_pb(&e, &c, &c, &q(1, 32)).unwrap();
        assert!(!r.hypotheses_hold);
        assert!(r.pass);
    }

    #[test]
    fn dp_var_examples() {
        let e = engine();
        let id = Tactic::identity(4).unwrap();
        let r = verify_dp_var(&e, &id, &id).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].rhs, qi(1));
        assert_eq!(r.checks[0].lhs, qi(1));

        let c = Tactic::constant(4, 3).unwrap();
        let r = verify_dp_var(&e, &c, &c).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].rhs, qi(0));

        // Cells (1,1),(2,2),(1,2),(2,1).
        let a = t(4, &[1, 2, 1, 2]);
        let b = t(4, &[1, 2, 2, 1]);
        let r = verify_dp_var(&e, &a, &b).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].rhs, q(1, 3));
    }

    #[test]
    fn markov_examples() {
        let e = engine();
        let c = Tactic::constant(12, 1).unwrap();
        let r = markov_corner_case(&e, &c, &c).unwrap();
        assert!(r.hypotheses_hold);
        assert_eq!(r.lhs, q(11, 12));

        let id = Tactic::identity(12).unwrap();
        let r = markov_corner_case(&e, &id, &id).unwrap();
        assert!(!r.hypotheses_hold && r.pass);

        let mut it: Vec<usize> = (1..=11).collect();
        it.push(1);
        let a = t(12, &it);
        let r = markov_corner_case(&e, &a, &a).unwrap();
        assert!(r.hypotheses_hold && r.pass);
    }

    #[test]
    fn same_kind_variance_on_identity() {
        let e = engine();
        let id = Tactic::identity(6).unwrap();
        let r = verify_same_kind_variance(&e, &id, &id).unwrap();
        assert!(r.hypotheses_hold && r.pass);
    }
}
