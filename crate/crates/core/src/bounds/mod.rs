//! Executable checks of the inequality chain behind the symmetric lower bound.
//!
//! Every verifier returns a [`BoundReport`]. A report bundles one or more
//! inequalities `lhs >= rhs`; the headline `lhs`/`rhs` is the tightest of them,
//! so `pass` is exactly "hypotheses fail, or `lhs >= rhs`".

mod assembly;
mod lemmas;
mod scan;
mod split;

use serde::Serialize;

pub use assembly::{random_rational_strategy, verify_theorem1_assembly};
pub use lemmas::{
    markov_corner_case, paley_zygmund_bound, verify_dp_var, verify_moment_claims, verify_pb_waiting,
    verify_same_kind_variance, verify_var_pb,
};
pub use scan::{
    random_pair, random_same_kind_pair, run_pair_scan, sample_rng, tactic_pairs, verify_same_kind_gap, GapScan, PairLemma,
    ScanMode, ScanSummary, EXHAUSTIVE_MAX_N,
};
pub use split::{random_split_instance, split_disjoint_edges, BipartiteSplit};

use crate::rational::{fraction_string, pow2_neg, to_decimal, Q};

/// `δ = 2^-35`, the same-kind gap constant.
pub fn delta() -> Q {
    pow2_neg(35)
}

/// `ε = 2^-36`, the symmetric-game constant.
pub fn epsilon() -> Q {
    pow2_neg(36)
}

/// `2^-17`, the same-kind no-rendezvous floor.
pub fn no_meet_floor() -> Q {
    pow2_neg(17)
}

/// One inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: String,
    #[serde(with = "fraction_string")]
    pub lhs: Q,
    #[serde(with = "fraction_string")]
    pub rhs: Q,
    pub pass: bool,
    /// One half of an equality; never chosen as the headline when an
    /// inequality is present.
    pub identity: bool,
}

impl Check {
    pub fn at_least(label: impl Into<String>, lhs: Q, rhs: Q) -> Self {
        let pass = lhs >= rhs;
        Check {
            label: label.into(),
            lhs,
            rhs,
            pass,
            identity: false,
        }
    }

    /// Equality as the pair `lhs >= rhs`, `rhs >= lhs`.
    pub fn equal(label: &str, lhs: Q, rhs: Q) -> [Self; 2] {
        let mut pair = [
            Check::at_least(format!("{label} (>=)"), lhs.clone(), rhs.clone()),
            Check::at_least(format!("{label} (<=)"), rhs, lhs),
        ];
        for c in &mut pair {
            c.identity = true;
        }
        pair
    }

    pub fn margin(&self) -> Q {
        &self.lhs - &self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub hypotheses_hold: bool,
    #[serde(with = "fraction_string")]
    pub lhs: Q,
    #[serde(with = "fraction_string")]
    pub rhs: Q,
    #[serde(with = "fraction_string")]
    pub margin: Q,
    pub margin_decimal: String,
    pub pass: bool,
    pub context: String,
    pub checks: Vec<Check>,
}

impl BoundReport {
    pub fn from_checks(
        name: impl Into<String>,
        hypotheses_hold: bool,
        context: impl Into<String>,
        checks: Vec<Check>,
    ) -> Self {
        // A failing check always wins; otherwise prefer inequalities.
        let rank = |c: &Check| (c.pass, c.identity && c.pass);
        let headline = checks
            .iter()
            .min_by(|a, b| rank(a).cmp(&rank(b)).then(a.margin().cmp(&b.margin())));
        let (lhs, rhs) = headline
            .map(|c| (c.lhs.clone(), c.rhs.clone()))
            .unwrap_or_default();
        let margin = &lhs - &rhs;
        let all_hold = checks.iter().all(|c| c.pass);
        BoundReport {
            name: name.into(),
            hypotheses_hold,
            margin_decimal: to_decimal(&margin),
            pass: !hypotheses_hold || all_hold,
            lhs,
            rhs,
            margin,
            context: context.into(),
            checks,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
