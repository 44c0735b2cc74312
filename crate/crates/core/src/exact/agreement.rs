//! Cross-checking the two exact engines over many pairs.

use serde::Serialize;

use crate::error::Result;
use crate::model::Tactic;
use crate::par::map_indexed;
use crate::rational::{fraction_string, qi, to_decimal, Q};

use super::{Engine, ExactEngine};

const CHUNK: usize = 128;

/// Agreement of enumeration and inclusion–exclusion on `w`, the survival
/// curve and `P(X = 0)`, plus the floor `w ≥ (n+1)/2`, over a list of pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineScan {
    pub pairs: usize,
    pub mismatches: usize,
    pub floor_violations: usize,
    #[serde(with = "fraction_string")]
    pub min_gap: Q,
    pub min_gap_decimal: String,
    pub first_mismatch: Option<(Tactic, Tactic)>,
    pub pass: bool,
}

struct Partial {
    mismatches: usize,
    floor_violations: usize,
    min_gap: Option<Q>,
    first_mismatch: Option<(Tactic, Tactic)>,
}

pub fn engine_scan(engine: &ExactEngine, pairs: &[(Tactic, Tactic)]) -> Result<EngineScan> {
    let chunks = pairs.len().div_ceil(CHUNK);
    let parts = map_indexed(chunks, |c| -> Result<Partial> {
        let mut part = Partial {
            mismatches: 0,
            floor_violations: 0,
            min_gap: None,
            first_mismatch: None,
        };
        for (a, b) in &pairs[c * CHUNK..pairs.len().min((c + 1) * CHUNK)] {
            let n = a.n();
            let dist = engine.binding_distribution(a, b)?;
            let curve = engine.survival_curve_with(Engine::InclusionExclusion, a, b)?;
            let w = curve.expectation();
            let p0 = engine.prob_no_rendezvous_with(Engine::InclusionExclusion, a, b)?;
            let agree = dist.expected_waiting_time() == w
                && dist.survival_curve() == curve
                && dist.prob_no_rendezvous() == p0;
            if !agree {
                part.mismatches += 1;
                if part.first_mismatch.is_none() {
                    part.first_mismatch = Some((a.clone(), b.clone()));
                }
            }
            let gap = w - (qi(n as i64) + qi(1)) / qi(2);
            if gap < qi(0) {
                part.floor_violations += 1;
            }
            if part.min_gap.as_ref().is_none_or(|g| gap < *g) {
                part.min_gap = Some(gap);
            }
        }
        Ok(part)
    });
    let mut mismatches = 0;
    let mut floor_violations = 0;
    let mut min_gap: Option<Q> = None;
    let mut first_mismatch = None;
    for p in parts {
        let p = p?;
        mismatches += p.mismatches;
        floor_violations += p.floor_violations;
        if first_mismatch.is_none() {
            first_mismatch = p.first_mismatch;
        }
        if let Some(g) = p.min_gap {
            if min_gap.as_ref().is_none_or(|m| g < *m) {
                min_gap = Some(g);
            }
        }
    }
    let min_gap = min_gap.unwrap_or_else(|| qi(0));
    Ok(EngineScan {
        pairs: pairs.len(),
        pass: mismatches == 0 && floor_violations == 0,
        mismatches,
        floor_violations,
        min_gap_decimal: to_decimal(&min_gap),
        min_gap,
        first_mismatch,
    })
}
