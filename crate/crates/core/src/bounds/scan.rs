//! Exhaustive and sampled scans of the per-pair verifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactEngine;
use crate::model::{classify, Tactic};
use crate::par::map_indexed;
use crate::rational::{fraction_string, qi, to_decimal, Q};

use super::lemmas::{
    markov_corner_case, verify_dp_var, verify_moment_claims, verify_pb_waiting, verify_same_kind_variance,
    verify_var_pb,
};
use super::{delta, no_meet_floor, BoundReport, Check};

/// Largest `n` for which every tactic pair is scanned (`n^(2n)` pairs).
pub const EXHAUSTIVE_MAX_N: usize = 4;

const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    Exhaustive,
    Sampled,
}

/// The generator for sample `index` of a scan seeded with `seed`: one
/// ChaCha8 stream per sample, so samples do not depend on scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn tactic_with_image_in<R: Rng + ?Sized>(n: usize, lo: usize, hi: usize, rng: &mut R) -> Tactic {
    let image = rng.random_range(lo..=hi);
    Tactic::random_with_image(n, image, rng)
}

/// Two independent tactics, each with image size uniform on `1..=n`.
///
/// Uniform tactics almost never have small images, so the image size is drawn
/// first to cover both kinds.
pub fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Tactic, Tactic) {
    let a = tactic_with_image_in(n, 1, n, rng);
    let b = tactic_with_image_in(n, 1, n, rng);
    (a, b)
}

/// Two tactics of the same kind; the kind is a fair coin.
pub fn random_same_kind_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Tactic, Tactic) {
    let (lo, hi) = if rng.random_bool(0.5) { (1, n / 2) } else { (n / 2 + 1, n) };
    let a = tactic_with_image_in(n, lo, hi, rng);
    let b = tactic_with_image_in(n, lo, hi, rng);
    (a, b)
}

/// The pairs a scan visits, in a fixed order.
pub fn tactic_pairs(n: usize, mode: ScanMode, samples: usize, seed: u64, same_kind: bool) -> Result<Vec<(Tactic, Tactic)>> {
    crate::model::check_n(n)?;
    match mode {
        ScanMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::CapExceeded {
                    what: "n for an exhaustive scan",
                    value: n,
                    cap: EXHAUSTIVE_MAX_N,
                });
            }
            let all = Tactic::all(n)?;
            let mut pairs = Vec::new();
            for a in &all {
                for b in &all {
                    if !same_kind || classify(a) == classify(b) {
                        pairs.push((a.clone(), b.clone()));
                    }
                }
            }
            Ok(pairs)
        }
        ScanMode::Sampled => Ok((0..samples)
            .map(|i| {
                let mut rng = sample_rng(seed, i as u64);
                if same_kind {
                    random_same_kind_pair(n, &mut rng)
                } else {
                    random_pair(n, &mut rng)
                }
            })
            .collect()),
    }
}

/// A per-pair verifier usable in scans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairLemma {
    PbWaiting,
    MomentClaims,
    VarPb(Q),
    DpVar,
    MarkovCorner,
    SameKindVariance,
}

impl PairLemma {
    pub fn name(&self) -> &'static str {
        match self {
            PairLemma::PbWaiting => "pb-waiting",
            PairLemma::MomentClaims => "moment-claims",
            PairLemma::VarPb(_) => "var-pb",
            PairLemma::DpVar => "dp-var",
            PairLemma::MarkovCorner => "markov-corner",
            PairLemma::SameKindVariance => "same-kind-variance",
        }
    }

    pub fn apply(&self, engine: &ExactEngine, a: &Tactic, b: &Tactic) -> Result<BoundReport> {
        match self {
            PairLemma::PbWaiting => verify_pb_waiting(engine, a, b),
            PairLemma::MomentClaims => verify_moment_claims(engine, a, b),
            PairLemma::VarPb(alpha) => verify_var_pb(engine, a, b, alpha),
            PairLemma::DpVar => verify_dp_var(engine, a, b),
            PairLemma::MarkovCorner => markov_corner_case(engine, a, b),
            PairLemma::SameKindVariance => verify_same_kind_variance(engine, a, b),
        }
    }
}

/// Aggregate of one verifier over many pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub lemma: String,
    pub pairs: usize,
    /// Pairs on which the hypotheses held (the rest pass vacuously).
    pub applicable: usize,
    pub failures: usize,
    /// Smallest-margin report among applicable pairs.
    pub tightest: Option<BoundReport>,
    pub first_failure: Option<BoundReport>,
    pub pass: bool,
}

#[derive(Default)]
struct Partial {
    applicable: usize,
    failures: usize,
    tightest: Option<BoundReport>,
    first_failure: Option<BoundReport>,
}

impl Partial {
    fn add(&mut self, report: BoundReport) {
        if !report.hypotheses_hold {
            return;
        }
        self.applicable += 1;
        if !report.pass {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(report.clone());
            }
        }
        if self.tightest.as_ref().is_none_or(|t| report.margin < t.margin) {
            self.tightest = Some(report);
        }
    }

    fn merge(&mut self, other: Partial) {
        self.applicable += other.applicable;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        if let Some(t) = other.tightest {
            if self.tightest.as_ref().is_none_or(|s| t.margin < s.margin) {
                self.tightest = Some(t);
            }
        }
    }
}

/// Runs `lemma` on every pair. Chunks are reduced in order, so the summary is
/// independent of the worker count.
pub fn run_pair_scan(engine: &ExactEngine, lemma: &PairLemma, pairs: &[(Tactic, Tactic)]) -> Result<ScanSummary> {
    let chunks = pairs.len().div_ceil(CHUNK);
    let partials = map_indexed(chunks, |c| -> Result<Partial> {
        let mut part = Partial::default();
        for (a, b) in &pairs[c * CHUNK..pairs.len().min((c + 1) * CHUNK)] {
            part.add(lemma.apply(engine, a, b)?);
        }
        Ok(part)
    });
    let mut total = Partial::default();
    for p in partials {
        total.merge(p?);
    }
    Ok(ScanSummary {
        lemma: lemma.name().to_string(),
        pairs: pairs.len(),
        applicable: total.applicable,
        pass: total.failures == 0,
        failures: total.failures,
        tightest: total.tightest,
        first_failure: total.first_failure,
    })
}

/// Result of the same-kind gap scan: the report plus the pairs attaining the
/// observed minima.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapScan {
    pub n: usize,
    pub mode: ScanMode,
    pub pairs: usize,
    #[serde(with = "fraction_string")]
    pub min_gap: Q,
    pub min_gap_decimal: String,
    pub min_gap_pair: Option<(Tactic, Tactic)>,
    #[serde(with = "fraction_string")]
    pub min_p_no_meet: Q,
    pub min_p_no_meet_decimal: String,
    pub min_p_no_meet_pair: Option<(Tactic, Tactic)>,
    pub report: BoundReport,
}

type Witness = Option<(Q, (Tactic, Tactic))>;

fn keep_min(slot: &mut Witness, value: Q, pair: &(Tactic, Tactic)) {
    if slot.as_ref().is_none_or(|(v, _)| value < *v) {
        *slot = Some((value, pair.clone()));
    }
}

/// Over same-kind pairs: `min (w - (n+1)/2) ≥ 2^-35 n` and `min P(X=0) ≥ 2^-17`.
pub fn verify_same_kind_gap(
    engine: &ExactEngine,
    n: usize,
    mode: ScanMode,
    samples: usize,
    seed: u64,
) -> Result<GapScan> {
    let pairs = tactic_pairs(n, mode, samples, seed, true)?;
    let half = (qi(n as i64) + qi(1)) / qi(2);
    let chunks = pairs.len().div_ceil(CHUNK);
    let partials = map_indexed(chunks, |c| -> Result<(Witness, Witness)> {
        let (mut gap, mut p0): (Witness, Witness) = (None, None);
        for pair in &pairs[c * CHUNK..pairs.len().min((c + 1) * CHUNK)] {
            let curve = engine.survival_curve(&pair.0, &pair.1)?;
            keep_min(&mut gap, curve.expectation() - &half, pair);
            keep_min(&mut p0, curve.values[n].clone(), pair);
        }
        Ok((gap, p0))
    });
    let (mut gap, mut p0): (Witness, Witness) = (None, None);
    for part in partials {
        let (g, p) = part?;
        if let Some((v, pair)) = g {
            keep_min(&mut gap, v, &pair);
        }
        if let Some((v, pair)) = p {
            keep_min(&mut p0, v, &pair);
        }
    }
    let (min_gap, gap_pair) = gap.ok_or_else(|| Error::InvalidArgument("scan visited no pairs".into()))?;
    let (min_p0, p0_pair) = p0.expect("non-empty scan");
    let checks = vec![
        Check::at_least("min gap >= 2^-35 n", min_gap.clone(), delta() * qi(n as i64)),
        Check::at_least("min P(X=0) >= 2^-17", min_p0.clone(), no_meet_floor()),
    ];
    let report = BoundReport::from_checks(
        "same-kind-gap",
        true,
        format!(
            "n={n} mode={mode:?} pairs={} min gap={} min P(X=0)={}",
            pairs.len(),
            to_decimal(&min_gap),
            to_decimal(&min_p0)
        ),
        checks,
    );
    Ok(GapScan {
        n,
        mode,
        pairs: pairs.len(),
        min_gap_decimal: to_decimal(&min_gap),
        min_gap,
        min_gap_pair: Some(gap_pair),
        min_p_no_meet_decimal: to_decimal(&min_p0),
        min_p_no_meet: min_p0,
        min_p_no_meet_pair: Some(p0_pair),
        report,
    })
}
