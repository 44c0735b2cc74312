//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rendezvous::bounds::{
    markov_corner_case, no_meet_floor, delta, random_rational_strategy, random_split_instance, run_pair_scan,
    sample_rng, split_disjoint_edges, tactic_pairs, verify_same_kind_gap, verify_theorem1_assembly, PairLemma,
    ScanMode,
};
use rendezvous::exact::engine_scan;
use rendezvous::montecarlo::{aw_scan, best_row, estimate_expected_waiting};
use rendezvous::optimizer::{optimize_symmetric_strategy, SymmetricProblem};
use rendezvous::rational::{q, qi, to_decimal, to_f64};
use rendezvous::zoo::{anderson_weber, uniform_random_strategy, wait_for_mommy_pair, AwConfig};
use rendezvous::{ExactConfig, ExactEngine, Tactic};

type Outcome = Result<(bool, String), String>;
type Scans = [(usize, Vec<(Tactic, Tactic)>)];

const SEED: u64 = 20_240_611;
const SAMPLES: usize = 10_000;

fn engine() -> ExactEngine {
    ExactEngine::new(ExactConfig::default()).expect("default engine")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn scanned_pairs() -> Result<Box<Scans>, String> {
    let mut out = vec![(4, tactic_pairs(4, ScanMode::Exhaustive, 0, 0, false).map_err(err)?)];
    for n in 5..=8 {
        out.push((n, tactic_pairs(n, ScanMode::Sampled, SAMPLES, SEED + n as u64, false).map_err(err)?));
    }
    Ok(out.into_boxed_slice())
}

fn wait_for_mommy() -> Outcome {
    let start = Instant::now();
    let engine = engine();
    let mut ok = true;
    for n in 2..=8 {
        let (baby, mommy) = wait_for_mommy_pair(n).map_err(err)?;
        let w = engine.bilinear_phi(&baby, &mommy).map_err(err)?;
        ok &= w == q(n as i64 + 1, 2);
    }
    let took = start.elapsed();
    Ok((ok && took < Duration::from_secs(1), format!("n=2..8 exact, {took:.2?}")))
}

fn engine_equivalence(scans: &Scans) -> Outcome {
    let start = Instant::now();
    let engine = engine();
    let mut ok = true;
    let mut total = 0;
    let mut floor_violations = 0;
    let mut min_gap: Option<rendezvous::Q> = None;
    for (_, pairs) in scans {
        let s = engine_scan(&engine, pairs).map_err(err)?;
        ok &= s.mismatches == 0;
        total += s.pairs;
        floor_violations += s.floor_violations;
        if min_gap.as_ref().is_none_or(|g| s.min_gap < *g) {
            min_gap = Some(s.min_gap);
        }
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(600);
    let gap = min_gap.map(|g| to_decimal(&g)).unwrap_or_default();
    Ok((ok, format!("{total} pairs, floor violations {floor_violations}, min gap {gap}, {took:.2?}")))
}

fn asymmetric_floor(scans: &Scans) -> Outcome {
    let engine = engine();
    let mut violations = 0;
    for (_, pairs) in scans {
        violations += engine_scan(&engine, pairs).map_err(err)?.floor_violations;
    }
    Ok((violations == 0, format!("{violations} pairs below (n+1)/2")))
}

fn moment_suite(scans: &Scans) -> Outcome {
    let engine = engine();
    let mut failures = 0;
    for (_, pairs) in scans {
        failures += run_pair_scan(&engine, &PairLemma::MomentClaims, pairs).map_err(err)?.failures;
    }
    let mut attained = true;
    for n in 4..=8 {
        let id = Tactic::identity(n).map_err(err)?;
        attained &= engine.moments(&id, &id).map_err(err)?.fourth_moment == qi(15);
    }
    Ok((
        failures == 0 && attained,
        format!("{failures} moment failures, identity E X^4 = 15 for n=4..8: {attained}"),
    ))
}

fn lemma_chain() -> Outcome {
    let engine = engine();
    let lemmas = [
        PairLemma::PbWaiting,
        PairLemma::VarPb(q(1, 32)),
        PairLemma::DpVar,
        PairLemma::MarkovCorner,
        PairLemma::SameKindVariance,
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, mode) in [(4, ScanMode::Exhaustive), (6, ScanMode::Sampled), (8, ScanMode::Sampled), (12, ScanMode::Sampled)] {
        let seed = SEED + 100 + n as u64;
        let pairs = tactic_pairs(n, mode, SAMPLES, seed, false).map_err(err)?;
        for lemma in &lemmas {
            let s = run_pair_scan(&engine, lemma, &pairs).map_err(err)?;
            if s.failures > 0 {
                ok = false;
                notes.push(format!("{} failed {} times at n={n}", s.lemma, s.failures));
            }
        }
        let gap = verify_same_kind_gap(&engine, n, mode, SAMPLES, seed).map_err(err)?;
        let floors = gap.min_gap >= delta() * qi(n as i64) && gap.min_p_no_meet >= no_meet_floor();
        ok &= gap.report.pass && floors;
        notes.push(format!("n={n} min gap {} min P0 {}", gap.min_gap_decimal, gap.min_p_no_meet_decimal));
    }
    // The corner case on a direct instance with its hypothesis satisfied.
    let half = Tactic::new(12, &[1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6]).map_err(err)?;
    let corner = markov_corner_case(&engine, &half, &half).map_err(err)?;
    ok &= corner.pass;
    Ok((ok, notes.join("; ")))
}

fn constructive_split() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [12, 24, 48, 96] {
        let graphs = 1000;
        let mut failures = 0;
        let mut smallest = usize::MAX;
        for g in 0..graphs {
            let mut rng = sample_rng(SEED + n as u64, g);
            let edges = random_split_instance(n, &mut rng).map_err(err)?;
            match split_disjoint_edges(&edges) {
                Ok(s) => {
                    let valid = s.validate().is_ok()
                        && 8 * s.first.len() >= n
                        && 8 * s.second.len() >= n
                        && 3 * s.degrees[0] > n
                        && 4 * s.degrees[1] >= n;
                    failures += usize::from(!valid);
                    smallest = smallest.min(s.first.len()).min(s.second.len());
                }
                Err(_) => failures += 1,
            }
        }
        ok &= failures == 0;
        notes.push(format!("n={n}: {failures}/{graphs} failures, smallest set {smallest}"));
    }
    Ok((ok, notes.join("; ")))
}

fn assembly() -> Outcome {
    let engine = engine();
    let mut strategies = vec![uniform_random_strategy(3).map_err(err)?];
    for n in [3, 4] {
        for theta in [qi(0), q(1, 4), qi(1)] {
            strategies.push(anderson_weber(&AwConfig::truncated(n, theta)).map_err(err)?);
        }
    }
    for i in 0..100 {
        let mut rng = sample_rng(SEED, i);
        strategies.push(random_rational_strategy(4, 6, &mut rng).map_err(err)?);
    }
    let mut failures = 0;
    let mut min_margin: Option<rendezvous::Q> = None;
    for s in &strategies {
        let r = verify_theorem1_assembly(&engine, s).map_err(err)?;
        let identity_ok = r.checks.iter().filter(|c| c.identity).all(|c| c.pass);
        failures += usize::from(!r.pass || !identity_ok);
        if min_margin.as_ref().is_none_or(|m| r.margin < *m) {
            min_margin = Some(r.margin);
        }
    }
    let margin = min_margin.map(|m| to_decimal(&m)).unwrap_or_default();
    Ok((failures == 0, format!("{} strategies, {failures} failures, min margin {margin}", strategies.len())))
}

fn aw_asymptotics() -> Outcome {
    let start = Instant::now();
    let n = 200;
    let horizon = 20 * n;
    let aw = anderson_weber(&AwConfig::multi_block(n, q(247, 1000), horizon)).map_err(err)?;
    let est = estimate_expected_waiting(&aw, &aw, horizon, 200_000, SEED).map_err(err)?;
    let ratio = est.mean / n as f64;
    let thetas: Vec<_> = (0..=20).map(|k| q(k, 20)).collect();
    let rows = aw_scan(n, &thetas, horizon, 100_000, SEED).map_err(err)?;
    let best = best_row(&rows).ok_or("empty scan")?.theta_value;
    let took = start.elapsed();
    let ok = (0.80..=0.86).contains(&ratio) && (0.15..=0.35).contains(&best) && took < Duration::from_secs(900);
    Ok((ok, format!("mean/n {ratio:.4} (se {:.4}), scan argmin {best}, {took:.2?}", est.std_error / n as f64)))
}

fn uniform_sanity() -> Outcome {
    let u = uniform_random_strategy(10).map_err(err)?;
    let est = estimate_expected_waiting(&u, &u, 500, 200_000, SEED).map_err(err)?;
    let ratio = est.mean / 10.0;
    Ok(((0.95..=1.05).contains(&ratio), format!("mean/n {ratio:.4}")))
}

/// Minimum of the symmetric objective over all four n=2 tactics on a simplex
/// grid with step 1/200.
fn grid_minimum_n2(engine: &ExactEngine) -> Result<f64, String> {
    let tactics = Tactic::all(2).map_err(err)?;
    let mut w = [[0.0; 4]; 4];
    for (i, a) in tactics.iter().enumerate() {
        for (j, b) in tactics.iter().enumerate() {
            w[i][j] = to_f64(&engine.expected_waiting_time(a, b).map_err(err)?);
        }
    }
    let steps = 200;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps - i {
            for k in 0..=steps - i - j {
                let x = [i, j, k, steps - i - j - k].map(|c| c as f64 / steps as f64);
                let mut v = 0.0;
                for (r, row) in w.iter().enumerate() {
                    for (c, wc) in row.iter().enumerate() {
                        v += x[r] * x[c] * wc;
                    }
                }
                best = best.min(v);
            }
        }
    }
    Ok(best)
}

fn optimizer_floor() -> Outcome {
    let engine = engine();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=4 {
        let opt = optimize_symmetric_strategy(&engine, n, 16, SEED).map_err(err)?;
        let problem = SymmetricProblem::new(&engine, n).map_err(err)?;
        let recheck = engine.bilinear_phi(&opt.strategy(&problem).map_err(err)?, &opt.strategy(&problem).map_err(err)?);
        ok &= opt.certified && recheck.map_err(err)? == opt.value_exact;
        notes.push(format!("n={n} {} ({})", opt.value_decimal, if opt.certified { "certified" } else { "uncertified" }));
        if n == 2 {
            let grid = grid_minimum_n2(&engine)?;
            let diff = (to_f64(&opt.value_exact) - grid).abs();
            ok &= diff <= 1e-6;
            notes.push(format!("grid oracle {grid}"));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn rdv(args: &[&str], workers: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rdv"))
        .args(args)
        .args(["--format", "json", "--workers", workers])
        .output()
        .map_err(err)?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}", out.status));
    }
    String::from_utf8(out.stdout).map_err(err)
}

fn reproducibility() -> Outcome {
    let cases: [&[&str]; 6] = [
        &["simulate", "--n", "30", "--strategy-a", "aw:0.25:multiblock", "--strategy-b", "aw:0.25:multiblock",
            "--horizon", "600", "--trials", "20000", "--seed", "7"],
        &["scan", "aw", "--n", "20", "--step", "1/4", "--trials", "10000", "--seed", "8"],
        &["verify", "all", "--n", "7", "--samples", "1000", "--seed", "9"],
        &["verify", "split", "--n", "48", "--graphs", "200", "--seed", "10"],
        &["optimize", "symmetric", "--n", "4", "--restarts", "8", "--seed", "11"],
        &["optimize", "theta", "--n", "12", "--mode", "mc", "--resolution", "5", "--trials", "5000", "--seed", "12"],
    ];
    let mut differing = Vec::new();
    for case in cases {
        let reference = rdv(case, "1")?;
        for workers in ["2", "3"] {
            if rdv(case, workers)? != reference {
                differing.push(format!("{} {}", case[0], case[1]));
            }
        }
    }
    Ok((differing.is_empty(), format!("{} commands x workers 1,2,3; differing: {differing:?}", cases.len())))
}

fn main() {
    let scans = scanned_pairs();
    let shared = |f: fn(&Scans) -> Outcome| -> Outcome {
        match &scans {
            Ok(s) => f(s),
            Err(e) => Err(e.clone()),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 wait-for-mommy exactness", wait_for_mommy()),
        ("2 engine equivalence", shared(engine_equivalence)),
        ("3 asymmetric floor", shared(asymmetric_floor)),
        ("4 moment suite", shared(moment_suite)),
        ("5 lemma chain", lemma_chain()),
        ("6 constructive split", constructive_split()),
        ("7 assembly", assembly()),
        ("8 AW asymptotics", aw_asymptotics()),
        ("9 uniform sanity", uniform_sanity()),
        ("10 optimizer floor", optimizer_floor()),
        ("11 reproducibility", reproducibility()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (*pass, detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} criterion {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
