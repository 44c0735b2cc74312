use rendezvous::bounds::{
    random_split_instance, run_pair_scan, sample_rng, split_disjoint_edges, tactic_pairs, verify_same_kind_gap,
    verify_theorem1_assembly, PairLemma, ScanMode,
};
use rendezvous::exact::engine_scan;
use rendezvous::format::write_strategy;
use rendezvous::montecarlo::{auto_seed, aw_scan, aw_scan_csv, best_row, estimate_expected_waiting, MCEstimate};
use rendezvous::optimizer::{optimize_symmetric_strategy, optimize_theta, McSettings, ThetaMode};
use rendezvous::rational::{parse_rational, to_decimal, to_fraction, Q};
use rendezvous::{Engine, Error, ExactEngine};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::specs;
use crate::CliError;

/// What a subcommand produced, in every format it supports.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    /// False when a verifier failed.
    pub passed: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            csv: None,
            passed: true,
        }
    }
}

fn core(e: Error) -> CliError {
    CliError::Core(e)
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialise")
}

fn seed_or_auto(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(auto_seed)
}

fn engine_arg(e: EngineArg) -> Engine {
    match e {
        EngineArg::Enumeration => Engine::Enumeration,
        EngineArg::InclusionExclusion => Engine::InclusionExclusion,
    }
}

fn scan_mode(mode: Option<ModeArg>, n: usize) -> ScanMode {
    match mode {
        Some(ModeArg::Exhaustive) => ScanMode::Exhaustive,
        Some(ModeArg::Sampled) => ScanMode::Sampled,
        None if n <= rendezvous::bounds::EXHAUSTIVE_MAX_N => ScanMode::Exhaustive,
        None => ScanMode::Sampled,
    }
}

pub fn run(command: &Command) -> Result<Output, CliError> {
    let engine = ExactEngine::default();
    match command {
        Command::Eval(a) => eval(&engine, a),
        Command::Survival(a) => survival(&engine, a),
        Command::Moments(a) => moments(&engine, a),
        Command::Phi(a) => phi(&engine, a),
        Command::Verify(a) => verify(&engine, a),
        Command::Scan(ScanCommand::Engines(a)) => scan_engines(&engine, a),
        Command::Scan(ScanCommand::Aw(a)) => scan_aw(a),
        Command::Simulate(a) => simulate(a),
        Command::Optimize(OptimizeCommand::Theta(a)) => theta(&engine, a),
        Command::Optimize(OptimizeCommand::Symmetric(a)) => symmetric(&engine, a),
        Command::Strategy(StrategyCommand::Export(a)) => export(a),
    }
}

fn eval(engine: &ExactEngine, args: &PairArgs) -> Result<Output, CliError> {
    let a = specs::tactic(&args.tactic_a, args.n)?;
    let b = specs::tactic(&args.tactic_b, args.n)?;
    let mut eval = engine.evaluate(&a, &b).map_err(core)?;
    if args.engine == EngineArg::Enumeration {
        let dist = engine.binding_distribution(&a, &b).map_err(core)?;
        eval.w = dist.expected_waiting_time();
        eval.survival = dist.survival_curve().values;
        eval.p_no_meet = dist.prob_no_rendezvous();
    }
    let text = format!(
        "w = {} ({})\nP(no rendezvous) = {} ({})\n",
        to_fraction(&eval.w),
        eval.w_decimal,
        to_fraction(&eval.p_no_meet),
        eval.p_no_meet_decimal
    );
    let mut json = to_json(&eval);
    json["engine"] = to_json(&engine_arg(args.engine));
    Ok(Output::ok(json, text))
}

fn survival(engine: &ExactEngine, args: &PairArgs) -> Result<Output, CliError> {
    let a = specs::tactic(&args.tactic_a, args.n)?;
    let b = specs::tactic(&args.tactic_b, args.n)?;
    let curve = engine
        .survival_curve_with(engine_arg(args.engine), &a, &b)
        .map_err(core)?;
    let mut text = String::new();
    let mut csv = String::from("k,survival,survival_decimal\n");
    for (k, v) in curve.values.iter().enumerate() {
        text.push_str(&format!("P(W > {k}) = {} ({})\n", to_fraction(v), to_decimal(v)));
        csv.push_str(&format!("{k},{},{}\n", to_fraction(v), to_decimal(v)));
    }
    let json = json!({
        "n": args.n,
        "tactic_a": a,
        "tactic_b": b,
        "engine": engine_arg(args.engine),
        "survival": curve.values.iter().map(to_fraction).collect::<Vec<_>>(),
        "survival_decimal": curve.values.iter().map(to_decimal).collect::<Vec<_>>(),
    });
    Ok(Output {
        csv: Some(csv),
        ..Output::ok(json, text)
    })
}

fn moments(engine: &ExactEngine, args: &PairArgs) -> Result<Output, CliError> {
    let a = specs::tactic(&args.tactic_a, args.n)?;
    let b = specs::tactic(&args.tactic_b, args.n)?;
    let m = engine.moments_with(engine_arg(args.engine), &a, &b).map_err(core)?;
    let line = |name: &str, v: &Q| format!("{name} = {} ({})\n", to_fraction(v), to_decimal(v));
    let text = format!(
        "m = {}\n{}{}{}{}",
        m.m,
        line("E X", &m.mean),
        line("Var X", &m.variance),
        line("E X^4", &m.fourth_moment),
        line("E|X-EX|^4", &m.fourth_central)
    );
    Ok(Output::ok(to_json(&m), text))
}

fn phi(engine: &ExactEngine, args: &PhiArgs) -> Result<Output, CliError> {
    let a = specs::strategy(&args.strategy_a, args.n, None)?;
    let b = specs::strategy(&args.strategy_b, args.n, None)?;
    let value = engine.bilinear_phi(&a, &b).map_err(core)?;
    let json = json!({
        "n": a.n(),
        "strategy_a": a.name(),
        "strategy_b": b.name(),
        "phi": to_fraction(&value),
        "phi_decimal": to_decimal(&value),
    });
    Ok(Output::ok(json, format!("Phi = {} ({})\n", to_fraction(&value), to_decimal(&value))))
}

/// One entry of the `verify` report array.
#[derive(Serialize)]
struct VerifyItem {
    lemma: String,
    kind: &'static str,
    pass: bool,
    seed: Option<u64>,
    detail: Value,
}

impl VerifyItem {
    fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let summary = match self.kind {
            "pair" | "strategy" => format!(
                "margin {} {}",
                self.detail["margin_decimal"].as_str().unwrap_or(""),
                self.detail["context"].as_str().unwrap_or("")
            ),
            "scan" => format!(
                "pairs {} applicable {} failures {}",
                self.detail["pairs"], self.detail["applicable"], self.detail["failures"]
            ),
            "gap-scan" => format!(
                "pairs {} min gap {} min P(X=0) {}",
                self.detail["pairs"],
                self.detail["min_gap_decimal"].as_str().unwrap_or(""),
                self.detail["min_p_no_meet_decimal"].as_str().unwrap_or("")
            ),
            _ => format!("graphs {} failures {}", self.detail["graphs"], self.detail["failures"]),
        };
        format!("{status} {} {summary}\n", self.lemma)
    }
}

fn pair_lemmas(lemma: Lemma, alpha: &Q) -> Vec<PairLemma> {
    let all = [
        PairLemma::PbWaiting,
        PairLemma::MomentClaims,
        PairLemma::VarPb(alpha.clone()),
        PairLemma::DpVar,
        PairLemma::MarkovCorner,
        PairLemma::SameKindVariance,
    ];
    let want = match lemma {
        Lemma::All => return all.to_vec(),
        Lemma::PbWaiting => "pb-waiting",
        Lemma::MomentClaims => "moment-claims",
        Lemma::VarPb => "var-pb",
        Lemma::DpVar => "dp-var",
        Lemma::MarkovCorner => "markov-corner",
        Lemma::SameKindVariance => "same-kind-variance",
        _ => return Vec::new(),
    };
    all.into_iter().filter(|l| l.name() == want).collect()
}

fn verify(engine: &ExactEngine, args: &VerifyArgs) -> Result<Output, CliError> {
    let alpha = parse_rational(&args.alpha).map_err(|e| CliError::Usage(format!("--alpha: {e}")))?;
    let n = args.n;
    let mode = scan_mode(args.mode, n);
    let stochastic = mode == ScanMode::Sampled || args.lemma == Lemma::Split;
    let seed = stochastic.then(|| seed_or_auto(args.seed));
    let mut items = Vec::new();

    let lemmas = pair_lemmas(args.lemma, &alpha);
    if !lemmas.is_empty() {
        if let (Some(ta), Some(tb)) = (&args.tactic_a, &args.tactic_b) {
            let a = specs::tactic(ta, n)?;
            let b = specs::tactic(tb, n)?;
            for lemma in &lemmas {
                let r = lemma.apply(engine, &a, &b).map_err(core)?;
                items.push(VerifyItem {
                    lemma: lemma.name().into(),
                    kind: "pair",
                    pass: r.pass,
                    seed: None,
                    detail: to_json(&r),
                });
            }
        } else {
            let pairs = tactic_pairs(n, mode, args.samples, seed.unwrap_or(0), false).map_err(core)?;
            for lemma in &lemmas {
                let s = run_pair_scan(engine, lemma, &pairs).map_err(core)?;
                items.push(VerifyItem {
                    lemma: s.lemma.clone(),
                    kind: "scan",
                    pass: s.pass,
                    seed,
                    detail: to_json(&s),
                });
            }
        }
    }
    if matches!(args.lemma, Lemma::SameKindGap | Lemma::All) && args.tactic_a.is_none() {
        let g = verify_same_kind_gap(engine, n, mode, args.samples, seed.unwrap_or(0)).map_err(core)?;
        items.push(VerifyItem {
            lemma: "same-kind-gap".into(),
            kind: "gap-scan",
            pass: g.report.pass,
            seed,
            detail: to_json(&g),
        });
    }
    if args.lemma == Lemma::Theorem1Assembly {
        let s = specs::strategy(&args.strategy, Some(n), None)?;
        let r = verify_theorem1_assembly(engine, &s).map_err(core)?;
        items.push(VerifyItem {
            lemma: "theorem1-assembly".into(),
            kind: "strategy",
            pass: r.pass,
            seed: None,
            detail: to_json(&r),
        });
    }
    if args.lemma == Lemma::Split {
        items.push(split_scan(n, args.graphs, seed.expect("split is stochastic"))?);
    }
    if items.is_empty() {
        return Err(CliError::Usage(format!("{:?} needs a scan or a tactic pair", args.lemma)));
    }
    let passed = items.iter().all(|i| i.pass);
    let text = items.iter().map(VerifyItem::line).collect();
    Ok(Output {
        json: to_json(&items),
        text,
        csv: None,
        passed,
    })
}

fn split_scan(n: usize, graphs: usize, seed: u64) -> Result<VerifyItem, CliError> {
    let mut failures = 0;
    let mut first_failure = None;
    let mut smallest = usize::MAX;
    for g in 0..graphs {
        let mut rng = sample_rng(seed, g as u64);
        let edges = random_split_instance(n, &mut rng).map_err(core)?;
        match split_disjoint_edges(&edges) {
            Ok(s) => smallest = smallest.min(s.first.len()).min(s.second.len()),
            Err(Error::InvariantViolation(msg)) => {
                failures += 1;
                first_failure.get_or_insert(json!({ "edges": edges.cells_one_based(), "error": msg }));
            }
            Err(e) => return Err(core(e)),
        }
    }
    Ok(VerifyItem {
        lemma: "split".into(),
        kind: "split",
        pass: failures == 0,
        seed: Some(seed),
        detail: json!({
            "n": n,
            "graphs": graphs,
            "failures": failures,
            "smallest_edge_set": if graphs > failures { Some(smallest) } else { None },
            "first_failure": first_failure,
        }),
    })
}

fn scan_engines(engine: &ExactEngine, args: &EngineScanArgs) -> Result<Output, CliError> {
    let mode = scan_mode(args.mode, args.n);
    let seed = (mode == ScanMode::Sampled).then(|| seed_or_auto(args.seed));
    let pairs = tactic_pairs(args.n, mode, args.samples, seed.unwrap_or(0), false).map_err(core)?;
    let scan = engine_scan(engine, &pairs).map_err(core)?;
    let text = format!(
        "{} pairs {} mismatches {} floor violations {} min gap {}\n",
        if scan.pass { "PASS" } else { "FAIL" },
        scan.pairs,
        scan.mismatches,
        scan.floor_violations,
        scan.min_gap_decimal
    );
    let mut json = to_json(&scan);
    json["n"] = json!(args.n);
    json["mode"] = to_json(&mode);
    json["seed"] = json!(seed);
    Ok(Output {
        passed: scan.pass,
        ..Output::ok(json, text)
    })
}

fn scan_aw(args: &AwScanArgs) -> Result<Output, CliError> {
    let usage = |e: Error| CliError::Usage(e.to_string());
    let thetas: Vec<Q> = if args.thetas.is_empty() {
        let step = parse_rational(&args.step).map_err(usage)?;
        if step <= Q::from_integer(0.into()) {
            return Err(CliError::Usage("--step must be positive".into()));
        }
        let mut out = Vec::new();
        let mut t = Q::from_integer(0.into());
        let one = Q::from_integer(1.into());
        while t <= one {
            out.push(t.clone());
            t += &step;
        }
        out
    } else {
        args.thetas.iter().map(|t| parse_rational(t.trim())).collect::<Result<_, _>>().map_err(usage)?
    };
    let seed = seed_or_auto(args.seed);
    let horizon = args.horizon.unwrap_or(20 * args.n);
    let rows = aw_scan(args.n, &thetas, horizon, args.trials, seed).map_err(core)?;
    let best = best_row(&rows).map(|r| r.theta_value);
    let mut text = String::new();
    for r in &rows {
        text.push_str(&format!(
            "theta {:<6} mean {:.4} se {:.4} mean/n {:.5}\n",
            r.theta_value,
            r.estimate.mean,
            r.estimate.std_error,
            r.estimate.mean / args.n as f64
        ));
    }
    let json = json!({ "n": args.n, "horizon": horizon, "trials": args.trials, "seed": seed, "best_theta": best, "rows": rows });
    Ok(Output {
        csv: Some(aw_scan_csv(&rows)),
        ..Output::ok(json, text)
    })
}

fn estimate_text(e: &MCEstimate) -> String {
    format!(
        "mean {:.6} se {:.6} (n {} horizon {} trials {} meet fraction {:.6} seed {})\n",
        e.mean, e.std_error, e.n, e.horizon, e.trials, e.meet_fraction, e.seed
    )
}

fn simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    let n = match args.n {
        Some(n) => n,
        None => specs::strategy(&args.strategy_a, None, None)?.n(),
    };
    let horizon = args.horizon.unwrap_or(n);
    let a = specs::strategy(&args.strategy_a, Some(n), Some(horizon))?;
    let b = specs::strategy(&args.strategy_b, Some(n), Some(horizon))?;
    let seed = seed_or_auto(args.seed);
    let e = estimate_expected_waiting(&a, &b, horizon, args.trials, seed).map_err(core)?;
    let csv = format!(
        "strategy_a,strategy_b,n,horizon,trials,mean,std_error,meet_fraction,seed\n{},{},{},{},{},{},{},{},{}\n",
        a.name(),
        b.name(),
        e.n,
        e.horizon,
        e.trials,
        e.mean,
        e.std_error,
        e.meet_fraction,
        e.seed
    );
    if let Some(path) = &args.csv {
        std::fs::write(path, &csv).map_err(CliError::Io)?;
    }
    let mut json = to_json(&e);
    json["strategy_a"] = json!(a.name());
    json["strategy_b"] = json!(b.name());
    Ok(Output {
        csv: Some(csv),
        ..Output::ok(json, estimate_text(&e))
    })
}

fn theta(engine: &ExactEngine, args: &ThetaArgs) -> Result<Output, CliError> {
    let (mode, mc) = match args.mode {
        ThetaModeArg::Exact => (ThetaMode::Exact, None),
        ThetaModeArg::Mc => (
            ThetaMode::Mc,
            Some(McSettings {
                horizon: args.horizon.unwrap_or(20 * args.n),
                trials: args.trials,
                seed: seed_or_auto(args.seed),
            }),
        ),
    };
    let r = optimize_theta(engine, args.n, mode, args.resolution, mc).map_err(core)?;
    let text = format!(
        "theta* = {} value = {}{} (value/n {:.6})\n",
        r.theta,
        r.value,
        r.value_exact.as_ref().map(|v| format!(" = {v}")).unwrap_or_default(),
        r.value_over_n
    );
    Ok(Output::ok(to_json(&r), text))
}

fn symmetric(engine: &ExactEngine, args: &SymmetricArgs) -> Result<Output, CliError> {
    let seed = seed_or_auto(args.seed);
    let r = optimize_symmetric_strategy(engine, args.n, args.restarts, seed).map_err(core)?;
    let mut text = format!(
        "value {} = {} (floor {} {})\n",
        r.value_decimal,
        to_fraction(&r.value_exact),
        to_decimal(&r.floor),
        if r.certified { "certified" } else { "VIOLATED" }
    );
    for (t, w) in &r.support {
        text.push_str(&format!("  {w} : {t}\n"));
    }
    Ok(Output {
        passed: r.certified,
        ..Output::ok(to_json(&r), text)
    })
}

fn export(args: &ExportArgs) -> Result<Output, CliError> {
    let s = specs::strategy(&args.spec, args.n, None)?;
    let text = write_strategy(&s).map_err(core)?;
    let support: Vec<Value> = s
        .require_support()
        .map_err(core)?
        .iter()
        .map(|(t, w)| json!({ "tactic": t, "weight": to_fraction(w) }))
        .collect();
    let json = json!({ "n": s.n(), "name": s.name(), "support": support });
    Ok(Output::ok(json, text))
}
