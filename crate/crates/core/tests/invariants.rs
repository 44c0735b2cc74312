use proptest::prelude::*;

use rendezvous::bounds::{
    random_pair, random_rational_strategy, random_same_kind_pair, random_split_instance, sample_rng,
    split_disjoint_edges, verify_theorem1_assembly, PairLemma,
};
use rendezvous::montecarlo::estimate_expected_waiting;
use rendezvous::optimizer::{frank_wolfe, optimize_symmetric_strategy, FW_TOLERANCE};
use rendezvous::rational::{q, to_f64};
use rendezvous::zoo::{anderson_weber, uniform_random_strategy, AwConfig};
use rendezvous::{ExactConfig, ExactEngine, Strategy};

fn engine() -> ExactEngine {
    ExactEngine::new(ExactConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_lemmas_hold(n in 2usize..=9, seed in any::<u64>()) {
        let e = engine();
        let mut rng = sample_rng(seed, 0);
        let (a, b) = random_pair(n, &mut rng);
        for lemma in [
            PairLemma::PbWaiting,
            PairLemma::MomentClaims,
            PairLemma::VarPb(q(1, 32)),
            PairLemma::DpVar,
            PairLemma::MarkovCorner,
        ] {
            let r = lemma.apply(&e, &a, &b).unwrap();
            prop_assert!(r.pass, "{} failed on {a} / {b}: {:?}", lemma.name(), r.failed_checks().collect::<Vec<_>>());
        }
    }

    #[test]
    fn same_kind_pairs_keep_their_variance(n in 2usize..=10, seed in any::<u64>()) {
        let e = engine();
        let mut rng = sample_rng(seed, 1);
        let (a, b) = random_same_kind_pair(n, &mut rng);
        let r = PairLemma::SameKindVariance.apply(&e, &a, &b).unwrap();
        prop_assert!(r.pass);
    }

    #[test]
    fn split_meets_its_invariants(n in 12usize..=120, seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 2);
        let edges = random_split_instance(n, &mut rng).unwrap();
        let split = split_disjoint_edges(&edges).unwrap();
        prop_assert!(split.validate().is_ok());
        prop_assert!(8 * split.first.len() >= n && 8 * split.second.len() >= n);
        prop_assert!(3 * split.degrees[0] > n && 4 * split.degrees[1] >= n);
        for &(a, b) in &split.first {
            prop_assert!(split.second.iter().all(|&(c, d)| a != c && b != d));
        }
    }

    #[test]
    fn frank_wolfe_never_climbs(k in 2usize..8, entries in proptest::collection::vec(0.5f64..5.0, 64), start in proptest::collection::vec(0.01f64..1.0, 8)) {
        let mut m = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                m[i][j] = (entries[i * 8 + j] + entries[j * 8 + i]) / 2.0;
            }
        }
        let total: f64 = start[..k].iter().sum();
        let x: Vec<f64> = start[..k].iter().map(|v| v / total).collect();
        let run = frank_wolfe(&m, &x, FW_TOLERANCE, 10_000);
        prop_assert!(run.monotone);
        prop_assert!(run.value <= run.start_value + 1e-12);
        prop_assert!((run.point.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(run.point.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn phi_is_bilinear_and_symmetric(seed in any::<u64>()) {
        let e = engine();
        let mut rng = sample_rng(seed, 3);
        let x = random_rational_strategy(3, 4, &mut rng).unwrap();
        let y = random_rational_strategy(3, 4, &mut rng).unwrap();
        let z = random_rational_strategy(3, 4, &mut rng).unwrap();
        prop_assert_eq!(e.bilinear_phi(&x, &y).unwrap(), e.bilinear_phi(&y, &x).unwrap());
        // Mixing the second argument half and half mixes the value.
        let mut mixed = Vec::new();
        for (t, w) in y.support().unwrap().iter().chain(z.support().unwrap()) {
            mixed.push((t.clone(), w.clone() * q(1, 2)));
        }
        let mix = Strategy::from_table(3, "mix", mixed).unwrap();
        let lhs = e.bilinear_phi(&x, &mix).unwrap();
        let rhs = (e.bilinear_phi(&x, &y).unwrap() + e.bilinear_phi(&x, &z).unwrap()) * q(1, 2);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn assembly_holds_for_random_strategies(seed in any::<u64>(), support in 1usize..8) {
        let e = engine();
        let mut rng = sample_rng(seed, 4);
        let s = random_rational_strategy(4, support, &mut rng).unwrap();
        prop_assert!(verify_theorem1_assembly(&e, &s).unwrap().pass);
    }
}

#[test]
fn optimizer_respects_the_floor() {
    let e = engine();
    for n in 2..=4 {
        let opt = optimize_symmetric_strategy(&e, n, 6, 99).unwrap();
        assert!(opt.certified, "n={n}");
        assert!(opt.value_exact >= opt.floor);
    }
}

/// Repeated runs of table-backed pairs: the exact value lies within four
/// standard errors in at least 99% of runs.
#[test]
fn monte_carlo_brackets_exact_values() {
    let e = engine();
    let pairs = [
        (uniform_random_strategy(3).unwrap(), anderson_weber(&AwConfig::truncated(3, q(1, 4))).unwrap()),
        (
            anderson_weber(&AwConfig::truncated(4, q(1, 2))).unwrap(),
            anderson_weber(&AwConfig::truncated(4, q(1, 2))).unwrap(),
        ),
        (uniform_random_strategy(4).unwrap(), anderson_weber(&AwConfig::truncated(4, q(1, 10))).unwrap()),
    ];
    let runs = 100;
    for (a, b) in &pairs {
        let exact = to_f64(&e.bilinear_phi(a, b).unwrap());
        let n = a.n();
        let inside = (0..runs)
            .filter(|&seed| {
                let est = estimate_expected_waiting(a, b, n, 4000, seed).unwrap();
                (est.mean - exact).abs() <= 4.0 * est.std_error
            })
            .count();
        assert!(inside * 100 >= 99 * runs as usize, "{} vs {}: {inside}/{runs}", a.name(), b.name());
    }
}
