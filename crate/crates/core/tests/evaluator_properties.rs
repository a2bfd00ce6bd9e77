//! Properties of the exact and Monte Carlo evaluators, checked against a
//! brute-force path through `response` and `covered_columns`.

use proptest::prelude::*;

use grouptest::exponent::lower_bound_error;
use grouptest::{
    binomial, covered_columns, is_disjunctive_code, response, DecisionRule, DefectiveSet,
    Evaluator, SizeDistribution, TestMatrix,
};

fn subsets(t: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << t)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..t).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

fn brute_accept_h0(x: &TestMatrix, rule: &DecisionRule, k: usize) -> u128 {
    subsets(x.n_items(), k)
        .into_iter()
        .filter(|m| {
            let y = response(x, &DefectiveSet::new(m.clone()).unwrap()).unwrap();
            match *rule {
                DecisionRule::Wdr { threshold } => y.weight() <= threshold,
                DecisionRule::Comp { s } => covered_columns(x, &y).unwrap().len() <= s,
            }
        })
        .count() as u128
}

fn matrix() -> impl Strategy<Value = TestMatrix> {
    (2usize..9, 4usize..10, 0.1f64..0.7).prop_flat_map(|(n, t, density)| {
        proptest::collection::vec(proptest::bool::weighted(density), n * t)
            .prop_map(move |bits| TestMatrix::from_fn(n, t, |i, j| bits[i * t + j]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_errors_match_brute_force(x in matrix(), s in 1usize..3, frac in 0.0f64..1.0) {
        prop_assume!(s + 1 < x.n_items());
        let ev = Evaluator::default();
        let t = x.n_items();
        let threshold = (frac * x.n_tests() as f64).round() as usize;
        let wdr = DecisionRule::wdr(threshold);
        let c = ev.exact_wdr_counts(&x, s, threshold).unwrap();
        prop_assert_eq!(c.b1_s, binomial(t, s) - brute_accept_h0(&x, &wdr, s));
        prop_assert_eq!(c.b2_s1, brute_accept_h0(&x, &wdr, s + 1));

        let comp = ev.exact_comp_error(&x, s).unwrap();
        let rule = DecisionRule::comp(s).unwrap();
        let h0 = brute_accept_h0(&x, &rule, s) as f64 / binomial(t, s) as f64;
        let h1 = brute_accept_h0(&x, &rule, s + 1) as f64 / binomial(t, s + 1) as f64;
        prop_assert!((comp.err_h0 - (1.0 - h0)).abs() < 1e-12);
        prop_assert!((comp.err_h1 - h1).abs() < 1e-12);
        for e in [c.errors().err_h0, c.errors().err_h1, comp.err_h0, comp.err_h1] {
            prop_assert!((0.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn misclassified_counts_grow_away_from_the_threshold(x in matrix(), s in 1usize..3, frac in 0.0f64..1.0) {
        let t = x.n_items();
        prop_assume!(s + 2 <= t);
        let threshold = (frac * x.n_tests() as f64).round() as usize;
        let ev = Evaluator::default();
        let heavy = |k: usize| -> u128 { ev.weight_histogram(&x, k).unwrap()[threshold + 1..].iter().sum() };
        let light = |k: usize| -> u128 { ev.weight_histogram(&x, k).unwrap()[..=threshold].iter().sum() };
        for k in [s, s + 1] {
            // |B1_{k+1}| >= |B1_k| (t-k)/(k+1) and |B2_k| >= |B2_{k+1}| (k+1)/(t-k)
            prop_assert!(heavy(k + 1) * (k as u128 + 1) >= heavy(k) * (t - k) as u128);
            prop_assert!(light(k) * (t - k) as u128 >= light(k + 1) * (k as u128 + 1));
        }
    }

    #[test]
    fn weight_rule_error_is_flat_in_the_worst_case_mixture(x in matrix(), s in 1usize..3, frac in 0.0f64..1.0, ps in 0.05f64..0.95) {
        prop_assume!(s + 1 < x.n_items());
        let threshold = (frac * x.n_tests() as f64).round() as usize;
        let ev = Evaluator::default();
        let mut probs = vec![0.0; s + 2];
        probs[s] = ps;
        probs[s + 1] = 1.0 - ps;
        let p = SizeDistribution::new(probs).unwrap();
        let mixed = ev.general_error(&x, &DecisionRule::wdr(threshold), &p, s).unwrap();
        let universal = ev.universal_error_wdr(&x, s, threshold).unwrap();
        prop_assert!((mixed.err_h0 - universal.err_h0).abs() < 1e-12);
        prop_assert!((mixed.err_h1 - universal.err_h1).abs() < 1e-12);
    }

    #[test]
    fn no_rule_beats_the_converse_bound(x in matrix(), s in 1usize..3) {
        let t = x.n_items();
        prop_assume!(s + 1 < t);
        let bound = lower_bound_error(x.n_tests(), t, s).unwrap();
        let ev = Evaluator::default();
        for threshold in 0..=x.n_tests() {
            prop_assert!(ev.universal_error_wdr(&x, s, threshold).unwrap().eps() >= bound);
        }
        let comp = ev.universal_error(&x, &DecisionRule::comp(s).unwrap(), s).unwrap();
        prop_assert!(comp.eps() >= bound);
    }

    #[test]
    fn disjunctive_designs_have_zero_comp_error(x in matrix(), s in 1usize..3) {
        prop_assume!(s + 2 <= x.n_items());
        if is_disjunctive_code(&x, s + 1).unwrap() {
            let e = Evaluator::default().exact_comp_error(&x, s).unwrap();
            prop_assert_eq!((e.err_h0, e.err_h1), (0.0, 0.0));
        }
    }
}

#[test]
fn monte_carlo_intervals_cover_the_exact_value() {
    let x = TestMatrix::from_fn(8, 14, |i, j| (i * 7 + j * 3) % 5 < 2).unwrap();
    let ev = Evaluator::default();
    let rule = DecisionRule::wdr(5);
    let exact = ev.universal_error(&x, &rule, 2).unwrap();
    assert!(exact.err_h0 > 0.05 && exact.err_h1 > 0.05, "{exact:?}");
    let runs = 400;
    let mut covered = 0;
    for seed in 0..runs {
        let mc = ev.mc_error(&x, &rule, 2, 1000, seed).unwrap();
        covered += ((mc.point.err_h0 - exact.err_h0).abs() <= mc.half_width.err_h0) as usize;
        covered += ((mc.point.err_h1 - exact.err_h1).abs() <= mc.half_width.err_h1) as usize;
    }
    // nominal 95%, less three binomial standard errors over 800 intervals
    let rate = covered as f64 / (2 * runs) as f64;
    assert!(
        rate >= 0.95 - 3.0 * (0.95f64 * 0.05 / 800.0).sqrt(),
        "coverage {rate}"
    );
}

#[test]
fn monte_carlo_matches_weight_histograms() {
    let x = TestMatrix::from_fn(9, 12, |i, j| (i + 2 * j) % 4 == 0).unwrap();
    let ev = Evaluator::default();
    let hist = ev.mc_weight_histograms(&x, 2, 3000, 17).unwrap();
    for threshold in 0..=9 {
        let mc = ev
            .mc_error(&x, &DecisionRule::wdr(threshold), 2, 3000, 17)
            .unwrap();
        assert_eq!(hist.counts(threshold).errors(), mc.point);
    }
}
