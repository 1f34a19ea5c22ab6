use proptest::prelude::*;

use qlsi::converse::{beta_lower_bound, cq_converse_bound, gamma_infinity, np_oracle, HypothesisInstance};
use qlsi::operator::random::{density, positive_definite};
use qlsi::operator::{c64, identity, max_abs, max_abs_diff, trace_product};
use qlsi::semigroup::{davies_qubit_generator, evolve, simple_generator, LindbladGenerator};
use qlsi::weighted::{power_operator, weighted_norm, weighted_norm_pow, WeightedSpace};

const TOL: f64 = 1e-9;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.1, 0.1..4.0f64]
}

fn generator(seed: u64, dim: usize, davies: bool) -> LindbladGenerator {
    let sigma = density(dim, seed, 0.05).unwrap();
    if davies && dim == 2 {
        davies_qubit_generator(&sigma, 0.7, 0.3).unwrap()
    } else {
        simple_generator(&sigma).unwrap()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn norm_is_absolutely_homogeneous(seed in 0u64..1 << 32, dim in 2usize..4, p in exponent(), c in 0.1..10.0f64) {
        let w = WeightedSpace::new(density(dim, seed, 0.05).unwrap()).unwrap();
        let x = positive_definite(dim, seed ^ 0xabc, 0.01).unwrap().matrix().clone();
        let a = weighted_norm(&w, &(&x * c64(c, 0.0)), p).unwrap();
        let b = c * weighted_norm(&w, &x, p).unwrap();
        prop_assert!((a - b).abs() <= TOL * b, "{a} vs {b}");
    }

    #[test]
    fn power_operator_maps_norms(seed in 0u64..1 << 32, dim in 2usize..4, p in exponent(), q in exponent()) {
        // |Y|^{p/q} squares the condition number of Y once per unit of p/q.
        prop_assume!((p / q).abs() <= 3.0 && q.abs() >= 0.25);
        let w = WeightedSpace::new(density(dim, seed, 0.05).unwrap()).unwrap();
        let x = positive_definite(dim, seed ^ 0x5a5a, 0.01).unwrap().matrix().clone();
        let y = power_operator(&w, &x, q, p).unwrap();
        let a = weighted_norm_pow(&w, &y, q).unwrap();
        let b = weighted_norm_pow(&w, &x, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }

    #[test]
    fn semigroup_is_unital_and_preserves_sigma_expectation(
        seed in 0u64..1 << 32, dim in 2usize..4, davies: bool, t in 0.0..5.0f64,
    ) {
        let l = generator(seed, dim, davies);
        let one = evolve(&l, t, &identity(dim)).unwrap();
        prop_assert!(max_abs_diff(&one, &identity(dim)) < TOL);

        let x = positive_definite(dim, seed ^ 0x77, 0.01).unwrap().matrix().clone();
        let s = l.sigma().matrix();
        let before = trace_product(s, &x);
        let after = trace_product(s, &evolve(&l, t, &x).unwrap());
        prop_assert!((before - after).norm() < TOL);
    }

    #[test]
    fn semigroup_composes(seed in 0u64..1 << 32, dim in 2usize..4, davies: bool, s in 0.0..3.0f64, t in 0.0..3.0f64) {
        let l = generator(seed, dim, davies);
        let x = positive_definite(dim, seed ^ 0x99, 0.01).unwrap().matrix().clone();
        let two_steps = evolve(&l, s, &evolve(&l, t, &x).unwrap()).unwrap();
        let one_step = evolve(&l, s + t, &x).unwrap();
        prop_assert!(max_abs_diff(&two_steps, &one_step) < TOL * max_abs(&x).max(1.0));
    }

    #[test]
    fn optimal_beta_decreases_in_eps(seed in 0u64..1 << 32, n in 1usize..4, e1 in 0.01..0.98f64, e2 in 0.01..0.98f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let rho = density(2, seed, 0.05).unwrap();
        let sigma = density(2, seed ^ 0xfeed, 0.05).unwrap();
        let inst = HypothesisInstance::new(rho, sigma, n).unwrap();
        let (b_lo, _) = np_oracle(&inst, lo).unwrap();
        let (b_hi, _) = np_oracle(&inst, hi).unwrap();
        prop_assert!(b_hi <= b_lo + 1e-10, "β({hi}) = {b_hi} > β({lo}) = {b_lo}");
        prop_assert!(b_lo >= beta_lower_bound(&inst, lo).unwrap() - 1e-10);
    }

    #[test]
    fn gamma_is_at_least_one(seed in 0u64..1 << 32, dim in 2usize..5) {
        let rho = density(dim, seed, 0.01).unwrap();
        let sigma = density(dim, seed ^ 0x1234, 0.01).unwrap();
        prop_assert!(gamma_infinity(&rho, &sigma).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn cq_bound_is_monotone(m in 2usize..1000, d in 2usize..5, n in 1usize..10, e1 in 0.0..0.99f64, e2 in 0.0..0.99f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let at = |m, n, e| cq_converse_bound(m, d, n, e).unwrap();
        prop_assert!(at(m, n, hi) <= at(m, n, lo));
        prop_assert!(at(m + 1, n, lo) > at(m, n, lo));
        prop_assert!(at(m, n + 1, lo) <= at(m, n, lo));
    }
}
