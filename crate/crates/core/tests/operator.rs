mod common;

use common::*;
use givental_core::givental::{
    apply_factorized, apply_infinitesimal, exponentiate_action, factorize, transform_table, RMatrix,
};
use givental_core::matrix::Mat;
use givental_core::rational::{factorial_r, int};
use givental_core::series::{Caps, Monomial, TruncatedSeries, Var};
use proptest::prelude::*;

#[test]
fn factorized_form_matches_exponential() {
    let mut g = rng(7);
    for case in 0..6 {
        let r = random_rmatrix(&mut g, 2, &[1, 2, 3][..1 + case % 3]);
        let caps = Caps::stable(5, 1, r.has_dilaton());
        let f = random_tame_log(&mut g, 2, caps, 1, 0.15);
        let z = f.exp().unwrap();
        let direct = exponentiate_action(&r, &z).unwrap();
        let fact = factorize(&r, 12).unwrap();
        let split = apply_factorized(&fact, &z).unwrap();
        assert_eq!(direct, split, "case {case}");
        assert!(direct.log().unwrap().is_tame(), "case {case}");
    }
}

#[test]
fn trivial_action_is_identity() {
    let mut g = rng(3);
    let caps = Caps::stable(5, 1, false);
    let z = random_tame_log(&mut g, 2, caps, 1, 0.3).exp().unwrap();
    assert_eq!(exponentiate_action(&RMatrix::zero(2), &z).unwrap(), z);
    let fact = factorize(&RMatrix::zero(2), 6).unwrap();
    assert_eq!(apply_factorized(&fact, &z).unwrap(), z);
}

#[test]
fn inversion_two_dimensional_sigma_five() {
    let mut g = rng(11);
    let sig = two_dim_sigmas(&mut g, 3);
    let f = givental_core::cohft::FrobeniusPotential::two_dimensional(&sig).unwrap();
    let table = genus_zero_table(&f, 5, 2);
    let out = transform_table(&RMatrix::inversion(2), &table, Caps::new(5, 0)).unwrap();
    let m = Monomial::from_factors(-1, &[(Var::primary(2), 5)]);
    let expected = (&sig[2] + int(10) * &sig[1] + int(20) * &sig[0]) / factorial_r(5);
    assert_eq!(out.get(&m), expected);
}

#[test]
fn commuting_levels_compose() {
    // levels 1 and 3 of a diagonal-type r commute, so two actions equal one
    let mut g = rng(5);
    let caps = Caps::stable(4, 1, false);
    let z = random_tame_log(&mut g, 2, caps, 1, 0.3).exp().unwrap();
    let r1 = RMatrix::new(2, [(1, Mat::unit(2, 1, 2))]).unwrap();
    let r3 = RMatrix::new(2, [(3, Mat::unit(2, 1, 2).scale(&int(2)))]).unwrap();
    let both = RMatrix::new(
        2,
        [
            (1, Mat::unit(2, 1, 2)),
            (3, Mat::unit(2, 1, 2).scale(&int(2))),
        ],
    )
    .unwrap();
    let seq = exponentiate_action(&r3, &exponentiate_action(&r1, &z).unwrap()).unwrap();
    assert_eq!(seq, exponentiate_action(&both, &z).unwrap());
    let other = exponentiate_action(&r1, &exponentiate_action(&r3, &z).unwrap()).unwrap();
    assert_eq!(seq, other);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn infinitesimal_is_linear(seed in 0u64..10_000, l in 1u32..4) {
        let mut g = rng(seed);
        let r = random_rmatrix(&mut g, 2, &[l]);
        let caps = Caps::stable(4, 1, true);
        let a = random_tame_log(&mut g, 2, caps, 1, 0.2);
        let b = random_tame_log(&mut g, 2, caps, 1, 0.2);
        let m = r.level(l).cloned().unwrap_or_else(|| Mat::zero(2));
        let lhs = apply_infinitesimal(&m, l, &a.add(&b).unwrap()).unwrap();
        let rhs = apply_infinitesimal(&m, l, &a).unwrap()
            .add(&apply_infinitesimal(&m, l, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_preserves_tameness(seed in 0u64..10_000) {
        let mut g = rng(seed);
        let r = random_rmatrix(&mut g, 2, &[1, 2]);
        let caps = Caps::stable(4, 1, r.has_dilaton());
        let z = random_tame_log(&mut g, 2, caps, 1, 0.2).exp().unwrap();
        let out = exponentiate_action(&r, &z).unwrap();
        prop_assert!(out.log().unwrap().is_tame());
    }

    #[test]
    fn zero_series_stays_zero(seed in 0u64..1000) {
        let mut g = rng(seed);
        let r = random_rmatrix(&mut g, 2, &[1]);
        let z = TruncatedSeries::zero(2, Caps::stable(3, 1, true));
        prop_assert!(exponentiate_action(&r, &z).unwrap().is_zero());
    }
}
