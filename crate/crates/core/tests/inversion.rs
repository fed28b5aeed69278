mod common;

use common::*;
use givental_core::cohft::{eta_part, FrobeniusPotential, Insertion};
use givental_core::graphs::graph_terms;
use givental_core::inversion::{
    givental_inverse, h_correlator, inversion_table, invert_coordinates, invert_potential,
    q_correlator, uninvert_coordinates, verify_inversion_theorem, verify_with_table, GiventalRoute,
    InversionData,
};
use givental_core::rational::{factorial_r, int, Rational};
use givental_core::series::{Caps, Monomial, TruncatedSeries, Var};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn two_dimensional_theorem_both_routes() {
    let mut g = rng(41);
    let f = random_two_dim(&mut g, 6);
    for route in [GiventalRoute::Graphs, GiventalRoute::Operator] {
        let report = verify_inversion_theorem(&f, 6, route).unwrap();
        assert!(report.all_equal(), "{route:?}\n{report}");
        assert!(!report.entries.is_empty());
    }
}

#[test]
fn two_dimensional_epsilon_five() {
    let mut g = rng(42);
    let sig = two_dim_sigmas(&mut g, 4);
    let f = FrobeniusPotential::two_dimensional(&sig).unwrap();
    let inv = invert_potential(&f, 6).unwrap();
    let m = Monomial::from_factors(0, &[(Var::primary(2), 5)]);
    let expected = (&sig[2] + int(10) * &sig[1] + int(20) * &sig[0]) / factorial_r(5);
    assert_eq!(inv.series().get(&m), expected);
}

#[test]
fn three_dimensional_theorem() {
    let mut g = rng(43);
    for _ in 0..2 {
        let f = random_three_dim(&mut g, 6);
        let report = verify_inversion_theorem(&f, 6, GiventalRoute::Graphs).unwrap();
        assert!(report.all_equal(), "{report}");
    }
}

#[test]
fn inverted_potential_matches_closed_forms() {
    let mut g = rng(44);
    for n in [3u32, 4, 5] {
        // H need not satisfy WDVV for the coordinate identities
        let caps = Caps::new(6, 1);
        let mut h = TruncatedSeries::zero(n, caps);
        for k in 3..=6 {
            for ins in givental_core::cohft::insertion_multisets(n - 1, k, 0) {
                if g.random_bool(0.4) {
                    let vars = ins.iter().map(|i| Var::primary(i.mu + 1));
                    h.add_term(Monomial::from_vars(0, vars), small_rational(&mut g));
                }
            }
        }
        let f = FrobeniusPotential::from_h(n, 6, &h).unwrap();
        let inv = invert_potential(&f, 6).unwrap();
        for (m, c) in inv.series().terms() {
            if m.power_of(Var::primary(1)) > 0 {
                continue;
            }
            let q = m.power_of(Var::primary(n));
            let alphas: Vec<u32> = m
                .vars()
                .iter()
                .map(|v| v.mu)
                .filter(|&mu| mu != n)
                .collect();
            let mut expected = h_correlator(&f, &alphas, q).unwrap();
            if alphas.len() == 4 {
                expected +=
                    q_correlator(n, [alphas[0], alphas[1], alphas[2], alphas[3]], q).unwrap();
            }
            assert_eq!(c * Rational::from_integer(m.aut()), expected, "n={n} {m}");
        }
    }
}

#[test]
fn flat_potential_gives_only_the_quartic_term() {
    let n = 4;
    let f = FrobeniusPotential::new(n, 6, eta_part(n, Caps::new(6, 1))).unwrap();
    let inv = invert_potential(&f, 6).unwrap();
    let rest = inv.series().sub(&eta_part(n, Caps::new(6, 1))).unwrap();
    assert!(rest
        .terms()
        .all(|(m, _)| m.degree() >= 4 && m.vars().iter().filter(|v| v.mu != n).count() == 4));
    let report = verify_inversion_theorem(&f, 6, GiventalRoute::Graphs).unwrap();
    assert!(report.all_equal(), "{report}");
    // every contributing graph of a quartic coefficient has an edge
    let table = inversion_table(&f, 6).unwrap();
    let m = Monomial::from_vars(-1, [2, 2, 3, 3, 4].map(Var::primary));
    let terms = graph_terms(&table, InversionData::new(n).unwrap().r(), &m).unwrap();
    assert!(!terms.is_empty());
    assert!(terms.iter().all(|t| t.graph.graph.edge_count() > 0));
}

#[test]
fn inverted_potential_satisfies_wdvv() {
    let mut g = rng(45);
    let f = random_three_dim(&mut g, 6);
    assert!(f.satisfies_wdvv().unwrap());
    assert!(invert_potential(&f, 6).unwrap().satisfies_wdvv().unwrap());
}

#[test]
fn perturbed_correlator_is_localised() {
    let mut g = rng(46);
    let f = random_two_dim(&mut g, 6);
    let mut table = inversion_table(&f, 6).unwrap();
    let key = vec![Insertion::new(0, 2); 5];
    let v = table.get(0, &key).unwrap();
    table.insert(0, key, v + int(1)).unwrap();
    let report = verify_with_table(&f, &table, 6, GiventalRoute::Graphs).unwrap();
    let bad: Vec<String> = report
        .mismatches()
        .map(|e| e.monomial.to_string())
        .collect();
    let target = Monomial::from_factors(0, &[(Var::primary(2), 5)]);
    assert_eq!(bad, vec![target.to_string()]);
    let entry = report.mismatches().next().unwrap();
    assert_eq!(
        &entry.givental - &entry.coordinate,
        Rational::new(1.into(), 120.into())
    );
}

#[test]
fn routes_agree_on_the_givental_side() {
    let mut g = rng(47);
    let f = random_three_dim(&mut g, 5);
    let table = inversion_table(&f, 5).unwrap();
    assert_eq!(
        givental_inverse(&table, 5, GiventalRoute::Graphs).unwrap(),
        givental_inverse(&table, 5, GiventalRoute::Operator).unwrap()
    );
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), n).prop_map(|v| {
        v.into_iter()
            .map(|(p, q)| Rational::new(p.into(), q.into()))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinate_round_trip(t in (2usize..=5).prop_flat_map(point)) {
        prop_assume!(t.last().is_some_and(|x| *x != int(0)));
        let back = uninvert_coordinates(&invert_coordinates(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t.clone());
        let forth = invert_coordinates(&uninvert_coordinates(&t).unwrap()).unwrap();
        prop_assert_eq!(forth, t);
    }
}
