mod common;

use std::collections::BTreeMap;

use common::*;
use givental_core::cohft::{CorrelatorTable, FrobeniusPotential};
use givental_core::givental::{required_table_caps, transform_table, working_caps, RMatrix};
use givental_core::graphs::{
    automorphism_order, decorations, enumerate_graphs, graph_coefficient, graph_sum, graph_terms,
    Graph, GraphCaps, GraphContext, HalfEdge,
};
use givental_core::rational::{factorial_r, int, Rational};
use givental_core::series::{Caps, Monomial, Var};
use itertools::Itertools;
use num_traits::Zero;

fn random_table(
    seed: u64,
    r: &RMatrix,
    caps: Caps,
    max_genus: u32,
    density: f64,
) -> CorrelatorTable {
    let mut g = rng(seed);
    let work = working_caps(r, caps);
    let f = random_tame_log(&mut g, r.dimension(), work, max_genus, density);
    CorrelatorTable::from_log_series(&f, required_table_caps(r, caps, max_genus)).unwrap()
}

#[test]
fn graph_sum_matches_operator_genus_zero() {
    let mut g = rng(21);
    for (case, levels) in [&[1u32][..], &[2], &[3], &[1, 2], &[1, 2, 3]]
        .iter()
        .enumerate()
    {
        let r = random_rmatrix(&mut g, 2, levels);
        let caps = Caps::new(5, 0);
        let table = random_table(100 + case as u64, &r, caps, 0, 0.5);
        let graphs = graph_sum(&table, &r, caps).unwrap();
        let ops = transform_table(&r, &table, caps).unwrap();
        assert_eq!(graphs, ops, "levels {levels:?}");
    }
}

#[test]
fn graph_sum_matches_operator_genus_one() {
    let mut g = rng(22);
    for (case, levels) in [&[1u32][..], &[2], &[1, 2]].iter().enumerate() {
        let r = random_rmatrix(&mut g, 2, levels);
        let caps = Caps::new(3, 1);
        let table = random_table(200 + case as u64, &r, caps, 1, 0.3);
        let graphs = graph_sum(&table, &r, caps).unwrap();
        let ops = transform_table(&r, &table, caps).unwrap();
        assert_eq!(graphs, ops, "levels {levels:?}");
    }
}

#[test]
fn trivial_r_returns_log_z() {
    let r = RMatrix::zero(2);
    let caps = Caps::new(4, 1);
    let table = random_table(5, &r, caps, 1, 0.5);
    let out = graph_sum(&table, &r, caps).unwrap();
    assert_eq!(out, table.to_log_series(caps).unwrap().restrict_to_box());
}

#[test]
fn two_dimensional_sigma_five_from_three_graphs() {
    let mut g = rng(11);
    let sig = two_dim_sigmas(&mut g, 3);
    let f = FrobeniusPotential::two_dimensional(&sig).unwrap();
    let table = genus_zero_table(&f, 5, 2);
    let m = Monomial::from_factors(-1, &[(Var::primary(2), 5)]);
    let r = RMatrix::inversion(2);
    let terms = graph_terms(&table, &r, &m).unwrap();
    let total: Rational = terms
        .iter()
        .map(|t| &t.contribution / Rational::from_integer(t.automorphisms.into()))
        .sum();
    let expected = (&sig[2] + int(10) * &sig[1] + int(20) * &sig[0]) / factorial_r(5);
    assert_eq!(total, expected);
    assert_eq!(graph_coefficient(&table, &r, &m).unwrap(), expected);
    // edge graphs cancel: at the variable level only the star is left
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].automorphisms, 120);
    // expanded, the star splits by the number of `e₁z` leaves; three survive
    let ctx = GraphContext::new(&table, &r, 4).unwrap();
    let star = Graph::new(vec![0], vec![], vec![0; 5]).unwrap();
    let a = HalfEdge::Leaf {
        var: Var::primary(2),
        mu: 2,
        z: 0,
    };
    let b = HalfEdge::Leaf {
        var: Var::primary(2),
        mu: 1,
        z: 1,
    };
    let mut surviving = Vec::new();
    let mut sum = Rational::zero();
    for d in decorations(&star, &[a, b], &[]) {
        let (mono, c) = ctx.contract_graph(&d).unwrap();
        assert_eq!(mono, m);
        if !c.is_zero() {
            let aut = automorphism_order(&d);
            sum += &c / Rational::from_integer(aut.into());
            surviving.push(aut);
        }
    }
    surviving.sort_unstable();
    assert_eq!(surviving, vec![12, 24, 120]);
    assert_eq!(sum, expected);
}

#[test]
fn emitted_terms_sum_to_coefficient() {
    let mut g = rng(31);
    let r = random_rmatrix(&mut g, 2, &[1, 2]);
    let caps = Caps::new(5, 0);
    let table = random_table(9, &r, caps, 0, 0.6);
    let ctx = GraphContext::new(&table, &r, 8).unwrap();
    for m in [
        Monomial::from_factors(-1, &[(Var::primary(1), 2), (Var::primary(2), 3)]),
        Monomial::from_factors(-1, &[(Var::primary(2), 4), (Var::new(1, 1), 1)]),
    ] {
        let terms = ctx.terms(&m).unwrap();
        let sum: Rational = terms
            .iter()
            .map(|t| &t.contribution / Rational::from_integer(t.automorphisms.into()))
            .sum();
        assert_eq!(sum, ctx.coefficient(&m).unwrap(), "{m}");
        assert!(terms.windows(2).all(|w| w[0].graph < w[1].graph));
    }
}

/// `Σ_Γ 1/|Aut Γ|` over unlabelled graphs equals the number of labelled
/// structures divided by the relabelling group order `V!·E!·2^E·L!`.
#[test]
fn burnside_count_of_enumeration() {
    let caps = GraphCaps {
        max_leaves: 3,
        max_vertices: 3,
        max_edges: 3,
        max_genus: 3,
        max_z: 0,
    };
    let graphs = enumerate_graphs(&caps);
    let mut by_class: BTreeMap<(usize, usize, usize, Vec<u32>), Rational> = BTreeMap::new();
    for g in &graphs {
        let mut gen = g.vertex_genus().to_vec();
        gen.sort_unstable();
        *by_class
            .entry((g.vertex_count(), g.edge_count(), g.leaf_count(), gen))
            .or_insert_with(Rational::zero) +=
            Rational::new(1.into(), g.automorphism_order().into());
    }
    for ((v, e, l, gen), weight) in by_class {
        // labelled: vertices 0..v, genus labels one arrangement of `gen`,
        // edges as ordered lists of oriented pairs, leaves as a map to vertices
        let mut labelled = 0u64;
        let arrangements: Vec<Vec<u32>> = gen.iter().copied().permutations(v).unique().collect();
        let pairs: Vec<(usize, usize)> = (0..v).cartesian_product(0..v).collect();
        let edge_lists: Vec<Vec<(usize, usize)>> = if e == 0 {
            vec![vec![]]
        } else {
            (0..e)
                .map(|_| pairs.iter().copied())
                .multi_cartesian_product()
                .collect()
        };
        let leaf_maps: Vec<Vec<usize>> = if l == 0 {
            vec![vec![]]
        } else {
            (0..l).map(|_| 0..v).multi_cartesian_product().collect()
        };
        for arr in &arrangements {
            for es in &edge_lists {
                if Graph::new(arr.clone(), es.clone(), vec![]).is_err() {
                    continue;
                }
                labelled += leaf_maps.len() as u64;
            }
        }
        let group = factorial_r(v as u32)
            * factorial_r(e as u32)
            * Rational::from_integer((1u64 << e).into())
            * factorial_r(l as u32);
        assert_eq!(
            weight,
            Rational::from_integer(labelled.into()) / group,
            "class v={v} e={e} l={l}"
        );
    }
}

/// Two-dimensional inversion at `(t²)⁵`: leaves `e₂z⁰` or `e₁z¹`, edge ends
/// `e₁` or `e₂`. Only the vertices a flat unit and at most one ψ-class allow
/// survive.
#[test]
fn two_dimensional_graph_automorphisms() {
    let a = HalfEdge::Leaf {
        var: Var::primary(2),
        mu: 2,
        z: 0,
    };
    let b = HalfEdge::Leaf {
        var: Var::primary(2),
        mu: 1,
        z: 1,
    };
    let e1 = HalfEdge::End { mu: 1, z: 0 };
    let e2 = HalfEdge::End { mu: 2, z: 0 };
    let caps = GraphCaps {
        max_leaves: 5,
        max_vertices: 3,
        max_edges: 2,
        max_genus: 0,
        max_z: 1,
    };
    let mut auts = Vec::new();
    for g in enumerate_graphs(&caps) {
        if g.leaf_count() != 5 || !g.is_stable() || g.genus() != 0 {
            continue;
        }
        for d in decorations(&g, &[a, b], &[e1, e2]) {
            if survives(&d) {
                auts.push(automorphism_order(&d));
            }
        }
    }
    auts.sort_unstable();
    assert_eq!(auts, vec![4, 4, 8, 8, 12, 12, 24, 120]);
}

fn survives(d: &givental_core::graphs::DecoratedGraph) -> bool {
    let v = d.graph.vertex_count();
    (0..v).all(|x| {
        let mut labels: Vec<HalfEdge> = d
            .graph
            .leaves()
            .iter()
            .zip(&d.leaf_labels)
            .filter(|(&y, _)| y == x)
            .map(|(_, l)| *l)
            .collect();
        for (&(p, q), &(s, t)) in d.graph.edges().iter().zip(&d.edge_labels) {
            if p == x {
                labels.push(s);
            }
            if q == x {
                labels.push(t);
            }
        }
        let psi = labels
            .iter()
            .filter(|l| matches!(l, HalfEdge::Leaf { z: 1, .. }))
            .count();
        let ones = labels
            .iter()
            .filter(|l| matches!(l, HalfEdge::End { mu: 1, .. }))
            .count();
        let twos = labels.len() - psi - ones;
        match psi {
            0 => ones == 0 || (ones == 2 && twos == 1),
            p => labels.len() >= p + 3,
        }
    })
}
