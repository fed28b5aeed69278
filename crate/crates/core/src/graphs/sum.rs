//! `log(R̂ Z) = Σ_Γ 𝓒(Γ) / |Aut Γ|`, evaluated one output coefficient at a
//! time. For a monomial `ħ^{g−1} Π t^{d,μ}` only graphs of genus `g` whose
//! ordinary leaves carry exactly its variables can contribute. Each vertex
//! `v` also obeys `Σ z ≤ 3g_v − 3 + m_v`, which bounds the number of edges
//! plus dilaton leaves by the tameness excess `δ`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::decor::{dilaton_leaf_vector, edge_bivector};
use super::graph::{
    automorphism_order, compositions, is_orbit_minimum, skeletons, DecoratedGraph, HalfEdge,
};
use crate::cohft::{insertion_multisets, CorrelatorTable, Insertion};
use crate::error::{Error, Result};
use crate::givental::RMatrix;
use crate::matrix::{MatSeries, MatSeries2};
use crate::rational::{factorial_r, Rational};
use crate::series::{Caps, Monomial, TruncatedSeries, Var};

/// An undecorated-by-variables graph: per-vertex genus, ordinary and
/// dilaton leaf counts, and edges.
#[derive(Clone, Debug)]
struct Shape {
    genus: Vec<u32>,
    ordinary: Vec<u32>,
    dilaton: Vec<u32>,
    edges: Vec<(usize, usize)>,
    aut: Rational,
}

/// One isomorphism class of contributing graphs, leaves labelled by
/// variable (or dilaton), edges bare.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphTerm {
    pub graph: DecoratedGraph,
    pub automorphisms: u64,
    /// `𝓒(Γ)`, the coefficient of the target monomial before dividing by
    /// `|Aut Γ|`.
    pub contribution: Rational,
}

type VertexKey = (u32, Vec<HalfEdge>, Vec<Insertion>);

/// Everything derived from `r` and a table that graph contractions need.
pub struct GraphContext<'a> {
    table: &'a CorrelatorTable,
    zcap: u32,
    exp: MatSeries,
    dilaton: BTreeMap<(u32, u32), Rational>,
    edge: MatSeries2,
    edge_terms: Vec<(u32, u32, u32, u32, Rational)>,
    shapes: Mutex<HashMap<(u32, u32, u32), Arc<Vec<Shape>>>>,
}

impl<'a> GraphContext<'a> {
    /// Decorations are expanded up to `z^zcap` on any half-edge.
    pub fn new(table: &'a CorrelatorTable, r: &RMatrix, zcap: u32) -> Result<Self> {
        if r.dimension() != table.dimension() {
            return Err(Error::DimensionMismatch(r.dimension(), table.dimension()));
        }
        let edge = edge_bivector(r, zcap)?;
        let mut edge_terms = Vec::new();
        for (&(a, b), m) in &edge {
            for (mu, nu, w) in m.entries() {
                edge_terms.push((a, mu, b, nu, w.clone()));
            }
        }
        Ok(GraphContext {
            table,
            zcap,
            exp: r.exp_series(zcap),
            dilaton: dilaton_leaf_vector(r, zcap),
            edge,
            edge_terms,
            shapes: Mutex::new(HashMap::new()),
        })
    }

    /// Half-edge bound needed for every coefficient of `m`.
    pub fn zcap_for(m: &Monomial) -> u32 {
        let g = m.hbar_power() as i64 + 1;
        (3 * g - 3 + m.degree() as i64 + m.delta()).max(0) as u32
    }

    fn exp_entry(&self, j: u32, mu: u32, nu: u32) -> Option<&Rational> {
        let c = self.exp.get(j as usize)?.get(mu, nu);
        (!c.is_zero()).then_some(c)
    }

    fn edge_weight(&self, a: u32, mu: u32, b: u32, nu: u32) -> Option<&Rational> {
        let c = self.edge.get(&(a, b))?.get(mu, nu);
        (!c.is_zero()).then_some(c)
    }

    /// Minimal `z`-power the label can carry.
    fn min_z(label: &HalfEdge) -> Result<u32> {
        match *label {
            HalfEdge::Ordinary(v) => Ok(v.d),
            HalfEdge::Dilaton => Ok(2),
            HalfEdge::Leaf { z, .. } | HalfEdge::DilatonTerm { z, .. } => Ok(z),
            HalfEdge::End { z, .. } => Ok(z),
            HalfEdge::Bare => Ok(0),
        }
    }

    /// Choices `(insertion, weight)` for a leaf label.
    fn leaf_options(&self, label: &HalfEdge, limit: u32) -> Result<Vec<(Insertion, Rational)>> {
        let n = self.table.dimension();
        let mut out = Vec::new();
        match *label {
            HalfEdge::Ordinary(v) => {
                for z in v.d..=limit.min(self.zcap) {
                    for mu in 1..=n {
                        if let Some(c) = self.exp_entry(z - v.d, mu, v.mu) {
                            out.push((Insertion::new(z, mu), c.clone()));
                        }
                    }
                }
            }
            HalfEdge::Leaf { var, mu, z } => {
                if z >= var.d && z <= limit {
                    if let Some(c) = self.exp_entry(z - var.d, mu, var.mu) {
                        out.push((Insertion::new(z, mu), c.clone()));
                    }
                }
            }
            HalfEdge::Dilaton => {
                for (&(mu, z), c) in &self.dilaton {
                    if z <= limit {
                        out.push((Insertion::new(z, mu), c.clone()));
                    }
                }
            }
            HalfEdge::DilatonTerm { mu, z } => {
                if let Some(c) = self.dilaton.get(&(mu, z)) {
                    if z <= limit {
                        out.push((Insertion::new(z, mu), c.clone()));
                    }
                }
            }
            HalfEdge::End { .. } | HalfEdge::Bare => {
                return Err(Error::InvalidArgument(format!(
                    "leaf label {label} cannot be contracted"
                )))
            }
        }
        Ok(out)
    }

    /// `Σ` over leaf expansions of `Π weights · ⟨…⟩_g`.
    fn vertex_factor(
        &self,
        g: u32,
        leaves: &[HalfEdge],
        ends: &[Insertion],
        memo: &mut HashMap<VertexKey, Rational>,
    ) -> Result<Rational> {
        let key = (g, leaves.to_vec(), ends.to_vec());
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let m = (leaves.len() + ends.len()) as i64;
        let budget = 3 * g as i64 - 3 + m;
        let used: i64 = ends.iter().map(|i| i.d as i64).sum();
        let mins: Vec<i64> = leaves
            .iter()
            .map(|l| Self::min_z(l).map(i64::from))
            .collect::<Result<_>>()?;
        let mut suffix = vec![0i64; leaves.len() + 1];
        for i in (0..leaves.len()).rev() {
            suffix[i] = suffix[i + 1] + mins[i];
        }
        let mut total = Rational::zero();
        if 2 * g as i64 - 2 + m > 0 && used + suffix[0] <= budget {
            let mut ins = ends.to_vec();
            self.leaf_dfs(
                g,
                leaves,
                &suffix,
                0,
                budget - used,
                &mut ins,
                Rational::one(),
                &mut total,
            )?;
        }
        memo.insert(key, total.clone());
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn leaf_dfs(
        &self,
        g: u32,
        leaves: &[HalfEdge],
        suffix: &[i64],
        i: usize,
        room: i64,
        ins: &mut Vec<Insertion>,
        weight: Rational,
        total: &mut Rational,
    ) -> Result<()> {
        if i == leaves.len() {
            let v = self.table.get(g, ins)?;
            if !v.is_zero() {
                *total += weight * v;
            }
            return Ok(());
        }
        let limit = room - suffix[i + 1];
        if limit < 0 {
            return Ok(());
        }
        for (x, c) in self.leaf_options(&leaves[i], limit as u32)? {
            ins.push(x);
            self.leaf_dfs(
                g,
                leaves,
                suffix,
                i + 1,
                room - x.d as i64,
                ins,
                &weight * &c,
                total,
            )?;
            ins.pop();
        }
        Ok(())
    }

    /// Edge choices for one edge given its two end labels.
    fn edge_options(&self, x: &HalfEdge, y: &HalfEdge) -> Vec<(u32, u32, u32, u32, Rational)> {
        match (*x, *y) {
            (HalfEdge::End { mu, z: a }, HalfEdge::End { mu: nu, z: b }) => self
                .edge_weight(a, mu, b, nu)
                .map(|w| vec![(a, mu, b, nu, w.clone())])
                .unwrap_or_default(),
            _ => self
                .edge_terms
                .iter()
                .filter(|(a, mu, b, nu, _)| fits(x, *mu, *a) && fits(y, *nu, *b))
                .cloned()
                .collect(),
        }
    }

    fn contract_parts(
        &self,
        genus: &[u32],
        leaves: &[Vec<HalfEdge>],
        edges: &[((usize, HalfEdge), (usize, HalfEdge))],
        memo: &mut HashMap<VertexKey, Rational>,
    ) -> Result<Rational> {
        let v = genus.len();
        if genus.iter().any(|&g| g > self.table.caps().max_genus) {
            return Ok(Rational::zero());
        }
        let mut room = vec![0i64; v];
        for x in 0..v {
            let deg = edges
                .iter()
                .map(|((a, _), (b, _))| usize::from(*a == x) + usize::from(*b == x))
                .sum::<usize>();
            let m = (deg + leaves[x].len()) as i64;
            if 2 * genus[x] as i64 - 2 + m <= 0 {
                return Ok(Rational::zero());
            }
            let mins: u32 = leaves[x]
                .iter()
                .map(Self::min_z)
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            room[x] = 3 * genus[x] as i64 - 3 + m - mins as i64;
            if room[x] < 0 {
                return Ok(Rational::zero());
            }
        }
        let options: Vec<_> = edges
            .iter()
            .map(|((_, x), (_, y))| self.edge_options(x, y))
            .collect();
        let mut ends: Vec<Vec<Insertion>> = vec![Vec::new(); v];
        let mut total = Rational::zero();
        self.edge_dfs(
            genus,
            leaves,
            edges,
            &options,
            0,
            &mut room,
            &mut ends,
            Rational::one(),
            &mut total,
            memo,
        )?;
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn edge_dfs(
        &self,
        genus: &[u32],
        leaves: &[Vec<HalfEdge>],
        edges: &[((usize, HalfEdge), (usize, HalfEdge))],
        options: &[Vec<(u32, u32, u32, u32, Rational)>],
        i: usize,
        room: &mut [i64],
        ends: &mut [Vec<Insertion>],
        weight: Rational,
        total: &mut Rational,
        memo: &mut HashMap<VertexKey, Rational>,
    ) -> Result<()> {
        if i == edges.len() {
            let mut prod = weight;
            for x in 0..genus.len() {
                let mut e = ends[x].clone();
                e.sort_unstable();
                let mut l = leaves[x].clone();
                l.sort_unstable();
                let f = self.vertex_factor(genus[x], &l, &e, memo)?;
                if f.is_zero() {
                    return Ok(());
                }
                prod *= f;
            }
            *total += prod;
            return Ok(());
        }
        let ((u, _), (w, _)) = edges[i];
        for (a, mu, b, nu, c) in &options[i] {
            room[u] -= *a as i64;
            room[w] -= *b as i64;
            if room[u] >= 0 && room[w] >= 0 {
                ends[u].push(Insertion::new(*a, *mu));
                ends[w].push(Insertion::new(*b, *nu));
                self.edge_dfs(
                    genus,
                    leaves,
                    edges,
                    options,
                    i + 1,
                    room,
                    ends,
                    &weight * c,
                    total,
                    memo,
                )?;
                ends[w].pop();
                ends[u].pop();
            }
            room[u] += *a as i64;
            room[w] += *b as i64;
        }
        Ok(())
    }

    /// `𝓒(Γ)` for a decorated graph whose leaves are ordinary, dilaton or
    /// expanded leaf terms and whose edge ends are bare or expanded. Returns
    /// the output monomial (`ħ^{g−1}` times the leaf variables) and its
    /// coefficient.
    pub fn contract_graph(&self, g: &DecoratedGraph) -> Result<(Monomial, Rational)> {
        let v = g.graph.vertex_count();
        let mut leaves = vec![Vec::new(); v];
        let mut vars = Vec::new();
        for (&x, l) in g.graph.leaves().iter().zip(&g.leaf_labels) {
            leaves[x].push(*l);
            match l {
                HalfEdge::Ordinary(var) | HalfEdge::Leaf { var, .. } => vars.push(*var),
                _ => {}
            }
        }
        let edges: Vec<_> = g
            .graph
            .edges()
            .iter()
            .zip(&g.edge_labels)
            .map(|(&(a, b), &(x, y))| ((a, x), (b, y)))
            .collect();
        let mono = Monomial::from_vars(g.graph.genus() as i32 - 1, vars);
        let c =
            self.contract_parts(g.graph.vertex_genus(), &leaves, &edges, &mut HashMap::new())?;
        Ok((mono, c))
    }

    fn shapes(&self, g: u32, k: u32, budget: u32) -> Arc<Vec<Shape>> {
        let key = (g, k, budget);
        if let Some(s) = self.shapes.lock().unwrap().get(&key) {
            return s.clone();
        }
        let s = Arc::new(build_shapes(
            g,
            k,
            budget,
            self.table.caps().max_genus,
            !self.dilaton.is_empty(),
            !self.edge_terms.is_empty(),
        ));
        self.shapes.lock().unwrap().insert(key, s.clone());
        s
    }

    fn coefficient_impl(
        &self,
        m: &Monomial,
        mut emit: Option<&mut BTreeMap<DecoratedGraph, Rational>>,
    ) -> Result<Rational> {
        let e = m.hbar_power();
        let delta = m.delta();
        if e < -1 || delta < 0 {
            return Ok(Rational::zero());
        }
        let g = (e + 1) as u32;
        let k = m.degree();
        let factors = m.factors();
        let mut memo = HashMap::new();
        let mut total = Rational::zero();
        for shape in self.shapes(g, k, delta as u32).iter() {
            for (dist, mult) in distributions(&shape.ordinary, &factors) {
                let v = shape.genus.len();
                let leaves: Vec<Vec<HalfEdge>> = (0..v)
                    .map(|x| {
                        let mut l: Vec<HalfEdge> = dist[x]
                            .iter()
                            .flat_map(|&(var, c)| {
                                std::iter::repeat(HalfEdge::Ordinary(var)).take(c as usize)
                            })
                            .collect();
                        l.extend(
                            std::iter::repeat(HalfEdge::Dilaton).take(shape.dilaton[x] as usize),
                        );
                        l
                    })
                    .collect();
                let edges: Vec<_> = shape
                    .edges
                    .iter()
                    .map(|&(a, b)| ((a, HalfEdge::Bare), (b, HalfEdge::Bare)))
                    .collect();
                let c = self.contract_parts(&shape.genus, &leaves, &edges, &mut memo)?;
                if c.is_zero() {
                    continue;
                }
                total += &c * mult / &shape.aut;
                if let Some(out) = emit.as_deref_mut() {
                    let d = DecoratedGraph::new(
                        shape.genus.clone(),
                        edges.clone(),
                        leaves
                            .iter()
                            .enumerate()
                            .flat_map(|(x, ls)| ls.iter().map(move |l| (x, *l)))
                            .collect(),
                    )?
                    .canonical();
                    out.entry(d).or_insert(c);
                }
            }
        }
        Ok(total)
    }

    /// Coefficient of `m` in `log(R̂ Z)`.
    pub fn coefficient(&self, m: &Monomial) -> Result<Rational> {
        self.coefficient_impl(m, None)
    }

    /// The contributing graphs for `m`, in canonical order; their
    /// `contribution / automorphisms` sum to [`coefficient`](Self::coefficient).
    pub fn terms(&self, m: &Monomial) -> Result<Vec<GraphTerm>> {
        let mut out = BTreeMap::new();
        self.coefficient_impl(m, Some(&mut out))?;
        Ok(out
            .into_iter()
            .map(|(graph, contribution)| GraphTerm {
                automorphisms: automorphism_order(&graph),
                graph,
                contribution,
            })
            .collect())
    }
}

fn fits(label: &HalfEdge, mu: u32, z: u32) -> bool {
    match *label {
        HalfEdge::End { mu: m, z: w } => m == mu && w == z,
        _ => true,
    }
}

fn build_shapes(
    g: u32,
    k: u32,
    budget: u32,
    max_vertex_genus: u32,
    dilaton: bool,
    with_edges: bool,
) -> Vec<Shape> {
    let mut out = Vec::new();
    let max_e = if with_edges { budget } else { 0 };
    for e in 0..=max_e as usize {
        for v in 1..=e + 1 {
            let b1 = (e + 1 - v) as u32;
            if b1 > g {
                continue;
            }
            let max_a = if dilaton { budget - e as u32 } else { 0 };
            for sk in skeletons(v, e).iter() {
                let mut deg = vec![0u32; v];
                let mut mult: BTreeMap<(usize, usize), u32> = BTreeMap::new();
                for &(a, b) in &sk.edges {
                    deg[a] += 1;
                    deg[b] += 1;
                    *mult.entry((a, b)).or_default() += 1;
                }
                let edge_factor: Rational = mult
                    .iter()
                    .map(|(&(a, b), &m)| {
                        let f = factorial_r(m);
                        if a == b {
                            f * Rational::from_integer(2.into()).pow(m as i32)
                        } else {
                            f
                        }
                    })
                    .product();
                for genus in compositions(g - b1, v, max_vertex_genus) {
                    for ordinary in compositions(k, v, k) {
                        for a_total in 0..=max_a {
                            for dil in compositions(a_total, v, a_total) {
                                let ok = (0..v).all(|x| {
                                    let m = (deg[x] + ordinary[x] + dil[x]) as i64;
                                    let gx = genus[x] as i64;
                                    2 * gx - 2 + m > 0 && 3 * gx - 3 + m >= 2 * dil[x] as i64
                                });
                                if !ok {
                                    continue;
                                }
                                let labels: Vec<(u32, u32, u32)> =
                                    (0..v).map(|x| (genus[x], ordinary[x], dil[x])).collect();
                                if !is_orbit_minimum(&labels, &sk.autos) {
                                    continue;
                                }
                                let stabilizer = sk
                                    .autos
                                    .iter()
                                    .filter(|p| (0..v).all(|x| labels[p[x]] == labels[x]))
                                    .count();
                                let leaf_factor: Rational = (0..v)
                                    .map(|x| factorial_r(ordinary[x]) * factorial_r(dil[x]))
                                    .product();
                                out.push(Shape {
                                    genus: genus.clone(),
                                    ordinary: ordinary.clone(),
                                    dilaton: dil.clone(),
                                    edges: sk.edges.clone(),
                                    aut: Rational::from_integer(stabilizer.into())
                                        * &edge_factor
                                        * leaf_factor,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Ways to split the variable multiset `factors` over vertices with the
/// given leaf counts, each with the number of leaf assignments realising
/// it, `Π_v k_v! / Π c!`.
#[allow(clippy::type_complexity)]
fn distributions(counts: &[u32], factors: &[(Var, u32)]) -> Vec<(Vec<Vec<(Var, u32)>>, Rational)> {
    fn rec(
        counts: &[u32],
        factors: &[(Var, u32)],
        remaining: &mut Vec<u32>,
        v: usize,
        cur: &mut Vec<Vec<(Var, u32)>>,
        out: &mut Vec<(Vec<Vec<(Var, u32)>>, Rational)>,
    ) {
        if v == counts.len() {
            if remaining.iter().all(|&r| r == 0) {
                let mult: Rational = cur
                    .iter()
                    .zip(counts)
                    .map(|(d, &k)| {
                        d.iter()
                            .fold(factorial_r(k), |acc, &(_, c)| acc / factorial_r(c))
                    })
                    .product();
                out.push((cur.clone(), mult));
            }
            return;
        }
        let mut pick = Vec::new();
        split(
            factors,
            remaining,
            0,
            counts[v],
            &mut pick,
            &mut |choice, rem| {
                cur.push(choice.to_vec());
                rec(counts, factors, rem, v + 1, cur, out);
                cur.pop();
            },
        );
    }
    fn split(
        factors: &[(Var, u32)],
        remaining: &mut Vec<u32>,
        i: usize,
        need: u32,
        pick: &mut Vec<(Var, u32)>,
        f: &mut dyn FnMut(&[(Var, u32)], &mut Vec<u32>),
    ) {
        if need == 0 {
            f(pick, remaining);
            return;
        }
        if i == factors.len() {
            return;
        }
        split(factors, remaining, i + 1, need, pick, f);
        for c in 1..=remaining[i].min(need) {
            remaining[i] -= c;
            pick.push((factors[i].0, c));
            split(factors, remaining, i + 1, need - c, pick, f);
            pick.pop();
            remaining[i] += c;
        }
    }
    let mut out = Vec::new();
    let mut remaining: Vec<u32> = factors.iter().map(|f| f.1).collect();
    rec(
        counts,
        factors,
        &mut remaining,
        0,
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Every tame stable monomial in the box `caps` in dimension `n`.
pub(crate) fn box_monomials(n: u32, caps: Caps) -> Vec<Monomial> {
    let caps = caps.boxed();
    let d = caps.degree_cap().max(0) as u32;
    let gmax = caps.genus_cap();
    let mut out = Vec::new();
    for g in 0..=gmax.max(-1) {
        let g = g as u32;
        for k in 0..=d {
            let budget = 3 * g as i64 - 3 + k as i64;
            if budget < 0 || 2 * g as i64 - 2 + k as i64 <= 0 {
                continue;
            }
            for ins in insertion_multisets(n, k as usize, budget as u32) {
                let m = Monomial::from_vars(g as i32 - 1, ins.iter().map(|i| i.var()));
                if caps.in_box(&m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// `log(R̂ Z)` on the box `caps` as a sum over graphs. Vertex genera above
/// the table's genus cap count as absent; lookups past its other caps are
/// reported as cap insufficiency.
pub fn graph_sum(table: &CorrelatorTable, r: &RMatrix, caps: Caps) -> Result<TruncatedSeries> {
    let caps = caps.boxed();
    let monos = box_monomials(table.dimension(), caps);
    let zcap = monos.iter().map(GraphContext::zcap_for).max().unwrap_or(0);
    let ctx = GraphContext::new(table, r, zcap)?;
    let coeffs: Vec<Rational> = monos
        .par_iter()
        .map(|m| ctx.coefficient(m))
        .collect::<Result<_>>()?;
    TruncatedSeries::from_terms(
        table.dimension(),
        caps,
        monos.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()),
    )
}

/// Coefficient of a single monomial of `log(R̂ Z)`.
pub fn graph_coefficient(table: &CorrelatorTable, r: &RMatrix, m: &Monomial) -> Result<Rational> {
    GraphContext::new(table, r, GraphContext::zcap_for(m))?.coefficient(m)
}

/// Contributing graph classes for a single monomial.
pub fn graph_terms(table: &CorrelatorTable, r: &RMatrix, m: &Monomial) -> Result<Vec<GraphTerm>> {
    GraphContext::new(table, r, GraphContext::zcap_for(m))?.terms(m)
}
