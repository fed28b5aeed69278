use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::series::Var;

/// A connected graph with genus-labelled vertices, internal edges (loops and
/// multi-edges allowed) and leaves. Stored normalised: edges as `(u, v)` with
/// `u ≤ v`, sorted; leaves as their owning vertex, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    genus: Vec<u32>,
    edges: Vec<(usize, usize)>,
    leaves: Vec<usize>,
}

/// Limits for [`enumerate_graphs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphCaps {
    pub max_leaves: u32,
    pub max_vertices: u32,
    pub max_edges: u32,
    pub max_genus: u32,
    /// Bound on the `z`-power of any half-edge decoration; unused by the
    /// bare enumeration.
    pub max_z: u32,
}

impl Graph {
    pub fn new(genus: Vec<u32>, edges: Vec<(usize, usize)>, leaves: Vec<usize>) -> Result<Self> {
        let v = genus.len();
        if v == 0 {
            return Err(Error::InvalidArgument("graph needs a vertex".into()));
        }
        if edges.iter().any(|&(a, b)| a >= v || b >= v) || leaves.iter().any(|&l| l >= v) {
            return Err(Error::InvalidArgument("vertex index out of range".into()));
        }
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        let mut leaves = leaves;
        leaves.sort_unstable();
        let g = Graph {
            genus,
            edges,
            leaves,
        };
        if !g.is_connected() {
            return Err(Error::InvalidArgument("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.genus.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn vertex_genus(&self) -> &[u32] {
        &self.genus
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.genus.len()
    }

    /// `b₁ + Σ g_v`.
    pub fn genus(&self) -> u32 {
        self.betti() as u32 + self.genus.iter().sum::<u32>()
    }

    pub fn valence(&self, v: usize) -> usize {
        let e: usize = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum();
        e + self.leaves.iter().filter(|&&l| l == v).count()
    }

    pub fn leaves_at(&self, v: usize) -> usize {
        self.leaves.iter().filter(|&&l| l == v).count()
    }

    pub fn is_connected(&self) -> bool {
        connected(self.genus.len(), &self.edges)
    }

    /// Every vertex has `2g_v − 2 + valence > 0`.
    pub fn is_stable(&self) -> bool {
        (0..self.vertex_count()).all(|v| 2 * self.genus[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    fn relabel(&self, perm: &[usize]) -> Graph {
        let mut genus = vec![0; self.genus.len()];
        for (v, &g) in self.genus.iter().enumerate() {
            genus[perm[v]] = g;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let mut leaves: Vec<usize> = self.leaves.iter().map(|&l| perm[l]).collect();
        leaves.sort_unstable();
        Graph {
            genus,
            edges,
            leaves,
        }
    }

    /// Lexicographically smallest relabelling; equal iff isomorphic.
    pub fn canonical(&self) -> Graph {
        (0..self.vertex_count())
            .permutations(self.vertex_count())
            .map(|p| self.relabel(&p))
            .min()
            .expect("at least one vertex")
    }

    /// `|Aut|` of the bare graph: vertex, edge, edge-flip and leaf symmetries.
    pub fn automorphism_order(&self) -> u64 {
        automorphism_order(&DecoratedGraph::bare(self.clone()))
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts = (0..self.vertex_count())
            .map(|v| format!("v{v}(g={},leaves={})", self.genus[v], self.leaves_at(v)))
            .join(" ");
        let edges = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).join(" ");
        write!(f, "{verts} | {edges}")
    }
}

fn connected(v: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Decoration of a half-edge (leaf or edge end).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfEdge {
    /// Undecorated.
    Bare,
    /// Ordinary leaf carrying `𝓛`, before expansion, for one variable.
    Ordinary(Var),
    /// Dilaton leaf carrying `𝓛₀`, before expansion.
    Dilaton,
    /// One term `e_μ z^z` of `𝓛` coming from variable `var`.
    Leaf { var: Var, mu: u32, z: u32 },
    /// One term `e_μ z^z` of `𝓛₀`.
    DilatonTerm { mu: u32, z: u32 },
    /// One end `e_μ z^z` of an edge term.
    End { mu: u32, z: u32 },
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfEdge::Bare => write!(f, "*"),
            HalfEdge::Ordinary(v) => write!(f, "L({v})"),
            HalfEdge::Dilaton => write!(f, "L0"),
            HalfEdge::Leaf { var, mu, z } => write!(f, "{var}:e{mu}z^{z}"),
            HalfEdge::DilatonTerm { mu, z } => write!(f, "L0:e{mu}z^{z}"),
            HalfEdge::End { mu, z } => write!(f, "e{mu}z^{z}"),
        }
    }
}

/// A graph with a decoration on every half-edge. `edge_labels[i]` holds the
/// labels at the two ends of `graph.edges()[i]`, in that order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedGraph {
    pub graph: Graph,
    pub leaf_labels: Vec<HalfEdge>,
    pub edge_labels: Vec<(HalfEdge, HalfEdge)>,
}

type EdgeKey = (usize, HalfEdge, usize, HalfEdge);

fn edge_key(a: usize, x: HalfEdge, b: usize, y: HalfEdge) -> EdgeKey {
    if (a, x) <= (b, y) {
        (a, x, b, y)
    } else {
        (b, y, a, x)
    }
}

impl DecoratedGraph {
    pub fn bare(graph: Graph) -> Self {
        let leaf_labels = vec![HalfEdge::Bare; graph.leaf_count()];
        let edge_labels = vec![(HalfEdge::Bare, HalfEdge::Bare); graph.edge_count()];
        DecoratedGraph {
            graph,
            leaf_labels,
            edge_labels,
        }
    }

    /// Build from unsorted parts; leaf and edge labels travel with their
    /// leaves and edges through normalisation.
    pub fn new(
        genus: Vec<u32>,
        edges: Vec<((usize, HalfEdge), (usize, HalfEdge))>,
        leaves: Vec<(usize, HalfEdge)>,
    ) -> Result<Self> {
        let mut es: Vec<EdgeKey> = edges
            .into_iter()
            .map(|((a, x), (b, y))| edge_key(a, x, b, y))
            .collect();
        es.sort();
        let mut ls = leaves;
        ls.sort();
        let graph = Graph::new(
            genus,
            es.iter().map(|e| (e.0, e.2)).collect(),
            ls.iter().map(|l| l.0).collect(),
        )?;
        Ok(DecoratedGraph {
            graph,
            leaf_labels: ls.iter().map(|l| l.1).collect(),
            edge_labels: es.iter().map(|e| (e.1, e.3)).collect(),
        })
    }

    fn parts(&self) -> (Vec<EdgeKey>, Vec<(usize, HalfEdge)>) {
        let es = self
            .graph
            .edges
            .iter()
            .zip(&self.edge_labels)
            .map(|(&(a, b), &(x, y))| edge_key(a, x, b, y))
            .collect();
        let ls = self
            .graph
            .leaves
            .iter()
            .zip(&self.leaf_labels)
            .map(|(&v, &l)| (v, l))
            .collect();
        (es, ls)
    }

    fn relabel(&self, perm: &[usize]) -> DecoratedGraph {
        let (es, ls) = self.parts();
        let mut genus = vec![0; self.graph.genus.len()];
        for (v, &g) in self.graph.genus.iter().enumerate() {
            genus[perm[v]] = g;
        }
        let mut es: Vec<EdgeKey> = es
            .into_iter()
            .map(|(a, x, b, y)| edge_key(perm[a], x, perm[b], y))
            .collect();
        es.sort();
        let mut ls: Vec<(usize, HalfEdge)> = ls.into_iter().map(|(v, l)| (perm[v], l)).collect();
        ls.sort();
        DecoratedGraph {
            graph: Graph {
                genus,
                edges: es.iter().map(|e| (e.0, e.2)).collect(),
                leaves: ls.iter().map(|l| l.0).collect(),
            },
            leaf_labels: ls.iter().map(|l| l.1).collect(),
            edge_labels: es.iter().map(|e| (e.1, e.3)).collect(),
        }
    }

    /// Smallest relabelling; equal iff isomorphic as decorated graphs.
    pub fn canonical(&self) -> DecoratedGraph {
        let v = self.graph.vertex_count();
        (0..v)
            .permutations(v)
            .map(|p| self.relabel(&p))
            .min()
            .expect("at least one vertex")
    }
}

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (es, ls) = self.parts();
        let verts = (0..self.graph.vertex_count())
            .map(|v| {
                let leaves = ls
                    .iter()
                    .filter(|l| l.0 == v)
                    .map(|l| l.1.to_string())
                    .join(",");
                format!("v{v}[g={}; {leaves}]", self.graph.genus[v])
            })
            .join(" ");
        let edges = es
            .iter()
            .map(|(a, x, b, y)| format!("{a}:{x}--{b}:{y}"))
            .join(" ");
        if edges.is_empty() {
            write!(f, "{verts}")
        } else {
            write!(f, "{verts} | {edges}")
        }
    }
}

fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn multiplicity_factor<T: Ord>(items: impl IntoIterator<Item = T>) -> u64 {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for i in items {
        *counts.entry(i).or_default() += 1;
    }
    counts.values().map(|&c| factorial_u64(c)).product()
}

/// Order of the decoration-preserving automorphism group: vertex
/// permutations (exhaustive, pruned by genus and leaf labels), then
/// bijections between parallel equally-decorated edges, flips of
/// equally-decorated loops, and permutations of equally-decorated leaves.
pub fn automorphism_order(g: &DecoratedGraph) -> u64 {
    let (es, ls) = g.parts();
    let v = g.graph.vertex_count();
    let leaf_sets: Vec<Vec<HalfEdge>> = (0..v)
        .map(|x| {
            let mut s: Vec<HalfEdge> = ls.iter().filter(|l| l.0 == x).map(|l| l.1).collect();
            s.sort();
            s
        })
        .collect();
    let mut edge_ms = es.clone();
    edge_ms.sort();
    let fixed: u64 = {
        let leaf_part: u64 = leaf_sets
            .iter()
            .map(|s| multiplicity_factor(s.iter()))
            .product();
        let edge_part = multiplicity_factor(es.iter());
        let flips: u32 = es.iter().filter(|e| e.0 == e.2 && e.1 == e.3).count() as u32;
        leaf_part * edge_part * 2u64.pow(flips)
    };
    let mut count = 0u64;
    for perm in (0..v).permutations(v) {
        if (0..v).any(|x| {
            g.graph.genus[perm[x]] != g.graph.genus[x] || leaf_sets[perm[x]] != leaf_sets[x]
        }) {
            continue;
        }
        let mut image: Vec<EdgeKey> = es
            .iter()
            .map(|&(a, x, b, y)| edge_key(perm[a], x, perm[b], y))
            .collect();
        image.sort();
        if image == edge_ms {
            count += 1;
        }
    }
    count * fixed
}

/// A connected multigraph on `vertices` vertices with its vertex
/// automorphisms (permutations preserving the edge multiset).
#[derive(Clone, Debug)]
pub(crate) struct Skeleton {
    pub edges: Vec<(usize, usize)>,
    pub autos: Vec<Vec<usize>>,
}

fn relabel_edges(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

fn canonical_edges(v: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    (0..v)
        .permutations(v)
        .map(|p| relabel_edges(edges, &p))
        .min()
        .unwrap_or_default()
}

type SkeletonCache = Mutex<HashMap<(usize, usize), Arc<Vec<Skeleton>>>>;

fn skeleton_cache() -> &'static SkeletonCache {
    static CACHE: OnceLock<SkeletonCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All connected multigraphs with `v` vertices and `e` edges, one per
/// isomorphism class. Every such graph arises from a smaller one by adding
/// an edge (if it has a cycle) or a pendant vertex (if it is a tree).
pub(crate) fn skeletons(v: usize, e: usize) -> Arc<Vec<Skeleton>> {
    if let Some(s) = skeleton_cache().lock().unwrap().get(&(v, e)) {
        return s.clone();
    }
    let mut found: HashSet<Vec<(usize, usize)>> = HashSet::new();
    if v == 0 || e + 1 < v {
        // none
    } else if e == 0 {
        if v == 1 {
            found.insert(Vec::new());
        }
    } else {
        for s in skeletons(v, e - 1).iter() {
            for a in 0..v {
                for b in a..v {
                    let mut es = s.edges.clone();
                    es.push((a, b));
                    found.insert(canonical_edges(v, &es));
                }
            }
        }
        if v >= 2 {
            for s in skeletons(v - 1, e - 1).iter() {
                for a in 0..v - 1 {
                    let mut es = s.edges.clone();
                    es.push((a, v - 1));
                    found.insert(canonical_edges(v, &es));
                }
            }
        }
    }
    let mut list: Vec<Vec<(usize, usize)>> = found.into_iter().collect();
    list.sort();
    let out: Vec<Skeleton> = list
        .into_iter()
        .map(|edges| {
            let autos = (0..v)
                .permutations(v)
                .filter(|p| relabel_edges(&edges, p) == edges)
                .collect();
            Skeleton { edges, autos }
        })
        .collect();
    let out = Arc::new(out);
    skeleton_cache().lock().unwrap().insert((v, e), out.clone());
    out
}

/// All compositions of `total` into `parts` parts bounded by `max`.
pub(crate) fn compositions(total: u32, parts: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=total.min(max) {
            cur.push(x);
            rec(total - x, parts - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, max, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Whether `labels` is the smallest in its orbit under `autos`.
pub(crate) fn is_orbit_minimum<T: Ord + Clone>(labels: &[T], autos: &[Vec<usize>]) -> bool {
    autos.iter().all(|p| {
        let mut img = labels.to_vec();
        for (v, l) in labels.iter().enumerate() {
            img[p[v]] = l.clone();
        }
        img.as_slice() >= labels
    })
}

/// Every connected graph within `caps` (vertex genus labels included), one
/// per isomorphism class, in canonical order. Unstable graphs are kept; they
/// contract to zero.
pub fn enumerate_graphs(caps: &GraphCaps) -> Vec<Graph> {
    let mut out = Vec::new();
    for e in 0..=caps.max_edges as usize {
        for v in 1..=(caps.max_vertices as usize).min(e + 1) {
            let b1 = (e + 1 - v) as u32;
            if b1 > caps.max_genus {
                continue;
            }
            for sk in skeletons(v, e).iter() {
                for gsum in 0..=caps.max_genus - b1 {
                    for genus in compositions(gsum, v, gsum) {
                        for l in 0..=caps.max_leaves {
                            for leaves in compositions(l, v, l) {
                                let labels: Vec<(u32, u32)> =
                                    genus.iter().copied().zip(leaves.iter().copied()).collect();
                                if !is_orbit_minimum(&labels, &sk.autos) {
                                    continue;
                                }
                                let leaf_list = leaves
                                    .iter()
                                    .enumerate()
                                    .flat_map(|(x, &c)| std::iter::repeat(x).take(c as usize))
                                    .collect();
                                out.push(Graph {
                                    genus: genus.clone(),
                                    edges: sk.edges.clone(),
                                    leaves: leaf_list,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by_cached_key(|g| g.canonical());
    out
}

/// All decorations of `graph` with leaf labels from `leaf_options` and
/// edge-end labels from `end_options`, one per isomorphism class of
/// decorated graph, in canonical order.
pub fn decorations(
    graph: &Graph,
    leaf_options: &[HalfEdge],
    end_options: &[HalfEdge],
) -> Vec<DecoratedGraph> {
    let nl = graph.leaf_count();
    let ne = graph.edge_count();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let leaf_choices = (0..nl)
        .map(|_| leaf_options.iter().copied())
        .multi_cartesian_product();
    let leaf_choices: Vec<Vec<HalfEdge>> = if nl == 0 {
        vec![vec![]]
    } else {
        leaf_choices.collect()
    };
    let end_choices: Vec<Vec<HalfEdge>> = if ne == 0 {
        vec![vec![]]
    } else {
        (0..2 * ne)
            .map(|_| end_options.iter().copied())
            .multi_cartesian_product()
            .collect()
    };
    for ls in &leaf_choices {
        for es in &end_choices {
            let d = DecoratedGraph::new(
                graph.genus.clone(),
                graph
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| ((a, es[2 * i]), (b, es[2 * i + 1])))
                    .collect(),
                graph.leaves.iter().zip(ls).map(|(&v, &l)| (v, l)).collect(),
            )
            .expect("relabelled graph stays valid");
            let c = d.canonical();
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}
