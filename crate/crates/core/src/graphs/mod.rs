//! Feynman-graph form of the action: enumeration, automorphisms,
//! decorations and contraction.

mod decor;
mod graph;
mod sum;

pub use decor::{dilaton_leaf_vector, edge_bivector, leaf_vector, VectorSeries};
pub use graph::{
    automorphism_order, decorations, enumerate_graphs, DecoratedGraph, Graph, GraphCaps, HalfEdge,
};
pub use sum::{graph_coefficient, graph_sum, graph_terms, GraphContext, GraphTerm};
