//! Correlator tables, the primary Frobenius potential, genus-zero
//! reconstruction and the dilaton equation.
//!
//! Conventions shared by every module: the metric is anti-diagonal,
//! `η_{αβ} = δ_{α+β,n+1}`, it is its own inverse, and `e₁` is the unit.

mod potential;
mod table;
mod trr;

pub use potential::{eta_part, FrobeniusPotential};
pub use table::{
    dilaton_reduce, dual, eta, partition_function_to_table, table_to_partition_function,
    vertex_tensor, vertex_tensor_all, CorrelatorTable, Insertion, TableCaps,
};
pub use trr::{
    check_dilaton, check_trr, insertion_multisets, reconstruct_descendants, trr_rhs, Violation,
};
