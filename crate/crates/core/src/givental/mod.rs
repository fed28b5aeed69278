//! The Givental action in differential-operator form.

mod factorize;
mod operator;
mod rmatrix;

pub use factorize::{apply_factorized, edge_kernel, factorize, FactorizedAction};
pub use operator::{
    apply_infinitesimal, exponentiate_action, required_table_caps, transform_table, working_caps,
};
pub use rmatrix::RMatrix;
