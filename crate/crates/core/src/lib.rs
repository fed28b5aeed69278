#![allow(clippy::type_complexity)]

pub mod cohft;
pub mod error;
pub mod givental;
pub mod graphs;
pub mod hierarchy;
pub mod inversion;
pub mod io;
pub mod matrix;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
