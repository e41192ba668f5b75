//! Generalized algebraic connectivity of weighted digraphs.

pub mod builtin;
pub mod central;
pub mod dist;
pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod netsim;
pub mod spectral;
pub mod trace;
