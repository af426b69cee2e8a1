//! Hypergraph-product codes over expander graphs, their classical and quantum
//! substructure, and numerical checks of the circuit-depth lower bounds for
//! low-energy states of those codes.

pub mod classical;
pub mod css;
pub mod expansion;
pub mod gf2;
pub mod graphs;
pub mod hgp;
pub mod pipeline;
pub mod states;
