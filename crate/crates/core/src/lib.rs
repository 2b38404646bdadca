//! Graph-grammar self-assembly.
//!
//! * [`graph`]: labeled-graph rewriting and reachable-set exploration.
//! * [`gds`]: embedding into distributed systems with causal history.
//! * [`tam`]: tile assembly at temperature 2 and its graph-grammar translation.
//! * [`sim`]: processor networks and their lattice simulation.
//! * [`mis`]: synchronizer, maximal independent set and surface cost.

pub mod canon;
pub mod gds;
pub mod graph;
pub mod mis;
pub mod rng;
pub mod sim;
pub mod tam;
pub mod text;
