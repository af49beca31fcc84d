//! Likedness centrality on social graphs.
//!
//! Given an undirected graph and a matrix of like-rates on its edges, this
//! crate solves for likedness centrality, derives neighbor desirability,
//! checks both against the random walk on the graph, and runs seeded Monte
//! Carlo ensembles over exponential like-rates on Barabási–Albert graphs.
//!
//! ```
//! use likedness::graph::Graph;
//! use likedness::likedness::{normalize_unique, solve, RateMatrix, SolverConfig};
//! use likedness::markov::stationary_closed_form;
//!
//! let g = Graph::complete(2);
//! let rates = RateMatrix::new(&g, [(0, 1, 3.0), (1, 0, 5.0)]).unwrap();
//! let raw = solve(&g, &rates, &SolverConfig::default()).unwrap();
//! let p = stationary_closed_form(&g).unwrap();
//! let unique = normalize_unique(&raw.likedness, &p).unwrap();
//! assert!((unique[0] - 0.75).abs() < 1e-12);
//! ```

pub mod centrality;
pub mod cli;
pub mod desirability;
pub mod error;
pub mod fitting;
pub mod graph;
pub mod likedness;
pub mod markov;
pub mod numeric;
pub mod simulation;

pub use error::{Error, Result};
