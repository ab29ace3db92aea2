//! Solver toolkit for the Maker-Breaker domination game.

pub mod decider;
pub mod factor;
pub mod generate;
pub mod graph;
pub mod interval;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod strategy;

pub use graph::{Graph, Vertex};
pub use interval::{FloatRep, IntegerRep, IntervalRep, NormalizedRep, RationalRep, Scalar};
pub use oracle::{Oracle, Outcome, Player};
