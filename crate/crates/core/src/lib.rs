//! Exact solver and Price of Fairness harness for the fair subset sum
//! problem: agents share a knapsack of integer capacity `c`, and a
//! fairness criterion (maximin, Kalai-Smorodinski or proportional
//! fairness) picks among the Pareto-efficient allocations.
//!
//! [`frontier`] enumerates the Pareto frontier of two-agent instances with
//! pseudopolynomial dynamic programs; [`fairness`] selects fair solutions;
//! [`pof`] measures their loss against the system optimum and evaluates
//! the closed-form bounds; [`oracle`] enumerates small instances by brute
//! force for any agent count.

pub mod cli;
pub mod error;
pub mod fairness;
pub mod frontier;
pub mod instance;
pub mod oracle;
pub mod pof;
pub mod rational;

pub use error::{Error, Result};
pub use fairness::{analyze, FairnessReport};
pub use frontier::{pareto, Allocation, ParetoFrontier, UtilityVector};
pub use instance::{alpha_of, emit_instance, gen_family, gen_random, parse_instance, Instance, Kind};
pub use pof::{pof_of, Criterion, PofRecord};
pub use rational::Rational;
