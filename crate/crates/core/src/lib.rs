//! Lower-bound instance families for the multi-profit knapsack problem with
//! groups, exact Pareto-set enumeration over them, and a seeded Monte Carlo
//! harness that measures Pareto-set sizes.
//!
//! The usual pipeline is plan → build → sample → count:
//!
//! ```
//! use knapsack_pareto::{construction, engine, sampler, Rational};
//!
//! let plan = construction::plan_bicriteria(10, &Rational::from(3)).unwrap();
//! let instance = construction::build(&plan).unwrap();
//! let realized = sampler::sample_instance(&instance, sampler::SampleSeed::new(7, 0)).unwrap();
//! let front = engine::merge_pareto(&realized).unwrap();
//! assert!(front.count() >= 2);
//! ```

pub mod cli;
pub mod construction;
pub mod engine;
pub mod error;
pub mod harness;
pub mod model;
pub mod rational;
pub mod sampler;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
