//! Coverage-biased random exploration of finite-automaton models.
//!
//! The pipeline: count and uniformly sample bounded successful paths
//! ([`count`], [`path`]), estimate how often paths visiting one state also
//! visit another ([`alpha`]), solve the max-min coverage linear program
//! ([`lp`]) and compare path-generation strategies by the number of paths
//! needed to reach a state-coverage target ([`strategy`], [`harness`]).

pub mod alpha;
pub mod automaton;
pub mod count;
pub mod error;
pub mod generate;
pub mod harness;
pub mod lp;
pub mod path;
pub mod rng;
pub mod strategy;

pub use automaton::{must_visit, parse_automaton, Automaton, ProductTag, StateId, Transition};
pub use count::{num_paths, PathCountTable};
pub use error::{Error, Result};
pub use path::{random_walk, sample_uniform, sample_visiting, Path};
pub use rng::{RngHandle, DEFAULT_SEED};
pub use strategy::{PathGenerator, PathStrategy, StrategyRegistry};
