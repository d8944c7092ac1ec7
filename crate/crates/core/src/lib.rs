//! Exact-arithmetic branch-and-cut with Chvátal-Gomory cuts and tools for
//! studying and learning cut configurations.

pub mod cli;
pub mod cuts;
pub mod error;
pub mod geometry;
pub mod ip;
pub mod learn;
pub mod lp;
pub mod rational;
pub mod search;

pub use cuts::{cg_cut, generate_cuts, sequential_cuts, wave_cuts, Cut, CutParameters};
pub use error::{Error, Result};
pub use ip::{jeroslow, random_packing, IntegerProgram};
pub use rational::Rational;
pub use search::{run_branch_and_cut, CutConfig, ScoringWeights, SearchResult};
