//! An executable model of a leader-based map-merge protocol for teams of
//! agents, with an explicit-state checker for it.
//!
//! Each agent starts as the leader of its own map. When an agent identifies
//! another, it asks its leader to merge; the leader looks up the other
//! agent's leader, proceeds only if it has priority (lower index), asks the
//! other leader to confirm, merges, and finally tells every agent in the
//! combined group who their leader is now.
//!
//! - [`protocol`]: identities, events, and the AGENT / MAP_LEADER step functions.
//! - [`world`]: global configurations under rendezvous semantics.
//! - [`explorer`]: state-space exploration, trace checks, deadlock,
//!   divergence and inevitability analyses, DOT/JSON export.
//! - [`scenarios`]: the built-in validation traces.
//! - [`coordmap`]: grid maps and the offset algebra used to merge them.
//! - [`cli`]: the command implementations behind the `mapmerge` binary.
//!
//! ```
//! use mapmerge::explorer::{explore, find_deadlocks, ExploreOptions};
//! use mapmerge::Model;
//!
//! let model = Model::with_agents(2)?;
//! let graph = explore(&model, &model.initial_config(), &ExploreOptions::default());
//! assert!(graph.complete && graph.violations.is_empty());
//! assert!(find_deadlocks(&graph).is_empty());
//! # Ok::<(), mapmerge::ModelError>(())
//! ```

pub mod cli;
pub mod coordmap;
pub mod error;
pub mod explorer;
pub mod protocol;
pub mod scenarios;
pub mod world;

pub use error::{ModelError, Result};
pub use protocol::{AgentId, AgentSet, EventLabel};
pub use world::{Configuration, Model, ModelOptions};
