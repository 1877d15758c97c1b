//! Agent identities, the event alphabet and the per-process transition
//! relations. Everything here is a pure function of its inputs.

mod agent;
mod event;
mod ids;
mod leader;

pub use agent::{agent_step, AgentProcState};
pub use event::{participants, EventKind, EventLabel, ProcessRef};
pub use ids::{priority, AgentId, AgentSet, MAX_AGENTS};
pub use leader::{leader_step, LeaderPhase, LeaderProcState};

/// Guards that can be switched off to check that the test suite notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Mutations {
    /// Leaders go on to confirm a merge with a leader that outranks them.
    pub skip_priority_guard: bool,
    /// Demoted leaders confirm merges as if they were still leaders.
    pub skip_active_guard: bool,
}

/// Model-wide parameters every step function sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepContext {
    pub universe: AgentSet,
    /// Enables the `done`/`terminate` completion check.
    pub harness: bool,
    /// Largest `merge_set` an agent may send.
    pub merge_set_max: usize,
    pub mutations: Mutations,
}

impl StepContext {
    pub fn new(universe: AgentSet) -> Self {
        StepContext { universe, harness: true, merge_set_max: 1, mutations: Mutations::default() }
    }
}
