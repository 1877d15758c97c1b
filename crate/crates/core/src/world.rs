//! Global configurations and the rendezvous transition relation.
//!
//! A [`Model`] fixes the agent universe and the step parameters; a
//! [`Configuration`] is one global state (every agent and every leader
//! process). An event fires only when every process it involves can take it,
//! and then all of them move together.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::protocol::{
    agent_step, leader_step, participants, AgentId, AgentProcState, AgentSet, EventLabel, LeaderPhase, LeaderProcState,
    Mutations, ProcessRef, StepContext, MAX_AGENTS,
};

/// Smallest universe for which the protocol is meaningful.
pub const MIN_AGENTS: usize = 2;

/// Knobs that change the model, not the exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelOptions {
    pub harness: bool,
    pub merge_set_max: usize,
    pub mutations: Mutations,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { harness: true, merge_set_max: 1, mutations: Mutations::default() }
    }
}

/// One global state. Process states are stored by agent index, so equality
/// and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    pub agents: Vec<AgentProcState>,
    pub leaders: Vec<LeaderProcState>,
}

impl Configuration {
    /// Every agent leads its own singleton map.
    pub fn initial(n: usize) -> Result<Self> {
        check_agent_count(n)?;
        let ids: Vec<AgentId> = (1..=n).map(|i| AgentId::new(i).unwrap()).collect();
        Ok(Configuration {
            agents: ids.iter().copied().map(AgentProcState::initial).collect(),
            leaders: ids.iter().copied().map(LeaderProcState::initial).collect(),
        })
    }

    pub fn universe(&self) -> AgentSet {
        AgentSet::first_n(self.agents.len())
    }

    pub fn agent(&self, id: AgentId) -> &AgentProcState {
        &self.agents[id.index() - 1]
    }

    pub fn leader(&self, id: AgentId) -> &LeaderProcState {
        &self.leaders[id.index() - 1]
    }

    pub fn active_leaders(&self) -> impl Iterator<Item = &LeaderProcState> {
        self.leaders.iter().filter(|l| l.active)
    }

    /// Nothing in flight: every leader idle and no agent waiting on a request.
    pub fn is_quiescent(&self) -> bool {
        self.leaders.iter().all(|l| l.phase.is_idle()) && self.agents.iter().all(|a| !a.has_outstanding_request)
    }

    /// Describes how the quiescent partition property fails, if it does:
    /// active leaders' sets must be disjoint and cover the universe, and each
    /// agent must believe in an active leader that coordinates it.
    pub fn partition_violation(&self) -> Option<String> {
        let mut covered = AgentSet::EMPTY;
        for l in self.active_leaders() {
            if !covered.is_disjoint(l.agent_set) {
                return Some(format!("{} overlaps another active leader's set", l.id));
            }
            covered = covered.union(l.agent_set);
        }
        if covered != self.universe() {
            return Some(format!("active leaders cover {covered}, not {}", self.universe()));
        }
        for a in &self.agents {
            let l = self.leader(a.believed_leader);
            if !l.active || !l.agent_set.contains(a.id) {
                return Some(format!("{} believes in {}, which does not coordinate it", a.id, l.id));
            }
            if a.known_group != l.agent_set {
                return Some(format!("{} knows group {}, its leader has {}", a.id, a.known_group, l.agent_set));
            }
        }
        None
    }

    /// One line per active leader group, e.g. `A1:{A1,A2} A3:{A3}`.
    pub fn partition_label(&self) -> String {
        self.active_leaders().map(|l| format!("{}:{}", l.id, l.agent_set)).collect::<Vec<_>>().join(" ")
    }
}

fn check_agent_count(n: usize) -> Result<()> {
    if !(MIN_AGENTS..=MAX_AGENTS).contains(&n) {
        return Err(ModelError::Config(format!("agent count must be between {MIN_AGENTS} and {MAX_AGENTS}, got {n}")));
    }
    Ok(())
}

/// Fixed universe plus options; the transition relation lives here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Model {
    ctx: StepContext,
}

impl Model {
    pub fn new(n: usize, options: ModelOptions) -> Result<Self> {
        check_agent_count(n)?;
        if options.merge_set_max == 0 {
            return Err(ModelError::Config("merge set size must be at least 1".into()));
        }
        Ok(Model {
            ctx: StepContext {
                universe: AgentSet::first_n(n),
                harness: options.harness,
                merge_set_max: options.merge_set_max.min(n - 1),
                mutations: options.mutations,
            },
        })
    }

    /// `n` agents, default options.
    pub fn with_agents(n: usize) -> Result<Self> {
        Model::new(n, ModelOptions::default())
    }

    pub fn context(&self) -> &StepContext {
        &self.ctx
    }

    pub fn agent_count(&self) -> usize {
        self.ctx.universe.len()
    }

    pub fn universe(&self) -> AgentSet {
        self.ctx.universe
    }

    pub fn harness(&self) -> bool {
        self.ctx.harness
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration::initial(self.agent_count()).expect("model agent count already checked")
    }

    /// Every label some participant offers, whether or not the others agree.
    fn candidates(&self, c: &Configuration) -> BTreeSet<EventLabel> {
        let mut out = BTreeSet::new();
        for a in &c.agents {
            out.extend(a.offers(&self.ctx));
        }
        for l in &c.leaders {
            out.extend(l.offers(&self.ctx));
        }
        out
    }

    fn resolve(&self, c: &Configuration, e: &EventLabel) -> Result<Vec<ProcessRef>> {
        let mut procs: Vec<ProcessRef> = participants(e, self.ctx.universe)?
            .into_iter()
            .map(|p| match p {
                ProcessRef::LeaderOf(a) => ProcessRef::Leader(c.agent(a).believed_leader),
                other => other,
            })
            .collect();
        procs.sort();
        procs.dedup();
        Ok(procs)
    }

    /// Fires `e` if every participant accepts it; otherwise names the first
    /// participant that refuses.
    fn fire(&self, c: &Configuration, e: &EventLabel) -> Result<std::result::Result<Configuration, ProcessRef>> {
        let procs = self.resolve(c, e)?;
        let mut next = c.clone();
        for p in procs {
            match p {
                ProcessRef::Agent(a) => match agent_step(c.agent(a), e, &self.ctx) {
                    Some(s) => next.agents[a.index() - 1] = s,
                    None => return Ok(Err(p)),
                },
                ProcessRef::Leader(l) => match leader_step(c.leader(l), e, &self.ctx) {
                    Some(s) => next.leaders[l.index() - 1] = s,
                    None => return Ok(Err(p)),
                },
                ProcessRef::LeaderOf(_) => unreachable!("resolved above"),
            }
        }
        Ok(Ok(next))
    }

    /// Enabled events in canonical order.
    pub fn enabled_events(&self, c: &Configuration) -> Vec<EventLabel> {
        self.successors(c).into_iter().map(|(e, _)| e).collect()
    }

    /// `(event, successor)` pairs in canonical event order.
    pub fn successors(&self, c: &Configuration) -> Vec<(EventLabel, Configuration)> {
        self.candidates(c)
            .into_iter()
            .filter_map(|e| match self.fire(c, &e) {
                Ok(Ok(next)) => Some((e, next)),
                _ => None,
            })
            .collect()
    }

    /// Takes `e` from `c`, returning a fresh configuration.
    pub fn apply_event(&self, c: &Configuration, e: &EventLabel) -> Result<Configuration> {
        self.fire(c, e)?.map_err(|blocker| ModelError::Refused { event: e.to_string(), blocker: blocker.to_string() })
    }

    /// Every merge is over: with the harness, the full-universe leader has
    /// terminated; without it, the configuration is quiescent with a single
    /// active leader that coordinates everyone.
    pub fn is_terminal(&self, c: &Configuration) -> bool {
        let universe = self.ctx.universe;
        let mut active = c.active_leaders();
        let (Some(winner), None) = (active.next(), active.next()) else {
            return false;
        };
        if winner.agent_set != universe {
            return false;
        }
        if self.ctx.harness {
            winner.phase == LeaderPhase::Terminated
        } else {
            c.is_quiescent()
        }
    }

    /// Some leader coordinates the whole universe.
    pub fn goal_reached(&self, c: &Configuration) -> bool {
        c.active_leaders().any(|l| l.agent_set == self.ctx.universe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents;

    fn a(i: usize) -> AgentId {
        AgentId::new(i).unwrap()
    }

    #[test]
    fn initial_configs() {
        for n in [2, 3, 4] {
            let c = Configuration::initial(n).unwrap();
            assert_eq!(c.agents.len(), n);
            for (i, l) in c.leaders.iter().enumerate() {
                assert!(l.active);
                assert_eq!(l.agent_set, AgentSet::singleton(a(i + 1)));
                assert_eq!(c.agents[i].believed_leader, a(i + 1));
            }
            assert!(c.is_quiescent());
            assert!(c.partition_violation().is_none());
        }
        assert!(matches!(Configuration::initial(1), Err(ModelError::Config(_))));
        assert!(Configuration::initial(MAX_AGENTS + 1).is_err());
    }

    #[test]
    fn initial_enabled_events_are_requests() {
        let m = Model::with_agents(3).unwrap();
        let events = m.enabled_events(&m.initial_config());
        // Each agent may ask its own leader about either of the other two.
        assert_eq!(events.len(), 6);
        assert!(events.contains(&EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: agents![2] }));
        assert!(events.iter().all(|e| !matches!(e, EventLabel::ConfirmMerge { .. })));
        assert!(!m.is_terminal(&m.initial_config()));
    }

    #[test]
    fn apply_is_pure_and_checks_enablement() {
        let m = Model::with_agents(3).unwrap();
        let c0 = m.initial_config();
        let e = EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: agents![2] };
        let c1 = m.apply_event(&c0, &e).unwrap();
        assert_eq!(c0, m.initial_config());
        assert!(c1.agent(a(1)).has_outstanding_request);
        assert!(matches!(c1.leader(a(1)).phase, LeaderPhase::Pending { .. }));
        assert_eq!(c1.leader(a(2)), c0.leader(a(2)));

        let refused = m.apply_event(&c0, &EventLabel::BeginMerge { leader: a(1) });
        match refused {
            Err(ModelError::Refused { blocker, .. }) => assert_eq!(blocker, "MAP_LEADER(A1)"),
            other => panic!("expected refusal, got {other:?}"),
        }
        let outside = m.apply_event(&c0, &EventLabel::Done { leader: a(4) });
        assert!(matches!(outside, Err(ModelError::InvalidEvent { .. })));
    }

    #[test]
    fn done_enabled_for_full_leader() {
        let m = Model::with_agents(3).unwrap();
        let mut c = m.initial_config();
        c.leaders[0].agent_set = agents![1, 2, 3];
        c.leaders[1].active = false;
        c.leaders[2].active = false;
        for ag in c.agents.iter_mut() {
            ag.believed_leader = a(1);
            ag.known_group = agents![1, 2, 3];
        }
        assert!(m.enabled_events(&c).contains(&EventLabel::Done { leader: a(1) }));
        assert!(c.partition_violation().is_none());
        c.leaders[0].phase = LeaderPhase::Terminated;
        assert!(m.is_terminal(&c));
        assert!(m.enabled_events(&c).is_empty());
        c.leaders[1].active = true;
        assert!(!m.is_terminal(&c));
    }
}
