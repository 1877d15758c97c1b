//! The AGENT process: what one agent knows and which events it accepts.

use serde::Serialize;

use super::event::EventLabel;
use super::ids::{AgentId, AgentSet};
use super::StepContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AgentProcState {
    pub id: AgentId,
    pub believed_leader: AgentId,
    pub known_group: AgentSet,
    /// Leaders that asked for this agent's leader and still await a reply.
    pub pending_leader_queries: AgentSet,
    pub has_outstanding_request: bool,
}

impl AgentProcState {
    /// An agent that leads its own singleton map.
    pub fn initial(id: AgentId) -> Self {
        AgentProcState {
            id,
            believed_leader: id,
            known_group: AgentSet::singleton(id),
            pending_leader_queries: AgentSet::EMPTY,
            has_outstanding_request: false,
        }
    }

    /// Labels this agent is ready to start on its own side. Joint events still
    /// need the other participants' consent.
    pub fn offers(&self, ctx: &StepContext) -> Vec<EventLabel> {
        let mut out = Vec::new();
        if !self.has_outstanding_request {
            let eligible = ctx.universe.difference(self.known_group);
            for merge_set in eligible.subsets_up_to(ctx.merge_set_max) {
                out.push(EventLabel::RequestMerge { agent: self.id, leader: self.believed_leader, merge_set });
            }
        }
        for req_leader in self.pending_leader_queries.iter() {
            out.push(EventLabel::ReplyLeader { target_agent: self.id, req_leader, its_leader: self.believed_leader });
        }
        out
    }
}

/// Successor of `s` under `e`, or `None` when the agent refuses `e`.
pub fn agent_step(s: &AgentProcState, e: &EventLabel, ctx: &StepContext) -> Option<AgentProcState> {
    let mut next = *s;
    match *e {
        EventLabel::RequestLeader { req_leader, target_agent } if target_agent == s.id => {
            next.pending_leader_queries = s.pending_leader_queries.with(req_leader);
        }
        EventLabel::ReplyLeader { target_agent, req_leader, its_leader }
            if target_agent == s.id
                && s.pending_leader_queries.contains(req_leader)
                && its_leader == s.believed_leader =>
        {
            next.pending_leader_queries = s.pending_leader_queries.without(req_leader);
        }
        EventLabel::UpdateIdentified { leader, agent, new_set } if agent == s.id && new_set.contains(s.id) => {
            next.believed_leader = leader;
            next.known_group = new_set;
            next.has_outstanding_request = false;
        }
        EventLabel::UpdateIdentifiedSameGroup { agent, new_set, .. } if agent == s.id && new_set.contains(s.id) => {
            next.known_group = new_set;
            next.has_outstanding_request = false;
        }
        EventLabel::RequestMerge { agent, leader, merge_set }
            if agent == s.id
                && leader == s.believed_leader
                && !s.has_outstanding_request
                && !merge_set.is_empty()
                && merge_set.len() <= ctx.merge_set_max
                && merge_set.is_subset(ctx.universe)
                && merge_set.is_disjoint(s.known_group) =>
        {
            next.has_outstanding_request = true;
        }
        EventLabel::RemoveReasoningAbout { req_agent, .. } if req_agent == s.id => {
            next.has_outstanding_request = false;
        }
        _ => return None,
    }
    Some(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents;

    fn a(i: usize) -> AgentId {
        AgentId::new(i).unwrap()
    }

    fn ctx() -> StepContext {
        StepContext::new(agents![1, 2, 3])
    }

    #[test]
    fn request_leader_records_query() {
        let s = AgentProcState::initial(a(2));
        let e = EventLabel::RequestLeader { req_leader: a(1), target_agent: a(2) };
        let next = agent_step(&s, &e, &ctx()).unwrap();
        assert_eq!(next.pending_leader_queries, agents![1]);
    }

    #[test]
    fn reply_must_name_believed_leader() {
        let mut s = AgentProcState::initial(a(2));
        s.pending_leader_queries = agents![1];
        let good = EventLabel::ReplyLeader { target_agent: a(2), req_leader: a(1), its_leader: a(2) };
        let bad = EventLabel::ReplyLeader { target_agent: a(2), req_leader: a(1), its_leader: a(1) };
        assert_eq!(agent_step(&s, &good, &ctx()).unwrap().pending_leader_queries, AgentSet::EMPTY);
        assert!(agent_step(&s, &bad, &ctx()).is_none());
        // No reply without a query.
        assert!(agent_step(&AgentProcState::initial(a(2)), &good, &ctx()).is_none());
    }

    #[test]
    fn update_identified_moves_agent_to_new_leader() {
        let s = AgentProcState::initial(a(2));
        let e = EventLabel::UpdateIdentified { leader: a(1), agent: a(2), new_set: agents![1, 2] };
        let next = agent_step(&s, &e, &ctx()).unwrap();
        assert_eq!(next.believed_leader, a(1));
        assert_eq!(next.known_group, agents![1, 2]);
    }

    #[test]
    fn request_merge_guards() {
        let s = AgentProcState::initial(a(1));
        let ok = EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: agents![2] };
        let next = agent_step(&s, &ok, &ctx()).unwrap();
        assert!(next.has_outstanding_request);
        // One request at a time.
        assert!(agent_step(&next, &ok, &ctx()).is_none());
        // Targets must be outside the known group.
        let own = EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: agents![1] };
        assert!(agent_step(&s, &own, &ctx()).is_none());
        // Singleton merge sets by default.
        let pair = EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: agents![2, 3] };
        assert!(agent_step(&s, &pair, &ctx()).is_none());
        let wide = StepContext { merge_set_max: 2, ..ctx() };
        assert!(agent_step(&s, &pair, &wide).is_some());
        // Only through the believed leader.
        let wrong = EventLabel::RequestMerge { agent: a(1), leader: a(2), merge_set: agents![3] };
        assert!(agent_step(&s, &wrong, &ctx()).is_none());
    }

    #[test]
    fn remove_reasoning_clears_request() {
        let mut s = AgentProcState::initial(a(2));
        s.has_outstanding_request = true;
        let e = EventLabel::RemoveReasoningAbout { req_agent: a(2), other_agent: a(1) };
        assert!(!agent_step(&s, &e, &ctx()).unwrap().has_outstanding_request);
    }

    #[test]
    fn offers_cover_eligible_targets_and_replies() {
        let mut s = AgentProcState::initial(a(2));
        s.pending_leader_queries = agents![1];
        let offers = s.offers(&ctx());
        assert_eq!(offers.len(), 3);
        assert!(offers.contains(&EventLabel::ReplyLeader { target_agent: a(2), req_leader: a(1), its_leader: a(2) }));
    }
}
