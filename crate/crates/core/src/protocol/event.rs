//! The event alphabet shared by every process in the model.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::{AgentId, AgentSet};
use crate::error::ModelError;

/// One synchronisation label. Field names double as the JSON trace-file
/// keys; the `type` key carries the variant name.
///
/// The derived `Ord` (variant order, then payload) is the canonical order
/// used for successor enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventLabel {
    RequestMerge { agent: AgentId, leader: AgentId, merge_set: AgentSet },
    RequestLeader { req_leader: AgentId, target_agent: AgentId },
    ReplyLeader { target_agent: AgentId, req_leader: AgentId, its_leader: AgentId },
    BeginMerge { leader: AgentId },
    ConfirmMerge { req_leader: AgentId, other_leader: AgentId },
    MergeCancelled { req_leader: AgentId, other_leader: AgentId },
    MergeConfirmed { req_leader: AgentId, other_leader: AgentId, other_agent_set: AgentSet },
    MergeMaps { req_leader: AgentId, other_leader: AgentId },
    MergeCompleted { req_leader: AgentId, other_leader: AgentId, union_set: AgentSet },
    UpdateIdentifiedSameGroup { leader: AgentId, agent: AgentId, new_set: AgentSet },
    UpdateIdentified { leader: AgentId, agent: AgentId, new_set: AgentSet },
    RemoveReasoningAbout { req_agent: AgentId, other_agent: AgentId },
    Done { leader: AgentId },
    Terminate { leader: AgentId },
}

/// Event kinds, used for alphabets described by channel rather than by
/// concrete label (e.g. "hide every `begin_merge`").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    RequestMerge,
    RequestLeader,
    ReplyLeader,
    BeginMerge,
    ConfirmMerge,
    MergeCancelled,
    MergeConfirmed,
    MergeMaps,
    MergeCompleted,
    UpdateIdentifiedSameGroup,
    UpdateIdentified,
    RemoveReasoningAbout,
    Done,
    Terminate,
}

impl EventKind {
    pub const ALL: [EventKind; 14] = [
        EventKind::RequestMerge,
        EventKind::RequestLeader,
        EventKind::ReplyLeader,
        EventKind::BeginMerge,
        EventKind::ConfirmMerge,
        EventKind::MergeCancelled,
        EventKind::MergeConfirmed,
        EventKind::MergeMaps,
        EventKind::MergeCompleted,
        EventKind::UpdateIdentifiedSameGroup,
        EventKind::UpdateIdentified,
        EventKind::RemoveReasoningAbout,
        EventKind::Done,
        EventKind::Terminate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::RequestMerge => "request_merge",
            EventKind::RequestLeader => "request_leader",
            EventKind::ReplyLeader => "reply_leader",
            EventKind::BeginMerge => "begin_merge",
            EventKind::ConfirmMerge => "confirm_merge",
            EventKind::MergeCancelled => "merge_cancelled",
            EventKind::MergeConfirmed => "merge_confirmed",
            EventKind::MergeMaps => "merge_maps",
            EventKind::MergeCompleted => "merge_completed",
            EventKind::UpdateIdentifiedSameGroup => "update_identified_same_group",
            EventKind::UpdateIdentified => "update_identified",
            EventKind::RemoveReasoningAbout => "remove_reasoning_about",
            EventKind::Done => "done",
            EventKind::Terminate => "terminate",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A process that can take part in a rendezvous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessRef {
    Agent(AgentId),
    Leader(AgentId),
    /// The leader process the named agent currently reports to. Resolved
    /// against a configuration by the world model.
    LeaderOf(AgentId),
}

impl fmt::Display for ProcessRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessRef::Agent(a) => write!(f, "AGENT({a})"),
            ProcessRef::Leader(a) => write!(f, "MAP_LEADER({a})"),
            ProcessRef::LeaderOf(a) => write!(f, "MAP_LEADER(leader of {a})"),
        }
    }
}

impl EventLabel {
    pub fn kind(&self) -> EventKind {
        use EventLabel::*;
        match self {
            RequestMerge { .. } => EventKind::RequestMerge,
            RequestLeader { .. } => EventKind::RequestLeader,
            ReplyLeader { .. } => EventKind::ReplyLeader,
            BeginMerge { .. } => EventKind::BeginMerge,
            ConfirmMerge { .. } => EventKind::ConfirmMerge,
            MergeCancelled { .. } => EventKind::MergeCancelled,
            MergeConfirmed { .. } => EventKind::MergeConfirmed,
            MergeMaps { .. } => EventKind::MergeMaps,
            MergeCompleted { .. } => EventKind::MergeCompleted,
            UpdateIdentifiedSameGroup { .. } => EventKind::UpdateIdentifiedSameGroup,
            UpdateIdentified { .. } => EventKind::UpdateIdentified,
            RemoveReasoningAbout { .. } => EventKind::RemoveReasoningAbout,
            Done { .. } => EventKind::Done,
            Terminate { .. } => EventKind::Terminate,
        }
    }

    fn ids(&self) -> Vec<AgentId> {
        use EventLabel::*;
        match *self {
            RequestMerge { agent, leader, .. } => vec![agent, leader],
            RequestLeader { req_leader, target_agent } => vec![req_leader, target_agent],
            ReplyLeader { target_agent, req_leader, its_leader } => {
                vec![target_agent, req_leader, its_leader]
            }
            BeginMerge { leader } | Done { leader } | Terminate { leader } => vec![leader],
            ConfirmMerge { req_leader, other_leader }
            | MergeCancelled { req_leader, other_leader }
            | MergeConfirmed { req_leader, other_leader, .. }
            | MergeMaps { req_leader, other_leader }
            | MergeCompleted { req_leader, other_leader, .. } => vec![req_leader, other_leader],
            UpdateIdentifiedSameGroup { leader, agent, .. } | UpdateIdentified { leader, agent, .. } => {
                vec![leader, agent]
            }
            RemoveReasoningAbout { req_agent, other_agent } => vec![req_agent, other_agent],
        }
    }

    fn sets(&self) -> Vec<AgentSet> {
        use EventLabel::*;
        match *self {
            RequestMerge { merge_set, .. } => vec![merge_set],
            MergeConfirmed { other_agent_set, .. } => vec![other_agent_set],
            MergeCompleted { union_set, .. } => vec![union_set],
            UpdateIdentifiedSameGroup { new_set, .. } | UpdateIdentified { new_set, .. } => {
                vec![new_set]
            }
            _ => vec![],
        }
    }

    /// Checks payload well-formedness against an agent universe.
    pub fn validate(&self, universe: AgentSet) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::InvalidEvent { event: self.to_string(), reason };
        if let Some(id) = self.ids().into_iter().find(|id| !universe.contains(*id)) {
            return Err(bad(format!("{id} is outside the universe {universe}")));
        }
        for set in self.sets() {
            if set.is_empty() {
                return Err(bad("empty agent set".into()));
            }
            if !set.is_subset(universe) {
                return Err(bad(format!("{set} is not within the universe {universe}")));
            }
        }
        match *self {
            EventLabel::MergeCompleted { req_leader, union_set, .. } if !union_set.contains(req_leader) => {
                Err(bad("union_set must contain the requesting leader".into()))
            }
            EventLabel::UpdateIdentifiedSameGroup { leader, agent, new_set }
            | EventLabel::UpdateIdentified { leader, agent, new_set }
                if !(new_set.contains(leader) && new_set.contains(agent)) =>
            {
                Err(bad("new_set must contain the leader and the agent".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The processes that must jointly take `event`.
pub fn participants(event: &EventLabel, universe: AgentSet) -> Result<Vec<ProcessRef>, ModelError> {
    use EventLabel::*;
    use ProcessRef::*;
    event.validate(universe)?;
    Ok(match *event {
        RequestMerge { agent, leader, .. } => vec![Agent(agent), Leader(leader)],
        RequestLeader { req_leader, target_agent } | ReplyLeader { target_agent, req_leader, .. } => {
            vec![Agent(target_agent), Leader(req_leader)]
        }
        UpdateIdentifiedSameGroup { leader, agent, .. } | UpdateIdentified { leader, agent, .. } => {
            vec![Agent(agent), Leader(leader)]
        }
        ConfirmMerge { req_leader, other_leader }
        | MergeCancelled { req_leader, other_leader }
        | MergeConfirmed { req_leader, other_leader, .. }
        | MergeMaps { req_leader, other_leader }
        | MergeCompleted { req_leader, other_leader, .. } => {
            vec![Leader(req_leader), Leader(other_leader)]
        }
        BeginMerge { leader } | Done { leader } | Terminate { leader } => vec![Leader(leader)],
        // Owned by the requesting agent's leader; the agent listens so that
        // it can drop its outstanding-request flag.
        RemoveReasoningAbout { req_agent, .. } => vec![Agent(req_agent), LeaderOf(req_agent)],
    })
}

impl fmt::Display for EventLabel {
    /// CSP-style dotted rendering, e.g. `confirm_merge.A1.A2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().as_str())?;
        for id in self.ids() {
            write!(f, ".{id}")?;
        }
        for set in self.sets() {
            write!(f, ".{set}")?;
        }
        Ok(())
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
    fn participant_sets() {
        let u = agents![1, 2, 3];
        let confirm = EventLabel::ConfirmMerge { req_leader: a(1), other_leader: a(2) };
        assert_eq!(participants(&confirm, u).unwrap(), vec![ProcessRef::Leader(a(1)), ProcessRef::Leader(a(2))]);
        let done = EventLabel::Done { leader: a(1) };
        assert_eq!(participants(&done, u).unwrap(), vec![ProcessRef::Leader(a(1))]);
        let req = EventLabel::RequestMerge { agent: a(2), leader: a(2), merge_set: agents![1] };
        assert_eq!(participants(&req, u).unwrap(), vec![ProcessRef::Agent(a(2)), ProcessRef::Leader(a(2))]);
    }

    #[test]
    fn malformed_payloads_are_rejected() {
        let u = agents![1, 2, 3];
        let outside = EventLabel::Done { leader: a(4) };
        assert!(matches!(participants(&outside, u), Err(ModelError::InvalidEvent { .. })));
        let empty = EventLabel::RequestMerge { agent: a(1), leader: a(1), merge_set: AgentSet::EMPTY };
        assert!(participants(&empty, u).is_err());
        let union_missing = EventLabel::MergeCompleted { req_leader: a(1), other_leader: a(2), union_set: agents![2] };
        assert!(participants(&union_missing, u).is_err());
    }

    #[test]
    fn json_shape() {
        let e = EventLabel::MergeConfirmed { req_leader: a(1), other_leader: a(2), other_agent_set: agents![2] };
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"type":"merge_confirmed","req_leader":"A1","other_leader":"A2","other_agent_set":["A2"]}"#);
        assert_eq!(serde_json::from_str::<EventLabel>(&s).unwrap(), e);
        assert_eq!(e.to_string(), "merge_confirmed.A1.A2.{A2}");
    }

    #[test]
    fn kind_names_match_serde_tags() {
        for kind in EventKind::ALL {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.as_str()));
        }
    }
}
