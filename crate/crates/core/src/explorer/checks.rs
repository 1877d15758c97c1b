//! Properties evaluated during exploration.

use serde::{Deserialize, Serialize};

use crate::protocol::{EventLabel, LeaderPhase};
use crate::world::Configuration;

/// A registered property. State checks run on every discovered
/// configuration, transition checks on every explored edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Per-process record invariants (membership, phase/active coherence).
    ProcessInvariants,
    /// Quiescent configurations partition the universe among active leaders.
    QuiescentPartition,
    /// Every `confirm_merge(L1, L2)` has `index(L1) < index(L2)`.
    Req1,
    /// `merge_confirmed` only from active leaders; demoted leaders answer
    /// `confirm_merge` with a cancellation.
    Req2,
    /// `merge_completed` carries the union of both leaders' sets.
    MergeUnion,
    /// Active-leader count never grows and drops by one per merge; active
    /// leaders never lose agents.
    Monotonicity,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::ProcessInvariants,
        Check::QuiescentPartition,
        Check::Req1,
        Check::Req2,
        Check::MergeUnion,
        Check::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::ProcessInvariants => "process_invariants",
            Check::QuiescentPartition => "quiescent_partition",
            Check::Req1 => "req1_priority",
            Check::Req2 => "req2_active_leader",
            Check::MergeUnion => "merge_union",
            Check::Monotonicity => "monotonicity",
        }
    }

    pub fn check_state(self, c: &Configuration) -> Option<String> {
        match self {
            Check::ProcessInvariants => process_invariants(c),
            Check::QuiescentPartition if c.is_quiescent() => c.partition_violation(),
            _ => None,
        }
    }

    pub fn check_transition(self, src: &Configuration, e: &EventLabel, dst: &Configuration) -> Option<String> {
        match (self, *e) {
            (Check::Req1, EventLabel::ConfirmMerge { req_leader, other_leader })
                if req_leader.index() >= other_leader.index() =>
            {
                Some(format!("{e} sent by a leader without priority"))
            }
            (Check::Req2, EventLabel::MergeConfirmed { other_leader, .. }) if !src.leader(other_leader).active => {
                Some(format!("{e} sent by demoted leader {other_leader}"))
            }
            (Check::Req2, EventLabel::ConfirmMerge { req_leader, other_leader })
                if !src.leader(other_leader).active && !dst.leader(other_leader).owed_cancels.contains(req_leader) =>
            {
                Some(format!("demoted leader {other_leader} did not commit to merge_cancelled"))
            }
            (Check::MergeUnion, EventLabel::MergeCompleted { req_leader, other_leader, union_set }) => {
                let expected = src.leader(req_leader).agent_set.union(src.leader(other_leader).agent_set);
                let own_kept = match src.leader(req_leader).phase {
                    LeaderPhase::Merging { own_set, other_agent_set, .. } => {
                        own_set.union(other_agent_set) == union_set
                    }
                    _ => false,
                };
                (union_set != expected || !own_kept).then(|| format!("{e} but the union is {expected}"))
            }
            (Check::Monotonicity, _) => monotonicity(src, e, dst),
            _ => None,
        }
    }
}

fn process_invariants(c: &Configuration) -> Option<String> {
    for a in &c.agents {
        if !a.known_group.contains(a.id) {
            return Some(format!("{} missing from its own known group", a.id));
        }
        if !a.known_group.contains(a.believed_leader) {
            return Some(format!("{}'s leader {} not in its known group", a.id, a.believed_leader));
        }
    }
    for l in &c.leaders {
        if l.active && !l.agent_set.contains(l.id) {
            return Some(format!("active leader {} not in its own set", l.id));
        }
        if !l.active && !l.phase.is_idle() {
            return Some(format!("demoted leader {} still in {:?}", l.id, l.phase));
        }
        if let LeaderPhase::Updating { same_group_pending, other_group_pending, new_set, .. } = l.phase {
            if !same_group_pending.union(other_group_pending).is_subset(new_set) {
                return Some(format!("leader {} updating agents outside {new_set}", l.id));
            }
        }
    }
    None
}

fn monotonicity(src: &Configuration, e: &EventLabel, dst: &Configuration) -> Option<String> {
    let before = src.active_leaders().count();
    let after = dst.active_leaders().count();
    let expected = if matches!(e, EventLabel::MergeCompleted { .. }) { before - 1 } else { before };
    if after != expected {
        return Some(format!("{e} took active leaders from {before} to {after}"));
    }
    for (l0, l1) in src.leaders.iter().zip(&dst.leaders) {
        if l0.active && l1.active && !l0.agent_set.is_subset(l1.agent_set) {
            return Some(format!("{e} shrank {}'s set", l0.id));
        }
    }
    None
}
