//! The MAP_LEADER process.
//!
//! A leader runs at most one merge at a time. As the requesting side it moves
//! through
//!
//! ```text
//! AwaitRequest -request_merge-> Pending -begin_merge-> AwaitReplyLeader
//!   -reply_leader-> Confirming | Refusing
//!   Confirming -merge_confirmed-> Merging -merge_completed-> Updating
//!   Confirming -merge_cancelled-> Refusing -remove_reasoning_about-> ...
//! ```
//!
//! and returns to `AwaitRequest` once every target of the request has been
//! resolved. As the other side, an idle active leader that receives
//! `confirm_merge` locks itself (`Answering`, then `Yielding`) until the
//! requester sends `merge_completed`, at which point it stops being a leader.
//! Any other leader that receives `confirm_merge` owes the requester a
//! `merge_cancelled`.

use serde::Serialize;

use super::event::EventLabel;
use super::ids::{priority, AgentId, AgentSet};
use super::StepContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum LeaderPhase {
    AwaitRequest,
    /// A request was accepted; `begin_merge` starts working on it.
    Pending {
        requester: AgentId,
        targets: AgentSet,
    },
    /// `queue` holds the targets not yet resolved; `asked` those already sent
    /// a `request_leader`. Replies are taken once every target was asked.
    AwaitReplyLeader {
        requester: AgentId,
        queue: AgentSet,
        asked: AgentSet,
    },
    /// The merge with `other_agent` ended without merging.
    Refusing {
        requester: AgentId,
        other_agent: AgentId,
        rest: AgentSet,
    },
    Confirming {
        requester: AgentId,
        other_agent: AgentId,
        other_leader: AgentId,
        sent: bool,
        rest: AgentSet,
    },
    Merging {
        requester: AgentId,
        other_leader: AgentId,
        own_set: AgentSet,
        other_agent_set: AgentSet,
        maps_merged: bool,
        rest: AgentSet,
    },
    Updating {
        requester: AgentId,
        same_group_pending: AgentSet,
        other_group_pending: AgentSet,
        new_set: AgentSet,
        other_leader: AgentId,
        rest: AgentSet,
    },
    /// Other side: accepted `confirm_merge` and must answer `merge_confirmed`.
    Answering {
        req_leader: AgentId,
    },
    /// Other side: waiting for the requester to merge and complete.
    Yielding {
        req_leader: AgentId,
    },
    Done,
    Terminated,
}

impl LeaderPhase {
    /// No merge in flight on either side.
    pub fn is_idle(&self) -> bool {
        matches!(self, LeaderPhase::AwaitRequest | LeaderPhase::Done | LeaderPhase::Terminated)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LeaderProcState {
    pub id: AgentId,
    pub active: bool,
    pub agent_set: AgentSet,
    pub phase: LeaderPhase,
    /// Requesting leaders this leader owes a `merge_cancelled`.
    pub owed_cancels: AgentSet,
}

impl LeaderProcState {
    pub fn initial(id: AgentId) -> Self {
        LeaderProcState {
            id,
            active: true,
            agent_set: AgentSet::singleton(id),
            phase: LeaderPhase::AwaitRequest,
            owed_cancels: AgentSet::EMPTY,
        }
    }

    /// Labels this leader is ready to start. Agent-initiated labels
    /// (`request_merge`, `reply_leader`) and the requester's `confirm_merge`
    /// towards this leader are offered by the other side.
    pub fn offers(&self, ctx: &StepContext) -> Vec<EventLabel> {
        use LeaderPhase::*;
        let me = self.id;
        let mut out: Vec<EventLabel> = self
            .owed_cancels
            .iter()
            .map(|req_leader| EventLabel::MergeCancelled { req_leader, other_leader: me })
            .collect();
        match self.phase {
            AwaitRequest => {
                if ctx.harness && self.active && self.agent_set == ctx.universe {
                    out.push(EventLabel::Done { leader: me });
                }
            }
            Pending { .. } => out.push(EventLabel::BeginMerge { leader: me }),
            AwaitReplyLeader { queue, asked, .. } => {
                if let Some(target_agent) = queue.difference(asked).first() {
                    out.push(EventLabel::RequestLeader { req_leader: me, target_agent });
                }
            }
            Refusing { requester, other_agent, .. } => {
                out.push(EventLabel::RemoveReasoningAbout { req_agent: requester, other_agent })
            }
            Confirming { other_leader, sent: false, .. } => {
                out.push(EventLabel::ConfirmMerge { req_leader: me, other_leader })
            }
            Confirming { sent: true, .. } => {}
            Merging { other_leader, maps_merged, .. } => {
                out.push(if maps_merged {
                    EventLabel::MergeCompleted { req_leader: me, other_leader, union_set: self.agent_set }
                } else {
                    EventLabel::MergeMaps { req_leader: me, other_leader }
                });
            }
            Updating { same_group_pending, other_group_pending, new_set, .. } => {
                if let Some(agent) = same_group_pending.first() {
                    out.push(EventLabel::UpdateIdentifiedSameGroup { leader: me, agent, new_set });
                } else if let Some(agent) = other_group_pending.first() {
                    out.push(EventLabel::UpdateIdentified { leader: me, agent, new_set });
                }
            }
            Answering { req_leader } => {
                out.push(EventLabel::MergeConfirmed { req_leader, other_leader: me, other_agent_set: self.agent_set })
            }
            Yielding { .. } => {}
            Done => out.push(EventLabel::Terminate { leader: me }),
            Terminated => {}
        }
        out
    }
}

/// Next phase once one target of the current request is resolved.
fn continue_queue(requester: AgentId, rest: AgentSet) -> LeaderPhase {
    if rest.is_empty() {
        LeaderPhase::AwaitRequest
    } else {
        LeaderPhase::AwaitReplyLeader { requester, queue: rest, asked: rest }
    }
}

/// Successor of `s` under `e`, or `None` when the leader refuses `e`.
pub fn leader_step(s: &LeaderProcState, e: &EventLabel, ctx: &StepContext) -> Option<LeaderProcState> {
    use LeaderPhase::*;
    let me = s.id;
    let mut next = *s;
    match *e {
        EventLabel::RequestMerge { agent, leader, merge_set } if leader == me => {
            if s.phase != AwaitRequest
                || !s.active
                || !s.agent_set.contains(agent)
                || merge_set.is_empty()
                || !merge_set.is_disjoint(s.agent_set)
            {
                return None;
            }
            next.phase = Pending { requester: agent, targets: merge_set };
        }

        EventLabel::BeginMerge { leader } if leader == me => match s.phase {
            Pending { requester, targets } => {
                next.phase = AwaitReplyLeader { requester, queue: targets, asked: AgentSet::EMPTY };
            }
            _ => return None,
        },

        EventLabel::RequestLeader { req_leader, target_agent } if req_leader == me => match s.phase {
            AwaitReplyLeader { requester, queue, asked } if queue.difference(asked).first() == Some(target_agent) => {
                next.phase = AwaitReplyLeader { requester, queue, asked: asked.with(target_agent) };
            }
            _ => return None,
        },

        EventLabel::ReplyLeader { target_agent, req_leader, its_leader } if req_leader == me => {
            match s.phase {
                AwaitReplyLeader { requester, queue, asked }
                    if queue.is_subset(asked) && queue.contains(target_agent) =>
                {
                    let rest = queue.without(target_agent);
                    next.phase = if its_leader == me {
                        // Already absorbed by one of this request's merges.
                        continue_queue(requester, rest)
                    } else if priority(me, its_leader) != me && !ctx.mutations.skip_priority_guard {
                        Refusing { requester, other_agent: target_agent, rest }
                    } else {
                        Confirming { requester, other_agent: target_agent, other_leader: its_leader, sent: false, rest }
                    };
                }
                _ => return None,
            }
        }

        EventLabel::RemoveReasoningAbout { req_agent, other_agent } => match s.phase {
            Refusing { requester, other_agent: o, rest } if requester == req_agent && o == other_agent => {
                next.phase = continue_queue(requester, rest);
            }
            _ => return None,
        },

        EventLabel::ConfirmMerge { req_leader, other_leader } if req_leader != other_leader => {
            if req_leader == me {
                match s.phase {
                    Confirming { requester, other_agent, other_leader: o, sent: false, rest } if o == other_leader => {
                        next.phase = Confirming { requester, other_agent, other_leader, sent: true, rest };
                    }
                    _ => return None,
                }
            } else if other_leader == me {
                let may_confirm = s.active || ctx.mutations.skip_active_guard;
                match s.phase {
                    Done | Terminated => return None,
                    AwaitRequest if may_confirm => next.phase = Answering { req_leader },
                    _ => next.owed_cancels = s.owed_cancels.with(req_leader),
                }
            } else {
                return None;
            }
        }

        EventLabel::MergeCancelled { req_leader, other_leader } if req_leader != other_leader => {
            if req_leader == me {
                match s.phase {
                    Confirming { requester, other_agent, other_leader: o, sent: true, rest } if o == other_leader => {
                        next.phase = Refusing { requester, other_agent, rest };
                    }
                    _ => return None,
                }
            } else if other_leader == me && s.owed_cancels.contains(req_leader) {
                next.owed_cancels = s.owed_cancels.without(req_leader);
            } else {
                return None;
            }
        }

        EventLabel::MergeConfirmed { req_leader, other_leader, other_agent_set } if req_leader != other_leader => {
            if req_leader == me {
                match s.phase {
                    Confirming { requester, other_leader: o, sent: true, rest, .. } if o == other_leader => {
                        next.phase = Merging {
                            requester,
                            other_leader,
                            own_set: s.agent_set,
                            other_agent_set,
                            maps_merged: false,
                            rest,
                        };
                    }
                    _ => return None,
                }
            } else if other_leader == me {
                match s.phase {
                    Answering { req_leader: r } if r == req_leader && other_agent_set == s.agent_set => {
                        next.phase = Yielding { req_leader };
                    }
                    _ => return None,
                }
            } else {
                return None;
            }
        }

        EventLabel::MergeMaps { req_leader, other_leader } if req_leader != other_leader => {
            if req_leader == me {
                match s.phase {
                    Merging { requester, other_leader: o, own_set, other_agent_set, maps_merged: false, rest }
                        if o == other_leader =>
                    {
                        next.agent_set = s.agent_set.union(other_agent_set);
                        next.phase =
                            Merging { requester, other_leader, own_set, other_agent_set, maps_merged: true, rest };
                    }
                    _ => return None,
                }
            } else if other_leader == me {
                match s.phase {
                    Yielding { req_leader: r } if r == req_leader => {}
                    _ => return None,
                }
            } else {
                return None;
            }
        }

        EventLabel::MergeCompleted { req_leader, other_leader, union_set } if req_leader != other_leader => {
            if req_leader == me {
                match s.phase {
                    Merging { requester, other_leader: o, own_set, other_agent_set, maps_merged: true, rest }
                        if o == other_leader && union_set == s.agent_set =>
                    {
                        next.phase = Updating {
                            requester,
                            same_group_pending: own_set,
                            other_group_pending: other_agent_set.difference(own_set),
                            new_set: union_set,
                            other_leader,
                            rest,
                        };
                    }
                    _ => return None,
                }
            } else if other_leader == me {
                match s.phase {
                    Yielding { req_leader: r } if r == req_leader => {
                        next.active = false;
                        next.phase = AwaitRequest;
                    }
                    _ => return None,
                }
            } else {
                return None;
            }
        }

        EventLabel::UpdateIdentifiedSameGroup { leader, agent, new_set } if leader == me => match s.phase {
            Updating { requester, same_group_pending, other_group_pending, new_set: n, other_leader, rest }
                if n == new_set && same_group_pending.first() == Some(agent) =>
            {
                next.phase = after_update(
                    requester,
                    same_group_pending.without(agent),
                    other_group_pending,
                    new_set,
                    other_leader,
                    rest,
                );
            }
            _ => return None,
        },

        EventLabel::UpdateIdentified { leader, agent, new_set } if leader == me => match s.phase {
            Updating { requester, same_group_pending, other_group_pending, new_set: n, other_leader, rest }
                if n == new_set && same_group_pending.is_empty() && other_group_pending.first() == Some(agent) =>
            {
                next.phase = after_update(
                    requester,
                    same_group_pending,
                    other_group_pending.without(agent),
                    new_set,
                    other_leader,
                    rest,
                );
            }
            _ => return None,
        },

        EventLabel::Done { leader } if leader == me => {
            if !(ctx.harness && s.active && s.phase == AwaitRequest && s.agent_set == ctx.universe) {
                return None;
            }
            next.phase = Done;
        }

        EventLabel::Terminate { leader } if leader == me => match s.phase {
            Done => next.phase = Terminated,
            _ => return None,
        },

        _ => return None,
    }
    Some(next)
}

fn after_update(
    requester: AgentId,
    same_group_pending: AgentSet,
    other_group_pending: AgentSet,
    new_set: AgentSet,
    other_leader: AgentId,
    rest: AgentSet,
) -> LeaderPhase {
    if same_group_pending.is_empty() && other_group_pending.is_empty() {
        continue_queue(requester, rest)
    } else {
        LeaderPhase::Updating { requester, same_group_pending, other_group_pending, new_set, other_leader, rest }
    }
}
