//! Whole-graph analyses over an explored [`StateGraph`]: deadlocks, hidden
//! divergence, inevitability and branching.

use std::collections::VecDeque;

use serde::Serialize;

use super::{StateGraph, StateId, Witness};
use crate::protocol::{EventKind, EventLabel};
use crate::world::Configuration;

/// Event kinds that exist only to structure a process internally.
pub fn internal_events() -> Vec<EventKind> {
    vec![EventKind::BeginMerge]
}

/// Reachable, fully expanded, non-terminal states with no enabled event.
pub fn find_deadlocks(g: &StateGraph) -> Vec<Witness> {
    (0..g.state_count())
        .filter(|&id| g.is_expanded(id) && g.outgoing(id).is_empty() && !g.model().is_terminal(g.state(id)))
        .map(|id| g.witness_to(id))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceWitness {
    /// Path to the first state of the cycle.
    pub prefix: Witness,
    /// Hidden events around the cycle, ending back at the prefix's last state.
    pub cycle: Vec<EventLabel>,
}

/// A reachable cycle made only of hidden events, if there is one.
pub fn find_hidden_divergence(g: &StateGraph, hidden: impl Fn(&EventLabel) -> bool) -> Option<DivergenceWitness> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = g.state_count();
    let mut colour = vec![WHITE; n];
    let mut pos_on_stack = vec![usize::MAX; n];

    for root in 0..n {
        if colour[root] != WHITE {
            continue;
        }
        // (state, next outgoing edge to look at, event that led here)
        let mut stack: Vec<(StateId, usize, Option<EventLabel>)> = vec![(root, 0, None)];
        colour[root] = GREY;
        pos_on_stack[root] = 0;
        while let Some(top) = stack.last_mut() {
            let (state, edge, _) = *top;
            let out = g.outgoing(state);
            if edge == out.len() {
                colour[state] = BLACK;
                pos_on_stack[state] = usize::MAX;
                stack.pop();
                continue;
            }
            top.1 += 1;
            let t = out[edge];
            if !hidden(&t.event) {
                continue;
            }
            match colour[t.target] {
                WHITE => {
                    colour[t.target] = GREY;
                    pos_on_stack[t.target] = stack.len();
                    stack.push((t.target, 0, Some(t.event)));
                }
                GREY => {
                    let start = pos_on_stack[t.target];
                    let mut cycle: Vec<EventLabel> = stack[start + 1..].iter().filter_map(|f| f.2).collect();
                    cycle.push(t.event);
                    return Some(DivergenceWitness { prefix: g.witness_to(t.target), cycle });
                }
                _ => {}
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Inevitability {
    /// Goal reachable from every reachable state.
    Holds,
    Fails {
        counterexample: Witness,
    },
    /// The graph is incomplete, so unexplored states could change the answer.
    Indeterminate,
}

impl Inevitability {
    pub fn holds(&self) -> bool {
        matches!(self, Inevitability::Holds)
    }
}

/// AG EF `goal`: from every reachable state some goal state stays reachable.
/// The counterexample is the shallowest state that cannot reach the goal.
pub fn check_inevitable(g: &StateGraph, goal: impl Fn(&Configuration) -> bool) -> Inevitability {
    if !g.complete {
        return Inevitability::Indeterminate;
    }
    let n = g.state_count();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for t in g.transitions() {
        preds[t.target].push(t.source);
    }
    let mut reaches = vec![false; n];
    let mut queue: VecDeque<StateId> = (0..n).filter(|&id| goal(g.state(id))).collect();
    for &id in &queue {
        reaches[id] = true;
    }
    while let Some(id) = queue.pop_front() {
        for &p in &preds[id] {
            if !reaches[p] {
                reaches[p] = true;
                queue.push_back(p);
            }
        }
    }
    // Ids are in BFS order, so the first failure is a shallowest one.
    match (0..n).find(|&id| !reaches[id]) {
        Some(id) => Inevitability::Fails { counterexample: g.witness_to(id) },
        None => Inevitability::Holds,
    }
}

/// Stand-in for a process-level determinism check: every (state, label)
/// pair has one successor, plus how often the model offers a real choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NondeterminismReport {
    pub label_deterministic: bool,
    pub states_with_choice: usize,
    pub max_branching: usize,
}

impl NondeterminismReport {
    pub fn of(g: &StateGraph) -> Self {
        let mut report = NondeterminismReport { label_deterministic: true, states_with_choice: 0, max_branching: 0 };
        for id in 0..g.state_count() {
            let out = g.outgoing(id);
            // Canonical ordering makes repeated labels adjacent.
            if out.windows(2).any(|w| w[0].event >= w[1].event) {
                report.label_deterministic = false;
            }
            if out.len() > 1 {
                report.states_with_choice += 1;
            }
            report.max_branching = report.max_branching.max(out.len());
        }
        report
    }
}
