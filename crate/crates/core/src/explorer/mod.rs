//! Explicit-state exploration of a [`Model`].
//!
//! [`explore`] builds the reachable state graph breadth-first, one level at a
//! time. Successors of a level may be computed on several worker threads,
//! but new states are numbered and checked sequentially in frontier order,
//! so the graph (state ids, edge order, witnesses) does not depend on the
//! worker count.

mod analysis;
mod checks;
mod export;
mod trace;

use std::collections::BTreeMap;
use std::ops::Range;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::protocol::EventLabel;
use crate::world::{Configuration, Model};

pub use analysis::{
    check_inevitable, find_deadlocks, find_hidden_divergence, internal_events, DivergenceWitness, Inevitability,
    NondeterminismReport,
};
pub use checks::Check;
pub use export::{export_graph, GraphFormat, GRAPH_SCHEMA_VERSION};
pub use trace::{has_trace, TraceQuery, TraceResult};

pub type StateId = usize;

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    /// Stop adding states beyond this many.
    pub max_states: Option<usize>,
    /// Do not expand states at this BFS depth.
    pub max_depth: Option<usize>,
    pub workers: usize,
    pub checks: Vec<Check>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_states: None, max_depth: None, workers: 1, checks: Check::ALL.to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub source: StateId,
    pub event: EventLabel,
    pub target: StateId,
}

/// A replayable path from the initial configuration: `states[i+1]` is
/// `states[i]` after `events[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub states: Vec<Configuration>,
    pub events: Vec<EventLabel>,
}

impl Witness {
    pub fn last(&self) -> &Configuration {
        self.states.last().expect("witness holds at least the initial state")
    }

    /// Re-applies the events from the first state and checks every step.
    pub fn replays(&self, model: &Model) -> bool {
        self.events.len() + 1 == self.states.len()
            && self
                .events
                .iter()
                .zip(self.states.windows(2))
                .all(|(e, w)| model.apply_event(&w[0], e).ok().as_ref() == Some(&w[1]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
    pub witness: Witness,
}

/// The explored portion of a model's state space.
#[derive(Debug)]
pub struct StateGraph {
    model: Model,
    states: IndexSet<Configuration>,
    parents: Vec<Option<(StateId, EventLabel)>>,
    depth: Vec<usize>,
    /// Whether all of a state's successors are recorded.
    expanded: Vec<bool>,
    /// Sorted by source, then canonical event order.
    transitions: Vec<Transition>,
    out_edges: Vec<Range<usize>>,
    /// First violation (minimal depth) per check.
    pub violations: Vec<Violation>,
    /// Total number of violating states/transitions per check.
    pub violation_counts: BTreeMap<&'static str, usize>,
    pub complete: bool,
}

impl StateGraph {
    pub const INITIAL: StateId = 0;

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn state(&self, id: StateId) -> &Configuration {
        &self.states[id]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &Configuration> {
        self.states.iter()
    }

    pub fn id_of(&self, c: &Configuration) -> Option<StateId> {
        self.states.get_index_of(c)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, id: StateId) -> &[Transition] {
        &self.transitions[self.out_edges[id].clone()]
    }

    pub fn is_expanded(&self, id: StateId) -> bool {
        self.expanded[id]
    }

    pub fn depth(&self, id: StateId) -> usize {
        self.depth[id]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Shortest path from the initial state to `id`.
    pub fn witness_to(&self, id: StateId) -> Witness {
        let mut ids = vec![id];
        let mut events = Vec::new();
        let mut cur = id;
        while let Some((parent, e)) = self.parents[cur] {
            events.push(e);
            ids.push(parent);
            cur = parent;
        }
        ids.reverse();
        events.reverse();
        Witness { states: ids.into_iter().map(|i| self.states[i].clone()).collect(), events }
    }

    pub fn violations_of(&self, check: Check) -> usize {
        self.violation_counts.get(check.name()).copied().unwrap_or(0)
    }

    fn record(&mut self, check: Check, detail: String, witness: impl FnOnce(&Self) -> Witness) {
        let count = self.violation_counts.entry(check.name()).or_insert(0);
        *count += 1;
        if *count == 1 {
            let witness = witness(self);
            self.violations.push(Violation { check: check.name(), detail, witness });
        }
    }
}

/// Breadth-first closure of the model's transition relation from `c0`.
pub fn explore(model: &Model, c0: &Configuration, opts: &ExploreOptions) -> StateGraph {
    let mut g = StateGraph {
        model: *model,
        states: IndexSet::new(),
        parents: vec![None],
        depth: vec![0],
        expanded: vec![false],
        transitions: Vec::new(),
        out_edges: Vec::new(),
        violations: Vec::new(),
        violation_counts: BTreeMap::new(),
        complete: true,
    };
    g.states.insert(c0.clone());
    check_new_state(&mut g, opts, StateGraph::INITIAL);

    let max_states = opts.max_states.unwrap_or(usize::MAX).max(1);
    let pool = (opts.workers > 1)
        .then(|| rayon::ThreadPoolBuilder::new().num_threads(opts.workers).build().expect("thread pool"));

    let mut frontier: Vec<StateId> = vec![StateGraph::INITIAL];
    let mut level = 0;
    while !frontier.is_empty() {
        let expand = |id: &StateId| model.successors(&g.states[*id]);
        let batches: Vec<Vec<(EventLabel, Configuration)>> = match &pool {
            Some(pool) => pool.install(|| frontier.par_iter().map(expand).collect()),
            None => frontier.iter().map(expand).collect(),
        };

        if opts.max_depth.is_some_and(|d| level >= d) {
            if batches.iter().any(|b| !b.is_empty()) {
                g.complete = false;
            }
            break;
        }

        let mut next = Vec::new();
        for (&src, succs) in frontier.iter().zip(batches) {
            let mut fully = true;
            for (e, c) in succs {
                let target = match g.states.get_index_of(&c) {
                    Some(t) => t,
                    None if g.states.len() >= max_states => {
                        fully = false;
                        g.complete = false;
                        continue;
                    }
                    None => {
                        let (t, _) = g.states.insert_full(c);
                        g.parents.push(Some((src, e)));
                        g.depth.push(level + 1);
                        g.expanded.push(false);
                        check_new_state(&mut g, opts, t);
                        next.push(t);
                        t
                    }
                };
                g.transitions.push(Transition { source: src, event: e, target });
                check_transition(&mut g, opts, src, e, target);
            }
            g.expanded[src] = fully;
        }
        frontier = next;
        level += 1;
    }

    // Transitions were pushed grouped by ascending source.
    let mut starts = vec![0usize; g.states.len() + 1];
    for t in &g.transitions {
        starts[t.source + 1] += 1;
    }
    for i in 0..g.states.len() {
        starts[i + 1] += starts[i];
    }
    g.out_edges = (0..g.states.len()).map(|i| starts[i]..starts[i + 1]).collect();
    g
}

fn check_new_state(g: &mut StateGraph, opts: &ExploreOptions, id: StateId) {
    for &check in &opts.checks {
        if let Some(detail) = check.check_state(&g.states[id]) {
            g.record(check, detail, |g| g.witness_to(id));
        }
    }
}

fn check_transition(g: &mut StateGraph, opts: &ExploreOptions, src: StateId, e: EventLabel, dst: StateId) {
    for &check in &opts.checks {
        if let Some(detail) = check.check_transition(&g.states[src], &e, &g.states[dst]) {
            g.record(check, detail, |g| {
                let mut w = g.witness_to(src);
                w.events.push(e);
                w.states.push(g.states[dst].clone());
                w
            });
        }
    }
}
