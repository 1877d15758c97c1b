//! Trace membership with hiding: can the model perform `trace` when every
//! event outside `alphabet` is invisible?

use std::collections::{BTreeSet, VecDeque};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::Witness;
use crate::error::{ModelError, Result};
use crate::protocol::EventLabel;
use crate::world::{Configuration, Model};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceQuery {
    pub trace: Vec<EventLabel>,
    /// Visible events. Everything else is hidden.
    pub alphabet: BTreeSet<EventLabel>,
}

impl TraceQuery {
    /// Only the trace's own events are visible.
    pub fn new(trace: Vec<EventLabel>) -> Self {
        let alphabet = trace.iter().copied().collect();
        TraceQuery { trace, alphabet }
    }

    /// Makes `extra` visible as well, so the trace must avoid them.
    pub fn forbidding(mut self, extra: impl IntoIterator<Item = EventLabel>) -> Self {
        self.alphabet.extend(extra);
        self
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        for e in self.alphabet.iter() {
            e.validate(model.universe())?;
        }
        if let Some(e) = self.trace.iter().find(|e| !self.alphabet.contains(e)) {
            return Err(ModelError::InvalidEvent {
                event: e.to_string(),
                reason: "trace event missing from the visible alphabet".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceResult {
    pub found: bool,
    /// The full execution, hidden events included.
    pub witness: Option<Witness>,
    /// Search nodes (configuration, trace position) visited.
    pub explored: usize,
}

/// Breadth-first search over (configuration, matched prefix length). The
/// execution may continue past the end of the trace, so the search stops as
/// soon as the whole trace is matched.
pub fn has_trace(model: &Model, c0: &Configuration, q: &TraceQuery) -> TraceResult {
    let len = q.trace.len();
    let mut seen: IndexSet<(Configuration, usize)> = IndexSet::new();
    let mut parents: Vec<Option<(usize, EventLabel)>> = vec![None];
    seen.insert((c0.clone(), 0));
    if len == 0 {
        return TraceResult { found: true, witness: Some(rebuild(&seen, &parents, 0)), explored: 1 };
    }

    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        let (config, pos) = seen[node].clone();
        for (e, next) in model.successors(&config) {
            let next_pos = if q.alphabet.contains(&e) {
                if q.trace[pos] != e {
                    continue;
                }
                pos + 1
            } else {
                pos
            };
            let (id, fresh) = seen.insert_full((next, next_pos));
            if !fresh {
                continue;
            }
            parents.push(Some((node, e)));
            if next_pos == len {
                let witness = rebuild(&seen, &parents, id);
                return TraceResult { found: true, witness: Some(witness), explored: seen.len() };
            }
            queue.push_back(id);
        }
    }
    TraceResult { found: false, witness: None, explored: seen.len() }
}

fn rebuild(
    seen: &IndexSet<(Configuration, usize)>,
    parents: &[Option<(usize, EventLabel)>],
    mut node: usize,
) -> Witness {
    let mut states = vec![seen[node].0.clone()];
    let mut events = Vec::new();
    while let Some((p, e)) = parents[node] {
        events.push(e);
        states.push(seen[p].0.clone());
        node = p;
    }
    states.reverse();
    events.reverse();
    Witness { states, events }
}
