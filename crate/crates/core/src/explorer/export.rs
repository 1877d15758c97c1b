//! DOT and JSON renderings of a state graph. Both are deterministic: states
//! and edges appear in id order. The JSON layout is described by
//! `schemas/graph.schema.json`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{StateGraph, Transition, Violation};
use crate::error::ModelError;
use crate::world::Configuration;

pub const GRAPH_SCHEMA_VERSION: &str = "mapmerge-graph/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(ModelError::Config(format!("unknown graph format `{other}` (expected dot or json)"))),
        }
    }
}

pub fn export_graph(g: &StateGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => to_dot(g),
        GraphFormat::Json => to_json(g),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(g: &StateGraph) -> String {
    let model = g.model();
    let mut out = String::new();
    out.push_str("digraph state_space {\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (id, c) in g.states().enumerate() {
        let mut attrs = format!("label=\"{}\"", escape(&node_label(c)));
        if id == StateGraph::INITIAL {
            attrs.push_str(", style=bold");
        }
        if model.is_terminal(c) {
            attrs.push_str(", peripheries=2");
        }
        let _ = writeln!(out, "  s{id} [{attrs}];");
    }
    for t in g.transitions() {
        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", t.source, t.target, escape(&t.event.to_string()));
    }
    out.push_str("}\n");
    out
}

/// Active leader groups, plus `*` on leaders with a merge in flight.
fn node_label(c: &Configuration) -> String {
    c.active_leaders()
        .map(|l| {
            let busy = if l.phase.is_idle() { "" } else { "*" };
            format!("{}{}:{}", l.id, busy, l.agent_set)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    schema: &'static str,
    agents: usize,
    harness: bool,
    complete: bool,
    initial: usize,
    state_count: usize,
    transition_count: usize,
    states: Vec<JsonState<'a>>,
    transitions: &'a [Transition],
    violations: &'a [Violation],
}

#[derive(Serialize)]
struct JsonState<'a> {
    id: usize,
    depth: usize,
    partition: String,
    quiescent: bool,
    terminal: bool,
    config: &'a Configuration,
}

fn to_json(g: &StateGraph) -> String {
    let model = g.model();
    let doc = JsonGraph {
        schema: GRAPH_SCHEMA_VERSION,
        agents: model.agent_count(),
        harness: model.harness(),
        complete: g.complete,
        initial: StateGraph::INITIAL,
        state_count: g.state_count(),
        transition_count: g.transition_count(),
        states: g
            .states()
            .enumerate()
            .map(|(id, c)| JsonState {
                id,
                depth: g.depth(id),
                partition: c.partition_label(),
                quiescent: c.is_quiescent(),
                terminal: model.is_terminal(c),
                config: c,
            })
            .collect(),
        transitions: g.transitions(),
        violations: &g.violations,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::{explore, ExploreOptions};
    use crate::world::Model;

    #[test]
    fn one_state_dot() {
        let m = Model::with_agents(2).unwrap();
        let g = explore(&m, &m.initial_config(), &ExploreOptions { max_states: Some(1), ..Default::default() });
        let dot = export_graph(&g, GraphFormat::Dot);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 0);
        assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with("s0 [")).count(), 1);
    }

    #[test]
    fn formats_parse() {
        assert_eq!("dot".parse::<GraphFormat>().unwrap(), GraphFormat::Dot);
        assert!("svg".parse::<GraphFormat>().is_err());
    }
}
