//! Named validation scenarios: event traces the model must be able to
//! perform, each tied to the requirement it exercises.
//!
//! A scenario's trace is checked with every event outside its visible
//! alphabet hidden. `also_visible` lists events that must *not* occur while
//! the trace plays out (e.g. a `confirm_merge` in a priority-denial
//! scenario).

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::explorer::{has_trace, TraceQuery};
use crate::protocol::{AgentId, AgentSet, EventLabel};
use crate::world::{Model, ModelOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Requirement {
    #[serde(rename = "GOAL")]
    Goal,
    #[serde(rename = "REQ1")]
    Req1,
    #[serde(rename = "REQ2")]
    Req2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub requirement_tag: Requirement,
    pub expected: bool,
    pub query: TraceQuery,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRepr {
    name: String,
    #[serde(default)]
    description: String,
    requirement_tag: Requirement,
    #[serde(default = "yes")]
    expected: bool,
    trace: Vec<EventLabel>,
    #[serde(default)]
    also_visible: Vec<EventLabel>,
}

fn yes() -> bool {
    true
}

impl From<ScenarioRepr> for Scenario {
    fn from(r: ScenarioRepr) -> Self {
        Scenario {
            name: r.name,
            description: r.description,
            requirement_tag: r.requirement_tag,
            expected: r.expected,
            query: TraceQuery::new(r.trace).forbidding(r.also_visible),
        }
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        let in_trace: BTreeSet<_> = s.query.trace.iter().copied().collect();
        ScenarioRepr {
            name: s.name,
            description: s.description,
            requirement_tag: s.requirement_tag,
            expected: s.expected,
            also_visible: s.query.alphabet.difference(&in_trace).copied().collect(),
            trace: s.query.trace,
        }
    }
}

impl Scenario {
    /// Agents named anywhere in the scenario.
    pub fn agents(&self) -> AgentSet {
        let mut set = AgentSet::EMPTY;
        for e in &self.query.alphabet {
            let v = serde_json::to_value(e).expect("event serialises");
            collect_agents(&v, &mut set);
        }
        set
    }
}

fn collect_agents(v: &serde_json::Value, set: &mut AgentSet) {
    match v {
        serde_json::Value::String(s) => {
            if let Ok(id) = s.parse::<AgentId>() {
                *set = set.with(id);
            }
        }
        serde_json::Value::Array(items) => items.iter().for_each(|i| collect_agents(i, set)),
        serde_json::Value::Object(map) => map.values().for_each(|i| collect_agents(i, set)),
        _ => {}
    }
}

fn id(i: usize) -> AgentId {
    AgentId::new(i).expect("valid built-in agent")
}

fn set(ids: &[usize]) -> AgentSet {
    ids.iter().map(|&i| id(i)).collect()
}

mod ev {
    use super::*;

    pub fn request_merge(agent: usize, leader: usize, merge_set: &[usize]) -> EventLabel {
        EventLabel::RequestMerge { agent: id(agent), leader: id(leader), merge_set: set(merge_set) }
    }
    pub fn request_leader(req_leader: usize, target_agent: usize) -> EventLabel {
        EventLabel::RequestLeader { req_leader: id(req_leader), target_agent: id(target_agent) }
    }
    pub fn reply_leader(target_agent: usize, req_leader: usize, its_leader: usize) -> EventLabel {
        EventLabel::ReplyLeader {
            target_agent: id(target_agent),
            req_leader: id(req_leader),
            its_leader: id(its_leader),
        }
    }
    pub fn confirm_merge(req: usize, other: usize) -> EventLabel {
        EventLabel::ConfirmMerge { req_leader: id(req), other_leader: id(other) }
    }
    pub fn merge_cancelled(req: usize, other: usize) -> EventLabel {
        EventLabel::MergeCancelled { req_leader: id(req), other_leader: id(other) }
    }
    pub fn merge_confirmed(req: usize, other: usize, other_set: &[usize]) -> EventLabel {
        EventLabel::MergeConfirmed { req_leader: id(req), other_leader: id(other), other_agent_set: set(other_set) }
    }
    pub fn merge_maps(req: usize, other: usize) -> EventLabel {
        EventLabel::MergeMaps { req_leader: id(req), other_leader: id(other) }
    }
    pub fn merge_completed(req: usize, other: usize, union: &[usize]) -> EventLabel {
        EventLabel::MergeCompleted { req_leader: id(req), other_leader: id(other), union_set: set(union) }
    }
    pub fn update_same(leader: usize, agent: usize, new_set: &[usize]) -> EventLabel {
        EventLabel::UpdateIdentifiedSameGroup { leader: id(leader), agent: id(agent), new_set: set(new_set) }
    }
    pub fn update(leader: usize, agent: usize, new_set: &[usize]) -> EventLabel {
        EventLabel::UpdateIdentified { leader: id(leader), agent: id(agent), new_set: set(new_set) }
    }
    pub fn remove_reasoning(req_agent: usize, other_agent: usize) -> EventLabel {
        EventLabel::RemoveReasoningAbout { req_agent: id(req_agent), other_agent: id(other_agent) }
    }
}

/// `leader` asks `target` for its leader and learns it is `answer`.
fn lookup(leader: usize, target: usize, answer: usize) -> [EventLabel; 2] {
    [ev::request_leader(leader, target), ev::reply_leader(target, leader, answer)]
}

/// `req` (coordinating `req_set`) absorbs `other` (coordinating `other_set`).
fn absorb(req: usize, req_set: &[usize], other: usize, other_set: &[usize]) -> Vec<EventLabel> {
    let mut union: Vec<usize> = req_set.iter().chain(other_set).copied().collect();
    union.sort_unstable();
    let mut out = vec![
        ev::confirm_merge(req, other),
        ev::merge_confirmed(req, other, other_set),
        ev::merge_maps(req, other),
        ev::merge_completed(req, other, &union),
    ];
    out.extend(req_set.iter().map(|&a| ev::update_same(req, a, &union)));
    out.extend(other_set.iter().map(|&a| ev::update(req, a, &union)));
    out
}

fn scenario(
    name: &str,
    description: &str,
    requirement_tag: Requirement,
    trace: Vec<EventLabel>,
    also_visible: Vec<EventLabel>,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        requirement_tag,
        expected: true,
        query: TraceQuery::new(trace).forbidding(also_visible),
    }
}

/// The six built-in scenarios, in order 1, 2, 3, 4a, 4b, 5.
pub fn builtin_scenarios() -> Vec<Scenario> {
    use Requirement::*;

    let s1 = {
        let mut t = vec![ev::request_merge(1, 1, &[2])];
        t.extend(lookup(1, 2, 2));
        t.extend(absorb(1, &[1], 2, &[2]));
        scenario(
            "scenario1",
            "A1 asks to merge with A2; A1 has priority, so A2's map is merged into A1's",
            Req1,
            t,
            vec![],
        )
    };

    let s2 = {
        let mut t = vec![ev::request_merge(1, 1, &[2])];
        t.extend(lookup(1, 2, 2));
        t.extend([ev::confirm_merge(1, 2), ev::merge_cancelled(1, 2), ev::remove_reasoning(1, 2)]);
        scenario(
            "scenario2",
            "A1 asks to merge with A2, but A2 is in the middle of a merge and cancels",
            Req2,
            t,
            vec![ev::merge_confirmed(1, 2, &[2]), ev::merge_maps(1, 2)],
        )
    };

    let s3 = {
        let mut t = vec![ev::request_merge(2, 2, &[1])];
        t.extend(lookup(2, 1, 1));
        t.push(ev::remove_reasoning(2, 1));
        scenario(
            "scenario3",
            "A2 asks to merge with A1 and is denied because A2 does not have priority",
            Req1,
            t,
            vec![ev::confirm_merge(2, 1)],
        )
    };

    // A2 and A1 both want A3; A1 gets there first.
    let race_for_a3 = || {
        let mut t = vec![ev::request_merge(2, 2, &[3]), ev::request_merge(1, 1, &[3])];
        t.extend(lookup(1, 3, 3));
        t
    };

    let s4a = {
        let mut t = race_for_a3();
        t.extend(absorb(1, &[1], 3, &[3]));
        t.extend(lookup(2, 3, 1));
        t.push(ev::remove_reasoning(2, 3));
        scenario(
            "scenario4a",
            "A2 and then A1 ask to merge with A3; A1 merges first, A3 then reports A1 as its leader \
             and A2's attempt is denied because A2 does not have priority",
            Req1,
            t,
            vec![ev::confirm_merge(2, 1)],
        )
    };

    let s4b = {
        let mut t = race_for_a3();
        t.extend([
            ev::confirm_merge(1, 3),
            ev::merge_confirmed(1, 3, &[3]),
            ev::merge_maps(1, 3),
            ev::merge_completed(1, 3, &[1, 3]),
        ]);
        // A3 has not been told about A1 yet.
        t.extend(lookup(2, 3, 3));
        t.extend([ev::confirm_merge(2, 3), ev::merge_cancelled(2, 3), ev::remove_reasoning(2, 3)]);
        scenario(
            "scenario4b",
            "A2 and then A1 ask to merge with A3; A1 merges first but A3 still reports itself as \
             leader, so A2 asks A3 to confirm and A3, no longer a leader, cancels",
            Req2,
            t,
            vec![ev::merge_confirmed(2, 3, &[3]), ev::merge_maps(2, 3)],
        )
    };

    let s5 = {
        let mut t = vec![ev::request_merge(1, 1, &[2])];
        t.extend(lookup(1, 2, 2));
        t.extend(absorb(1, &[1], 2, &[2]));
        t.push(ev::request_merge(3, 3, &[2]));
        t.extend(lookup(3, 2, 1));
        t.push(ev::remove_reasoning(3, 2));
        scenario(
            "scenario5",
            "A1 merges with A2; A3 then asks to merge with A2, learns A2's leader is A1 and is \
             denied because A3 does not have priority",
            Req1,
            t,
            vec![ev::confirm_merge(3, 1)],
        )
    };

    vec![s1, s2, s3, s4a, s4b, s5]
}

/// Looks a built-in scenario up by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Parses a JSON array of scenarios.
pub fn load_scenarios(json: &str) -> Result<Vec<Scenario>> {
    let scenarios: Vec<Scenario> = serde_json::from_str(json)?;
    let mut names = BTreeSet::new();
    for s in &scenarios {
        if !names.insert(s.name.as_str()) {
            return Err(ModelError::Config(format!("duplicate scenario name `{}`", s.name)));
        }
        if s.query.trace.is_empty() {
            return Err(ModelError::Config(format!("scenario `{}` has an empty trace", s.name)));
        }
    }
    Ok(scenarios)
}

pub fn load_scenario_file(path: &Path) -> Result<Vec<Scenario>> {
    load_scenarios(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub requirement_tag: Requirement,
    pub agents: usize,
    pub expected: bool,
    pub found: bool,
    pub pass: bool,
    /// Full execution (hidden events included) when the trace was found.
    pub witness: Option<Vec<EventLabel>>,
    pub explored: usize,
    pub duration_ms: f64,
}

/// Runs one scenario against a fresh `n`-agent model.
pub fn check_scenario(s: &Scenario, n: usize) -> Result<ScenarioReport> {
    check_scenario_with(s, n, ModelOptions::default())
}

pub fn check_scenario_with(s: &Scenario, n: usize, options: ModelOptions) -> Result<ScenarioReport> {
    let model = Model::new(n, options)?;
    let outside = s.agents().difference(model.universe());
    if !outside.is_empty() {
        return Err(ModelError::Config(format!(
            "scenario `{}` names {outside}, outside a universe of {n} agents",
            s.name
        )));
    }
    s.query.validate(&model)?;
    let start = Instant::now();
    let result = has_trace(&model, &model.initial_config(), &s.query);
    let duration_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(ScenarioReport {
        name: s.name.clone(),
        requirement_tag: s.requirement_tag,
        agents: n,
        expected: s.expected,
        found: result.found,
        pass: result.found == s.expected,
        witness: result.witness.map(|w| w.events),
        explored: result.explored,
        duration_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_named_scenarios() {
        let all = builtin_scenarios();
        let names: Vec<_> = all.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["scenario1", "scenario2", "scenario3", "scenario4a", "scenario4b", "scenario5"]);
        for s in &all {
            assert!(s.expected);
            assert!(!s.query.trace.is_empty());
        }
        let tags: Vec<_> = all.iter().map(|s| s.requirement_tag).collect();
        use Requirement::*;
        assert_eq!(tags, [Req1, Req2, Req1, Req1, Req2, Req1]);
    }

    #[test]
    fn scenario_one_matches_message_sequence() {
        let s = builtin("scenario1").unwrap();
        assert_eq!(
            s.query.trace,
            vec![
                ev::request_merge(1, 1, &[2]),
                ev::request_leader(1, 2),
                ev::reply_leader(2, 1, 2),
                ev::confirm_merge(1, 2),
                ev::merge_confirmed(1, 2, &[2]),
                ev::merge_maps(1, 2),
                ev::merge_completed(1, 2, &[1, 2]),
                ev::update_same(1, 1, &[1, 2]),
                ev::update(1, 2, &[1, 2]),
            ]
        );
    }

    #[test]
    fn denial_and_cancel_shapes() {
        let s3 = builtin("scenario3").unwrap();
        assert_eq!(s3.query.trace.last(), Some(&ev::remove_reasoning(2, 1)));
        assert!(s3.query.trace.iter().all(|e| !matches!(e, EventLabel::ConfirmMerge { .. })));
        let s2 = builtin("scenario2").unwrap();
        assert!(s2.query.trace.contains(&ev::merge_cancelled(1, 2)));
        assert!(s2.query.trace.iter().all(|e| !matches!(e, EventLabel::MergeMaps { .. })));
    }

    #[test]
    fn json_round_trip_of_builtins() {
        let all = builtin_scenarios();
        let json = serde_json::to_string_pretty(&all).unwrap();
        assert_eq!(load_scenarios(&json).unwrap(), all);
    }

    #[test]
    fn load_rejects_duplicates_and_empty_traces() {
        let dup = r#"[{"name":"x","requirement_tag":"REQ1","trace":[{"type":"done","leader":"A1"}]},
                      {"name":"x","requirement_tag":"REQ1","trace":[{"type":"done","leader":"A1"}]}]"#;
        assert!(load_scenarios(dup).is_err());
        let empty = r#"[{"name":"x","requirement_tag":"GOAL","trace":[]}]"#;
        assert!(load_scenarios(empty).is_err());
    }

    #[test]
    fn scenario_outside_universe_is_a_config_error() {
        let s = builtin("scenario4a").unwrap();
        assert_eq!(s.agents(), set(&[1, 2, 3]));
        assert!(matches!(check_scenario(&s, 2), Err(ModelError::Config(_))));
    }
}
