//! Oracles shared by the integration and acceptance tests. They are written
//! against the public model API only and avoid the explorer's own search and
//! check code, so agreement with the library means something.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use mapmerge::coordmap::{merge_grids, transform, CellValue, GridMap, Offset, Point};
use mapmerge::protocol::{AgentId, AgentSet, EventLabel};
use mapmerge::{Configuration, Model};
use proptest::prelude::*;

pub fn a(i: usize) -> AgentId {
    AgentId::new(i).unwrap()
}

pub fn set(ids: &[usize]) -> AgentSet {
    ids.iter().map(|&i| a(i)).collect()
}

/// Every configuration reachable from the initial one, by plain DFS.
pub fn reachable(model: &Model) -> HashSet<Configuration> {
    let mut seen = HashSet::new();
    let mut stack = vec![model.initial_config()];
    while let Some(c) = stack.pop() {
        if !seen.insert(c.clone()) {
            continue;
        }
        for (_, next) in model.successors(&c) {
            if !seen.contains(&next) {
                stack.push(next);
            }
        }
    }
    seen
}

/// Subset construction: the set of configurations the model can be in after
/// showing `trace` with everything outside `visible` hidden.
pub struct TraceOracle<'m> {
    model: &'m Model,
    visible: BTreeSet<EventLabel>,
}

impl<'m> TraceOracle<'m> {
    pub fn new(model: &'m Model, visible: impl IntoIterator<Item = EventLabel>) -> Self {
        TraceOracle { model, visible: visible.into_iter().collect() }
    }

    fn closure(&self, start: BTreeSet<Configuration>) -> BTreeSet<Configuration> {
        let mut out = start.clone();
        let mut todo: Vec<_> = start.into_iter().collect();
        while let Some(c) = todo.pop() {
            for (e, next) in self.model.successors(&c) {
                if !self.visible.contains(&e) && out.insert(next.clone()) {
                    todo.push(next);
                }
            }
        }
        out
    }

    pub fn after(&self, trace: &[EventLabel]) -> BTreeSet<Configuration> {
        let mut current = self.closure(BTreeSet::from([self.model.initial_config()]));
        for e in trace {
            let stepped: BTreeSet<_> = current.iter().filter_map(|c| self.model.apply_event(c, e).ok()).collect();
            if stepped.is_empty() {
                return stepped;
            }
            current = self.closure(stepped);
        }
        current
    }

    pub fn accepts(&self, trace: &[EventLabel]) -> bool {
        !self.after(trace).is_empty()
    }
}

/// All words over `alphabet` of length at most `max_len`.
pub fn words(alphabet: &[EventLabel], max_len: usize) -> Vec<Vec<EventLabel>> {
    let mut all = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<EventLabel>| {
                alphabet.iter().map(move |e| {
                    let mut w = w.clone();
                    w.push(*e);
                    w
                })
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Active leaders partition the universe; every agent's leader is active,
/// coordinates it, and the agent's view of the group matches.
pub fn partition_holds(c: &Configuration) -> bool {
    let n = c.agents.len();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for l in c.leaders.iter().filter(|l| l.active) {
        for member in l.agent_set.iter() {
            if owner.insert(member.index(), l.id.index()).is_some() {
                return false;
            }
        }
    }
    if owner.len() != n || owner.keys().any(|&k| k == 0 || k > n) {
        return false;
    }
    c.agents.iter().all(|ag| {
        let leader = &c.leaders[ag.believed_leader.index() - 1];
        owner.get(&ag.id.index()) == Some(&leader.id.index()) && ag.known_group == leader.agent_set
    })
}

pub fn quiescent(c: &Configuration) -> bool {
    c.agents.iter().all(|ag| !ag.has_outstanding_request)
        && c.leaders.iter().all(|l| {
            use mapmerge::protocol::LeaderPhase::*;
            matches!(l.phase, AwaitRequest | Done | Terminated)
        })
}

pub fn leader_active(c: &Configuration, id: AgentId) -> bool {
    c.leaders[id.index() - 1].active
}

// Grid-map generators.

pub fn cell() -> impl Strategy<Value = CellValue> {
    prop_oneof![
        Just(CellValue::Free),
        Just(CellValue::Obstacle),
        Just(CellValue::Goal),
        Just(CellValue::Dispenser),
        Just(CellValue::Block),
    ]
}

pub fn offset() -> impl Strategy<Value = Offset> {
    (-50i64..50, -50i64..50).prop_map(|(dx, dy)| Offset::new(dx, dy))
}

pub fn point() -> impl Strategy<Value = Point> {
    (-1000i64..1000, -1000i64..1000).prop_map(|(x, y)| Point::new(x, y))
}

/// A small world and three agents, each of which has seen part of it from
/// its own origin. Returns the agents' maps and their origins.
pub fn shared_world() -> impl Strategy<Value = ([GridMap; 3], [Offset; 3])> {
    let world = prop::collection::btree_map((-6i64..6, -6i64..6), cell(), 0..40);
    (world, [offset(), offset(), offset()], prop::collection::vec(0u8..8, 144)).prop_map(|(world, origins, seen)| {
        let maps = [0, 1, 2].map(|k| {
            let mut m = GridMap::new(a(k + 1));
            for (i, (&(x, y), &v)) in world.iter().enumerate() {
                if seen[i % seen.len()] & (1 << k) != 0 {
                    m.insert(transform(Point::new(x, y), origins[k].invert()), v);
                }
            }
            m
        });
        (maps, origins)
    })
}

/// Offset taking `from` coordinates to `to` coordinates.
pub fn between(origins: &[Offset; 3], from: usize, to: usize) -> Offset {
    origins[from].compose(origins[to].invert())
}

pub fn arbitrary_map(owner: usize) -> impl Strategy<Value = GridMap> {
    prop::collection::btree_map((-4i64..4, -4i64..4), cell(), 0..20).prop_map(move |cells| {
        let mut m = GridMap::new(a(owner));
        for ((x, y), v) in cells {
            m.insert(Point::new(x, y), v);
        }
        m
    })
}

/// Cells where `b`, moved by `o`, disagrees with `a`.
pub fn expected_conflicts(a: &GridMap, b: &GridMap, o: Offset) -> Vec<Point> {
    let mut out: Vec<Point> = b
        .cells
        .iter()
        .map(|(p, v)| (transform(*p, o), *v))
        .filter(|(q, v)| a.get(*q).is_some_and(|w| w != *v))
        .map(|(q, _)| q)
        .collect();
    out.sort();
    out
}

pub fn merge_ok(a: &GridMap, b: &GridMap, o: Offset) -> GridMap {
    merge_grids(a, b, o).expect("maps of one world never conflict")
}
