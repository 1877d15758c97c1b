//! Random-walk properties of the composed model.

mod common;

use common::*;
use mapmerge::protocol::{participants, EventLabel, Mutations};
use mapmerge::{Configuration, Model, ModelOptions};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn model(n: usize, harness: bool, merge_set_max: usize) -> Model {
    Model::new(n, ModelOptions { harness, merge_set_max, mutations: Mutations::default() }).unwrap()
}

/// Follows `choices` through the model, one pick per step, stopping early
/// when nothing is enabled.
fn walk(m: &Model, choices: &[usize]) -> Vec<(Configuration, EventLabel, Configuration)> {
    let mut c = m.initial_config();
    let mut steps = Vec::new();
    for &pick in choices {
        let succ = m.successors(&c);
        if succ.is_empty() {
            break;
        }
        let (e, next) = succ[pick % succ.len()].clone();
        steps.push((c, e, next.clone()));
        c = next;
    }
    steps
}

fn params() -> impl Strategy<Value = (usize, bool, usize, Vec<usize>)> {
    (2usize..=5, any::<bool>(), 1usize..=3, prop::collection::vec(any::<usize>(), 0..120))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn steps_are_deterministic_and_replayable((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (src, e, dst) in walk(&m, &choices) {
            prop_assert_eq!(m.apply_event(&src, &e).unwrap(), dst.clone());
            prop_assert_eq!(m.apply_event(&src, &e).unwrap(), dst);
        }
    }

    #[test]
    fn enabled_events_are_sorted_unique_and_valid((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (src, _, _) in walk(&m, &choices) {
            let enabled = m.enabled_events(&src);
            prop_assert!(enabled.windows(2).all(|w| w[0] < w[1]));
            for e in &enabled {
                prop_assert!(e.validate(m.universe()).is_ok());
                prop_assert!(!participants(e, m.universe()).unwrap().is_empty());
            }
            let labels: Vec<_> = m.successors(&src).into_iter().map(|(e, _)| e).collect();
            prop_assert_eq!(labels, enabled);
        }
    }

    #[test]
    fn active_sets_only_grow((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (src, e, dst) in walk(&m, &choices) {
            for (before, after) in src.leaders.iter().zip(&dst.leaders) {
                if before.active && after.active {
                    prop_assert!(before.agent_set.is_subset(after.agent_set), "{} shrank on {}", before.id, e);
                }
                prop_assert!(before.active || !after.active, "{} reactivated on {}", before.id, e);
            }
            let lost = src.active_leaders().count() - dst.active_leaders().count();
            let expected = usize::from(matches!(e, EventLabel::MergeCompleted { .. }));
            prop_assert_eq!(lost, expected);
        }
    }

    #[test]
    fn quiescent_states_are_partitions((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (_, _, dst) in walk(&m, &choices) {
            if quiescent(&dst) {
                prop_assert!(partition_holds(&dst), "{}", dst.partition_label());
            }
            prop_assert_eq!(quiescent(&dst), dst.is_quiescent());
        }
    }

    #[test]
    fn confirm_merge_only_goes_down_the_order((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (src, e, _) in walk(&m, &choices) {
            match e {
                EventLabel::ConfirmMerge { req_leader, other_leader } => {
                    prop_assert!(req_leader.index() < other_leader.index())
                }
                EventLabel::MergeConfirmed { other_leader, .. } => prop_assert!(leader_active(&src, other_leader)),
                _ => {}
            }
        }
    }

    #[test]
    fn event_json_round_trips((n, harness, msm, choices) in params()) {
        let m = model(n, harness, msm);
        for (_, e, _) in walk(&m, &choices) {
            let json = serde_json::to_string(&e).unwrap();
            prop_assert_eq!(serde_json::from_str::<EventLabel>(&json).unwrap(), e);
        }
    }
}

#[test]
fn every_walk_can_still_finish() {
    // From random mid-run states, a terminal state stays reachable.
    let m = model(4, true, 1);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..20 {
        let choices = prop::collection::vec(any::<usize>(), 0..60).new_tree(&mut runner).unwrap().current();
        let start = walk(&m, &choices).last().map(|s| s.2.clone()).unwrap_or_else(|| m.initial_config());
        let reach = {
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![start];
            let mut found = false;
            while let Some(c) = stack.pop() {
                if m.is_terminal(&c) {
                    found = true;
                    break;
                }
                if seen.insert(c.clone()) {
                    stack.extend(m.successors(&c).into_iter().map(|(_, d)| d));
                }
            }
            found
        };
        assert!(reach);
    }
}
