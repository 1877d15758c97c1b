//! Asks whether the model can perform a hand-written trace, and prints the
//! full execution behind it.
//!
//! ```bash
//! cargo run -p mapmerge --example trace_check
//! ```

use mapmerge::explorer::{has_trace, TraceQuery};
use mapmerge::{agents, AgentId, EventLabel, Model};

fn main() -> mapmerge::Result<()> {
    let a = |i| AgentId::new(i);
    let model = Model::with_agents(3)?;

    // A3 wants A1's map: it must be refused, since A1 outranks A3.
    let query = TraceQuery::new(vec![
        EventLabel::RequestMerge { agent: a(3)?, leader: a(3)?, merge_set: agents![1] },
        EventLabel::RemoveReasoningAbout { req_agent: a(3)?, other_agent: a(1)? },
    ])
    .forbidding([EventLabel::ConfirmMerge { req_leader: a(3)?, other_leader: a(1)? }]);
    query.validate(&model)?;

    let result = has_trace(&model, &model.initial_config(), &query);
    println!("found: {} ({} search nodes)", result.found, result.explored);
    if let Some(w) = result.witness {
        for e in &w.events {
            let mark = if query.alphabet.contains(e) { "*" } else { " " };
            println!(" {mark} {e}");
        }
    }

    let inverted = TraceQuery::new(vec![EventLabel::ConfirmMerge { req_leader: a(3)?, other_leader: a(1)? }]);
    println!("confirm_merge.A3.A1 possible: {}", has_trace(&model, &model.initial_config(), &inverted).found);
    Ok(())
}
