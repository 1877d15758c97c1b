//! Drives the model by hand through the first merge of a three-agent team,
//! printing what each process could do next.
//!
//! ```bash
//! cargo run -p mapmerge --example step_protocol
//! ```

use mapmerge::protocol::EventKind;
use mapmerge::scenarios::builtin;
use mapmerge::Model;

fn main() -> mapmerge::Result<()> {
    let model = Model::with_agents(3)?;
    let mut config = model.initial_config();
    let trace = builtin("scenario1").expect("built in").query.trace;

    for event in &trace {
        let enabled = model.enabled_events(&config);
        println!("[{}] {} events enabled", config.partition_label(), enabled.len());
        if !enabled.contains(event) {
            // The leader has to begin the merge before it can ask around.
            let internal = enabled.iter().find(|e| e.kind() == EventKind::BeginMerge).expect("begin_merge enabled");
            println!("  (internal) {internal}");
            config = model.apply_event(&config, internal)?;
        }
        println!("  {event}");
        config = model.apply_event(&config, event)?;
    }
    println!("[{}] quiescent: {}", config.partition_label(), config.is_quiescent());

    let refused = model.apply_event(&config, &trace[0]);
    println!("replaying the first event now: {}", refused.unwrap_err());
    Ok(())
}
