//! Writes the two-agent state graph as DOT (or JSON with `json`).
//!
//! ```bash
//! cargo run -p mapmerge --example export_graph > graph.dot
//! dot -Tsvg graph.dot -o graph.svg
//! ```

use mapmerge::explorer::{explore, export_graph, ExploreOptions, GraphFormat};
use mapmerge::Model;

fn main() -> mapmerge::Result<()> {
    let format: GraphFormat = std::env::args().nth(1).as_deref().unwrap_or("dot").parse()?;
    let model = Model::with_agents(2)?;
    let graph = explore(&model, &model.initial_config(), &ExploreOptions::default());
    print!("{}", export_graph(&graph, format));
    Ok(())
}
