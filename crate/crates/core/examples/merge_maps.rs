//! Two agents map overlapping parts of a grid from their own origins; the
//! leader folds the other map into its frame.
//!
//! ```bash
//! cargo run -p mapmerge --example merge_maps
//! ```

use mapmerge::coordmap::{merge_grids, CellValue, GridMap, Offset, Point};
use mapmerge::{AgentId, ModelError};

fn main() -> mapmerge::Result<()> {
    let mut a1 = GridMap::new(AgentId::new(1)?);
    a1.insert(Point::new(0, 0), CellValue::Free);
    a1.insert(Point::new(1, 0), CellValue::Obstacle);
    a1.insert(Point::new(2, 0), CellValue::Goal);

    // A2 started three cells east of A1.
    let mut a2 = GridMap::new(AgentId::new(2)?);
    a2.insert(Point::new(-1, 0), CellValue::Goal);
    a2.insert(Point::new(0, 0), CellValue::Free);
    a2.insert(Point::new(0, 1), CellValue::Dispenser);

    let a2_to_a1 = Offset::new(3, 0);
    let merged = merge_grids(&a1, &a2, a2_to_a1)?;
    println!("{}", merged.to_json());

    // With the wrong offset the maps disagree and nothing is overwritten.
    match merge_grids(&a1, &a2, Offset::new(2, 0)) {
        Err(ModelError::MergeConflict { coords }) => println!("conflict at {coords:?}"),
        other => println!("unexpected: {other:?}"),
    }

    // A2's view of the merged map is the same map, shifted back.
    let for_a2 = merged.reframe(a2_to_a1.invert(), AgentId::new(2)?);
    assert_eq!(merge_grids(&for_a2, &a2, Offset::IDENTITY)?, for_a2);
    println!("A2 sees {} cells", for_a2.len());
    Ok(())
}
