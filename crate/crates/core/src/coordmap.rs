//! Grid maps with private origins.
//!
//! Every agent starts out believing it stands at `(0, 0)`, so two agents'
//! maps of the same world differ by a translation. Merging a map into a
//! leader's map means translating it into the leader's frame and taking the
//! union; a cell the two maps disagree on is an error, never overwritten.

use std::collections::BTreeMap;
use std::ops::{Add, Neg};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::protocol::AgentId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

/// Translation between two frames, in grid cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Offset {
    pub dx: i64,
    pub dy: i64,
}

impl Offset {
    pub const IDENTITY: Offset = Offset { dx: 0, dy: 0 };

    pub const fn new(dx: i64, dy: i64) -> Self {
        Offset { dx, dy }
    }

    pub fn compose(self, other: Offset) -> Offset {
        Offset { dx: self.dx + other.dx, dy: self.dy + other.dy }
    }

    pub fn invert(self) -> Offset {
        Offset { dx: -self.dx, dy: -self.dy }
    }
}

impl Add for Offset {
    type Output = Offset;

    fn add(self, rhs: Offset) -> Offset {
        self.compose(rhs)
    }
}

impl Neg for Offset {
    type Output = Offset;

    fn neg(self) -> Offset {
        self.invert()
    }
}

pub fn compose(a: Offset, b: Offset) -> Offset {
    a.compose(b)
}

pub fn transform(p: Point, o: Offset) -> Point {
    Point { x: p.x + o.dx, y: p.y + o.dy }
}

/// What an agent has seen in a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellValue {
    Free,
    Obstacle,
    Goal,
    Dispenser,
    Block,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    pub cells: BTreeMap<Point, CellValue>,
    pub owner_frame: AgentId,
}

impl GridMap {
    pub fn new(owner_frame: AgentId) -> Self {
        GridMap { cells: BTreeMap::new(), owner_frame }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn insert(&mut self, p: Point, v: CellValue) -> Option<CellValue> {
        self.cells.insert(p, v)
    }

    pub fn get(&self, p: Point) -> Option<CellValue> {
        self.cells.get(&p).copied()
    }

    /// The same map expressed in another frame: every cell moved by `offset`.
    pub fn reframe(&self, offset: Offset, owner_frame: AgentId) -> GridMap {
        GridMap { cells: self.cells.iter().map(|(p, v)| (transform(*p, offset), *v)).collect(), owner_frame }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid map serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Merges `b` into `a`'s frame. `offset_b_to_a` maps `b` coordinates to `a`
/// coordinates.
pub fn merge_grids(a: &GridMap, b: &GridMap, offset_b_to_a: Offset) -> Result<GridMap, ModelError> {
    let mut merged = a.clone();
    let mut conflicts = Vec::new();
    for (p, v) in &b.cells {
        let q = transform(*p, offset_b_to_a);
        match merged.cells.get(&q) {
            Some(existing) if existing != v => conflicts.push(q),
            Some(_) => {}
            None => {
                merged.cells.insert(q, *v);
            }
        }
    }
    if conflicts.is_empty() {
        Ok(merged)
    } else {
        conflicts.sort();
        Err(ModelError::MergeConflict { coords: conflicts })
    }
}

#[derive(Serialize, Deserialize)]
struct CellEntry {
    x: i64,
    y: i64,
    cell: CellValue,
}

#[derive(Serialize, Deserialize)]
struct GridMapRepr {
    owner_frame: AgentId,
    cells: Vec<CellEntry>,
}

impl Serialize for GridMap {
    /// Cells as a list sorted by `(x, y)`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GridMapRepr {
            owner_frame: self.owner_frame,
            cells: self.cells.iter().map(|(p, v)| CellEntry { x: p.x, y: p.y, cell: *v }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GridMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GridMapRepr::deserialize(deserializer)?;
        let mut cells = BTreeMap::new();
        for c in repr.cells {
            if cells.insert(Point::new(c.x, c.y), c.cell).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate cell ({}, {})", c.x, c.y)));
            }
        }
        Ok(GridMap { cells, owner_frame: repr.owner_frame })
    }
}
