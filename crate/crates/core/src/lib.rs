//! Fully dynamic connectivity for intersection graphs of planar objects.
//!
//! The [`Engine`] maintains the components of the intersection graph of a set
//! of axis-aligned segments, line segments, or disks under insertions and
//! deletions, answering connectivity queries and the global component count.

pub mod classes;
pub mod component;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod reporters;
pub mod separator;
pub mod workload;

pub use classes::{ClassId, ClassRegistry};
pub use component::{Component, ComponentId};
pub use engine::{Engine, EngineConfig, QPolicy};
pub use error::{Error, Result};
pub use geometry::{AxisSegment, Coord, Disk, Family, GeomObject, LineSegment, ObjectId, Point, Shape};
