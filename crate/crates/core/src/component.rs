use std::fmt;
use std::sync::OnceLock;

use crate::geometry::{touch, GeomObject, Shape};
use crate::reporters::axis::AxisCells;
use crate::reporters::disk::DiskDistanceIndex;
use crate::reporters::segment::SegmentIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId(pub u32);

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A connected component of the static set: its objects plus lazily built
/// per-backend search structures, shared by every reporter that holds it.
#[derive(Debug)]
pub struct Component {
    pub id: ComponentId,
    pub objects: Vec<GeomObject>,
    pub(crate) axis_cells: OnceLock<AxisCells>,
    pub(crate) disk_index: OnceLock<DiskDistanceIndex>,
    pub(crate) segment_index: OnceLock<SegmentIndex>,
}

impl Component {
    pub fn new(id: ComponentId, objects: Vec<GeomObject>) -> Self {
        Component {
            id,
            objects,
            axis_cells: OnceLock::new(),
            disk_index: OnceLock::new(),
            segment_index: OnceLock::new(),
        }
    }

    /// The same objects under a new id, keeping any search structures already built.
    pub fn renumbered(&self, id: ComponentId) -> Self {
        let c = Component::new(id, self.objects.clone());
        if let Some(x) = self.axis_cells.get() {
            let _ = c.axis_cells.set(x.clone());
        }
        if let Some(x) = self.disk_index.get() {
            let _ = c.disk_index.set(x.clone());
        }
        if let Some(x) = self.segment_index.get() {
            let _ = c.segment_index.set(x.clone());
        }
        c
    }

    /// Number of objects.
    pub fn size(&self) -> usize {
        self.objects.len()
    }

    /// Direct test: does `s` intersect any object of this component?
    pub fn touched_by(&self, s: &Shape) -> bool {
        self.objects.iter().any(|o| touch(&o.shape, s))
    }
}
