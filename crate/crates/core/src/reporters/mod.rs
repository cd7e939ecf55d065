//! Per-class reporters: given a query object, lazily list the class's
//! components that intersect it and, separately, those that do not.

pub mod axis;
mod bvh;
pub mod disk;
pub mod scan;
pub mod segment;
mod treap;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::component::{Component, ComponentId};
use crate::error::Result;
use crate::geometry::{Family, Shape};

pub use axis::{AxisCell, AxisCells, AxisQuery, AxisReporter};
pub use disk::{cmp_weighted, DiskDistanceIndex};
pub use scan::{ScanQuery, ScanReporter};
pub use segment::SegmentIndex;

#[derive(Debug)]
pub enum Reporter {
    Axis(AxisReporter),
    Scan(ScanReporter),
}

impl Reporter {
    /// Empty reporter for `family`: the cell structure for axis-aligned
    /// segments, per-component scanning otherwise.
    pub fn new(family: Family) -> Self {
        match family {
            Family::Axis => Reporter::Axis(AxisReporter::new()),
            f => Reporter::Scan(ScanReporter::new(f)),
        }
    }

    /// Scanning reporter regardless of family; the axis variant is a brute-force reference.
    pub fn scanning(family: Family) -> Self {
        Reporter::Scan(ScanReporter::new(family))
    }

    pub fn build(family: Family, components: impl IntoIterator<Item = Arc<Component>>) -> Result<Self> {
        match family {
            Family::Axis => Ok(Reporter::Axis(AxisReporter::build(components)?)),
            f => {
                let mut r = ScanReporter::new(f);
                for c in components {
                    r.insert_component(c)?;
                }
                Ok(Reporter::Scan(r))
            }
        }
    }

    pub fn insert_component(&mut self, c: Arc<Component>) -> Result<()> {
        match self {
            Reporter::Axis(r) => r.insert_component(c),
            Reporter::Scan(r) => r.insert_component(c),
        }
    }

    pub fn delete_component(&mut self, id: ComponentId) -> Result<Arc<Component>> {
        match self {
            Reporter::Axis(r) => r.delete_component(id),
            Reporter::Scan(r) => r.delete_component(id),
        }
    }

    pub fn members(&self) -> &BTreeMap<ComponentId, Arc<Component>> {
        match self {
            Reporter::Axis(r) => r.members(),
            Reporter::Scan(r) => r.members(),
        }
    }

    pub fn contains(&self, id: ComponentId) -> bool {
        self.members().contains_key(&id)
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        self.members().is_empty()
    }

    /// Total number of objects over all components.
    pub fn object_count(&self) -> usize {
        match self {
            Reporter::Axis(r) => r.object_count(),
            Reporter::Scan(r) => r.object_count(),
        }
    }

    /// Cumulative instrumentation counter.
    pub fn work(&self) -> u64 {
        match self {
            Reporter::Axis(r) => r.work(),
            Reporter::Scan(r) => r.work(),
        }
    }

    pub fn query(&self, s: &Shape) -> ReportQuery<'_> {
        match self {
            Reporter::Axis(r) => ReportQuery::Axis(r.query(s)),
            Reporter::Scan(r) => ReportQuery::Scan(r.query(s)),
        }
    }

    pub fn stream_intersecting(&self, s: &Shape) -> impl Iterator<Item = (ComponentId, usize)> + '_ {
        let mut q = self.query(s);
        std::iter::from_fn(move || q.next_intersecting())
    }

    pub fn stream_nonintersecting(&self, s: &Shape) -> impl Iterator<Item = (ComponentId, usize)> + '_ {
        let mut q = self.query(s);
        std::iter::from_fn(move || q.next_nonintersecting())
    }
}

/// Both streams of one query; they may be advanced in any interleaving.
pub enum ReportQuery<'a> {
    Axis(AxisQuery<'a>),
    Scan(ScanQuery<'a>),
}

impl ReportQuery<'_> {
    pub fn next_intersecting(&mut self) -> Option<(ComponentId, usize)> {
        match self {
            ReportQuery::Axis(q) => q.next_intersecting(),
            ReportQuery::Scan(q) => q.next_intersecting(),
        }
    }

    pub fn next_nonintersecting(&mut self) -> Option<(ComponentId, usize)> {
        match self {
            ReportQuery::Axis(q) => q.next_nonintersecting(),
            ReportQuery::Scan(q) => q.next_nonintersecting(),
        }
    }
}
