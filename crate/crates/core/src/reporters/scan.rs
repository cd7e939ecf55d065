//! Reporter that classifies components one at a time with a per-component index.
//!
//! Both streams of a query share one cursor over the components in ascending
//! id order; a component classified for the other stream is parked in that
//! stream's queue, so each component is tested at most once per query.

use std::cell::Cell;
use std::collections::{btree_map, BTreeMap, VecDeque};
use std::sync::Arc;

use crate::component::{Component, ComponentId};
use crate::error::{Error, Result};
use crate::geometry::{Disk, Family, LineSegment, Shape};

use super::disk::DiskDistanceIndex;
use super::segment::SegmentIndex;

#[derive(Debug)]
pub struct ScanReporter {
    family: Family,
    members: BTreeMap<ComponentId, Arc<Component>>,
    objects: usize,
    work: Cell<u64>,
}

pub(crate) fn disk_index(c: &Component) -> &DiskDistanceIndex {
    c.disk_index.get_or_init(|| {
        let disks: Vec<Disk> = c
            .objects
            .iter()
            .map(|o| match o.shape {
                Shape::Disk(d) => d,
                other => panic!("disk index over a {} object", other.family()),
            })
            .collect();
        DiskDistanceIndex::new(disks)
    })
}

pub(crate) fn segment_index(c: &Component) -> &SegmentIndex {
    c.segment_index.get_or_init(|| {
        let segs: Vec<LineSegment> = c
            .objects
            .iter()
            .map(|o| match o.shape {
                Shape::Segment(s) => s,
                other => panic!("segment index over a {} object", other.family()),
            })
            .collect();
        SegmentIndex::new(segs)
    })
}

/// Does `s` intersect component `c`?
pub(crate) fn classify(c: &Component, s: &Shape, work: &mut u64) -> bool {
    match s {
        Shape::Disk(d) => disk_index(c).meets(d, work),
        Shape::Segment(q) => segment_index(c).meets(q, work),
        Shape::Axis(_) => {
            *work += c.size() as u64;
            c.touched_by(s)
        }
    }
}

impl ScanReporter {
    pub fn new(family: Family) -> Self {
        ScanReporter { family, members: BTreeMap::new(), objects: 0, work: Cell::new(0) }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn insert_component(&mut self, c: Arc<Component>) -> Result<()> {
        if self.members.contains_key(&c.id) {
            return Err(Error::DuplicateComponent(c.id));
        }
        if let Some(o) = c.objects.iter().find(|o| o.shape.family() != self.family) {
            return Err(Error::FamilyMismatch { expected: self.family, found: o.shape.family() });
        }
        self.objects += c.size();
        self.members.insert(c.id, c);
        Ok(())
    }

    pub fn delete_component(&mut self, id: ComponentId) -> Result<Arc<Component>> {
        let c = self.members.remove(&id).ok_or(Error::MissingComponent(id))?;
        self.objects -= c.size();
        Ok(c)
    }

    pub fn members(&self) -> &BTreeMap<ComponentId, Arc<Component>> {
        &self.members
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn work(&self) -> u64 {
        self.work.get()
    }

    pub fn query(&self, s: &Shape) -> ScanQuery<'_> {
        assert_eq!(s.family(), self.family, "reporter queried with a foreign family");
        ScanQuery {
            shape: *s,
            cursor: self.members.values(),
            parked: [VecDeque::new(), VecDeque::new()],
            work: &self.work,
        }
    }
}

pub struct ScanQuery<'a> {
    shape: Shape,
    cursor: btree_map::Values<'a, ComponentId, Arc<Component>>,
    /// Components already classified: index 1 intersecting, 0 not.
    parked: [VecDeque<(ComponentId, usize)>; 2],
    work: &'a Cell<u64>,
}

impl ScanQuery<'_> {
    fn step(&mut self, want: bool) -> Option<(ComponentId, usize)> {
        if let Some(item) = self.parked[want as usize].pop_front() {
            return Some(item);
        }
        let mut w = 0;
        let mut out = None;
        for c in self.cursor.by_ref() {
            w += 1;
            let hit = classify(c, &self.shape, &mut w);
            if hit == want {
                out = Some((c.id, c.size()));
                break;
            }
            self.parked[hit as usize].push_back((c.id, c.size()));
        }
        self.work.set(self.work.get() + w);
        out
    }

    pub fn next_intersecting(&mut self) -> Option<(ComponentId, usize)> {
        self.step(true)
    }

    pub fn next_nonintersecting(&mut self) -> Option<(ComponentId, usize)> {
        self.step(false)
    }
}
