//! Component (non-)intersection reporting for axis-aligned segments.
//!
//! For vertical queries every component is replaced by the vertical
//! decomposition of its horizontal segments. A vertical query `s` with lower
//! endpoint `p` intersects a component exactly when it reaches the segment
//! bounding `p`'s cell from above, so classification reduces to stabbing the
//! cells with `p` and comparing one coordinate. Horizontal queries use the
//! same machinery on the transposed vertical segments.
//!
//! Cells live in a sparse segment tree over doubled x-coordinates; each tree
//! node keeps a treap of its cells keyed by the upper bound and augmented with
//! the lower bound, which turns both report directions into three-sided
//! queries.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::component::{Component, ComponentId};
use crate::error::{Error, Result};
use crate::geometry::{AxisSegment, Coord, Orientation, Shape};

use super::treap::{Key, Payload, RangeScan, TreapForest, NIL};

/// Clip value for unbounded cell x-ranges (doubled coordinates).
pub const XINF: i64 = 1 << 22;
/// Sentinel for "no segment" above or below a cell.
pub const YINF: i64 = i64::MAX / 4;
const XSPAN: i64 = 1 << 23;

/// One cell of a component's vertical decomposition.
///
/// `x_lo..=x_hi` is in doubled coordinates so that single endpoint columns and
/// the open gaps between them are both integer ranges. The cell covers
/// `y_below < y <= y_above`; `y_above == None` marks a cell unbounded above
/// (no upper segment).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AxisCell {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_below: Option<Coord>,
    pub y_above: Option<Coord>,
}

impl AxisCell {
    pub fn contains(&self, x: Coord, y: Coord) -> bool {
        let xx = 2 * x;
        self.x_lo <= xx
            && xx <= self.x_hi
            && self.y_below.is_none_or(|b| b < y)
            && self.y_above.is_none_or(|a| y <= a)
    }

    fn below_key(&self) -> i64 {
        self.y_below.unwrap_or(-YINF)
    }

    fn above_key(&self) -> i64 {
        self.y_above.unwrap_or(YINF)
    }
}

/// Both decompositions of one component.
#[derive(Debug, Clone)]
pub struct AxisCells {
    /// Decomposition of the horizontal segments, used by vertical queries.
    pub for_vertical: Vec<AxisCell>,
    /// Decomposition of the vertical segments with x and y swapped, used by
    /// horizontal queries.
    pub for_horizontal: Vec<AxisCell>,
}

impl AxisCells {
    pub fn compute(segments: &[AxisSegment]) -> Result<Self> {
        let mut horiz = Vec::new();
        let mut vert = Vec::new();
        for s in segments {
            match s.orientation {
                Orientation::Horizontal => horiz.push((s.fixed, s.low, s.high)),
                Orientation::Vertical => vert.push((s.fixed, s.low, s.high)),
            }
        }
        Ok(AxisCells {
            for_vertical: vertical_decomposition(&horiz)?,
            for_horizontal: vertical_decomposition(&vert)?,
        })
    }
}

type Pair = (Option<Coord>, Option<Coord>);

fn neighbours(active: &BTreeSet<Coord>, y: Coord) -> Pair {
    (active.range(..y).next_back().copied(), active.range(y + 1..).next().copied())
}

/// Vertical decomposition of horizontal segments given as `(y, x_low, x_high)`.
///
/// Sweeps the elementary x-pieces (endpoint columns and the gaps between them)
/// and opens/closes a cell whenever a pair of vertically adjacent segments
/// appears or disappears, so the output has `O(#segments)` cells.
pub fn vertical_decomposition(segs: &[(Coord, Coord, Coord)]) -> Result<Vec<AxisCell>> {
    let mut events: BTreeMap<Coord, (Vec<Coord>, Vec<Coord>)> = BTreeMap::new();
    for &(y, lo, hi) in segs {
        events.entry(lo).or_default().0.push(y);
        events.entry(hi).or_default().1.push(y);
    }
    let mut active = BTreeSet::new();
    let mut open: HashMap<Pair, i64> = HashMap::from([((None, None), -XINF)]);
    let mut cells = Vec::new();
    let mut close = |open: &mut HashMap<Pair, i64>, pair: Pair, x_hi: i64| {
        let x_lo = open.remove(&pair).expect("closing a cell that was never opened");
        cells.push(AxisCell { x_lo, x_hi, y_below: pair.0, y_above: pair.1 });
    };

    for (&e, (starts, ends)) in &events {
        let xx = 2 * e;
        if !starts.is_empty() {
            let destroyed: BTreeSet<Pair> = starts.iter().map(|&y| neighbours(&active, y)).collect();
            for &y in starts {
                if !active.insert(y) {
                    return Err(Error::CollinearOverlap(format!("horizontal line {y} at x = {e}")));
                }
            }
            let mut created = BTreeSet::new();
            for &y in starts {
                let (p, s) = neighbours(&active, y);
                created.insert((p, Some(y)));
                created.insert((Some(y), s));
            }
            for pair in destroyed {
                close(&mut open, pair, xx - 1);
            }
            for pair in created {
                open.insert(pair, xx);
            }
        }
        if !ends.is_empty() {
            let mut destroyed = BTreeSet::new();
            for &y in ends {
                let (p, s) = neighbours(&active, y);
                destroyed.insert((p, Some(y)));
                destroyed.insert((Some(y), s));
            }
            for &y in ends {
                active.remove(&y);
            }
            let created: BTreeSet<Pair> = ends.iter().map(|&y| neighbours(&active, y)).collect();
            for pair in destroyed {
                close(&mut open, pair, xx);
            }
            for pair in created {
                open.insert(pair, xx + 1);
            }
        }
    }
    let rest: Vec<Pair> = open.keys().copied().collect();
    for pair in rest {
        close(&mut open, pair, XINF);
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy)]
struct SegNode {
    child: [u32; 2],
    treap: u32,
}

const EMPTY_NODE: SegNode = SegNode { child: [NIL, NIL], treap: NIL };

/// One orientation's primary structure: sparse segment tree over doubled
/// x-coordinates, treap of cells per canonical node.
#[derive(Debug, Clone)]
pub(crate) struct AxisSide {
    nodes: Vec<SegNode>,
    forest: TreapForest,
    next_uid: u32,
    entries: HashMap<ComponentId, Vec<(AxisCell, u32)>>,
    /// Empty cells reaching `-XINF`, keyed by their right end.
    left_ends: BTreeMap<(i64, u32), Payload>,
    /// Empty cells reaching `XINF`, keyed by their left end.
    right_ends: BTreeMap<(i64, u32), Payload>,
}

impl Default for AxisSide {
    fn default() -> Self {
        AxisSide {
            nodes: vec![EMPTY_NODE],
            forest: TreapForest::default(),
            next_uid: 0,
            entries: HashMap::new(),
            left_ends: BTreeMap::new(),
            right_ends: BTreeMap::new(),
        }
    }
}

enum Placement {
    Tree,
    LeftEnd(i64),
    RightEnd(i64),
}

/// Unbounded cells with no segment above or below only ever land in the
/// non-intersecting stream, so they live in two ordered maps instead of the
/// tree, where a prefix or suffix range would cost a full root-to-leaf path.
fn placement(cell: &AxisCell) -> Placement {
    if cell.y_below.is_some() || cell.y_above.is_some() {
        Placement::Tree
    } else if cell.x_lo == -XINF {
        Placement::LeftEnd(cell.x_hi)
    } else if cell.x_hi == XINF {
        Placement::RightEnd(cell.x_lo)
    } else {
        Placement::Tree
    }
}

impl AxisSide {
    /// Calls `f` on each canonical node of `[a, b]`, creating nodes on demand.
    fn for_canonical(&mut self, a: i64, b: i64, create: bool, mut f: impl FnMut(&mut Self, usize)) {
        // at most two pending nodes per level
        let mut stack = [(0u32, 0i64, 0i64); 64];
        stack[0] = (0, -XSPAN, XSPAN);
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let (node, l, r) = stack[top];
            if a <= l && r - 1 <= b {
                f(self, node as usize);
                continue;
            }
            let mid = l + (r - l) / 2;
            for (side, lo, hi) in [(0usize, l, mid), (1usize, mid, r)] {
                if a < hi && b >= lo {
                    let mut c = self.nodes[node as usize].child[side];
                    if c == NIL {
                        assert!(create, "segment tree path missing during removal");
                        self.nodes.push(EMPTY_NODE);
                        c = (self.nodes.len() - 1) as u32;
                        self.nodes[node as usize].child[side] = c;
                    }
                    stack[top] = (c, lo, hi);
                    top += 1;
                }
            }
        }
    }

    /// Inserts several components at once; canonical nodes that start empty
    /// get their treap built from sorted entries instead of one insert at a time.
    fn insert_many(&mut self, batch: &[(ComponentId, usize, &[AxisCell])]) {
        let cells_total: usize = batch.iter().map(|b| b.2.len()).sum();
        let mut pending: Vec<(u32, Key, i64, Payload)> = Vec::with_capacity(cells_total * 16);
        for &(comp, size, cells) in batch {
            let mut stored = Vec::with_capacity(cells.len());
            for cell in cells {
                let uid = self.next_uid;
                self.next_uid += 1;
                let key = (cell.above_key(), uid);
                let payload = Payload { comp, size: size as u32 };
                let below = cell.below_key();
                match placement(cell) {
                    Placement::Tree => self.for_canonical(cell.x_lo, cell.x_hi, true, |_, n| {
                        pending.push((n as u32, key, below, payload))
                    }),
                    Placement::LeftEnd(x) => {
                        self.left_ends.insert((x, uid), payload);
                    }
                    Placement::RightEnd(x) => {
                        self.right_ends.insert((x, uid), payload);
                    }
                }
                stored.push((*cell, uid));
            }
            self.entries.insert(comp, stored);
        }
        // bucket by node, then sort each bucket by key
        let mut start = vec![0usize; self.nodes.len() + 1];
        for e in &pending {
            start[e.0 as usize + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let mut fill = start.clone();
        let mut sorted = vec![(NIL, (0, 0), 0, Payload { comp: ComponentId(0), size: 0 }); pending.len()];
        for e in pending {
            let slot = &mut fill[e.0 as usize];
            sorted[*slot] = e;
            *slot += 1;
        }
        for n in 0..self.nodes.len() {
            let group = &mut sorted[start[n]..start[n + 1]];
            if group.is_empty() {
                continue;
            }
            group.sort_unstable_by_key(|e| e.1);
            let root = self.nodes[n].treap;
            self.nodes[n].treap = if root == NIL {
                self.forest.build_sorted(group.iter().map(|e| (e.1, e.2, e.3)))
            } else {
                group.iter().fold(root, |r, e| self.forest.insert(r, e.1, e.2, e.3))
            };
        }
    }

    fn remove(&mut self, comp: ComponentId) {
        let Some(stored) = self.entries.remove(&comp) else {
            return;
        };
        for (cell, uid) in stored {
            let key = (cell.above_key(), uid);
            match placement(&cell) {
                Placement::Tree => self.for_canonical(cell.x_lo, cell.x_hi, false, |side, n| {
                    let (root, found) = side.forest.remove(side.nodes[n].treap, key);
                    debug_assert!(found);
                    side.nodes[n].treap = root;
                }),
                Placement::LeftEnd(x) => {
                    self.left_ends.remove(&(x, uid));
                }
                Placement::RightEnd(x) => {
                    self.right_ends.remove(&(x, uid));
                }
            }
        }
    }

    /// Scan of the cells stabbed at `xx` with key in `[key_lo, key_hi]` and
    /// lower bound below `threshold`; `ends` adds the empty unbounded cells.
    fn scan(&self, xx: i64, key_lo: i64, key_hi: i64, threshold: i64, ends: bool) -> SideScan {
        let tail = if ends { Tail::Left(None) } else { Tail::Done };
        SideScan { node: 0, l: -XSPAN, r: XSPAN, xx, key_lo, key_hi, threshold, cur: None, tail }
    }

    fn cell_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy)]
enum Tail {
    Left(Option<(i64, u32)>),
    Right(Option<(i64, u32)>),
    Done,
}

/// Lazy walk down the stabbing path, draining each canonical treap in turn,
/// then the stabbed unbounded end cells if requested.
#[derive(Debug, Clone)]
pub(crate) struct SideScan {
    node: u32,
    l: i64,
    r: i64,
    xx: i64,
    key_lo: i64,
    key_hi: i64,
    threshold: i64,
    cur: Option<RangeScan>,
    tail: Tail,
}

impl SideScan {
    fn next_end(&mut self, side: &AxisSide, work: &mut u64) -> Option<Payload> {
        use std::ops::Bound::{Excluded, Included, Unbounded};
        loop {
            *work += 1;
            match self.tail {
                Tail::Left(last) => {
                    let lo = last.map_or(Included((self.xx, 0)), Excluded);
                    match side.left_ends.range((lo, Unbounded)).next() {
                        Some((&k, &p)) => {
                            self.tail = Tail::Left(Some(k));
                            return Some(p);
                        }
                        None => self.tail = Tail::Right(None),
                    }
                }
                Tail::Right(last) => {
                    let lo = last.map_or(Unbounded, Excluded);
                    match side.right_ends.range((lo, Included((self.xx, u32::MAX)))).next() {
                        Some((&k, &p)) => {
                            self.tail = Tail::Right(Some(k));
                            return Some(p);
                        }
                        None => self.tail = Tail::Done,
                    }
                }
                Tail::Done => return None,
            }
        }
    }

    fn next(&mut self, side: &AxisSide, work: &mut u64) -> Option<Payload> {
        loop {
            if let Some(scan) = self.cur.as_mut() {
                if let Some(p) = scan.next(&side.forest, work) {
                    return Some(p);
                }
                self.cur = None;
                let node = side.nodes[self.node as usize];
                let mid = self.l + (self.r - self.l) / 2;
                if self.xx < mid {
                    self.node = node.child[0];
                    self.r = mid;
                } else {
                    self.node = node.child[1];
                    self.l = mid;
                }
            }
            if self.node == NIL {
                return self.next_end(side, work);
            }
            *work += 1;
            let root = side.nodes[self.node as usize].treap;
            self.cur = Some(RangeScan::new(root, self.key_lo, self.key_hi, self.threshold));
        }
    }
}

/// Reporter over the components of one class of axis-aligned segments.
#[derive(Debug, Default)]
pub struct AxisReporter {
    vertical: AxisSide,
    horizontal: AxisSide,
    members: BTreeMap<ComponentId, Arc<Component>>,
    objects: usize,
    work: Cell<u64>,
}

pub(crate) fn cells_of(c: &Component) -> Result<&AxisCells> {
    if let Some(cells) = c.axis_cells.get() {
        return Ok(cells);
    }
    let segs: Vec<AxisSegment> = c
        .objects
        .iter()
        .map(|o| match o.shape {
            Shape::Axis(a) => Ok(a),
            other => Err(Error::FamilyMismatch {
                expected: crate::geometry::Family::Axis,
                found: other.family(),
            }),
        })
        .collect::<Result<_>>()?;
    let cells = AxisCells::compute(&segs)?;
    Ok(c.axis_cells.get_or_init(|| cells))
}

impl AxisReporter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build(components: impl IntoIterator<Item = Arc<Component>>) -> Result<Self> {
        let mut r = Self::new();
        let comps: Vec<Arc<Component>> = components.into_iter().collect();
        let mut vertical = Vec::with_capacity(comps.len());
        let mut horizontal = Vec::with_capacity(comps.len());
        for c in &comps {
            if r.members.insert(c.id, c.clone()).is_some() {
                return Err(Error::DuplicateComponent(c.id));
            }
            let cells = cells_of(c)?;
            vertical.push((c.id, c.size(), cells.for_vertical.as_slice()));
            horizontal.push((c.id, c.size(), cells.for_horizontal.as_slice()));
            r.objects += c.size();
        }
        r.vertical.insert_many(&vertical);
        r.horizontal.insert_many(&horizontal);
        Ok(r)
    }

    pub fn insert_component(&mut self, c: Arc<Component>) -> Result<()> {
        if self.members.contains_key(&c.id) {
            return Err(Error::DuplicateComponent(c.id));
        }
        let cells = cells_of(&c)?;
        self.vertical.insert_many(&[(c.id, c.size(), &cells.for_vertical)]);
        self.horizontal.insert_many(&[(c.id, c.size(), &cells.for_horizontal)]);
        self.objects += c.size();
        self.members.insert(c.id, c);
        Ok(())
    }

    pub fn delete_component(&mut self, id: ComponentId) -> Result<Arc<Component>> {
        let c = self.members.remove(&id).ok_or(Error::MissingComponent(id))?;
        self.vertical.remove(id);
        self.horizontal.remove(id);
        self.objects -= c.size();
        Ok(c)
    }

    pub fn members(&self) -> &BTreeMap<ComponentId, Arc<Component>> {
        &self.members
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn cell_count(&self) -> usize {
        self.vertical.cell_count() + self.horizontal.cell_count()
    }

    pub fn work(&self) -> u64 {
        self.work.get()
    }

    pub fn query(&self, s: &Shape) -> AxisQuery<'_> {
        let Shape::Axis(a) = *s else {
            panic!("axis reporter queried with a {} object", s.family());
        };
        let side = match a.orientation {
            Orientation::Vertical => &self.vertical,
            Orientation::Horizontal => &self.horizontal,
        };
        let xx = 2 * a.fixed;
        AxisQuery {
            side,
            work: &self.work,
            hit: side.scan(xx, a.low, a.high, a.low, false),
            miss: side.scan(xx, a.high + 1, YINF, a.low, true),
        }
    }
}

pub struct AxisQuery<'a> {
    side: &'a AxisSide,
    work: &'a Cell<u64>,
    hit: SideScan,
    miss: SideScan,
}

impl AxisQuery<'_> {
    fn step(&mut self, intersecting: bool) -> Option<(ComponentId, usize)> {
        let mut w = 0;
        let scan = if intersecting { &mut self.hit } else { &mut self.miss };
        let out = scan.next(self.side, &mut w);
        self.work.set(self.work.get() + w);
        out.map(|p| (p.comp, p.size as usize))
    }

    pub fn next_intersecting(&mut self) -> Option<(ComponentId, usize)> {
        self.step(true)
    }

    pub fn next_nonintersecting(&mut self) -> Option<(ComponentId, usize)> {
        self.step(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{touch, GeomObject};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(y: i64, lo: i64, hi: i64) -> AxisSegment {
        AxisSegment::horizontal(y, lo, hi)
    }

    #[test]
    fn single_segment_cells() {
        let cells = vertical_decomposition(&[(0, 0, 10)]).unwrap();
        assert_eq!(cells.len(), 4);
        let at = |x, y| cells.iter().filter(|c| c.contains(x, y)).count();
        for (x, y) in [(-5, 0), (0, 0), (0, 1), (5, -3), (10, 7), (11, 0), (5, 0)] {
            assert_eq!(at(x, y), 1, "point ({x},{y})");
        }
        let below = cells.iter().find(|c| c.contains(5, -1)).unwrap();
        assert_eq!(below.y_above, Some(0));
        let above = cells.iter().find(|c| c.contains(5, 1)).unwrap();
        assert_eq!(above.y_above, None);
    }

    #[test]
    fn cells_tile_and_point_to_first_segment_above() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut segs = Vec::new();
            let mut used = BTreeSet::new();
            for _ in 0..rng.random_range(0..12) {
                let y = rng.random_range(-20..20);
                if !used.insert(y) {
                    continue;
                }
                let lo = rng.random_range(-20..20);
                segs.push((y, lo, lo + rng.random_range(1..15)));
            }
            let cells = vertical_decomposition(&segs).unwrap();
            assert!(cells.len() <= 3 * segs.len() + 1);
            for x in -25..40 {
                for y in -25..25 {
                    let hits: Vec<_> = cells.iter().filter(|c| c.contains(x, y)).collect();
                    assert_eq!(hits.len(), 1);
                    let first_above = segs
                        .iter()
                        .filter(|&&(sy, lo, hi)| sy >= y && lo <= x && x <= hi)
                        .map(|&(sy, _, _)| sy)
                        .min();
                    assert_eq!(hits[0].y_above, first_above);
                }
            }
        }
    }

    #[test]
    fn touching_collinear_segments_rejected() {
        assert!(vertical_decomposition(&[(0, 0, 5), (0, 5, 9)]).is_err());
        assert!(vertical_decomposition(&[(0, 0, 5), (0, 2, 3)]).is_err());
        assert!(vertical_decomposition(&[(0, 0, 5), (0, 6, 9)]).is_ok());
    }

    fn comp(id: u32, segs: &[AxisSegment]) -> Arc<Component> {
        let objs =
            segs.iter().enumerate().map(|(i, s)| GeomObject::new(i as u64, Shape::Axis(*s))).collect();
        Arc::new(Component::new(ComponentId(id), objs))
    }

    fn drain(r: &AxisReporter, s: &Shape) -> (Vec<u32>, Vec<u32>) {
        let mut q = r.query(s);
        let mut hit: Vec<u32> = std::iter::from_fn(|| q.next_intersecting()).map(|c| c.0 .0).collect();
        let mut miss: Vec<u32> =
            std::iter::from_fn(|| q.next_nonintersecting()).map(|c| c.0 .0).collect();
        hit.sort_unstable();
        miss.sort_unstable();
        (hit, miss)
    }

    #[test]
    fn direct_crossing_and_query_above() {
        let r = AxisReporter::build([comp(0, &[h(0, 0, 10)])]).unwrap();
        let crossing = Shape::Axis(AxisSegment::vertical(5, -1, 1));
        assert_eq!(drain(&r, &crossing), (vec![0], vec![]));
        let above = Shape::Axis(AxisSegment::vertical(5, 1, 2));
        assert_eq!(drain(&r, &above), (vec![], vec![0]));
        // horizontal query: the component has no vertical segments
        let horiz = Shape::Axis(AxisSegment::horizontal(3, -4, 20));
        assert_eq!(drain(&r, &horiz), (vec![], vec![0]));
    }

    #[test]
    fn duplicate_and_missing_components() {
        let mut r = AxisReporter::new();
        r.insert_component(comp(1, &[h(0, 0, 1)])).unwrap();
        assert!(r.insert_component(comp(1, &[h(5, 0, 1)])).is_err());
        r.delete_component(ComponentId(1)).unwrap();
        assert_eq!(r.delete_component(ComponentId(1)).unwrap_err(), Error::MissingComponent(ComponentId(1)));
        let q = Shape::Axis(AxisSegment::vertical(0, -1, 1));
        assert_eq!(drain(&r, &q), (vec![], vec![]));
        r.insert_component(comp(1, &[h(0, 0, 1)])).unwrap();
        assert_eq!(drain(&r, &q), (vec![1], vec![]));
    }

    #[test]
    fn random_components_match_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            // even component lines, odd query lines: no collinear contact
            let mut comps = Vec::new();
            let mut next_line = -400;
            for id in 0..30 {
                let mut segs = Vec::new();
                for _ in 0..rng.random_range(1..5) {
                    next_line += 2 * rng.random_range(0..3);
                    let lo = rng.random_range(-100..100);
                    let hi = lo + rng.random_range(1..60);
                    segs.push(if rng.random_bool(0.5) {
                        AxisSegment::horizontal(next_line, lo, hi)
                    } else {
                        AxisSegment::vertical(next_line + 2000, lo, hi)
                    });
                }
                // keep only segments that don't collide on a line
                let mut lines = crate::geometry::AxisLineIndex::new();
                segs.retain(|s| lines.insert(s).is_ok());
                comps.push(comp(id, &segs));
            }
            let r = AxisReporter::build(comps.iter().cloned()).unwrap();
            for _ in 0..30 {
                let lo = rng.random_range(-150..150);
                let hi = lo + rng.random_range(1..120);
                let f = rng.random_range(-450..1900);
                let s = Shape::Axis(if rng.random_bool(0.5) {
                    AxisSegment::vertical(f * 2 + 1, lo, hi)
                } else {
                    AxisSegment::horizontal(f * 2 + 1, lo, hi)
                });
                let (hit, miss) = drain(&r, &s);
                let want: Vec<u32> = comps
                    .iter()
                    .filter(|c| c.objects.iter().any(|o| touch(&o.shape, &s)))
                    .map(|c| c.id.0)
                    .collect();
                let rest: Vec<u32> =
                    comps.iter().map(|c| c.id.0).filter(|id| !want.contains(id)).collect();
                assert_eq!(hit, want);
                assert_eq!(miss, rest);
            }
        }
    }
}
