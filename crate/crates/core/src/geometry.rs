//! Exact integer geometry for the three supported object families.
//!
//! Every decision is made with integer arithmetic. Coordinates are bounded by
//! [`COORD_LIMIT`] in absolute value, so every cross product and squared
//! distance fits comfortably in an `i128`. All objects are closed point sets:
//! touching at a single point counts as intersecting.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = i64;

/// Largest admissible absolute coordinate (and radius).
pub const COORD_LIMIT: Coord = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub const fn new(x: Coord, y: Coord) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> i128 {
        let dx = (self.x - other.x) as i128;
        let dy = (self.y - other.y) as i128;
        dx * dx + dy * dy
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Axis-parallel segment. A horizontal segment lies on `y = fixed` and spans
/// `x ∈ [low, high]`; a vertical one lies on `x = fixed` and spans `y ∈ [low, high]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisSegment {
    pub orientation: Orientation,
    pub fixed: Coord,
    pub low: Coord,
    pub high: Coord,
}

impl AxisSegment {
    pub fn horizontal(y: Coord, x_low: Coord, x_high: Coord) -> Self {
        AxisSegment { orientation: Orientation::Horizontal, fixed: y, low: x_low, high: x_high }
    }

    pub fn vertical(x: Coord, y_low: Coord, y_high: Coord) -> Self {
        AxisSegment { orientation: Orientation::Vertical, fixed: x, low: y_low, high: y_high }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        match self.orientation {
            Orientation::Horizontal => {
                (Point::new(self.low, self.fixed), Point::new(self.high, self.fixed))
            }
            Orientation::Vertical => {
                (Point::new(self.fixed, self.low), Point::new(self.fixed, self.high))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSegment {
    pub p1: Point,
    pub p2: Point,
}

impl LineSegment {
    pub fn new(p1: Point, p2: Point) -> Self {
        LineSegment { p1, p2 }
    }
}

/// Closed disk with integer center and radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: Coord,
}

impl Disk {
    pub fn new(x: Coord, y: Coord, radius: Coord) -> Self {
        Disk { center: Point::new(x, y), radius }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Axis,
    Segment,
    Disk,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Axis, Family::Segment, Family::Disk];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Axis => "axis",
            Family::Segment => "segment",
            Family::Disk => "disk",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis" => Ok(Family::Axis),
            "segment" => Ok(Family::Segment),
            "disk" => Ok(Family::Disk),
            other => Err(Error::InvalidParams(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Axis(AxisSegment),
    Segment(LineSegment),
    Disk(Disk),
}

/// Inclusive integer bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BBox {
    pub min_x: Coord,
    pub min_y: Coord,
    pub max_x: Coord,
    pub max_y: Coord,
}

impl BBox {
    pub fn overlaps(&self, other: &BBox) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_y <= other.max_y
            && other.min_y <= self.max_y
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }
}

impl Shape {
    pub fn family(&self) -> Family {
        match self {
            Shape::Axis(_) => Family::Axis,
            Shape::Segment(_) => Family::Segment,
            Shape::Disk(_) => Family::Disk,
        }
    }

    /// Checks the per-shape invariants and the coordinate bound.
    pub fn validate(&self) -> Result<()> {
        let check = |v: Coord| {
            if v.abs() > COORD_LIMIT {
                Err(Error::CoordinateOutOfRange(v))
            } else {
                Ok(())
            }
        };
        match *self {
            Shape::Axis(a) => {
                check(a.fixed)?;
                check(a.low)?;
                check(a.high)?;
                if a.low >= a.high {
                    return Err(Error::InvalidShape(format!(
                        "axis segment needs low < high, got [{}, {}]",
                        a.low, a.high
                    )));
                }
            }
            Shape::Segment(s) => {
                for v in [s.p1.x, s.p1.y, s.p2.x, s.p2.y] {
                    check(v)?;
                }
                if s.p1 == s.p2 {
                    return Err(Error::InvalidShape("segment endpoints coincide".into()));
                }
            }
            Shape::Disk(d) => {
                check(d.center.x)?;
                check(d.center.y)?;
                check(d.radius)?;
                if d.radius < 1 {
                    return Err(Error::InvalidShape(format!(
                        "disk radius must be >= 1, got {}",
                        d.radius
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn bbox(&self) -> BBox {
        match *self {
            Shape::Axis(a) => {
                let (p, q) = a.endpoints();
                BBox { min_x: p.x, min_y: p.y, max_x: q.x, max_y: q.y }
            }
            Shape::Segment(s) => BBox {
                min_x: s.p1.x.min(s.p2.x),
                min_y: s.p1.y.min(s.p2.y),
                max_x: s.p1.x.max(s.p2.x),
                max_y: s.p1.y.max(s.p2.y),
            },
            Shape::Disk(d) => BBox {
                min_x: d.center.x - d.radius,
                min_y: d.center.y - d.radius,
                max_x: d.center.x + d.radius,
                max_y: d.center.y + d.radius,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeomObject {
    pub id: ObjectId,
    pub shape: Shape,
}

impl GeomObject {
    pub fn new(id: u64, shape: Shape) -> Self {
        GeomObject { id: ObjectId(id), shape }
    }
}

/// Sign of the cross product `(b - a) × (c - a)`.
pub fn orient(a: Point, b: Point, c: Point) -> Ordering {
    let abx = (b.x - a.x) as i128;
    let aby = (b.y - a.y) as i128;
    let acx = (c.x - a.x) as i128;
    let acy = (c.y - a.y) as i128;
    (abx * acy - aby * acx).cmp(&0)
}

/// `c` lies in the bounding box of `a`,`b` (used only for collinear points).
fn in_span(a: Point, b: Point, c: Point) -> bool {
    a.x.min(b.x) <= c.x && c.x <= a.x.max(b.x) && a.y.min(b.y) <= c.y && c.y <= a.y.max(b.y)
}

/// Closed segment-segment intersection test.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let o1 = orient(a1, a2, b1);
    let o2 = orient(a1, a2, b2);
    let o3 = orient(b1, b2, a1);
    let o4 = orient(b1, b2, a2);
    // Endpoints strictly or weakly on opposite sides of each other's lines.
    // When one orientation is zero and the lines are not parallel, the
    // collinear endpoint is the crossing point, so this is still exact.
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == Ordering::Equal && in_span(a1, a2, b1))
        || (o2 == Ordering::Equal && in_span(a1, a2, b2))
        || (o3 == Ordering::Equal && in_span(b1, b2, a1))
        || (o4 == Ordering::Equal && in_span(b1, b2, a2))
}

fn axis_intersect(a: &AxisSegment, b: &AxisSegment) -> bool {
    if a.orientation == b.orientation {
        a.fixed == b.fixed && a.low <= b.high && b.low <= a.high
    } else {
        a.low <= b.fixed && b.fixed <= a.high && b.low <= a.fixed && a.fixed <= b.high
    }
}

fn disks_intersect(a: &Disk, b: &Disk) -> bool {
    let r = (a.radius + b.radius) as i128;
    a.center.dist2(b.center) <= r * r
}

/// Intersection test for two shapes known to share a family.
///
/// Panics on a family mismatch; use [`intersects`] at API boundaries.
pub fn touch(a: &Shape, b: &Shape) -> bool {
    match (a, b) {
        (Shape::Axis(a), Shape::Axis(b)) => axis_intersect(a, b),
        (Shape::Segment(a), Shape::Segment(b)) => segments_intersect(a.p1, a.p2, b.p1, b.p2),
        (Shape::Disk(a), Shape::Disk(b)) => disks_intersect(a, b),
        _ => panic!("touch() called on mixed families {:?} / {:?}", a.family(), b.family()),
    }
}

/// True iff the closed point sets of `a` and `b` share at least one point.
pub fn intersects(a: &GeomObject, b: &GeomObject) -> Result<bool> {
    shapes_intersect(&a.shape, &b.shape)
}

pub fn shapes_intersect(a: &Shape, b: &Shape) -> Result<bool> {
    if a.family() != b.family() {
        return Err(Error::FamilyMismatch { expected: a.family(), found: b.family() });
    }
    Ok(touch(a, b))
}

/// All unordered intersecting pairs, each reported once as `(smaller id, larger id)`
/// and sorted. Uses an x-sorted sweep over bounding boxes, so the cost is
/// proportional to the number of box-overlapping pairs rather than `n²`.
pub fn pairwise_intersections(objs: &[GeomObject]) -> Vec<(ObjectId, ObjectId)> {
    let shapes: Vec<Shape> = objs.iter().map(|o| o.shape).collect();
    pairwise_intersections_idx(&shapes)
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (objs[i].id, objs[j].id);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Index-based variant: pairs `(i, j)` of positions in `shapes`, `i < j`.
pub fn pairwise_intersections_idx(shapes: &[Shape]) -> Vec<(usize, usize)> {
    let boxes: Vec<BBox> = shapes.iter().map(Shape::bbox).collect();
    let mut order: Vec<usize> = (0..shapes.len()).collect();
    order.sort_by_key(|&i| boxes[i].min_x);
    let mut out = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let bi = &boxes[i];
        for &j in &order[k + 1..] {
            let bj = &boxes[j];
            if bj.min_x > bi.max_x {
                break;
            }
            if bi.min_y <= bj.max_y && bj.min_y <= bi.max_y && touch(&shapes[i], &shapes[j]) {
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Tracks live axis segments per supporting line so that collinear overlaps
/// (including endpoint touching) are rejected at ingest.
#[derive(Debug, Default, Clone)]
pub struct AxisLineIndex {
    lines: HashMap<(Orientation, Coord), BTreeMap<Coord, Coord>>,
}

impl AxisLineIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&self, seg: &AxisSegment) -> Result<()> {
        if let Some(line) = self.lines.get(&(seg.orientation, seg.fixed)) {
            if let Some((&lo, &hi)) = line.range(..=seg.high).next_back() {
                if hi >= seg.low {
                    return Err(Error::CollinearOverlap(format!(
                        "{:?} line {} spans [{lo}, {hi}] and [{}, {}]",
                        seg.orientation, seg.fixed, seg.low, seg.high
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, seg: &AxisSegment) -> Result<()> {
        self.check(seg)?;
        self.lines.entry((seg.orientation, seg.fixed)).or_default().insert(seg.low, seg.high);
        Ok(())
    }

    pub fn remove(&mut self, seg: &AxisSegment) {
        let key = (seg.orientation, seg.fixed);
        if let Some(line) = self.lines.get_mut(&key) {
            line.remove(&seg.low);
            if line.is_empty() {
                self.lines.remove(&key);
            }
        }
    }
}

/// Validates a batch of objects as one workload: shared family, per-shape
/// invariants, and (for axis segments) no collinear overlaps.
pub fn validate_batch(objs: &[GeomObject]) -> Result<Option<Family>> {
    let Some(first) = objs.first() else {
        return Ok(None);
    };
    let family = first.shape.family();
    let mut lines = AxisLineIndex::new();
    for o in objs {
        if o.shape.family() != family {
            return Err(Error::FamilyMismatch { expected: family, found: o.shape.family() });
        }
        o.shape.validate()?;
        if let Shape::Axis(a) = &o.shape {
            lines.insert(a)?;
        }
    }
    Ok(Some(family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Shape {
        Shape::Segment(LineSegment::new(Point::new(x1, y1), Point::new(x2, y2)))
    }

    #[test]
    fn tangent_disks_intersect() {
        assert!(touch(&Shape::Disk(Disk::new(0, 0, 5)), &Shape::Disk(Disk::new(9, 0, 4))));
        assert!(!touch(&Shape::Disk(Disk::new(0, 0, 5)), &Shape::Disk(Disk::new(10, 0, 4))));
        // containment is intersection for closed disks
        assert!(touch(&Shape::Disk(Disk::new(0, 0, 50)), &Shape::Disk(Disk::new(3, 0, 1))));
    }

    #[test]
    fn crossing_segments() {
        assert!(touch(&seg(0, 0, 4, 4), &seg(0, 4, 4, 0)));
        assert!(!touch(&seg(0, 0, 1, 1), &seg(3, 3, 4, 5)));
        // collinear overlap and collinear disjoint
        assert!(touch(&seg(0, 0, 4, 4), &seg(2, 2, 6, 6)));
        assert!(!touch(&seg(0, 0, 1, 1), &seg(2, 2, 6, 6)));
        // endpoint touching
        assert!(touch(&seg(0, 0, 2, 0), &seg(2, 0, 2, 5)));
        // T-junction
        assert!(touch(&seg(0, 0, 4, 0), &seg(2, 0, 2, 5)));
        assert!(!touch(&seg(0, 0, 4, 0), &seg(2, 1, 2, 5)));
    }

    #[test]
    fn axis_cases() {
        let h = Shape::Axis(AxisSegment::horizontal(0, 0, 2));
        let v = Shape::Axis(AxisSegment::vertical(5, -1, 1));
        assert!(!touch(&h, &v));
        let v2 = Shape::Axis(AxisSegment::vertical(2, 0, 1));
        assert!(touch(&h, &v2));
        let h2 = Shape::Axis(AxisSegment::horizontal(0, 2, 3));
        assert!(touch(&h, &h2));
    }

    #[test]
    fn mixed_families_rejected() {
        let a = GeomObject::new(0, Shape::Disk(Disk::new(0, 0, 1)));
        let b = GeomObject::new(1, seg(0, 0, 1, 1));
        assert!(matches!(intersects(&a, &b), Err(Error::FamilyMismatch { .. })));
    }

    #[test]
    fn validation() {
        assert!(Shape::Disk(Disk::new(0, 0, 0)).validate().is_err());
        assert!(seg(1, 1, 1, 1).validate().is_err());
        assert!(Shape::Axis(AxisSegment::horizontal(0, 3, 3)).validate().is_err());
        assert!(Shape::Disk(Disk::new(COORD_LIMIT + 1, 0, 1)).validate().is_err());
        assert!(Shape::Disk(Disk::new(COORD_LIMIT, 0, 1)).validate().is_ok());
    }

    #[test]
    fn collinear_overlap_index() {
        let mut idx = AxisLineIndex::new();
        idx.insert(&AxisSegment::horizontal(0, 0, 10)).unwrap();
        assert!(idx.check(&AxisSegment::horizontal(0, 10, 12)).is_err());
        assert!(idx.check(&AxisSegment::horizontal(0, -5, 0)).is_err());
        assert!(idx.check(&AxisSegment::horizontal(0, 2, 3)).is_err());
        assert!(idx.check(&AxisSegment::horizontal(0, 11, 12)).is_ok());
        assert!(idx.check(&AxisSegment::horizontal(1, 0, 10)).is_ok());
        assert!(idx.check(&AxisSegment::vertical(0, 0, 10)).is_ok());
        idx.remove(&AxisSegment::horizontal(0, 0, 10));
        assert!(idx.check(&AxisSegment::horizontal(0, 2, 3)).is_ok());
    }

    #[test]
    fn pairwise_examples() {
        assert!(pairwise_intersections(&[]).is_empty());
        let chain = [
            GeomObject::new(1, Shape::Disk(Disk::new(0, 0, 2))),
            GeomObject::new(2, Shape::Disk(Disk::new(3, 0, 2))),
            GeomObject::new(3, Shape::Disk(Disk::new(6, 0, 2))),
        ];
        assert_eq!(
            pairwise_intersections(&chain),
            vec![(ObjectId(1), ObjectId(2)), (ObjectId(2), ObjectId(3))]
        );
    }

    fn small_shape(family: Family) -> BoxedStrategy<Shape> {
        let c = -30i64..30;
        match family {
            Family::Disk => (c.clone(), c, 1i64..12)
                .prop_map(|(x, y, r)| Shape::Disk(Disk::new(x, y, r)))
                .boxed(),
            Family::Segment => (c.clone(), c.clone(), c.clone(), c)
                .prop_filter("distinct endpoints", |(a, b, c, d)| (a, b) != (c, d))
                .prop_map(|(a, b, c, d)| seg(a, b, c, d))
                .boxed(),
            Family::Axis => (any::<bool>(), c.clone(), c, 1i64..25)
                .prop_map(|(h, f, lo, len)| {
                    Shape::Axis(if h {
                        AxisSegment::horizontal(f, lo, lo + len)
                    } else {
                        AxisSegment::vertical(f, lo, lo + len)
                    })
                })
                .boxed(),
        }
    }

    fn family() -> impl Strategy<Value = Family> {
        prop_oneof![Just(Family::Axis), Just(Family::Segment), Just(Family::Disk)]
    }

    proptest! {
        #[test]
        fn symmetric_and_reflexive(
            (a, b) in family().prop_flat_map(|f| (small_shape(f), small_shape(f)))
        ) {
            prop_assert_eq!(touch(&a, &b), touch(&b, &a));
            prop_assert!(touch(&a, &a));
        }

        #[test]
        fn sweep_matches_double_loop(
            shapes in family().prop_flat_map(|f| proptest::collection::vec(small_shape(f), 0..20))
        ) {
            let mut brute = Vec::new();
            for i in 0..shapes.len() {
                for j in i + 1..shapes.len() {
                    if touch(&shapes[i], &shapes[j]) {
                        brute.push((i, j));
                    }
                }
            }
            prop_assert_eq!(pairwise_intersections_idx(&shapes), brute);
        }

        #[test]
        fn segment_test_matches_rational_parametrisation(
            a in small_shape(Family::Segment), b in small_shape(Family::Segment)
        ) {
            // Independent route: sample the first segment on a fine rational
            // grid only when not collinear; otherwise compare projections.
            let (Shape::Segment(s), Shape::Segment(t)) = (a, b) else { unreachable!() };
            let d1 = (s.p2.x - s.p1.x, s.p2.y - s.p1.y);
            let d2 = (t.p2.x - t.p1.x, t.p2.y - t.p1.y);
            let den = d1.0 * d2.1 - d1.1 * d2.0;
            let expected = if den != 0 {
                let wx = t.p1.x - s.p1.x;
                let wy = t.p1.y - s.p1.y;
                let u_num = wx * d2.1 - wy * d2.0;
                let v_num = wx * d1.1 - wy * d1.0;
                let (u_num, v_num, den) = if den < 0 { (-u_num, -v_num, -den) } else { (u_num, v_num, den) };
                (0..=den).contains(&u_num) && (0..=den).contains(&v_num)
            } else if orient(s.p1, s.p2, t.p1) != Ordering::Equal {
                false
            } else {
                // collinear: project onto the dominant axis
                let key = |p: Point| if d1.0 != 0 { p.x } else { p.y };
                let (a0, a1) = (key(s.p1).min(key(s.p2)), key(s.p1).max(key(s.p2)));
                let (b0, b1) = (key(t.p1).min(key(t.p2)), key(t.p1).max(key(t.p2)));
                a0 <= b1 && b0 <= a1
            };
            prop_assert_eq!(touch(&a, &b), expected);
        }
    }
}
