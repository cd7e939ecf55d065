//! Box-pruned exact intersection search over the segments of one component.

use crate::geometry::{segments_intersect, LineSegment, Shape};

use super::bvh::Bvh;

#[derive(Debug, Clone)]
pub struct SegmentIndex {
    segments: Vec<LineSegment>,
    bvh: Bvh,
}

impl SegmentIndex {
    /// Panics on an empty slice.
    pub fn new(segments: Vec<LineSegment>) -> Self {
        let boxes: Vec<_> = segments.iter().map(|s| Shape::Segment(*s).bbox()).collect();
        SegmentIndex { bvh: Bvh::build(&boxes), segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Whether `q` intersects (closed) some segment of the index.
    pub fn meets(&self, q: &LineSegment, work: &mut u64) -> bool {
        let qb = Shape::Segment(*q).bbox();
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            *work += 1;
            let node = &self.bvh.nodes[n as usize];
            if !node.bbox.overlaps(&qb) {
                continue;
            }
            match node.children {
                Some((l, r)) => stack.extend([l, r]),
                None => {
                    let hit = self.bvh.order[node.start as usize..node.end as usize].iter().any(|&k| {
                        let s = &self.segments[k as usize];
                        segments_intersect(s.p1, s.p2, q.p1, q.p2)
                    });
                    if hit {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{touch, Point};
    use proptest::prelude::*;

    fn seg(a: i64, b: i64, c: i64, d: i64) -> LineSegment {
        LineSegment::new(Point::new(a, b), Point::new(c, d))
    }

    #[test]
    fn examples() {
        let idx = SegmentIndex::new(vec![seg(0, 0, 10, 0)]);
        let mut w = 0;
        assert!(idx.meets(&seg(5, -1, 5, 1), &mut w));
        assert!(!idx.meets(&seg(20, 0, 21, 0), &mut w));
        assert!(idx.meets(&seg(10, 0, 12, 3), &mut w));
    }

    proptest! {
        #[test]
        fn matches_linear_scan(
            raw in prop::collection::vec((-50i64..50, -50i64..50, -50i64..50, -50i64..50), 1..40),
            q in (-60i64..60, -60i64..60, -60i64..60, -60i64..60)
        ) {
            let segs: Vec<_> = raw.iter().filter(|r| (r.0, r.1) != (r.2, r.3)).map(|r| seg(r.0, r.1, r.2, r.3)).collect();
            prop_assume!(!segs.is_empty() && (q.0, q.1) != (q.2, q.3));
            let q = seg(q.0, q.1, q.2, q.3);
            let idx = SegmentIndex::new(segs.clone());
            let brute = segs.iter().any(|s| touch(&Shape::Segment(*s), &Shape::Segment(q)));
            let mut w = 0;
            prop_assert_eq!(idx.meets(&q, &mut w), brute);
        }
    }
}
