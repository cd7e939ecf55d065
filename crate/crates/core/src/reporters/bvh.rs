//! Static bounding-box hierarchy over integer boxes.

use crate::geometry::BBox;

pub(crate) const LEAF: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct BvhNode {
    pub bbox: BBox,
    /// Child indices, or `None` for a leaf over `order[start..end]`.
    pub children: Option<(u32, u32)>,
    pub start: u32,
    pub end: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh {
    pub nodes: Vec<BvhNode>,
    /// Item indices, grouped so each node covers a contiguous range.
    pub order: Vec<u32>,
}

impl Bvh {
    /// Builds a median-split hierarchy; the root is node 0. `boxes` must be non-empty.
    pub fn build(boxes: &[BBox]) -> Self {
        assert!(!boxes.is_empty(), "empty hierarchy");
        let mut bvh = Bvh { nodes: Vec::with_capacity(2 * boxes.len() / LEAF + 1), order: (0..boxes.len() as u32).collect() };
        bvh.build_range(boxes, 0, boxes.len());
        bvh
    }

    fn build_range(&mut self, boxes: &[BBox], start: usize, end: usize) -> u32 {
        let bbox = self.order[start..end]
            .iter()
            .map(|&i| boxes[i as usize])
            .reduce(|a, b| a.union(&b))
            .expect("non-empty range");
        let id = self.nodes.len() as u32;
        self.nodes.push(BvhNode { bbox, children: None, start: start as u32, end: end as u32 });
        if end - start > LEAF {
            let wide = bbox.max_x - bbox.min_x >= bbox.max_y - bbox.min_y;
            let mid = start + (end - start) / 2;
            self.order[start..end].select_nth_unstable_by_key(mid - start, |&i| {
                let b = boxes[i as usize];
                if wide {
                    b.min_x + b.max_x
                } else {
                    b.min_y + b.max_y
                }
            });
            let l = self.build_range(boxes, start, mid);
            let r = self.build_range(boxes, mid, end);
            self.nodes[id as usize].children = Some((l, r));
        }
        id
    }
}

/// Squared distance from `(x, y)` to the closest point of `b`.
pub(crate) fn box_dist2(b: &BBox, x: i64, y: i64) -> i128 {
    let dx = (b.min_x - x).max(0).max(x - b.max_x) as i128;
    let dy = (b.min_y - y).max(0).max(y - b.max_y) as i128;
    dx * dx + dy * dy
}
