//! Exact additively weighted nearest-site queries over the disks of one component.
//!
//! A query disk with center `p` and radius `r` meets the component exactly
//! when `min_u (|p - c_u| - r_u) <= r`, so one nearest query per component
//! classifies it.

use std::cmp::Ordering;

use crate::geometry::{BBox, Disk, Point};

use super::bvh::{box_dist2, Bvh};

/// Compares `sqrt(a) - wa` with `sqrt(b) - wb` exactly.
///
/// `a` and `b` must be non-negative; the intermediate products fit in `i128`
/// for squared distances below `2^44` and weights below `2^22`.
pub fn cmp_weighted(a: i128, wa: i128, b: i128, wb: i128) -> Ordering {
    debug_assert!(a >= 0 && b >= 0);
    // sqrt(a) vs sqrt(b) + d
    let d = wa - wb;
    if d < 0 && b < d * d {
        return Ordering::Greater;
    }
    let e = a - b - d * d;
    let rhs2 = 4 * d * d * b;
    if d >= 0 {
        if e < 0 {
            Ordering::Less
        } else {
            (e * e).cmp(&rhs2)
        }
    } else if e >= 0 {
        if e == 0 && b == 0 {
            Ordering::Equal
        } else {
            Ordering::Greater
        }
    } else {
        rhs2.cmp(&(e * e))
    }
}

/// Bounding hierarchy over disk centers, each node carrying the largest radius below it.
#[derive(Debug, Clone)]
pub struct DiskDistanceIndex {
    disks: Vec<Disk>,
    bvh: Bvh,
    max_radius: Vec<i64>,
}

impl DiskDistanceIndex {
    /// Panics on an empty slice.
    pub fn new(disks: Vec<Disk>) -> Self {
        let boxes: Vec<BBox> = disks
            .iter()
            .map(|d| BBox { min_x: d.center.x, min_y: d.center.y, max_x: d.center.x, max_y: d.center.y })
            .collect();
        let bvh = Bvh::build(&boxes);
        let mut max_radius = vec![0; bvh.nodes.len()];
        for (i, node) in bvh.nodes.iter().enumerate() {
            max_radius[i] = bvh.order[node.start as usize..node.end as usize]
                .iter()
                .map(|&k| disks[k as usize].radius)
                .max()
                .unwrap_or(0);
        }
        DiskDistanceIndex { disks, bvh, max_radius }
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    /// The disk minimizing `|p - center| - radius`, together with its squared
    /// center distance. Ties go to the lowest stored index.
    pub fn nearest(&self, p: Point, work: &mut u64) -> (&Disk, i128) {
        let mut best: Option<(usize, i128)> = None;
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            *work += 1;
            let node = &self.bvh.nodes[n as usize];
            if let Some((bi, bd)) = best {
                let lower = box_dist2(&node.bbox, p.x, p.y);
                let bound = cmp_weighted(lower, self.max_radius[n as usize] as i128, bd, self.disks[bi].radius as i128);
                if bound == Ordering::Greater {
                    continue;
                }
            }
            match node.children {
                Some((l, r)) => {
                    let dl = box_dist2(&self.bvh.nodes[l as usize].bbox, p.x, p.y);
                    let dr = box_dist2(&self.bvh.nodes[r as usize].bbox, p.x, p.y);
                    if dl <= dr {
                        stack.extend([r, l]);
                    } else {
                        stack.extend([l, r]);
                    }
                }
                None => {
                    for &k in &self.bvh.order[node.start as usize..node.end as usize] {
                        let k = k as usize;
                        let d2 = p.dist2(self.disks[k].center);
                        let better = match best {
                            None => true,
                            Some((bi, bd)) => {
                                match cmp_weighted(d2, self.disks[k].radius as i128, bd, self.disks[bi].radius as i128) {
                                    Ordering::Less => true,
                                    Ordering::Equal => k < bi,
                                    Ordering::Greater => false,
                                }
                            }
                        };
                        if better {
                            best = Some((k, d2));
                        }
                    }
                }
            }
        }
        let (bi, bd) = best.expect("index is non-empty");
        (&self.disks[bi], bd)
    }

    /// Whether `q` intersects (closed) some disk of the index.
    pub fn meets(&self, q: &Disk, work: &mut u64) -> bool {
        let (u, d2) = self.nearest(q.center, work);
        let reach = (q.radius + u.radius) as i128;
        d2 <= reach * reach
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::touch;
    use crate::geometry::Shape;
    use proptest::prelude::*;

    fn exact_cmp(a: i128, wa: i128, b: i128, wb: i128) -> Ordering {
        // independent route: compare in f64 unless close, then in rationals via squares
        let x = (a as f64).sqrt() - wa as f64;
        let y = (b as f64).sqrt() - wb as f64;
        if (x - y).abs() > 1e-6 {
            return x.partial_cmp(&y).unwrap();
        }
        // near-tie on small inputs: both sides are integers when a and b are squares
        let ra = (a as f64).sqrt().round() as i128;
        let rb = (b as f64).sqrt().round() as i128;
        assert!(ra * ra == a && rb * rb == b, "ambiguous oracle input");
        (ra - wa).cmp(&(rb - wb))
    }

    #[test]
    fn weighted_comparison_examples() {
        assert_eq!(cmp_weighted(25, 2, 16, 0), Ordering::Less);
        assert_eq!(cmp_weighted(25, 1, 16, 0), Ordering::Equal);
        assert_eq!(cmp_weighted(2, 0, 1, 0), Ordering::Greater);
        assert_eq!(cmp_weighted(0, 0, 0, 3), Ordering::Greater);
        assert_eq!(cmp_weighted(0, 3, 0, 3), Ordering::Equal);
        assert_eq!(cmp_weighted(9, 5, 1, 0), Ordering::Less);
    }

    proptest! {
        #[test]
        fn weighted_comparison_matches_oracle(
            ra in 0i128..200, rb in 0i128..200, wa in 0i128..100, wb in 0i128..100, perturb in prop::bool::ANY
        ) {
            // squares give exact ties, the perturbed value avoids them
            let a = ra * ra + i128::from(perturb && ra > 0);
            let b = rb * rb;
            let got = cmp_weighted(a, wa, b, wb);
            if perturb && ra > 0 {
                let x = (a as f64).sqrt() - wa as f64;
                let y = (b as f64).sqrt() - wb as f64;
                prop_assume!((x - y).abs() > 1e-9);
                prop_assert_eq!(got, x.partial_cmp(&y).unwrap());
            } else {
                prop_assert_eq!(got, exact_cmp(a, wa, b, wb));
            }
            prop_assert_eq!(cmp_weighted(b, wb, a, wa), got.reverse());
        }

        #[test]
        fn nearest_matches_linear_scan(
            raw in prop::collection::vec((-300i64..300, -300i64..300, 1i64..60), 1..40),
            qx in -400i64..400, qy in -400i64..400, qr in 1i64..80
        ) {
            let disks: Vec<Disk> = raw.iter().map(|&(x, y, r)| Disk::new(x, y, r)).collect();
            let idx = DiskDistanceIndex::new(disks.clone());
            let p = Point::new(qx, qy);
            let mut work = 0;
            let (u, d2) = idx.nearest(p, &mut work);
            for d in &disks {
                prop_assert_ne!(
                    cmp_weighted(p.dist2(d.center), d.radius as i128, d2, u.radius as i128),
                    Ordering::Less
                );
            }
            let q = Disk::new(qx, qy, qr);
            let brute = disks.iter().any(|d| touch(&Shape::Disk(*d), &Shape::Disk(q)));
            prop_assert_eq!(idx.meets(&q, &mut work), brute);
        }
    }

    #[test]
    fn membership_examples() {
        let idx = DiskDistanceIndex::new(vec![Disk::new(0, 0, 2)]);
        let mut w = 0;
        assert!(!idx.meets(&Disk::new(5, 0, 2), &mut w));
        assert!(idx.meets(&Disk::new(3, 0, 2), &mut w));
        assert!(idx.meets(&Disk::new(4, 0, 2), &mut w));
    }
}
