//! Square separators for disk sets with a small stabbing set on the boundary.
//!
//! `B0` is the smallest axis-parallel square holding at least `⌈n/5⌉` disk
//! centers, with side `r`. Each dilation `B_t` (side `(1 + t) r`,
//! `t = i/b`, `b = ⌈√n⌉`) holds between `n/5` and `4n/5` centers. The chosen
//! `t` minimizes the number of small disks (radius `<= r/b`) crossing `∂B_t`;
//! large crossing disks are stabbed by a grid of spacing `r/(2b)` laid in a
//! band of width `2r/b` around `∂B_t`, and small ones by their centers.
//!
//! All geometry runs on coordinates scaled by `2b`, where `B_t` has integer
//! center and half-side.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Disk;

/// Point with coordinates `x / den`, `y / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub x: i64,
    pub y: i64,
    pub den: i64,
}

impl RationalPoint {
    /// Closed containment in `d`, exactly.
    pub fn in_disk(&self, d: &Disk) -> bool {
        let dx = (self.x - self.den * d.center.x) as i128;
        let dy = (self.y - self.den * d.center.y) as i128;
        let r = (self.den * d.radius) as i128;
        dx * dx + dy * dy <= r * r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Inside,
    Outside,
    Boundary,
}

#[derive(Debug, Clone)]
pub struct SeparatorResult {
    pub b: i64,
    /// Dilation index: `t = i / b`.
    pub i: i64,
    /// Side of `B0`.
    pub r: i64,
    /// Center of the square; `B0` and `B_t` share it.
    pub center: RationalPoint,
    /// Side of `B_t` as `side_num / b`.
    pub side_num: i64,
    pub stabbing_points: Vec<RationalPoint>,
    pub inside_ids: Vec<usize>,
    pub outside_ids: Vec<usize>,
    pub boundary_ids: Vec<usize>,
}

impl SeparatorResult {
    pub fn t(&self) -> f64 {
        self.i as f64 / self.b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparatorRow {
    pub n: usize,
    pub seed: u64,
    pub inside: usize,
    pub outside: usize,
    pub boundary: usize,
    pub stab_points: usize,
}

/// Range-add / max segment tree over `0..len`.
struct MaxAddTree {
    max: Vec<i64>,
    add: Vec<i64>,
    len: usize,
}

impl MaxAddTree {
    fn new(len: usize) -> Self {
        MaxAddTree { max: vec![0; 4 * len.max(1)], add: vec![0; 4 * len.max(1)], len }
    }

    fn update(&mut self, node: usize, l: usize, r: usize, a: usize, b: usize, v: i64) {
        if b < l || r < a {
            return;
        }
        if a <= l && r <= b {
            self.max[node] += v;
            self.add[node] += v;
            return;
        }
        let m = (l + r) / 2;
        self.update(2 * node, l, m, a, b, v);
        self.update(2 * node + 1, m + 1, r, a, b, v);
        self.max[node] = self.add[node] + self.max[2 * node].max(self.max[2 * node + 1]);
    }

    fn range_add(&mut self, a: usize, b: usize, v: i64) {
        if a <= b {
            self.update(1, 0, self.len - 1, a, b, v);
        }
    }

    /// Maximum and a position attaining it.
    fn argmax(&self) -> (i64, usize) {
        let (mut node, mut l, mut r) = (1, 0, self.len - 1);
        while l < r {
            let m = (l + r) / 2;
            if self.max[2 * node] >= self.max[2 * node + 1] {
                node *= 2;
                r = m;
            } else {
                node = 2 * node + 1;
                l = m + 1;
            }
        }
        (self.max[1], l)
    }
}

/// Largest number of points in a closed `side`-square, with its lower-left corner.
fn best_square(by_x: &[(i64, i64)], ys: &[i64], side: i64) -> (usize, i64, i64) {
    let mut tree = MaxAddTree::new(ys.len());
    let span = |y: i64| (ys.partition_point(|&v| v < y - side), ys.partition_point(|&v| v <= y));
    let mut best = (0, by_x[0].0, ys[0]);
    let mut hi = 0;
    for lo in 0..by_x.len() {
        while hi < by_x.len() && by_x[hi].0 <= by_x[lo].0 + side {
            let (a, b) = span(by_x[hi].1);
            tree.range_add(a, b - 1, 1);
            hi += 1;
        }
        let (m, at) = tree.argmax();
        if m as usize > best.0 {
            best = (m as usize, by_x[lo].0, ys[at]);
        }
        let (a, b) = span(by_x[lo].1);
        tree.range_add(a, b - 1, -1);
    }
    best
}

/// Smallest integer side of a closed axis-parallel square containing at least
/// `k` of `points` (`1 <= k <= len`), and the lower-left corner of one such square.
pub fn smallest_square(points: &[(i64, i64)], k: usize) -> (i64, i64, i64) {
    assert!(k >= 1 && k <= points.len());
    let mut by_x = points.to_vec();
    by_x.sort_unstable();
    let mut ys: Vec<i64> = points.iter().map(|p| p.1).collect();
    ys.sort_unstable();
    ys.dedup();
    let spread = (by_x[by_x.len() - 1].0 - by_x[0].0).max(ys[ys.len() - 1] - ys[0]);
    let (mut lo, mut hi) = (0, spread);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if best_square(&by_x, &ys, mid).0 >= k {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let (_, x, y) = best_square(&by_x, &ys, lo);
    (lo, x, y)
}

fn ceil_sqrt(n: usize) -> i64 {
    let mut b = (n as f64).sqrt() as i64;
    while b * b < n as i64 {
        b += 1;
    }
    while b > 0 && (b - 1) * (b - 1) >= n as i64 {
        b -= 1;
    }
    b
}

/// Classifies a disk (scaled center offset `dx, dy >= 0` from the square
/// center, scaled radius `rr`) against the square of half-side `h`.
fn classify(dx: i64, dy: i64, rr: i64, h: i64) -> Side {
    if dx + rr < h && dy + rr < h {
        return Side::Inside;
    }
    let ex = (dx - h).max(0) as i128;
    let ey = (dy - h).max(0) as i128;
    if ex * ex + ey * ey > (rr as i128) * (rr as i128) {
        Side::Outside
    } else {
        Side::Boundary
    }
}

pub fn find_disk_separator(disks: &[Disk]) -> Result<SeparatorResult> {
    let n = disks.len();
    if n < 25 {
        return Err(Error::InstanceTooSmall(n));
    }
    let centers: Vec<(i64, i64)> = disks.iter().map(|d| (d.center.x, d.center.y)).collect();
    let (r, x0, y0) = smallest_square(&centers, n.div_ceil(5));
    let b = ceil_sqrt(n);
    let scale = 2 * b;
    let (cx, cy) = (scale * x0 + b * r, scale * y0 + b * r);
    let offset = |d: &Disk| ((scale * d.center.x - cx).abs(), (scale * d.center.y - cy).abs(), scale * d.radius);

    // small disks per dilation; each crosses the boundary for an interval of i
    let mut crossing = vec![0usize; b as usize];
    for d in disks.iter().filter(|d| d.radius * b <= r) {
        let (dx, dy, rr) = offset(d);
        for i in 1..b {
            if classify(dx, dy, rr, (b + i) * r) == Side::Boundary {
                crossing[i as usize] += 1;
            }
        }
    }
    let i = (1..b).min_by_key(|&i| (crossing[i as usize], i)).unwrap_or(1);
    let h = (b + i) * r;

    let mut result = SeparatorResult {
        b,
        i,
        r,
        center: RationalPoint { x: cx, y: cy, den: scale },
        side_num: (b + i) * r,
        stabbing_points: Vec::new(),
        inside_ids: Vec::new(),
        outside_ids: Vec::new(),
        boundary_ids: Vec::new(),
    };
    for (k, d) in disks.iter().enumerate() {
        let (dx, dy, rr) = offset(d);
        match classify(dx, dy, rr, h) {
            Side::Inside => result.inside_ids.push(k),
            Side::Outside => result.outside_ids.push(k),
            Side::Boundary => {
                result.boundary_ids.push(k);
                if d.radius * b <= r {
                    result.stabbing_points.push(RationalPoint { x: d.center.x, y: d.center.y, den: 1 });
                }
            }
        }
    }
    if r == 0 {
        result.stabbing_points.push(result.center);
    } else {
        // grid of spacing r in scaled units, band of 4r around the boundary
        let kk = b + i;
        let reach = kk + 4;
        for u in -reach..=reach {
            for v in -reach..=reach {
                let cheb = u.abs().max(v.abs());
                let near = if cheb <= kk {
                    kk - cheb <= 4
                } else {
                    let (eu, ev) = ((u.abs() - kk).max(0), (v.abs() - kk).max(0));
                    eu * eu + ev * ev <= 16
                };
                if near {
                    result.stabbing_points.push(RationalPoint { x: cx + u * r, y: cy + v * r, den: scale });
                }
            }
        }
    }
    Ok(result)
}

/// Checks the partition, the geometry of each side, the balance bounds, and
/// that every boundary disk contains a stabbing point.
pub fn verify_separator(disks: &[Disk], s: &SeparatorResult) -> std::result::Result<(), String> {
    let n = disks.len();
    let mut seen = vec![None; n];
    for (ids, side) in [(&s.inside_ids, Side::Inside), (&s.outside_ids, Side::Outside), (&s.boundary_ids, Side::Boundary)] {
        for &k in ids {
            if k >= n || seen[k].replace(side).is_some() {
                return Err(format!("disk {k} listed twice or out of range"));
            }
        }
    }
    if seen.iter().any(Option::is_none) {
        return Err("partition misses a disk".into());
    }
    if 5 * s.inside_ids.len() > 4 * n || 5 * s.outside_ids.len() > 4 * n {
        return Err(format!("unbalanced: {} inside, {} outside of {n}", s.inside_ids.len(), s.outside_ids.len()));
    }
    // independent geometry: the closed square in coordinates scaled by 2b
    let den = s.center.den;
    let half = s.side_num; // (side_num / b) / 2 scaled by 2b
    let (lo_x, hi_x) = (s.center.x - half, s.center.x + half);
    let (lo_y, hi_y) = (s.center.y - half, s.center.y + half);
    for (k, d) in disks.iter().enumerate() {
        let (x, y, rr) = (den * d.center.x, den * d.center.y, den * d.radius);
        let inside = x - rr > lo_x && x + rr < hi_x && y - rr > lo_y && y + rr < hi_y;
        let nx = x.clamp(lo_x, hi_x) as i128 - x as i128;
        let ny = y.clamp(lo_y, hi_y) as i128 - y as i128;
        let outside = nx * nx + ny * ny > (rr as i128) * (rr as i128);
        let want = if inside {
            Side::Inside
        } else if outside {
            Side::Outside
        } else {
            Side::Boundary
        };
        if seen[k] != Some(want) {
            return Err(format!("disk {k} classified {:?}, geometry says {want:?}", seen[k].unwrap()));
        }
    }
    for &k in &s.boundary_ids {
        if !s.stabbing_points.iter().any(|p| p.in_disk(&disks[k])) {
            return Err(format!("boundary disk {k} contains no stabbing point"));
        }
    }
    Ok(())
}

/// Measured bound on `|stabbing_points| / √n` for [`random_disks`] instances.
pub const STAB_CONSTANT: f64 = 160.0;

/// Random disk instance used by the harness and tests: centers uniform in a
/// square, radii mostly small with a heavy tail.
pub fn random_disks(n: usize, seed: u64) -> Vec<Disk> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let w = 40 * ceil_sqrt(n).max(1);
    (0..n)
        .map(|_| {
            let r = if rng.random_bool(0.9) { rng.random_range(1..=20) } else { rng.random_range(20..=400) };
            Disk::new(rng.random_range(-w..=w), rng.random_range(-w..=w), r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_smallest(points: &[(i64, i64)], k: usize) -> i64 {
        let mut best = i64::MAX;
        for &(xl, _) in points {
            for &(_, yb) in points {
                let mut need: Vec<i64> = points
                    .iter()
                    .filter(|p| p.0 >= xl && p.1 >= yb)
                    .map(|p| (p.0 - xl).max(p.1 - yb))
                    .collect();
                if need.len() >= k {
                    need.sort_unstable();
                    best = best.min(need[k - 1]);
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn smallest_square_matches_brute_force(
            pts in prop::collection::vec((-30i64..30, -30i64..30), 1..40), kf in 0.0f64..1.0
        ) {
            let k = 1 + ((pts.len() - 1) as f64 * kf) as usize;
            let (side, x, y) = smallest_square(&pts, k);
            prop_assert_eq!(side, brute_smallest(&pts, k));
            let inside = pts.iter().filter(|p| p.0 >= x && p.0 <= x + side && p.1 >= y && p.1 <= y + side).count();
            prop_assert!(inside >= k);
        }

        #[test]
        fn random_instances_verify(n in 25usize..400, seed in 0u64..1000) {
            let disks = random_disks(n, seed);
            let s = find_disk_separator(&disks).unwrap();
            verify_separator(&disks, &s).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn five_thousand_random_disks() {
        let disks = random_disks(5000, 11);
        let s = find_disk_separator(&disks).unwrap();
        verify_separator(&disks, &s).unwrap();
        assert!(5 * s.inside_ids.len() <= 4 * 5000 && 5 * s.outside_ids.len() <= 4 * 5000);
        assert!(s.stabbing_points.len() as f64 <= STAB_CONSTANT * (5000f64).sqrt());
    }

    #[test]
    fn too_small() {
        let disks = vec![Disk::new(0, 0, 1); 24];
        assert_eq!(find_disk_separator(&disks).unwrap_err(), Error::InstanceTooSmall(24));
    }

    #[test]
    fn identical_centers() {
        let disks = vec![Disk::new(7, -3, 2); 40];
        let s = find_disk_separator(&disks).unwrap();
        assert_eq!(s.r, 0);
        assert_eq!(s.boundary_ids.len(), 40);
        verify_separator(&disks, &s).unwrap();
    }

    #[test]
    fn unit_grid() {
        let disks: Vec<Disk> = (0..25).map(|k| Disk::new(10 * (k % 5), 10 * (k / 5), 1)).collect();
        let s = find_disk_separator(&disks).unwrap();
        assert!(s.inside_ids.len() <= 20 && s.outside_ids.len() <= 20);
        verify_separator(&disks, &s).unwrap();
    }

    #[test]
    fn classify_cases() {
        assert_eq!(classify(0, 0, 1, 5), Side::Inside);
        assert_eq!(classify(4, 0, 1, 5), Side::Boundary);
        assert_eq!(classify(6, 0, 1, 5), Side::Boundary);
        assert_eq!(classify(7, 0, 1, 5), Side::Outside);
        assert_eq!(classify(6, 6, 1, 5), Side::Outside);
        assert_eq!(classify(0, 0, 1, 0), Side::Boundary);
    }
}
