//! Brute-force ground truth: static components, signatures, classes, and a
//! dynamic intersection-graph oracle for differential testing.

use std::collections::HashMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{pairwise_intersections_idx, touch, Family, GeomObject, ObjectId, Shape};
use crate::graph::{components, Labeling, UnionFind};
use crate::workload::ShapeSampler;

/// Bit vector over the insertion sequence of a phase.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    words: Vec<u64>,
    len: usize,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for signature of length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

/// Connected components of a static object set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub ids: Vec<ObjectId>,
    pub labeling: Labeling,
    index: HashMap<ObjectId, usize>,
}

impl ComponentPartition {
    pub fn count(&self) -> usize {
        self.labeling.count
    }

    pub fn component_of(&self, id: ObjectId) -> Option<usize> {
        self.index.get(&id).map(|&i| self.labeling.labels[i])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.labeling.sizes()
    }

    /// Input positions of each component's objects, indexed by label.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.labeling.count];
        for (i, &l) in self.labeling.labels.iter().enumerate() {
            groups[l].push(i);
        }
        groups
    }
}

pub fn oracle_components(objs: &[GeomObject]) -> ComponentPartition {
    let shapes: Vec<Shape> = objs.iter().map(|o| o.shape).collect();
    let edges = pairwise_intersections_idx(&shapes);
    let labeling = components(objs.len(), &edges).expect("edges come from the same list");
    ComponentPartition {
        ids: objs.iter().map(|o| o.id).collect(),
        labeling,
        index: objs.iter().enumerate().map(|(i, o)| (o.id, i)).collect(),
    }
}

pub fn oracle_signature<'a>(component: impl IntoIterator<Item = &'a Shape> + Clone, q: &[Shape]) -> Signature {
    Signature::from_bits(q.iter().map(|s| component.clone().into_iter().any(|u| touch(u, s))))
}

/// Groups the components of `partition` by signature against `q`. Each class
/// lists component labels in ascending order; classes are ordered by their
/// smallest label.
pub fn oracle_classes(objs: &[GeomObject], partition: &ComponentPartition, q: &[Shape]) -> Vec<Vec<usize>> {
    let mut by_sig: HashMap<Signature, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (label, group) in partition.groups().into_iter().enumerate() {
        let sig = oracle_signature(group.iter().map(|&i| &objs[i].shape), q);
        let slot = *by_sig.entry(sig).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[slot].push(label);
    }
    classes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCountRow {
    pub q: usize,
    pub n: usize,
    pub components: usize,
    pub classes: usize,
    pub seed: u64,
}

/// Counts signature classes of one random instance for every prefix length
/// in `q_values` of a single random query sequence.
pub fn class_count_experiment(
    family: Family,
    n: usize,
    density: f64,
    q_values: &[usize],
    seed: u64,
) -> Result<Vec<ClassCountRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_max = q_values.iter().copied().max().unwrap_or(0);
    let sampler = ShapeSampler::new(family, n, density)?;
    let objs: Vec<GeomObject> =
        (0..n).map(|i| GeomObject::new(i as u64, sampler.sample_fresh(&mut rng))).collect();
    let q: Vec<Shape> = (0..q_max).map(|_| sampler.sample_fresh(&mut rng)).collect();
    let partition = oracle_components(&objs);
    let groups = partition.groups();
    // one bit per query; prefixes of the full signatures give every sweep point
    let sigs: Vec<Signature> =
        groups.iter().map(|g| oracle_signature(g.iter().map(|&i| &objs[i].shape), &q)).collect();
    let mut rows = Vec::new();
    for &qv in q_values {
        let mut distinct: Vec<Signature> = sigs
            .iter()
            .map(|s| Signature::from_bits((0..qv).map(|i| s.get(i))))
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        rows.push(ClassCountRow {
            q: qv,
            n,
            components: partition.count(),
            classes: distinct.len().max(usize::from(partition.count() > 0)),
            seed,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x` over points with positive coordinates.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Intersection graph maintained by brute force under insertions and deletions.
///
/// Insertions are merged into a union-find directly; a deletion invalidates it
/// and the next question rebuilds it from the adjacency lists.
#[derive(Debug, Default, Clone)]
pub struct OracleGraph {
    slot: HashMap<ObjectId, usize>,
    shapes: Vec<Option<Shape>>,
    adj: Vec<Vec<usize>>,
    uf: Option<(UnionFind, usize)>,
    live: usize,
}

impl OracleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.slot.contains_key(&id)
    }

    pub fn shape(&self, id: ObjectId) -> Option<Shape> {
        self.slot.get(&id).and_then(|&i| self.shapes[i])
    }

    /// Live objects in slot order.
    pub fn objects(&self) -> Vec<GeomObject> {
        let mut out: Vec<(usize, ObjectId)> = self.slot.iter().map(|(&id, &i)| (i, id)).collect();
        out.sort_unstable();
        out.into_iter().map(|(i, id)| GeomObject { id, shape: self.shapes[i].unwrap() }).collect()
    }

    pub fn insert(&mut self, id: ObjectId, shape: Shape) {
        assert!(!self.slot.contains_key(&id), "oracle id {id} inserted twice");
        let v = self.shapes.len();
        let mut nbrs = Vec::new();
        for (i, s) in self.shapes.iter().enumerate() {
            if let Some(s) = s {
                if touch(s, &shape) {
                    nbrs.push(i);
                }
            }
        }
        for &u in &nbrs {
            self.adj[u].push(v);
        }
        self.shapes.push(Some(shape));
        self.adj.push(nbrs);
        self.slot.insert(id, v);
        self.live += 1;
        if let Some((uf, count)) = self.uf.as_mut() {
            uf.push();
            *count += 1;
            for &u in &self.adj[v] {
                if uf.union(u, v) {
                    *count -= 1;
                }
            }
        }
    }

    pub fn delete(&mut self, id: ObjectId) {
        let v = self.slot.remove(&id).expect("oracle delete of unknown id");
        self.shapes[v] = None;
        let nbrs = std::mem::take(&mut self.adj[v]);
        for u in nbrs {
            self.adj[u].retain(|&w| w != v);
        }
        self.live -= 1;
        self.uf = None;
    }

    fn ensure(&mut self) -> &mut (UnionFind, usize) {
        if self.uf.is_none() {
            let mut uf = UnionFind::new(self.shapes.len());
            for (v, nbrs) in self.adj.iter().enumerate() {
                for &u in nbrs {
                    uf.union(u, v);
                }
            }
            let dead = self.shapes.len() - self.live;
            let count = uf.count() - dead;
            self.uf = Some((uf, count));
        }
        self.uf.as_mut().unwrap()
    }

    pub fn connected(&mut self, a: ObjectId, b: ObjectId) -> bool {
        let (ia, ib) = (self.slot[&a], self.slot[&b]);
        self.ensure().0.connected(ia, ib)
    }

    pub fn count(&mut self) -> usize {
        self.ensure().1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AxisSegment, Disk, LineSegment, Point};
    use crate::graph::bfs_components;
    use rand::Rng;

    fn disk(id: u64, x: i64, y: i64, r: i64) -> GeomObject {
        GeomObject::new(id, Shape::Disk(Disk::new(x, y, r)))
    }

    #[test]
    fn signature_bits() {
        let mut s = Signature::new();
        for i in 0..130 {
            s.push(i % 3 == 0);
        }
        assert_eq!(s.len(), 130);
        assert!(s.get(129));
        assert!(!s.get(128));
        assert_eq!(s.ones().count(), 44);
        assert_eq!(format!("{:?}", Signature::from_bits([true, false])), "Signature(10)");
    }

    #[test]
    fn disjoint_and_chain_components() {
        let disjoint: Vec<_> = (0..6).map(|i| disk(i, i as i64 * 10, 0, 2)).collect();
        assert_eq!(oracle_components(&disjoint).count(), 6);
        let chain: Vec<_> = (0..6).map(|i| disk(i, i as i64 * 3, 0, 2)).collect();
        let p = oracle_components(&chain);
        assert_eq!(p.count(), 1);
        assert_eq!(p.sizes(), vec![6]);
    }

    #[test]
    fn random_axis_partition_matches_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let objs: Vec<GeomObject> = (0..50)
            .map(|i| {
                let f = rng.random_range(-40..40) * 2;
                let lo = rng.random_range(-40..40);
                let a = if i % 2 == 0 {
                    AxisSegment::horizontal(f, lo, lo + 15)
                } else {
                    AxisSegment::vertical(f + 1, lo, lo + 15)
                };
                GeomObject::new(i, Shape::Axis(a))
            })
            .collect();
        let p = oracle_components(&objs);
        let mut edges = Vec::new();
        for a in 0..objs.len() {
            for b in a + 1..objs.len() {
                if touch(&objs[a].shape, &objs[b].shape) {
                    edges.push((a, b));
                }
            }
        }
        assert_eq!(p.labeling, bfs_components(objs.len(), &edges).unwrap());
    }

    #[test]
    fn signature_examples() {
        let c = [Shape::Disk(Disk::new(0, 0, 2))];
        assert!(oracle_signature(c.iter(), &[]).is_empty());
        let q = [Shape::Disk(Disk::new(3, 0, 2)), Shape::Disk(Disk::new(50, 0, 2))];
        assert_eq!(oracle_signature(c.iter(), &q), Signature::from_bits([true, false]));
    }

    #[test]
    fn class_examples() {
        let objs = vec![disk(0, 0, 0, 2), disk(1, 20, 0, 2)];
        let p = oracle_components(&objs);
        assert_eq!(oracle_classes(&objs, &p, &[]), vec![vec![0, 1]]);
        let q = [Shape::Disk(Disk::new(0, 3, 1))];
        assert_eq!(oracle_classes(&objs, &p, &q), vec![vec![0], vec![1]]);
    }

    #[test]
    fn classes_group_by_signature_hash() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let objs: Vec<_> = (0..80)
            .map(|i| disk(i, rng.random_range(-200..200), rng.random_range(-200..200), rng.random_range(1..12)))
            .collect();
        let q: Vec<Shape> = (0..6)
            .map(|_| Shape::Disk(Disk::new(rng.random_range(-200..200), rng.random_range(-200..200), 60)))
            .collect();
        let p = oracle_components(&objs);
        let classes = oracle_classes(&objs, &p, &q);
        let groups = p.groups();
        let sig = |l: usize| oracle_signature(groups[l].iter().map(|&i| &objs[i].shape), &q);
        let mut seen = vec![false; p.count()];
        for class in &classes {
            for &l in class {
                assert!(!seen[l]);
                seen[l] = true;
                assert_eq!(sig(l), sig(class[0]));
            }
        }
        assert!(seen.iter().all(|&s| s));
        for a in &classes {
            for b in &classes {
                if a != b {
                    assert_ne!(sig(a[0]), sig(b[0]));
                }
            }
        }
        assert!(classes.len() <= p.count().min(1 << q.len()));
    }

    #[test]
    fn refinement_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let objs: Vec<_> = (0..60)
            .map(|i| {
                let (x, y) = (rng.random_range(-100..100), rng.random_range(-100..100));
                GeomObject::new(i, Shape::Segment(LineSegment::new(Point::new(x, y), Point::new(x + 9, y + 4))))
            })
            .collect();
        let q: Vec<Shape> = (0..8)
            .map(|_| {
                let (x, y) = (rng.random_range(-100..100), rng.random_range(-100..100));
                Shape::Segment(LineSegment::new(Point::new(x, y - 60), Point::new(x + 5, y + 60)))
            })
            .collect();
        let p = oracle_components(&objs);
        for k in 0..q.len() {
            let before = oracle_classes(&objs, &p, &q[..k]);
            let after = oracle_classes(&objs, &p, &q[..k + 1]);
            // every new class sits inside one old class
            for class in &after {
                assert!(before.iter().any(|old| class.iter().all(|l| old.contains(l))));
            }
        }
    }

    #[test]
    fn experiment_rows_respect_counting_bound() {
        let rows = class_count_experiment(Family::Disk, 300, 1.5, &[0, 1, 2, 4, 8], 3).unwrap();
        assert_eq!(rows[0].classes, 1);
        assert!(rows[1].classes <= 2);
        for r in rows {
            assert!(r.classes <= r.components.min(1 << r.q));
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-9);
    }

    #[test]
    fn dynamic_oracle_tracks_static_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut g = OracleGraph::new();
        let mut next = 0u64;
        for _ in 0..400 {
            if g.len() > 0 && rng.random_bool(0.4) {
                let objs = g.objects();
                let victim = objs[rng.random_range(0..objs.len())].id;
                g.delete(victim);
            } else {
                let s = Shape::Disk(Disk::new(rng.random_range(-60..60), rng.random_range(-60..60), rng.random_range(1..8)));
                g.insert(ObjectId(next), s);
                next += 1;
            }
            let objs = g.objects();
            let p = oracle_components(&objs);
            assert_eq!(g.count(), p.count());
            if objs.len() >= 2 {
                let (a, b) = (objs[0].id, objs[objs.len() - 1].id);
                assert_eq!(g.connected(a, b), p.component_of(a) == p.component_of(b));
            }
        }
    }
}
