//! Fully dynamic connectivity over an intersection graph.
//!
//! Time is cut into phases of `q` updates. At a phase start the live objects
//! become the static set `S` and its components are grouped into classes by
//! the registry. Objects inserted during the phase form the sequence `Q`. The
//! proxy graph `H` has one vertex per class and one per live `Q` object, and
//! its connectivity mirrors that of the full intersection graph.

use std::sync::Arc;

use serde::Serialize;

use crate::classes::{classify_by_replay, direct_signature, ClassRegistry, LedgerRow, SplitOutcome};
use crate::component::{Component, ComponentId};
use crate::error::{Error, Result};
use crate::geometry::{pairwise_intersections_idx, touch, AxisLineIndex, Family, GeomObject, ObjectId, Shape};
use crate::graph::{bfs_components, components};

/// Label of a class vertex with no edges in `H`.
pub const ISOLATED: u32 = u32::MAX;
const Q_MARK: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QPolicy {
    /// `⌈n^e⌉` with `e` = 1/5 (axis), 5/21 (segments), 1/9 (disks).
    Default,
    Fixed(usize),
}

/// `(numerator, denominator)` of the default phase-length exponent.
pub fn policy_exponent(family: Family) -> (u32, u32) {
    match family {
        Family::Axis => (1, 5),
        Family::Segment => (5, 21),
        Family::Disk => (1, 9),
    }
}

/// Smallest `q` with `q^den >= n^num`, i.e. `⌈n^(num/den)⌉` computed exactly.
pub fn ceil_rational_power(n: usize, num: u32, den: u32) -> usize {
    if n <= 1 {
        return n;
    }
    let target = (n as u128).checked_pow(num).expect("n^num fits in 128 bits");
    let pow = |q: usize| (q as u128).checked_pow(den).unwrap_or(u128::MAX);
    let mut q = ((n as f64).powf(num as f64 / den as f64).ceil() as usize).max(1);
    while q > 1 && pow(q - 1) >= target {
        q -= 1;
    }
    while pow(q) < target {
        q += 1;
    }
    q
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub family: Family,
    pub q_policy: QPolicy,
    pub min_q: usize,
    /// Re-check signatures and the proxy graph after every update.
    pub verify: bool,
}

impl EngineConfig {
    pub fn new(family: Family) -> Self {
        EngineConfig { family, q_policy: QPolicy::Default, min_q: 4, verify: false }
    }

    pub fn with_q(mut self, q: Option<usize>) -> Self {
        self.q_policy = q.map_or(QPolicy::Default, QPolicy::Fixed);
        self
    }

    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    /// Phase length for a phase starting with `n` live objects.
    pub fn phase_length(&self, n: usize) -> usize {
        match self.q_policy {
            QPolicy::Fixed(q) => q.max(1),
            QPolicy::Default => {
                let (num, den) = policy_exponent(self.family);
                ceil_rational_power(n, num, den).max(self.min_q).max(1)
            }
        }
    }
}

/// Per-object handle: the component and class of an `S` object, or the
/// insertion index of a `Q` object (`comp == Q_MARK`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct QueryKey {
    comp: u32,
    vert: u32,
}

const DEAD: QueryKey = QueryKey { comp: Q_MARK, vert: u32::MAX };

#[derive(Debug, Clone)]
struct QEntry {
    shape: Shape,
    live: bool,
    nbrs: Vec<u32>,
}

/// Accounting for one finished (or the running) phase.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseSummary {
    pub phase: u64,
    pub n: usize,
    pub q: usize,
    pub updates: usize,
    #[serde(flatten)]
    pub ledger: LedgerRow,
    pub initial_weight: u64,
    pub object_violations: u64,
    pub max_displacements: u32,
    pub aggregate_bound: f64,
    pub aggregate_ok: bool,
    /// Weight of the non-largest pieces replayed after deletions in `S`.
    pub replay_weight: u64,
    pub max_classes: usize,
}

impl PhaseSummary {
    /// `n (log2 n + 1)`, the budget for `replay_weight`.
    pub fn replay_bound(&self) -> f64 {
        let n = self.n as f64;
        if n == 0.0 {
            0.0
        } else {
            n * (n.log2() + 1.0)
        }
    }
}

#[derive(Debug)]
pub struct Engine {
    config: EngineConfig,
    phase: u64,
    phase_n: usize,
    q_len: usize,
    shapes: Vec<Option<Shape>>,
    /// Parallel to `shapes`; `DEAD` for deleted ids. Kept dense for queries.
    keys: Vec<QueryKey>,
    live: usize,
    axis_lines: AxisLineIndex,
    comps: Vec<Option<Arc<Component>>>,
    registry: ClassRegistry,
    qs: Vec<QEntry>,
    updates: usize,
    class_label: Vec<u32>,
    ins_label: Vec<u32>,
    num_components: usize,
    replay_weight: u64,
    max_classes: usize,
    history: Vec<PhaseSummary>,
}

impl Engine {
    /// Builds the engine over `shapes`; the i-th shape gets id `ObjectId(i)`.
    pub fn new(config: EngineConfig, shapes: &[Shape]) -> Result<Self> {
        let mut axis_lines = AxisLineIndex::new();
        for s in shapes {
            Self::admit(&config, &mut axis_lines, s)?;
        }
        let mut e = Engine {
            registry: ClassRegistry::init_phase(config.family, Vec::new())?,
            config,
            phase: 0,
            phase_n: 0,
            q_len: 0,
            shapes: shapes.iter().map(|&s| Some(s)).collect(),
            keys: vec![QueryKey { comp: 0, vert: 0 }; shapes.len()],
            live: shapes.len(),
            axis_lines,
            comps: Vec::new(),
            qs: Vec::new(),
            updates: 0,
            class_label: Vec::new(),
            ins_label: Vec::new(),
            num_components: 0,
            replay_weight: 0,
            max_classes: 0,
            history: Vec::new(),
        };
        e.start_phase()?;
        Ok(e)
    }

    fn admit(config: &EngineConfig, lines: &mut AxisLineIndex, s: &Shape) -> Result<()> {
        if s.family() != config.family {
            return Err(Error::FamilyMismatch { expected: config.family, found: s.family() });
        }
        s.validate()?;
        if let Shape::Axis(a) = s {
            lines.insert(a)?;
        }
        Ok(())
    }

    fn start_phase(&mut self) -> Result<()> {
        let live: Vec<GeomObject> = self
            .shapes
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|s| GeomObject::new(i as u64, s)))
            .collect();
        let shapes: Vec<Shape> = live.iter().map(|o| o.shape).collect();
        let labeling = components(live.len(), &pairwise_intersections_idx(&shapes))?;
        let mut groups: Vec<Vec<GeomObject>> = vec![Vec::new(); labeling.count];
        for (o, &l) in live.iter().zip(&labeling.labels) {
            groups[l].push(*o);
        }
        let old = std::mem::take(&mut self.comps);
        self.comps = groups
            .into_iter()
            .enumerate()
            .map(|(l, objs)| {
                let id = ComponentId(l as u32);
                let c = match self.unchanged(&old, &objs) {
                    Some(prev) => prev.renumbered(id),
                    None => Component::new(id, objs),
                };
                Some(Arc::new(c))
            })
            .collect();
        for (o, &l) in live.iter().zip(&labeling.labels) {
            self.keys[o.id.0 as usize] = QueryKey { comp: l as u32, vert: 0 };
        }
        self.registry = ClassRegistry::init_phase(self.config.family, self.comps.iter().flatten().cloned())?;
        self.qs.clear();
        self.updates = 0;
        self.replay_weight = 0;
        self.phase_n = live.len();
        self.q_len = self.config.phase_length(live.len());
        self.max_classes = self.registry.class_count();
        self.recompute_h();
        Ok(())
    }

    /// The previous phase's component with exactly the objects `objs`, if any.
    fn unchanged<'a>(&self, old: &'a [Option<Arc<Component>>], objs: &[GeomObject]) -> Option<&'a Arc<Component>> {
        let comp = self.keys[objs[0].id.0 as usize].comp;
        if comp == Q_MARK {
            return None;
        }
        let prev = old.get(comp as usize)?.as_ref()?;
        let same = prev.size() == objs.len() && objs.iter().all(|o| self.keys[o.id.0 as usize].comp == comp);
        same.then_some(prev)
    }

    /// Ends the current phase and starts a new one over all live objects.
    pub fn rebuild_phase(&mut self) -> Result<()> {
        self.history.push(self.current_summary());
        self.phase += 1;
        self.start_phase()
    }

    pub fn insert(&mut self, shape: Shape) -> Result<ObjectId> {
        Self::admit(&self.config, &mut self.axis_lines, &shape)?;
        let idx = self.qs.len() as u32;
        let outcomes = self.registry.insert_q(shape)?;
        self.apply(&outcomes);
        let mut nbrs = Vec::new();
        for (j, e) in self.qs.iter_mut().enumerate() {
            if e.live && touch(&e.shape, &shape) {
                nbrs.push(j as u32);
                e.nbrs.push(idx);
            }
        }
        self.qs.push(QEntry { shape, live: true, nbrs });
        let id = ObjectId(self.shapes.len() as u64);
        self.shapes.push(Some(shape));
        self.keys.push(QueryKey { comp: Q_MARK, vert: idx });
        self.live += 1;
        self.finish_update()?;
        Ok(id)
    }

    pub fn delete(&mut self, id: ObjectId) -> Result<()> {
        let key = self.key(id)?;
        let shape = self.shapes[id.0 as usize].take().expect("live object has a shape");
        self.keys[id.0 as usize] = DEAD;
        self.live -= 1;
        if let Shape::Axis(a) = shape {
            self.axis_lines.remove(&a);
        }
        if key.comp == Q_MARK {
            let e = &mut self.qs[key.vert as usize];
            e.live = false;
            for j in std::mem::take(&mut e.nbrs) {
                self.qs[j as usize].nbrs.retain(|&k| k != key.vert);
            }
        } else {
            self.delete_static(id, ComponentId(key.comp))?;
        }
        self.finish_update()
    }

    fn delete_static(&mut self, id: ObjectId, cid: ComponentId) -> Result<()> {
        let c = self.comps[cid.0 as usize].take().expect("live component");
        self.registry.delete_component(cid)?;
        let rest: Vec<GeomObject> = c.objects.iter().filter(|o| o.id != id).copied().collect();
        if rest.is_empty() {
            return Ok(());
        }
        let shapes: Vec<Shape> = rest.iter().map(|o| o.shape).collect();
        let labeling = components(rest.len(), &pairwise_intersections_idx(&shapes))?;
        let mut pieces: Vec<Vec<GeomObject>> = vec![Vec::new(); labeling.count];
        for (o, &l) in rest.iter().zip(&labeling.labels) {
            pieces[l].push(*o);
        }
        pieces.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let mut pieces = pieces.into_iter().map(|objs| {
            let c = Arc::new(Component::new(ComponentId(self.comps.len() as u32), objs));
            self.comps.push(Some(c.clone()));
            c
        });
        let first = pieces.next().expect("at least one piece");
        let others: Vec<Arc<Component>> = pieces.collect();

        let sig = direct_signature(&first, self.registry.q());
        let class = self.registry.insert_singleton(first.clone(), sig)?;
        self.rekey(&first, class.0);
        if !others.is_empty() {
            self.replay_weight += others.iter().map(|c| c.size() as u64).sum::<u64>();
            let q = self.registry.q().to_vec();
            for (c, sig) in classify_by_replay(self.config.family, others, &q)? {
                let class = self.registry.insert_component(c.clone(), sig)?;
                self.rekey(&c, class.0);
            }
        }
        Ok(())
    }

    fn rekey(&mut self, c: &Component, class: u32) {
        for o in &c.objects {
            self.keys[o.id.0 as usize] = QueryKey { comp: c.id.0, vert: class };
        }
    }

    fn apply(&mut self, outcomes: &[SplitOutcome]) {
        for out in outcomes {
            if let SplitOutcome::Split { displaced, moved, .. } = out {
                for cid in moved {
                    let c = self.comps[cid.0 as usize].clone().expect("moved component is live");
                    for o in &c.objects {
                        self.keys[o.id.0 as usize].vert = displaced.0;
                    }
                }
            }
        }
    }

    fn finish_update(&mut self) -> Result<()> {
        self.updates += 1;
        self.max_classes = self.max_classes.max(self.registry.class_count());
        self.recompute_h();
        if self.config.verify {
            if let Err(e) = self.check_invariants() {
                panic!("engine invariant violated: {e}");
            }
        }
        if self.updates >= self.q_len {
            self.rebuild_phase()?;
        }
        Ok(())
    }

    fn h_edges(&self) -> (usize, Vec<(usize, usize)>) {
        let nc = self.registry.id_bound();
        let mut edges = Vec::new();
        for class in self.registry.classes() {
            for i in class.signature.ones() {
                if self.qs[i].live {
                    edges.push((class.id.0 as usize, nc + i));
                }
            }
        }
        for (i, e) in self.qs.iter().enumerate() {
            if e.live {
                edges.extend(e.nbrs.iter().filter(|&&j| j as usize > i).map(|&j| (nc + i, nc + j as usize)));
            }
        }
        (nc, edges)
    }

    fn recompute_h(&mut self) {
        let (nc, edges) = self.h_edges();
        let labeling = components(nc + self.qs.len(), &edges).expect("proxy edges are in range");
        let mut has_edge = vec![false; nc];
        for &(a, _) in &edges {
            if a < nc {
                has_edge[a] = true;
            }
        }
        self.class_label = vec![ISOLATED; nc];
        let mut seen = vec![false; labeling.count];
        let mut count = 0;
        for class in self.registry.classes() {
            let c = class.id.0 as usize;
            if has_edge[c] {
                self.class_label[c] = labeling.labels[c] as u32;
                if !std::mem::replace(&mut seen[labeling.labels[c]], true) {
                    count += 1;
                }
            } else {
                count += class.component_count();
            }
        }
        self.ins_label = (0..self.qs.len()).map(|i| labeling.labels[nc + i] as u32).collect();
        for (i, e) in self.qs.iter().enumerate() {
            if e.live && !std::mem::replace(&mut seen[labeling.labels[nc + i]], true) {
                count += 1;
            }
        }
        self.num_components = count;
    }

    fn key(&self, id: ObjectId) -> Result<QueryKey> {
        match self.keys.get(id.0 as usize) {
            Some(&k) if k != DEAD => Ok(k),
            _ => Err(Error::UnknownObject(id)),
        }
    }

    fn label(&self, k: QueryKey) -> u32 {
        if k.comp == Q_MARK {
            self.ins_label[k.vert as usize]
        } else {
            self.class_label[k.vert as usize]
        }
    }

    /// Are `u` and `v` connected in the intersection graph of the live objects?
    pub fn query(&self, u: ObjectId, v: ObjectId) -> Result<bool> {
        let (a, b) = (self.key(u)?, self.key(v)?);
        if a.comp != Q_MARK && a.comp == b.comp {
            return Ok(true);
        }
        let (la, lb) = (self.label(a), self.label(b));
        Ok(la != ISOLATED && la == lb)
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    pub fn family(&self) -> Family {
        self.config.family
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn is_live(&self, id: ObjectId) -> bool {
        self.key(id).is_ok()
    }

    pub fn shape(&self, id: ObjectId) -> Option<Shape> {
        self.shapes.get(id.0 as usize).copied().flatten()
    }

    pub fn phase(&self) -> u64 {
        self.phase
    }

    pub fn phase_length(&self) -> usize {
        self.q_len
    }

    pub fn updates_in_phase(&self) -> usize {
        self.updates
    }

    pub fn registry(&self) -> &ClassRegistry {
        &self.registry
    }

    /// Summaries of finished phases.
    pub fn history(&self) -> &[PhaseSummary] {
        &self.history
    }

    pub fn current_summary(&self) -> PhaseSummary {
        let l = &self.registry.ledger;
        PhaseSummary {
            phase: self.phase,
            n: self.phase_n,
            q: self.q_len,
            updates: self.updates,
            ledger: l.row(self.phase),
            initial_weight: l.initial_weight,
            object_violations: l.object_violations,
            max_displacements: l.max_displacements,
            aggregate_bound: l.aggregate_bound(),
            aggregate_ok: l.aggregate_ok(),
            replay_weight: self.replay_weight,
            max_classes: self.max_classes,
        }
    }

    /// Every class signature against direct predicates.
    pub fn check_signatures(&self) -> std::result::Result<(), String> {
        self.registry.check_signatures()
    }

    /// `H` edges against direct predicates, and its labels against a fresh traversal.
    pub fn check_proxy_graph(&self) -> std::result::Result<(), String> {
        for (i, e) in self.qs.iter().enumerate() {
            if !e.live {
                continue;
            }
            for (j, f) in self.qs.iter().enumerate() {
                if i != j && f.live && touch(&e.shape, &f.shape) != e.nbrs.contains(&(j as u32)) {
                    return Err(format!("insertion edge ({i}, {j}) disagrees with geometry"));
                }
            }
            for class in self.registry.classes() {
                let direct = class.members().any(|c| c.touched_by(&e.shape));
                if direct != class.signature.get(i) {
                    return Err(format!("edge ({}, insertion {i}) disagrees with geometry", class.id));
                }
            }
        }
        let (nc, edges) = self.h_edges();
        let fresh = bfs_components(nc + self.qs.len(), &edges).map_err(|e| e.to_string())?;
        for class in self.registry.classes() {
            let c = class.id.0 as usize;
            for (i, e) in self.qs.iter().enumerate() {
                let here = self.class_label[c] != ISOLATED && self.class_label[c] == self.ins_label[i];
                if e.live && here != fresh.same(c, nc + i) {
                    return Err(format!("labels of {} and insertion {i} disagree with traversal", class.id));
                }
            }
        }
        for (i, e) in self.qs.iter().enumerate() {
            for (j, f) in self.qs.iter().enumerate() {
                if e.live && f.live && (self.ins_label[i] == self.ins_label[j]) != fresh.same(nc + i, nc + j) {
                    return Err(format!("labels of insertions {i} and {j} disagree with traversal"));
                }
            }
        }
        Ok(())
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        self.check_signatures()?;
        self.check_proxy_graph()?;
        if self.updates > self.q_len {
            return Err(format!("{} updates in a phase of length {}", self.updates, self.q_len));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Disk, LineSegment, Point};
    use crate::oracle::OracleGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk(x: i64, y: i64, r: i64) -> Shape {
        Shape::Disk(Disk::new(x, y, r))
    }

    fn seg(a: i64, b: i64, c: i64, d: i64) -> Shape {
        Shape::Segment(LineSegment::new(Point::new(a, b), Point::new(c, d)))
    }

    #[test]
    fn exact_phase_lengths() {
        assert_eq!(ceil_rational_power(32, 1, 5), 2);
        assert_eq!(ceil_rational_power(33, 1, 5), 3);
        assert_eq!(ceil_rational_power(1 << 15, 1, 5), 8);
        assert_eq!(ceil_rational_power(512, 1, 9), 2);
        assert_eq!(ceil_rational_power(513, 1, 9), 3);
        assert_eq!(ceil_rational_power(1 << 21, 5, 21), 32);
        assert_eq!(ceil_rational_power(0, 1, 5), 0);
        let cfg = EngineConfig::new(Family::Axis);
        assert_eq!(cfg.phase_length(10), 4);
        assert_eq!(cfg.phase_length(100_000), 10);
        assert_eq!(cfg.clone().with_q(Some(7)).phase_length(100_000), 7);
        // tenfold growth follows the policy
        assert!(cfg.phase_length(1_000_000) > cfg.phase_length(100_000));
    }

    #[test]
    fn empty_and_disjoint() {
        let e = Engine::new(EngineConfig::new(Family::Disk), &[]).unwrap();
        assert_eq!(e.num_components(), 0);
        let shapes: Vec<_> = (0..7).map(|i| disk(i * 10, 0, 2)).collect();
        let e = Engine::new(EngineConfig::new(Family::Disk), &shapes).unwrap();
        assert_eq!(e.num_components(), 7);
        assert!(e.query(ObjectId(3), ObjectId(3)).unwrap());
        assert!(!e.query(ObjectId(3), ObjectId(4)).unwrap());
    }

    #[test]
    fn bridge_joins_classes() {
        let shapes = [disk(0, 0, 2), disk(10, 0, 2), disk(100, 0, 2)];
        let mut e = Engine::new(EngineConfig::new(Family::Disk).with_q(Some(10)).with_verify(true), &shapes).unwrap();
        let isolated = e.insert(disk(0, 500, 1)).unwrap();
        assert_eq!(e.num_components(), 4);
        assert!(!e.query(isolated, ObjectId(0)).unwrap());
        let b = e.insert(disk(5, 0, 3)).unwrap();
        assert!(e.query(ObjectId(0), ObjectId(1)).unwrap());
        assert!(e.query(b, ObjectId(1)).unwrap());
        assert!(!e.query(ObjectId(0), ObjectId(2)).unwrap());
        assert_eq!(e.num_components(), 3);
        let all = e.insert(disk(50, 0, 60)).unwrap();
        assert_eq!(e.num_components(), 2);
        assert!(e.query(ObjectId(0), ObjectId(2)).unwrap());
        e.delete(all).unwrap();
        assert_eq!(e.num_components(), 3);
        assert!(!e.query(ObjectId(0), ObjectId(2)).unwrap());
    }

    #[test]
    fn deleting_cut_object_splits_path() {
        let shapes = [seg(0, 0, 10, 0), seg(10, 0, 20, 0), seg(20, 0, 30, 0), seg(100, 0, 110, 0)];
        let mut e = Engine::new(EngineConfig::new(Family::Segment).with_verify(true), &shapes).unwrap();
        assert_eq!(e.num_components(), 2);
        e.delete(ObjectId(3)).unwrap();
        assert_eq!(e.num_components(), 1);
        e.delete(ObjectId(1)).unwrap();
        assert_eq!(e.num_components(), 2);
        assert!(!e.query(ObjectId(0), ObjectId(2)).unwrap());
        assert_eq!(e.delete(ObjectId(1)), Err(Error::UnknownObject(ObjectId(1))));
        assert!(e.query(ObjectId(1), ObjectId(0)).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = EngineConfig::new(Family::Disk);
        assert!(Engine::new(cfg.clone(), &[seg(0, 0, 1, 1)]).is_err());
        assert!(Engine::new(cfg, &[disk(0, 0, 0)]).is_err());
        let axis = EngineConfig::new(Family::Axis);
        let h = |y, a, b| Shape::Axis(crate::geometry::AxisSegment::horizontal(y, a, b));
        assert!(Engine::new(axis.clone(), &[h(0, 0, 5), h(0, 5, 8)]).is_err());
        let mut e = Engine::new(axis, &[h(0, 0, 5)]).unwrap();
        assert!(e.insert(h(0, 3, 9)).is_err());
        e.delete(ObjectId(0)).unwrap();
        e.insert(h(0, 3, 9)).unwrap();
    }

    #[test]
    fn rebuild_keeps_observables() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shapes: Vec<_> = (0..60).map(|_| disk(rng.random_range(-100..100), rng.random_range(-100..100), 8)).collect();
        let mut e = Engine::new(EngineConfig::new(Family::Disk).with_q(Some(50)), &shapes).unwrap();
        for _ in 0..5 {
            e.insert(disk(rng.random_range(-100..100), rng.random_range(-100..100), 8)).unwrap();
        }
        e.delete(ObjectId(3)).unwrap();
        let answers = |e: &Engine| {
            let ids: Vec<ObjectId> = (0..66).map(ObjectId).filter(|&i| e.is_live(i)).collect();
            let pairs: Vec<bool> = ids.iter().flat_map(|&a| ids.iter().map(move |&b| (a, b))).map(|(a, b)| e.query(a, b).unwrap()).collect();
            (e.num_components(), pairs)
        };
        let before = answers(&e);
        e.rebuild_phase().unwrap();
        assert_eq!(answers(&e), before);
        e.rebuild_phase().unwrap();
        assert_eq!(answers(&e), before);
        assert_eq!(e.history().len(), 2);
    }

    fn random_run(family: Family, seed: u64, steps: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = crate::workload::ShapeSampler::new(family, 40, 1.5).unwrap();
        let mut lines = AxisLineIndex::new();
        let mut shapes = Vec::new();
        for _ in 0..40 {
            let s = sampler.sample(&mut rng, &lines).unwrap();
            if let Shape::Axis(a) = s {
                lines.insert(&a).unwrap();
            }
            shapes.push(s);
        }
        let mut e = Engine::new(EngineConfig::new(family).with_verify(true), &shapes).unwrap();
        let mut oracle = OracleGraph::new();
        let mut live: Vec<ObjectId> = Vec::new();
        for (i, s) in shapes.iter().enumerate() {
            oracle.insert(ObjectId(i as u64), *s);
            live.push(ObjectId(i as u64));
        }
        for _ in 0..steps {
            if !live.is_empty() && rng.random_bool(0.45) {
                let id = live.swap_remove(rng.random_range(0..live.len()));
                if let Some(Shape::Axis(a)) = e.shape(id) {
                    lines.remove(&a);
                }
                e.delete(id).unwrap();
                oracle.delete(id);
            } else {
                let s = sampler.sample(&mut rng, &lines).unwrap();
                if let Shape::Axis(a) = s {
                    lines.insert(&a).unwrap();
                }
                let id = e.insert(s).unwrap();
                oracle.insert(id, s);
                live.push(id);
            }
            assert_eq!(e.num_components(), oracle.count());
            for _ in 0..5 {
                if live.is_empty() {
                    break;
                }
                let a = live[rng.random_range(0..live.len())];
                let b = live[rng.random_range(0..live.len())];
                assert_eq!(e.query(a, b).unwrap(), oracle.connected(a, b), "{family} seed {seed}");
            }
        }
        for p in e.history() {
            assert_eq!(p.object_violations, 0);
            assert!(p.aggregate_ok);
            assert!(p.updates <= p.q);
        }
    }

    #[test]
    fn random_runs_match_oracle() {
        for family in Family::ALL {
            for seed in 0..6 {
                random_run(family, seed, 120);
            }
        }
    }
}
