//! Equivalence classes of components under a growing insertion sequence.
//!
//! Every class owns a reporter over its components. Inserting a query object
//! splits each class by racing the reporter's two streams; the lighter side
//! moves to a new class, so an object changes class at most logarithmically
//! often while its class only shrinks.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::component::{Component, ComponentId};
use crate::error::{Error, Result};
use crate::geometry::{touch, Family, ObjectId, Shape};
use crate::oracle::Signature;
use crate::reporters::Reporter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L{}", self.0)
    }
}

#[derive(Debug)]
pub struct EqClass {
    pub id: ClassId,
    pub signature: Signature,
    /// Sum of member sizes, in objects.
    pub total_size: usize,
    /// Largest `total_size` this class has had.
    pub peak_size: usize,
    /// Whether the class is reachable through the signature index.
    pub indexed: bool,
    pub reporter: Reporter,
}

impl EqClass {
    pub fn members(&self) -> impl Iterator<Item = &Arc<Component>> {
        self.reporter.members().values()
    }

    pub fn component_count(&self) -> usize {
        self.reporter.len()
    }
}

/// Result of splitting one class by one query object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitOutcome {
    /// Every member landed on the same side.
    Unsplit { class: ClassId, bit: bool },
    Split { kept: ClassId, displaced: ClassId, moved: Vec<ComponentId>, displaced_weight: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ObjectRecord {
    displacements: u32,
    /// Largest class total size seen since the object last entered the registry.
    n0: usize,
}

/// Displacement accounting for one phase.
#[derive(Debug, Clone, Default)]
pub struct DisplacementLedger {
    pub initial_weight: u64,
    pub inserts: u64,
    pub splits: u64,
    pub displaced_weight: u64,
    /// Weight of components inserted into the registry after phase start.
    pub sigma: u64,
    /// Objects whose displacement count exceeded `floor(log2 n0) + 1`.
    pub object_violations: u64,
    pub max_displacements: u32,
    records: HashMap<ObjectId, ObjectRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub phase: u64,
    pub inserts: u64,
    pub splits: u64,
    pub displaced_weight: u64,
    pub sigma: u64,
}

fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.max(1).leading_zeros()
}

impl DisplacementLedger {
    /// `(n + Σ)(log2(n + Σ) + 1)`.
    pub fn aggregate_bound(&self) -> f64 {
        let w = (self.initial_weight + self.sigma) as f64;
        if w == 0.0 {
            0.0
        } else {
            w * (w.log2() + 1.0)
        }
    }

    pub fn aggregate_ok(&self) -> bool {
        self.displaced_weight as f64 <= self.aggregate_bound()
    }

    pub fn displacements(&self, id: ObjectId) -> u32 {
        self.records.get(&id).map_or(0, |r| r.displacements)
    }

    pub fn row(&self, phase: u64) -> LedgerRow {
        LedgerRow {
            phase,
            inserts: self.inserts,
            splits: self.splits,
            displaced_weight: self.displaced_weight,
            sigma: self.sigma,
        }
    }

    fn enter(&mut self, c: &Component, class_peak: usize) {
        for o in &c.objects {
            self.records.insert(o.id, ObjectRecord { displacements: 0, n0: class_peak });
        }
    }

    fn displace(&mut self, c: &Component, old_peak: usize) {
        for o in &c.objects {
            let r = self.records.entry(o.id).or_default();
            r.n0 = r.n0.max(old_peak);
            r.displacements += 1;
            self.max_displacements = self.max_displacements.max(r.displacements);
            if r.displacements > floor_log2(r.n0) + 1 {
                self.object_violations += 1;
            }
        }
    }

    fn forget(&mut self, c: &Component) {
        for o in &c.objects {
            self.records.remove(&o.id);
        }
    }
}

/// The live classes of one phase.
#[derive(Debug)]
pub struct ClassRegistry {
    family: Family,
    classes: Vec<Option<EqClass>>,
    live: usize,
    index: HashMap<Signature, ClassId>,
    class_of: HashMap<ComponentId, ClassId>,
    q: Vec<Shape>,
    pub ledger: DisplacementLedger,
}

impl ClassRegistry {
    /// One class with the empty signature holding every component (none when empty).
    pub fn init_phase(family: Family, components: impl IntoIterator<Item = Arc<Component>>) -> Result<Self> {
        let mut reg = ClassRegistry {
            family,
            classes: Vec::new(),
            live: 0,
            index: HashMap::new(),
            class_of: HashMap::new(),
            q: Vec::new(),
            ledger: DisplacementLedger::default(),
        };
        let comps: Vec<Arc<Component>> = components.into_iter().collect();
        let total = comps.iter().map(|c| c.size()).sum();
        let ids: Vec<ComponentId> = comps.iter().map(|c| c.id).collect();
        let reporter = Reporter::build(family, comps)?;
        if !ids.is_empty() {
            let id = reg.push_class(Signature::new(), total, true, reporter);
            for cid in ids {
                reg.class_of.insert(cid, id);
            }
            let class = reg.classes[id.0 as usize].as_ref().unwrap();
            for c in class.reporter.members().values() {
                reg.ledger.enter(c, total);
            }
        }
        reg.ledger.initial_weight = total as u64;
        Ok(reg)
    }

    fn push_class(&mut self, signature: Signature, total: usize, indexed: bool, reporter: Reporter) -> ClassId {
        let id = ClassId(self.classes.len() as u32);
        if indexed {
            self.index.insert(signature.clone(), id);
        }
        self.classes.push(Some(EqClass {
            id,
            signature,
            total_size: total,
            peak_size: total,
            indexed,
            reporter,
        }));
        self.live += 1;
        id
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The insertion sequence so far, dead entries included.
    pub fn q(&self) -> &[Shape] {
        &self.q
    }

    pub fn class_count(&self) -> usize {
        self.live
    }

    /// One past the largest class id handed out.
    pub fn id_bound(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, id: ClassId) -> Option<&EqClass> {
        self.classes.get(id.0 as usize).and_then(Option::as_ref)
    }

    pub fn classes(&self) -> impl Iterator<Item = &EqClass> {
        self.classes.iter().flatten()
    }

    pub fn class_of(&self, c: ComponentId) -> Option<ClassId> {
        self.class_of.get(&c).copied()
    }

    pub fn lookup(&self, sig: &Signature) -> Option<ClassId> {
        self.index.get(sig).copied()
    }

    /// Appends `s` to the insertion sequence and splits every class by it.
    pub fn insert_q(&mut self, s: Shape) -> Result<Vec<SplitOutcome>> {
        if s.family() != self.family {
            return Err(Error::FamilyMismatch { expected: self.family, found: s.family() });
        }
        self.q.push(s);
        self.ledger.inserts += 1;
        let ids: Vec<ClassId> = self.classes().map(|c| c.id).collect();
        let outcomes = ids.into_iter().map(|id| self.split_class(id, &s)).collect();
        self.index = self
            .classes()
            .filter(|c| c.indexed)
            .map(|c| (c.signature.clone(), c.id))
            .collect();
        Ok(outcomes)
    }

    /// Races the two streams of `id`'s reporter for `s` and moves the lighter
    /// side into a new class. Does not touch the signature index.
    fn split_class(&mut self, id: ClassId, s: &Shape) -> SplitOutcome {
        let class = self.classes[id.0 as usize].as_mut().expect("live class");
        let total = class.total_size;
        let mut hit: Vec<ComponentId> = Vec::new();
        let mut miss: Vec<ComponentId> = Vec::new();
        let (mut wh, mut wm) = (0usize, 0usize);
        let displace_hit;
        {
            let mut q = class.reporter.query(s);
            let (mut hit_done, mut miss_done) = (false, false);
            loop {
                match q.next_intersecting() {
                    Some((c, sz)) => {
                        hit.push(c);
                        wh += sz;
                    }
                    None => hit_done = true,
                }
                if hit_done || 2 * wh > total {
                    break;
                }
                match q.next_nonintersecting() {
                    Some((c, sz)) => {
                        miss.push(c);
                        wm += sz;
                    }
                    None => miss_done = true,
                }
                if miss_done || 2 * wm > total {
                    break;
                }
            }
            displace_hit = if hit_done {
                true
            } else if 2 * wh > total {
                false
            } else if miss_done {
                // equal weights go to the intersecting side
                2 * wm == total
            } else {
                true
            };
            if displace_hit && !hit_done {
                while let Some((c, sz)) = q.next_intersecting() {
                    hit.push(c);
                    wh += sz;
                }
            } else if !displace_hit && !miss_done {
                while let Some((c, sz)) = q.next_nonintersecting() {
                    miss.push(c);
                    wm += sz;
                }
            }
        }
        let (moved, weight) = if displace_hit { (hit, wh) } else { (miss, wm) };
        if moved.is_empty() {
            let bit = !displace_hit;
            class.signature.push(bit);
            return SplitOutcome::Unsplit { class: id, bit };
        }

        let old_peak = class.peak_size;
        let comps: Vec<Arc<Component>> = moved
            .iter()
            .map(|&cid| class.reporter.delete_component(cid).expect("reported component is a member"))
            .collect();
        let reporter = Reporter::build(self.family, comps).expect("fresh reporter");
        class.total_size -= weight;
        let mut sig = class.signature.clone();
        class.signature.push(!displace_hit);
        sig.push(displace_hit);
        let indexed = class.indexed;
        let new_id = self.push_class(sig, weight, indexed, reporter);
        let new_class = self.classes[new_id.0 as usize].as_ref().unwrap();
        for c in new_class.reporter.members().values() {
            self.ledger.displace(c, old_peak);
        }
        for &cid in &moved {
            self.class_of.insert(cid, new_id);
        }
        self.ledger.splits += 1;
        self.ledger.displaced_weight += weight as u64;
        SplitOutcome::Split { kept: id, displaced: new_id, moved, displaced_weight: weight }
    }

    /// Removes a component from its class, retiring the class when it empties.
    pub fn delete_component(&mut self, cid: ComponentId) -> Result<Arc<Component>> {
        let id = self.class_of.remove(&cid).ok_or(Error::MissingComponent(cid))?;
        let class = self.classes[id.0 as usize].as_mut().expect("class of a live component");
        let c = class.reporter.delete_component(cid)?;
        class.total_size -= c.size();
        if class.reporter.is_empty() {
            let class = self.classes[id.0 as usize].take().unwrap();
            if class.indexed && self.index.get(&class.signature) == Some(&id) {
                self.index.remove(&class.signature);
            }
            self.live -= 1;
        }
        self.ledger.forget(&c);
        Ok(c)
    }

    fn check_signature_len(&self, sig: &Signature) -> Result<()> {
        if sig.len() != self.q.len() {
            return Err(Error::InvalidParams(format!(
                "signature has {} bits, insertion sequence has {}",
                sig.len(),
                self.q.len()
            )));
        }
        Ok(())
    }

    /// Adds `c` to the indexed class with signature `sig`, creating it if needed.
    pub fn insert_component(&mut self, c: Arc<Component>, sig: Signature) -> Result<ClassId> {
        self.check_signature_len(&sig)?;
        if self.class_of.contains_key(&c.id) {
            return Err(Error::DuplicateComponent(c.id));
        }
        self.ledger.sigma += c.size() as u64;
        let cid = c.id;
        let id = match self.index.get(&sig) {
            Some(&id) => {
                let class = self.classes[id.0 as usize].as_mut().unwrap();
                let size = c.size();
                class.reporter.insert_component(c.clone())?;
                class.total_size += size;
                class.peak_size = class.peak_size.max(class.total_size);
                let peak = class.peak_size;
                self.ledger.enter(&c, peak);
                id
            }
            None => self.new_class(c, sig, true)?,
        };
        self.class_of.insert(cid, id);
        Ok(id)
    }

    /// Adds `c` as the only member of a new class that the index never returns.
    pub fn insert_singleton(&mut self, c: Arc<Component>, sig: Signature) -> Result<ClassId> {
        self.check_signature_len(&sig)?;
        if self.class_of.contains_key(&c.id) {
            return Err(Error::DuplicateComponent(c.id));
        }
        self.ledger.sigma += c.size() as u64;
        let cid = c.id;
        let id = self.new_class(c, sig, false)?;
        self.class_of.insert(cid, id);
        Ok(id)
    }

    fn new_class(&mut self, c: Arc<Component>, sig: Signature, indexed: bool) -> Result<ClassId> {
        let size = c.size();
        self.ledger.enter(&c, size);
        let reporter = Reporter::build(self.family, [c])?;
        Ok(self.push_class(sig, size, indexed, reporter))
    }

    /// Checks every member of every class against its signature with direct
    /// predicates over the whole insertion sequence.
    pub fn check_signatures(&self) -> std::result::Result<(), String> {
        for class in self.classes() {
            if class.signature.len() != self.q.len() {
                return Err(format!("{} has {} bits for {} insertions", class.id, class.signature.len(), self.q.len()));
            }
            let mut total = 0;
            for c in class.members() {
                total += c.size();
                for (i, s) in self.q.iter().enumerate() {
                    if c.touched_by(s) != class.signature.get(i) {
                        return Err(format!("{} in {}: bit {i} disagrees with geometry", c.id, class.id));
                    }
                }
            }
            if total != class.total_size {
                return Err(format!("{} total {} but members weigh {total}", class.id, class.total_size));
            }
        }
        Ok(())
    }
}

/// Final signature of each component after replaying `q` on a throwaway
/// registry seeded with exactly these components.
pub fn classify_by_replay(
    family: Family,
    components: Vec<Arc<Component>>,
    q: &[Shape],
) -> Result<Vec<(Arc<Component>, Signature)>> {
    let mut reg = ClassRegistry::init_phase(family, components)?;
    for s in q {
        reg.insert_q(*s)?;
    }
    let mut out = Vec::new();
    for class in reg.classes() {
        for c in class.members() {
            out.push((c.clone(), class.signature.clone()));
        }
    }
    out.sort_by_key(|(c, _)| c.id);
    Ok(out)
}

/// Direct signature of `c` against `q`: one predicate batch per entry.
pub fn direct_signature(c: &Component, q: &[Shape]) -> Signature {
    Signature::from_bits(q.iter().map(|s| c.objects.iter().any(|o| touch(&o.shape, s))))
}
