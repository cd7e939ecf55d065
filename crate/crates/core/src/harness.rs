//! Running workloads on the engine, differential verification against the
//! brute-force oracle, and benchmarking.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{Engine, EngineConfig, PhaseSummary};
use crate::error::{Error, Result};
use crate::geometry::{Family, ObjectId, Shape};
use crate::oracle::OracleGraph;
use crate::workload::{generate, GenParams, Op, Ratios, Workload};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Connected(bool),
    Count(usize),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Connected(b) => write!(f, "{}", u8::from(*b)),
            Answer::Count(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpStat {
    pub index: usize,
    pub kind: &'static str,
    pub nanos: u64,
    pub phase: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub answers: Vec<Answer>,
    pub op_stats: Vec<OpStat>,
    pub phases: Vec<PhaseSummary>,
}

/// Workload ids mapped onto engine ids. Leading inserts become the initial set.
struct Driver {
    engine: Engine,
    ids: HashMap<ObjectId, ObjectId>,
    start: usize,
}

impl Driver {
    fn new(w: &Workload, config: &EngineConfig) -> Result<Self> {
        if config.family != w.family {
            return Err(Error::FamilyMismatch { expected: w.family, found: config.family });
        }
        let start = w.initial_len();
        let mut shapes = Vec::with_capacity(start);
        let mut ids = HashMap::with_capacity(start);
        for (k, op) in w.ops[..start].iter().enumerate() {
            if let Op::Insert(o) = op {
                shapes.push(o.shape);
                ids.insert(o.id, ObjectId(k as u64));
            }
        }
        Ok(Driver { engine: Engine::new(config.clone(), &shapes)?, ids, start })
    }

    fn id(&self, id: ObjectId) -> Result<ObjectId> {
        self.ids.get(&id).copied().ok_or(Error::UnknownObject(id))
    }

    fn step(&mut self, op: &Op) -> Result<Option<Answer>> {
        Ok(match *op {
            Op::Insert(o) => {
                let eid = self.engine.insert(o.shape)?;
                self.ids.insert(o.id, eid);
                None
            }
            Op::Delete(id) => {
                let eid = self.id(id)?;
                self.engine.delete(eid)?;
                self.ids.remove(&id);
                None
            }
            Op::Query(a, b) => Some(Answer::Connected(self.engine.query(self.id(a)?, self.id(b)?)?)),
            Op::Count => Some(Answer::Count(self.engine.num_components())),
        })
    }

    fn phases(&self) -> Vec<PhaseSummary> {
        let mut p = self.engine.history().to_vec();
        p.push(self.engine.current_summary());
        p
    }
}

fn kind(op: &Op) -> &'static str {
    match op {
        Op::Insert(_) => "insert",
        Op::Delete(_) => "delete",
        Op::Query(..) => "query",
        Op::Count => "count",
    }
}

pub fn run(w: &Workload, config: &EngineConfig) -> Result<RunOutput> {
    let mut d = Driver::new(w, config)?;
    let mut answers = Vec::new();
    let mut op_stats = Vec::new();
    for (index, op) in w.ops.iter().enumerate().skip(d.start) {
        let t = Instant::now();
        let a = d.step(op)?;
        op_stats.push(OpStat { index, kind: kind(op), nanos: t.elapsed().as_nanos() as u64, phase: d.engine.phase() });
        answers.extend(a);
    }
    Ok(RunOutput { answers, op_stats, phases: d.phases() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// 1-based line in the workload text (the header is line 1).
    pub line: usize,
    pub op: Op,
    pub expected: Answer,
    pub got: Answer,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} `{}`: oracle {} engine {}", self.line, self.op, self.expected, self.got)
    }
}

/// Extra checks during verification.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyChecks {
    /// Check class signatures after every `k`-th update (0 disables).
    pub signature_every: usize,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub answers_checked: usize,
    pub divergence: Option<Divergence>,
    /// Number of updates after which signatures were checked.
    pub signature_checks: usize,
    pub signature_failure: Option<String>,
    pub updates: usize,
    pub phases: Vec<PhaseSummary>,
}

impl VerifyReport {
    pub fn is_match(&self) -> bool {
        self.divergence.is_none() && self.signature_failure.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.divergence, &self.signature_failure) {
            (Some(d), _) => write!(f, "MISMATCH {d}"),
            (None, Some(s)) => write!(f, "MISMATCH signature check: {s}"),
            (None, None) => write!(f, "MATCH ({} answers)", self.answers_checked),
        }
    }
}

/// Runs engine and oracle side by side and stops at the first divergence.
pub fn verify(w: &Workload, config: &EngineConfig, checks: VerifyChecks) -> Result<VerifyReport> {
    let mut d = Driver::new(w, config)?;
    let mut oracle = OracleGraph::new();
    for op in &w.ops[..d.start] {
        if let Op::Insert(o) = op {
            oracle.insert(o.id, o.shape);
        }
    }
    let mut report = VerifyReport {
        answers_checked: 0,
        divergence: None,
        signature_checks: 0,
        signature_failure: None,
        updates: 0,
        phases: Vec::new(),
    };
    for (k, op) in w.ops.iter().enumerate().skip(d.start) {
        let got = d.step(op)?;
        let expected = match *op {
            Op::Insert(o) => {
                oracle.insert(o.id, o.shape);
                None
            }
            Op::Delete(id) => {
                oracle.delete(id);
                None
            }
            Op::Query(a, b) => Some(Answer::Connected(oracle.connected(a, b))),
            Op::Count => Some(Answer::Count(oracle.count())),
        };
        if op.is_update() {
            report.updates += 1;
            if checks.signature_every > 0 && report.updates % checks.signature_every == 0 {
                report.signature_checks += 1;
                if let Err(e) = d.engine.check_signatures() {
                    report.signature_failure = Some(format!("line {}: {e}", k + 2));
                    break;
                }
            }
        }
        if let (Some(e), Some(g)) = (expected, got) {
            report.answers_checked += 1;
            if e != g {
                report.divergence = Some(Divergence { line: k + 2, op: *op, expected: e, got: g });
                break;
            }
        }
    }
    report.phases = d.phases();
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub q: usize,
    pub updates: usize,
    pub queries: usize,
    pub amortized_update_us: f64,
    pub mean_query_ns: f64,
    pub displaced_weight: u64,
    pub max_classes: usize,
    pub phases: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct BenchParams {
    pub density: f64,
    pub updates: usize,
    pub queries: usize,
    pub ratios: Ratios,
    pub q: Option<usize>,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            density: 1.5,
            updates: 256,
            queries: 20_000,
            ratios: Ratios { insert: 0.5, delete: 0.5, query: 0.0, count: 0.0 },
            q: None,
        }
    }
}

/// Times `p.updates` mixed updates after loading `n` objects, then
/// `p.queries` connectivity queries over pre-drawn live pairs.
pub fn bench_one(family: Family, n: usize, seed: u64, p: &BenchParams) -> Result<BenchRow> {
    let mut gp = GenParams::new(family, n, p.updates, p.density, seed);
    gp.ratios = p.ratios;
    let w = generate(&gp)?;
    let config = EngineConfig::new(family).with_q(p.q);
    let mut d = Driver::new(&w, &config)?;
    let q = d.engine.phase_length();
    let t = Instant::now();
    let mut updates = 0;
    for op in &w.ops[d.start..] {
        if op.is_update() {
            d.step(op)?;
            updates += 1;
        }
    }
    let update_time = t.elapsed().as_secs_f64();

    let live: Vec<ObjectId> = d.ids.values().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let pairs: Vec<(ObjectId, ObjectId)> = if live.is_empty() {
        Vec::new()
    } else {
        (0..p.queries).map(|_| (live[rng.random_range(0..live.len())], live[rng.random_range(0..live.len())])).collect()
    };
    let t = Instant::now();
    let mut hits = 0usize;
    for &(a, b) in &pairs {
        hits += usize::from(d.engine.query(a, b)?);
    }
    let query_time = t.elapsed().as_secs_f64();
    std::hint::black_box(hits);

    let phases = d.phases();
    Ok(BenchRow {
        family,
        n,
        seed,
        q,
        updates,
        queries: pairs.len(),
        amortized_update_us: if updates == 0 { 0.0 } else { update_time * 1e6 / updates as f64 },
        mean_query_ns: if pairs.is_empty() { 0.0 } else { query_time * 1e9 / pairs.len() as f64 },
        displaced_weight: phases.iter().map(|s| s.ledger.displaced_weight).sum(),
        max_classes: phases.iter().map(|s| s.max_classes).max().unwrap_or(0),
        phases: phases.len(),
    })
}

pub fn bench(family: Family, ns: &[usize], seeds: u64, p: &BenchParams) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for seed in 0..seeds {
            rows.push(bench_one(family, n, seed, p)?);
        }
    }
    Ok(rows)
}

/// Shapes of the live objects of a workload prefix, for tools that need a static instance.
pub fn live_shapes(w: &Workload) -> Vec<Shape> {
    let mut live: Vec<(ObjectId, Shape)> = Vec::new();
    for op in &w.ops {
        match op {
            Op::Insert(o) => live.push((o.id, o.shape)),
            Op::Delete(id) => live.retain(|(i, _)| i != id),
            _ => {}
        }
    }
    live.into_iter().map(|(_, s)| s).collect()
}
