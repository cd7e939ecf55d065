use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geoconn::harness::{self, BenchParams, VerifyChecks};
use geoconn::oracle::class_count_experiment;
use geoconn::separator::{find_disk_separator, random_disks, verify_separator, SeparatorRow};
use geoconn::workload::{generate, GenParams, Ratios, Workload};
use geoconn::{EngineConfig, Family};

#[derive(Parser)]
#[command(name = "geoconn", version, about = "Dynamic connectivity over planar intersection graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a workload file.
    Gen(GenArgs),
    /// Execute a workload and print one answer per Q/C line.
    Run(RunArgs),
    /// Run engine and oracle side by side.
    Verify(VerifyArgs),
    /// Time fixed-ratio workloads for a list of sizes.
    Bench(BenchArgs),
    /// Count signature classes against a growing query prefix.
    Classes(ClassesArgs),
    /// Compute disk separators on random instances.
    Separator(SeparatorArgs),
}

#[derive(Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "GEOCONN_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Initial objects.
    #[arg(long)]
    n: usize,
    /// Mixed operations after the initial inserts.
    #[arg(long, default_value_t = 0)]
    ops: usize,
    /// Expected intersection degree.
    #[arg(long, default_value_t = 1.5)]
    density: f64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = Ratios::default().insert)]
    insert_ratio: f64,
    #[arg(long, default_value_t = Ratios::default().delete)]
    delete_ratio: f64,
    #[arg(long, default_value_t = Ratios::default().query)]
    query_ratio: f64,
    #[arg(long, default_value_t = Ratios::default().count)]
    count_ratio: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Workload file, or `-` for stdin.
    workload: PathBuf,
    /// Fixed phase length instead of the family default.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-operation timing CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Per-phase ledger CSV.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    workload: PathBuf,
    #[arg(long)]
    q: Option<usize>,
    /// Check every class signature after every k-th update (0 disables).
    #[arg(long, default_value_t = 1)]
    signature_every: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Seeds 0..seeds per size.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = BenchParams::default().density)]
    density: f64,
    /// Updates timed per run.
    #[arg(long, default_value_t = BenchParams::default().updates)]
    ops: usize,
    #[arg(long, default_value_t = BenchParams::default().queries)]
    queries: usize,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassesArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.5)]
    density: f64,
    /// Comma-separated query prefix lengths.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
    q: Vec<usize>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeparatorArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Instances per size, seeded from `--seed` upward.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Mismatch,
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<Workload, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(Workload::parse(&text)?)
}

fn config(w: &Workload, q: Option<usize>) -> EngineConfig {
    EngineConfig::new(w.family).with_q(q)
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let mut p = GenParams::new(a.family, a.n, a.ops, a.density, a.seed.seed);
    p.ratios = Ratios { insert: a.insert_ratio, delete: a.delete_ratio, query: a.query_ratio, count: a.count_ratio };
    let w = generate(&p)?;
    let mut out = sink(&a.out)?;
    out.write_all(w.to_text().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let w = load(&a.workload)?;
    let res = harness::run(&w, &config(&w, a.q))?;
    let mut out = sink(&a.out)?;
    for ans in &res.answers {
        writeln!(out, "{ans}")?;
    }
    out.flush()?;
    if let Some(p) = &a.stats {
        let mut wtr = csv::Writer::from_path(p)?;
        for s in &res.op_stats {
            wtr.serialize(s)?;
        }
        wtr.flush()?;
    }
    if let Some(p) = &a.ledger {
        let mut wtr = csv::Writer::from_path(p)?;
        wtr.write_record([
            "phase",
            "n",
            "q",
            "updates",
            "inserts",
            "splits",
            "displaced_weight",
            "sigma",
            "aggregate_bound",
            "object_violations",
            "max_displacements",
            "replay_weight",
            "max_classes",
        ])?;
        for s in &res.phases {
            wtr.write_record([
                s.phase.to_string(),
                s.n.to_string(),
                s.q.to_string(),
                s.updates.to_string(),
                s.ledger.inserts.to_string(),
                s.ledger.splits.to_string(),
                s.ledger.displaced_weight.to_string(),
                s.ledger.sigma.to_string(),
                format!("{:.1}", s.aggregate_bound),
                s.object_violations.to_string(),
                s.max_displacements.to_string(),
                s.replay_weight.to_string(),
                s.max_classes.to_string(),
            ])?;
        }
        wtr.flush()?;
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let w = load(&a.workload)?;
    let report = harness::verify(&w, &config(&w, a.q), VerifyChecks { signature_every: a.signature_every })?;
    let mut out = sink(&a.out)?;
    writeln!(out, "{report}")?;
    out.flush()?;
    if report.is_match() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let p = BenchParams { density: a.density, updates: a.ops, queries: a.queries, q: a.q, ..BenchParams::default() };
    let rows = harness::bench(a.family, &a.n, a.seeds, &p)?;
    let mut wtr = csv::Writer::from_writer(sink(&a.out)?);
    for r in &rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

fn classes(a: ClassesArgs) -> Result<(), Failure> {
    let rows = class_count_experiment(a.family, a.n, a.density, &a.q, a.seed.seed)?;
    let mut wtr = csv::Writer::from_writer(sink(&a.out)?);
    for r in &rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

fn separator(a: SeparatorArgs) -> Result<(), Failure> {
    let mut wtr = csv::Writer::from_writer(sink(&a.out)?);
    for &n in &a.n {
        for seed in a.seed.seed..a.seed.seed + a.seeds {
            let disks = random_disks(n, seed);
            let res = find_disk_separator(&disks)?;
            verify_separator(&disks, &res).map_err(Failure::Usage)?;
            wtr.serialize(SeparatorRow {
                n,
                seed,
                inside: res.inside_ids.len(),
                outside: res.outside_ids.len(),
                boundary: res.boundary_ids.len(),
                stab_points: res.stabbing_points.len(),
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Run(a) => run(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Classes(a) => classes(a),
        Cmd::Separator(a) => separator(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
