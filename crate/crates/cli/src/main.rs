use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use geoplan::enumerate::{
    census_with_progress, is_realizable, BivectorCensus, RealizeConfig, SearchConfig, Side, Verdict,
};
use geoplan::families::{self, FamilyId, FamilyVerdict};
use geoplan::mapbuild::{self, MapOptions, SignPolicy};
use geoplan::partition::SearchMode;
use geoplan::{Bimatrix, DegreeSequence, Error, Plan, SequencePair};

#[derive(Parser)]
#[command(name = "geoplan", version, about = "Geographic plans, their degree sequences, and maps")]
struct Cli {
    /// Suppress progress lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the predicates of a plan given as a bimatrix.
    Check(CheckArgs),
    /// Decide whether a degree-sequence pair is realizable.
    Realize(RealizeArgs),
    /// Census of every feasible pair with a given number of edges.
    Search(SearchArgs),
    /// List, verify, or tabulate the known families.
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Build word representations (maps) for a geographic plan.
    Map(MapArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Necessary,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => SearchMode::Strict,
            Mode::Necessary => SearchMode::Necessary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Auto,
    D,
    T,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Free,
    Rule,
}

#[derive(Args)]
struct WorkerArgs {
    /// Worker threads.
    #[arg(long, env = "GEOPLAN_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Bimatrix file (`B_G row|B_H row` per line) or an inline bimatrix
    /// such as `(11|2)`.
    plan: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct RealizeArgs {
    /// Vertex degrees, e.g. `4,4` or `3^4`.
    #[arg(long)]
    d: String,
    /// Face degrees.
    #[arg(long)]
    t: String,
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    /// Which sequence to realize as the partitioned graph.
    #[arg(long, value_enum, default_value = "auto")]
    side: SideArg,
    /// Partition-search node budget.
    #[arg(long)]
    budget: Option<u64>,
    #[command(flatten)]
    workers: WorkerArgs,
    /// Directory for witness files (realization, partition, plan, word).
    #[arg(long)]
    emit_witness: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    /// Edge count `L` or range `A..B` (inclusive).
    #[arg(long)]
    edges: String,
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    #[command(flatten)]
    workers: WorkerArgs,
    /// Per-pair node budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Output file; stdout lists non-realizable pairs when given.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Show all family ids and their constraints.
    List,
    /// Verify one instance.
    Verify {
        id: String,
        /// Parameters, e.g. `k=3,a=4,n=4`.
        #[arg(long, default_value = "")]
        params: String,
        /// Largest edge count searched exhaustively.
        #[arg(long, default_value_t = 8)]
        ell_budget: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Instances with at most `max-ell` edges.
    Table {
        id: String,
        #[arg(long, default_value_t = 5)]
        max_ell: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct MapArgs {
    /// Bimatrix file or inline bimatrix.
    #[arg(long)]
    plan: String,
    /// Report every candidate, not only the first valid one.
    #[arg(long)]
    all: bool,
    /// Limit on raw candidates and trail steps.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, value_enum, default_value = "free")]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// `println!` that exits quietly when stdout is closed early (`| head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Budget(_) | Error::Cancelled) => 3,
        Some(Error::Inconsistency(_)) => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Realize(a) => realize(a),
        Command::Search(a) => search(a, cli.quiet),
        Command::Family { command } => family(command),
        Command::Map(a) => map(a),
    }
}

fn load_plan(src: &str) -> anyhow::Result<Plan> {
    let path = Path::new(src);
    let b = if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {src}"))?;
        Bimatrix::parse(&text)?
    } else if src.trim_start().starts_with('(') {
        Bimatrix::parse_inline(src)?
    } else {
        bail!(Error::Usage(format!("no such plan file `{src}`")));
    };
    Ok(Plan::from_bimatrix(&b))
}

fn print_json(value: &impl Serialize) -> anyhow::Result<()> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Writes through a temporary file in the same directory, so an interrupted
/// run never leaves a partial output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn check(a: &CheckArgs) -> anyhow::Result<ExitCode> {
    let plan = load_plan(&a.plan)?;
    let report = plan.report();
    match a.format {
        Format::Text => {
            out!("vertices {}  edges {}  faces {}  chi {}", report.n, report.ell, report.m, report.chi);
            out!("connected g {}  connected h {}", report.connected_g, report.connected_h);
            out!("even {}  locally eulerian {}", report.even, report.locally_eulerian);
            out!("geographic {}", report.geographic);
            out!("surfaces {}", report.surfaces.join(" "));
        }
        _ => print_json(&report)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_seq(s: &str, what: &str) -> anyhow::Result<DegreeSequence> {
    s.parse::<DegreeSequence>()
        .map_err(|e| anyhow::Error::new(e).context(format!("parsing --{what}")))
}

fn realize(a: &RealizeArgs) -> anyhow::Result<ExitCode> {
    let d = parse_seq(&a.d, "d")?;
    let t = parse_seq(&a.t, "t")?;
    if d.sum() != t.sum() {
        let out = json!({
            "d": d, "t": t, "verdict": "infeasible",
            "reason": format!("sum of d is {}, sum of t is {}", d.sum(), t.sum()),
        });
        emit_verdict(a.format, &out)?;
        return Ok(ExitCode::SUCCESS);
    }
    let pair = SequencePair::new(d, t)?;
    let cfg = RealizeConfig {
        mode: a.mode.into(),
        side: match a.side {
            SideArg::Auto => Side::Auto,
            SideArg::D => Side::D,
            SideArg::T => Side::T,
        },
        node_budget: a.budget,
        workers: a.workers.workers,
    };
    let start = std::time::Instant::now();
    let verdict = is_realizable(&pair, &cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let out = match verdict {
        Verdict::Realizable(w) => {
            let mut files = Vec::new();
            let mut word = None;
            if let Some(dir) = &a.emit_witness {
                fs::create_dir_all(dir)?;
                let mut put = |name: &str, text: String| -> anyhow::Result<()> {
                    let p = dir.join(name);
                    write_atomic(&p, text.as_bytes())?;
                    files.push(p.display().to_string());
                    Ok(())
                };
                put("realization.txt", w.realization.to_text())?;
                put("partition.txt", w.partition.to_text())?;
                put("plan.txt", w.plan.to_bimatrix().to_text())?;
                if w.plan.is_geographic() {
                    match mapbuild::find_valid_map(&w.plan, &MapOptions::default()) {
                        Ok((c, s)) => {
                            put("word.txt", c.word.to_text())?;
                            word = Some(json!({"word": c.word.to_string(), "surface": s.surface.to_string()}));
                        }
                        Err(Error::Budget(_)) => {}
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            json!({
                "pair": pair.key(),
                "verdict": "realizable",
                "mode": cfg.mode,
                "realized": w.realized,
                "plan": w.plan.to_bimatrix().to_string(),
                "witness_files": files,
                "map": word,
                "wall_seconds": wall,
            })
        }
        Verdict::NotRealizable(c) => json!({
            "pair": pair.key(),
            "verdict": "non-realizable",
            "mode": cfg.mode,
            "certificate": c,
            "wall_seconds": wall,
        }),
    };
    emit_verdict(a.format, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn emit_verdict(format: Format, out: &serde_json::Value) -> anyhow::Result<()> {
    if format == Format::Text {
        let pair = out.get("pair").cloned().unwrap_or_else(|| json!(format!("{};{}", out["d"], out["t"])));
        out!("{} {}", pair.as_str().unwrap_or_default(), out["verdict"].as_str().unwrap_or_default());
        Ok(())
    } else {
        print_json(out)
    }
}

fn parse_edges(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || anyhow::Error::new(Error::Usage(format!("bad --edges `{s}`, expected L or A..B")));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let l = s.trim().parse().map_err(|_| bad())?;
            (l, l)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn census_csv(censuses: &[BivectorCensus]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bivector", "verdict"])?;
    for c in censuses {
        for (pair, ok) in c.rows() {
            w.write_record([pair.key().as_str(), if ok { "realizable" } else { "non-realizable" }])?;
        }
    }
    Ok(w.into_inner()?)
}

fn search(a: &SearchArgs, quiet: bool) -> anyhow::Result<ExitCode> {
    let ells = parse_edges(&a.edges)?;
    let mut censuses = Vec::new();
    for &ell in &ells {
        let cfg = SearchConfig {
            ell,
            mode: a.mode.into(),
            workers: a.workers.workers,
            node_budget: a.budget,
        };
        let step = AtomicUsize::new(0);
        let c = census_with_progress(&cfg, |done, total| {
            if quiet {
                return;
            }
            // about twenty lines per census
            let bucket = done * 20 / total.max(1);
            if step.fetch_max(bucket, Ordering::Relaxed) < bucket {
                eprintln!("ell {ell}: {done}/{total} pairs");
            }
        })?;
        if !quiet {
            eprintln!(
                "ell {ell}: {} feasible, {} realizable, {} non-realizable, {:.2}s on {} worker(s)",
                c.feasible_count,
                c.realizable.len(),
                c.non_realizable.len(),
                c.stats.wall_seconds,
                a.workers.workers
            );
        }
        censuses.push(c);
    }
    let bytes = match a.format {
        Format::Csv => census_csv(&censuses)?,
        Format::Json => {
            let mut s = if censuses.len() == 1 {
                serde_json::to_string_pretty(&censuses[0])?
            } else {
                serde_json::to_string_pretty(&censuses)?
            };
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => {
            let mut s = String::new();
            for c in &censuses {
                for (pair, ok) in c.rows() {
                    s.push_str(&format!("{} {}\n", pair, if ok { "realizable" } else { "non-realizable" }));
                }
            }
            s.into_bytes()
        }
    };
    match &a.out {
        Some(path) => {
            write_atomic(path, &bytes)?;
            for c in &censuses {
                for p in &c.non_realizable {
                    out!("{p}");
                }
            }
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn family(cmd: &FamilyCommand) -> anyhow::Result<ExitCode> {
    match cmd {
        FamilyCommand::List => {
            for f in FamilyId::ALL {
                out!("{:<10} {}", f.name(), f.description());
            }
            Ok(ExitCode::SUCCESS)
        }
        FamilyCommand::Verify {
            id,
            params,
            ell_budget,
            format,
        } => {
            let id: FamilyId = id.parse()?;
            let inst = families::instance(id, &families::parse_params(params)?)?;
            let verdict = families::verify(&inst, *ell_budget)?;
            let (out, code) = match &verdict {
                FamilyVerdict::WitnessVerified { plan } => (
                    json!({
                        "family": id, "params": inst.params, "pair": inst.pair.key(), "chi": inst.chi,
                        "verdict": "realizable", "witness": "construction verified",
                        "plan": plan.to_bimatrix().to_string(),
                    }),
                    ExitCode::SUCCESS,
                ),
                FamilyVerdict::Confirmed(c) => (
                    json!({
                        "family": id, "params": inst.params, "pair": inst.pair.key(), "chi": inst.chi,
                        "verdict": "non-realizable", "certificate": c,
                    }),
                    ExitCode::SUCCESS,
                ),
                FamilyVerdict::Contradiction { detail, witness } => {
                    eprintln!("FAMILY-CONTRADICTION: {detail}");
                    (
                        json!({
                            "family": id, "params": inst.params, "pair": inst.pair.key(), "chi": inst.chi,
                            "verdict": "FAMILY-CONTRADICTION", "detail": detail,
                            "witness_plan": witness.as_ref().map(|w| w.plan.to_bimatrix().to_string()),
                        }),
                        ExitCode::from(4),
                    )
                }
            };
            if *format == Format::Text {
                out!("{} {} {}", id, inst.pair, out["verdict"].as_str().unwrap_or_default());
            } else {
                print_json(&out)?;
            }
            Ok(code)
        }
        FamilyCommand::Table { id, max_ell, format } => {
            let id: FamilyId = id.parse()?;
            let rows = families::table_rows(id, *max_ell);
            match format {
                Format::Text => {
                    for r in &rows {
                        out!("{}", r.pair);
                    }
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    w.write_record(["bivector", "ell", "chi", "expected"])?;
                    for r in &rows {
                        w.write_record([
                            r.pair.key(),
                            r.ell().to_string(),
                            r.chi.to_string(),
                            if r.expected_realizable { "realizable" } else { "non-realizable" }.to_string(),
                        ])?;
                    }
                    w.flush()?;
                }
                Format::Json => print_json(&rows)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn map(a: &MapArgs) -> anyhow::Result<ExitCode> {
    let plan = load_plan(&a.plan)?;
    let opts = MapOptions {
        policy: match a.policy {
            PolicyArg::Free => SignPolicy::Free,
            PolicyArg::Rule => SignPolicy::Rule,
        },
        budget: a.budget,
    };
    if a.all {
        let cands = mapbuild::word_candidates(&plan, &opts)?;
        let mut rows = Vec::new();
        let mut surfaces = std::collections::BTreeSet::new();
        for c in &cands {
            let (s, ok) = c.evaluate()?;
            if ok {
                surfaces.insert(s.surface);
            }
            rows.push(json!({
                "word": c.word.to_string(),
                "surface": s.surface.to_string(),
                "points": s.vertex_classes.len(),
                "valid": ok,
            }));
        }
        if surfaces.is_empty() {
            bail!(Error::Inconsistency("geographic plan has no valid word representation".into()));
        }
        let surfaces: Vec<String> = surfaces.iter().map(ToString::to_string).collect();
        if a.format == Format::Text {
            for r in &rows {
                out!(
                    "{} {} points={} {}",
                    r["word"].as_str().unwrap_or_default(),
                    r["surface"].as_str().unwrap_or_default(),
                    r["points"],
                    if r["valid"].as_bool() == Some(true) { "valid" } else { "invalid" }
                );
            }
            out!("surfaces {}", surfaces.join(" "));
        } else {
            let valid = rows.iter().filter(|r| r["valid"].as_bool() == Some(true)).count();
            print_json(&json!({
                "candidates": rows.len(),
                "valid": valid,
                "surfaces": surfaces,
                "words": rows,
            }))?;
        }
    } else {
        let (c, s) = mapbuild::find_valid_map(&plan, &opts)?;
        if a.format == Format::Text {
            out!("{}", c.word.to_text().trim_end());
            out!("surface {}", s.surface);
        } else {
            print_json(&json!({
                "word": c.word.to_string(),
                "surface": s.surface.to_string(),
                "chi": s.chi,
                "orientable": s.orientable,
            }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
