use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gordian::exactmat::odd_prime_divisors;
use gordian::ingest::{load_table, InvariantCache, KnotTable, LoadOptions, TableError};
use gordian::knots::{parse_expr, seifert_matrix, ExprError, KnotError};
use gordian::linkform::{LinkError, LinkingForm};
use gordian::obstruct::{
    candidate_set, report, BoundReport, EpsChoice, Invariants, ObstructError, ReportOptions,
    SearchLimits,
};
use gordian::scan::{emit_report, scan_pairs, ReportFormat, ScanError, ScanOptions, ScanRow, ScanSummary};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "gordian", version, about = "Lower bounds for the Gordian distance between knots")]
struct Cli {
    /// Knot table (comma or tab separated); defaults to the bundled prime table
    #[arg(long, global = true, env = "GORDIAN_TABLE")]
    table: Option<PathBuf>,

    /// Invariant cache file
    #[arg(long, global = true, env = "GORDIAN_CACHE")]
    cache: Option<PathBuf>,

    /// Largest group order searched exhaustively
    #[arg(long, global = true, env = "GORDIAN_CAP", default_value_t = gordian::linkform::DEFAULT_GROUP_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,

    /// Worker threads for scans [default: all cores]
    #[arg(long, global = true, env = "GORDIAN_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[arg(long, global = true, env = "GORDIAN_FORMAT", default_value = "text",
          value_parser = ["text", "csv", "json"])]
    format: String,

    /// Crossing-change signs tried by the d>=2 test
    #[arg(long, global = true, env = "GORDIAN_EPS", default_value = "both", allow_hyphen_values = true,
          value_parser = ["+1", "-1", "both"])]
    eps: String,

    /// Include connected sums up to this total crossing number in scans
    #[arg(long, global = true, env = "GORDIAN_MAX_COMPOSITE_CROSSINGS")]
    max_composite_crossings: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of one knot expression, e.g. "3_1" or "-8_7 # 9_40"
    Info { expr: String },
    /// All bounds for d(J, K)
    Bound { j: String, k: String },
    /// The candidate matrices C_d ∪ C_-d
    Candidates {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Every pair of knots built from the table
    Scan {
        /// Only use primes with at most this many crossings
        #[arg(long)]
        max_crossings: Option<u32>,
        /// Record per-pair wall time in the millis column
        #[arg(long, env = "GORDIAN_TIMING")]
        timing: bool,
        /// Write the report here instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Failure classes, mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Cap(String),
    /// Downstream reader closed stdout; not an error.
    Pipe,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Pipe => 0,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Cap(m) => m,
            Failure::Pipe => "",
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<KnotError> for Failure {
    fn from(e: KnotError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::CapExceeded { .. } | LinkError::OrderOverflow(_) => Failure::Cap(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<ObstructError> for Failure {
    fn from(e: ObstructError) -> Self {
        match e {
            e if e.is_cap() => Failure::Cap(e.to_string()),
            ObstructError::Expr(e) => e.into(),
            e => Failure::Data(e.to_string()),
        }
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match &e {
            ScanError::Pair { source, .. } | ScanError::Knot { source, .. } if source.is_cap() => {
                Failure::Cap(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Pipe;
        }
        Failure::Data(e.to_string())
    }
}

struct Context {
    table: KnotTable,
    cache: Option<InvariantCache>,
    format: ReportFormat,
    opts: ReportOptions,
}

impl Context {
    fn invariants(&self) -> Invariants<'_> {
        match &self.cache {
            Some(c) => Invariants::with_cache(&self.table, c),
            None => Invariants::new(&self.table),
        }
    }

    fn save_cache(&self) {
        if let Some(c) = &self.cache {
            if let Err(e) = c.save() {
                log::warn!("cannot write cache: {e}");
            }
        }
    }
}

fn context(cli: &Cli) -> Result<Context, Failure> {
    let table = match &cli.table {
        Some(p) => load_table(p, &LoadOptions::default())?,
        None => KnotTable::bundled(),
    };
    let cache = cli.cache.as_ref().map(InvariantCache::open);
    Ok(Context {
        table,
        cache,
        format: cli.format.parse().map_err(Failure::Usage)?,
        opts: ReportOptions {
            limits: SearchLimits::with_cap(cli.cap),
            eps: cli.eps.parse::<EpsChoice>().map_err(Failure::Usage)?,
        },
    })
}

fn info(ctx: &Context, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let expr = parse_expr(text)?;
    let a = seifert_matrix(&expr, &ctx.table)?;
    let form = LinkingForm::from_symmetric(&a.symmetrized())?;
    let inv = ctx.invariants().of(&expr).map_err(Failure::from)?;
    let fp: BTreeMap<u64, usize> = odd_prime_divisors(&inv.det)
        .into_iter()
        .map(|p| (p, inv.fp_rank(p)))
        .collect();
    let gram: Vec<Vec<String>> = form
        .gram_matrix()
        .iter()
        .map(|r| r.iter().map(|q| q.to_string()).collect())
        .collect();
    let summands: Vec<String> = expr.summands().iter().map(|s| s.to_string()).collect();
    let value = json!({
        "expr": expr.to_string(),
        "summands": summands,
        "seifert_size": a.size(),
        "seifert_matrix": a.matrix().to_string(),
        "det": inv.det.to_string(),
        "signature": inv.sigma,
        "orders": form.orders(),
        "gram": gram,
        "fp_ranks": fp,
        "s": inv.s,
        "tau": inv.tau,
        "u_max": inv.u_max,
    });
    match ctx.format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?,
        ReportFormat::Csv => {
            writeln!(out, "field,value")?;
            let obj = value.as_object().unwrap();
            for key in [
                "expr", "summands", "seifert_size", "seifert_matrix", "det", "signature", "orders",
                "gram", "fp_ranks", "s", "tau", "u_max",
            ] {
                let v = &obj[key];
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Null => String::new(),
                    other => other.to_string(),
                };
                writeln!(out, "{key},\"{}\"", s.replace('"', "\"\""))?;
            }
        }
        ReportFormat::Text => {
            let opt = |v: Option<i64>| v.map_or("unknown".to_string(), |x| x.to_string());
            writeln!(out, "knot: {expr}")?;
            writeln!(out, "summands: {}", summands.join(", "))?;
            writeln!(out, "seifert matrix: {}x{}", a.size(), a.size())?;
            writeln!(out, "det: {}", inv.det)?;
            writeln!(out, "signature: {}", inv.sigma)?;
            writeln!(out, "linking form: {form}")?;
            writeln!(out, "orders: {:?}", form.orders())?;
            for (p, r) in &fp {
                writeln!(out, "F_{p} rank: {r}")?;
            }
            writeln!(out, "s: {}", opt(inv.s))?;
            writeln!(out, "tau: {}", opt(inv.tau))?;
            writeln!(out, "u: {}", inv.u_max.map_or("unknown".to_string(), |u| format!("<= {u}")))?;
        }
    }
    Ok(())
}

fn row_of(r: &BoundReport) -> ScanRow {
    ScanRow {
        pair_key: format!("{}|{}", r.knot_j, r.knot_k),
        knot_j: r.knot_j.clone(),
        knot_k: r.knot_k.clone(),
        det_j: r.det_j.clone(),
        det_k: r.det_k.clone(),
        coprime: r.coprime,
        bound_sigma: r.classical.sigma,
        bound_s: r.classical.s,
        bound_tau: r.classical.tau,
        bound_fp: r.classical.fp,
        d1_status: r.d1.status,
        d2_status: r.d2.status,
        lower: r.lower,
        upper: r.upper,
        exact: r.exact,
        millis: None,
        prime_pair: false,
        both_two_bridge: false,
    }
}

fn bound(ctx: &Context, j: &str, k: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let (j, k) = (parse_expr(j)?, parse_expr(k)?);
    let r = report(&j, &k, &ctx.invariants(), &ctx.opts)?;
    match ctx.format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r).unwrap())?,
        ReportFormat::Csv => {
            let row = row_of(&r);
            emit_report(&[row], &ScanSummary::default(), ReportFormat::Csv, out)?;
        }
        ReportFormat::Text => write_bound_text(&r, out)?,
    }
    if r.capped() {
        return Err(Failure::Cap(format!(
            "group order {} exceeds the cap {}; linking-form tests skipped",
            r.group.iter().product::<u64>(),
            ctx.opts.limits.cap
        )));
    }
    Ok(())
}

fn write_bound_text(r: &BoundReport, out: &mut dyn Write) -> io::Result<()> {
    let opt = |v: Option<u32>| v.map_or("n/a".to_string(), |x| x.to_string());
    writeln!(out, "J: {} (det {}, signature {})", r.knot_j, r.det_j, r.sigma_j)?;
    writeln!(out, "K: {} (det {}, signature {})", r.knot_k, r.det_k, r.sigma_k)?;
    writeln!(out, "H_1(Σ(-J # K)): {:?}{}", r.group, if r.coprime { "" } else { " (determinants not coprime)" })?;
    writeln!(out, "signature bound: {}", r.classical.sigma)?;
    writeln!(out, "s bound: {}", opt(r.classical.s))?;
    writeln!(out, "tau bound: {}", opt(r.classical.tau))?;
    match r.classical.fp_prime {
        Some(p) => writeln!(out, "F_p rank bound: {} (p = {p})", r.classical.fp)?,
        None => writeln!(out, "F_p rank bound: 0")?,
    }
    for (name, v) in [("d>=2 test", &r.d1), ("d>=3 test", &r.d2)] {
        write!(out, "{name}: {}", v.status)?;
        if !v.notes.is_empty() {
            write!(out, " ({})", v.notes)?;
        }
        writeln!(out)?;
        if let Some(w) = &v.witness {
            writeln!(out, "  witness: {}", serde_json::to_string(w).unwrap())?;
        }
    }
    writeln!(out, "lower: {}", r.lower)?;
    writeln!(out, "upper: {}", opt(r.upper))?;
    writeln!(out, "verdict: {}", r.verdict)
}

fn candidates(ctx: &Context, d: i64, out: &mut dyn Write) -> Result<(), Failure> {
    let list = candidate_set(d).map_err(|e| Failure::Data(e.to_string()))?;
    match ctx.format {
        ReportFormat::Json => {
            let v: Vec<_> = list
                .iter()
                .map(|c| json!({"a": c.a, "b": c.b, "c": c.c, "det": c.det()}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap())?;
        }
        ReportFormat::Csv => {
            writeln!(out, "a,b,c,det")?;
            for c in &list {
                writeln!(out, "{},{},{},{}", c.a, c.b, c.c, c.det())?;
            }
        }
        ReportFormat::Text => {
            for c in &list {
                writeln!(out, "{c}  det {}", c.det())?;
            }
            writeln!(out, "{} matrices", list.len())?;
        }
    }
    Ok(())
}

fn scan(
    ctx: &Context,
    cli: &Cli,
    max_crossings: Option<u32>,
    timing: bool,
    output: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let opts = ScanOptions {
        max_composite_crossings: cli.max_composite_crossings,
        max_crossings,
        jobs: cli.jobs.unwrap_or(0) as usize,
        report: ctx.opts.clone(),
        timing,
        filter: None,
    };
    let res = scan_pairs(&ctx.invariants(), &opts)?;
    match output {
        Some(path) => {
            let mut f = io::BufWriter::new(
                std::fs::File::create(path)
                    .map_err(|e| Failure::Data(format!("cannot create {}: {e}", path.display())))?,
            );
            emit_report(&res.rows, &res.summary, ctx.format, &mut f)
                .and_then(|_| f.flush())
                .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))?;
        }
        None => emit_report(&res.rows, &res.summary, ctx.format, stdout)?,
    }
    if res.summary.capped > 0 {
        return Err(Failure::Cap(format!(
            "{} pairs exceeded the group-order cap {}",
            res.summary.capped, ctx.opts.limits.cap
        )));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let ctx = context(cli)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Info { expr } => info(&ctx, expr, &mut out),
        Command::Bound { j, k } => bound(&ctx, j, k, &mut out),
        Command::Candidates { d } => candidates(&ctx, *d, &mut out),
        Command::Scan {
            max_crossings,
            timing,
            output,
        } => scan(&ctx, cli, *max_crossings, *timing, output.as_ref(), &mut out),
    };
    ctx.save_cache();
    result
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Pipe) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
