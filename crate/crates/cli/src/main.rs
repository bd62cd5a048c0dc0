//! `bggc` — compute, cache, and render bigraded cohomology tables.
//!
//! Exit codes: 0 success, 1 `diff` found differences, 2 usage error,
//! 3 internal invariant failure.

mod cache;
mod emit;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bgg_core::{assemble_with_cache, check_tau_symmetry, AssembleMode, BlockSpec, NoCache, Series};

use crate::emit::{table_out, Format, TableOut};

#[derive(Parser)]
#[command(
    name = "bggc",
    about = "Bigraded cohomology tables of blocks of the small quantum group",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and print the degree-s table(s) of a block.
    Table(TableArgs),
    /// Compare two JSON table files cell by cell.
    Diff(DiffArgs),
}

#[derive(Parser)]
struct TableArgs {
    /// Root system, e.g. A2, B3, G2.
    #[arg(long = "type")]
    rtype: String,
    /// Comma-separated 1-based simple indices of the block stabilizer;
    /// empty string for the principal block.
    #[arg(long, default_value = "", allow_hyphen_values = false)]
    block: String,
    /// Cohomological degree: a single integer or an inclusive range a..b.
    #[arg(long)]
    s: String,
    /// direct = compute every cell; half-tau = compute the left half and
    /// mirror the rest.
    #[arg(long, value_enum, default_value = "half-tau")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Output file (default stdout). Written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread budget (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Persistent result cache directory (env BGGC_CACHE_DIR also works;
    /// the flag wins). No caching when neither is set.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Render per-cell dimensions instead of module decompositions
    /// (text/latex only; JSON always carries full multiplicity data).
    #[arg(long)]
    dims_only: bool,
}

#[derive(Parser)]
struct DiffArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Direct,
    HalfTau,
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with 2 on usage errors
    let code = match cli.command {
        Command::Table(args) => run_table(&args),
        Command::Diff(args) => run_diff(&args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

fn parse_type(t: &str) -> Result<(Series, usize), Failure> {
    let mut chars = t.chars();
    let letter = chars
        .next()
        .ok_or_else(|| Failure::Usage("empty --type".into()))?;
    let series: Series = letter
        .to_string()
        .parse()
        .map_err(|e: String| Failure::Usage(e))?;
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| Failure::Usage(format!("bad rank in --type {t}")))?;
    Ok((series, rank))
}

fn parse_block(b: &str, rank: usize) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for part in b.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let i: usize = part
            .parse()
            .map_err(|_| Failure::Usage(format!("bad block index `{part}`")))?;
        if i < 1 || i > rank {
            return Err(Failure::Usage(format!(
                "block index {i} out of range 1..={rank}"
            )));
        }
        if !out.contains(&(i - 1)) {
            out.push(i - 1);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn parse_s(s: &str) -> Result<Vec<i64>, Failure> {
    let bad = || Failure::Usage(format!("bad --s `{s}`: expected an integer or a..b"));
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b || a < 0 {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        let v: i64 = s.trim().parse().map_err(|_| bad())?;
        if v < 0 {
            return Err(bad());
        }
        Ok(vec![v])
    }
}

fn run_table(args: &TableArgs) -> Result<u8, Failure> {
    let (series, rank) = parse_type(&args.rtype)?;
    let levi = parse_block(&args.block, rank)?;
    let s_values = parse_s(&args.s)?;
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    let block = BlockSpec {
        series,
        rank,
        levi: levi.clone(),
    };
    // Validate the block eagerly so bad input is a usage error, not a
    // failure deep inside assembly.
    block
        .parabolic()
        .map_err(|e| Failure::Usage(format!("invalid --type/--block: {e}")))?;
    let cache_dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("BGGC_CACHE_DIR").map(PathBuf::from));
    let store: Box<dyn bgg_core::RecordSource> = match &cache_dir {
        Some(dir) => Box::new(
            cache::DiskCache::open(dir, &block)
                .map_err(|e| Failure::Internal(format!("cache: {e}")))?,
        ),
        None => Box::new(NoCache),
    };
    let mode = match args.mode {
        Mode::Direct => AssembleMode::Full,
        Mode::HalfTau => AssembleMode::HalfTau,
    };
    let mut tables: Vec<TableOut> = Vec::new();
    for &s in &s_values {
        let t = assemble_with_cache(&block, s, mode, store.as_ref())
            .map_err(Failure::Internal)?;
        let violations = check_tau_symmetry(&t, t.dim_gp);
        if !violations.is_empty() {
            return Err(Failure::Internal(format!(
                "τ-symmetry violated for s={s}: {}",
                violations.join("; ")
            )));
        }
        tables.push(table_out(&block, &t).map_err(Failure::Internal)?);
    }
    let rendered = emit::render(&tables, args.format, args.dims_only);
    match &args.out {
        None => {
            print!("{rendered}");
            std::io::stdout().flush().ok();
        }
        Some(path) => {
            write_atomic(path, rendered.as_bytes())
                .map_err(|e| Failure::Internal(format!("writing {}: {e}", path.display())))?;
        }
    }
    Ok(0)
}

fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run_diff(args: &DiffArgs) -> Result<u8, Failure> {
    let load = |p: &PathBuf| -> Result<Vec<TableOut>, Failure> {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
        // Accept a single table object or an array of tables.
        if let Ok(one) = serde_json::from_str::<TableOut>(&text) {
            return Ok(vec![one]);
        }
        serde_json::from_str::<Vec<TableOut>>(&text)
            .map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", p.display())))
    };
    let a = load(&args.a)?;
    let b = load(&args.b)?;
    if a.len() != b.len() {
        return Err(Failure::Usage(format!(
            "table count mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut differences = 0usize;
    for (ta, tb) in a.iter().zip(&b) {
        if (ta.rtype.clone(), &ta.block, ta.s) != (tb.rtype.clone(), &tb.block, tb.s) {
            return Err(Failure::Usage(format!(
                "header mismatch: {}/{:?}/s={} vs {}/{:?}/s={}",
                ta.rtype, ta.block, ta.s, tb.rtype, tb.block, tb.s
            )));
        }
        for line in emit::diff_cells(ta, tb) {
            println!("{line}");
            differences += 1;
        }
    }
    if differences == 0 {
        println!("tables identical");
        Ok(0)
    } else {
        Ok(1)
    }
}
