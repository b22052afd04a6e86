//! `czindex`: build and query text indexes that answer pattern queries
//! directly on LZ77/LZ78-compressed patterns.

mod index_file;

use clap::{Parser, Subcommand};
use czix::lz::{self, LzParse, Scheme};
use czix::{BuildOptions, Index};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_INTEGRITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "czindex",
    about = "Index a text and answer queries given only the compressed pattern",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index over a text file and persist it.
    Build {
        text_file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Comma-separated: lz77sr, lz77nsr, lz78. Default: all three.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
    },
    /// Compress a pattern file; the parse goes to stdout in LZPARSE v1.
    Compress {
        #[arg(long)]
        scheme: String,
        pattern_file: PathBuf,
    },
    /// Run a query from a parse file against a persisted index.
    Query {
        index_file: PathBuf,
        parse_file: PathBuf,
        /// Print only the matched length and occurrence count.
        #[arg(long, conflicts_with = "exists")]
        count: bool,
        /// Print only whether the whole pattern occurs.
        #[arg(long)]
        exists: bool,
        /// Truncate the reported position list.
        #[arg(long)]
        limit: Option<usize>,
        /// Append instrumentation counters.
        #[arg(long)]
        stats: bool,
    },
    /// Re-run the structural invariants of a persisted index.
    Selfcheck { index_file: PathBuf },
    /// Measure per-query counters with planted patterns; one row per index.
    Bench {
        #[arg(required = true)]
        index_files: Vec<PathBuf>,
        #[arg(long)]
        pattern_len: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("czindex: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(EXIT_IO, e.to_string())
    }
}

impl From<czix::Error> for Failure {
    fn from(e: czix::Error) -> Self {
        fail(EXIT_USAGE, e.to_string())
    }
}

impl From<index_file::LoadError> for Failure {
    fn from(e: index_file::LoadError) -> Self {
        match e {
            index_file::LoadError::Io(e) => fail(EXIT_IO, e.to_string()),
            index_file::LoadError::Format(m) => fail(EXIT_INTEGRITY, m),
            index_file::LoadError::Integrity(m) => fail(EXIT_INTEGRITY, m),
        }
    }
}

fn parse_schemes(names: Option<Vec<String>>) -> Result<Vec<Scheme>, Failure> {
    match names {
        None => Ok(BuildOptions::default().schemes),
        Some(names) => names
            .iter()
            .map(|n| {
                Scheme::from_tag(n).ok_or_else(|| {
                    fail(
                        EXIT_USAGE,
                        format!("unknown scheme '{n}' (expected lz77sr, lz77nsr or lz78)"),
                    )
                })
            })
            .collect(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Build {
            text_file,
            output,
            schemes,
        } => {
            let text = fs::read(&text_file)?;
            let schemes = parse_schemes(schemes)?;
            let index = Index::build(&text, BuildOptions { schemes });
            if let Err(e) = std::panic::catch_unwind(|| index.self_check()) {
                let msg = panic_message(e);
                return Err(fail(EXIT_INTEGRITY, format!("self-check failed: {msg}")));
            }
            index_file::save(&index, &output)?;
            println!(
                "indexed {} bytes: {} leaves, {} augmented nodes",
                text.len(),
                text.len() + 1,
                index.augmented_node_count()
            );
            Ok(())
        }
        Cmd::Compress {
            scheme,
            pattern_file,
        } => {
            let scheme = Scheme::from_tag(&scheme)
                .ok_or_else(|| fail(EXIT_USAGE, format!("unknown scheme '{scheme}'")))?;
            let pattern = fs::read(&pattern_file)?;
            let parse = compress(&pattern, scheme);
            let text = lz::write_parse_text(&parse)?;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Cmd::Query {
            index_file,
            parse_file,
            count,
            exists,
            limit,
            stats,
        } => {
            let index = index_file::load(&index_file)?;
            let content = fs::read_to_string(&parse_file)?;
            let parse = lz::read_parse_text(&content)?;
            if exists {
                let found = index.exists(&parse)?;
                println!("{}", if found { "true" } else { "false" });
            } else if count {
                let (len, occ) = index.count(&parse)?;
                println!("{len} {occ}");
            } else {
                let res = index.locate(&parse)?;
                println!(
                    "matched_len={} full_match={}",
                    res.matched_len,
                    u8::from(res.full_match)
                );
                let cap = limit.unwrap_or(usize::MAX);
                for &pos in res.positions.iter().take(cap) {
                    println!("{pos}");
                }
                if stats {
                    let s = res.stats;
                    println!(
                        "lcp_calls={} fp_probes={} child_map_probes={} level_probes={}",
                        s.lcp_calls, s.fingerprint_probes, s.child_map_probes, s.level_probes
                    );
                }
            }
            Ok(())
        }
        Cmd::Selfcheck { index_file } => {
            let index = index_file::load(&index_file)?;
            if let Err(e) = std::panic::catch_unwind(|| index.self_check()) {
                let msg = panic_message(e);
                return Err(fail(EXIT_INTEGRITY, format!("self-check failed: {msg}")));
            }
            println!("ok");
            Ok(())
        }
        Cmd::Bench {
            index_files,
            pattern_len,
            trials,
            seed,
        } => {
            if pattern_len == 0 || trials == 0 {
                return Err(fail(EXIT_USAGE, "--pattern-len and --trials must be positive"));
            }
            println!(
                "{:>10} {:>6} {:>8} {:>8} {:>10} {:>10} {:>12} {:>12}",
                "n", "m", "log2m", "z_mean", "lcp_mean", "fp_mean", "level_mean", "child_mean"
            );
            for path in &index_files {
                let index = index_file::load(path)?;
                let row = bench_one(&index, pattern_len, trials, seed)?;
                println!(
                    "{:>10} {:>6} {:>8.2} {:>8.2} {:>10.2} {:>10.2} {:>12.2} {:>12.2}",
                    index.text().len(),
                    pattern_len,
                    (pattern_len as f64).log2(),
                    row.z_mean,
                    row.lcp_mean,
                    row.fp_mean,
                    row.level_mean,
                    row.child_mean
                );
            }
            Ok(())
        }
    }
}

fn compress(pattern: &[u8], scheme: Scheme) -> LzParse {
    match scheme {
        Scheme::Lz77SelfRef => LzParse::Lz77(lz::lz77_parse(pattern, lz::SelfRefMode::SelfRef)),
        Scheme::Lz77NoSelfRef => {
            LzParse::Lz77(lz::lz77_parse(pattern, lz::SelfRefMode::NoSelfRef))
        }
        Scheme::Lz78 => LzParse::Lz78(lz::lz78_parse(pattern)),
    }
}

struct BenchRow {
    z_mean: f64,
    lcp_mean: f64,
    fp_mean: f64,
    level_mean: f64,
    child_mean: f64,
}

fn bench_one(
    index: &Index,
    pattern_len: usize,
    trials: usize,
    seed: u64,
) -> Result<BenchRow, Failure> {
    let text = index.text();
    if text.len() < pattern_len {
        return Err(fail(
            EXIT_USAGE,
            "pattern length exceeds the indexed text length",
        ));
    }
    let scheme = *index
        .options()
        .schemes
        .first()
        .ok_or_else(|| fail(EXIT_USAGE, "index was built without any scheme"))?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut sums = BenchRow {
        z_mean: 0.0,
        lcp_mean: 0.0,
        fp_mean: 0.0,
        level_mean: 0.0,
        child_mean: 0.0,
    };
    for _ in 0..trials {
        let start = rng.gen_range(0..=text.len() - pattern_len);
        let pattern = &text[start..start + pattern_len];
        let parse = compress(pattern, scheme);
        let res = index.locate(&parse)?;
        sums.z_mean += parse.phrase_count() as f64;
        sums.lcp_mean += res.stats.lcp_calls as f64;
        sums.fp_mean += res.stats.fingerprint_probes as f64;
        sums.level_mean += res.stats.level_probes as f64;
        sums.child_mean += res.stats.child_map_probes as f64;
    }
    let t = trials as f64;
    sums.z_mean /= t;
    sums.lcp_mean /= t;
    sums.fp_mean /= t;
    sums.level_mean /= t;
    sums.child_mean /= t;
    Ok(sums)
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| e.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}
