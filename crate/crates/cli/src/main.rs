//! `tile` — exact tiling arithmetic for cyclic groups on the command line.
//!
//! Each subcommand wraps one library entry point: cyclotomic polynomials,
//! divisor signatures, the tiling-condition checker, tiling verification,
//! the fill-out enumeration, the full classification pipeline, and the
//! perturbed-rectangle generator. Exit codes: 0 for a successful
//! computation, 2 when `--strict` is given and the answer is negative
//! (DoesNotTile, or not a tiling), 1 for usage or internal errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use tiling_core::classify::{self, ClassifyConfig, JsonReport, PartitionReport, PartitionStatus};
use tiling_core::cm::{self, CmReport, Verdict};
use tiling_core::cyclo;
use tiling_core::fillout::{self, FillOutConfig, MemoMode};
use tiling_core::lowerbound;
use tiling_core::zset::{self, ResidueSet};

#[derive(Parser)]
#[command(name = "tile", version, about = "Exact tiling arithmetic for cyclic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nth cyclotomic polynomial.
    Cyclo {
        n: u64,
    },
    /// Print the divisor signature of a set in Z_n: every divisor d of n
    /// (d ≥ 2) whose cyclotomic polynomial divides the set's mask.
    Sig {
        n: u64,
        /// Comma-separated ascending members, e.g. 0,1,2,3.
        set: String,
    },
    /// Decide whether a set tiles the integers — or Z_n with --mod — and
    /// report the spectrum and both tiling conditions as JSON.
    Cm {
        /// Comma-separated ascending members.
        set: String,
        /// Decide tiling of Z_n instead of Z.
        #[arg(long = "mod", value_name = "N")]
        modulus: Option<u64>,
        /// Exit 2 when the verdict is DoesNotTile.
        #[arg(long)]
        strict: bool,
    },
    /// Check whether two sets tile Z_n together.
    Verify {
        n: u64,
        set_a: String,
        set_b: String,
        /// Exit 2 when the pair is not a tiling.
        #[arg(long)]
        strict: bool,
    },
    /// Enumerate every complement of a set in Z_n (complements containing
    /// 0, one per line).
    Fillout {
        n: u64,
        set: String,
        /// Print only non-periodic complements, one canonical
        /// representative per translation orbit.
        #[arg(long)]
        nonperiodic: bool,
        /// Worker threads for the search (the output is identical).
        #[arg(long, env = "TILE_THREADS", default_value_t = 1)]
        threads: usize,
        /// Byte cap for the search memo.
        #[arg(long = "memo-cap", value_name = "BYTES")]
        memo_cap: Option<usize>,
    },
    /// Classify all non-periodic tilings of Z_n.
    Classify {
        n: u64,
        /// Worker threads, one partition per task.
        #[arg(long, env = "TILE_THREADS", default_value_t = 1)]
        threads: usize,
        /// Skip-list file: one `side | justification` line per partition
        /// resolved by an external argument (replaces the built-in list).
        #[arg(long = "skip-list", value_name = "FILE")]
        skip_list: Option<PathBuf>,
        /// Search skip-listed partitions anyway.
        #[arg(long)]
        force_exceptional: bool,
        /// Write the full report as JSON to this path.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Generate non-periodic tilings of Z_(30pq) by perturbing a rectangle
    /// tile; prints the tile line then the complement line per sample.
    Lowerbound {
        p: u64,
        q: u64,
        /// How many distinct perturbations to sample.
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Seed for the sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`tile fillout … | head`) instead of
    // panicking on the first failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version arrive as "errors" but are successes.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Cyclo { n } => {
            let phi = cyclo::cyclotomic(n).map_err(|e| e.to_string())?;
            println!("{phi}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sig { n, set } => {
            let set = parse_set(n, &set)?;
            let sig = cyclo::signature(&set).map_err(|e| e.to_string())?;
            println!("{}", join(sig.members()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Cm {
            set,
            modulus,
            strict,
        } => {
            let members = parse_members(&set)?;
            let report = match modulus {
                Some(n) => cm::decide_tiles_zn(&members, n),
                None => cm::decide_tiles_z(&members),
            }
            .map_err(|e| e.to_string())?;
            println!("{}", render_cm(&report));
            if strict && report.verdict == Verdict::DoesNotTile {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            n,
            set_a,
            set_b,
            strict,
        } => {
            let a = parse_set(n, &set_a)?;
            let b = parse_set(n, &set_b)?;
            let ok = zset::verify_tiling(&a, &b).map_err(|e| e.to_string())?;
            println!("{}", if ok { "TILING" } else { "NOT A TILING" });
            if strict && !ok {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fillout {
            n,
            set,
            nonperiodic,
            threads,
            memo_cap,
        } => {
            let a = parse_set(n, &set)?;
            let mut config = FillOutConfig::default();
            config.threads = threads.max(1);
            if let Some(cap) = memo_cap {
                config.memo = MemoMode::Exact { cap_bytes: cap };
            }
            let mut found = fillout::explore_with(&a, &config).map_err(|e| e.to_string())?;
            if nonperiodic {
                found = fillout::nonperiodic_orbits(&found).map_err(|e| e.to_string())?;
            }
            for b in &found {
                println!("{}", join(&b.members()));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            n,
            threads,
            skip_list,
            force_exceptional,
            out,
        } => {
            let mut config = ClassifyConfig::for_modulus(n);
            config.threads = threads.max(1);
            config.force_exceptional = force_exceptional;
            if let Some(path) = skip_list {
                let text = fs::read_to_string(&path)
                    .map_err(|e| format!("reading {}: {e}", path.display()))?;
                config.skip_list = classify::parse_skip_list(&text).map_err(|e| e.to_string())?;
            }
            let report = classify::classify(n, &config).map_err(|e| e.to_string())?;
            print!("{}", render_classification(&report));
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&JsonReport::from(&report))
                    .map_err(|e| e.to_string())?;
                fs::write(&path, json + "\n")
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lowerbound {
            p,
            q,
            samples,
            seed,
        } => {
            let tile = lowerbound::rectangle_tile(p, q).map_err(|e| e.to_string())?;
            let drawn =
                lowerbound::sample_complements(p, q, samples, seed).map_err(|e| e.to_string())?;
            for (_, complement) in &drawn {
                println!("{}", join(&tile.members()));
                println!("{}", join(&complement.members()));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Parse a `comma-separated ascending decimals` literal.
fn parse_members(text: &str) -> Result<Vec<u64>, String> {
    let mut members = Vec::new();
    for token in text.split(',') {
        let value: u64 = token
            .parse()
            .map_err(|_| format!("malformed set literal: {token:?} is not a decimal"))?;
        if let Some(&last) = members.last() {
            if value <= last {
                return Err(format!(
                    "malformed set literal: members must be strictly ascending, got {last} before {value}"
                ));
            }
        }
        members.push(value);
    }
    Ok(members)
}

fn parse_set(n: u64, text: &str) -> Result<ResidueSet, String> {
    ResidueSet::from_members(n, &parse_members(text)?).map_err(|e| e.to_string())
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn render_cm(report: &CmReport) -> String {
    serde_json::json!({
        "spectrum": report.spectrum.elements(),
        "t1": report.t1,
        "t2": report.t2,
        "pruned": report.pruned,
        "verdict": report.verdict.to_string(),
    })
    .to_string()
}

fn render_classification(report: &classify::ClassificationReport) -> String {
    let mut out = format!("Z_{}: {} partitions\n", report.n, report.partitions.len());
    for p in &report.partitions {
        out.push_str(&render_partition(p));
    }
    out.push_str(&format!(
        "total: {} non-periodic tiling pairs\n",
        report.total_pairs()
    ));
    out
}

fn render_partition(p: &PartitionReport) -> String {
    let heading = format!(
        "  {{{}}}|{{{}}}",
        join(p.partition.h().elements()),
        join(p.partition.hc().elements())
    );
    match p.status {
        PartitionStatus::DiscardedStep2 => format!("{heading}: discarded (forced periodic)\n"),
        PartitionStatus::NoSurvivingClasses => format!("{heading}: no non-periodic tilings\n"),
        PartitionStatus::SkippedExceptional => format!(
            "{heading}: skipped — {}\n",
            p.skip_justification.as_deref().unwrap_or("(no justification)")
        ),
        PartitionStatus::Classified => {
            let mut out = format!("{heading}: {} non-periodic pairs\n", p.nonperiodic_pairs);
            for (label, classes) in [("a", &p.a_classes), ("b", &p.b_classes)] {
                for (i, class) in classes.iter().enumerate() {
                    out.push_str(&format!(
                        "    {label}{i}: sig {{{}}}  {} orbits of cardinality {}  rep {}\n",
                        join(class.signature.members()),
                        class.orbit_count(),
                        class.cardinality,
                        join(&class.representative().members()),
                    ));
                }
            }
            let mut pairs = Vec::new();
            for (i, row) in p.coverage.iter().enumerate() {
                for (j, &covered) in row.iter().enumerate() {
                    if covered {
                        pairs.push(format!("a{i}×b{j}"));
                    }
                }
            }
            out.push_str(&format!("    tiling pairs: {}\n", pairs.join(" ")));
            out
        }
    }
}
