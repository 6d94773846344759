//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 a volume bound is violated,
//! 3 a polyhedron could not be realized.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rapoly::bounds::{
    applicable_bounds, compact_bounds_atkinson, compact_upper_improved, ideal_bounds_atkinson, ideal_upper_improved,
};
use rapoly::combinatorics::exchange::{write_planar_code, write_text};
use rapoly::combinatorics::{canonical_code, Class, CombPolyhedron};
use rapoly::enumeration::{enumerate_candidates, EnumerationBudget};
use rapoly::gluing::{chain_glue, double_compact, double_ideal};
use rapoly::pipeline::{
    census_csv, check_polyhedron, figure_csv, figure_data, members_csv, read_polyhedra, realize_and_measure, run_census,
    Cache, CacheRecord, CensusOptions, PipelineError, SOLVER_VERSION,
};
use rapoly::volume::decomposition;

const EXIT_VIOLATION: u8 = 2;
const EXIT_REALIZATION: u8 = 3;

#[derive(Parser)]
#[command(name = "rapoly", version, about = "Right-angled hyperbolic polyhedra: census, realization, volumes and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate combinatorial candidates up to a vertex count.
    Enumerate {
        #[arg(long)]
        class: Class,
        #[arg(long = "max-v")]
        max_v: usize,
        /// Output file (text exchange format unless --binary); stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write planar code instead of text.
        #[arg(long)]
        binary: bool,
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
    },
    /// Realize every polyhedron in a file and print the records as JSON.
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Print the volume of every polyhedron in a file.
    Volume {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Write the signed decompositions as JSON to this file.
        #[arg(long = "dump-decomposition")]
        dump_decomposition: Option<PathBuf>,
    },
    /// Print volume bounds, either for a vertex count or for polyhedra in a file.
    Bounds {
        #[arg(long)]
        class: Option<Class>,
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Double a polyhedron along a face, or glue a chain of copies.
    Glue {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        face: usize,
        /// Second face for chain gluing (compact only).
        #[arg(long)]
        face2: Option<usize>,
        /// Chain steps; the chain has 2k + 1 copies.
        #[arg(long)]
        chain: Option<usize>,
        /// Where to write the glued map; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a census table as CSV.
    Census {
        #[arg(long)]
        class: Class,
        #[arg(long = "max-v")]
        max_v: usize,
        /// First row to compute (earlier rows are skipped).
        #[arg(long = "min-v")]
        min_v: Option<usize>,
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one CSV line per polyhedron.
        #[arg(long)]
        members: Option<PathBuf>,
        /// Also write the groups of polyhedra sharing a volume as JSON.
        #[arg(long)]
        matches: Option<PathBuf>,
    },
    /// Volumes and bound lines for plotting, as CSV.
    Figure {
        #[arg(long)]
        class: Class,
        #[arg(long = "max-v")]
        max_v: usize,
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full report for every polyhedron in a file, as JSON.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn open_cache(dir: Option<PathBuf>) -> Result<Option<Cache>> {
    dir.map(Cache::open).transpose().map_err(Into::into)
}

fn read(path: &Path) -> Result<Vec<CombPolyhedron>> {
    Ok(read_polyhedra(path)?)
}

fn canonical(p: &CombPolyhedron) -> CombPolyhedron {
    CombPolyhedron::with_class(p.skeleton().canonical_form(), p.klass()).expect("relabeling preserves the class")
}

/// Maps realization failures to their exit code; everything else is an error.
fn census_outcome(result: Result<rapoly::pipeline::Census, PipelineError>) -> Result<Result<rapoly::pipeline::Census, u8>> {
    match result {
        Ok(c) => Ok(Ok(c)),
        Err(e @ (PipelineError::Realization { .. } | PipelineError::Volume { .. })) => {
            eprintln!("error: {e}");
            Ok(Err(EXIT_REALIZATION))
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Enumerate { class, max_v, out, binary, parallelism } => {
            let budget = EnumerationBudget::new(class, max_v, parallelism)?;
            let maps: Vec<_> = enumerate_candidates(&budget)?.into_iter().map(|c| c.polyhedron.skeleton().clone()).collect();
            eprintln!("{} candidates", maps.len());
            if binary {
                let bytes = write_planar_code(&maps)?;
                match out {
                    Some(p) => fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?,
                    None => {
                        use std::io::Write;
                        std::io::stdout().write_all(&bytes)?;
                    }
                }
            } else {
                emit(out.as_deref(), &write_text(&maps))?;
            }
            Ok(0)
        }
        Command::Realize { input, cache } => {
            let cache = open_cache(cache)?;
            let mut records = Vec::new();
            for p in read(&input)? {
                let code = canonical_code(&p);
                match realize_and_measure(&canonical(&p), &code, cache.as_ref()) {
                    Ok((r, volume)) => records.push(CacheRecord {
                        canonical_code: code.to_hex(),
                        class: r.klass(),
                        normals: r.normals,
                        vertices: r.vertices,
                        residual: r.residual,
                        volume,
                        solver_version: SOLVER_VERSION,
                    }),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Ok(EXIT_REALIZATION);
                    }
                }
            }
            println!("{}", serde_json::to_string_pretty(&records)?);
            Ok(0)
        }
        Command::Volume { input, cache, dump_decomposition } => {
            let cache = open_cache(cache)?;
            let mut dumps = Vec::new();
            for p in read(&input)? {
                let code = canonical_code(&p);
                match realize_and_measure(&canonical(&p), &code, cache.as_ref()) {
                    Ok((r, volume)) => {
                        println!("{volume:.15}");
                        if dump_decomposition.is_some() {
                            dumps.push(decomposition(&r)?);
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Ok(EXIT_REALIZATION);
                    }
                }
            }
            if let Some(path) = dump_decomposition {
                fs::write(&path, serde_json::to_string_pretty(&dumps)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
        Command::Bounds { class, vertices, input } => {
            let value = match (input, class, vertices) {
                (Some(path), None, None) => {
                    let all: Result<Vec<_>, _> = read(&path)?.iter().map(applicable_bounds).collect();
                    serde_json::to_value(all?)?
                }
                (None, Some(class), Some(v)) => {
                    let (lo, hi) = match class {
                        Class::Ideal => ideal_bounds_atkinson(v)?,
                        Class::Compact => compact_bounds_atkinson(v)?,
                    };
                    let improved = match class {
                        Class::Ideal => ideal_upper_improved(v).ok(),
                        Class::Compact => compact_upper_improved(v).ok(),
                    };
                    serde_json::to_value([Some(lo), Some(hi), improved].into_iter().flatten().collect::<Vec<_>>())?
                }
                _ => bail!("give either --in FILE or both --class and --vertices"),
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(0)
        }
        Command::Glue { input, face, face2, chain, out } => {
            let ps = read(&input)?;
            let [p] = &ps[..] else { bail!("{} must hold exactly one polyhedron", input.display()) };
            let glued = match (face2, chain) {
                (Some(f2), Some(k)) => chain_glue(p, face, f2, k)?,
                (None, None) => match p.klass() {
                    Class::Ideal => double_ideal(p, face)?,
                    Class::Compact => double_compact(p, face)?,
                },
                _ => bail!("--face2 and --chain go together"),
            };
            let text = write_text(std::slice::from_ref(glued.polyhedron.skeleton()));
            match out {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    println!("{}", serde_json::to_string_pretty(&glued)?);
                }
                None => {
                    print!("{text}");
                    eprintln!("{}", serde_json::to_string_pretty(&glued)?);
                }
            }
            Ok(0)
        }
        Command::Census { class, max_v, min_v, parallelism, cache, out, members, matches } => {
            let mut opts = CensusOptions::new(class, max_v);
            if let Some(v) = min_v {
                opts.min_vertices = v;
            }
            opts.parallelism = parallelism;
            opts.cache = open_cache(cache)?;
            let census = match census_outcome(run_census(&opts))? {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            emit(out.as_deref(), &census_csv(&census))?;
            if let Some(path) = members {
                fs::write(&path, members_csv(&census)).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = matches {
                fs::write(&path, serde_json::to_string_pretty(&census.volume_matches)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let bad: Vec<_> = census.violations().collect();
            for m in &bad {
                eprintln!("bound violation: V={} {} volume {} fails {:?}", m.vertices, m.canonical_code, m.volume, m.violations);
            }
            Ok(if bad.is_empty() { 0 } else { EXIT_VIOLATION })
        }
        Command::Figure { class, max_v, parallelism, cache, out } => {
            let mut opts = CensusOptions::new(class, max_v);
            opts.parallelism = parallelism;
            opts.cache = open_cache(cache)?;
            let census = match census_outcome(run_census(&opts))? {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            emit(out.as_deref(), &figure_csv(&figure_data(&census)?))?;
            Ok(if census.violations().next().is_none() { 0 } else { EXIT_VIOLATION })
        }
        Command::Check { input, cache } => {
            let cache = open_cache(cache)?;
            let reports: Vec<_> =
                read(&input)?.iter().map(|p| check_polyhedron(p, cache.as_ref())).collect::<Result<_, _>>()?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(if reports.iter().any(|r| r.has_violation()) {
                EXIT_VIOLATION
            } else if reports.iter().any(|r| !r.realized && r.obstruction.is_none()) {
                EXIT_REALIZATION
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
