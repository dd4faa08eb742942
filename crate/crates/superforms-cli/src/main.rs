//! Command-line front end: expression evaluation, verification suites,
//! truncated homology runs and the super-elliptic-curve reproduction.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use superforms::coord::Dims;
use superforms::coord_change;
use superforms::grammar::{self, Evaluator};
use superforms::poincare::{self, TruncationWindow};
use superforms::specseq;
use superforms::verify::{self, RunConfig};

#[derive(Parser)]
#[command(name = "superforms", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DimArgs {
    /// Number of even coordinates
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Number of odd coordinates
    #[arg(long, default_value_t = 1)]
    q: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report each check
    Verify {
        /// Suite name (or `all`)
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        dims: DimArgs,
        /// Degree cap for random and exhaustive elements
        #[arg(long, default_value_t = 2)]
        maxdeg: u32,
        /// Coefficient z-degree cap for windowed identities
        #[arg(long, default_value_t = 2)]
        maxz: u32,
        /// Number of randomized trials per check family
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Number of random coordinate maps for the invariance suite
        #[arg(long, default_value_t = 5)]
        maps: usize,
        /// Seed for the randomized suites
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the exhaustive windows instead of random sampling
        #[arg(long)]
        exhaustive: bool,
        /// Write the JSON report here
        #[arg(long)]
        json: Option<PathBuf>,
        /// Use a fixed coordinate map (assignment lines) for the invariance
        /// suite instead of random ones
        #[arg(long)]
        map_file: Option<PathBuf>,
    },
    /// Parse an expression, apply the requested operator, print the
    /// canonical form
    Eval {
        /// Expression in the shared grammar, e.g. `D( dz1 @ Dth1 )`
        expr: String,
        /// Even dimension override (inferred from the expression otherwise)
        #[arg(long)]
        p: Option<usize>,
        /// Odd dimension override
        #[arg(long)]
        q: Option<usize>,
    },
    /// Truncated cohomology tables by exact linear algebra
    Homology {
        /// `integral`, `deRham` or `both`
        #[arg(long, default_value = "both")]
        side: String,
        #[command(flatten)]
        dims: DimArgs,
        /// Coefficient z-degree window
        #[arg(long, default_value_t = 3)]
        maxz: u32,
        /// Form-degree cap for the de Rham side
        #[arg(long, default_value_t = 4)]
        maxform: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Poincaré-lemma run: homotopy identity on the window plus the
    /// truncated homology table
    Poincare {
        /// `integral` or `deRham`
        #[arg(long, default_value = "integral")]
        side: String,
        #[command(flatten)]
        dims: DimArgs,
        /// Coefficient z-degree window
        #[arg(long, default_value_t = 3)]
        maxz: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Super-elliptic-curve fixture: page-one data and the page-two table
    Specseq {
        /// Number of truncation columns
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Page to print (1 or 2)
        #[arg(long, default_value_t = 2)]
        page: i64,
        /// Fixture row (0 or 1); both rows feed the table summary
        #[arg(long, default_value_t = 0)]
        qrow: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Verify {
            suite,
            dims,
            maxdeg,
            maxz,
            trials,
            maps,
            seed,
            exhaustive,
            json,
            map_file,
        } => {
            if let Some(path) = &map_file {
                let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                let map = coord_change::parse_map(Dims::new(dims.p, dims.q), &text)?;
                println!(
                    "loaded coordinate map with {} targets; inverse found: {}",
                    map.targets.len(),
                    map.invert().is_ok()
                );
            }
            let cfg = RunConfig {
                suite,
                p: dims.p,
                q: dims.q,
                max_deg: maxdeg,
                max_z: maxz,
                trials,
                maps,
                seed,
                exhaustive,
            };
            let report = verify::run_verify(&cfg)?;
            for check in &report.checks {
                let status = if check.pass { "pass" } else { "FAIL" };
                println!("{status}  {}", check.name);
                if !check.pass {
                    println!("      input:    {}", check.input);
                    println!("      expected: {}", check.expected);
                    println!("      actual:   {}", check.actual);
                }
            }
            let pass = report.passed();
            println!(
                "{}: {} checks, {} failed ({} ms, seed {})",
                report.suite,
                report.checks.len(),
                report.checks.iter().filter(|c| !c.pass).count(),
                report.elapsed_ms,
                report.seed
            );
            if let Some(path) = json {
                let text =
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
                std::fs::write(&path, text).map_err(|e| e.to_string())?;
            }
            Ok(pass)
        }
        Command::Eval { expr, p, q } => {
            let inferred = grammar::infer_dims(&expr);
            let dims = Dims::new(p.unwrap_or(inferred.p), q.unwrap_or(inferred.q));
            let rendered = Evaluator::new(dims)
                .eval_to_string(&expr)
                .map_err(|e| e.to_string())?;
            println!("{rendered}");
            Ok(true)
        }
        Command::Homology {
            side,
            dims,
            maxz,
            maxform,
            json,
        } => {
            let window = TruncationWindow {
                dims: Dims::new(dims.p, dims.q),
                max_z: maxz,
            };
            let mut tables = Vec::new();
            if side == "integral" || side == "both" {
                tables.push(poincare::integral_cohomology(&window));
            }
            if side == "deRham" || side == "both" {
                tables.push(poincare::de_rham_cohomology(&window, maxform));
            }
            if tables.is_empty() {
                return Err(format!("unknown side `{side}`"));
            }
            for table in &tables {
                println!("{} cohomology (p={}, q={}, maxz={}):", table.side, table.p, table.q, table.max_z);
                for e in &table.entries {
                    println!("  degree {:>3}: {}|{}", e.degree, e.even, e.odd);
                }
            }
            if let Some(path) = json {
                let text =
                    serde_json::to_string_pretty(&tables).map_err(|e| e.to_string())?;
                std::fs::write(&path, text).map_err(|e| e.to_string())?;
            }
            Ok(true)
        }
        Command::Poincare {
            side,
            dims,
            maxz,
            json,
        } => {
            let d = Dims::new(dims.p, dims.q);
            let window = TruncationWindow { dims: d, max_z: maxz };
            match side.as_str() {
                "integral" => {
                    let (count, failures) = verify::poincare_window(d, maxz);
                    println!(
                        "integral homotopy identity on {count} monomials: {} failures",
                        failures.len()
                    );
                    let table = poincare::integral_cohomology(&window);
                    let generated = poincare::integral_h0_generated_by_s0(&window);
                    for e in &table.entries {
                        println!("  H^{:<3} = {}|{}", e.degree, e.even, e.odd);
                    }
                    println!("H^0 generated by s0: {generated}");
                    let ok = failures.is_empty()
                        && generated
                        && table.entries.iter().all(|e| {
                            (e.degree == 0) == ((e.even, e.odd) == (1, 0))
                                && (e.degree == 0 || (e.even, e.odd) == (0, 0))
                        });
                    if let Some(path) = json {
                        let text = serde_json::to_string_pretty(&table)
                            .map_err(|e| e.to_string())?;
                        std::fs::write(&path, text).map_err(|e| e.to_string())?;
                    }
                    Ok(ok)
                }
                "deRham" => {
                    let table = poincare::de_rham_cohomology(&window, maxz + 1);
                    for e in &table.entries {
                        println!("  H^{:<3} = {}|{}", e.degree, e.even, e.odd);
                    }
                    let ok = table.entries.iter().all(|e| {
                        (e.degree == 0) == ((e.even, e.odd) == (1, 0))
                            && (e.degree == 0 || (e.even, e.odd) == (0, 0))
                    });
                    if let Some(path) = json {
                        let text = serde_json::to_string_pretty(&table)
                            .map_err(|e| e.to_string())?;
                        std::fs::write(&path, text).map_err(|e| e.to_string())?;
                    }
                    Ok(ok)
                }
                other => Err(format!("unknown side `{other}`")),
            }
        }
        Command::Specseq { k, page, qrow, json } => {
            if k < 4 {
                return Err("need --k >= 4".into());
            }
            let dc = specseq::build_super_elliptic(k, qrow);
            let ss = specseq::SpectralSequence::new(&dc).map_err(|e| e.to_string())?;
            let pg = ss.page(page).map_err(|e| e.to_string())?;
            let table = specseq::e2_table(k).map_err(|e| e.to_string())?;
            println!("page {} of row q={qrow}:", pg.r);
            for ((p, q), vs) in &pg.entries {
                let labels: Vec<String> = vs
                    .even_labels
                    .iter()
                    .chain(vs.odd_labels.iter())
                    .filter(|l| !l.is_empty())
                    .cloned()
                    .collect();
                println!(
                    "  E_{}^({p},{q}) = {}|{}  {}",
                    pg.r,
                    vs.even,
                    vs.odd,
                    labels.join(", ")
                );
            }
            println!("assembled E_2 table (both rows):");
            for ((p, q), vs) in &table {
                if !vs.is_zero() {
                    let labels: Vec<String> = vs
                        .even_labels
                        .iter()
                        .chain(vs.odd_labels.iter())
                        .cloned()
                        .collect();
                    println!("  ({p},{q}): {}|{}  {}", vs.even, vs.odd, labels.join(", "));
                }
            }
            println!("d2 vanishes by dimension count: {}", specseq::se_d2_vanishes(&table));
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&pg.to_json())
                    .map_err(|e| e.to_string())?;
                std::fs::write(&path, text).map_err(|e| e.to_string())?;
            }
            Ok(specseq::se_d2_vanishes(&table))
        }
    }
}
