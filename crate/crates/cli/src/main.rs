//! Command-line front end: validate and solve problem files, refine
//! worst-case optimal decisions, eliminate recourse variables, enumerate
//! vertices, and run the facility-location comparison benchmark.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use paroforge_core::bench::{self, fixtures, ComparisonOptions, FacilityLocationConfig};
use paroforge_core::fme::FilterLevel;
use paroforge_core::pareto::{Algorithm1Options, ImprovementOptions};
use paroforge_core::*;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "paroforge", version, about = "Two-stage adaptive robust optimization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Problem file (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numeric tolerance for reported feasibility margins
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem file and report violations
    Validate(CommonOpts),
    /// Worst-case optimal solve over the uncertainty-set vertices
    SolveAro(CommonOpts),
    /// Refine a worst-case optimal Stage-1 decision
    Refine {
        #[command(flatten)]
        common: CommonOpts,
        /// alg1 | d0 | pro-ldr | dr-paro
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Warm-start scenario samples for the improvement heuristic
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Write the iteration trace as JSON
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check whether a rule is scenario-wise optimal for a fixed decision
    CheckExtension {
        #[command(flatten)]
        common: CommonOpts,
        /// Stage-1 decision, comma-separated
        #[arg(long)]
        x: String,
        /// Static Stage-2 decision, comma-separated
        #[arg(long)]
        static_y: Option<String>,
        /// Linear rule file: {"w": [...], "w_mat": [[...]]}
        #[arg(long)]
        rule_file: Option<PathBuf>,
    },
    /// Eliminate Stage-2 variables and dump the ledger and residual system
    Fme {
        #[command(flatten)]
        common: CommonOpts,
        /// How many Stage-2 variables to eliminate; all when omitted
        #[arg(long)]
        count: Option<usize>,
        /// none | syntactic | lp
        #[arg(long, default_value = "syntactic")]
        filter: String,
    },
    /// Enumerate the vertices of the uncertainty set
    Vertices(CommonOpts),
    /// Emit the bundled two-stage dosing toy problem
    Rt {
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate facility-location instances and run the comparison benchmark
    BenchFl {
        /// Candidate facility count
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Demand location count
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Total-demand cap
        #[arg(long, default_value_t = 45.0)]
        gamma: f64,
        /// Capacity per facility
        #[arg(long, default_value_t = 15.0)]
        cap: f64,
        #[arg(long, default_value_t = 30)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenario samples for the average metric
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Suppress the timestamp header and wall-clock columns
        #[arg(long, default_value_t = false)]
        deterministic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_problem(path: &Path) -> Result<TwoStageProblem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(out, &text)
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}`"))
        })
        .collect()
}

#[derive(Serialize)]
struct SolveOutput {
    opt: f64,
    x: Vec<f64>,
    vertex_count: usize,
    per_vertex_y: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct RefineOutput {
    method: String,
    x: Vec<f64>,
    worst_case: f64,
    certified: bool,
    iterations: usize,
}

#[derive(Serialize)]
struct ExtensionOutput {
    bound: f64,
    is_extension: bool,
    certified: bool,
    z_star: Scenario,
    y_star: Vec<f64>,
}

#[derive(Serialize)]
struct FmeOutput<'a> {
    eliminated_order: &'a [usize],
    rows_before: usize,
    rows_after: usize,
    ledger: &'a [paroforge_core::fme::VariableLedger],
    static_system: &'a paroforge_core::fme::AffineSystem,
    rows: &'a [paroforge_core::fme::WorkRow],
}

#[derive(Serialize)]
struct VerticesOutput {
    count: usize,
    vertices: Vec<Scenario>,
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(common) => {
            let text = fs::read_to_string(&common.input)
                .with_context(|| format!("cannot read {}", common.input.display()))?;
            // parse without the automatic validation so defects are reported,
            // not bailed on
            let p = parse_problem_unchecked(&text)?;
            let report = validate(&p)?;
            emit(&common.out, &report)?;
            if !report.ok() {
                bail!("validation failed: {report}");
            }
        }
        Command::SolveAro(common) => {
            let p = read_problem(&common.input)?;
            let sol = solve_aro_vertices(&p)?;
            emit(
                &common.out,
                &SolveOutput {
                    opt: sol.opt,
                    x: sol.x,
                    vertex_count: sol.vertices.len(),
                    per_vertex_y: sol.per_vertex_y,
                },
            )?;
        }
        Command::Refine {
            common,
            method,
            seed,
            max_iters,
            samples,
            trace,
        } => {
            let p = read_problem(&common.input)?;
            let output = match method.as_str() {
                "alg1" => {
                    let opts = Algorithm1Options {
                        tol: common.tol,
                        max_outer: max_iters,
                        improvement: ImprovementOptions {
                            seed,
                            sample_count: samples,
                            tol: common.tol,
                            max_iters,
                            ..Default::default()
                        },
                        ..Default::default()
                    };
                    let result = algorithm1(&p, &opts)?;
                    if let Some(path) = &trace {
                        let text = serde_json::to_string_pretty(&result.trace)?;
                        fs::write(path, text)
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    let wc = worst_case(&p, &result.x, &DecisionRule::OptimalRecourse)?;
                    RefineOutput {
                        method,
                        x: result.x,
                        worst_case: wc.value,
                        certified: result.certified,
                        iterations: result.trace.len(),
                    }
                }
                "d0" => {
                    let aro = solve_aro_vertices(&p)?;
                    let nominal = match &p.uncertainty.nominal {
                        Some(z) => z.clone(),
                        None => interior_point(&p.uncertainty)?.point,
                    };
                    let x = refine_d0(&p, aro.opt, &nominal)?;
                    let wc = worst_case(&p, &x, &DecisionRule::OptimalRecourse)
                        .map(|w| w.value)
                        .unwrap_or(aro.opt);
                    RefineOutput {
                        method,
                        x,
                        worst_case: wc,
                        certified: true,
                        iterations: 1,
                    }
                }
                "pro-ldr" => {
                    let nominal = match &p.uncertainty.nominal {
                        Some(z) => z.clone(),
                        None => interior_point(&p.uncertainty)?.point,
                    };
                    let sol = pro_ldr(&p, &nominal)?;
                    RefineOutput {
                        method,
                        x: sol.x,
                        worst_case: sol.worst_case,
                        certified: true,
                        iterations: 2,
                    }
                }
                "dr-paro" => {
                    let sol = dr_paro(&p)?;
                    RefineOutput {
                        method: format!("dr-paro ({:?})", sol.branch),
                        x: sol.x,
                        worst_case: sol.worst_case,
                        certified: true,
                        iterations: 2,
                    }
                }
                other => bail!("unknown refine method `{other}` (alg1|d0|pro-ldr|dr-paro)"),
            };
            emit(&common.out, &output)?;
        }
        Command::CheckExtension {
            common,
            x,
            static_y,
            rule_file,
        } => {
            let p = read_problem(&common.input)?;
            let x = parse_vector(&x)?;
            let rule = match (static_y, rule_file) {
                (Some(y), None) => DecisionRule::Static(parse_vector(&y)?),
                (None, Some(path)) => {
                    #[derive(serde::Deserialize)]
                    struct RuleFile {
                        w: Vec<f64>,
                        w_mat: Matrix,
                    }
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    let rule: RuleFile = serde_json::from_str(&text)?;
                    DecisionRule::Linear(LinearRule {
                        w: rule.w,
                        w_mat: rule.w_mat,
                    })
                }
                _ => bail!("provide exactly one of --static-y or --rule-file"),
            };
            let check = check_extension(&p, &x, &rule)?;
            emit(
                &common.out,
                &ExtensionOutput {
                    bound: check.bound,
                    is_extension: check.bound <= common.tol,
                    certified: check.certified,
                    z_star: check.z_star,
                    y_star: check.y_star,
                },
            )?;
        }
        Command::Fme {
            common,
            count,
            filter,
        } => {
            let p = read_problem(&common.input)?;
            let count = count.unwrap_or(p.n_y);
            let level: FilterLevel = filter
                .parse()
                .map_err(|e: String| anyhow::anyhow!(e))?;
            let result = eliminate(&p, count, None)?;
            let result = filter_redundant(&p, &result, level, None)?;
            emit(
                &common.out,
                &FmeOutput {
                    eliminated_order: &result.eliminated_order,
                    rows_before: result.rows_before,
                    rows_after: result.rows_after,
                    ledger: &result.ledger,
                    static_system: &result.static_system,
                    rows: &result.rows,
                },
            )?;
        }
        Command::Vertices(common) => {
            let p = read_problem(&common.input)?;
            let vs = enumerate_vertices(&p.uncertainty)?;
            emit(
                &common.out,
                &VerticesOutput {
                    count: vs.len(),
                    vertices: vs.vertices,
                },
            )?;
        }
        Command::Rt { delta, out } => {
            if delta <= 0.0 {
                bail!("--delta must be positive");
            }
            let p = fixtures::rt_example(delta);
            write_text(&out, &serialize_problem(&p))?;
        }
        Command::BenchFl {
            n,
            m,
            gamma,
            cap,
            instances,
            seed,
            samples,
            deterministic,
            out,
        } => {
            let config = FacilityLocationConfig {
                n,
                m,
                s: cap,
                gamma,
                seed,
                ..FacilityLocationConfig::desk(seed)
            };
            let options = ComparisonOptions {
                sample_count: samples,
                seed,
                deterministic,
                ..Default::default()
            };
            let report = bench::run_benchmark(&config, instances, seed, &options);
            write_text(&out, report.to_csv_string().trim_end())?;
            let failed = report.rows.iter().filter(|r| !r.ok()).count();
            if failed > 0 {
                eprintln!("{failed}/{instances} instances failed; see status column");
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
