//! `yagzhev`: analyses of polynomial maps and their operator algebras.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use yagzhev::inverse::gabber_bound;
use yagzhev::{
    blowup_cubic, check_adxx_nilpotence, check_capelli, check_engel, check_simplicity,
    check_yagzhev, corpus, decide_invertibility, embed_prime, embed_simple, generic_realization,
    map_to_algebra, parse_exprs, parse_oalg, parse_pmap, reduce_degree_traced, write_oalg,
    write_pmap, Error, Field, OperatorAlgebra, PolyMap,
};

use report::{digest, envelope, map, poly, scalars};

/// Used when neither `--max-degree` nor `YAGZHEV_MAX_DEGREE` is given.
const DEFAULT_MAX_DEGREE: u32 = 64;

#[derive(Parser)]
#[command(
    name = "yagzhev",
    version,
    about = "Polynomial automorphisms and their operator algebras"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for the identity checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide invertibility and print the inverse when there is one.
    Invert {
        map: PathBuf,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Jacobian matrix and determinant.
    Jacobian { map: PathBuf },
    /// Write the operator algebra of a normalized map.
    Polarize {
        map: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Realize term expressions over an algebra as a polynomial map.
    Realize {
        algebra: PathBuf,
        exprs: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Identity checks on a map or algebra.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        input: PathBuf,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Reduce to degree three on more variables.
    ReduceCubic {
        map: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Cubic homogeneous blow-up of a map of degree at most three.
    Blowup {
        map: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Embed into a prime or a simple algebra.
    Embed {
        #[arg(value_enum)]
        kind: EmbedKind,
        map: PathBuf,
        /// Comma separated degrees for the simple embedding.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<u32>>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Look for proper ideals.
    Simplicity {
        algebra: PathBuf,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a named map, e.g. `nagata` or `charp(5)`.
    Corpus {
        name: String,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Engel,
    Yagzhev,
    Capelli,
    Adxx,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedKind {
    Prime,
    Simple,
}

/// Failures that end the run with exit code 2.
#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(String, String, Field, Value), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn text(bytes: &[u8], path: &Path) -> Result<String, Failure> {
    String::from_utf8(bytes.to_vec()).map_err(|_| Failure(format!("{}: not UTF-8", path.display())))
}

fn load_map(path: &Path) -> Result<(String, PolyMap), Failure> {
    let bytes = read(path)?;
    let f = parse_pmap(&text(&bytes, path)?)?;
    Ok((digest(&bytes), f))
}

fn load_algebra(path: &Path) -> Result<(String, OperatorAlgebra), Failure> {
    let bytes = read(path)?;
    let a = parse_oalg(&text(&bytes, path)?)?;
    Ok((digest(&bytes), a))
}

fn write_out(path: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, contents).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn max_degree_default() -> Result<u32, Failure> {
    match std::env::var("YAGZHEV_MAX_DEGREE") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure(format!("YAGZHEV_MAX_DEGREE=`{v}` is not a degree"))),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

/// The algebra of a `.oalg` file, or of the normalization of a `.pmap`.
/// Also returns `(n, m)`: variables and degree.
fn load_check_input(path: &Path) -> Result<(String, OperatorAlgebra, usize, u32), Failure> {
    if path.extension().is_some_and(|e| e == "oalg") {
        let (d, a) = load_algebra(path)?;
        let (n, m) = (a.dim(), a.max_arity() as u32);
        return Ok((d, a, n, m.max(1)));
    }
    let (d, f) = load_map(path)?;
    let f = if f.is_normalized() {
        f
    } else {
        f.normalize()?.0
    };
    let m = f.degree().unwrap_or(1).max(1);
    Ok((d, map_to_algebra(&f)?, f.nvars(), m))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Invert {
            map: path,
            max_degree,
        } => {
            let (d, f) = load_map(path)?;
            let cap = match max_degree {
                Some(m) => *m,
                None => max_degree_default()?,
            };
            let r = decide_invertibility(&f, Some(cap))?;
            let result = json!({
                "certificate": r.certificate.map(|c| c.as_str()),
                "degree_reached": r.degree_reached,
                "first_excess_degree": r.first_excess_degree,
                "gabber_bound": r.gabber_bound,
                "inverse": r.inverse.as_ref().map(map),
                "max_degree": cap,
                "q0": r.q0,
                "verdict": r.verdict.as_str(),
                "witness_degree": r.witness_degree,
            });
            Ok(("invert".into(), d, f.ctx().field(), result))
        }
        Command::Jacobian { map: path } => {
            let (d, f) = load_map(path)?;
            let j = f.jacobian();
            let det = j.det();
            let rows: Vec<Vec<Value>> = j
                .rows()
                .iter()
                .map(|r| r.iter().map(poly).collect())
                .collect();
            let result = json!({
                "det": poly(&det),
                "det_is_constant": det.degree() == Some(0),
                "matrix": rows,
            });
            Ok(("jacobian".into(), d, f.ctx().field(), result))
        }
        Command::Polarize { map: path, output } => {
            let (d, f) = load_map(path)?;
            let a = map_to_algebra(&f)?;
            write_out(&Some(output.clone()), &write_oalg(&a))?;
            let ops: Vec<Value> = a
                .ops()
                .iter()
                .map(|o| json!({"arity": o.arity(), "coefficients": o.num_coefficients(), "name": o.name()}))
                .collect();
            Ok((
                "polarize".into(),
                d,
                a.field(),
                json!({"dim": a.dim(), "ops": ops}),
            ))
        }
        Command::Realize {
            algebra,
            exprs,
            output,
        } => {
            let a_bytes = read(algebra)?;
            let e_bytes = read(exprs)?;
            let a = parse_oalg(&text(&a_bytes, algebra)?)?;
            let (vars, es) = parse_exprs(&text(&e_bytes, exprs)?, &a)?;
            let g = generic_realization(&a, &es)?;
            write_out(output, &write_pmap(&g))?;
            let mut both = a_bytes;
            both.extend_from_slice(&e_bytes);
            Ok((
                "realize".into(),
                digest(&both),
                a.field(),
                json!({"expr_vars": vars, "map": map(&g)}),
            ))
        }
        Command::Check {
            kind,
            input,
            bound,
            order,
        } => check(*kind, input, *bound, *order),
        Command::ReduceCubic { map: path, output } => {
            let (d, f) = load_map(path)?;
            let r = reduce_degree_traced(&f)?;
            write_out(output, &write_pmap(&r.map))?;
            let result =
                json!({"degree": r.map.degree(), "map": map(&r.map), "rounds": r.rounds.len()});
            Ok(("reduce-cubic".into(), d, f.ctx().field(), result))
        }
        Command::Blowup { map: path, output } => {
            let (d, f) = load_map(path)?;
            let b = blowup_cubic(&f)?;
            write_out(output, &write_pmap(&b))?;
            let result = json!({"cubic_homogeneous": b.is_cubic_homogeneous(), "map": map(&b)});
            Ok(("blowup".into(), d, f.ctx().field(), result))
        }
        Command::Embed {
            kind,
            map: path,
            schedule,
            output,
        } => {
            let (d, f) = load_map(path)?;
            let (name, out, schedule) = match kind {
                EmbedKind::Prime => ("embed prime", embed_prime(&f)?, None),
                EmbedKind::Simple => {
                    let schedule = schedule.clone().unwrap_or_else(|| default_schedule(&f));
                    ("embed simple", embed_simple(&f, &schedule)?, Some(schedule))
                }
            };
            write_out(output, &write_pmap(&out))?;
            let mut result = json!({"map": map(&out)});
            if let Some(s) = schedule {
                result["schedule"] = json!(s);
            }
            Ok((name.into(), d, f.ctx().field(), result))
        }
        Command::Simplicity {
            algebra,
            trials,
            seed,
        } => {
            let (d, a) = load_algebra(algebra)?;
            let v = check_simplicity(&a, *trials, *seed)?;
            let result = json!({
                "criterion_matched": v.criterion_matched,
                "seed": seed,
                "trials": v.trials,
                "verdict": v.verdict.as_str(),
                "witness_ideal_dim": v.witness_ideal_dim,
                "witness_ideal_generator": v.witness_ideal_generator.as_deref().map(scalars),
            });
            Ok(("simplicity".into(), d, a.field(), result))
        }
        Command::Corpus { name, output } => {
            let f = corpus(name)?;
            write_out(output, &write_pmap(&f))?;
            Ok((
                "corpus".into(),
                digest(name.as_bytes()),
                f.ctx().field(),
                json!({"map": map(&f), "name": name}),
            ))
        }
    }
}

/// Odd degrees `2 deg F + 3, 2 deg F + 5, …`, one per elementary map.
fn default_schedule(f: &PolyMap) -> Vec<u32> {
    let n = f.nvars() as u32;
    let base = 2 * f.degree().unwrap_or(1) + 3;
    (0..n * n + 2 * n).map(|j| base + 2 * j).collect()
}

fn check(kind: CheckKind, input: &Path, bound: Option<u32>, order: Option<u32>) -> Outcome {
    let (d, a, n, m) = load_check_input(input)?;
    let field = a.field();
    let result = match kind {
        CheckKind::Engel => {
            let bound = bound.unwrap_or((n as u32 - 1) * (m - 1) + 1);
            let r = check_engel(&a, bound)?;
            json!({
                "bound": r.bound_used,
                "det_jacobian": poly(&r.det_jacobian),
                "engel_type_s": r.engel_type_s,
                "is_engel": r.is_engel,
            })
        }
        CheckKind::Yagzhev => {
            // weights in (B, B + m] must vanish for an automorphism
            let b = gabber_bound(m, n);
            let cap = max_degree_default()? as u64;
            let wanted = b.saturating_add(m as u64);
            let bound = bound.map(u64::from).unwrap_or(wanted.min(cap));
            let q0 = order.map(u64::from).unwrap_or((b + 1).min(bound));
            let r = check_yagzhev(&a, q0 as u32, bound as u32)?;
            json!({
                "bound": r.bound,
                "failing_degree": r.failing_degree,
                "gabber_bound": b,
                "is_yagzhev": r.is_yagzhev,
                "order_q0": r.order_q0,
                "q0": q0,
                "window_capped": bound < wanted,
            })
        }
        CheckKind::Capelli => {
            let k = order.map(|k| k as usize).unwrap_or(a.dim() + 1);
            let degree_bound = bound.unwrap_or(5) as usize;
            let r = check_capelli(&a, k, degree_bound)?;
            let op_names: Vec<&str> = a.ops().iter().map(|o| o.name()).collect();
            let leaves: Vec<String> = (1..=degree_bound).map(|i| format!("x{i}")).collect();
            let leaves: Vec<&str> = leaves.iter().map(String::as_str).collect();
            let witness = r.counterexample.as_ref().map(|w| {
                json!({
                    "basis": w.basis.iter().map(|b| b + 1).collect::<Vec<_>>(),
                    "term": w.term.render(&op_names, &leaves),
                    "value": scalars(&w.value),
                })
            });
            json!({
                "counterexample": witness,
                "degree_bound": r.degree_bound,
                "holds": r.holds,
                "order": r.order,
            })
        }
        CheckKind::Adxx => {
            let k = order.unwrap_or(n as u32);
            json!({"nilpotent": check_adxx_nilpotence(&a, k)?, "order": k})
        }
    };
    let name = match kind {
        CheckKind::Engel => "check engel",
        CheckKind::Yagzhev => "check yagzhev",
        CheckKind::Capelli => "check capelli",
        CheckKind::Adxx => "check adxx",
    };
    Ok((name.into(), d, field, result))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((command, d, field, result)) => {
            let env = envelope(&command, &d, field, result);
            let out = match cli.format {
                Format::Json => report::render_json(&env),
                Format::Text => report::render_text(&env),
            };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
