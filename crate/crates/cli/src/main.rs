//! `grope`: command-line front end for the grope engine.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grope::capped::{CapId, CappedGrope};
use grope::generate::{self, KernelParams};
use grope::grope::{Grope, StagePath};
use grope::json::{self, Document, JsonError};
use grope::moves::{self, MoveError};
use grope::pipeline::{self, SurgeryError, SurgeryOptions};
use grope::splitting::{self, Limits, SplitError};
use grope::trace::Rewrite;
use grope::{lcs_depth, parse_expr, GroupWord};

const EX_VIOLATION: u8 = 1;
const EX_PIGEONHOLE: u8 = 2;
const EX_GROWTH: u8 = 3;
const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_IOERR: u8 = 74;

#[derive(Parser)]
#[command(name = "grope", version, about = "Symbolic calculus of capped gropes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grope, capped grope, or kernel document for structural errors.
    Validate { path: PathBuf },
    /// Print the class of a grope (one line per grope for a kernel).
    Class { path: PathBuf },
    /// List tips in traversal order.
    Tips {
        path: PathBuf,
        /// Print only the number of tips.
        #[arg(long)]
        count: bool,
    },
    /// Print the boundary word under the injective tip assignment.
    Boundary { path: PathBuf },
    /// Lower-central-series depth of a word or commutator expression.
    Lcs {
        expr: String,
        #[arg(long, default_value_t = 8)]
        cutoff: usize,
    },
    /// Split a capped grope: fully by default, or a single cap or stage.
    Split {
        path: PathBuf,
        #[arg(long, conflicts_with = "stage")]
        cap: Option<String>,
        /// Stage path as JSON, e.g. '[[0,"alpha"]]'.
        #[arg(long)]
        stage: Option<String>,
        #[arg(long)]
        max_genus: Option<usize>,
        /// Write the rewrite log to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Contract a base piece along two caps, then push off.
    Contract {
        path: PathBuf,
        #[arg(long)]
        piece: usize,
        /// The two caps, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        caps: Vec<String>,
        #[arg(long)]
        no_pushoff: bool,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the surgery pipeline on a kernel.
    Pipeline {
        path: PathBuf,
        /// Run even when the class hypothesis fails.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        max_genus: Option<usize>,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print only the statistics object; the full result goes to --output.
        #[arg(long)]
        stats: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random kernel from a seed.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        class: u32,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Caps meet only caps; the body stays disjoint.
        #[arg(long)]
        strict: bool,
        /// Class-m pieces whose caps all carry distinct elements.
        #[arg(long, conflicts_with = "strict")]
        adversarial: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a grope or capped grope as a DOT digraph.
    Render {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn display(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", display(path))))?;
    Ok(text)
}

fn malformed(path: &Path, e: JsonError) -> Failure {
    Failure::new(
        EX_DATAERR,
        format!("{}:{}:{}: {}", display(path), e.line, e.column, e.message),
    )
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = read_input(path)?;
    Document::parse(&text).map_err(|e| malformed(path, e))
}

fn load_capped(path: &Path) -> Result<CappedGrope, Failure> {
    load(path)?.into_capped().ok_or_else(|| {
        Failure::new(
            EX_DATAERR,
            format!("{}: expected a grope, found a kernel", display(path)),
        )
    })
}

fn load_grope(path: &Path) -> Result<Grope, Failure> {
    let doc = load(path)?;
    doc.grope().cloned().ok_or_else(|| {
        Failure::new(
            EX_DATAERR,
            format!("{}: expected a grope, found a kernel", display(path)),
        )
    })
}

fn emit(output: Option<&PathBuf>, text: &str) -> Outcome {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(EX_IOERR, format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::new(EX_IOERR, format!("stdout: {e}")))
        }
    }
}

fn write_trace<T: serde::Serialize>(path: Option<&PathBuf>, steps: &T) -> Outcome {
    match path {
        Some(p) => emit(Some(p), &json::to_canonical(steps)),
        None => Ok(()),
    }
}

/// One line per rewrite, each label computation indented below it.
fn write_log(path: Option<&PathBuf>, steps: &[Rewrite]) -> Outcome {
    let Some(p) = path else { return Ok(()) };
    let mut text = String::new();
    for r in steps {
        text.push_str(&format!("{r}\n"));
        for l in &r.labels {
            text.push_str(&format!("  {l}\n"));
        }
    }
    emit(Some(p), &text)
}

fn limits(max_genus: Option<usize>) -> Result<Limits, Failure> {
    let mut l = Limits::default();
    if let Some(g) = max_genus {
        l.max_genus = g;
    } else if let Ok(v) = std::env::var("GROPE_MAX_GENUS") {
        l.max_genus = v
            .trim()
            .parse()
            .map_err(|_| Failure::new(EX_USAGE, format!("GROPE_MAX_GENUS: not a number: {v}")))?;
    }
    Ok(l)
}

fn split_failure(e: SplitError) -> Failure {
    let code = match e {
        SplitError::GenusLimit { .. } | SplitError::IntersectionLimit { .. } => EX_GROWTH,
        SplitError::UnknownCap(_) | SplitError::UnknownStage(_) | SplitError::FirstStage => EX_USAGE,
        SplitError::ClassChanged { .. } => EX_VIOLATION,
    };
    Failure::new(code, e.to_string())
}

fn move_failure(e: MoveError) -> Failure {
    let code = match e {
        MoveError::LabelsDiffer { .. } => EX_PIGEONHOLE,
        MoveError::UnknownPiece(_) | MoveError::UnknownSphere(_) | MoveError::CapNotInPiece { .. } => EX_USAGE,
        MoveError::SameCap(_) => EX_USAGE,
        MoveError::NotDyadic(_) | MoveError::SplitFirst(_) => EX_VIOLATION,
    };
    Failure::new(code, e.to_string())
}

fn validate(path: &Path) -> Outcome {
    let problems: Vec<String> = match load(path)? {
        Document::Grope(g) => g.validate().iter().map(ToString::to_string).collect(),
        Document::Capped(c) => c.validate().iter().map(ToString::to_string).collect(),
        Document::Kernel(k) => k.validate().iter().map(ToString::to_string).collect(),
    };
    if problems.is_empty() {
        return emit(None, "ok\n");
    }
    for p in &problems {
        eprintln!("{}: {p}", display(path));
    }
    Err(Failure::new(EX_VIOLATION, format!("{} violation(s)", problems.len())))
}

fn class(path: &Path) -> Outcome {
    let classes: Vec<u32> = match load(path)? {
        Document::Kernel(k) => k.gropes.iter().map(|g| g.body.root.class()).collect(),
        doc => vec![doc.grope().map_or(0, |g| g.root.class())],
    };
    let mut out = String::new();
    for c in classes {
        out.push_str(&format!("{c}\n"));
    }
    emit(None, &out)
}

fn tips(path: &Path, count: bool) -> Outcome {
    let g = load_grope(path)?;
    let tips = g.tips();
    if count {
        return emit(None, &format!("{}\n", tips.len()));
    }
    let mut out = String::new();
    for t in tips {
        out.push_str(&format!("{t}\n"));
    }
    emit(None, &out)
}

fn boundary(path: &Path) -> Outcome {
    let g = load_grope(path)?;
    let w = g
        .boundary_word(&g.injective_assignment())
        .map_err(|e| Failure::new(EX_VIOLATION, e.to_string()))?;
    emit(None, &format!("{w}\n"))
}

fn lcs(expr: &str, cutoff: usize) -> Outcome {
    let w = if expr.trim() == "1" {
        GroupWord::identity()
    } else {
        parse_expr(expr)
            .map_err(|e| Failure::new(EX_DATAERR, format!("expression {e}")))?
            .eval()
    };
    let d = lcs_depth(&w, cutoff).map_err(|e| Failure::new(EX_USAGE, e.to_string()))?;
    emit(None, &format!("{d}\n"))
}

fn split(
    path: &Path,
    cap: Option<String>,
    stage: Option<String>,
    max_genus: Option<usize>,
    trace: Option<PathBuf>,
    output: Option<PathBuf>,
) -> Outcome {
    let cg = load_capped(path)?;
    let (out, steps): (CappedGrope, Vec<Rewrite>) = match (cap, stage) {
        (Some(c), _) => {
            let (out, r) = splitting::split_cap_logged(&cg, &CapId(c)).map_err(split_failure)?;
            (out, r.into_iter().collect())
        }
        (None, Some(s)) => {
            let p: StagePath = json::from_str(&s)
                .map_err(|e| Failure::new(EX_DATAERR, format!("--stage column {}: {}", e.column, e.message)))?;
            let (out, r) = splitting::split_stage_logged(&cg, &p).map_err(split_failure)?;
            (out, r.into_iter().collect())
        }
        (None, None) => splitting::full_split(&cg, &limits(max_genus)?).map_err(split_failure)?,
    };
    write_log(trace.as_ref(), &steps)?;
    emit(output.as_ref(), &json::to_canonical(&out))
}

fn contract(
    path: &Path,
    piece: usize,
    caps: &[String],
    no_pushoff: bool,
    trace: Option<PathBuf>,
    output: Option<PathBuf>,
) -> Outcome {
    let [a, b] = caps else {
        return Err(Failure::new(
            EX_USAGE,
            "--caps takes exactly two caps, e.g. --caps c1,c2",
        ));
    };
    let cg = load_capped(path)?;
    let (a, b) = (CapId(a.clone()), CapId(b.clone()));
    let (mut out, mut sphere, r) = moves::contract_logged(&cg, piece, &a, &b).map_err(move_failure)?;
    let mut steps = vec![r];
    if !no_pushoff {
        let (pushed, r) = moves::pushoff_logged(&out, &sphere.id).map_err(move_failure)?;
        steps.push(r);
        out = pushed;
        sphere = out.sphere(&sphere.id).cloned().unwrap_or(sphere);
    }
    write_log(trace.as_ref(), &steps)?;
    let doc = serde_json::json!({ "grope": out, "sphere": sphere });
    emit(output.as_ref(), &json::to_canonical(&doc))
}

fn run_pipeline(
    path: &Path,
    force: bool,
    max_genus: Option<usize>,
    trace: Option<PathBuf>,
    stats: bool,
    output: Option<PathBuf>,
) -> Outcome {
    let Document::Kernel(k) = load(path)? else {
        return Err(Failure::new(
            EX_DATAERR,
            format!("{}: expected a kernel document", display(path)),
        ));
    };
    let opts = SurgeryOptions {
        force,
        limits: limits(max_genus)?,
    };
    let res = pipeline::run_surgery(&k, &opts).map_err(|e| {
        let code = match &e {
            SurgeryError::PigeonholeFailure { .. } => EX_PIGEONHOLE,
            SurgeryError::Split { source, .. } => split_failure(source.clone()).code,
            SurgeryError::Move { source, .. } => move_failure(source.clone()).code,
            SurgeryError::Invalid(_) | SurgeryError::HypothesesNotMet(_) => EX_VIOLATION,
        };
        Failure::new(code, e.to_string())
    })?;
    write_trace(trace.as_ref(), &res.trace)?;
    if stats {
        if output.is_some() {
            emit(output.as_ref(), &json::to_canonical(&res))?;
        }
        emit(None, &json::to_canonical(&res.stats))
    } else {
        emit(output.as_ref(), &json::to_canonical(&res))
    }
}

fn render(path: &Path, output: Option<PathBuf>) -> Outcome {
    let cg = load_capped(path)?;
    emit(output.as_ref(), &grope::dot::render_dot(&cg))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { path } => validate(&path),
        Command::Class { path } => class(&path),
        Command::Tips { path, count } => tips(&path, count),
        Command::Boundary { path } => boundary(&path),
        Command::Lcs { expr, cutoff } => lcs(&expr, cutoff),
        Command::Split {
            path,
            cap,
            stage,
            max_genus,
            trace,
            output,
        } => split(&path, cap, stage, max_genus, trace, output),
        Command::Contract {
            path,
            piece,
            caps,
            no_pushoff,
            trace,
            output,
        } => contract(&path, piece, &caps, no_pushoff, trace, output),
        Command::Pipeline {
            path,
            force,
            max_genus,
            trace,
            stats,
            output,
        } => run_pipeline(&path, force, max_genus, trace, stats, output),
        Command::Generate {
            seed,
            m,
            class,
            pairs,
            density,
            strict,
            adversarial,
            output,
        } => {
            let k = if adversarial {
                generate::generate_adversarial(seed, m, pairs)
            } else {
                let p = KernelParams {
                    m,
                    class,
                    pair_count: pairs,
                    intersection_density: density,
                    strict,
                };
                generate::generate_kernel(seed, &p)
            }
            .map_err(|e| Failure::new(EX_VIOLATION, e.to_string()))?;
            emit(output.as_ref(), &json::to_canonical(&k))
        }
        Command::Render { path, output } => render(&path, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EX_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
