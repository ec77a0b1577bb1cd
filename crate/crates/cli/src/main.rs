//! `rectsurf`: command line access to the surface calculus.
//!
//! Surfaces, loops and sub-unions are read from JSON documents with exact
//! rational strings. Exit status is 0 on success, 1 when the operation itself
//! fails on well-formed input, and 2 when the input is malformed.

use std::fmt::Display;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use rectsurf::disks::{self, enumerate_subbasis};
use rectsurf::io::{self as docs, IoError, SurfaceDocument};
use rectsurf::lattice::{self, CoreResult};
use rectsurf::morphism::{convergence_certificate, find_immersion, CertificateReport};
use rectsurf::transform::{self, AxisAffine};
use rectsurf::{Point, RatSurface, RatSurfacePoint, Rational, Scalar, SurfacePoint};

#[derive(Parser)]
#[command(name = "rectsurf", version, about = "Exact calculus of pointed rectangular translation surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report every violated surface invariant.
    Validate { file: PathBuf },
    /// Developed coordinates of a point given as `R@x,y`.
    Dev { file: PathBuf, point: String },
    /// Euler characteristic.
    Chi { file: PathBuf },
    /// Disk, punctured disk, or neither.
    Classify { file: PathBuf },
    /// The immersion of the first surface into the second, if any.
    Immersion { source: PathBuf, target: PathBuf },
    /// Least upper bound of the inputs.
    Fuse {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Greatest lower bound of the inputs, or "empty".
    Core {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Embedding radius at a point.
    Er { file: PathBuf, point: String },
    /// Move the basepoint to a point and recentre.
    Rebase { file: PathBuf, point: String },
    /// Apply an axis-preserving linear map given as `a,b,c,d` (row major).
    Act {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// All disks bounded by a loop, up to isomorphism.
    Disks { loop_file: PathBuf },
    /// Smallest disk containing a sub-union (closed or open per the document).
    SmallestDisk { file: PathBuf, subunion: PathBuf },
    /// Rectangular unions the surface immerses onto, up to isomorphism.
    Images { file: PathBuf },
    /// Limit of a monotone chain with a convergence report.
    Limit(LimitArgs),
    /// Subbasis surfaces with few rectangles and small denominators.
    Enumerate {
        #[arg(long)]
        max_rects: usize,
        #[arg(long)]
        denom: i64,
    },
    /// Draw the developed image as SVG.
    Render { file: PathBuf, out: PathBuf },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, conflicts_with = "inverse", required_unless_present = "inverse")]
    direct: bool,
    #[arg(long)]
    inverse: bool,
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// `chain` (the disks among the inputs) or `subbasis:N,D`.
    #[arg(long, default_value = "chain")]
    probes: String,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Domain(String),
}

type Outcome = Result<(), Failure>;

fn malformed(e: impl Display) -> Failure {
    Failure::Malformed(e.to_string())
}

fn domain(e: impl Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(IoError) -> Failure + '_ {
    move |e| malformed(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<RatSurface, Failure> {
    docs::parse_surface(&read(path)?).map_err(in_file(path))
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<RatSurface>, Failure> {
    paths.iter().map(|p| load(p)).collect()
}

fn scalar(text: &str) -> Result<Rational, Failure> {
    docs::parse_scalar(text).map_err(malformed)
}

/// `R@x,y`: rectangle index and developed coordinates.
fn parse_point(text: &str) -> Result<RatSurfacePoint, Failure> {
    let bad = || malformed(format!("point {text:?} is not of the form R@x,y"));
    let (r, xy) = text.split_once('@').ok_or_else(bad)?;
    let (x, y) = xy.split_once(',').ok_or_else(bad)?;
    let rect = r.trim().parse().map_err(|_| bad())?;
    Ok(SurfacePoint::new(rect, Point::new(scalar(x)?, scalar(y)?)))
}

fn parse_matrix(text: &str) -> Result<AxisAffine<Rational>, Failure> {
    let entries = text.split(',').map(scalar).collect::<Result<Vec<_>, _>>()?;
    let [a, b, c, d]: [Rational; 4] =
        entries.try_into().map_err(|_| malformed(format!("matrix {text:?} needs four entries a,b,c,d")))?;
    AxisAffine::new(a, b, c, d).map_err(malformed)
}

fn compact(s: &RatSurface) -> String {
    serde_json::to_string(&SurfaceDocument::from_surface(s)).expect("documents always serialize")
}

fn fmt<T: Scalar>(x: &T) -> String {
    docs::format_scalar(x)
}

fn run(command: Command, out: &mut impl Write) -> Outcome {
    let mut say = |text: &str| writeln!(out, "{text}").map_err(|e| domain(format!("write failed: {e}")));
    match command {
        Command::Validate { file } => {
            let s = serde_json::from_str::<SurfaceDocument>(&read(&file)?)
                .map_err(IoError::from)
                .and_then(|d| d.to_raw_surface::<Rational>())
                .map_err(in_file(&file))?;
            let violations: Vec<String> = s.report().violations.iter().map(|v| v.to_string()).collect();
            let valid = violations.is_empty();
            say(&serde_json::to_string_pretty(&json!({ "valid": valid, "violations": violations })).unwrap())?;
            if !valid {
                return Err(domain(s.report()));
            }
        }
        Command::Dev { file, point } => {
            let s = load(&file)?;
            let p = s.dev(&parse_point(&point)?).map_err(domain)?;
            say(&format!("{},{}", fmt(&p.x), fmt(&p.y)))?;
        }
        Command::Chi { file } => say(&load(&file)?.euler_characteristic().to_string())?,
        Command::Classify { file } => say(&load(&file)?.classify().to_string())?,
        Command::Immersion { source, target } => {
            let (a, b) = (load(&source)?, load(&target)?);
            match find_immersion(&a, &b) {
                Ok(m) => {
                    for (from, to) in m.cell_map().iter().enumerate() {
                        if let Some(to) = to {
                            say(&format!("{from} -> {to}"))?;
                        }
                    }
                    say(&format!("embedding: {}", m.is_injective()))?;
                }
                Err(e) => {
                    say("result: none")?;
                    say(&format!("reason: {}", e.0))?;
                }
            }
        }
        Command::Fuse { files } => {
            let f = lattice::fuse(&load_all(&files)?).map_err(domain)?;
            say(docs::print_surface(&f.surface).trim_end())?;
        }
        Command::Core { files } => match lattice::core(&load_all(&files)?).map_err(domain)? {
            CoreResult::Surface(s) => say(docs::print_surface(&s).trim_end())?,
            CoreResult::Empty => say("empty")?,
        },
        Command::Er { file, point } => {
            let s = load(&file)?;
            say(&transform::embedding_radius(&s, &parse_point(&point)?).map_err(domain)?.to_string())?;
        }
        Command::Rebase { file, point } => {
            let s = load(&file)?;
            let (r, _) = transform::rebase(&s, &parse_point(&point)?).map_err(domain)?;
            say(docs::print_surface(&r).trim_end())?;
        }
        Command::Act { file, matrix } => {
            let s = load(&file)?;
            say(docs::print_surface(&transform::act(&parse_matrix(&matrix)?, &s)).trim_end())?;
        }
        Command::Disks { loop_file } => {
            let gamma = docs::parse_loop::<Rational>(&read(&loop_file)?).map_err(in_file(&loop_file))?;
            for d in disks::disks_bounded_by(&gamma) {
                say(&compact(&d))?;
            }
        }
        Command::SmallestDisk { file, subunion } => {
            let s = load(&file)?;
            let k = docs::parse_subunion::<Rational>(&read(&subunion)?).map_err(in_file(&subunion))?;
            let d = if k.open { disks::smallest_open_disk(&s, &k) } else { disks::smallest_closed_disk(&s, &k) };
            say(docs::print_surface(&d.map_err(domain)?).trim_end())?;
        }
        Command::Images { file } => {
            for s in disks::immersed_images(&load(&file)?).map_err(domain)? {
                say(&compact(&s))?;
            }
        }
        Command::Limit(args) => {
            let chain = load_all(&args.files)?;
            let probes = probe_pool(&args.probes)?;
            let (limit, report) = if args.direct {
                let (f, report) = lattice::direct_limit(&chain).map_err(domain)?;
                (Some(f.surface), report)
            } else {
                let (c, report) = lattice::inverse_limit(&chain).map_err(domain)?;
                match c {
                    CoreResult::Surface(s) => (Some(s), report),
                    CoreResult::Empty => (None, report),
                }
            };
            let report = match probes {
                Some(pool) => convergence_certificate(&chain, limit.as_ref(), &pool).map_err(domain)?,
                None => report,
            };
            let doc = limit.as_ref().map(|s| serde_json::to_value(SurfaceDocument::from_surface(s)).unwrap());
            let value = json!({ "limit": doc.unwrap_or(Value::Null), "certificate": certificate(&report) });
            say(&serde_json::to_string_pretty(&value).unwrap())?;
        }
        Command::Enumerate { max_rects, denom } => {
            if max_rects == 0 || denom < 1 {
                return Err(malformed("--max-rects and --denom must be positive"));
            }
            for s in enumerate_subbasis::<Rational>(max_rects, denom) {
                say(&compact(&s))?;
            }
        }
        Command::Render { file, out: path } => {
            let svg = docs::render_svg(&load(&file)?);
            fs::write(&path, svg).map_err(|e| domain(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

/// `None` for the chain's own disks, which the limit operations use already.
fn probe_pool(spec: &str) -> Result<Option<Vec<RatSurface>>, Failure> {
    if spec == "chain" {
        return Ok(None);
    }
    let bad = || malformed(format!("probe pool {spec:?} is neither `chain` nor `subbasis:N,D`"));
    let (n, d) = spec.strip_prefix("subbasis:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if n == 0 || d < 1 {
        return Err(bad());
    }
    Ok(Some(enumerate_subbasis(n, d)))
}

fn certificate(r: &CertificateReport) -> Value {
    let tail: Vec<Value> = r
        .tail
        .iter()
        .map(|t| json!({ "probe": t.probe, "applies": t.applies, "from_index": t.from_index, "passed": t.passed }))
        .collect();
    let limit: Vec<Value> = r
        .limit
        .iter()
        .map(|l| {
            json!({ "probe": l.probe, "applies": l.applies, "immerses_in_limit": l.immerses_in_limit, "passed": l.passed })
        })
        .collect();
    json!({ "passed": r.passed, "tail": tail, "limit": limit, "note": CertificateReport::CAVEAT })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("malformed input: {msg}");
            ExitCode::from(2)
        }
    }
}
