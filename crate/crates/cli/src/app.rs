use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use wrapkit::characterize::{b_from_params, classify, params_from_strip_data, Decision, RootSign, WrapParams};
use wrapkit::construct::{construct_wrapping, WrappingSpec};
use wrapkit::field::format_rational;
use wrapkit::geometry::{BBox, Point2};
use wrapkit::quotient::Lattice;
use wrapkit::tiling::{expand_orbit, strip_decomposition, TilingPatch};
use wrapkit::verify::{fold_wrapping, monte_carlo_check, verify_wrapping};

use crate::document::WrappingDocument;
use crate::expr::{parse_b, parse_rational};
use crate::svg::{write_svg, Shape, SvgOptions, DEFAULT_PRECISION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{what}: {message}")]
    Input { what: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Document(#[from] crate::document::DocumentError),
    #[error(transparent)]
    Svg(#[from] crate::svg::SvgError),
    #[error("{0}")]
    Analysis(String),
}

fn input_err(what: &str, e: impl ToString) -> CliError {
    CliError::Input { what: what.to_string(), message: e.to_string() }
}

#[derive(Parser, Debug)]
#[command(name = "wrapkit", version, about = "Exact wrappings of a 1 × b envelope by equal squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for RootSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => RootSign::Plus,
            SignArg::Minus => RootSign::Minus,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a 1 × b envelope can be wrapped, e.g. `--b "2+sqrt(3)"`.
    Decide {
        #[arg(long)]
        b: String,
    },
    /// Build a wrapping from (p, r, sign) and write it as a document.
    Construct {
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "0")]
        r: String,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        /// Output file; the document goes to stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a wrapping document exactly; exit status 0 iff it is a wrapping.
    Verify {
        file: PathBuf,
        /// Also run the floating-point Monte Carlo cross-check with this many samples.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Draw the plane tiling generated by a wrapping over a window `<w>x<h>`.
    Tile {
        file: PathBuf,
        /// Window size, e.g. `4x2` or `4+2*sqrt(3)x2`; defaults to one translation cell.
        #[arg(long)]
        window: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Split the generated tiling into strips and recover (p, r, sign).
    Strips {
        file: PathBuf,
        #[arg(long)]
        window: Option<String>,
    },
    /// Draw the squares of a wrapping, or their pieces folded into the fundamental domain.
    Render {
        file: PathBuf,
        #[arg(long)]
        folded: bool,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
}

/// Runs the command line `argv` (including the program name) and returns the exit status.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn put(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    out.write_fmt(text).and_then(|_| out.write_all(b"\n")).map_err(io_err(Path::new("<stdout>")))
}

macro_rules! say {
    ($out:expr, $($t:tt)*) => { put($out, format_args!($($t)*))? };
}

fn load(path: &Path) -> Result<WrappingSpec, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(WrappingDocument::from_json(&text)?.to_spec()?)
}

fn parse_window(text: Option<&str>, lattice: &Lattice) -> Result<BBox, CliError> {
    let Some(text) = text else {
        return Ok(lattice.cell_box());
    };
    let (w, h) = text.split_once('x').ok_or_else(|| input_err("--window", "expected <w>x<h>"))?;
    let w = parse_b(w).map_err(|e| input_err("--window width", e))?;
    let h = parse_b(h).map_err(|e| input_err("--window height", e))?;
    if w.is_negative() || h.is_negative() {
        return Err(input_err("--window", "sizes must be nonnegative"));
    }
    Ok(BBox::new(Point2::origin(), Point2::new(w, h)))
}

fn patch_for(spec: &WrappingSpec, window: Option<&str>) -> Result<TilingPatch, CliError> {
    let lattice = Lattice::new(spec.b.clone()).map_err(|e| CliError::Analysis(e.to_string()))?;
    let window = parse_window(window, &lattice)?;
    expand_orbit(spec, &window).map_err(|e| CliError::Analysis(e.to_string()))
}

fn print_params(out: &mut dyn Write, w: &WrapParams) -> Result<(), CliError> {
    say!(out, "p = {}", format_rational(&w.p));
    say!(out, "r = {}", format_rational(&w.r));
    say!(out, "sign = {}", w.sign);
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Decide { b } => {
            let b = parse_b(&b).map_err(|e| input_err("--b", e))?;
            let decision = classify(&b).map_err(|e| input_err("--b", e))?;
            say!(out, "b = {b}");
            match decision {
                Decision::Wrappable(w) => {
                    say!(out, "wrappable");
                    print_params(out, &w)?;
                    Ok(EXIT_OK)
                }
                Decision::NegativeNorm(n) => {
                    say!(out, "not wrappable (norm = {} < 0)", show_rational(&n));
                    Ok(EXIT_NEGATIVE)
                }
                Decision::NormNotSquare(n) => {
                    say!(out, "not wrappable (norm = {} is not the square of a rational)", show_rational(&n));
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Construct { p, r, sign, output } => {
            let p = parse_rational(&p).map_err(|e| input_err("--p", e))?;
            let r = parse_rational(&r).map_err(|e| input_err("--r", e))?;
            let w = WrapParams::new(p, r, sign.into()).map_err(|e| input_err("parameters", e))?;
            let spec = construct_wrapping(&w).map_err(|e| input_err("parameters", e))?;
            let json = WrappingDocument::from_spec(&spec)?.to_json();
            match output {
                Some(path) => {
                    fs::write(&path, json + "\n").map_err(io_err(&path))?;
                    say!(out, "b = {}", spec.b);
                    say!(out, "squares = {}", spec.squares.len());
                    say!(out, "side^2 = {}", spec.side_sq);
                    say!(out, "wrote {}", path.display());
                }
                None => say!(out, "{json}"),
            }
            Ok(EXIT_OK)
        }
        Command::Verify { file, samples, seed } => {
            let spec = load(&file)?;
            let rep = verify_wrapping(&spec);
            say!(out, "b = {}", spec.b);
            say!(out, "squares = {}", spec.squares.len());
            say!(out, "squares equal = {}", rep.squares_equal);
            say!(out, "pieces = {}", rep.piece_count);
            say!(out, "folded area = {}", rep.folded_area);
            say!(out, "target area = {}", rep.target_area);
            match &rep.overlap_found {
                Some(o) => say!(out, "overlap = squares {} and {}, area {}", o.sources.0, o.sources.1, o.area),
                None => say!(out, "overlap = none"),
            }
            if let Some(note) = &rep.note {
                say!(out, "note = {note}");
            }
            if let Some(n) = samples {
                match monte_carlo_check(&spec, n, seed) {
                    Ok(mc) => {
                        say!(out, "monte carlo (float, {} samples, seed {seed}): coverage = {:.6}", mc.samples, mc.coverage_fraction);
                        say!(out, "monte carlo (float): mean multiplicity = {:.6}, sigma = {:.6}", mc.mean_multiplicity, mc.sigma());
                        say!(out, "monte carlo (float): max multiplicity = {}", mc.max_multiplicity);
                    }
                    Err(e) => say!(out, "monte carlo skipped: {e}"),
                }
            }
            say!(out, "{}", if rep.is_valid { "valid" } else { "invalid" });
            Ok(if rep.is_valid { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Tile { file, window, output, precision } => {
            let spec = load(&file)?;
            let patch = patch_for(&spec, window.as_deref())?;
            let shapes: Vec<Shape> = patch
                .window_squares()
                .into_iter()
                .map(|i| Shape { points: patch.squares[i].vertices().to_vec(), source: i })
                .collect();
            let opts = SvgOptions { precision, lattice: Some(spec.b.clone()), outline: Some(patch.window.clone()) };
            write_svg(&output, &shapes, &opts)?;
            say!(out, "squares meeting window = {}", shapes.len());
            say!(out, "wrote {}", output.display());
            Ok(EXIT_OK)
        }
        Command::Strips { file, window } => {
            let spec = load(&file)?;
            let patch = patch_for(&spec, window.as_deref())?;
            let rep = strip_decomposition(&patch).map_err(|e| CliError::Analysis(e.to_string()))?;
            say!(out, "b = {}", spec.b);
            say!(out, "case = {:?}", rep.case_tag);
            say!(out, "direction = ({}, {})", rep.direction.x, rep.direction.y);
            say!(out, "strips in patch = {}", rep.strips.len());
            say!(out, "q1 = {}", rep.q1);
            say!(out, "q2 = {}", rep.q2);
            say!(out, "g = {}", rep.g);
            let w = params_from_strip_data(rep.q1, rep.q2, rep.g, &spec.b).map_err(|e| CliError::Analysis(e.to_string()))?;
            say!(out, "recovered:");
            print_params(out, &w)?;
            let b = b_from_params(&w).map_err(|e| CliError::Analysis(e.to_string()))?;
            say!(out, "reproduces b = {}", b == spec.b);
            Ok(EXIT_OK)
        }
        Command::Render { file, folded, output, precision } => {
            let spec = load(&file)?;
            let lattice = Lattice::new(spec.b.clone()).map_err(|e| CliError::Analysis(e.to_string()))?;
            let shapes: Vec<Shape> = if folded {
                fold_wrapping(&spec)
                    .map_err(|e| CliError::Analysis(e.to_string()))?
                    .into_iter()
                    .map(|p| Shape { points: p.polygon.vertices().to_vec(), source: p.source })
                    .collect()
            } else {
                spec.squares
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Shape { points: s.vertices().to_vec(), source: i })
                    .collect()
            };
            let outline = if folded { lattice.fundamental_box() } else { lattice.cell_box() };
            let opts = SvgOptions { precision, lattice: Some(spec.b.clone()), outline: Some(outline) };
            write_svg(&output, &shapes, &opts)?;
            say!(out, "shapes = {}", shapes.len());
            say!(out, "wrote {}", output.display());
            Ok(EXIT_OK)
        }
    }
}

/// Integers print without a denominator in human-facing messages.
fn show_rational(q: &wrapkit::field::Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format_rational(q)
    }
}
