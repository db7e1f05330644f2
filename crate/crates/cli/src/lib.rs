//! Command-line front end. [`run`] takes the argument vector and writes to
//! the given streams, so tests can drive it in-process.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 3 on
//! truncation or blow-up budget exhaustion, 4 on bad input.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resolvkit::dc_class::{self, DerivationVerdict, GrowthSequence, SequenceVerdict};
use resolvkit::faa_di_bruno::{compose_coefficient, CoefficientTable};
use resolvkit::parse::{infer_vars, parse_with_vars};
use resolvkit::resolve::{run_mode, verify_resolution, Config, Mode, ResolutionTree, ResolveError};
use resolvkit::series::substitute;
use resolvkit::{Jet, Multiindex, PolyMap};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "resolvkit", version, about = "Exact resolution of singularities of hypersurface germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolve the hypersurface {f = 0}.
    Resolve(RunArgs),
    /// Make f a monomial times a unit.
    Monomialize(RunArgs),
    /// Make the product of the given factors normal crossings, each factor
    /// a monomial times a unit.
    Rectilinearize(RunArgs),
    /// One Taylor coefficient of f∘g, by Faà di Bruno and by substitution.
    Compose(ComposeArgs),
    /// Analyse a growth sequence m_k.
    Dc(DcArgs),
    /// Re-check a stored tree.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Dot,
    Text,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Polynomial expressions, e.g. "y^2 - x^3".
    #[arg(required = true)]
    inputs: Vec<String>,
    /// Comma-separated variable names in coordinate order.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long, env = "RESOLVKIT_TRUNCATION", default_value_t = 24)]
    truncation: u32,
    #[arg(long, default_value_t = 64)]
    max_blowups: usize,
    /// Comma-separated rational coordinates; repeat for several points.
    #[arg(long = "base-point")]
    base_points: Vec<String>,
    /// Resolve sibling charts concurrently.
    #[arg(long)]
    parallel: bool,
    /// Stop each path after this many blow-ups.
    #[arg(long)]
    stop_after: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "text")]
    emit: Vec<Emit>,
    /// Re-read the emitted JSON and check it reproduces the leaf checks.
    #[arg(long)]
    verify: bool,
    /// Directory for tree.json, tree.dot and tree.txt instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// Outer function f in p variables.
    f: String,
    /// Components g_1..g_p in n shared variables, each vanishing at 0.
    #[arg(required = true)]
    g: Vec<String>,
    /// The multi-index γ: a degree in one variable or a comma list.
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "text")]
    emit: Vec<Emit>,
}

#[derive(Args, Debug)]
struct DcArgs {
    /// constant, gevrey:<s> or custom:<m_0,m_1,...>
    family: String,
    /// Number of terms examined by the finite checks.
    #[arg(long, default_value_t = 16)]
    depth: u32,
    #[arg(long, value_delimiter = ',', default_value = "text")]
    emit: Vec<Emit>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Tree JSON file, or - for stdin.
    file: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "text")]
    emit: Vec<Emit>,
}

/// A failure with its exit code and message.
struct Failure(i32, String);

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_INPUT, msg.to_string())
    }
}

impl From<ResolveError> for Failure {
    fn from(e: ResolveError) -> Self {
        let code = match &e {
            _ if e.is_exhaustion() => EXIT_EXHAUSTED,
            ResolveError::Input(_) => EXIT_INPUT,
            _ => EXIT_CHECK_FAILED,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `argv` (including the program name).
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if help { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return if help { EXIT_OK } else { EXIT_INPUT };
        }
    };
    let outcome = match cli.command {
        Command::Resolve(a) => run_tree(Mode::Resolve, &a, out),
        Command::Monomialize(a) => run_tree(Mode::Monomialize, &a, out),
        Command::Rectilinearize(a) => run_tree(Mode::Rectilinearize, &a, out),
        Command::Compose(a) => compose(&a, out),
        Command::Dc(a) => dc(&a, out),
        Command::Verify(a) => verify(&a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn parse_point(text: &str) -> Result<Vec<num_rational::BigRational>, Failure> {
    text.split(',').map(|s| dc_class::parse_rational(s).map_err(Failure::input)).collect()
}

fn run_tree(mode: Mode, a: &RunArgs, out: &mut dyn Write) -> Outcome {
    if mode != Mode::Rectilinearize && a.inputs.len() != 1 {
        return Err(Failure::input("expected exactly one polynomial"));
    }
    let texts: Vec<&str> = a.inputs.iter().map(String::as_str).collect();
    let vars = match &a.vars {
        Some(v) => v.clone(),
        None => infer_vars(&texts).map_err(Failure::input)?,
    };
    let jets: Vec<Jet> =
        texts.iter().map(|t| parse_with_vars(t, &vars, a.truncation)).collect::<Result<_, _>>().map_err(Failure::input)?;
    let product = jets.iter().skip(1).fold(jets[0].clone(), |acc, j| &acc * j);
    let cfg = Config {
        truncation: a.truncation,
        max_blowups: a.max_blowups,
        base_points: a.base_points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?,
        parallel: a.parallel,
        stop_after: a.stop_after,
    };
    let factors: &[Jet] = if mode == Mode::Rectilinearize { &jets } else { &[] };
    let tree = run_mode(mode, &product, factors, Some(vars), &cfg)?;
    let json = tree.to_json();
    let mut pass = tree.all_leaves_pass();
    let mut note = None;
    if a.verify {
        let reread = ResolutionTree::from_json(&json)?;
        let report = verify_resolution(&reread)?;
        let same = report.matches_tree(&tree) && reread == tree;
        pass &= same && report.all_pass;
        note = Some(format!("verify: {} leaves re-checked from JSON, {}", report.leaves.len(), if same { "identical" } else { "MISMATCH" }));
    }
    emit_tree(&tree, &json, &a.emit, a.out.as_ref(), out)?;
    if let Some(n) = note {
        writeln!(out, "{n}")?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn emit_tree(tree: &ResolutionTree, json: &str, emit: &[Emit], dir: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    for e in emit {
        let (name, body) = match e {
            Emit::Json => ("tree.json", format!("{json}\n")),
            Emit::Dot => ("tree.dot", tree.to_dot()),
            Emit::Text => ("tree.txt", tree.to_text()),
        };
        match dir {
            Some(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(name), body)?;
            }
            None => out.write_all(body.as_bytes())?,
        }
    }
    Ok(())
}

fn compose(a: &ComposeArgs, out: &mut dyn Write) -> Outcome {
    let gtexts: Vec<&str> = a.g.iter().map(String::as_str).collect();
    let gvars = infer_vars(&gtexts).map_err(Failure::input)?;
    let gvars = if gvars.is_empty() { vec!["x".to_string()] } else { gvars };
    let n = gvars.len();
    if a.gamma.len() != n {
        return Err(Failure::input(format!("γ has {} entries but g has {n} variables", a.gamma.len())));
    }
    let gamma = Multiindex(a.gamma.clone());
    let t = gamma.degree().max(1);
    let p = a.g.len();
    let fvars = infer_vars(&[a.f.as_str()]).map_err(Failure::input)?;
    let fvars = if fvars.is_empty() { Jet::default_names(p, "z") } else { fvars };
    if fvars.len() != p {
        return Err(Failure::input(format!("f has {} variables but {p} components were given", fvars.len())));
    }
    let f = parse_with_vars(&a.f, &fvars, t).map_err(Failure::input)?;
    let g: Vec<Jet> = gtexts.iter().map(|s| parse_with_vars(s, &gvars, t)).collect::<Result<_, _>>().map_err(Failure::input)?;
    let g_tables: Vec<CoefficientTable> = g.iter().map(CoefficientTable::from_jet).collect();
    let coefficient = compose_coefficient(&CoefficientTable::from_jet(&f), &g_tables, &gamma).map_err(Failure::input)?;
    let map = PolyMap::new(g).map_err(Failure::input)?;
    let oracle = substitute(&f, &map).map_err(Failure::input)?.coeff(&gamma);
    let matched = coefficient == oracle;
    for e in &a.emit {
        match e {
            Emit::Json => writeln!(
                out,
                "{}",
                json!({ "gamma": gamma.0, "coefficient": coefficient.to_string(), "oracle": oracle.to_string(), "oracle_match": matched })
            )?,
            _ => writeln!(out, "coefficient: {coefficient}\noracle: {oracle}\noracle-match: {matched}")?,
        }
    }
    Ok(if matched { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dc(a: &DcArgs, out: &mut dyn Write) -> Outcome {
    let m: GrowthSequence = dc_class::parse_family(&a.family).map_err(Failure::input)?;
    let depth = match m.available() {
        Some(av) => a.depth.min(av.saturating_sub(1)),
        None => a.depth,
    };
    if depth < 2 {
        return Err(Failure::input("at least three terms are needed"));
    }
    let qa = dc_class::quasianalytic_test(&m).map_err(Failure::input)?;
    let lc = dc_class::is_log_convex(&m, depth).map_err(Failure::input)?;
    let consequences = if lc.holds { Some(dc_class::log_convexity_consequences(&m, depth).map_err(Failure::input)?) } else { None };
    let closure = dc_class::derivation_closure_test(&m).map_err(Failure::input)?;
    for e in &a.emit {
        if *e == Emit::Json {
            writeln!(
                out,
                "{}",
                json!({
                    "family": a.family,
                    "depth": depth,
                    "quasianalytic": qa,
                    "log_convex": lc,
                    "log_convexity_consequences": consequences,
                    "derivation_closure": closure,
                })
            )?;
            continue;
        }
        let qa_line = match &qa {
            SequenceVerdict::Quasianalytic => "quasianalytic".to_string(),
            SequenceVerdict::NotQuasianalytic => "NOT quasianalytic".to_string(),
            SequenceVerdict::InconclusiveAtDepth { depth, partial_sum } => {
                format!("quasianalyticity inconclusive (partial sum over {depth} terms: {partial_sum})")
            }
        };
        let lc_line = match lc.witness {
            None => format!("log-convex (checked to k = {depth})"),
            Some(k) => format!("NOT log-convex (fails at k = {k})"),
        };
        let dc_line = match &closure {
            DerivationVerdict::Closed(true) => "derivation-closed".to_string(),
            DerivationVerdict::Closed(false) => "NOT derivation-closed".to_string(),
            DerivationVerdict::Inconclusive { argmax, ratio } => {
                format!("derivation closure inconclusive (largest ratio {ratio} at k = {argmax})")
            }
        };
        writeln!(out, "m = {}\n{lc_line}\n{qa_line}\n{dc_line}", a.family)?;
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let text = if a.file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&a.file)?
    };
    let tree = ResolutionTree::from_json(&text).map_err(|e| Failure::input(format!("not a resolution tree: {e}")))?;
    let report = verify_resolution(&tree)?;
    let same = report.matches_tree(&tree);
    for e in &a.emit {
        match e {
            Emit::Json => writeln!(out, "{}", serde_json::to_string(&report).map_err(Failure::input)?)?,
            _ => {
                for l in &report.leaves {
                    let failed: Vec<&str> = l.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.as_str()).collect();
                    let status = if failed.is_empty() { "pass".to_string() } else { format!("FAIL {}", failed.join(", ")) };
                    writeln!(out, "leaf {}: {status}", l.leaf)?;
                }
                for s in &report.assumptions {
                    writeln!(out, "assumption: {s}")?;
                }
                writeln!(out, "stored checks {}", if same { "reproduced" } else { "DIFFER from the re-check" })?;
            }
        }
    }
    Ok(if report.all_pass && same { EXIT_OK } else { EXIT_CHECK_FAILED })
}
