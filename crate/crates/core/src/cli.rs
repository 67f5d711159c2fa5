//! Command-line front end. `main.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dag::build_dag;
use crate::error::Error;
use crate::expr::Polynomial;
use crate::horner::{apply_scheme, Direction, HornerScheme};
use crate::report::{run_strategy, CountReport, Format, SimplifyReport, Strategy, StrategyParams};
use crate::resolvent::{gen_res, ResolventSpec};
use crate::search::SearchResult;
use crate::sweep::{good_region, grid_medians, read_csv, run_sweep, write_csv, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hornopt", version, about = "Horner scheme search and CSE for multivariate polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a variable order and report operation counts.
    Simplify(SimplifyArgs),
    /// Run many MCTS searches over a geometric C_p grid and write CSV.
    Sweep(SweepArgs),
    /// Generate the resultant of two generic univariate polynomials.
    GenRes(GenResArgs),
    /// Count operations of the expanded polynomial.
    Count(CountArgs),
    /// Simplify and print straight-line code.
    Emit(EmitArgs),
    /// Find the widest good C_p interval in a sweep CSV.
    Region(RegionArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StrategyArg {
    Occurrence,
    Exhaustive,
    MctsUct,
    MctsSaUct,
    Nmcs,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Occurrence => Strategy::Occurrence,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::MctsUct => Strategy::MctsUct,
            StrategyArg::MctsSaUct => Strategy::MctsSaUct,
            StrategyArg::Nmcs => Strategy::Nmcs,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DirectionArg {
    Forward,
    Backward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepDirectionArg {
    Forward,
    Backward,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Polynomial file, or `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "occurrence")]
    strategy: StrategyArg,
    /// Evaluate this comma-separated variable order instead of searching.
    #[arg(long, conflicts_with = "strategy")]
    scheme: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    cp: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    /// Independent searches with derived seeds; the best result is kept.
    #[arg(long, default_value_t = 1)]
    repetitions: u32,
    #[arg(long, value_enum, default_value = "forward")]
    direction: DirectionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// NMCS nesting level.
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimplifyArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct EmitArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Name assigned the final value.
    #[arg(long, default_value = "result")]
    target: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "mcts-uct")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0.01)]
    cp_min: f64,
    #[arg(long, default_value_t = 10.0)]
    cp_max: f64,
    /// Number of geometric grid points.
    #[arg(long, default_value_t = 25)]
    points: usize,
    /// Independent dots per grid point and direction.
    #[arg(long, default_value_t = 1)]
    dots: u32,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: u32,
    #[arg(long, value_enum, default_value = "forward")]
    direction: SweepDirectionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Fill `wall_seconds` with measured times (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenResArgs {
    m: u32,
    n: u32,
    /// Output file; defaults to `res_<m>_<n>.txt`, `-` writes to standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct CountArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Sweep CSV produced by `hornopt sweep`.
    input: PathBuf,
    /// Relative slack of a grid point's median over the reference optimum.
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
    /// Reference optimum; defaults to the best ops_total in the file.
    #[arg(long)]
    reference: Option<u64>,
}

fn read_input(path: &Path) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Error> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text)?,
        _ => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn search(a: &SearchArgs) -> Result<(Polynomial, Strategy, StrategyParams, SearchResult), Error> {
    let p = Polynomial::parse(&read_input(&a.input)?)?;
    let strategy = Strategy::from(a.strategy);
    let params = StrategyParams {
        cp: a.cp,
        iterations: a.iterations,
        direction: a.direction.into(),
        seed: a.seed,
        level: a.level,
    };
    if let Some(text) = &a.scheme {
        let scheme = HornerScheme::parse_names(text, p.vars(), params.direction)?;
        let ev = crate::search::Evaluator::new(&p)?;
        let e = ev.evaluate(&scheme)?;
        let r = SearchResult {
            best_scheme: scheme,
            best_ops: e.ops,
            best_delta: e.delta,
            evaluations: 1,
            trace: None,
        };
        return Ok((p, strategy, params, r));
    }
    if a.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be positive".into()));
    }
    let mut best: Option<SearchResult> = None;
    let mut evaluations = 0;
    for rep in 0..a.repetitions {
        let mut ps = params.clone();
        if a.repetitions > 1 {
            ps.seed = crate::search::rng::derive_seed(a.seed, &[u64::from(rep)]);
        }
        let r = run_strategy(&p, strategy, &ps)?;
        evaluations += r.evaluations;
        let better = best
            .as_ref()
            .is_none_or(|b| (r.best_ops.total(), &r.best_scheme.order) < (b.best_ops.total(), &b.best_scheme.order));
        if better {
            best = Some(r);
        }
    }
    let mut r = best.expect("at least one repetition");
    r.evaluations = evaluations;
    Ok((p, strategy, params, r))
}

fn simplify(a: &SimplifyArgs, out: &mut dyn Write) -> Result<(), Error> {
    let (p, strategy, params, r) = search(&a.search)?;
    let text = SimplifyReport::new(&p, strategy, &params, &r).render(a.format.into());
    write_output(a.search.output.as_deref(), &text, out)
}

fn emit(a: &EmitArgs, out: &mut dyn Write) -> Result<(), Error> {
    let (p, _, _, r) = search(&a.search)?;
    let dag = build_dag(&apply_scheme(&p, &r.best_scheme)?);
    let code = dag.emit_code(p.vars(), &a.target);
    write_output(a.search.output.as_deref(), &code, out)
}

fn count(a: &CountArgs, out: &mut dyn Write) -> Result<(), Error> {
    let p = Polynomial::parse(&read_input(&a.input)?)?;
    write_output(a.output.as_deref(), &CountReport::new(&p).render(a.format.into()), out)
}

fn gen_res_cmd(a: &GenResArgs, out: &mut dyn Write) -> Result<(), Error> {
    let spec = ResolventSpec::new(a.m, a.n)?;
    let p = gen_res(spec)?;
    let mut text = p.to_string();
    text.push('\n');
    let path = a.output.clone().unwrap_or_else(|| PathBuf::from(spec.file_name()));
    if path.as_os_str() == "-" {
        out.write_all(text.as_bytes())?;
        return Ok(());
    }
    fs::write(&path, text)?;
    let counts = CountReport::new(&p);
    let fields = [
        ("file", path.display().to_string()),
        ("variables", counts.variables.to_string()),
        ("terms", counts.terms.to_string()),
        ("muls", counts.muls.to_string()),
        ("adds", counts.adds.to_string()),
        ("total", counts.total.to_string()),
    ];
    let report = match Format::from(a.format) {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(k, v)| {
                    let val = v.parse::<u64>().map(Into::into).unwrap_or_else(|_| v.clone().into());
                    (k.to_string(), val)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&map).expect("plain data serializes"))
        }
        Format::Csv => {
            let keys: Vec<_> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<_> = fields.iter().map(|(_, v)| v.as_str()).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        Format::Text => fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect(),
    };
    out.write_all(report.as_bytes())?;
    Ok(())
}

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), Error> {
    let criterion = match Strategy::from(a.strategy).criterion() {
        Some(c) => c,
        None => return Err(Error::InvalidConfig("sweep needs --strategy mcts-uct or mcts-sa-uct".into())),
    };
    let p = Polynomial::parse(&read_input(&a.input)?)?;
    let mut spec = SweepSpec::new(criterion, a.cp_min, a.cp_max, a.points);
    spec.iterations = a.iterations;
    spec.repetitions = a.repetitions;
    spec.dots = a.dots;
    spec.seed = a.seed;
    spec.timing = a.timing;
    spec.directions = match a.direction {
        SweepDirectionArg::Forward => vec![Direction::Forward],
        SweepDirectionArg::Backward => vec![Direction::Backward],
        SweepDirectionArg::Both => vec![Direction::Forward, Direction::Backward],
    };
    let records = run_sweep(&p, &spec, a.jobs)?;
    let mut buf = Vec::new();
    write_csv(&records, &mut buf)?;
    write_output(a.output.as_deref(), std::str::from_utf8(&buf).expect("csv is utf-8"), out)
}

fn region(a: &RegionArgs, out: &mut dyn Write) -> Result<(), Error> {
    let records = read_csv(fs::File::open(&a.input)?)?;
    let points = grid_medians(&records);
    let Some(best) = a.reference.or_else(|| points.iter().map(|g| g.best).min()) else {
        return Err(Error::InvalidConfig("sweep file has no rows".into()));
    };
    let mut text = format!("reference={best}\ntolerance={}\n", a.tolerance);
    match good_region(&points, best, a.tolerance) {
        Some(r) => {
            text += &format!(
                "region_lo={}\nregion_hi={}\nregion_width={}\nregion_points={}\n",
                r.lo,
                r.hi,
                r.width(),
                r.points()
            );
        }
        None => text += "region_points=0\nregion_width=0\n",
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::IterationOutOfRange { .. } | Error::ExhaustiveCapExceeded { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simplify(a) => simplify(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::GenRes(a) => gen_res_cmd(a, out),
        Command::Count(a) => count(a, out),
        Command::Emit(a) => emit(a, out),
        Command::Region(a) => region(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["hornopt"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["simplify"]).0, EXIT_USAGE);
        assert_eq!(call(&["simplify", "x.txt", "--strategy", "greedy"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn missing_file_exits_two() {
        let (code, _, err) = call(&["count", "/nonexistent/poly.txt"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error: "));
    }

    #[test]
    fn simplify_and_emit() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.txt");
        fs::write(&f, "x^2*z + x^3*y + x^3*y*z\n").unwrap();
        let f = f.to_str().unwrap();
        let (code, out, _) = call(&["simplify", f, "--scheme", "x,y,z"]);
        assert_eq!(code, 0);
        assert!(out.contains("final_muls=4\n"), "{out}");
        let (code, out, _) = call(&["emit", f, "--strategy", "exhaustive", "--target", "r"]);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with(';'));
        assert!(out.contains("r = "));
        let (code, _, _) = call(&["simplify", f, "--scheme", "x,q,z"]);
        assert_eq!(code, EXIT_INPUT);
    }
}
