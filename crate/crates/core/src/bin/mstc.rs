//! Command-line front end.
//!
//! Exit codes: 0 when the command succeeded and every check passed, 1 when
//! checks ran and found violations, 2 on input errors. Reports go to stdout
//! and are byte-identical for identical arguments and seed: keys are sorted
//! and floats use a fixed 17-significant-digit format.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mstc_core::curve::TestCurve;
use mstc_core::gradients::{minimal_hajlasz, norms, two_point_arena, CHECK_TOL};
use mstc_core::jsonio::{load_curve, load_family, load_function, load_space, FamilySpec};
use mstc_core::modulus::{enumerate_step_curves, modulus, CurveFamily};
use mstc_core::report::{csv_float, csv_row, to_json, Value};
use mstc_core::space::{lp_norm, MetricMeasureSpace};
use mstc_core::stieltjes::{integrate, sym_integrate, Integrand};
use mstc_core::verify::{report_value, run_all, run_suite, Suite, VerifyConfig};
use mstc_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mstc",
    version,
    about = "Test-curve calculus on finite metric measure spaces"
)]
struct Cli {
    /// Absolute slack for inequality checks.
    #[arg(long, global = true, env = "MS_TOLERANCE")]
    tolerance: Option<f64>,
    /// Report format; csv is defined for verify reports only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check the space axioms; optionally check a curve or function on it.
    Validate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Describe a curve: variation, jumps, breakpoints.
    Curve {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Plain and symmetrized curve integrals of a function table.
    Integrate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Discrete p-modulus of a curve family.
    Modulus {
        #[arg(long)]
        space: PathBuf,
        /// Family file: a curve array or {"enumerate": {"max_jumps": J}}.
        #[arg(long)]
        curves: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Dyadic grid depth when the family file enumerates.
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Pointwise-minimal Hajłasz gradient and its L^p norm.
    HajlaszMin {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Run the randomized verification suites.
    Verify {
        #[arg(long, default_value = "all",
              value_parser = ["uno", "bounded18", "seventysix", "plans", "fuglede", "all"])]
        suite: String,
        /// Random cases per suite.
        #[arg(long, default_value_t = 20)]
        spaces: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_jumps: usize,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Hajłasz-Sobolev norm and the arena-restricted TC-Newtonian bound.
    Norms {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        max_jumps: usize,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tol = cli.tolerance.unwrap_or(CHECK_TOL);
    if cli.format == Format::Csv && !matches!(cli.command, Command::Verify { .. }) {
        return Err(Error::Config(
            "csv output is defined for verify reports only".into(),
        ));
    }
    match cli.command {
        Command::Validate { space, curve, function } => cmd_validate(&space, curve, function),
        Command::Curve { space, curve } => cmd_curve(&space, &curve),
        Command::Integrate { space, curve, function } => {
            cmd_integrate(&space, &curve, &function)
        }
        Command::Modulus { space, curves, p, depth } => cmd_modulus(&space, &curves, p, depth),
        Command::HajlaszMin { space, function, p } => cmd_hajlasz_min(&space, &function, p),
        Command::Verify { suite, spaces, seed, max_jumps, depth, p } => {
            let cfg = VerifyConfig { spaces, max_jumps, depth, seed, p, tol };
            cmd_verify(&suite, &cfg, cli.format)
        }
        Command::Norms { space, function, p, max_jumps, depth } => {
            cmd_norms(&space, &function, p, max_jumps, depth, tol)
        }
    }
}

fn emit(report: Value) -> ExitCode {
    print!("{}", to_json(&report));
    ExitCode::SUCCESS
}

fn cmd_validate(
    space: &Path,
    curve: Option<PathBuf>,
    function: Option<PathBuf>,
) -> Result<ExitCode> {
    let s = load_space(space)?;
    let mut report = vec![
        ("claim", Value::from("the input satisfies the metric measure space axioms")),
        ("command", Value::from("validate")),
        ("has_embedding", Value::from(s.has_embedding())),
        ("n", Value::from(s.n())),
        ("ok", Value::from(true)),
        ("total_mass", Value::from(s.weights().iter().sum::<f64>())),
    ];
    if let Some(path) = curve {
        let c = load_curve(&path, &s)?;
        report.push(("curve_variation", Value::from(c.variation(&s))));
    }
    if let Some(path) = function {
        let f = load_function(&path)?;
        f.check_matches(&s)?;
        report.push(("function_len", Value::from(f.len())));
    }
    Ok(emit(Value::map(report)))
}

fn cmd_curve(space: &Path, curve: &Path) -> Result<ExitCode> {
    let s = load_space(space)?;
    let c = load_curve(curve, &s)?;
    let (a, b) = c.domain();
    let jumps = Value::list(c.jump_list(&s).into_iter().map(|(t, size)| {
        Value::map([("size", Value::from(size)), ("time", Value::from(t))])
    }));
    Ok(emit(Value::map([
        ("claim", Value::from("variation and jump structure of the test curve")),
        ("command", Value::from("curve")),
        ("domain", Value::floats(&[a, b])),
        ("is_step", Value::from(c.is_step())),
        ("jumps", jumps),
        ("variation", Value::from(c.variation(&s))),
    ])))
}

fn cmd_integrate(space: &Path, curve: &Path, function: &Path) -> Result<ExitCode> {
    let s = load_space(space)?;
    let c = load_curve(curve, &s)?;
    let f = load_function(function)?;
    f.check_matches(&s)?;
    let integrand = Integrand::Table(&f);
    Ok(emit(Value::map([
        (
            "claim",
            Value::from("plain and symmetrized curve integrals of the function table"),
        ),
        ("command", Value::from("integrate")),
        ("integral", Value::from(integrate(&s, &c, &integrand)?)),
        ("sym_integral", Value::from(sym_integrate(&s, &c, &integrand)?)),
        ("variation", Value::from(c.variation(&s))),
    ])))
}

fn resolve_family(
    s: &MetricMeasureSpace,
    spec: FamilySpec,
    fallback_depth: u32,
) -> Result<CurveFamily> {
    let curves: Vec<TestCurve> = match spec {
        FamilySpec::Curves(curves) => curves,
        FamilySpec::Enumerate { max_jumps, depth } => {
            enumerate_step_curves(s, max_jumps, depth.unwrap_or(fallback_depth))
        }
    };
    CurveFamily::new(s, curves)
}

fn cmd_modulus(space: &Path, curves: &Path, p: f64, depth: u32) -> Result<ExitCode> {
    let s = load_space(space)?;
    let fam = resolve_family(&s, load_family(curves, &s)?, depth)?;
    let result = modulus(&s, &fam, p)?;
    Ok(emit(Value::map([
        ("claim", Value::from("discrete p-modulus of the curve family")),
        ("command", Value::from("modulus")),
        ("curves", Value::from(fam.len())),
        ("density", Value::floats(result.density.values())),
        ("iterations", Value::from(result.iterations)),
        ("p", Value::from(p)),
        ("slacks", Value::floats(&result.slacks)),
        ("tie_broken", Value::from(result.tie_broken)),
        ("value", Value::from(result.value)),
    ])))
}

fn cmd_hajlasz_min(space: &Path, function: &Path, p: f64) -> Result<ExitCode> {
    let s = load_space(space)?;
    let f = load_function(function)?;
    let (gradient, norm) = minimal_hajlasz(&s, &f, p)?;
    Ok(emit(Value::map([
        (
            "claim",
            Value::from("pointwise-minimal Hajłasz gradient of the function"),
        ),
        ("command", Value::from("hajlasz-min")),
        ("function_lp_norm", Value::from(lp_norm(&f, &s, p)?)),
        ("gradient", Value::floats(gradient.values())),
        ("gradient_lp_norm", Value::from(norm)),
        ("p", Value::from(p)),
    ])))
}

fn cmd_verify(suite: &str, cfg: &VerifyConfig, format: Format) -> Result<ExitCode> {
    let outcomes = if suite == "all" {
        run_all(cfg)?
    } else {
        let s = Suite::from_name(suite)
            .ok_or_else(|| Error::Config(format!("unknown suite {suite:?}")))?;
        vec![run_suite(s, cfg)?]
    };
    let total: usize = outcomes.iter().map(|o| o.violations.len()).sum();

    match format {
        Format::Json => {
            print!("{}", to_json(&report_value(cfg, &outcomes)));
        }
        Format::Csv => {
            let mut lines = vec!["suite,space_id,curve_id/pair,lhs,rhs,slack".to_string()];
            for outcome in &outcomes {
                for v in &outcome.violations {
                    lines.push(csv_row(&[
                        outcome.suite.name().to_string(),
                        v.space_id.to_string(),
                        v.witness.clone(),
                        csv_float(v.lhs),
                        csv_float(v.rhs),
                        csv_float(v.deficit()),
                    ]));
                }
            }
            println!("{}", lines.join("\n"));
        }
    }
    Ok(if total == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_norms(
    space: &Path,
    function: &Path,
    p: f64,
    max_jumps: usize,
    depth: u32,
    tol: f64,
) -> Result<ExitCode> {
    let s = load_space(space)?;
    let f = load_function(function)?;
    let enumerated = enumerate_step_curves(&s, max_jumps, depth);
    let arena = if enumerated.is_empty() {
        two_point_arena(&s)?
    } else {
        CurveFamily::new(&s, enumerated)?
    };
    let report = norms(&s, &f, p, &arena, tol)?;
    let value = Value::map([
        (
            "claim",
            Value::from(
                "the Hajłasz-Sobolev norm sits between half and 76 times the \
                 arena-restricted TC-Newtonian bound",
            ),
        ),
        ("command", Value::from("norms")),
        (
            "caveat",
            Value::from(
                "n_tc_lower relaxes the TC-Newtonian infimum to the enumerated arena, \
                 so it is a lower bound for the true norm",
            ),
        ),
        ("m_gradient", Value::from(report.m_gradient)),
        ("m_norm", Value::from(report.m_norm)),
        ("n_gradient_lower", Value::from(report.n_gradient_lower)),
        ("n_tc_lower", Value::from(report.n_tc_lower)),
        ("p", Value::from(p)),
        ("sandwich_holds", Value::from(report.sandwich_holds)),
    ]);
    print!("{}", to_json(&value));
    Ok(if report.sandwich_holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
