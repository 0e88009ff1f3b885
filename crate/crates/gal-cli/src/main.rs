//! `gal` — exact checkers, solvers, and transforms for graded products on
//! Witt-type index lattices, reporting as JSON.
//!
//! Exit codes: 0 pass/feasible/found, 1 fail/infeasible/not-found, 2 usage
//! or input error. Diagnostics go to standard error; exactly one JSON
//! document goes to standard output (or `--output`).

mod input;
mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use gal_core::rational::Rational;
use gal_core::report::{Law, Window};
use gal_core::solver::{
    solve_ansatz, solve_table, AnsatzProblem, SolveStatus, DEFAULT_BUDGET,
};
use gal_core::virasoro::{check_central, solve_central_with, CentralOutcome, CentralStructure};
use gal_core::weight::{
    check_indecomposable, check_module_axiom, find_intertwiner, Indecomposability,
    IntertwinerOutcome, WeightModule,
};
use gal_core::witt::{
    are_isomorphic, check_law, check_law_symbolic, diagnostics_specializations, fit_family,
    q_transform, transform_structure, Epsilon, FitOutcome, GradedStructure, IsoOutcome,
    QDirection,
};

use input::{
    parse_module_spec, parse_param, parse_psi_spec, parse_structure_spec, parse_wire_expression,
    rational_flag,
};

/// An input or usage defect; always exits 2 with the message on stderr.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! input_errors {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError(e.to_string())
            }
        }
    )*};
}

input_errors!(
    gal_core::witt::CheckError,
    gal_core::witt::StructureError,
    gal_core::weight::ModuleError,
    gal_core::virasoro::CentralError,
    gal_core::solver::SolverError
);

#[derive(Parser)]
#[command(
    name = "gal",
    about = "Exact law checking, solving, and transforms for graded products",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// Structure input shared by the product-law subcommands: either an inline
/// expression with optional parameter bindings, or a structure spec.
#[derive(Args)]
struct StructureInput {
    /// Expression for the coefficient of `W_n ∘ W_m` (`n` = left factor).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    phi: Option<String>,
    /// Bind an expression parameter, e.g. `--param g=5/2`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", requires = "phi")]
    params: Vec<String>,
    /// `family`, `family:g=<rational>`, inline JSON, or a file path.
    #[arg(long, conflicts_with = "phi", value_name = "SPEC")]
    structure: Option<String>,
}

impl StructureInput {
    fn resolve(&self) -> Result<GradedStructure, CliError> {
        match (&self.phi, &self.structure) {
            (Some(expr), None) => {
                let poly = parse_wire_expression("--phi", expr)?;
                let mut bindings = BTreeMap::new();
                for p in &self.params {
                    let (name, value) = parse_param(p)?;
                    bindings.insert(name, value);
                }
                GradedStructure::symbolic(poly, bindings)
                    .map_err(|e| CliError(format!("--phi: {e}")))
            }
            (None, Some(spec)) => parse_structure_spec("--structure", spec),
            _ => Err(CliError(
                "exactly one of --phi or --structure is required".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    /// Pass to the paired Novikov product.
    ToNovikov,
    /// Pass back to the admissible product.
    ToAdmissible,
}

#[derive(Subcommand)]
enum Command {
    /// Check one product law on a window or symbolically.
    CheckLaw {
        /// witt-commutator, jacobi, anti-pre-lie, pre-lie,
        /// right-commutative, novikov, or admissible-novikov.
        #[arg(long)]
        law: String,
        #[command(flatten)]
        input: StructureInput,
        #[arg(long, conflicts_with = "symbolic")]
        window: Option<i64>,
        /// Expand residual polynomials instead of scanning a window.
        #[arg(long)]
        symbolic: bool,
    },
    /// Decide whether a structure is a family member; report γ or the first defect.
    FitGamma {
        #[command(flatten)]
        input: StructureInput,
        #[arg(long)]
        window: i64,
    },
    /// Window-exact isomorphism test between two structures.
    Iso {
        #[arg(long, value_name = "SPEC")]
        left: String,
        #[arg(long, value_name = "SPEC")]
        right: String,
        #[arg(long)]
        window: i64,
    },
    /// Apply the basis change `W_m ↦ ελ^m W_{εm}` and emit the result table.
    Transform {
        #[command(flatten)]
        input: StructureInput,
        /// +1 or -1.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: i64,
        /// Scale parameter; recorded but cancels in the product.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        window: i64,
    },
    /// Change of product between admissible and Novikov structures.
    QTransform {
        #[command(flatten)]
        input: StructureInput,
        #[arg(long, value_enum)]
        direction: DirectionArg,
    },
    /// Check the module axiom for a weight module.
    ModuleCheck {
        #[arg(long, value_name = "SPEC")]
        module: String,
        #[arg(long)]
        window: i64,
    },
    /// Window-relative indecomposability via weight-graph connectivity.
    ModuleIndec {
        #[arg(long, value_name = "SPEC")]
        module: String,
        #[arg(long)]
        window: i64,
    },
    /// Search for a grading-aligned module map between two weight modules.
    Intertwine {
        #[arg(long, value_name = "SPEC")]
        source: String,
        #[arg(long, value_name = "SPEC")]
        target: String,
        #[arg(long)]
        window: i64,
    },
    /// Solve for structures by polynomial ansatz elimination.
    SolveAnsatz {
        /// Maximum total degree of the ansatz.
        #[arg(long)]
        degree: Option<u32>,
        /// Pin φ(0,0) to this rational.
        #[arg(long, allow_hyphen_values = true)]
        pin: Option<String>,
        /// Branch budget (default GAL_BUDGET or 10000).
        #[arg(long)]
        budget: Option<u64>,
        /// JSON request {"mode":"ansatz","degree":D,"pin":"-1"} instead of flags.
        #[arg(long, value_name = "JSON|PATH")]
        request: Option<String>,
    },
    /// Solve for structures by windowed table propagation.
    SolveTable {
        #[arg(long)]
        window: Option<i64>,
        /// Pin φ(0,0) to this rational (required).
        #[arg(long, allow_hyphen_values = true)]
        pin: Option<String>,
        /// Branch budget (default GAL_BUDGET or 10000).
        #[arg(long)]
        budget: Option<u64>,
        /// JSON request {"mode":"table","window":N,"pin":"0"} instead of flags.
        #[arg(long, value_name = "JSON|PATH")]
        request: Option<String>,
    },
    /// Check the central-coefficient clauses of a candidate extension.
    VirasoroCheck {
        /// Rational γ; omit to keep γ formal.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// ψ coefficients as a JSON object {"m":"p/q", …} inline or in a file.
        #[arg(long, value_name = "SPEC")]
        psi: String,
        #[arg(long)]
        window: i64,
    },
    /// Solve the central linear system at γ; certificate on infeasibility.
    VirasoroSolve {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        window: i64,
        /// Drop the cocycle clause from the system.
        #[arg(long)]
        skip_cocycle: bool,
    },
    /// Low-index specializations and the axis sets Γ₁, Γ₂.
    Diagnostics {
        #[command(flatten)]
        input: StructureInput,
        #[arg(long)]
        window: i64,
    },
}

fn window_arg(radius: i64) -> Result<Window, CliError> {
    Window::new(radius).map_err(|e| CliError(format!("--window: {e}")))
}

fn budget_arg(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("GAL_BUDGET") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError(format!("GAL_BUDGET: `{v}` is not a branch count"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnsatzRequest {
    mode: String,
    degree: u32,
    #[serde(default)]
    pin: Option<String>,
    #[serde(default)]
    budget: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRequest {
    mode: String,
    window: i64,
    pin: String,
    #[serde(default)]
    budget: Option<u64>,
}

fn request_text(spec: &str) -> Result<String, CliError> {
    if spec.trim_start().starts_with('{') {
        Ok(spec.to_string())
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| CliError(format!("--request: cannot read `{spec}`: {e}")))
    }
}

fn solved_exit(status: &SolveStatus, count: usize) -> u8 {
    if matches!(status, SolveStatus::Complete) && count > 0 {
        0
    } else {
        1
    }
}

fn run(command: &Command) -> Result<(Value, u8), CliError> {
    match command {
        Command::CheckLaw {
            law,
            input,
            window,
            symbolic,
        } => {
            let law: Law = law.parse().map_err(|e| CliError(format!("--law: {e}")))?;
            let s = input.resolve()?;
            let report = match (window, symbolic) {
                (Some(radius), false) => check_law(law, &s, window_arg(*radius)?)?,
                (None, true) => check_law_symbolic(law, &s)?,
                _ => {
                    return Err(CliError(
                        "exactly one of --window or --symbolic is required".into(),
                    ))
                }
            };
            Ok((json::report_value(&report), u8::from(!report.pass)))
        }
        Command::FitGamma { input, window } => {
            let s = input.resolve()?;
            let outcome = fit_family(&s, window_arg(*window)?)?;
            let code = u8::from(!matches!(outcome, FitOutcome::Gamma(_)));
            Ok((json::fit_value(&outcome), code))
        }
        Command::Iso {
            left,
            right,
            window,
        } => {
            let s1 = parse_structure_spec("--left", left)?;
            let s2 = parse_structure_spec("--right", right)?;
            let outcome = are_isomorphic(&s1, &s2, window_arg(*window)?)?;
            let code = u8::from(matches!(outcome, IsoOutcome::No));
            Ok((json::iso_value(&outcome), code))
        }
        Command::Transform {
            input,
            epsilon,
            lambda,
            window,
        } => {
            let s = input.resolve()?;
            let eps = Epsilon::from_sign(*epsilon)
                .ok_or_else(|| CliError(format!("--epsilon: expected 1 or -1, got {epsilon}")))?;
            let lambda = rational_flag("--lambda", lambda)?;
            let out = transform_structure(&s, eps, &lambda, window_arg(*window)?)?;
            Ok((json::structure_value(&out), 0))
        }
        Command::QTransform { input, direction } => {
            let s = input.resolve()?;
            let dir = match direction {
                DirectionArg::ToNovikov => QDirection::ToNovikov,
                DirectionArg::ToAdmissible => QDirection::ToAdmissible,
            };
            Ok((json::structure_value(&q_transform(&s, dir)), 0))
        }
        Command::ModuleCheck { module, window } => {
            let source = parse_module_spec("--module", module)?;
            let w = window_arg(*window)?;
            let m = WeightModule::build(&source, w)?;
            let report = check_module_axiom(&m, w)?;
            Ok((json::report_value(&report), u8::from(!report.pass)))
        }
        Command::ModuleIndec { module, window } => {
            let source = parse_module_spec("--module", module)?;
            let w = window_arg(*window)?;
            let m = WeightModule::build(&source, w)?;
            let outcome = check_indecomposable(&m, w)?;
            let code = u8::from(matches!(outcome, Indecomposability::Decomposable { .. }));
            Ok((json::indecomposability_value(&outcome, w.radius()), code))
        }
        Command::Intertwine {
            source,
            target,
            window,
        } => {
            let w = window_arg(*window)?;
            let a = WeightModule::build(&parse_module_spec("--source", source)?, w)?;
            let b = WeightModule::build(&parse_module_spec("--target", target)?, w)?;
            let outcome = find_intertwiner(&a, &b, w)?;
            let code = u8::from(matches!(outcome, IntertwinerOutcome::Infeasible { .. }));
            Ok((json::intertwiner_value(&outcome), code))
        }
        Command::SolveAnsatz {
            degree,
            pin,
            budget,
            request,
        } => {
            let (degree, pin, budget) = match request {
                Some(spec) => {
                    if degree.is_some() || pin.is_some() || budget.is_some() {
                        return Err(CliError(
                            "--request replaces --degree/--pin/--budget".into(),
                        ));
                    }
                    let req: AnsatzRequest = serde_json::from_str(&request_text(spec)?)
                        .map_err(|e| CliError(format!("--request: {e}")))?;
                    if req.mode != "ansatz" {
                        return Err(CliError(format!(
                            "--request: mode must be \"ansatz\", got \"{}\"",
                            req.mode
                        )));
                    }
                    (req.degree, req.pin, req.budget)
                }
                None => (
                    degree.ok_or_else(|| CliError("--degree is required".into()))?,
                    pin.clone(),
                    *budget,
                ),
            };
            let pinned = pin
                .map(|p| rational_flag("--pin", &p))
                .transpose()?;
            let problem = AnsatzProblem {
                max_total_degree: degree,
                pinned,
            };
            let outcome = solve_ansatz(&problem, budget_arg(budget)?)?;
            let code = solved_exit(&outcome.status, outcome.solutions.len());
            Ok((json::solve_value(&outcome), code))
        }
        Command::SolveTable {
            window,
            pin,
            budget,
            request,
        } => {
            let (window, pin, budget) = match request {
                Some(spec) => {
                    if window.is_some() || pin.is_some() || budget.is_some() {
                        return Err(CliError(
                            "--request replaces --window/--pin/--budget".into(),
                        ));
                    }
                    let req: TableRequest = serde_json::from_str(&request_text(spec)?)
                        .map_err(|e| CliError(format!("--request: {e}")))?;
                    if req.mode != "table" {
                        return Err(CliError(format!(
                            "--request: mode must be \"table\", got \"{}\"",
                            req.mode
                        )));
                    }
                    (req.window, req.pin, req.budget)
                }
                None => (
                    window.ok_or_else(|| CliError("--window is required".into()))?,
                    pin.clone()
                        .ok_or_else(|| CliError("--pin is required".into()))?,
                    *budget,
                ),
            };
            let pin = rational_flag("--pin", &pin)?;
            let outcome = solve_table(window_arg(window)?, &pin, budget_arg(budget)?)?;
            let code = solved_exit(&outcome.status, outcome.solutions.len());
            Ok((json::solve_value(&outcome), code))
        }
        Command::VirasoroCheck { gamma, psi, window } => {
            let gamma = gamma
                .as_deref()
                .map(|g| rational_flag("--gamma", g))
                .transpose()?;
            let psi = parse_psi_spec("--psi", psi)?;
            let w = window_arg(*window)?;
            let c = CentralStructure::new(gamma, psi, w)?;
            let report = check_central(&c, w)?;
            Ok((json::report_value(&report), u8::from(!report.pass)))
        }
        Command::VirasoroSolve {
            gamma,
            window,
            skip_cocycle,
        } => {
            let gamma: Rational = rational_flag("--gamma", gamma)?;
            let w = window_arg(*window)?;
            let outcome = solve_central_with(&gamma, w, !skip_cocycle)?;
            let code = u8::from(matches!(outcome, CentralOutcome::Infeasible(_)));
            Ok((json::central_outcome_value(&outcome), code))
        }
        Command::Diagnostics { input, window } => {
            let s = input.resolve()?;
            let w = window_arg(*window)?;
            let d = diagnostics_specializations(&s, w)?;
            Ok((json::diagnostics_value(&d, w.radius()), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((value, code)) => {
            let doc = format!("{value}\n");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, doc) {
                        eprintln!("error: cannot write `{}`: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{doc}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
