//! Command-line front end: feasibility checks, solving, verification,
//! simulation, instance generation, and DOT export.
//!
//! Exit codes: 0 success (and feasible/valid verdicts), 1 negative verdict
//! (infeasible instance, invalid assignment, failed simulation), 2 usage
//! errors (bad files, bad flags, unsupported shapes), 3 internal assertion
//! failures.

use std::fmt::Display;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sumnet_core::field::FieldSpec;
use sumnet_core::flow::check_feasibility;
use sumnet_core::format::{parse_assignment, parse_instance, serialize_assignment, serialize_instance};
use sumnet_core::generate::{generate_instance, GenSpec};
use sumnet_core::instance::Instance;
use sumnet_core::rewire::{augment, AugmentedInstance};
use sumnet_core::solve::{choose_solver, solve, SolveError, SolveReport, SolverKind};
use sumnet_core::verify::{
    check_local_validity, check_sum_recovery, random_symbol_tuples, simulate_transmission,
    CodingAssignment,
};
use sumnet_core::{export_dot, export_dot_instance};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sumnet",
    about = "Linear network codes delivering the sum of all sources to every terminal",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that every source can reach every terminal.
    Check {
        /// Instance file (TOML).
        instance: PathBuf,
    },
    /// Construct a coding assignment and report it.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the assignment to this file for later re-verification.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a stored assignment against its instance.
    Verify {
        instance: PathBuf,
        assignment: PathBuf,
    },
    /// Push random source symbols through a stored assignment and compare
    /// every terminal's output with the true sum.
    Simulate {
        instance: PathBuf,
        assignment: PathBuf,
        /// Number of random symbol tuples to push through.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a random instance.
    Gen {
        /// Construction the instance is shaped for: 2xn or nx2. Inferred
        /// from the counts when omitted.
        #[arg(long)]
        kind: Option<SolverKind>,
        #[arg(long)]
        sources: usize,
        #[arg(long)]
        terminals: usize,
        /// Middle nodes between sources and terminals.
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cut one sampled source-terminal pair and record it.
        #[arg(long)]
        infeasible: bool,
        /// Write the instance here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an instance as Graphviz DOT; optionally solve it first so the
    /// edges carry their coding vectors.
    Dot {
        instance: PathBuf,
        /// Solve before rendering.
        #[arg(long)]
        solved: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Field degree m for GF(2^m); defaults to the instance file's field, or
    /// the solver's own default.
    #[arg(long = "field-m")]
    field_m: Option<u32>,
    /// Seed for the randomized multicast step of the two-source solver.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Force a construction (2xn or nx2) instead of auto-selecting.
    #[arg(long)]
    solver: Option<SolverKind>,
}

/// A diagnostic plus the exit code it deserves.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

type CmdResult = Result<u8, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read_file(path)?)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn resolve_field(inst: &Instance, field_m: Option<u32>) -> Result<Option<FieldSpec>, Failure> {
    match field_m {
        Some(m) => FieldSpec::with_default_modulus(m)
            .map(Some)
            .map_err(|e| fail(EXIT_USAGE, e)),
        None => Ok(inst.field_override()),
    }
}

fn run_solver(inst: &Instance, args: &SolverArgs) -> Result<SolveReport, Failure> {
    let field = resolve_field(inst, args.field_m)?;
    solve(inst, field, args.seed, args.solver).map_err(|e| match e {
        SolveError::Infeasible(report) => fail(EXIT_NEGATIVE, report),
        SolveError::UnsupportedShape { .. } | SolveError::SolverMismatch { .. } => {
            fail(EXIT_USAGE, e)
        }
        other => fail(EXIT_INTERNAL, other),
    })
}

/// Loads an instance/assignment pair, cross-checks their role lists, and
/// rebinds the stored vectors onto the augmented graph.
fn load_bound_assignment(
    instance_path: &Path,
    assignment_path: &Path,
) -> Result<(AugmentedInstance, CodingAssignment, FieldSpec), Failure> {
    let inst = load_instance(instance_path)?;
    let doc = parse_assignment(&read_file(assignment_path)?)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", assignment_path.display())))?;
    let labels = |nodes: &[sumnet_core::graph::NodeId]| -> Vec<String> {
        nodes
            .iter()
            .map(|&v| inst.graph().label(v).to_string())
            .collect()
    };
    if doc.sources != labels(inst.sources()) || doc.terminals != labels(inst.terminals()) {
        return Err(fail(
            EXIT_USAGE,
            "assignment does not match instance: different source/terminal lists",
        ));
    }
    let field = doc
        .field
        .to_spec()
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", assignment_path.display())))?;
    let aug = augment(&inst).map_err(|e| fail(EXIT_NEGATIVE, e))?;
    let assignment = doc
        .to_assignment(&aug)
        .map_err(|e| fail(EXIT_USAGE, e))?;
    Ok((aug, assignment, field))
}

fn cmd_check(path: &Path) -> CmdResult {
    let inst = load_instance(path)?;
    let report = check_feasibility(&inst);
    println!("{report}");
    Ok(if report.feasible() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_solve(path: &Path, args: &SolverArgs, out: Option<&Path>) -> CmdResult {
    let inst = load_instance(path)?;
    let report = run_solver(&inst, args)?;
    print!("{}", report.render());
    if let Some(out) = out {
        let text = serialize_assignment(&report).map_err(|e| fail(EXIT_INTERNAL, e))?;
        fs::write(out, text)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", out.display())))?;
        eprintln!("assignment written to {}", out.display());
    }
    Ok(EXIT_OK)
}

fn cmd_verify(instance: &Path, assignment: &Path) -> CmdResult {
    let (aug, bound, _) = load_bound_assignment(instance, assignment)?;
    let validity = check_local_validity(aug.graph(), &bound, aug.virtual_sources())
        .map_err(|e| fail(EXIT_INTERNAL, e))?;
    let recovery = check_sum_recovery(&aug, &bound).map_err(|e| fail(EXIT_INTERNAL, e))?;
    println!("{validity}");
    println!("{recovery}");
    Ok(if validity.valid() && recovery.all_recovered() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_simulate(instance: &Path, assignment: &Path, trials: usize, seed: u64) -> CmdResult {
    let (aug, bound, field) = load_bound_assignment(instance, assignment)?;
    let tuples = random_symbol_tuples(field, aug.n_sources(), trials, seed);
    let report =
        simulate_transmission(&aug, &bound, &tuples).map_err(|e| fail(EXIT_INTERNAL, e))?;
    println!("{report}");
    Ok(if report.all_sums_recovered() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: Option<SolverKind>,
    sources: usize,
    terminals: usize,
    extra: usize,
    seed: u64,
    infeasible: bool,
    out: Option<&Path>,
) -> CmdResult {
    let kind = match kind {
        Some(k) => k,
        None => choose_solver(sources, terminals).ok_or_else(|| {
            fail(
                EXIT_USAGE,
                format!("no construction fits {sources} sources and {terminals} terminals; pass --kind"),
            )
        })?,
    };
    let spec = GenSpec {
        kind,
        sources,
        terminals,
        extra_nodes: extra,
        seed,
        infeasible,
    };
    let inst = generate_instance(&spec).map_err(|e| fail(EXIT_USAGE, e))?;
    let text = serialize_instance(&inst).map_err(|e| fail(EXIT_INTERNAL, e))?;
    write_output(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_dot(path: &Path, solved: bool, args: &SolverArgs, out: Option<&Path>) -> CmdResult {
    let inst = load_instance(path)?;
    let text = if solved {
        export_dot(&run_solver(&inst, args)?)
    } else {
        export_dot_instance(&inst)
    };
    write_output(out, &text)?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.cmd {
        Cmd::Check { instance } => cmd_check(instance),
        Cmd::Solve {
            instance,
            solver,
            out,
        } => cmd_solve(instance, solver, out.as_deref()),
        Cmd::Verify {
            instance,
            assignment,
        } => cmd_verify(instance, assignment),
        Cmd::Simulate {
            instance,
            assignment,
            trials,
            seed,
        } => cmd_simulate(instance, assignment, *trials, *seed),
        Cmd::Gen {
            kind,
            sources,
            terminals,
            extra,
            seed,
            infeasible,
            out,
        } => cmd_gen(
            *kind,
            *sources,
            *terminals,
            *extra,
            *seed,
            *infeasible,
            out.as_deref(),
        ),
        Cmd::Dot {
            instance,
            solved,
            solver,
            out,
        } => cmd_dot(instance, *solved, solver, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
        Err(_) => {
            // The panic hook has already printed the assertion message.
            eprintln!("error: internal assertion failed");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
