//! Command-line surface of the jetsym workbench.
//!
//! # Overview
//!
//! Five commands tie the library together:
//!
//! * `models` — list the built-in model ids;
//! * `derive <model>` — prolong the model's generic symmetry ansatz and
//!   print the determining system (text: one canonical expression per
//!   line, `= 0` implied; `--json`: the array of expression strings);
//! * `verify <model> <suite>` — run a verification suite and report;
//! * `bracket <model> <A> <B>` — one graded bracket, expanded in the
//!   model's primary basis;
//! * `export <model>` — serialize a model to its JSON document form.
//!
//! Exit codes: 0 when every check passes (identities flagged as suspect
//! in the source tables exit 0 with a warning), 1 on a genuine
//! verification failure, 2 on usage errors or model load failures.
//!
//! Outputs are deterministic given `(model, seed, trials)`; the JSON
//! report is byte-identical for identical configuration. The default
//! seed is 42, overridable by the `JETSYM_SEED` environment variable and
//! the `--seed` flag (flag wins).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jetsym::algebra::{
    ansatz_suite, closure_check, default_closure_sets, dictionary, expand_in_basis,
    graded_bracket, run_check, run_span_check, verify_table,
};
use jetsym::models::{
    builtin, exact_solutions, load_model, ModelError, ModelSpec, BUILTIN_NAMES,
};
use jetsym::numcheck::{
    consistency_vector_field, finite_residual, finite_transformations, generator_residual,
    group_law, tol, NumericSolution,
};
use jetsym::report::{
    DeriveReport, FiniteCheckReport, RunReport, Section, SolutionCheckReport,
};

#[derive(Parser)]
#[command(
    name = "jetsym",
    version,
    about = "Symmetry and superalgebra workbench for coupled matrix Schrödinger-type systems"
)]
struct Cli {
    /// Oracle seed (default: $JETSYM_SEED or 42)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Oracle trials per zero test
    #[arg(long, global = true, default_value_t = 20)]
    trials: u32,
    /// Emit the JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the built-in model ids
    Models,
    /// Derive the determining system of the model's symmetry ansatz
    Derive {
        /// Built-in model id or model file path
        model: String,
        /// Prolongation order (default: the model's declared order)
        #[arg(long)]
        order: Option<u32>,
    },
    /// Run a verification suite
    Verify {
        /// Built-in model id or model file path
        model: String,
        /// Which checks to run
        suite: Suite,
        /// Apply the model's supersymmetry parameter shift to the
        /// identities that require it (without the flag those identities
        /// are reported as expected failures)
        #[arg(long)]
        alpha_beta_shift: bool,
    },
    /// Expand one graded bracket in the model's primary basis
    Bracket {
        /// Built-in model id or model file path
        model: String,
        /// First generator name
        a: String,
        /// Second generator name
        b: String,
    },
    /// Serialize a model to its JSON document form
    Export {
        /// Built-in model id or model file path
        model: String,
        /// Output path (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Suite {
    Algebra,
    Ansatz,
    Supercharges,
    Solutions,
    Finite,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Ansatz => "ansatz",
            Suite::Supercharges => "supercharges",
            Suite::Solutions => "solutions",
            Suite::Finite => "finite",
            Suite::All => "all",
        }
    }
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// Print to stdout, ignoring a closed pipe (e.g. `jetsym derive … | head`).
fn emit(s: impl AsRef<str>) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(s.as_ref().as_bytes());
}

fn default_seed() -> u64 {
    std::env::var("JETSYM_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(42)
}

/// A model argument is a file path when it points at an existing file or
/// carries a path-like shape; otherwise it names a built-in.
fn load(model: &str) -> Result<ModelSpec, ModelError> {
    let p = Path::new(model);
    if p.is_file() || model.contains('/') || model.ends_with(".json") {
        load_model(p)
    } else {
        builtin(model)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or_else(default_seed);
    match run(&cli, seed) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, seed: u64) -> Result<bool, ModelError> {
    match &cli.cmd {
        Cmd::Models => {
            for name in BUILTIN_NAMES {
                emit(format!("{name}\n"));
            }
            Ok(true)
        }
        Cmd::Export { model, out } => {
            let m = load(model)?;
            let doc = jetsym::models::export_model(&m)?;
            match out {
                Some(path) => std::fs::write(path, doc).map_err(|e| {
                    ModelError::Validation(format!("cannot write {}: {e}", path.display()))
                })?,
                None => emit(format!("{doc}\n")),
            }
            Ok(true)
        }
        Cmd::Derive { model, order } => {
            let m = load(model)?;
            let a = m.ansatz.as_ref().ok_or_else(|| {
                ModelError::Validation(format!("model `{}` declares no symmetry ansatz", m.name))
            })?;
            let order = order.unwrap_or(a.order);
            let det = m.determining(&a.field, order);
            let equations: Vec<String> = det.equations.iter().map(|e| e.to_string()).collect();
            if cli.json {
                emit(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&equations).expect("string array serialization")
                ));
            } else {
                let mut report = RunReport::new(&m.name, "derive", seed, cli.trials);
                report.push(Section::Derive(DeriveReport {
                    model: m.name.clone(),
                    order,
                    equations,
                    jet_independence: det
                        .jet_independence
                        .iter()
                        .map(|(u, j)| format!("∂{u}/∂{} = 0", j.name()))
                        .collect(),
                }));
                emit(report.render_text());
            }
            Ok(true)
        }
        Cmd::Bracket { model, a, b } => {
            let m = load(model)?;
            let cfg = m.oracle_cfg(seed, cli.trials);
            let reg = m.registry()?;
            let ga = reg
                .get(a)
                .ok_or_else(|| ModelError::UnknownGenerator(a.clone(), m.name.clone()))?;
            let gb = reg
                .get(b)
                .ok_or_else(|| ModelError::UnknownGenerator(b.clone(), m.name.clone()))?;
            let (bra, kind) = graded_bracket(
                ga,
                gb,
                &m.resolve_op(&ga.op, false),
                &m.resolve_op(&gb.op, false),
            )?;
            // expand in the first declared closure basis containing both
            // names, falling back to the model's first closure basis
            let sets = default_closure_sets(&m);
            let basis_names: Vec<String> = sets
                .iter()
                .map(|(names, _)| names.clone())
                .find(|names| names.contains(a) && names.contains(b))
                .or_else(|| sets.first().map(|(names, _)| names.clone()))
                .unwrap_or_else(|| m.generators.iter().map(|g| g.name.clone()).collect());
            let basis: Vec<_> = basis_names
                .iter()
                .filter_map(|n| reg.get(n))
                .map(|g| jetsym::operator::GradedGenerator {
                    name: g.name.clone(),
                    op: m.resolve_op(&g.op, false),
                    parity: g.parity,
                })
                .collect();
            let exp = expand_in_basis(&bra, &basis, &dictionary(&m), &cfg)?;
            if exp.in_span {
                emit(format!("{kind} = {}\n", exp.combo_string(&basis)));
            } else {
                let witness = exp
                    .residual
                    .is_zero_op(&cfg)?
                    .map(|(r, c, _, w)| format!(" (residual at entry ({r},{c}): {w})"))
                    .unwrap_or_default();
                emit(format!(
                    "{kind} = <not in span of {{{}}}>{witness}\n",
                    basis_names.join(", ")
                ));
            }
            Ok(true)
        }
        Cmd::Verify { model, suite, alpha_beta_shift } => {
            let m = load(model)?;
            let cfg = m.oracle_cfg(seed, cli.trials);
            m.validate(&cfg)?;
            let mut report = RunReport::new(&m.name, suite.name(), seed, cli.trials);
            if suite.includes(Suite::Algebra) {
                for t in &m.tables {
                    report.push(Section::Table(verify_table(&m, t, &cfg)?));
                }
                for (names, graded) in default_closure_sets(&m) {
                    report.push(Section::Closure(closure_check(&m, &names, graded, &cfg)?));
                }
            }
            if suite.includes(Suite::Supercharges) {
                for check in &m.checks {
                    if check.requires_shift && !alpha_beta_shift {
                        let mut r = run_check(&m, check, &cfg, false)?;
                        r.status = match r.status.as_str() {
                            "fail" => "expected_failure".into(),
                            _ => "unexpected_pass".into(),
                        };
                        r.detail = Some(
                            "identity requires the parameter shift; rerun with \
                             --alpha-beta-shift"
                                .into(),
                        );
                        report.push(Section::Check(r));
                    } else {
                        report.push(Section::Check(run_check(
                            &m,
                            check,
                            &cfg,
                            check.requires_shift,
                        )?));
                    }
                }
                for sc in &m.span_checks {
                    report.push(Section::Span(run_span_check(&m, sc, &cfg)?));
                }
            }
            if suite.includes(Suite::Ansatz) {
                for r in ansatz_suite(&m, &cfg)? {
                    report.push(Section::Ansatz(r));
                }
            }
            if suite.includes(Suite::Solutions) {
                for g in &m.generators {
                    for sol in &m.solutions {
                        let r = generator_residual(&m, &g.op, sol, seed)?;
                        report.push(Section::Solution(SolutionCheckReport {
                            model: m.name.clone(),
                            generator: g.name.clone(),
                            solution: sol.name.clone(),
                            residual: r,
                            tolerance: tol::GENERATOR,
                            status: if r <= tol::GENERATOR { "pass" } else { "fail" }.into(),
                        }));
                    }
                }
            }
            if suite.includes(Suite::Finite) {
                let mut sols = exact_solutions(&m, 0)?;
                sols.extend(exact_solutions(&m, 1)?);
                for t in finite_transformations(&m) {
                    let gl = group_law(&t, 0.1, 0.1, seed);
                    let cv = consistency_vector_field(&m, &t, seed)?;
                    for sd in &sols {
                        let ns = NumericSolution::new(&m, sd);
                        let fr = finite_residual(&m, &t, 0.3, &ns, seed)?;
                        let ok = fr.ok() && gl <= tol::GROUP_LAW && cv <= tol::CONSISTENCY;
                        report.push(Section::Finite(FiniteCheckReport {
                            model: m.name.clone(),
                            transformation: t.name.clone(),
                            solution: sd.name.clone(),
                            lambda: 0.3,
                            residual: fr.residual,
                            floor: fr.floor,
                            group_law: gl,
                            consistency: cv,
                            status: if ok { "pass" } else { "fail" }.into(),
                        }));
                    }
                }
            }
            if cli.json {
                emit(format!("{}\n", report.render_json()));
            } else {
                emit(report.render_text());
            }
            Ok(report.ok())
        }
    }
}
