//! Shared report structures for the verification suites.
//!
//! # Overview
//!
//! Every suite (table verification, named identity checks, span/closure
//! checks, ansatz verification, solution residuals, finite
//! transformations) produces small serializable records collected into a
//! [`RunReport`]. The same records drive both the JSON output (stable
//! field order, byte-identical for identical configuration) and the text
//! rendering, so the two modes can never disagree on pass/fail.
//!
//! Status vocabulary:
//! * `pass` / `fail` — the ordinary outcomes;
//! * `pass_with_warning` — a printed identity flagged suspect failed as
//!   printed, while the corrected form verified; the computed value is
//!   reported;
//! * `expected_failure` — an identity that is supposed to fail in the
//!   given configuration (e.g. a supercharge closure without its parameter
//!   shift, or a span check expected to land outside the span) did fail;
//! * `unexpected_pass` — the converse, counted as a failure.

use serde::Serialize;

/// True when the status string counts as a failure for exit-code purposes.
pub fn is_failure(status: &str) -> bool {
    matches!(status, "fail" | "unexpected_pass" | "mismatch" | "not_in_span")
}

#[derive(Serialize, Clone, Default, Debug)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
}

impl Summary {
    pub fn absorb(&mut self, status: &str) {
        self.total += 1;
        if is_failure(status) {
            self.failed += 1;
        } else {
            self.passed += 1;
            if status == "pass_with_warning" {
                self.warnings += 1;
            }
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct CellReport {
    pub i: usize,
    pub j: usize,
    /// bracket kind used: `commutator` | `anticommutator`
    pub kind: String,
    /// `match` | `mismatch` | `not_in_span` | `pass_with_warning`
    pub status: String,
    pub expected: String,
    pub computed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct TableReport {
    pub model: String,
    pub table: String,
    pub cells: Vec<CellReport>,
    pub summary: Summary,
}

#[derive(Serialize, Clone, Debug)]
pub struct CheckReport {
    pub model: String,
    pub name: String,
    pub kind: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SpanReport {
    pub model: String,
    pub name: String,
    pub status: String,
    pub expect_in_span: bool,
    pub in_span: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct ClosureReport {
    pub model: String,
    pub basis: Vec<String>,
    pub closed: bool,
    /// pairs whose bracket fell outside the span
    pub outside: Vec<String>,
    pub jacobi_checked: usize,
    pub jacobi_failures: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct AnsatzCheckReport {
    pub model: String,
    pub variant: String,
    pub equations: usize,
    pub failures: Vec<String>,
    pub conjugate_ok: bool,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SolutionCheckReport {
    pub model: String,
    pub generator: String,
    pub solution: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct FiniteCheckReport {
    pub model: String,
    pub transformation: String,
    pub solution: String,
    pub lambda: f64,
    pub residual: f64,
    pub floor: f64,
    pub group_law: f64,
    pub consistency: f64,
    pub status: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct DeriveReport {
    pub model: String,
    pub order: u32,
    pub equations: Vec<String>,
    pub jet_independence: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
#[serde(tag = "type")]
pub enum Section {
    Table(TableReport),
    Check(CheckReport),
    Span(SpanReport),
    Closure(ClosureReport),
    Ansatz(AnsatzCheckReport),
    Solution(SolutionCheckReport),
    Finite(FiniteCheckReport),
    Derive(DeriveReport),
}

impl Section {
    pub fn failed(&self) -> bool {
        match self {
            Section::Table(t) => t.summary.failed > 0,
            Section::Check(c) => is_failure(&c.status),
            Section::Span(s) => is_failure(&s.status),
            Section::Closure(c) => !c.closed || !c.jacobi_failures.is_empty(),
            Section::Ansatz(a) => is_failure(&a.status),
            Section::Solution(s) => is_failure(&s.status),
            Section::Finite(f) => is_failure(&f.status),
            Section::Derive(_) => false,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Section::Table(t) => {
                let mut out = format!(
                    "table {}: {}/{} cells match",
                    t.table, t.summary.passed, t.summary.total
                );
                for c in &t.cells {
                    if c.status != "match" {
                        out.push_str(&format!(
                            "\n  [{},{}] {} {}: expected {}, computed {}{}",
                            c.i,
                            c.j,
                            c.kind,
                            c.status,
                            c.expected,
                            c.computed,
                            c.warning
                                .as_ref()
                                .map(|w| format!(" ({w})"))
                                .unwrap_or_default()
                        ));
                    }
                }
                out
            }
            Section::Check(c) => format!(
                "check {} [{}]: {}{}",
                c.name,
                c.kind,
                c.status,
                c.detail.as_ref().map(|d| format!(" — {d}")).unwrap_or_default()
            ),
            Section::Span(s) => format!(
                "span {}: {} (in_span={}, expected in_span={}){}",
                s.name,
                s.status,
                s.in_span,
                s.expect_in_span,
                s.expansion
                    .as_ref()
                    .map(|e| format!(" — {e}"))
                    .unwrap_or_default()
            ),
            Section::Closure(c) => {
                let mut out = format!(
                    "closure over {{{}}}: {} (jacobi triples checked: {})",
                    c.basis.join(", "),
                    if c.closed { "closed" } else { "not closed" },
                    c.jacobi_checked
                );
                for p in &c.outside {
                    out.push_str(&format!("\n  outside span: {p}"));
                }
                for f in &c.jacobi_failures {
                    out.push_str(&format!("\n  jacobi failure: {f}"));
                }
                out
            }
            Section::Ansatz(a) => format!(
                "ansatz {}: {} ({} determining equations, {} failures, conjugate cross-check {}){}",
                a.variant,
                a.status,
                a.equations,
                a.failures.len(),
                if a.conjugate_ok { "ok" } else { "failed" },
                a.detail.as_ref().map(|d| format!(" — {d}")).unwrap_or_default()
            ),
            Section::Solution(s) => format!(
                "generator {} on {}: residual {:.3e} (tol {:.1e}) — {}",
                s.generator, s.solution, s.residual, s.tolerance, s.status
            ),
            Section::Finite(f) => format!(
                "finite {} on {} (λ={}): residual {:.3e} (floor {:.3e}), group law {:.3e}, generator consistency {:.3e} — {}",
                f.transformation, f.solution, f.lambda, f.residual, f.floor, f.group_law, f.consistency, f.status
            ),
            Section::Derive(d) => {
                let mut out = format!(
                    "{} determining equations at order {} ({} jet-independence notes)",
                    d.equations.len(),
                    d.order,
                    d.jet_independence.len()
                );
                for e in &d.equations {
                    out.push_str("\n  ");
                    out.push_str(e);
                    out.push_str(" = 0");
                }
                out
            }
        }
    }
}

/// Top-level report for one CLI invocation.
#[derive(Serialize, Clone, Debug)]
pub struct RunReport {
    pub model: String,
    pub command: String,
    pub seed: u64,
    pub trials: u32,
    pub sections: Vec<Section>,
    pub summary: Summary,
}

impl RunReport {
    pub fn new(model: &str, command: &str, seed: u64, trials: u32) -> Self {
        RunReport {
            model: model.into(),
            command: command.into(),
            seed,
            trials,
            sections: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn push(&mut self, s: Section) {
        self.summary.total += 1;
        if s.failed() {
            self.summary.failed += 1;
        } else {
            self.summary.passed += 1;
        }
        self.sections.push(s);
    }

    pub fn ok(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "model {} — {} (seed {}, trials {})\n",
            self.model, self.command, self.seed, self.trials
        );
        for s in &self.sections {
            out.push_str(&s.render());
            out.push('\n');
        }
        out.push_str(&format!(
            "summary: {}/{} sections passed{}\n",
            self.summary.passed,
            self.summary.total,
            if self.summary.failed > 0 { " — FAIL" } else { "" }
        ));
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
