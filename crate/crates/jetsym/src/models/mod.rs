//! Built-in model catalog: the supersymmetric oscillator, the 2D Pauli
//! system, the Jaynes–Cummings model and its generalized two-level
//! extensions, each packaged as an immutable [`ModelSpec`].
//!
//! # Overview
//!
//! A model bundles
//! * the coupled Schrödinger-type evolution system (as a Hamiltonian
//!   operator plus a grading operator),
//! * solution-space realizations of its symmetry generators, auxiliary
//!   building blocks (ladder operators, raising/lowering matrices),
//!   product-defined supercharges and named linear combinations,
//! * expected structure-constant tables as printed in the source material,
//!   including cells flagged `suspect` where antisymmetry or a direct
//!   bracket contradicts the printed value (the verifier reports the
//!   computed value instead of failing),
//! * algebraic identity checks, span (closure) checks, exact solutions and
//!   the symmetry-ansatz data used by the determining-equation verifier.
//!
//! Composite frequencies (`w = e*B/(2M)`, `wt = e*B/M`, …) and the coupling
//! `kappa` are stored as *definitions*: substitution rules into primitive
//! parameters, applied uniformly before any numeric evaluation so that
//! coefficients mixing both spellings evaluate consistently.
//!
//! Generators are stored in their solution-space form: free of `Dt`, with
//! any explicit time dependence in the coefficients. On the solution space
//! the plain (anti)commutator of two such reduced symmetries again agrees
//! with the reduced bracket of the dynamical operators, so the structure
//! tables hold as exact operator identities for the stored forms.

pub mod schema;
mod jc;
mod oscillator;
mod pauli;

pub use jc::{jc, jc_generalized, jc_standard_susy};
pub use schema::{export_model, load_model, load_model_str};
pub use oscillator::susy_oscillator;
pub use pauli::pauli_2d;

use crate::expr::eval::{is_zero, OracleCfg};
use crate::expr::parser::SymbolContext;
use crate::expr::{Atom, CoordId, Expr, ParamSym};
use crate::operator::{GradedGenerator, MatrixDiffOp, OpError, Parity};
use crate::prolong::{
    collect_determining, invariance_residual, AnsatzSolution, DeterminingSystem, JetVectorField,
    PDESystem,
};
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error("unknown generator `{0}` in model `{1}`")]
    UnknownGenerator(String, String),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Eval(#[from] crate::expr::eval::EvalError),
    #[error("model validation failed: {0}")]
    Validation(String),
    #[error("model file error at {path}: {message}")]
    Schema { path: String, message: String },
}

/// A primitive model parameter.
#[derive(Debug, Clone)]
pub struct ParamDef {
    pub name: String,
    pub complex: bool,
    /// documented positivity assumption (sampling already draws positives)
    pub positive: bool,
}

/// A named substitution `name -> rhs` with `rhs` in primitive parameters
/// only. Complex definitions also bind the conjugate symbol to `conj(rhs)`.
#[derive(Debug, Clone)]
pub struct Definition {
    pub name: String,
    pub complex: bool,
    pub rhs: Expr,
}

/// A generator defined as a scaled composition of registry entries
/// (e.g. a supercharge `Q- = sqrt(wt) * Acal ∘ T-`).
#[derive(Debug, Clone)]
pub struct ProductDef {
    pub name: String,
    pub factors: Vec<String>,
    pub scale: Expr,
}

/// A generator defined as a linear combination of registry entries.
#[derive(Debug, Clone)]
pub struct SumDef {
    pub name: String,
    pub terms: Vec<(Expr, String)>,
}

/// One expected cell of a structure table. Missing cells mean zero.
#[derive(Debug, Clone)]
pub struct TableCell {
    pub row: usize,
    pub col: usize,
    /// expected value as a combination `Σ coeff * generator`
    pub expected: Vec<(Expr, String)>,
    /// set when the printed value contradicts antisymmetry or the direct
    /// bracket; the verifier reports the computed value and passes with a
    /// warning
    pub suspect: Option<String>,
}

/// An expected table of (anti)commutators. `graded` selects the bracket
/// kind per cell from the parities of the pair; otherwise every cell is a
/// plain commutator.
#[derive(Debug, Clone)]
pub struct StructureTable {
    pub name: String,
    pub description: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub graded: bool,
    pub cells: Vec<TableCell>,
}

impl StructureTable {
    pub fn cell(&self, row: usize, col: usize) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.row == row && c.col == col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Commutator,
    Anticommutator,
    /// `a ∘ a = expected` (nilpotency when `expected` is empty)
    Square,
    /// `i ∂A/∂t - [H, A] = expected` — the symmetry condition for an
    /// operator family with explicit time dependence
    SymmetryResidual,
    /// `a = expected` as operators
    Equals,
}

/// A single named algebraic identity.
#[derive(Debug, Clone)]
pub struct AlgCheck {
    pub name: String,
    pub kind: CheckKind,
    pub a: String,
    pub b: Option<String>,
    pub expected: Vec<(Expr, String)>,
    /// identity only holds after the model's parameter shift is applied
    pub requires_shift: bool,
    /// printed form contradicted by computation; `corrected` then holds the
    /// combination that actually verifies
    pub suspect: Option<String>,
    pub corrected: Option<Vec<(Expr, String)>>,
}

/// Expand (or fail to expand) a target operator over a named basis. The
/// target is `target` itself, `target ∘ target` when `square` is set, or
/// the anticommutator `{target, partner}` when `partner` is set.
#[derive(Debug, Clone)]
pub struct SpanCheck {
    pub name: String,
    pub target: String,
    pub partner: Option<String>,
    pub square: bool,
    pub basis: Vec<String>,
    pub expect_in_span: bool,
}

/// An exact solution: one expression per component, explicit time phases
/// included.
#[derive(Debug, Clone)]
pub struct SolutionDef {
    pub name: String,
    pub components: Vec<Expr>,
}

/// A variant of the symmetry ansatz (e.g. constant mixing functions).
#[derive(Debug, Clone)]
pub struct AnsatzVariant {
    pub name: String,
    pub solution: AnsatzSolution,
    /// variant verifies exactly when the two named parameters are equal
    pub pass_iff_equal: Option<(String, String)>,
}

/// Symmetry-ansatz package: the generic unknown-coefficient vector field,
/// the closed-form solution of the determining equations and its variants.
#[derive(Debug, Clone)]
pub struct ModelAnsatz {
    pub delta_count: usize,
    /// prolongation order used for the derivation
    pub order: u32,
    pub field: JetVectorField,
    pub solution: AnsatzSolution,
    pub variants: Vec<AnsatzVariant>,
}

/// A fully populated model. Immutable after construction; shareable.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub coords: Vec<CoordId>,
    pub dim: usize,
    pub params: Vec<ParamDef>,
    pub definitions: Vec<Definition>,
    /// parameters pinned to a numeric value during oracle evaluation
    /// (e.g. `pi`, or a numeric phase angle)
    pub fixed_params: Vec<(String, f64)>,
    pub hamiltonian: MatrixDiffOp,
    pub grading: MatrixDiffOp,
    /// the symmetry generators proper (the X's)
    pub generators: Vec<GradedGenerator>,
    /// auxiliary named operators (Hamiltonian pieces, ladder operators, …)
    pub aux_ops: Vec<GradedGenerator>,
    pub products: Vec<ProductDef>,
    pub sums: Vec<SumDef>,
    pub tables: Vec<StructureTable>,
    pub checks: Vec<AlgCheck>,
    pub span_checks: Vec<SpanCheck>,
    pub solutions: Vec<SolutionDef>,
    pub ansatz: Option<ModelAnsatz>,
    /// parameter substitution required by some supersymmetry identities
    pub shift: Option<Definition>,
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "susy_oscillator",
    "pauli_2d",
    "jc",
    "jc_generalized",
    "jc_standard_susy",
];

/// Construct a built-in model by id. `jc_generalized` defaults to phase 0;
/// use [`jc_generalized`] directly for a deformed phase.
pub fn builtin(name: &str) -> Result<ModelSpec, ModelError> {
    match name {
        "susy_oscillator" => Ok(susy_oscillator()),
        "pauli_2d" => Ok(pauli_2d()),
        "jc" => Ok(jc()),
        "jc_generalized" => Ok(jc_generalized(0.0)),
        "jc_standard_susy" => Ok(jc_standard_susy()),
        other => Err(ModelError::Unknown(other.to_string())),
    }
}

fn param_atom(name: &str, complex: bool, conj: bool) -> Atom {
    Atom::Param(ParamSym { name: name.to_string(), complex, conj })
}

impl ModelSpec {
    /// Parser context covering all declared parameters and definitions.
    pub fn symbol_context(&self) -> SymbolContext {
        let mut ctx = SymbolContext::new();
        for p in &self.params {
            ctx.add_param(&p.name, p.complex);
        }
        for d in &self.definitions {
            ctx.add_param(&d.name, d.complex);
        }
        for (n, _) in &self.fixed_params {
            ctx.add_param(n, false);
        }
        ctx
    }

    /// Apply (optionally) the model shift, then every definition, mapping
    /// an expression into primitive parameters.
    pub fn resolve(&self, e: &Expr, shifted: bool) -> Expr {
        let mut m = BTreeMap::new();
        for d in &self.definitions {
            m.insert(param_atom(&d.name, d.complex, false), d.rhs.clone());
            if d.complex {
                m.insert(param_atom(&d.name, true, true), d.rhs.conj());
            }
        }
        let mut cur = e.substitute(&m);
        // the shift rewrites a primitive parameter, so it must run after
        // the definitions (which may mention that parameter in their
        // right-hand sides) have been expanded
        if shifted {
            if let Some(sh) = &self.shift {
                let mut m = BTreeMap::new();
                m.insert(param_atom(&sh.name, sh.complex, false), sh.rhs.clone());
                if sh.complex {
                    m.insert(param_atom(&sh.name, true, true), sh.rhs.conj());
                }
                cur = cur.substitute(&m);
            }
        }
        cur
    }

    pub fn resolve_op(&self, op: &MatrixDiffOp, shifted: bool) -> MatrixDiffOp {
        op.map_coeffs(&|f| self.resolve(f, shifted))
    }

    /// Oracle configuration with the model's pinned parameter values.
    pub fn oracle_cfg(&self, seed: u64, trials: u32) -> OracleCfg {
        let mut cfg = OracleCfg::new(seed, trials);
        for (name, v) in &self.fixed_params {
            cfg.fixed
                .insert(param_atom(name, false, false), Complex64::new(*v, 0.0));
        }
        cfg
    }

    /// All named operators: auxiliaries, generators, products and sums.
    pub fn registry(&self) -> Result<BTreeMap<String, GradedGenerator>, ModelError> {
        let mut reg: BTreeMap<String, GradedGenerator> = BTreeMap::new();
        for g in self.aux_ops.iter().chain(self.generators.iter()) {
            reg.insert(g.name.clone(), g.clone());
        }
        for pd in &self.products {
            let mut op = MatrixDiffOp::identity(self.dim);
            let mut parity = Parity::Even;
            for f in &pd.factors {
                let g = reg.get(f).ok_or_else(|| {
                    ModelError::UnknownGenerator(f.clone(), self.name.clone())
                })?;
                op = op.compose(&g.op)?;
                parity = combine_parity(parity, g.parity);
            }
            op = op.scale(&pd.scale);
            reg.insert(
                pd.name.clone(),
                GradedGenerator { name: pd.name.clone(), op, parity },
            );
        }
        for sd in &self.sums {
            let mut op = MatrixDiffOp::zero(self.dim);
            let mut parity: Option<Parity> = None;
            for (c, n) in &sd.terms {
                let g = reg.get(n).ok_or_else(|| {
                    ModelError::UnknownGenerator(n.clone(), self.name.clone())
                })?;
                op = op.add(&g.op.scale(c));
                parity = Some(match parity {
                    None => g.parity,
                    Some(p) if p == g.parity => p,
                    Some(_) => Parity::Unclassified,
                });
            }
            reg.insert(
                sd.name.clone(),
                GradedGenerator {
                    name: sd.name.clone(),
                    op,
                    parity: parity.unwrap_or(Parity::Even),
                },
            );
        }
        Ok(reg)
    }

    /// Realize a linear combination of registry entries (unresolved
    /// coefficients; resolve at the zero-test boundary).
    pub fn combo(
        &self,
        reg: &BTreeMap<String, GradedGenerator>,
        terms: &[(Expr, String)],
    ) -> Result<MatrixDiffOp, ModelError> {
        let mut op = MatrixDiffOp::zero(self.dim);
        for (c, n) in terms {
            let g = reg
                .get(n)
                .ok_or_else(|| ModelError::UnknownGenerator(n.clone(), self.name.clone()))?;
            op = op.add(&g.op.scale(c));
        }
        Ok(op)
    }

    /// Determining system of `field` over the model's evolution system:
    /// prolong to `order`, reduce on-shell, collect the coefficients of
    /// derivative-jet monomials. Operator coefficients are resolved to
    /// primitive parameters first so the zero oracle samples
    /// consistently.
    pub fn determining(&self, field: &JetVectorField, order: u32) -> DeterminingSystem {
        let h = self.resolve_op(&self.hamiltonian, false);
        let sys = PDESystem::from_hamiltonian(&h, self.coords.clone());
        let residuals = invariance_residual(field, &sys, order);
        collect_determining(&residuals)
    }

    /// An ansatz solution with definition parameters resolved to
    /// primitives, ready for [`crate::prolong::verify_ansatz`].
    pub fn resolve_ansatz(&self, s: &AnsatzSolution) -> AnsatzSolution {
        AnsatzSolution {
            bindings: s
                .bindings
                .iter()
                .map(|(u, e)| (u.clone(), self.resolve(e, false)))
                .collect(),
            free_functions: s
                .free_functions
                .iter()
                .map(|(u, v)| (u.clone(), v.iter().map(|e| self.resolve(e, false)).collect()))
                .collect(),
            conjugate_pairs: s.conjugate_pairs.clone(),
        }
    }

    /// `i ∂t Ψ − H Ψ` for an explicit solution vector; all components must
    /// pass the zero oracle.
    pub fn solution_residuals(&self, sol: &SolutionDef) -> Vec<Expr> {
        let h = self.resolve_op(&self.hamiltonian, false);
        let comps: Vec<Expr> = sol.components.iter().map(|c| self.resolve(c, false)).collect();
        let hpsi = h.apply(&comps).expect("dimension checked at build");
        comps
            .iter()
            .zip(hpsi)
            .map(|(c, hc)| Expr::i().mul(&c.diff_coord(CoordId::T)).sub(&hc))
            .collect()
    }

    /// Structural invariants: the grading squares to the identity and the
    /// Hamiltonian annihilates every stored exact solution.
    pub fn validate(&self, cfg: &OracleCfg) -> Result<(), ModelError> {
        let g2 = self
            .grading
            .compose(&self.grading)?
            .sub(&MatrixDiffOp::identity(self.dim));
        if let Some((r, c, _, w)) = self.resolve_op(&g2, false).is_zero_op(cfg)? {
            return Err(ModelError::Validation(format!(
                "grading does not square to the identity at entry ({r},{c}): {w}"
            )));
        }
        for (k, sol) in self.solutions.iter().enumerate() {
            if sol.components.len() != self.dim {
                return Err(ModelError::Validation(format!(
                    "solution `{}` has {} components, expected {}",
                    sol.name,
                    sol.components.len(),
                    self.dim
                )));
            }
            for (c, res) in self.solution_residuals(sol).iter().enumerate() {
                let z = is_zero(res, &cfg.derive(0x501 + 131 * k as u64 + c as u64))?;
                if !z.is_zero() {
                    return Err(ModelError::Validation(format!(
                        "solution `{}` fails the PDE residual in component {}: {}",
                        sol.name,
                        c + 1,
                        z.witness_string()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn combine_parity(a: Parity, b: Parity) -> Parity {
    match (a, b) {
        (Parity::Even, p) | (p, Parity::Even) => p,
        (Parity::Odd, Parity::Odd) => Parity::Even,
        _ => Parity::Unclassified,
    }
}

/// Exact solution families at excitation level `n` (`n <= 3`), built by
/// symbolically applying creation operators to the ground state. Every
/// returned vector is gated through the PDE-residual oracle.
pub fn exact_solutions(m: &ModelSpec, n: u32) -> Result<Vec<SolutionDef>, ModelError> {
    assert!(n <= 3, "excitation level capped at 3");
    let sols = match m.name.as_str() {
        "susy_oscillator" => oscillator::solutions_at(n),
        "pauli_2d" => pauli::solutions_at(n),
        "jc" => jc::solutions_at(n),
        "jc_generalized" => {
            let phased = m.fixed_params.iter().any(|(k, v)| k == "phi" && *v != 0.0);
            jc::gen_solutions_at(n, phased)
        }
        "jc_standard_susy" => jc::standard_susy_solutions_at(n),
        other => return Err(ModelError::Unknown(other.to_string())),
    };
    let cfg = m.oracle_cfg(42, 20);
    for (k, sol) in sols.iter().enumerate() {
        let sd = SolutionDef { name: sol.name.clone(), components: sol.components.clone() };
        for (c, res) in m.solution_residuals(&sd).iter().enumerate() {
            let z = is_zero(res, &cfg.derive(0x50_15 + 17 * k as u64 + c as u64))?;
            if !z.is_zero() {
                return Err(ModelError::Validation(format!(
                    "constructed solution `{}` fails the PDE residual in component {}: {}",
                    sol.name,
                    c + 1,
                    z.witness_string()
                )));
            }
        }
    }
    Ok(sols)
}

// ---- shared construction helpers -------------------------------------

pub(crate) fn tc() -> Expr {
    Expr::coord(CoordId::T)
}
pub(crate) fn xc() -> Expr {
    Expr::coord(CoordId::X)
}
pub(crate) fn yc() -> Expr {
    Expr::coord(CoordId::Y)
}

/// `exp(i k f t)` — the ubiquitous rotating phase.
pub(crate) fn phase(k: i64, freq: &Expr) -> Expr {
    Expr::exp(Expr::i().mul(&Expr::int(k)).mul(freq).mul(&tc()))
}

/// Physicists' Hermite polynomial `H_n(z)` by the recurrence
/// `H_{n+1} = 2 z H_n - 2 n H_{n-1}`.
pub(crate) fn hermite(n: u32, z: &Expr) -> Expr {
    let two_z = Expr::int(2).mul(z);
    let mut prev = Expr::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two_z.clone();
    for k in 1..n {
        let next = two_z.mul(&cur).sub(&Expr::int(2 * k as i64).mul(&prev));
        prev = cur;
        cur = next;
    }
    cur
}

pub(crate) fn cterms(v: Vec<(Expr, &str)>) -> Vec<(Expr, String)> {
    v.into_iter().map(|(e, n)| (e, n.to_string())).collect()
}

pub(crate) fn cell(row: usize, col: usize, expected: Vec<(Expr, &str)>) -> TableCell {
    TableCell { row, col, expected: cterms(expected), suspect: None }
}

pub(crate) fn scell(
    row: usize,
    col: usize,
    expected: Vec<(Expr, &str)>,
    note: &str,
) -> TableCell {
    TableCell { row, col, expected: cterms(expected), suspect: Some(note.to_string()) }
}

pub(crate) fn ck(
    name: &str,
    kind: CheckKind,
    a: &str,
    b: Option<&str>,
    expected: Vec<(Expr, &str)>,
) -> AlgCheck {
    AlgCheck {
        name: name.to_string(),
        kind,
        a: a.to_string(),
        b: b.map(str::to_string),
        expected: cterms(expected),
        requires_shift: false,
        suspect: None,
        corrected: None,
    }
}

pub(crate) fn even(name: &str, op: MatrixDiffOp) -> GradedGenerator {
    GradedGenerator { name: name.to_string(), op, parity: Parity::Even }
}
pub(crate) fn odd(name: &str, op: MatrixDiffOp) -> GradedGenerator {
    GradedGenerator { name: name.to_string(), op, parity: Parity::Odd }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_generator_counts() {
        assert_eq!(builtin("susy_oscillator").unwrap().generators.len(), 13);
        assert_eq!(builtin("pauli_2d").unwrap().generators.len(), 16);
        assert_eq!(builtin("jc").unwrap().generators.len(), 6);
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            let cfg = m.oracle_cfg(42, 20);
            m.validate(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn registries_resolve() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            let reg = m.registry().unwrap();
            assert!(!reg.is_empty());
            for t in &m.tables {
                for n in t.rows.iter().chain(&t.cols) {
                    assert!(reg.contains_key(n), "{name}: missing {n}");
                }
                for cell in &t.cells {
                    for (_, n) in &cell.expected {
                        assert!(reg.contains_key(n), "{name}: missing {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn declared_parities_match_grading() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            let cfg = m.oracle_cfg(42, 8);
            let reg = m.registry().unwrap();
            for g in reg.values() {
                let got = m
                    .resolve_op(&g.op, false)
                    .classify_parity(&m.grading, &cfg)
                    .unwrap();
                assert_eq!(got, g.parity, "{name}: parity of {}", g.name);
            }
        }
    }

    #[test]
    fn exact_solutions_levels() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            for n in 0..=3 {
                let sols = exact_solutions(&m, n).unwrap_or_else(|e| panic!("{name} n={n}: {e}"));
                assert!(!sols.is_empty());
            }
        }
    }

    #[test]
    fn hermite_first_four() {
        let z = xc();
        assert_eq!(hermite(0, &z), Expr::one());
        assert_eq!(hermite(1, &z), Expr::int(2).mul(&z));
        assert_eq!(
            hermite(2, &z),
            Expr::int(4).mul(&z).mul(&z).sub(&Expr::int(2))
        );
        assert_eq!(
            hermite(3, &z),
            Expr::int(8).mul(&z.pow(3)).sub(&Expr::int(12).mul(&z))
        );
    }
}
