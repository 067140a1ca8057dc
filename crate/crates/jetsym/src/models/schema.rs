//! JSON serialization of model specifications.
//!
//! # Overview
//!
//! A model file is a tree-structured JSON document with sections
//! `coordinates`, `dependents` (with `conjugate_of` links), `parameters`
//! (positivity flags and definition substitutions), `equations`
//! (expression strings, regenerated from the Hamiltonian on export),
//! `hamiltonian` / `grading` (operator strings), `generators`
//! `[{name, parity, op}]`, `products`, `sums`, `tables`, `checks`,
//! `span_checks`, `solutions` and `ansatz`.
//!
//! Expressions and operators are stored in their canonical text form,
//! which round-trips through the parser, so
//! `export(load(export(m))) == export(m)` byte for byte. [`load_model`]
//! re-runs the model invariants (grading squares to the identity, every
//! listed solution passes the PDE-residual oracle) before returning.

use super::*;
use crate::expr::parser::parse;
use crate::expr::{JetSym, UArg, Unknown};
use crate::prolong::PDESystem;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct DependentDoc {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    conjugate_of: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ParamDoc {
    name: String,
    complex: bool,
    positive: bool,
}

#[derive(Serialize, Deserialize)]
struct DefinitionDoc {
    name: String,
    complex: bool,
    rhs: String,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    name: String,
    parity: String,
    op: String,
}

#[derive(Serialize, Deserialize)]
struct ProductDoc {
    name: String,
    factors: Vec<String>,
    scale: String,
}

#[derive(Serialize, Deserialize)]
struct SumDoc {
    name: String,
    terms: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct TableCellDoc {
    row: usize,
    col: usize,
    expected: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    suspect: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    name: String,
    description: String,
    rows: Vec<String>,
    cols: Vec<String>,
    graded: bool,
    cells: Vec<TableCellDoc>,
}

#[derive(Serialize, Deserialize)]
struct CheckDoc {
    name: String,
    kind: String,
    a: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<String>,
    expected: Vec<(String, String)>,
    requires_shift: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    suspect: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrected: Option<Vec<(String, String)>>,
}

#[derive(Serialize, Deserialize)]
struct SpanCheckDoc {
    name: String,
    target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    partner: Option<String>,
    square: bool,
    basis: Vec<String>,
    expect_in_span: bool,
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    name: String,
    components: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct UnknownDoc {
    name: String,
    args: Vec<String>,
    real: bool,
}

#[derive(Serialize, Deserialize)]
struct FreeFunctionDoc {
    name: String,
    instances: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct AnsatzSolutionDoc {
    bindings: Vec<(String, String)>,
    free_functions: Vec<FreeFunctionDoc>,
    conjugate_pairs: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct VariantDoc {
    name: String,
    solution: AnsatzSolutionDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass_iff_equal: Option<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct AnsatzDoc {
    delta_count: usize,
    order: u32,
    unknowns: Vec<UnknownDoc>,
    xi: Vec<String>,
    phi: Vec<String>,
    solution: AnsatzSolutionDoc,
    variants: Vec<VariantDoc>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    name: String,
    coordinates: Vec<String>,
    dependents: Vec<DependentDoc>,
    parameters: Vec<ParamDoc>,
    definitions: Vec<DefinitionDoc>,
    fixed_params: Vec<(String, f64)>,
    equations: Vec<String>,
    hamiltonian: String,
    grading: String,
    generators: Vec<GeneratorDoc>,
    aux_ops: Vec<GeneratorDoc>,
    products: Vec<ProductDoc>,
    sums: Vec<SumDoc>,
    tables: Vec<TableDoc>,
    checks: Vec<CheckDoc>,
    span_checks: Vec<SpanCheckDoc>,
    solutions: Vec<SolutionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ansatz: Option<AnsatzDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<DefinitionDoc>,
}

fn parity_str(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Unclassified => "unclassified",
    }
}

fn kind_str(k: CheckKind) -> &'static str {
    match k {
        CheckKind::Commutator => "commutator",
        CheckKind::Anticommutator => "anticommutator",
        CheckKind::Square => "square",
        CheckKind::SymmetryResidual => "symmetry_residual",
        CheckKind::Equals => "equals",
    }
}

fn terms_doc(t: &[(Expr, String)]) -> Vec<(String, String)> {
    t.iter().map(|(c, n)| (c.to_string(), n.clone())).collect()
}

fn gen_doc(g: &GradedGenerator) -> GeneratorDoc {
    GeneratorDoc {
        name: g.name.clone(),
        parity: parity_str(g.parity).into(),
        op: g.op.print(),
    }
}

fn def_doc(d: &Definition) -> DefinitionDoc {
    DefinitionDoc { name: d.name.clone(), complex: d.complex, rhs: d.rhs.to_string() }
}

fn uarg_str(a: &UArg) -> String {
    match a {
        UArg::Coord(c) => c.name().to_string(),
        UArg::Jet(j) => j.name(),
    }
}

fn unknown_doc(u: &Unknown) -> UnknownDoc {
    UnknownDoc {
        name: u.name.clone(),
        args: u.args.iter().map(uarg_str).collect(),
        real: u.real,
    }
}

fn ansatz_doc(a: &ModelAnsatz) -> AnsatzDoc {
    let mut unknowns: Vec<UnknownDoc> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut push = |u: &Unknown, unknowns: &mut Vec<UnknownDoc>| {
        if seen.insert(u.name.clone()) {
            unknowns.push(unknown_doc(u));
        }
    };
    for (u, _) in &a.solution.bindings {
        push(u, &mut unknowns);
    }
    for (u, _) in &a.solution.free_functions {
        push(u, &mut unknowns);
    }
    AnsatzDoc {
        delta_count: a.delta_count,
        order: a.order,
        unknowns,
        xi: a.field.xi.iter().map(|e| e.to_string()).collect(),
        phi: a.field.phi.iter().map(|e| e.to_string()).collect(),
        solution: ansatz_solution_doc(&a.solution),
        variants: a
            .variants
            .iter()
            .map(|v| VariantDoc {
                name: v.name.clone(),
                solution: ansatz_solution_doc(&v.solution),
                pass_iff_equal: v.pass_iff_equal.clone(),
            })
            .collect(),
    }
}

fn ansatz_solution_doc(s: &AnsatzSolution) -> AnsatzSolutionDoc {
    AnsatzSolutionDoc {
        bindings: s
            .bindings
            .iter()
            .map(|(u, e)| (u.name.clone(), e.to_string()))
            .collect(),
        free_functions: s
            .free_functions
            .iter()
            .map(|(u, inst)| FreeFunctionDoc {
                name: u.name.clone(),
                instances: vec![inst.iter().map(|e| e.to_string()).collect()],
            })
            .collect(),
        conjugate_pairs: s.conjugate_pairs.clone(),
    }
}

/// Serialize a model to its JSON document form.
pub fn export_model(model: &ModelSpec) -> Result<String, ModelError> {
    let sys = PDESystem::from_hamiltonian(&model.hamiltonian, model.coords.clone());
    let mut dependents = Vec::new();
    for &(d, conj) in &sys.deps {
        let j = JetSym::base(d, conj);
        dependents.push(DependentDoc {
            name: j.name(),
            conjugate_of: conj.then(|| JetSym::base(d, false).name()),
        });
    }
    let doc = ModelDoc {
        name: model.name.clone(),
        coordinates: model.coords.iter().map(|c| c.name().to_string()).collect(),
        dependents,
        parameters: model
            .params
            .iter()
            .map(|p| ParamDoc { name: p.name.clone(), complex: p.complex, positive: p.positive })
            .collect(),
        definitions: model.definitions.iter().map(def_doc).collect(),
        fixed_params: model.fixed_params.clone(),
        equations: sys.equations.iter().map(|e| e.to_string()).collect(),
        hamiltonian: model.hamiltonian.print(),
        grading: model.grading.print(),
        generators: model.generators.iter().map(gen_doc).collect(),
        aux_ops: model.aux_ops.iter().map(gen_doc).collect(),
        products: model
            .products
            .iter()
            .map(|p| ProductDoc {
                name: p.name.clone(),
                factors: p.factors.clone(),
                scale: p.scale.to_string(),
            })
            .collect(),
        sums: model
            .sums
            .iter()
            .map(|s| SumDoc {
                name: s.name.clone(),
                terms: s.terms.iter().map(|(c, n)| (c.to_string(), n.clone())).collect(),
            })
            .collect(),
        tables: model
            .tables
            .iter()
            .map(|t| TableDoc {
                name: t.name.clone(),
                description: t.description.clone(),
                rows: t.rows.clone(),
                cols: t.cols.clone(),
                graded: t.graded,
                cells: t
                    .cells
                    .iter()
                    .map(|c| TableCellDoc {
                        row: c.row,
                        col: c.col,
                        expected: terms_doc(&c.expected),
                        suspect: c.suspect.clone(),
                    })
                    .collect(),
            })
            .collect(),
        checks: model
            .checks
            .iter()
            .map(|c| CheckDoc {
                name: c.name.clone(),
                kind: kind_str(c.kind).into(),
                a: c.a.clone(),
                b: c.b.clone(),
                expected: terms_doc(&c.expected),
                requires_shift: c.requires_shift,
                suspect: c.suspect.clone(),
                corrected: c.corrected.as_deref().map(terms_doc),
            })
            .collect(),
        span_checks: model
            .span_checks
            .iter()
            .map(|s| SpanCheckDoc {
                name: s.name.clone(),
                target: s.target.clone(),
                partner: s.partner.clone(),
                square: s.square,
                basis: s.basis.clone(),
                expect_in_span: s.expect_in_span,
            })
            .collect(),
        solutions: model
            .solutions
            .iter()
            .map(|s| SolutionDoc {
                name: s.name.clone(),
                components: s.components.iter().map(|e| e.to_string()).collect(),
            })
            .collect(),
        ansatz: model.ansatz.as_ref().map(ansatz_doc),
        shift: model.shift.as_ref().map(def_doc),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| ModelError::Schema {
        path: "<export>".into(),
        message: e.to_string(),
    })
}

struct Loader<'a> {
    path: &'a str,
    ctx: SymbolContext,
}

impl<'a> Loader<'a> {
    fn err(&self, at: &str, message: impl std::fmt::Display) -> ModelError {
        ModelError::Schema {
            path: format!("{}:{}", self.path, at),
            message: message.to_string(),
        }
    }
    fn expr(&self, at: &str, s: &str) -> Result<Expr, ModelError> {
        parse(s, &self.ctx).map_err(|e| self.err(at, e))
    }
    fn op(&self, at: &str, s: &str, dim: usize) -> Result<MatrixDiffOp, ModelError> {
        let op = MatrixDiffOp::parse_op(s, &self.ctx).map_err(|e| self.err(at, e))?;
        if op.dim() != dim {
            return Err(self.err(at, format!("operator is {}x{0}, expected {dim}x{dim}", op.dim())));
        }
        Ok(op)
    }
    fn terms(&self, at: &str, t: &[(String, String)]) -> Result<Vec<(Expr, String)>, ModelError> {
        t.iter()
            .map(|(c, n)| Ok((self.expr(at, c)?, n.clone())))
            .collect()
    }
    fn parity(&self, at: &str, s: &str) -> Result<Parity, ModelError> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            "unclassified" => Ok(Parity::Unclassified),
            other => Err(self.err(at, format!("unknown parity `{other}`"))),
        }
    }
    fn kind(&self, at: &str, s: &str) -> Result<CheckKind, ModelError> {
        match s {
            "commutator" => Ok(CheckKind::Commutator),
            "anticommutator" => Ok(CheckKind::Anticommutator),
            "square" => Ok(CheckKind::Square),
            "symmetry_residual" => Ok(CheckKind::SymmetryResidual),
            "equals" => Ok(CheckKind::Equals),
            other => Err(self.err(at, format!("unknown check kind `{other}`"))),
        }
    }
    fn uarg(&self, at: &str, s: &str) -> Result<UArg, ModelError> {
        for &c in &CoordId::ALL {
            if s == c.name() {
                return Ok(UArg::Coord(c));
            }
        }
        let (conj, rest) = match s.strip_prefix('c') {
            Some(r) => (true, r),
            None => (false, s),
        };
        if let Some(d) = rest.strip_prefix('u').and_then(|n| n.parse::<u8>().ok()) {
            return Ok(UArg::Jet(JetSym::base(d, conj)));
        }
        Err(self.err(at, format!("unknown ansatz argument `{s}`")))
    }
    fn ansatz_solution(
        &self,
        at: &str,
        doc: &AnsatzSolutionDoc,
        unknowns: &BTreeMap<String, Unknown>,
    ) -> Result<AnsatzSolution, ModelError> {
        let find = |n: &str| {
            unknowns
                .get(n)
                .cloned()
                .ok_or_else(|| self.err(at, format!("binding for undeclared unknown `{n}`")))
        };
        let mut bindings = Vec::new();
        for (n, e) in &doc.bindings {
            bindings.push((find(n)?, self.expr(at, e)?));
        }
        let mut free_functions = Vec::new();
        for f in &doc.free_functions {
            let inst = f
                .instances
                .first()
                .ok_or_else(|| self.err(at, format!("free function `{}` has no instance", f.name)))?;
            let exprs = inst
                .iter()
                .map(|e| self.expr(at, e))
                .collect::<Result<Vec<_>, _>>()?;
            free_functions.push((find(&f.name)?, exprs));
        }
        Ok(AnsatzSolution {
            bindings,
            free_functions,
            conjugate_pairs: doc.conjugate_pairs.clone(),
        })
    }
}

/// Parse and validate a model from its JSON document form. `path` is used
/// in error messages only.
pub fn load_model_str(text: &str, path: &str) -> Result<ModelSpec, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Schema {
        path: format!("{path}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;

    let mut coords = Vec::new();
    for c in &doc.coordinates {
        let found = CoordId::ALL.iter().find(|k| k.name() == c).copied();
        coords.push(found.ok_or_else(|| ModelError::Schema {
            path: format!("{path}:coordinates"),
            message: format!("unknown coordinate `{c}`"),
        })?);
    }
    let dim = doc.dependents.iter().filter(|d| d.conjugate_of.is_none()).count();

    let mut ctx = SymbolContext::new();
    for p in &doc.parameters {
        ctx.add_param(&p.name, p.complex);
    }
    for d in &doc.definitions {
        ctx.add_param(&d.name, d.complex);
    }
    for (n, _) in &doc.fixed_params {
        ctx.add_param(n, false);
    }
    let mut ldr = Loader { path, ctx };

    let definitions = doc
        .definitions
        .iter()
        .map(|d| {
            Ok(Definition {
                name: d.name.clone(),
                complex: d.complex,
                rhs: ldr.expr("definitions", &d.rhs)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let load_gens = |ldr: &Loader, at: &str, gens: &[GeneratorDoc]| {
        gens.iter()
            .map(|g| {
                Ok(GradedGenerator {
                    name: g.name.clone(),
                    parity: ldr.parity(at, &g.parity)?,
                    op: ldr.op(&format!("{at}.{}", g.name), &g.op, dim)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()
    };

    let hamiltonian = ldr.op("hamiltonian", &doc.hamiltonian, dim)?;
    let grading = ldr.op("grading", &doc.grading, dim)?;
    let generators = load_gens(&ldr, "generators", &doc.generators)?;
    let aux_ops = load_gens(&ldr, "aux_ops", &doc.aux_ops)?;

    let products = doc
        .products
        .iter()
        .map(|p| {
            Ok(ProductDef {
                name: p.name.clone(),
                factors: p.factors.clone(),
                scale: ldr.expr("products", &p.scale)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let sums = doc
        .sums
        .iter()
        .map(|s| {
            Ok(SumDef {
                name: s.name.clone(),
                terms: s
                    .terms
                    .iter()
                    .map(|(c, n)| Ok((ldr.expr("sums", c)?, n.clone())))
                    .collect::<Result<Vec<_>, ModelError>>()?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let tables = doc
        .tables
        .iter()
        .map(|t| {
            Ok(StructureTable {
                name: t.name.clone(),
                description: t.description.clone(),
                rows: t.rows.clone(),
                cols: t.cols.clone(),
                graded: t.graded,
                cells: t
                    .cells
                    .iter()
                    .map(|c| {
                        Ok(TableCell {
                            row: c.row,
                            col: c.col,
                            expected: ldr.terms(&format!("tables.{}", t.name), &c.expected)?,
                            suspect: c.suspect.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let checks = doc
        .checks
        .iter()
        .map(|c| {
            let at = format!("checks.{}", c.name);
            Ok(AlgCheck {
                name: c.name.clone(),
                kind: ldr.kind(&at, &c.kind)?,
                a: c.a.clone(),
                b: c.b.clone(),
                expected: ldr.terms(&at, &c.expected)?,
                requires_shift: c.requires_shift,
                suspect: c.suspect.clone(),
                corrected: c
                    .corrected
                    .as_ref()
                    .map(|t| ldr.terms(&at, t))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let span_checks = doc
        .span_checks
        .iter()
        .map(|s| SpanCheck {
            name: s.name.clone(),
            target: s.target.clone(),
            partner: s.partner.clone(),
            square: s.square,
            basis: s.basis.clone(),
            expect_in_span: s.expect_in_span,
        })
        .collect();
    let solutions = doc
        .solutions
        .iter()
        .map(|s| {
            Ok(SolutionDef {
                name: s.name.clone(),
                components: s
                    .components
                    .iter()
                    .map(|e| ldr.expr(&format!("solutions.{}", s.name), e))
                    .collect::<Result<Vec<_>, ModelError>>()?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let ansatz = match &doc.ansatz {
        None => None,
        Some(a) => {
            let mut unknowns = BTreeMap::new();
            for u in &a.unknowns {
                let args = u
                    .args
                    .iter()
                    .map(|s| ldr.uarg("ansatz.unknowns", s))
                    .collect::<Result<Vec<_>, _>>()?;
                let unk = Unknown::base(&u.name, args.clone(), u.real);
                ldr.ctx.add_unknown(&u.name, args, u.real);
                unknowns.insert(u.name.clone(), unk);
            }
            let sys = PDESystem::from_hamiltonian(&hamiltonian, coords.clone());
            let xi = a
                .xi
                .iter()
                .map(|e| ldr.expr("ansatz.xi", e))
                .collect::<Result<Vec<_>, _>>()?;
            let phi = a
                .phi
                .iter()
                .map(|e| ldr.expr("ansatz.phi", e))
                .collect::<Result<Vec<_>, _>>()?;
            let field = JetVectorField { coords: coords.clone(), deps: sys.deps.clone(), xi, phi };
            let solution = ldr.ansatz_solution("ansatz.solution", &a.solution, &unknowns)?;
            let variants = a
                .variants
                .iter()
                .map(|v| {
                    Ok(AnsatzVariant {
                        name: v.name.clone(),
                        solution: ldr.ansatz_solution(
                            &format!("ansatz.variants.{}", v.name),
                            &v.solution,
                            &unknowns,
                        )?,
                        pass_iff_equal: v.pass_iff_equal.clone(),
                    })
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            Some(ModelAnsatz {
                delta_count: a.delta_count,
                order: a.order,
                field,
                solution,
                variants,
            })
        }
    };
    let shift = match &doc.shift {
        None => None,
        Some(d) => Some(Definition {
            name: d.name.clone(),
            complex: d.complex,
            rhs: ldr.expr("shift", &d.rhs)?,
        }),
    };

    let model = ModelSpec {
        name: doc.name.clone(),
        coords,
        dim,
        params: doc
            .parameters
            .iter()
            .map(|p| ParamDef { name: p.name.clone(), complex: p.complex, positive: p.positive })
            .collect(),
        definitions,
        fixed_params: doc.fixed_params.clone(),
        hamiltonian,
        grading,
        generators,
        aux_ops,
        products,
        sums,
        tables,
        checks,
        span_checks,
        solutions,
        ansatz,
        shift,
    };
    model.validate(&model.oracle_cfg(42, 8))?;
    Ok(model)
}

/// Load a model from a JSON file on disk.
pub fn load_model(path: &std::path::Path) -> Result<ModelSpec, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_model_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_load_export_is_byte_identical() {
        for name in ["jc", "susy_oscillator"] {
            let m = builtin(name).unwrap();
            let once = export_model(&m).unwrap();
            let back = load_model_str(&once, "<mem>").unwrap();
            let twice = export_model(&back).unwrap();
            assert_eq!(once, twice, "round trip changed the {name} document");
        }
    }

    #[test]
    fn bad_grading_is_rejected() {
        let m = builtin("jc").unwrap();
        let doc = export_model(&m).unwrap();
        // replace the grading with a matrix that does not square to Id
        let broken = doc.replace(
            &format!("\"grading\": {:?}", m.grading.print()),
            "\"grading\": \"[[1, 0], [0, 2]]\"",
        );
        assert_ne!(doc, broken, "grading replacement did not apply");
        let err = load_model_str(&broken, "<mem>").unwrap_err();
        assert!(
            matches!(err, ModelError::Validation(_)),
            "expected a validation error, got {err:?}"
        );
    }

    #[test]
    fn phase_deformed_model_round_trips_with_phase_factors() {
        let m = jc_generalized(std::f64::consts::FRAC_PI_2);
        let doc = export_model(&m).unwrap();
        assert!(doc.contains("exp(i*phi)"), "deformed raising entries should carry exp(i*phi)");
        let back = load_model_str(&doc, "<mem>").unwrap();
        assert_eq!(back.fixed_params, vec![("phi".to_string(), std::f64::consts::FRAC_PI_2)]);
        let t7 = back.registry().unwrap();
        assert!(t7.contains_key("T+"));
        assert_eq!(export_model(&back).unwrap(), doc);
    }
}
