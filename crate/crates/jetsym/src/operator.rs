//! N×N matrix differential operators in `(t, x, y)`.
//!
//! # Overview
//!
//! A [`MatrixDiffOp`] is a matrix whose entries are differential-operator
//! polynomials: finite sums of `coeff * D^J` with [`Expr`] coefficients in
//! coordinates and parameters and a derivative [`MultiIndex`] `J`.
//! Composition uses the generalized Leibniz rule
//!
//! ```text
//! (f D^a)(g D^b) = sum_{c <= a} C(a,c) f (D^c g) D^{a-c+b}
//! ```
//!
//! Operator equality and parity classification are decided by the
//! randomized zero oracle on coefficient differences, never by rewriting.
//! Operators may genuinely contain `Dt`; the on-shell reduction
//! [`MatrixDiffOp::eliminate_dt`] replaces `Dt` by `-iH` for verification
//! against solution-space realizations.

use crate::expr::eval::{EvalError, OracleCfg};
use crate::expr::parser::{parse, ParseError, SymbolContext};
use crate::expr::{Atom, CoordId, Expr, GRat, JetSym, MultiIndex, ParamSym};
use std::collections::BTreeMap;

/// Differential-operator polynomial: at most one term per multi-index.
pub type DiffPoly = BTreeMap<MultiIndex, Expr>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OpError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("graded bracket requires classified parities")]
    Unclassified,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("operator parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Invalid(String),
}

/// Z2 parity with respect to a model grading operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Unclassified,
}

/// A named operator with its parity.
#[derive(Debug, Clone)]
pub struct GradedGenerator {
    pub name: String,
    pub op: MatrixDiffOp,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixDiffOp {
    dim: usize,
    entries: Vec<Vec<DiffPoly>>,
}

fn poly_insert(p: &mut DiffPoly, idx: MultiIndex, coeff: Expr) {
    if coeff.is_zero_structural() {
        return;
    }
    let slot = p.entry(idx).or_insert_with(Expr::zero);
    *slot = slot.add(&coeff);
    if slot.is_zero_structural() {
        p.remove(&idx);
    }
}

/// `D^J f` — coefficient differentiated by coordinates.
fn deriv_expr(f: &Expr, j: &MultiIndex) -> Expr {
    let mut e = f.clone();
    for c in CoordId::ALL {
        for _ in 0..j.get(c) {
            e = e.diff_coord(c);
        }
    }
    e
}

/// Scalar composition `(f D^a)(g D^b)` by the generalized Leibniz rule.
fn compose_terms(f: &Expr, a: &MultiIndex, g: &Expr, b: &MultiIndex, out: &mut DiffPoly) {
    for c in a.sub_indices() {
        let dg = deriv_expr(g, &c);
        if dg.is_zero_structural() {
            continue;
        }
        let binom = Expr::int(a.binom(&c) as i64);
        let coeff = f.mul(&binom).mul(&dg);
        poly_insert(out, a.sub(&c).add(b), coeff);
    }
}

impl MatrixDiffOp {
    // ---- construction -------------------------------------------------

    pub fn zero(dim: usize) -> Self {
        MatrixDiffOp { dim, entries: vec![vec![DiffPoly::new(); dim]; dim] }
    }
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for k in 0..dim {
            poly_insert(&mut m.entries[k][k], MultiIndex::zero(), Expr::one());
        }
        m
    }
    /// 1×1 multiplication operator.
    pub fn mult(e: Expr) -> Self {
        let mut m = Self::zero(1);
        poly_insert(&mut m.entries[0][0], MultiIndex::zero(), e);
        m
    }
    /// 1×1 derivative operator `D_c`.
    pub fn d(c: CoordId) -> Self {
        let mut m = Self::zero(1);
        poly_insert(&mut m.entries[0][0], MultiIndex::unit(c), Expr::one());
        m
    }
    /// Constant matrix from Gaussian-rational entries.
    pub fn const_matrix(rows: Vec<Vec<Expr>>) -> Self {
        let dim = rows.len();
        let mut m = Self::zero(dim);
        for (r, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (c, e) in row.into_iter().enumerate() {
                poly_insert(&mut m.entries[r][c], MultiIndex::zero(), e);
            }
        }
        m
    }

    // Pauli matrices and friends (dim 2).
    pub fn sigma0() -> Self {
        Self::identity(2)
    }
    pub fn sigma3() -> Self {
        Self::const_matrix(vec![
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), Expr::int(-1)],
        ])
    }
    pub fn sigma_plus() -> Self {
        Self::const_matrix(vec![
            vec![Expr::zero(), Expr::one()],
            vec![Expr::zero(), Expr::zero()],
        ])
    }
    pub fn sigma_minus() -> Self {
        Self::const_matrix(vec![
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::one(), Expr::zero()],
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn entry(&self, r: usize, c: usize) -> &DiffPoly {
        &self.entries[r][c]
    }
    pub fn is_structurally_zero(&self) -> bool {
        self.entries.iter().all(|row| row.iter().all(|p| p.is_empty()))
    }

    /// Kronecker product; the left factor acts first on coefficients, which
    /// is the intended use `scalar-operator ⊗ constant-matrix`.
    pub fn kron(&self, other: &MatrixDiffOp) -> MatrixDiffOp {
        let dim = self.dim * other.dim;
        let mut m = MatrixDiffOp::zero(dim);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                for (j1, f1) in &self.entries[r1][c1] {
                    for r2 in 0..other.dim {
                        for c2 in 0..other.dim {
                            for (j2, f2) in &other.entries[r2][c2] {
                                compose_terms(
                                    f1,
                                    j1,
                                    f2,
                                    j2,
                                    &mut m.entries[r1 * other.dim + r2][c1 * other.dim + c2],
                                );
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// Place four 2×2 blocks into a 4×4 operator.
    pub fn blocks(
        tl: &MatrixDiffOp,
        tr: &MatrixDiffOp,
        bl: &MatrixDiffOp,
        br: &MatrixDiffOp,
    ) -> MatrixDiffOp {
        assert!(tl.dim == 2 && tr.dim == 2 && bl.dim == 2 && br.dim == 2);
        let mut m = MatrixDiffOp::zero(4);
        for (block, ro, co) in [(tl, 0, 0), (tr, 0, 2), (bl, 2, 0), (br, 2, 2)] {
            for r in 0..2 {
                for c in 0..2 {
                    for (j, f) in &block.entries[r][c] {
                        poly_insert(&mut m.entries[ro + r][co + c], *j, f.clone());
                    }
                }
            }
        }
        m
    }

    // ---- linear algebra ----------------------------------------------

    pub fn add(&self, o: &MatrixDiffOp) -> MatrixDiffOp {
        assert_eq!(self.dim, o.dim);
        let mut m = self.clone();
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (j, f) in &o.entries[r][c] {
                    poly_insert(&mut m.entries[r][c], *j, f.clone());
                }
            }
        }
        m
    }
    pub fn neg(&self) -> MatrixDiffOp {
        self.scale(&Expr::int(-1))
    }
    pub fn sub(&self, o: &MatrixDiffOp) -> MatrixDiffOp {
        self.add(&o.neg())
    }
    /// Multiply every coefficient on the left by `e` (a function of
    /// coordinates/parameters; it commutes with nothing, so this is
    /// left-multiplication by the operator `e·Id`).
    pub fn scale(&self, e: &Expr) -> MatrixDiffOp {
        let mut m = MatrixDiffOp::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (j, f) in &self.entries[r][c] {
                    poly_insert(&mut m.entries[r][c], *j, e.mul(f));
                }
            }
        }
        m
    }
    pub fn scale_grat(&self, c: &GRat) -> MatrixDiffOp {
        self.scale(&Expr::from_grat(c.clone()))
    }

    /// Apply `f` to every coefficient. Used to substitute parameter
    /// definitions (e.g. a composite frequency in terms of primitive
    /// parameters) uniformly through an operator.
    pub fn map_coeffs(&self, f: &dyn Fn(&Expr) -> Expr) -> MatrixDiffOp {
        let mut m = MatrixDiffOp::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (j, coeff) in &self.entries[r][c] {
                    poly_insert(&mut m.entries[r][c], *j, f(coeff));
                }
            }
        }
        m
    }

    pub fn compose(&self, o: &MatrixDiffOp) -> Result<MatrixDiffOp, OpError> {
        if self.dim != o.dim {
            return Err(OpError::Dimension(self.dim, o.dim));
        }
        let mut m = MatrixDiffOp::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                for k in 0..self.dim {
                    for (ja, fa) in &self.entries[r][k] {
                        for (jb, fb) in &o.entries[k][c] {
                            compose_terms(fa, ja, fb, jb, &mut m.entries[r][c]);
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn commutator(&self, o: &MatrixDiffOp) -> Result<MatrixDiffOp, OpError> {
        Ok(self.compose(o)?.sub(&o.compose(self)?))
    }
    pub fn anticommutator(&self, o: &MatrixDiffOp) -> Result<MatrixDiffOp, OpError> {
        Ok(self.compose(o)?.add(&o.compose(self)?))
    }

    // ---- oracle-backed predicates -------------------------------------

    /// True iff every coefficient passes the zero oracle; on failure
    /// returns the offending entry, multi-index and witness description.
    pub fn is_zero_op(
        &self,
        cfg: &OracleCfg,
    ) -> Result<Option<(usize, usize, MultiIndex, String)>, OpError> {
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (j, f) in &self.entries[r][c] {
                    let res = crate::expr::eval::is_zero(f, cfg)?;
                    if !res.is_zero() {
                        return Ok(Some((r, c, *j, res.witness_string())));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn equals(&self, o: &MatrixDiffOp, cfg: &OracleCfg) -> Result<bool, OpError> {
        if self.dim != o.dim {
            return Err(OpError::Dimension(self.dim, o.dim));
        }
        Ok(self.sub(o).is_zero_op(cfg)?.is_none())
    }

    /// Parity with respect to the grading operator `gamma`.
    pub fn classify_parity(&self, gamma: &MatrixDiffOp, cfg: &OracleCfg) -> Result<Parity, OpError> {
        if self.commutator(gamma)?.is_zero_op(cfg)?.is_none() {
            Ok(Parity::Even)
        } else if self.anticommutator(gamma)?.is_zero_op(cfg)?.is_none() {
            Ok(Parity::Odd)
        } else {
            Ok(Parity::Unclassified)
        }
    }

    // ---- application --------------------------------------------------

    /// Apply to a vector of jet-free expressions in the coordinates.
    pub fn apply(&self, psi: &[Expr]) -> Result<Vec<Expr>, OpError> {
        if psi.len() != self.dim {
            return Err(OpError::Dimension(self.dim, psi.len()));
        }
        let mut out = vec![Expr::zero(); self.dim];
        for r in 0..self.dim {
            for (c, component) in psi.iter().enumerate() {
                for (j, f) in &self.entries[r][c] {
                    out[r] = out[r].add(&f.mul(&deriv_expr(component, j)));
                }
            }
        }
        Ok(out)
    }

    /// Apply to the formal dependent-variable vector `(u1, ..., uN)`,
    /// producing expressions over jet symbols. Used to turn a Hamiltonian
    /// into the right-hand side of the evolution system.
    pub fn apply_jets(&self) -> Vec<Expr> {
        let mut out = vec![Expr::zero(); self.dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                for (j, f) in &self.entries[r][c] {
                    let jet = Expr::jet(JetSym::new((c + 1) as u8, false, *j));
                    out[r] = out[r].add(&f.mul(&jet));
                }
            }
        }
        out
    }

    /// Replace `Dt` by `-i H`: the solution-space reduction
    /// `Dt Ψ = -i H Ψ`. Higher time orders are reduced one `Dt` at a time
    /// (`f D^{(k,s)} Ψ = f D^{(k-1,s)} (-iH) Ψ`), which is exact because
    /// partial derivatives commute. `h` must be `Dt`-free.
    pub fn eliminate_dt(&self, h: &MatrixDiffOp) -> Result<MatrixDiffOp, OpError> {
        if self.dim != h.dim {
            return Err(OpError::Dimension(self.dim, h.dim));
        }
        for r in 0..h.dim {
            for c in 0..h.dim {
                if h.entries[r][c].keys().any(|j| j.t > 0) {
                    return Err(OpError::Invalid(
                        "eliminate_dt requires a Dt-free Hamiltonian".into(),
                    ));
                }
            }
        }
        let minus_i_h = h.scale(&Expr::i().neg());
        let mut cur = self.clone();
        loop {
            let mut t0 = MatrixDiffOp::zero(self.dim);
            let mut t1 = MatrixDiffOp::zero(self.dim);
            let mut any = false;
            for r in 0..self.dim {
                for c in 0..self.dim {
                    for (j, f) in &cur.entries[r][c] {
                        if j.t == 0 {
                            poly_insert(&mut t0.entries[r][c], *j, f.clone());
                        } else {
                            any = true;
                            let lowered = MultiIndex { t: j.t - 1, ..*j };
                            poly_insert(&mut t1.entries[r][c], lowered, f.clone());
                        }
                    }
                }
            }
            if !any {
                return Ok(t0);
            }
            cur = t0.add(&t1.compose(&minus_i_h)?);
        }
    }

    /// Differentiate every coefficient with respect to `t` (the explicit
    /// time dependence `∂A/∂t` of a time-dependent operator family).
    pub fn dt_coeffs(&self) -> MatrixDiffOp {
        self.map_coeffs(&|f| f.diff_coord(CoordId::T))
    }

    // ---- text format --------------------------------------------------

    /// `[[entry, entry],[entry, entry]]` with `Dt`/`Dx`/`Dy` derivative
    /// tokens inside entries.
    pub fn print(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(poly_str).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }

    /// Parse the operator text format. `ctx` declares the parameters and
    /// the expected dimension is taken from the literal.
    pub fn parse_op(text: &str, ctx: &SymbolContext) -> Result<MatrixDiffOp, OpError> {
        let mut dctx = ctx.clone();
        for d in ["Dt", "Dx", "Dy"] {
            dctx.add_param(d, false);
        }
        let rows = split_matrix_literal(text)?;
        let dim = rows.len();
        let mut m = MatrixDiffOp::zero(dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(OpError::Invalid(format!(
                    "row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    dim
                )));
            }
            for (c, cell) in row.iter().enumerate() {
                let e = parse(cell, &dctx)?;
                for term in e.terms() {
                    let mut idx = MultiIndex::zero();
                    let mut coeff_mono = Vec::new();
                    for (a, n) in &term.mono {
                        match d_token(a) {
                            Some(coord) => {
                                if *n < 0 {
                                    return Err(OpError::Invalid(
                                        "negative derivative power".into(),
                                    ));
                                }
                                for _ in 0..*n {
                                    idx = idx.bump(coord);
                                }
                            }
                            None => {
                                // derivative tokens must not hide inside
                                // function arguments
                                let mut free = std::collections::BTreeSet::new();
                                Expr::atom(a.clone()).free_symbols(&mut free);
                                if free.iter().any(|a| d_token(a).is_some()) {
                                    return Err(OpError::Invalid(
                                        "derivative token inside function argument".into(),
                                    ));
                                }
                                coeff_mono.push((a.clone(), *n));
                            }
                        }
                    }
                    let coeff = Expr::from_grat(term.coeff.clone()).mul(
                        &coeff_mono
                            .into_iter()
                            .fold(Expr::one(), |acc, (a, n)| acc.mul(&Expr::atom(a).pow(n))),
                    );
                    poly_insert(&mut m.entries[r][c], idx, coeff);
                }
            }
        }
        Ok(m)
    }
}

fn d_token(a: &Atom) -> Option<CoordId> {
    if let Atom::Param(ParamSym { name, .. }) = a {
        match name.as_str() {
            "Dt" => Some(CoordId::T),
            "Dx" => Some(CoordId::X),
            "Dy" => Some(CoordId::Y),
            _ => None,
        }
    } else {
        None
    }
}

fn poly_str(p: &DiffPoly) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    let parts: Vec<String> = p
        .iter()
        .map(|(j, f)| {
            let mut ds = String::new();
            for (c, n) in [(CoordId::T, j.t), (CoordId::X, j.x), (CoordId::Y, j.y)] {
                if n == 1 {
                    ds.push_str(&format!("*D{}", c.name()));
                } else if n > 1 {
                    ds.push_str(&format!("*D{}^{}", c.name(), n));
                }
            }
            format!("({}){}", f, ds)
        })
        .collect();
    parts.join(" + ")
}

/// Split `[[a, b],[c, d]]` into rows of entry strings, respecting nesting.
fn split_matrix_literal(text: &str) -> Result<Vec<Vec<String>>, OpError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| OpError::Invalid("matrix literal must be wrapped in [ ]".into()))?;
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut row_start = None;
    for (k, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    row_start = Some(k + 1);
                }
                depth += 1;
            }
            ']' => {
                depth = depth.checked_sub(1).ok_or_else(|| {
                    OpError::Invalid("unbalanced brackets in matrix literal".into())
                })?;
                if depth == 0 {
                    let row = &inner[row_start.take().unwrap()..k];
                    rows.push(split_top_level(row));
                }
            }
            _ => {}
        }
    }
    if depth != 0 || rows.is_empty() {
        return Err(OpError::Invalid("malformed matrix literal".into()));
    }
    Ok(rows)
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::SymbolContext;

    fn cfg() -> OracleCfg {
        OracleCfg::new(42, 20)
    }
    fn x() -> Expr {
        Expr::coord(CoordId::X)
    }

    #[test]
    fn leibniz_one_variable() {
        // (Dx)(x·) = x·Dx + 1
        let dx = MatrixDiffOp::d(CoordId::X);
        let mx = MatrixDiffOp::mult(x());
        let got = dx.compose(&mx).unwrap();
        let want = mx.compose(&dx).unwrap().add(&MatrixDiffOp::identity(1));
        assert_eq!(got, want);
    }

    #[test]
    fn oscillator_ladder_commutator() {
        // a = (Mw x + Dx)/sqrt(2Mw), a† = (Mw x − Dx)/sqrt(2Mw); [a, a†] = 1
        let m = Expr::param("M");
        let w = Expr::param("w");
        let norm = Expr::sqrt(Expr::int(2).mul(&m).mul(&w)).pow(-1);
        let a = MatrixDiffOp::mult(m.mul(&w).mul(&x()))
            .add(&MatrixDiffOp::d(CoordId::X))
            .scale(&norm);
        let adag = MatrixDiffOp::mult(m.mul(&w).mul(&x()))
            .sub(&MatrixDiffOp::d(CoordId::X))
            .scale(&norm);
        let comm = a.commutator(&adag).unwrap();
        assert!(comm.sub(&MatrixDiffOp::identity(1)).is_zero_op(&cfg()).unwrap().is_none());
    }

    #[test]
    fn composition_associativity_random() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut mk = |_: ()| {
                let mut m = MatrixDiffOp::zero(2);
                for r in 0..2 {
                    for c in 0..2 {
                        let coeff = Expr::int(rng.gen_range(-3..4))
                            .mul(&x().pow(rng.gen_range(0..3)))
                            .mul(&Expr::coord(CoordId::T).pow(rng.gen_range(0..2)));
                        let j = MultiIndex {
                            t: rng.gen_range(0..2),
                            x: rng.gen_range(0..3),
                            y: 0,
                        };
                        poly_insert(&mut m.entries[r][c], j, coeff);
                    }
                }
                m
            };
            let (a, b, c) = (mk(()), mk(()), mk(()));
            let left = a.compose(&b.compose(&c).unwrap()).unwrap();
            let right = a.compose(&b).unwrap().compose(&c).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn parity_classification() {
        let g = MatrixDiffOp::sigma3();
        let t = Expr::coord(CoordId::T);
        let w = Expr::param("w");
        let tp = MatrixDiffOp::sigma_plus().scale(&Expr::exp(Expr::i().mul(&w).mul(&t)));
        assert_eq!(tp.classify_parity(&g, &cfg()).unwrap(), Parity::Odd);
        let h = MatrixDiffOp::sigma0().kron(&MatrixDiffOp::d(CoordId::T)).clone();
        // σ0·Dt is even
        let dt = MatrixDiffOp::d(CoordId::T).kron(&MatrixDiffOp::sigma0());
        assert_eq!(dt.classify_parity(&g, &cfg()).unwrap(), Parity::Even);
        drop(h);
        let mixed = MatrixDiffOp::sigma0().add(&MatrixDiffOp::sigma_plus());
        assert_eq!(mixed.classify_parity(&g, &cfg()).unwrap(), Parity::Unclassified);
    }

    #[test]
    fn apply_chain_matches_composition() {
        let a = MatrixDiffOp::d(CoordId::X).kron(&MatrixDiffOp::sigma_plus());
        let b = MatrixDiffOp::mult(x().pow(2)).kron(&MatrixDiffOp::sigma3());
        let psi = vec![
            Expr::sin(x()).mul(&Expr::coord(CoordId::T)),
            Expr::exp(x().mul(&Expr::i())),
        ];
        let ab = a.compose(&b).unwrap();
        let lhs = ab.apply(&psi).unwrap();
        let rhs = a.apply(&b.apply(&psi).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn print_parse_round_trip() {
        let ctx = SymbolContext::with_params(&["w", "M"]);
        let h = "[[i*Dt + (1/(2*M))*Dx^2 - M*w^2*x^2/2 + w/2, 0],[0, i*Dt + (1/(2*M))*Dx^2 - M*w^2*x^2/2 - w/2]]";
        let op = MatrixDiffOp::parse_op(h, &ctx).unwrap();
        let back = MatrixDiffOp::parse_op(&op.print(), &ctx).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn eliminate_dt_substitutes_hamiltonian() {
        // i Dt ψ = H ψ with H = Dx^2 → eliminate_dt(i*Dt) = H
        let h = MatrixDiffOp::d(CoordId::X).compose(&MatrixDiffOp::d(CoordId::X)).unwrap();
        let idt = MatrixDiffOp::d(CoordId::T).scale(&Expr::i());
        let red = idt.eliminate_dt(&h).unwrap();
        assert_eq!(red, h);
    }
}
