//! Exact symbolic expression core.
//!
//! # Overview
//!
//! [`Expr`] is an exact symbolic expression over
//!
//! * rational constants with arbitrary-precision numerators/denominators,
//! * the imaginary unit `i`,
//! * parameter symbols (`w`, `M`, `e`, `B`, ... — real by default, optionally
//!   complex with a paired conjugate),
//! * the coordinates `t`, `x`, `y`,
//! * jet symbols `u1`, `u2_tx`, `cu1_x`, ... (dependent variables and their
//!   derivatives, with a conjugation flag),
//! * unknown-function applications `xi1(t,x)` carrying a derivative
//!   multi-index over their declared arguments,
//! * the elementary functions `sin`, `cos`, `tan`, `exp`, `sqrt`, `arctan`,
//! * sums, products and integer powers.
//!
//! Values are kept in a canonical flattened sum-of-products form: every
//! expression is a sorted list of terms, each term a Gaussian-rational
//! coefficient times a sorted monomial in "atoms". Canonicalization is
//! structural and maintained by the constructors, so equal canonical values
//! are `==`-equal. Trig/exponential identities such as `sin^2 + cos^2 = 1`
//! are deliberately *not* rewritten away; deciding whether an expression is
//! identically zero is the job of the randomized oracle in [`eval`].
//!
//! # Example
//!
//! ```
//! use jetsym::expr::Expr;
//! let w = Expr::param("w");
//! let t = Expr::coord(jetsym::expr::CoordId::T);
//! let e = Expr::exp(Expr::i().mul(&w).mul(&t));          // e^{iwt}
//! let d = e.diff_coord(jetsym::expr::CoordId::T);        // iw e^{iwt}
//! assert_eq!(d, Expr::i().mul(&w).mul(&e));
//! ```

pub mod eval;
pub mod parser;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = Ratio<BigInt>;

fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact Gaussian-rational coefficient `re + im*i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GRat {
    pub re: Rat,
    pub im: Rat,
}

impl GRat {
    pub fn zero() -> Self {
        GRat { re: Rat::zero(), im: Rat::zero() }
    }
    pub fn one() -> Self {
        GRat { re: Rat::one(), im: Rat::zero() }
    }
    pub fn i() -> Self {
        GRat { re: Rat::zero(), im: Rat::one() }
    }
    pub fn from_int(n: i64) -> Self {
        GRat { re: rat_int(n), im: Rat::zero() }
    }
    pub fn from_rat(re: Rat) -> Self {
        GRat { re, im: Rat::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn add(&self, o: &GRat) -> GRat {
        GRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    pub fn neg(&self) -> GRat {
        GRat { re: -self.re.clone(), im: -self.im.clone() }
    }
    pub fn mul(&self, o: &GRat) -> GRat {
        GRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    pub fn conj(&self) -> GRat {
        GRat { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn inv(&self) -> GRat {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "division by zero coefficient");
        GRat { re: &self.re / &n, im: -&self.im / &n }
    }
    pub fn pow(&self, n: i64) -> GRat {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = GRat::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}

/// The three coordinates of the workbench. `Y` is unused by 1+1-dimensional
/// models but harmless to carry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CoordId {
    T,
    X,
    Y,
}

impl CoordId {
    pub fn name(self) -> &'static str {
        match self {
            CoordId::T => "t",
            CoordId::X => "x",
            CoordId::Y => "y",
        }
    }
    pub const ALL: [CoordId; 3] = [CoordId::T, CoordId::X, CoordId::Y];
}

/// Derivative multi-index over `(t, x, y)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiIndex {
    pub t: u32,
    pub x: u32,
    pub y: u32,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn unit(c: CoordId) -> Self {
        MultiIndex::zero().bump(c)
    }
    pub fn get(&self, c: CoordId) -> u32 {
        match c {
            CoordId::T => self.t,
            CoordId::X => self.x,
            CoordId::Y => self.y,
        }
    }
    pub fn bump(mut self, c: CoordId) -> Self {
        match c {
            CoordId::T => self.t += 1,
            CoordId::X => self.x += 1,
            CoordId::Y => self.y += 1,
        }
        self
    }
    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex { t: self.t + o.t, x: self.x + o.x, y: self.y + o.y }
    }
    pub fn order(&self) -> u32 {
        self.t + self.x + self.y
    }
    /// Componentwise `self <= o`.
    pub fn leq(&self, o: &MultiIndex) -> bool {
        self.t <= o.t && self.x <= o.x && self.y <= o.y
    }
    pub fn sub(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex { t: self.t - o.t, x: self.x - o.x, y: self.y - o.y }
    }
    /// Product of per-coordinate binomial coefficients `C(self, c)`.
    pub fn binom(&self, c: &MultiIndex) -> u64 {
        fn b(n: u32, k: u32) -> u64 {
            let mut acc = 1u64;
            for j in 0..k.min(n - k) {
                acc = acc * (n - j) as u64 / (j + 1) as u64;
            }
            acc
        }
        b(self.t, c.t) * b(self.x, c.x) * b(self.y, c.y)
    }
    /// Enumerate all indices `c` with `c <= self` componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut v = Vec::new();
        for t in 0..=self.t {
            for x in 0..=self.x {
                for y in 0..=self.y {
                    v.push(MultiIndex { t, x, y });
                }
            }
        }
        v
    }
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for _ in 0..self.t {
            s.push('t');
        }
        for _ in 0..self.x {
            s.push('x');
        }
        for _ in 0..self.y {
            s.push('y');
        }
        s
    }
}

/// A jet symbol: dependent variable `dep` (1-based), conjugation flag, and
/// derivative multi-index. `u1` is the first dependent variable itself,
/// `cu1_x` is the x-derivative of its conjugate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetSym {
    pub dep: u8,
    pub conj: bool,
    pub idx: MultiIndex,
}

impl JetSym {
    pub fn new(dep: u8, conj: bool, idx: MultiIndex) -> Self {
        JetSym { dep, conj, idx }
    }
    pub fn base(dep: u8, conj: bool) -> Self {
        JetSym { dep, conj, idx: MultiIndex::zero() }
    }
    pub fn name(&self) -> String {
        let mut s = String::new();
        if self.conj {
            s.push('c');
        }
        s.push('u');
        s.push_str(&self.dep.to_string());
        let sfx = self.idx.suffix();
        if !sfx.is_empty() {
            s.push('_');
            s.push_str(&sfx);
        }
        s
    }
}

/// Parameter symbol. Real parameters are fixed by conjugation; complex ones
/// (`kappa`) come with a formal conjugate partner (`conj` flag set).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ParamSym {
    pub name: String,
    pub complex: bool,
    pub conj: bool,
}

/// Elementary function heads.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Sqrt,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Atan => "arctan",
        }
    }
}

/// Argument slot of an unknown function: a coordinate or an order-0 jet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UArg {
    Coord(CoordId),
    Jet(JetSym),
}

/// Application of an unknown function (`xi1(t,x)`, `Phi1(t,x,u1,u2,...)`)
/// with a derivative multi-index over its argument slots. `real` marks
/// functions that are their own conjugate (such as the coordinate
/// coefficients ξ of a real vector field).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Unknown {
    pub name: String,
    pub args: Vec<UArg>,
    pub deriv: Vec<u32>,
    pub real: bool,
    pub conj: bool,
}

impl Unknown {
    pub fn base(name: &str, args: Vec<UArg>, real: bool) -> Self {
        let deriv = vec![0; args.len()];
        Unknown { name: name.to_string(), args, deriv, real, conj: false }
    }
    pub fn is_base(&self) -> bool {
        self.deriv.iter().all(|&d| d == 0)
    }
}

/// A multiplicative atom. Variant order fixes the canonical monomial order:
/// parameters < coordinates < jet symbols < unknowns < function applications.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Param(ParamSym),
    Coord(CoordId),
    Jet(JetSym),
    Unk(Unknown),
    Apply(Func, Expr),
    /// A multi-term sum raised to a (negative) power; base is normalized to
    /// leading coefficient 1.
    SumPow(Expr),
}

/// One canonical term: Gaussian-rational coefficient times a sorted monomial
/// with nonzero integer exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Term {
    pub coeff: GRat,
    pub mono: Vec<(Atom, i64)>,
}

/// Canonical expression: sorted terms with distinct monomials and nonzero
/// coefficients. The empty term list is zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    // ---- constructors -------------------------------------------------

    pub fn zero() -> Self {
        Expr { terms: vec![] }
    }
    pub fn one() -> Self {
        Expr::int(1)
    }
    pub fn int(n: i64) -> Self {
        Expr::from_grat(GRat::from_int(n))
    }
    pub fn rat(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Expr::from_grat(GRat::from_rat(Rat::new(BigInt::from(num), BigInt::from(den))))
    }
    pub fn i() -> Self {
        Expr::from_grat(GRat::i())
    }
    pub fn from_grat(c: GRat) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr { terms: vec![Term { coeff: c, mono: vec![] }] }
        }
    }
    pub fn atom(a: Atom) -> Self {
        Expr { terms: vec![Term { coeff: GRat::one(), mono: vec![(a, 1)] }] }
    }
    pub fn param(name: &str) -> Self {
        Expr::atom(Atom::Param(ParamSym { name: name.to_string(), complex: false, conj: false }))
    }
    pub fn cparam(name: &str, conj: bool) -> Self {
        Expr::atom(Atom::Param(ParamSym { name: name.to_string(), complex: true, conj }))
    }
    pub fn coord(c: CoordId) -> Self {
        Expr::atom(Atom::Coord(c))
    }
    pub fn jet(j: JetSym) -> Self {
        Expr::atom(Atom::Jet(j))
    }
    pub fn unknown(u: Unknown) -> Self {
        Expr::atom(Atom::Unk(u))
    }
    pub fn func(f: Func, arg: Expr) -> Self {
        // Structural short-cuts for literal arguments; everything else is
        // left to the oracle.
        if let Some(c) = arg.as_grat() {
            if c.is_zero() {
                return match f {
                    Func::Sin | Func::Tan | Func::Atan => Expr::zero(),
                    Func::Cos | Func::Exp => Expr::one(),
                    Func::Sqrt => Expr::zero(),
                };
            }
            if f == Func::Sqrt && c.im.is_zero() && !c.re.is_negative() {
                // sqrt of a perfect-square rational
                let (n, d) = (c.re.numer().sqrt(), c.re.denom().sqrt());
                if &n * &n == *c.re.numer() && &d * &d == *c.re.denom() {
                    return Expr::from_grat(GRat::from_rat(Rat::new(n, d)));
                }
            }
        }
        Expr::atom(Atom::Apply(f, arg))
    }
    pub fn sin(a: Expr) -> Self {
        Expr::func(Func::Sin, a)
    }
    pub fn cos(a: Expr) -> Self {
        Expr::func(Func::Cos, a)
    }
    pub fn exp(a: Expr) -> Self {
        Expr::func(Func::Exp, a)
    }
    pub fn sqrt(a: Expr) -> Self {
        Expr::func(Func::Sqrt, a)
    }

    // ---- inspection ---------------------------------------------------

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
    pub fn is_zero_structural(&self) -> bool {
        self.terms.is_empty()
    }
    /// `Some(c)` if the expression is the literal constant `c`.
    pub fn as_grat(&self) -> Option<GRat> {
        match self.terms.len() {
            0 => Some(GRat::zero()),
            1 if self.terms[0].mono.is_empty() => Some(self.terms[0].coeff.clone()),
            _ => None,
        }
    }

    fn from_map(map: BTreeMap<Vec<(Atom, i64)>, GRat>) -> Expr {
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term { coeff, mono })
            .collect();
        terms.sort_by(|a, b| a.mono.cmp(&b.mono));
        Expr { terms }
    }

    // ---- ring operations ---------------------------------------------

    pub fn add(&self, o: &Expr) -> Expr {
        let mut map: BTreeMap<Vec<(Atom, i64)>, GRat> = BTreeMap::new();
        for t in self.terms.iter().chain(o.terms.iter()) {
            let e = map.entry(t.mono.clone()).or_insert_with(GRat::zero);
            *e = e.add(&t.coeff);
        }
        Expr::from_map(map)
    }
    pub fn neg(&self) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: t.coeff.neg(), mono: t.mono.clone() })
                .collect(),
        }
    }
    pub fn sub(&self, o: &Expr) -> Expr {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &GRat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: t.coeff.mul(c), mono: t.mono.clone() })
                .collect(),
        }
    }
    pub fn mul(&self, o: &Expr) -> Expr {
        let mut map: BTreeMap<Vec<(Atom, i64)>, GRat> = BTreeMap::new();
        for a in &self.terms {
            for b in &o.terms {
                let prod = mul_terms(a, b);
                for t in prod.terms {
                    let e = map.entry(t.mono).or_insert_with(GRat::zero);
                    *e = e.add(&t.coeff);
                }
            }
        }
        Expr::from_map(map)
    }
    pub fn div(&self, o: &Expr) -> Expr {
        self.mul(&o.pow(-1))
    }
    pub fn pow(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        match self.terms.len() {
            0 => {
                assert!(n > 0, "division by zero expression");
                Expr::zero()
            }
            1 => {
                let t = &self.terms[0];
                let coeff = t.coeff.pow(n);
                let mono: Vec<(Atom, i64)> =
                    t.mono.iter().map(|(a, e)| (a.clone(), e * n)).collect();
                normalize_term(coeff, mono)
            }
            _ => {
                if n > 0 {
                    let mut acc = self.clone();
                    for _ in 1..n {
                        acc = acc.mul(self);
                    }
                    acc
                } else {
                    // normalize the base to leading coefficient 1 so that
                    // (2+2x)^-1 and (1+x)^-1/2 agree structurally
                    let lead = self.terms[0].coeff.clone();
                    let base = self.scale(&lead.inv());
                    let coeff = lead.pow(n);
                    normalize_term(coeff, vec![(Atom::SumPow(base), n)])
                }
            }
        }
    }

    /// Rebuild the expression bottom-up through the canonicalizing
    /// constructors. On canonical values this is the identity; it exists so
    /// tests can state idempotence directly.
    pub fn canon(&self) -> Expr {
        let mut acc = Expr::zero();
        for t in &self.terms {
            let mut term = Expr::from_grat(t.coeff.clone());
            for (a, e) in &t.mono {
                let base = match a {
                    Atom::Apply(f, arg) => Expr::func(*f, arg.canon()),
                    Atom::SumPow(s) => {
                        // re-expose the sum so pow() renormalizes it
                        term = term.mul(&s.canon().pow(*e));
                        continue;
                    }
                    other => Expr::atom(other.clone()),
                };
                term = term.mul(&base.pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    // ---- calculus -----------------------------------------------------

    /// Partial derivative with respect to a parameter, coordinate or jet
    /// symbol, treating all other symbols as independent.
    pub fn diff(&self, v: &Atom) -> Expr {
        let mut acc = Expr::zero();
        for t in &self.terms {
            for (k, (a, e)) in t.mono.iter().enumerate() {
                let da = diff_atom(a, v);
                if da.is_zero_structural() {
                    continue;
                }
                // coeff * e * atom^(e-1) * (other factors) * da
                let mut mono: Vec<(Atom, i64)> = Vec::with_capacity(t.mono.len());
                for (j, (a2, e2)) in t.mono.iter().enumerate() {
                    let e2 = if j == k { e2 - 1 } else { *e2 };
                    if e2 != 0 {
                        mono.push((a2.clone(), e2));
                    }
                }
                let coeff = t.coeff.mul(&GRat::from_int(*e));
                acc = acc.add(&normalize_term(coeff, mono).mul(&da));
            }
        }
        acc
    }
    pub fn diff_coord(&self, c: CoordId) -> Expr {
        self.diff(&Atom::Coord(c))
    }
    pub fn diff_jet(&self, j: JetSym) -> Expr {
        self.diff(&Atom::Jet(j))
    }

    /// Formal complex conjugation: `i -> -i`, jets and complex parameters
    /// flip their conjugation flag, real unknowns are fixed.
    pub fn conj(&self) -> Expr {
        let mut acc = Expr::zero();
        for t in &self.terms {
            let mut term = Expr::from_grat(t.coeff.conj());
            for (a, e) in &t.mono {
                let base = match a {
                    Atom::Param(p) => {
                        let mut p = p.clone();
                        if p.complex {
                            p.conj = !p.conj;
                        }
                        Expr::atom(Atom::Param(p))
                    }
                    Atom::Coord(c) => Expr::coord(*c),
                    Atom::Jet(j) => {
                        let mut j = *j;
                        j.conj = !j.conj;
                        Expr::jet(j)
                    }
                    Atom::Unk(u) => {
                        let mut u = u.clone();
                        if !u.real {
                            u.conj = !u.conj;
                        }
                        Expr::atom(Atom::Unk(u))
                    }
                    Atom::Apply(f, arg) => Expr::func(*f, arg.conj()),
                    Atom::SumPow(s) => s.conj(),
                };
                term = term.mul(&base.pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Simultaneous substitution. Keys are atoms; unknown-function atoms may
    /// be bound by their base (zero derivative, unconjugated) form, in which
    /// case derivatives and conjugation are applied to the bound expression.
    pub fn substitute(&self, map: &BTreeMap<Atom, Expr>) -> Expr {
        let mut acc = Expr::zero();
        for t in &self.terms {
            let mut term = Expr::from_grat(t.coeff.clone());
            for (a, e) in &t.mono {
                let base = substitute_atom(a, map);
                term = term.mul(&base.pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    // ---- symbol collection --------------------------------------------

    /// All parameter/coordinate/jet atoms occurring anywhere in the
    /// expression, including inside function arguments and unknown-function
    /// argument lists.
    pub fn free_symbols(&self, out: &mut std::collections::BTreeSet<Atom>) {
        for t in &self.terms {
            for (a, _) in &t.mono {
                collect_atom(a, out);
            }
        }
    }
    pub fn jet_symbols(&self) -> std::collections::BTreeSet<JetSym> {
        let mut set = std::collections::BTreeSet::new();
        self.free_symbols(&mut set);
        set.into_iter()
            .filter_map(|a| if let Atom::Jet(j) = a { Some(j) } else { None })
            .collect()
    }
    pub fn has_unknowns(&self) -> bool {
        self.terms.iter().any(|t| t.mono.iter().any(|(a, _)| atom_has_unknown(a)))
    }
}

fn collect_atom(a: &Atom, out: &mut std::collections::BTreeSet<Atom>) {
    match a {
        Atom::Param(_) | Atom::Coord(_) | Atom::Jet(_) => {
            out.insert(a.clone());
        }
        Atom::Unk(u) => {
            for arg in &u.args {
                match arg {
                    UArg::Coord(c) => {
                        out.insert(Atom::Coord(*c));
                    }
                    UArg::Jet(j) => {
                        out.insert(Atom::Jet(*j));
                    }
                }
            }
        }
        Atom::Apply(_, arg) => arg.free_symbols(out),
        Atom::SumPow(s) => s.free_symbols(out),
    }
}

fn atom_has_unknown(a: &Atom) -> bool {
    match a {
        Atom::Unk(_) => true,
        Atom::Apply(_, arg) => arg.has_unknowns(),
        Atom::SumPow(s) => s.has_unknowns(),
        _ => false,
    }
}

/// Multiply two canonical terms, merging exponential factors and reducing
/// even powers of square roots. The result may have several terms (sqrt
/// reduction can reintroduce sums).
fn mul_terms(a: &Term, b: &Term) -> Expr {
    let coeff = a.coeff.mul(&b.coeff);
    let mut mono: Vec<(Atom, i64)> = Vec::with_capacity(a.mono.len() + b.mono.len());
    mono.extend(a.mono.iter().cloned());
    mono.extend(b.mono.iter().cloned());
    normalize_term(coeff, mono)
}

/// Canonicalize a raw (coefficient, factor list) pair into an expression.
fn normalize_term(coeff: GRat, mono: Vec<(Atom, i64)>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    // combine exponents of identical atoms
    let mut map: BTreeMap<Atom, i64> = BTreeMap::new();
    for (a, e) in mono {
        *map.entry(a).or_insert(0) += e;
    }
    let mut plain: Vec<(Atom, i64)> = Vec::new();
    let mut exp_arg = Expr::zero();
    let mut extra = Expr::one(); // sums reintroduced by sqrt/SumPow reduction
    for (a, e) in map {
        if e == 0 {
            continue;
        }
        match &a {
            Atom::Apply(Func::Exp, arg) => {
                exp_arg = exp_arg.add(&arg.scale(&GRat::from_int(e)));
            }
            Atom::Apply(Func::Sqrt, arg) => {
                let q = e.div_euclid(2);
                let r = e.rem_euclid(2);
                if q != 0 {
                    extra = extra.mul(&arg.pow(q));
                }
                if r == 1 {
                    plain.push((a.clone(), 1));
                }
            }
            Atom::SumPow(s) => {
                if e >= 1 {
                    extra = extra.mul(&s.pow(e));
                } else {
                    plain.push((a, e));
                }
            }
            _ => plain.push((a, e)),
        }
    }
    if !exp_arg.is_zero_structural() {
        // push directly (not via mul) to avoid re-entering normalization
        plain.push((Atom::Apply(Func::Exp, exp_arg), 1));
    }
    plain.sort_by(|x, y| x.0.cmp(&y.0));
    let base = Expr { terms: vec![Term { coeff, mono: plain }] };
    if extra.as_grat().map(|c| c.is_one()).unwrap_or(false) {
        base
    } else {
        base.mul(&extra)
    }
}

fn diff_atom(a: &Atom, v: &Atom) -> Expr {
    match a {
        Atom::Param(_) | Atom::Coord(_) | Atom::Jet(_) => {
            if a == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Unk(u) => {
            let want = match v {
                Atom::Coord(c) => UArg::Coord(*c),
                Atom::Jet(j) => UArg::Jet(*j),
                _ => return Expr::zero(),
            };
            match u.args.iter().position(|arg| *arg == want) {
                Some(k) => {
                    let mut u2 = u.clone();
                    u2.deriv[k] += 1;
                    Expr::atom(Atom::Unk(u2))
                }
                None => Expr::zero(),
            }
        }
        Atom::Apply(f, arg) => {
            let da = arg.diff(v);
            if da.is_zero_structural() {
                return Expr::zero();
            }
            let fprime = match f {
                Func::Sin => Expr::func(Func::Cos, arg.clone()),
                Func::Cos => Expr::func(Func::Sin, arg.clone()).neg(),
                Func::Tan => {
                    // 1 + tan^2
                    let t = Expr::func(Func::Tan, arg.clone());
                    Expr::one().add(&t.mul(&t))
                }
                Func::Exp => Expr::func(Func::Exp, arg.clone()),
                Func::Sqrt => {
                    // (1/2) sqrt(arg)^{-1}
                    Expr::func(Func::Sqrt, arg.clone()).pow(-1).scale(&GRat {
                        re: Rat::new(BigInt::from(1), BigInt::from(2)),
                        im: Rat::zero(),
                    })
                }
                Func::Atan => {
                    // (1 + arg^2)^{-1}
                    Expr::one().add(&arg.mul(arg)).pow(-1)
                }
            };
            fprime.mul(&da)
        }
        Atom::SumPow(s) => s.diff(v),
    }
}

fn substitute_atom(a: &Atom, map: &BTreeMap<Atom, Expr>) -> Expr {
    if let Some(e) = map.get(a) {
        return e.clone();
    }
    match a {
        Atom::Unk(u) => {
            // try the base unknown and apply derivatives/conjugation
            let base = Unknown {
                name: u.name.clone(),
                args: u.args.clone(),
                deriv: vec![0; u.args.len()],
                real: u.real,
                conj: false,
            };
            if let Some(b) = map.get(&Atom::Unk(base)) {
                let mut e = b.clone();
                if u.conj {
                    e = e.conj();
                }
                for (k, &n) in u.deriv.iter().enumerate() {
                    let v = match u.args[k] {
                        UArg::Coord(c) => Atom::Coord(c),
                        UArg::Jet(j) => Atom::Jet(j),
                    };
                    for _ in 0..n {
                        e = e.diff(&v);
                    }
                }
                return e;
            }
            Expr::atom(a.clone())
        }
        Atom::Apply(f, arg) => Expr::func(*f, arg.substitute(map)),
        Atom::SumPow(s) => s.substitute(map).pow(1),
        _ => Expr::atom(a.clone()),
    }
}

// ---- printing ---------------------------------------------------------

fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn grat_str(c: &GRat) -> String {
    if c.im.is_zero() {
        rat_str(&c.re)
    } else if c.re.is_zero() {
        if c.im.is_one() {
            "i".to_string()
        } else if (-c.im.clone()).is_one() {
            "-i".to_string()
        } else if c.im.denom().is_one() {
            format!("{}*i", c.im.numer())
        } else {
            format!("{}*i", rat_str(&c.im))
        }
    } else {
        format!("({} + {}*i)", rat_str(&c.re), rat_str(&c.im))
    }
}

pub fn atom_str(a: &Atom) -> String {
    match a {
        Atom::Param(p) => {
            if p.conj {
                format!("conj({})", p.name)
            } else {
                p.name.clone()
            }
        }
        Atom::Coord(c) => c.name().to_string(),
        Atom::Jet(j) => j.name(),
        Atom::Unk(u) => {
            let mut s = u.name.clone();
            if u.conj {
                s = format!("conj_{}", s);
            }
            // derivative suffix over coordinate arguments; jet-direction
            // derivatives are printed in a bracket form (report-only)
            let mut coord_sfx = String::new();
            let mut jet_sfx = String::new();
            for (k, &n) in u.deriv.iter().enumerate() {
                for _ in 0..n {
                    match u.args[k] {
                        UArg::Coord(c) => coord_sfx.push_str(c.name()),
                        UArg::Jet(j) => {
                            jet_sfx.push(',');
                            jet_sfx.push_str(&j.name());
                        }
                    }
                }
            }
            if !coord_sfx.is_empty() {
                s.push('_');
                s.push_str(&coord_sfx);
            }
            if !jet_sfx.is_empty() {
                s.push_str(&format!("[d{}]", jet_sfx));
            }
            let args: Vec<String> = u
                .args
                .iter()
                .map(|arg| match arg {
                    UArg::Coord(c) => c.name().to_string(),
                    UArg::Jet(j) => j.name(),
                })
                .collect();
            format!("{}({})", s, args.join(","))
        }
        Atom::Apply(f, arg) => format!("{}({})", f.name(), arg),
        Atom::SumPow(s) => format!("({})", s),
    }
}

fn term_str(t: &Term) -> String {
    let mut factors: Vec<String> = Vec::new();
    if t.mono.is_empty() {
        return grat_str(&t.coeff);
    }
    if !t.coeff.is_one() {
        factors.push(grat_str(&t.coeff));
    }
    for (a, e) in &t.mono {
        let b = atom_str(a);
        if *e == 1 {
            factors.push(b);
        } else {
            factors.push(format!("{}^{}", b, e));
        }
    }
    factors.join("*")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            // pull a leading minus out of pure-real / pure-imaginary
            // negative coefficients for readability
            let neg = (t.coeff.im.is_zero() && t.coeff.re.is_negative())
                || (t.coeff.re.is_zero() && t.coeff.im.is_negative());
            let shown = if neg {
                Term { coeff: t.coeff.neg(), mono: t.mono.clone() }
            } else {
                t.clone()
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&term_str(&shown));
        }
        write!(f, "{}", out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Expr {
        Expr::param("w")
    }
    fn x() -> Expr {
        Expr::coord(CoordId::X)
    }
    fn t() -> Expr {
        Expr::coord(CoordId::T)
    }

    #[test]
    fn polynomial_derivative() {
        // d/dx (M w^2 x^2 / 2) = M w^2 x
        let m = Expr::param("M");
        let e = m.mul(&w()).mul(&w()).mul(&x()).mul(&x()).scale(&GRat {
            re: Rat::new(BigInt::from(1), BigInt::from(2)),
            im: Rat::zero(),
        });
        let d = e.diff_coord(CoordId::X);
        assert_eq!(d, m.mul(&w()).mul(&w()).mul(&x()));
    }

    #[test]
    fn chain_rule_exponential() {
        // d/dt e^{2iwt} = 2iw e^{2iwt}
        let arg = Expr::i().mul(&w()).mul(&t()).scale(&GRat::from_int(2));
        let e = Expr::exp(arg.clone());
        let d = e.diff_coord(CoordId::T);
        assert_eq!(d, Expr::i().mul(&w()).mul(&e).scale(&GRat::from_int(2)));
    }

    #[test]
    fn exp_factors_merge() {
        let a = Expr::exp(Expr::i().mul(&w()).mul(&t()));
        let b = Expr::exp(Expr::i().mul(&w()).mul(&t()).neg());
        assert_eq!(a.mul(&b), Expr::one());
    }

    #[test]
    fn sqrt_square_reduces() {
        let s = Expr::sqrt(w());
        assert_eq!(s.mul(&s), w());
        assert_eq!(s.pow(-2), w().pow(-1));
        assert_eq!(Expr::sqrt(Expr::rat(9, 4)), Expr::rat(3, 2));
    }

    #[test]
    fn sum_inverse_normalizes() {
        let a = Expr::one().add(&x());
        let b = Expr::int(2).add(&x().scale(&GRat::from_int(2)));
        assert_eq!(b.pow(-1), a.pow(-1).scale(&GRat::from_rat(Rat::new(1.into(), 2.into()))));
    }

    #[test]
    fn conj_involution() {
        let j = JetSym::base(1, false);
        let e = Expr::i()
            .mul(&Expr::jet(j))
            .add(&Expr::exp(Expr::i().mul(&w()).mul(&t())))
            .mul(&Expr::cparam("kappa", false));
        assert_eq!(e.conj().conj(), e);
    }

    #[test]
    fn jet_product_rule() {
        // d/du1 (A1(t,x)*u1) = A1(t,x)
        let u1 = JetSym::base(1, false);
        let a1 = Expr::unknown(Unknown::base(
            "A1",
            vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)],
            false,
        ));
        let e = a1.mul(&Expr::jet(u1));
        assert_eq!(e.diff_jet(u1), a1);
    }

    #[test]
    fn unknown_substitution_with_derivative() {
        // bind xi1(t,x) = t*x^2 and evaluate xi1_x
        let args = vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)];
        let base = Unknown::base("xi1", args.clone(), true);
        let mut dx = base.clone();
        dx.deriv[1] = 1;
        let mut map = BTreeMap::new();
        map.insert(Atom::Unk(base), t().mul(&x()).mul(&x()));
        let got = Expr::atom(Atom::Unk(dx)).substitute(&map);
        assert_eq!(got, t().mul(&x()).scale(&GRat::from_int(2)));
    }

    #[test]
    fn mixed_partials_commute() {
        let u = JetSym::base(1, false);
        let e = Expr::sin(x().mul(&t()))
            .mul(&Expr::jet(u))
            .add(&x().pow(3).mul(&t()))
            .mul(&Expr::exp(Expr::i().mul(&t())));
        let a = e.diff_coord(CoordId::X).diff_coord(CoordId::T);
        let b = e.diff_coord(CoordId::T).diff_coord(CoordId::X);
        assert_eq!(a, b);
    }

    #[test]
    fn canon_idempotent() {
        let u = JetSym::base(2, true);
        let e = Expr::sqrt(w())
            .mul(&Expr::exp(Expr::i().mul(&t())))
            .add(&Expr::jet(u).pow(2).mul(&Expr::one().add(&x()).pow(-2)))
            .sub(&Expr::rat(7, 3));
        assert_eq!(e.canon(), e);
        assert_eq!(e.canon().canon(), e.canon());
    }
}
