//! Recursive-descent parser for the expression grammar.
//!
//! # Grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' ['-'] integer)?
//! base   := integer | 'i' | ident | ident '(' expr (',' expr)* ')'
//!         | '(' expr ')' | '-' factor
//! ```
//!
//! Jet symbols are written `u1`, `u2_tx`, conjugates `cu1_x`. Coordinates
//! are `t`, `x`, `y`. The function names `sin`, `cos`, `tan`, `exp`,
//! `sqrt`, `arctan` and `conj` are reserved; every other identifier must be
//! declared in the [`SymbolContext`] as a parameter or an unknown function.
//! Unknown functions are referenced as `xi1(t,x)`; a derivative suffix
//! names coordinate directions, e.g. `xi1_tx(t,x)`.

use super::{Atom, CoordId, Expr, Func, JetSym, MultiIndex, ParamSym, UArg, Unknown};
use std::collections::BTreeMap;

/// Declared symbols visible to the parser.
#[derive(Debug, Clone, Default)]
pub struct SymbolContext {
    /// parameter name -> is complex (has a formal conjugate partner)
    pub params: BTreeMap<String, bool>,
    /// unknown-function name -> (argument slots, is real)
    pub unknowns: BTreeMap<String, (Vec<UArg>, bool)>,
    /// highest dependent-variable index accepted in jet symbols (default 4)
    pub max_dep: u8,
}

impl SymbolContext {
    pub fn new() -> Self {
        SymbolContext { params: BTreeMap::new(), unknowns: BTreeMap::new(), max_dep: 4 }
    }
    pub fn with_params(names: &[&str]) -> Self {
        let mut c = Self::new();
        for n in names {
            c.params.insert(n.to_string(), false);
        }
        c
    }
    pub fn add_param(&mut self, name: &str, complex: bool) -> &mut Self {
        self.params.insert(name.to_string(), complex);
        self
    }
    pub fn add_unknown(&mut self, name: &str, args: Vec<UArg>, real: bool) -> &mut Self {
        self.unknowns.insert(name.to_string(), (args, real));
        self
    }
    fn declared(&self) -> String {
        let mut names: Vec<&str> = self.params.keys().map(|s| s.as_str()).collect();
        names.extend(self.unknowns.keys().map(|s| s.as_str()));
        names.join(", ")
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

pub fn parse(text: &str, ctx: &SymbolContext) -> Result<Expr, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, ctx };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ctx: &'a SymbolContext,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { offset: self.pos, message: msg.to_string() }
    }
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat(b'/') {
                acc = acc.div(&self.factor()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let n = self.integer()? as i64;
            let n = if neg { -n } else { n };
            let e = base.pow(n);
            self.skip_ws();
            return Ok(e);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let v = s.parse::<u64>().map_err(|_| self.err("integer overflow"))?;
        self.skip_ws();
        Ok(v)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(self.factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::int(n as i64))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.err("expected expression")),
        }
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap().to_string();
        self.skip_ws();

        // reserved words
        if name == "i" {
            return Ok(Expr::i());
        }
        if let Some(f) = match name.as_str() {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "tan" => Some(Func::Tan),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "arctan" => Some(Func::Atan),
            _ => None,
        } {
            let args = self.call_args(start)?;
            if args.len() != 1 {
                return Err(ParseError {
                    offset: start,
                    message: format!("{} takes one argument", name),
                });
            }
            return Ok(Expr::func(f, args.into_iter().next().unwrap()));
        }
        if name == "conj" {
            let args = self.call_args(start)?;
            if args.len() != 1 {
                return Err(ParseError { offset: start, message: "conj takes one argument".into() });
            }
            return Ok(args[0].conj());
        }
        if let Some(c) = match name.as_str() {
            "t" => Some(CoordId::T),
            "x" => Some(CoordId::X),
            "y" => Some(CoordId::Y),
            _ => None,
        } {
            return Ok(Expr::coord(c));
        }
        if let Some(j) = self.jet_symbol(&name) {
            return Ok(Expr::jet(j));
        }
        if let Some(&complex) = self.ctx.params.get(&name) {
            return Ok(Expr::atom(Atom::Param(ParamSym { name, complex, conj: false })));
        }
        // unknown function, possibly conjugated and/or with a derivative
        // suffix (the printed form of a conjugated unknown is `conj_name`)
        let (inner, conjugated) = match name.strip_prefix("conj_") {
            Some(rest) => (rest.to_string(), true),
            None => (name.clone(), false),
        };
        let (uname, sfx) = match inner.split_once('_') {
            Some((a, b)) if self.ctx.unknowns.contains_key(a) => (a.to_string(), b.to_string()),
            _ => (inner.clone(), String::new()),
        };
        if let Some((args, real)) = self.ctx.unknowns.get(&uname).cloned() {
            let call = self.call_args(start)?;
            if call.len() != args.len() {
                return Err(ParseError {
                    offset: start,
                    message: format!("{} expects {} arguments", uname, args.len()),
                });
            }
            let mut u = Unknown::base(&uname, args.clone(), real);
            u.conj = conjugated && !real;
            for ch in sfx.chars() {
                let c = match ch {
                    't' => CoordId::T,
                    'x' => CoordId::X,
                    'y' => CoordId::Y,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            message: format!("bad derivative suffix `{}`", sfx),
                        })
                    }
                };
                match args.iter().position(|a| *a == UArg::Coord(c)) {
                    Some(k) => u.deriv[k] += 1,
                    None => {
                        return Err(ParseError {
                            offset: start,
                            message: format!("{} does not depend on {}", uname, c.name()),
                        })
                    }
                }
            }
            return Ok(Expr::unknown(u));
        }
        Err(ParseError {
            offset: start,
            message: format!(
                "unknown identifier `{}`; declared symbols: {}",
                name,
                self.ctx.declared()
            ),
        })
    }

    /// `u1`, `cu2_tx`, ... -> jet symbol
    fn jet_symbol(&self, name: &str) -> Option<JetSym> {
        let (conj, rest) = if let Some(r) = name.strip_prefix("cu") {
            (true, r)
        } else if let Some(r) = name.strip_prefix('u') {
            (false, r)
        } else {
            return None;
        };
        let (dep_str, sfx) = match rest.split_once('_') {
            Some((d, s)) => (d, s),
            None => (rest, ""),
        };
        let dep: u8 = dep_str.parse().ok()?;
        if dep == 0 || dep > self.ctx.max_dep {
            return None;
        }
        let mut idx = MultiIndex::zero();
        for ch in sfx.chars() {
            idx = match ch {
                't' => idx.bump(CoordId::T),
                'x' => idx.bump(CoordId::X),
                'y' => idx.bump(CoordId::Y),
                _ => return None,
            };
        }
        Some(JetSym { dep, conj, idx })
    }

    fn call_args(&mut self, start: usize) -> Result<Vec<Expr>, ParseError> {
        if !self.eat(b'(') {
            return Err(ParseError { offset: start, message: "expected `(`".into() });
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.err("expected `)`"));
        }
        Ok(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::GRat;

    fn ctx() -> SymbolContext {
        let mut c = SymbolContext::with_params(&["w", "M"]);
        c.add_param("kappa", true);
        c.add_unknown(
            "xi1",
            vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)],
            true,
        );
        c
    }

    #[test]
    fn literal_half() {
        assert_eq!(parse("1/2", &ctx()).unwrap(), Expr::rat(1, 2));
    }

    #[test]
    fn merged_exponential_product() {
        let e = parse("exp(2*i*w*t)*sin(w*t)", &ctx()).unwrap();
        // one term, two factors: exp and sin
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].mono.len(), 2);
    }

    #[test]
    fn oscillator_potential_term() {
        let e = parse("M*w^2*x^2/2", &ctx()).unwrap();
        let m = Expr::param("M");
        let w = Expr::param("w");
        let x = Expr::coord(CoordId::X);
        assert_eq!(
            e,
            m.mul(&w.pow(2)).mul(&x.pow(2)).scale(&GRat::from_rat(crate::expr::Rat::new(
                1.into(),
                2.into()
            )))
        );
    }

    #[test]
    fn jets_and_conjugates() {
        let e = parse("cu1_x * u2_tx", &ctx()).unwrap();
        let syms = e.jet_symbols();
        assert_eq!(syms.len(), 2);
        assert!(syms.iter().any(|j| j.conj && j.dep == 1));
    }

    #[test]
    fn unknown_with_suffix() {
        let e = parse("xi1_tx(t,x)", &ctx()).unwrap();
        assert!(e.has_unknowns());
    }

    #[test]
    fn unknown_identifier_lists_declared() {
        let err = parse("q + 1", &ctx()).unwrap_err();
        assert!(err.message.contains("declared symbols"));
        assert!(err.message.contains("xi1"));
    }

    #[test]
    fn syntax_error_has_offset() {
        let err = parse("1 + ", &ctx()).unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn round_trip_canonical_forms() {
        let samples = [
            "1/2 + x",
            "M*w^2*x^2",
            "exp(2*i*w*t)*sin(w*t)",
            "-1/2*x^2 + i*u1_x",
            "sqrt(w)*cu2",
            "(1 + x)^-2",
            "conj(kappa)*u1 + kappa*cu1",
            "xi1_t(t,x)*u1_x",
            "arctan(x)*tan(t)",
        ];
        for s in samples {
            let e = parse(s, &ctx()).unwrap();
            let printed = e.to_string();
            let back = parse(&printed, &ctx()).unwrap();
            assert_eq!(back, e, "round-trip failed for `{}` printed as `{}`", s, printed);
        }
    }
}
