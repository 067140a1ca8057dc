//! Numeric evaluation and the randomized zero-testing oracle.
//!
//! # Overview
//!
//! Canonicalization deliberately leaves trig/exponential identities alone
//! (`sin^2 + cos^2 - 1` does not simplify structurally). Every verification
//! in the workbench therefore funnels through [`is_zero`]: evaluate the
//! expression at seeded random points and accept zero only if every sample
//! is zero to within `10^-9 * (1 + max intermediate magnitude)`.
//!
//! Sampling ranges (documented safe windows):
//! * real parameters: uniform in `[0.5, 2.0]`,
//! * complex parameters: real and imaginary parts uniform in `[0.5, 2.0]`,
//!   with the conjugate partner bound consistently,
//! * coordinates: uniform in `[-2, 2]`, resampled when a `tan` argument
//!   lands within `10^-3` of a pole,
//! * jet symbols: complex values in the unit disk scaled by 2.
//!
//! Points causing evaluation singularities (near-zero divisors, `tan`
//! poles) are resampled, at most 100 times per trial.

use super::{Atom, Expr, Func};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Tolerances used by the oracle and its callers.
pub mod tol {
    /// Relative zero-acceptance threshold of the randomized oracle.
    pub const ORACLE: f64 = 1e-9;
    /// Guard radius around `tan` poles and near-zero divisors.
    pub const SINGULAR: f64 = 1e-3;
    /// Near-zero divisor guard for integer powers.
    pub const DIVISOR: f64 = 1e-8;
    /// Resample cap per trial.
    pub const RESAMPLE_CAP: usize = 100;
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}` during numeric evaluation")]
    Unbound(String),
    #[error("evaluation singularity (near-zero divisor or tan pole)")]
    Singular,
    #[error("resample cap exhausted while avoiding singularities")]
    ResampleCap,
}

/// A numeric assignment for parameter, coordinate and jet atoms.
pub type EvalPoint = BTreeMap<Atom, Complex64>;

/// Evaluate `e` at `p`, also returning the maximum magnitude seen at any
/// intermediate node (used to scale the oracle tolerance).
pub fn eval(e: &Expr, p: &EvalPoint) -> Result<(Complex64, f64), EvalError> {
    let mut mag = 0.0f64;
    let v = eval_expr(e, p, &mut mag)?;
    Ok((v, mag))
}

/// Convenience wrapper returning only the value.
pub fn eval_value(e: &Expr, p: &EvalPoint) -> Result<Complex64, EvalError> {
    eval(e, p).map(|(v, _)| v)
}

fn note(mag: &mut f64, v: Complex64) -> Complex64 {
    let n = v.norm();
    if n > *mag {
        *mag = n;
    }
    v
}

fn eval_expr(e: &Expr, p: &EvalPoint, mag: &mut f64) -> Result<Complex64, EvalError> {
    let mut sum = Complex64::new(0.0, 0.0);
    for t in e.terms() {
        let mut prod = Complex64::new(
            rat_f64(&t.coeff.re),
            rat_f64(&t.coeff.im),
        );
        for (a, n) in &t.mono {
            let v = eval_atom(a, p, mag)?;
            let base = note(mag, v);
            if *n < 0 && base.norm() < tol::DIVISOR {
                return Err(EvalError::Singular);
            }
            prod *= base.powi(*n as i32);
        }
        note(mag, prod);
        sum += prod;
        note(mag, sum);
    }
    Ok(sum)
}

fn rat_f64(r: &super::Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // extremely large rationals: fall back to quotient of approximations
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

fn eval_atom(a: &Atom, p: &EvalPoint, mag: &mut f64) -> Result<Complex64, EvalError> {
    match a {
        Atom::Param(_) | Atom::Coord(_) | Atom::Jet(_) => p
            .get(a)
            .copied()
            .ok_or_else(|| EvalError::Unbound(super::atom_str(a))),
        Atom::Unk(u) => Err(EvalError::Unbound(u.name.clone())),
        Atom::Apply(f, arg) => {
            let z = eval_expr(arg, p, mag)?;
            Ok(match f {
                Func::Sin => z.sin(),
                Func::Cos => z.cos(),
                Func::Tan => {
                    if z.cos().norm() < tol::SINGULAR {
                        return Err(EvalError::Singular);
                    }
                    z.tan()
                }
                Func::Exp => z.exp(),
                Func::Sqrt => z.sqrt(),
                Func::Atan => {
                    if (z - Complex64::i()).norm() < tol::SINGULAR
                        || (z + Complex64::i()).norm() < tol::SINGULAR
                    {
                        return Err(EvalError::Singular);
                    }
                    z.atan()
                }
            })
        }
        Atom::SumPow(s) => eval_expr(s, p, mag),
    }
}

/// Configuration for the randomized zero oracle.
#[derive(Debug, Clone)]
pub struct OracleCfg {
    pub seed: u64,
    pub trials: u32,
    /// Pinned values (e.g. a numeric deformation angle) applied after
    /// sampling. Keys must be parameter atoms.
    pub fixed: EvalPoint,
}

impl OracleCfg {
    pub fn new(seed: u64, trials: u32) -> Self {
        OracleCfg { seed, trials, fixed: EvalPoint::new() }
    }
    /// Derive an independent sub-oracle; used so that parallel checks under
    /// one seed remain reproducible.
    pub fn derive(&self, salt: u64) -> Self {
        let mut c = self.clone();
        c.seed = c.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt);
        c
    }
}

/// Outcome of a zero test.
#[derive(Debug, Clone)]
pub enum ZeroResult {
    Zero,
    NonZero { point: EvalPoint, value: Complex64 },
}

impl ZeroResult {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroResult::Zero)
    }
    pub fn witness_string(&self) -> String {
        match self {
            ZeroResult::Zero => "zero".into(),
            ZeroResult::NonZero { point, value } => {
                let vars: Vec<String> = point
                    .iter()
                    .map(|(a, v)| format!("{}={:.4}{:+.4}i", super::atom_str(a), v.re, v.im))
                    .collect();
                format!("value {:.3e}{:+.3e}i at {}", value.re, value.im, vars.join(", "))
            }
        }
    }
}

/// Draw one random point for the free symbols of `e`.
pub(crate) fn sample_point(
    free: &std::collections::BTreeSet<Atom>,
    rng: &mut ChaCha8Rng,
    fixed: &EvalPoint,
) -> EvalPoint {
    let mut p = EvalPoint::new();
    // complex parameters are sampled once per name so the conjugate partner
    // stays consistent
    let mut complex_vals: BTreeMap<String, Complex64> = BTreeMap::new();
    for a in free {
        match a {
            Atom::Param(ps) => {
                if ps.complex {
                    let z = *complex_vals.entry(ps.name.clone()).or_insert_with(|| {
                        Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
                    });
                    p.insert(a.clone(), if ps.conj { z.conj() } else { z });
                } else {
                    p.insert(a.clone(), Complex64::new(rng.gen_range(0.5..2.0), 0.0));
                }
            }
            Atom::Coord(_) => {
                p.insert(a.clone(), Complex64::new(rng.gen_range(-2.0..2.0), 0.0));
            }
            Atom::Jet(_) => {
                let z = loop {
                    let re = rng.gen_range(-1.0..1.0);
                    let im = rng.gen_range(-1.0..1.0);
                    if re * re + im * im <= 1.0 {
                        break Complex64::new(2.0 * re, 2.0 * im);
                    }
                };
                p.insert(a.clone(), z);
            }
            _ => {}
        }
    }
    for (k, v) in fixed {
        p.insert(k.clone(), *v);
    }
    p
}

/// Randomized zero test. `e` must be free of unknown-function atoms.
pub fn is_zero(e: &Expr, cfg: &OracleCfg) -> Result<ZeroResult, EvalError> {
    assert!(cfg.trials >= 1);
    if e.is_zero_structural() {
        return Ok(ZeroResult::Zero);
    }
    let mut free = std::collections::BTreeSet::new();
    e.free_symbols(&mut free);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.trials {
        let mut attempt = 0;
        let (point, value, mag) = loop {
            let p = sample_point(&free, &mut rng, &cfg.fixed);
            match eval(e, &p) {
                Ok((v, m)) => break (p, v, m),
                Err(EvalError::Singular) => {
                    attempt += 1;
                    if attempt >= tol::RESAMPLE_CAP {
                        return Err(EvalError::ResampleCap);
                    }
                }
                Err(other) => return Err(other),
            }
        };
        if value.norm() > tol::ORACLE * (1.0 + mag) {
            return Ok(ZeroResult::NonZero { point, value });
        }
    }
    Ok(ZeroResult::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{CoordId, Expr, Func, JetSym};

    fn cfg() -> OracleCfg {
        OracleCfg::new(42, 20)
    }

    #[test]
    fn pythagorean_identity_is_zero() {
        let w = Expr::param("w");
        let t = Expr::coord(CoordId::T);
        let s = Expr::sin(w.mul(&t));
        let c = Expr::cos(w.mul(&t));
        let e = s.mul(&s).add(&c.mul(&c)).sub(&Expr::one());
        assert!(is_zero(&e, &cfg()).unwrap().is_zero());
    }

    #[test]
    fn nonzero_monomial_rejected_with_witness() {
        let e = Expr::coord(CoordId::X).mul(&Expr::jet(JetSym::base(1, false)));
        match is_zero(&e, &cfg()).unwrap() {
            ZeroResult::NonZero { value, .. } => assert!(value.norm() > 1e-9),
            ZeroResult::Zero => panic!("x*u1 accepted as zero"),
        }
    }

    #[test]
    fn thousand_random_monomials_rejected() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in 0..1000 {
            let mut e = Expr::rat(rng.gen_range(1..5), rng.gen_range(1..4));
            for _ in 0..rng.gen_range(1..4) {
                let f = match rng.gen_range(0..4) {
                    0 => Expr::coord(CoordId::X),
                    1 => Expr::coord(CoordId::T),
                    2 => Expr::jet(JetSym::base(rng.gen_range(1..3), rng.gen_bool(0.5))),
                    _ => Expr::param("w"),
                };
                e = e.mul(&f.pow(rng.gen_range(1..3)));
            }
            let r = is_zero(&e, &OracleCfg::new(1000 + k, 20)).unwrap();
            assert!(!r.is_zero(), "spurious zero for {}", e);
        }
    }

    #[test]
    fn euler_identity_numeric() {
        // exp(i*pi-approx) ~ -1 to 1e-12 with a good rational pi
        let pi = Expr::rat(245_850_922, 78_256_779);
        let e = Expr::func(Func::Exp, Expr::i().mul(&pi));
        let (v, _) = eval(&e, &EvalPoint::new()).unwrap();
        assert!((v + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tan_pole_resampled_not_fatal() {
        let t = Expr::coord(CoordId::T);
        let e = Expr::func(Func::Tan, t.clone()).mul(&Expr::func(Func::Tan, t).pow(-1)).sub(&Expr::one());
        assert!(is_zero(&e, &cfg()).unwrap().is_zero());
    }
}
