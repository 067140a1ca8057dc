//! The supersymmetric harmonic oscillator: a 2-component system with a
//! 13-dimensional symmetry algebra, an `osp(2/2)` super-extension and the
//! super-Heisenberg algebra `sh(2/2)`.
//!
//! # Overview
//!
//! The Hamiltonian is `H = (-(1/2M) Dx^2 + M w^2 x^2 / 2) σ0 - (w/2) σ3`;
//! the grading is `σ3`. Generators are stored in solution-space form (no
//! `Dt`, explicit `e^{±ikwt}` phases). The supercharges arise as products
//! of matrix raising/lowering operators `T±(t)` with the dressed ladder
//! operators `A∓(t)`.

use super::*;
use crate::expr::{JetSym, UArg, Unknown};
use crate::prolong::AnsatzSolution;

fn w() -> Expr {
    Expr::param("w")
}
fn mm() -> Expr {
    Expr::param("M")
}

/// `(Mw x ± Dx) / sqrt(2Mw)` — the 1×1 ladder operators.
fn ladder(annihilation: bool) -> MatrixDiffOp {
    let norm = Expr::sqrt(Expr::int(2).mul(&mm()).mul(&w())).pow(-1);
    let mx = MatrixDiffOp::mult(mm().mul(&w()).mul(&xc()));
    let dx = MatrixDiffOp::d(CoordId::X);
    if annihilation {
        mx.add(&dx).scale(&norm)
    } else {
        mx.sub(&dx).scale(&norm)
    }
}

/// Normalized Hermite-Gaussian eigenfunction `ψ_n(x)`.
fn psi(n: u32) -> Expr {
    let mw = mm().mul(&w());
    let z = Expr::sqrt(mw.clone()).mul(&xc());
    let quartic = Expr::sqrt(Expr::sqrt(mw.mul(&Expr::param("pi").pow(-1))));
    let gauss = Expr::exp(mw.mul(&xc()).mul(&xc()).mul(&Expr::rat(-1, 2)));
    let factorial: i64 = (1..=n as i64).product::<i64>().max(1);
    let norm: i64 = (1 << n) * factorial;
    hermite(n, &z)
        .mul(&quartic)
        .mul(&gauss)
        .mul(&Expr::sqrt(Expr::int(norm)).pow(-1))
}

fn top(n: u32) -> SolutionDef {
    // E = n w on the upper component
    SolutionDef {
        name: format!("top_n{n}"),
        components: vec![psi(n).mul(&phase(-(n as i64), &w())), Expr::zero()],
    }
}
fn bottom(n: u32) -> SolutionDef {
    // E = (n+1) w on the lower component
    SolutionDef {
        name: format!("bottom_n{n}"),
        components: vec![Expr::zero(), psi(n).mul(&phase(-(n as i64 + 1), &w()))],
    }
}

pub(super) fn solutions_at(n: u32) -> Vec<SolutionDef> {
    vec![top(n), bottom(n)]
}

pub fn susy_oscillator() -> ModelSpec {
    let s0 = MatrixDiffOp::sigma0();
    let s3 = MatrixDiffOp::sigma3();
    let a = ladder(true);
    let ad = ladder(false);
    let half = Expr::rat(1, 2);

    // H0 = w (a† a + 1/2) σ0
    let h0 = ad
        .compose(&a)
        .unwrap()
        .add(&MatrixDiffOp::identity(1).scale(&half))
        .scale(&w())
        .kron(&s0);
    // C∓ = (i w / 2) e^{±2iwt} a^2 / a†^2  σ0
    let iw2 = Expr::i().mul(&w()).mul(&half);
    let cm = a.compose(&a).unwrap().kron(&s0).scale(&iw2.mul(&phase(2, &w())));
    let cp = ad.compose(&ad).unwrap().kron(&s0).scale(&iw2.mul(&phase(-2, &w())));
    let am = a.kron(&s0).scale(&phase(1, &w()));
    let ap = ad.kron(&s0).scale(&phase(-1, &w()));
    let ident = MatrixDiffOp::identity(2);
    let tp = MatrixDiffOp::sigma_plus().scale(&phase(1, &w()));
    let tm = MatrixDiffOp::sigma_minus().scale(&phase(-1, &w()));
    let y = s3.scale(&half);

    // H_SUSY = H0 - w Y
    let hs = h0.sub(&y.scale(&w()));

    let aux = vec![
        even("H0", h0.clone()),
        even("C-", cm.clone()),
        even("C+", cp.clone()),
        even("A-", am.clone()),
        even("A+", ap.clone()),
        even("I", ident.clone()),
        odd("T+", tp.clone()),
        odd("T-", tm.clone()),
        even("Y", y.clone()),
        even("HS", hs.clone()),
    ];

    // generators X1..X13 as linear combinations of the auxiliaries
    let i_ = Expr::i();
    let inv2w = half.mul(&w().pow(-1));
    let s = Expr::sqrt(Expr::int(2).mul(&mm()).mul(&w()));
    let x1 = cm.scale(&i_.neg().mul(&inv2w)).add(&cp.scale(&i_.mul(&inv2w)));
    let x2 = cm.add(&cp).scale(&inv2w.neg());
    let x3 = h0.scale(&i_.neg());
    let x4 = am.sub(&ap).scale(&s.mul(&half));
    let x5 = am.add(&ap).scale(&i_.neg().mul(&s).mul(&half));
    let x6 = ident.scale(&i_.neg());
    let x9 = y.scale(&Expr::int(2));
    let x10 = tp.scale(&i_);
    let x11 = tm.scale(&i_);
    let x12 = y.scale(&Expr::int(2).mul(&i_));
    let generators = vec![
        even("X1", x1),
        even("X2", x2),
        even("X3", x3),
        even("X4", x4),
        even("X5", x5),
        even("X6", x6),
        odd("X7", tp.clone()),
        odd("X8", tm.clone()),
        even("X9", x9),
        odd("X10", x10),
        odd("X11", x11),
        even("X12", x12),
        even("X13", ident.clone()),
    ];

    let products = vec![
        ProductDef {
            name: "Q+".into(),
            factors: vec!["T+".into(), "A+".into()],
            scale: Expr::sqrt(w()),
        },
        ProductDef {
            name: "Q-".into(),
            factors: vec!["T-".into(), "A-".into()],
            scale: Expr::sqrt(w()),
        },
        ProductDef {
            name: "S+".into(),
            factors: vec!["T+".into(), "A-".into()],
            scale: Expr::sqrt(w()),
        },
        ProductDef {
            name: "S-".into(),
            factors: vec!["T-".into(), "A+".into()],
            scale: Expr::sqrt(w()),
        },
    ];

    let tables = vec![table1(), table2(), table3(), table4()];

    let mut checks = vec![
        ck("sh22_boson", CheckKind::Commutator, "A-", Some("A+"), vec![(Expr::one(), "I")]),
        ck("sh22_fermion", CheckKind::Anticommutator, "T-", Some("T+"), vec![(Expr::one(), "I")]),
        ck("Q+_nilpotent", CheckKind::Square, "Q+", None, vec![]),
        ck("Q-_nilpotent", CheckKind::Square, "Q-", None, vec![]),
        ck("S+_nilpotent", CheckKind::Square, "S+", None, vec![]),
        ck("S-_nilpotent", CheckKind::Square, "S-", None, vec![]),
        ck("HS_commutes_Q+", CheckKind::Commutator, "HS", Some("Q+"), vec![]),
        ck("HS_commutes_Q-", CheckKind::Commutator, "HS", Some("Q-"), vec![]),
    ];
    for k in 1..=12 {
        checks.push(ck(
            &format!("X13_central_X{k}"),
            CheckKind::Commutator,
            "X13",
            Some(&format!("X{k}")),
            vec![],
        ));
    }
    for name in [
        "X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10", "X11", "X12", "X13",
        "Q+", "Q-", "S+", "S-",
    ] {
        checks.push(ck(
            &format!("symmetry_{name}"),
            CheckKind::SymmetryResidual,
            name,
            None,
            vec![],
        ));
    }

    let mut params = vec![
        ParamDef { name: "M".into(), complex: false, positive: true },
        ParamDef { name: "w".into(), complex: false, positive: true },
    ];
    for k in 1..=13 {
        params.push(ParamDef { name: format!("d{k}"), complex: false, positive: false });
    }

    ModelSpec {
        name: "susy_oscillator".into(),
        coords: vec![CoordId::T, CoordId::X],
        dim: 2,
        params,
        definitions: vec![],
        fixed_params: vec![("pi".into(), std::f64::consts::PI)],
        hamiltonian: hs.clone(),
        grading: MatrixDiffOp::sigma3(),
        generators,
        aux_ops: aux,
        products,
        sums: vec![],
        tables,
        checks,
        span_checks: vec![],
        solutions: vec![top(0), top(1), top(2), bottom(0), bottom(1)],
        ansatz: Some(ansatz()),
        shift: None,
    }
}

fn table1() -> StructureTable {
    let w_ = w();
    let half = Expr::rat(1, 2);
    let inv2w = half.mul(&w_.pow(-1));
    let names: Vec<String> = (1..=6).map(|k| format!("X{k}")).collect();
    StructureTable {
        name: "table1".into(),
        description: "commutators of the kinematical generators X1..X6".into(),
        rows: names.clone(),
        cols: names,
        graded: false,
        cells: vec![
            cell(0, 1, vec![(inv2w.clone(), "X3")]),
            cell(0, 2, vec![(Expr::int(2).mul(&w_), "X2")]),
            cell(0, 3, vec![(half.neg(), "X4")]),
            cell(0, 4, vec![(half.clone(), "X5")]),
            cell(1, 0, vec![(inv2w.neg(), "X3")]),
            cell(1, 2, vec![(Expr::int(-2).mul(&w_), "X1")]),
            cell(1, 3, vec![(half.neg(), "X5")]),
            cell(1, 4, vec![(half.neg(), "X4")]),
            cell(2, 0, vec![(Expr::int(-2).mul(&w_), "X2")]),
            cell(2, 1, vec![(Expr::int(2).mul(&w_), "X1")]),
            cell(2, 3, vec![(w_.neg(), "X5")]),
            cell(2, 4, vec![(w_.clone(), "X4")]),
            cell(3, 0, vec![(half.clone(), "X4")]),
            cell(3, 1, vec![(half.clone(), "X5")]),
            cell(3, 2, vec![(w_.clone(), "X5")]),
            cell(3, 4, vec![(mm().mul(&w_), "X6")]),
            cell(4, 0, vec![(half.neg(), "X5")]),
            cell(4, 1, vec![(half.clone(), "X4")]),
            cell(4, 2, vec![(w_.neg(), "X4")]),
            cell(4, 3, vec![(mm().neg().mul(&w_), "X6")]),
        ],
    }
}

fn table2() -> StructureTable {
    let one = Expr::one;
    let two = || Expr::int(2);
    let m2 = || Expr::int(-2);
    let names: Vec<String> = (7..=12).map(|k| format!("X{k}")).collect();
    StructureTable {
        name: "table2".into(),
        description: "commutators of the matrix generators X7..X12".into(),
        rows: names.clone(),
        cols: names,
        graded: false,
        cells: vec![
            cell(0, 1, vec![(one(), "X9")]),
            cell(0, 2, vec![(m2(), "X7")]),
            cell(0, 4, vec![(one(), "X12")]),
            cell(0, 5, vec![(m2(), "X10")]),
            cell(1, 0, vec![(one().neg(), "X9")]),
            cell(1, 2, vec![(two(), "X8")]),
            cell(1, 3, vec![(one().neg(), "X12")]),
            cell(1, 5, vec![(two(), "X11")]),
            cell(2, 0, vec![(two(), "X7")]),
            cell(2, 1, vec![(m2(), "X8")]),
            cell(2, 3, vec![(two(), "X10")]),
            cell(2, 4, vec![(m2(), "X11")]),
            cell(3, 1, vec![(one(), "X12")]),
            cell(3, 2, vec![(m2(), "X10")]),
            cell(3, 4, vec![(one().neg(), "X9")]),
            cell(3, 5, vec![(two(), "X7")]),
            cell(4, 0, vec![(one().neg(), "X12")]),
            cell(4, 2, vec![(two(), "X11")]),
            cell(4, 3, vec![(one(), "X9")]),
            cell(4, 5, vec![(m2(), "X8")]),
            cell(5, 0, vec![(two(), "X10")]),
            cell(5, 1, vec![(m2(), "X11")]),
            cell(5, 3, vec![(m2(), "X7")]),
            cell(5, 4, vec![(two(), "X8")]),
        ],
    }
}

fn table3() -> StructureTable {
    let w_ = w();
    let i_ = Expr::i;
    let iw = || Expr::i().mul(&w());
    let names: Vec<String> = ["H0", "C-", "C+", "Y", "Q-", "Q+", "S-", "S+"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    StructureTable {
        name: "table3".into(),
        description: "graded brackets of the osp(2/2) basis".into(),
        rows: names.clone(),
        cols: names,
        graded: true,
        cells: vec![
            cell(0, 1, vec![(Expr::int(-2).mul(&w_), "C-")]),
            cell(0, 2, vec![(Expr::int(2).mul(&w_), "C+")]),
            cell(0, 4, vec![(w_.neg(), "Q-")]),
            cell(0, 5, vec![(w_.clone(), "Q+")]),
            cell(0, 6, vec![(w_.clone(), "S-")]),
            cell(0, 7, vec![(w_.neg(), "S+")]),
            cell(1, 0, vec![(Expr::int(2).mul(&w_), "C-")]),
            cell(1, 2, vec![(w_.neg(), "H0")]),
            cell(1, 5, vec![(iw(), "S+")]),
            cell(1, 6, vec![(iw(), "Q-")]),
            cell(2, 0, vec![(Expr::int(-2).mul(&w_), "C+")]),
            cell(2, 1, vec![(w_.clone(), "H0")]),
            cell(2, 4, vec![(iw().neg(), "S-")]),
            cell(2, 7, vec![(iw().neg(), "Q+")]),
            cell(3, 4, vec![(Expr::one().neg(), "Q-")]),
            cell(3, 5, vec![(Expr::one(), "Q+")]),
            cell(3, 6, vec![(Expr::one().neg(), "S-")]),
            cell(3, 7, vec![(Expr::one(), "S+")]),
            cell(4, 0, vec![(w_.clone(), "Q-")]),
            cell(4, 2, vec![(iw(), "S-")]),
            cell(4, 3, vec![(Expr::one(), "Q-")]),
            cell(4, 5, vec![(Expr::one(), "H0"), (w_.neg(), "Y")]),
            cell(4, 7, vec![(Expr::int(-2).mul(&i_()), "C-")]),
            scell(
                5,
                0,
                vec![(w_.clone(), "Q+")],
                "antisymmetry with the (H0, Q+) cell forces -w*Q+",
            ),
            scell(
                5,
                1,
                vec![(iw(), "S+")],
                "the direct bracket gives -i*w*S+",
            ),
            cell(5, 3, vec![(Expr::one().neg(), "Q+")]),
            cell(5, 4, vec![(Expr::one(), "H0"), (w_.neg(), "Y")]),
            cell(5, 6, vec![(Expr::int(-2).mul(&i_()), "C+")]),
            cell(6, 0, vec![(w_.neg(), "S-")]),
            cell(6, 1, vec![(iw().neg(), "Q-")]),
            scell(
                6,
                3,
                vec![(Expr::int(2), "S-")],
                "the direct bracket gives S- (coefficient 1)",
            ),
            cell(6, 5, vec![(Expr::int(-2).mul(&i_()), "C+")]),
            cell(6, 7, vec![(Expr::one(), "H0"), (w_.clone(), "Y")]),
            cell(7, 0, vec![(w_.clone(), "S+")]),
            cell(7, 2, vec![(iw(), "Q+")]),
            scell(
                7,
                3,
                vec![(Expr::int(-2), "S-")],
                "the direct bracket gives -S+",
            ),
            cell(7, 4, vec![(Expr::int(-2).mul(&i_()), "C-")]),
            cell(7, 6, vec![(Expr::one(), "H0"), (w_.clone(), "Y")]),
        ],
    }
}

fn table4() -> StructureTable {
    let w_ = w();
    let sw = || Expr::sqrt(w());
    let iw = || Expr::i().mul(&w());
    StructureTable {
        name: "table4".into(),
        description: "graded brackets pairing sh(2/2) with the osp(2/2) basis".into(),
        rows: ["A-", "A+", "I", "T-", "T+"].iter().map(|s| s.to_string()).collect(),
        cols: ["H0", "C-", "C+", "Y", "Q-", "Q+", "S-", "S+"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        graded: true,
        cells: vec![
            cell(0, 0, vec![(w_.clone(), "A-")]),
            cell(0, 2, vec![(iw(), "A+")]),
            cell(0, 5, vec![(sw(), "T+")]),
            cell(0, 6, vec![(sw(), "T-")]),
            cell(1, 0, vec![(w_.neg(), "A+")]),
            cell(1, 1, vec![(iw().neg(), "A-")]),
            cell(1, 4, vec![(sw().neg(), "T-")]),
            cell(1, 7, vec![(sw().neg(), "T+")]),
            cell(3, 3, vec![(Expr::one(), "T-")]),
            cell(3, 5, vec![(sw(), "A+")]),
            cell(3, 7, vec![(sw(), "A-")]),
            cell(4, 3, vec![(Expr::one().neg(), "T+")]),
            cell(4, 4, vec![(sw(), "A-")]),
            cell(4, 6, vec![(sw(), "A+")]),
        ],
    }
}

/// The 13-parameter symmetry ansatz: generic unknown-coefficient field and
/// the closed-form solution of the determining equations.
fn ansatz() -> ModelAnsatz {
    let coords = vec![CoordId::T, CoordId::X];
    let deps = vec![(1u8, false), (2u8, false), (1u8, true), (2u8, true)];
    let jet_args: Vec<UArg> = deps.iter().map(|&(d, c)| UArg::Jet(JetSym::base(d, c))).collect();
    let mut xi_args = vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)];
    xi_args.extend(jet_args.iter().cloned());
    let phi_args = xi_args.clone();

    let xi1 = Unknown::base("xi1", xi_args.clone(), true);
    let xi2 = Unknown::base("xi2", xi_args, true);
    let ph1 = Unknown::base("Phi1", phi_args.clone(), false);
    let ph2 = Unknown::base("Phi2", phi_args.clone(), false);
    let pb1 = Unknown::base("Phib1", phi_args.clone(), false);
    let pb2 = Unknown::base("Phib2", phi_args, false);

    let field = JetVectorField {
        coords,
        deps,
        xi: vec![Expr::unknown(xi1.clone()), Expr::unknown(xi2.clone())],
        phi: vec![
            Expr::unknown(ph1.clone()),
            Expr::unknown(ph2.clone()),
            Expr::unknown(pb1.clone()),
            Expr::unknown(pb2.clone()),
        ],
    };

    let d = |k: usize| Expr::param(&format!("d{k}"));
    let w_ = w();
    let t2 = Expr::int(2).mul(&w_).mul(&tc());
    let (s2, c2) = (Expr::sin(t2.clone()), Expr::cos(t2));
    let t1 = w_.mul(&tc());
    let (s1, c1) = (Expr::sin(t1.clone()), Expr::cos(t1));
    let half = Expr::rat(1, 2);
    let quarter = Expr::rat(1, 4);
    let inv2w = half.mul(&w_.pow(-1));
    let i_ = Expr::i();
    let mwx2 = mm().mul(&w_).mul(&xc()).mul(&xc());
    let mwx = mm().mul(&w_).mul(&xc());

    let xi1_val = d(1).mul(&s2).sub(&d(2).mul(&c2)).mul(&inv2w).add(&d(3));
    let xi2_val = d(1)
        .mul(&c2)
        .add(&d(2).mul(&s2))
        .mul(&half)
        .mul(&xc())
        .add(&d(4).mul(&c1))
        .add(&d(5).mul(&s1));

    // coefficients of the linear-in-Ψ part of Φ
    let a1 = phase(-2, &w_)
        .add(&Expr::int(2).mul(&i_).mul(&mwx2).mul(&s2))
        .mul(&quarter.neg())
        .mul(&d(1))
        .sub(
            &phase(-2, &w_)
                .sub(&Expr::int(2).mul(&mwx2).mul(&c2))
                .mul(&i_.mul(&quarter))
                .mul(&d(2)),
        )
        .sub(&i_.mul(&mwx).mul(&d(4).mul(&s1).sub(&d(5).mul(&c1))))
        .add(&d(13))
        .add(&i_.mul(&d(6)));
    let a2 = d(7).sub(&i_.mul(&d(10))).mul(&phase(1, &w_));
    let b1 = d(8).sub(&i_.mul(&d(11))).mul(&phase(-1, &w_));
    let b2 = phase(2, &w_)
        .add(&Expr::int(2).mul(&i_).mul(&mwx2).mul(&s2))
        .mul(&quarter.neg())
        .mul(&d(1))
        .add(
            &phase(2, &w_)
                .add(&Expr::int(2).mul(&mwx2).mul(&c2))
                .mul(&i_.mul(&quarter))
                .mul(&d(2)),
        )
        .sub(&i_.mul(&mwx).mul(&d(4).mul(&s1).sub(&d(5).mul(&c1))))
        .add(&d(9))
        .add(&i_.mul(&d(12)));

    let u1 = Expr::jet(JetSym::base(1, false));
    let u2 = Expr::jet(JetSym::base(2, false));
    let a0 = Unknown::base(
        "A0",
        vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)],
        false,
    );
    let b0 = Unknown::base(
        "B0",
        vec![UArg::Coord(CoordId::T), UArg::Coord(CoordId::X)],
        false,
    );
    let phi1_val = Expr::unknown(a0.clone())
        .add(&a1.mul(&u1))
        .add(&a2.mul(&u2));
    let phi2_val = Expr::unknown(b0.clone())
        .add(&b1.mul(&u1))
        .add(&b2.mul(&u2));

    let solution = AnsatzSolution {
        bindings: vec![
            (xi1, xi1_val),
            (xi2, xi2_val),
            (ph1, phi1_val.clone()),
            (ph2, phi2_val.clone()),
            (pb1, phi1_val.conj()),
            (pb2, phi2_val.conj()),
        ],
        free_functions: vec![
            (a0, vec![psi(1).mul(&phase(-1, &w_)), Expr::zero()]),
            (b0, vec![psi(0).mul(&phase(-1, &w_)), Expr::zero()]),
        ],
        conjugate_pairs: vec![
            ("Phib1".into(), "Phi1".into()),
            ("Phib2".into(), "Phi2".into()),
        ],
    };

    ModelAnsatz { delta_count: 13, order: 2, field, solution, variants: vec![] }
}
