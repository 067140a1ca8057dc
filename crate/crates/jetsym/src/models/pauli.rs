//! The 2D Pauli system: a spin-1/2 particle in a constant magnetic field,
//! with a 16-generator symmetry algebra and an `osp(2/2)` super-extension
//! built from two families of circular ladder operators.
//!
//! # Overview
//!
//! With `w = eB/(2M)` and `wt = eB/M = 2w` stored as definitions, the
//! Hamiltonian is `H_P = (p²/2M + M w² r²/2 - w L) σ0 - w σ3`, with
//! `L = x p_y - y p_x` the angular momentum. The two circular modes are
//!
//! * `Acal(t) = e^{2iwt} (a_y - i a_x)/√2` — lowers `H0` by `w` and raises
//!   `L` by one, so it lowers `H_P` by `wt`;
//! * `A- = -(a_y + i a_x)/√2` — lowers `H0` by `w` and lowers `L` by one,
//!   a time-independent symmetry of `H_P`.
//!
//! Supercharges pair each family with the matrix raising/lowering
//! operators `T±(t) = e^{±2iwt} σ±`. This module also exports the ladder
//! building blocks reused by the Jaynes–Cummings family.

use super::*;

fn w() -> Expr {
    Expr::param("w")
}
fn wt() -> Expr {
    Expr::param("wt")
}
fn mm() -> Expr {
    Expr::param("M")
}

/// 1×1 ladder operator in coordinate `c`: `(Mw c ± D_c)/sqrt(2Mw)`.
fn ladder(c: CoordId, annihilation: bool) -> MatrixDiffOp {
    let norm = Expr::sqrt(Expr::int(2).mul(&mm()).mul(&w())).pow(-1);
    let mx = MatrixDiffOp::mult(mm().mul(&w()).mul(&Expr::coord(c)));
    let dc = MatrixDiffOp::d(c);
    if annihilation {
        mx.add(&dc).scale(&norm)
    } else {
        mx.sub(&dc).scale(&norm)
    }
}

/// 1×1 circular lowering mode `(a_y - i a_x)/√2` (the `Acal(0)` core).
pub(super) fn acal0_scalar() -> MatrixDiffOp {
    let inv_sqrt2 = Expr::sqrt(Expr::int(2)).pow(-1);
    ladder(CoordId::Y, true)
        .sub(&ladder(CoordId::X, true).scale(&Expr::i()))
        .scale(&inv_sqrt2)
}
/// 1×1 circular raising mode `(a_y† + i a_x†)/√2` (the `Acal†(0)` core).
pub(super) fn acal0_dag_scalar() -> MatrixDiffOp {
    let inv_sqrt2 = Expr::sqrt(Expr::int(2)).pow(-1);
    ladder(CoordId::Y, false)
        .add(&ladder(CoordId::X, false).scale(&Expr::i()))
        .scale(&inv_sqrt2)
}
/// 1×1 `A- = -(a_y + i a_x)/√2`.
pub(super) fn aminus_scalar() -> MatrixDiffOp {
    let inv_sqrt2 = Expr::sqrt(Expr::int(2)).pow(-1);
    ladder(CoordId::Y, true)
        .add(&ladder(CoordId::X, true).scale(&Expr::i()))
        .scale(&inv_sqrt2.neg())
}
/// 1×1 `A+ = -(a_y† - i a_x†)/√2`.
pub(super) fn aplus_scalar() -> MatrixDiffOp {
    let inv_sqrt2 = Expr::sqrt(Expr::int(2)).pow(-1);
    ladder(CoordId::Y, false)
        .sub(&ladder(CoordId::X, false).scale(&Expr::i()))
        .scale(&inv_sqrt2.neg())
}

/// 1×1 angular momentum `L = x p_y - y p_x = -i (x Dy - y Dx)`.
pub(super) fn l_scalar() -> MatrixDiffOp {
    MatrixDiffOp::mult(xc())
        .compose(&MatrixDiffOp::d(CoordId::Y))
        .unwrap()
        .sub(
            &MatrixDiffOp::mult(yc())
                .compose(&MatrixDiffOp::d(CoordId::X))
                .unwrap(),
        )
        .scale(&Expr::i().neg())
}

/// 1×1 planar oscillator `w (a_x† a_x + a_y† a_y + 1)`.
pub(super) fn h0_scalar() -> MatrixDiffOp {
    ladder(CoordId::X, false)
        .compose(&ladder(CoordId::X, true))
        .unwrap()
        .add(
            &ladder(CoordId::Y, false)
                .compose(&ladder(CoordId::Y, true))
                .unwrap(),
        )
        .add(&MatrixDiffOp::identity(1))
        .scale(&w())
}

/// Gaussian ground state `e^{-eB(x²+y²)/4}` annihilated by both circular
/// lowering modes.
pub(super) fn gaussian() -> Expr {
    let eb = Expr::param("e").mul(&Expr::param("B"));
    let r2 = xc().mul(&xc()).add(&yc().mul(&yc()));
    Expr::exp(eb.mul(&r2).mul(&Expr::rat(-1, 4)))
}

/// Apply `Acal†(0)` to a scalar wavefunction `n` times.
pub(super) fn raise_acal(f: &Expr, n: u32) -> Expr {
    let op = acal0_dag_scalar();
    let mut cur = f.clone();
    for _ in 0..n {
        cur = op.apply(std::slice::from_ref(&cur)).unwrap().pop().unwrap();
    }
    cur
}

fn raise_aplus(f: &Expr, n: u32) -> Expr {
    let op = aplus_scalar();
    let mut cur = f.clone();
    for _ in 0..n {
        cur = op.apply(std::slice::from_ref(&cur)).unwrap().pop().unwrap();
    }
    cur
}

pub(super) fn solutions_at(n: u32) -> Vec<SolutionDef> {
    let g = gaussian();
    let top = raise_acal(&g, n);
    vec![
        // E = n wt on the upper component
        SolutionDef {
            name: format!("acal{n}_top"),
            components: vec![top.mul(&phase(-(n as i64), &wt())), Expr::zero()],
        },
        // E = (n+1) wt on the lower component
        SolutionDef {
            name: format!("acal{n}_bottom"),
            components: vec![Expr::zero(), top.mul(&phase(-(n as i64 + 1), &wt()))],
        },
        // A+ excitations cost no energy
        SolutionDef {
            name: format!("aplus{n}_top"),
            components: vec![raise_aplus(&g, n), Expr::zero()],
        },
    ]
}

pub fn pauli_2d() -> ModelSpec {
    let s0 = MatrixDiffOp::sigma0();
    let s3 = MatrixDiffOp::sigma3();
    let i_ = Expr::i();
    let half = Expr::rat(1, 2);

    let h0 = h0_scalar().kron(&s0);
    let l = l_scalar().kron(&s0);
    let hp = h0_scalar()
        .sub(&l_scalar().scale(&w()))
        .kron(&s0)
        .sub(&s3.scale(&w()));

    // C∓ = (i w / 2) e^{±2iwt} (a_x² + a_y²) / († form)  σ0
    let ax = ladder(CoordId::X, true);
    let ay = ladder(CoordId::Y, true);
    let axd = ladder(CoordId::X, false);
    let ayd = ladder(CoordId::Y, false);
    let iw2 = i_.mul(&w()).mul(&half);
    let cm = ax
        .compose(&ax)
        .unwrap()
        .add(&ay.compose(&ay).unwrap())
        .kron(&s0)
        .scale(&iw2.mul(&phase(2, &w())));
    let cp = axd
        .compose(&axd)
        .unwrap()
        .add(&ayd.compose(&ayd).unwrap())
        .kron(&s0)
        .scale(&iw2.mul(&phase(-2, &w())));

    let acal = acal0_scalar().kron(&s0).scale(&phase(2, &w()));
    let acald = acal0_dag_scalar().kron(&s0).scale(&phase(-2, &w()));
    let am = aminus_scalar().kron(&s0);
    let ap = aplus_scalar().kron(&s0);
    let tp = MatrixDiffOp::sigma_plus().scale(&phase(2, &w()));
    let tm = MatrixDiffOp::sigma_minus().scale(&phase(-2, &w()));
    let y = s3.clone();
    let ident = MatrixDiffOp::identity(2);

    let aux = vec![
        even("H0", h0.clone()),
        even("C-", cm.clone()),
        even("C+", cp.clone()),
        even("L", l.clone()),
        even("Acal", acal.clone()),
        even("Acal+", acald.clone()),
        even("A-", am.clone()),
        even("A+", ap.clone()),
        odd("T+", tp.clone()),
        odd("T-", tm.clone()),
        even("Y", y.clone()),
        even("I", ident.clone()),
        even("HP", hp.clone()),
    ];

    let sm_ov = Expr::sqrt(mm().mul(&w().pow(-1)));
    let smw = Expr::sqrt(mm().mul(&w()));
    let generators = vec![
        even("X0", h0.scale(&i_.neg())),
        even("X1", cm.add(&cp)),
        even("X2", cm.sub(&cp).scale(&i_)),
        even("X3", l.scale(&i_)),
        even("X4", acal.add(&acald).scale(&i_.neg().mul(&sm_ov).mul(&half))),
        even("X5", acal.sub(&acald).scale(&sm_ov.mul(&half))),
        even("X6", ident.scale(&i_.neg())),
        even("X7", ap.add(&am).scale(&i_.mul(&smw))),
        even("X8", ap.sub(&am).scale(&smw)),
        odd("X9", tp.clone()),
        odd("X10", tm.clone()),
        even("X11", y.clone()),
        odd("X12", tp.scale(&i_)),
        odd("X13", tm.scale(&i_)),
        even("X14", y.scale(&i_)),
        even("X15", ident.clone()),
    ];

    let s2w = Expr::sqrt(Expr::int(2).mul(&w()));
    let prod = |name: &str, f1: &str, f2: &str| ProductDef {
        name: name.into(),
        factors: vec![f1.into(), f2.into()],
        scale: s2w.clone(),
    };
    let products = vec![
        prod("Q-", "Acal", "T-"),
        prod("Q+", "Acal+", "T+"),
        prod("S-", "A+", "T-"),
        prod("S+", "A-", "T+"),
        prod("U+", "A+", "T+"),
        prod("U-", "A-", "T-"),
        prod("V+", "Acal", "T+"),
        prod("V-", "Acal+", "T-"),
    ];

    let mut checks = vec![
        ck("boson_acal", CheckKind::Commutator, "Acal", Some("Acal+"), vec![(Expr::one(), "I")]),
        ck("boson_a", CheckKind::Commutator, "A-", Some("A+"), vec![(Expr::one(), "I")]),
        ck("Q-_nilpotent", CheckKind::Square, "Q-", None, vec![]),
        ck("Q+_nilpotent", CheckKind::Square, "Q+", None, vec![]),
        ck("S-_nilpotent", CheckKind::Square, "S-", None, vec![]),
        ck("S+_nilpotent", CheckKind::Square, "S+", None, vec![]),
        ck(
            "HP_as_H0_L_Y",
            CheckKind::Equals,
            "HP",
            None,
            vec![(Expr::one(), "H0"), (w().neg(), "L"), (w().neg(), "Y")],
        ),
        ck(
            "QQ_is_HP",
            CheckKind::Anticommutator,
            "Q-",
            Some("Q+"),
            vec![(Expr::one(), "H0"), (w().neg(), "L"), (w().neg(), "Y")],
        ),
        ck("HP_commutes_Q-", CheckKind::Commutator, "HP", Some("Q-"), vec![]),
        ck("HP_commutes_Q+", CheckKind::Commutator, "HP", Some("Q+"), vec![]),
        ck(
            "SS_dual",
            CheckKind::Anticommutator,
            "S-",
            Some("S+"),
            vec![(Expr::one(), "H0"), (w().clone(), "L"), (w().clone(), "Y")],
        ),
        ck("H0_raises_Q+", CheckKind::Commutator, "H0", Some("Q+"), vec![(w().clone(), "Q+")]),
        ck("H0_lowers_Q-", CheckKind::Commutator, "H0", Some("Q-"), vec![(w().neg(), "Q-")]),
        ck("H0_lowers_S+", CheckKind::Commutator, "H0", Some("S+"), vec![(w().neg(), "S+")]),
        ck("H0_raises_S-", CheckKind::Commutator, "H0", Some("S-"), vec![(w().clone(), "S-")]),
        ck(
            "Cp_Qm",
            CheckKind::Commutator,
            "C+",
            Some("Q-"),
            vec![(Expr::i().mul(&w()), "S-")],
        ),
        ck(
            "Cm_Qp",
            CheckKind::Commutator,
            "C-",
            Some("Q+"),
            vec![(Expr::i().neg().mul(&w()), "S+")],
        ),
        ck("Y_Q+", CheckKind::Commutator, "Y", Some("Q+"), vec![(Expr::int(2), "Q+")]),
        ck("Y_Q-", CheckKind::Commutator, "Y", Some("Q-"), vec![(Expr::int(-2), "Q-")]),
        ck("Y_S+", CheckKind::Commutator, "Y", Some("S+"), vec![(Expr::int(2), "S+")]),
        ck("Y_S-", CheckKind::Commutator, "Y", Some("S-"), vec![(Expr::int(-2), "S-")]),
        ck(
            "Qm_Sp",
            CheckKind::Anticommutator,
            "Q-",
            Some("S+"),
            vec![(Expr::int(2).mul(&Expr::i()), "C-")],
        ),
        ck(
            "Qp_Sm",
            CheckKind::Anticommutator,
            "Q+",
            Some("S-"),
            vec![(Expr::int(2).mul(&Expr::i()), "C+")],
        ),
    ];
    for k in 0..=15 {
        checks.push(ck(
            &format!("symmetry_X{k}"),
            CheckKind::SymmetryResidual,
            &format!("X{k}"),
            None,
            vec![],
        ));
    }
    for name in ["Q-", "Q+", "S-", "S+", "U-", "U+", "V-", "V+"] {
        checks.push(ck(
            &format!("symmetry_{name}"),
            CheckKind::SymmetryResidual,
            name,
            None,
            vec![],
        ));
    }

    let osp_basis: Vec<String> = ["H0", "C-", "C+", "Y", "Q-", "Q+", "S-", "S+"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let span_checks = vec![
        SpanCheck {
            name: "UU_outside_osp".into(),
            target: "U-".into(),
            partner: Some("U+".into()),
            square: false,
            basis: osp_basis,
            expect_in_span: false,
        },
        SpanCheck {
            name: "UU_needs_L".into(),
            target: "U-".into(),
            partner: Some("U+".into()),
            square: false,
            basis: vec!["H0".into(), "L".into(), "Y".into(), "I".into()],
            expect_in_span: true,
        },
    ];

    ModelSpec {
        name: "pauli_2d".into(),
        coords: vec![CoordId::T, CoordId::X, CoordId::Y],
        dim: 2,
        params: vec![
            ParamDef { name: "e".into(), complex: false, positive: true },
            ParamDef { name: "B".into(), complex: false, positive: true },
            ParamDef { name: "M".into(), complex: false, positive: true },
        ],
        definitions: vec![
            Definition {
                name: "w".into(),
                complex: false,
                rhs: Expr::param("e")
                    .mul(&Expr::param("B"))
                    .mul(&Expr::rat(1, 2))
                    .mul(&Expr::param("M").pow(-1)),
            },
            Definition {
                name: "wt".into(),
                complex: false,
                rhs: Expr::param("e").mul(&Expr::param("B")).mul(&Expr::param("M").pow(-1)),
            },
        ],
        fixed_params: vec![],
        hamiltonian: hp,
        grading: MatrixDiffOp::sigma3(),
        generators,
        aux_ops: aux,
        products,
        sums: vec![],
        tables: vec![table5()],
        checks,
        span_checks,
        solutions: solutions_at(0).into_iter().chain(solutions_at(1)).collect(),
        ansatz: None,
        shift: None,
    }
}

fn table5() -> StructureTable {
    let w_ = w();
    let half = Expr::rat(1, 2);
    let one = Expr::one;
    let w2 = || Expr::int(2).mul(&w()).mul(&w());
    let names: Vec<String> = (0..=8).map(|k| format!("X{k}")).collect();
    StructureTable {
        name: "table5".into(),
        description: "commutators of the Pauli generators X0..X8".into(),
        rows: names.clone(),
        cols: names,
        graded: false,
        cells: vec![
            scell(
                0,
                1,
                vec![(Expr::int(2), "X2")],
                "antisymmetry with the (X1, X0) cell forces 2*w*X2",
            ),
            cell(0, 2, vec![(Expr::int(-2).mul(&w_), "X1")]),
            cell(0, 4, vec![(w_.clone(), "X5")]),
            cell(0, 5, vec![(w_.neg(), "X4")]),
            cell(0, 7, vec![(w_.clone(), "X8")]),
            cell(0, 8, vec![(w_.neg(), "X7")]),
            cell(1, 0, vec![(Expr::int(-2).mul(&w_), "X2")]),
            cell(1, 2, vec![(Expr::int(-2).mul(&w_), "X0")]),
            cell(1, 4, vec![(half.clone(), "X8")]),
            cell(1, 5, vec![(half.clone(), "X7")]),
            cell(1, 7, vec![(w2(), "X5")]),
            cell(1, 8, vec![(w2(), "X4")]),
            cell(2, 0, vec![(Expr::int(2).mul(&w_), "X1")]),
            cell(2, 1, vec![(Expr::int(2).mul(&w_), "X0")]),
            cell(2, 4, vec![(half.neg(), "X7")]),
            cell(2, 5, vec![(half.clone(), "X8")]),
            cell(2, 7, vec![(w2().neg(), "X4")]),
            cell(2, 8, vec![(w2(), "X5")]),
            cell(3, 4, vec![(one(), "X5")]),
            cell(3, 5, vec![(one().neg(), "X4")]),
            cell(3, 7, vec![(one().neg(), "X8")]),
            cell(3, 8, vec![(one(), "X7")]),
            cell(4, 0, vec![(w_.neg(), "X5")]),
            cell(4, 1, vec![(half.neg(), "X8")]),
            cell(4, 2, vec![(half.clone(), "X7")]),
            cell(4, 3, vec![(one().neg(), "X5")]),
            cell(4, 5, vec![(mm().neg().mul(&half).mul(&w_.pow(-1)), "X6")]),
            cell(5, 0, vec![(w_.clone(), "X4")]),
            cell(5, 1, vec![(half.neg(), "X7")]),
            cell(5, 2, vec![(half.neg(), "X8")]),
            cell(5, 3, vec![(one(), "X4")]),
            cell(5, 4, vec![(mm().mul(&half).mul(&w_.pow(-1)), "X6")]),
            cell(7, 0, vec![(w_.neg(), "X8")]),
            cell(7, 1, vec![(w2().neg(), "X5")]),
            cell(7, 2, vec![(w2(), "X4")]),
            cell(7, 3, vec![(one(), "X8")]),
            cell(7, 8, vec![(Expr::int(-2).mul(&mm()).mul(&w_), "X6")]),
            cell(8, 0, vec![(w_.clone(), "X7")]),
            cell(8, 1, vec![(w2().neg(), "X4")]),
            cell(8, 2, vec![(w2().neg(), "X5")]),
            cell(8, 3, vec![(one().neg(), "X7")]),
            cell(8, 7, vec![(Expr::int(2).mul(&mm()).mul(&w_), "X6")]),
        ],
    }
}
