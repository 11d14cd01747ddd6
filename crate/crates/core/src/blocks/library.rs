//! The block registry: full adders, MDFA, sorting full adders, the
//! reconstructed (7,3)-CSA, encoders, and the wired composites.

use crate::formula::{Basis, Formula};

use super::{xor_b0, BlockSpec, Encoding, LeafMatrix, Slot};

fn v(i: u32) -> Formula {
    Formula::var(i)
}

/// Standard (3,2)-CSA over B2: sum = x⊕y⊕z, carry = xy ∨ (x⊕y)z.
pub fn fa3_b2() -> BlockSpec {
    let sum = Formula::xor(Formula::xor(v(0), v(1)), v(2));
    let carry = Formula::or(
        Formula::and(v(0), v(1)),
        Formula::and(Formula::xor(v(0), v(1)), v(2)),
    );
    BlockSpec {
        name: "fa3-b2".into(),
        basis: Basis::B2,
        inputs: vec![
            Slot::new("x", Encoding::Std, 0),
            Slot::new("y", Encoding::Std, 0),
            Slot::new("z", Encoding::Std, 0),
        ],
        outputs: vec![
            Slot::new("sum", Encoding::Std, 0),
            Slot::new("carry", Encoding::Std, 1),
        ],
        templates: vec![sum, carry],
        accumulated_matrix: None,
    }
}

/// Standard (3,2)-CSA over B0 (XORs expanded, carry monotone).
pub fn fa3_b0() -> BlockSpec {
    let sum = xor_b0(&xor_b0(&v(0), &v(1)), &v(2));
    let carry = Formula::or(
        Formula::and(v(0), v(1)),
        Formula::and(Formula::or(v(0), v(1)), v(2)),
    );
    BlockSpec {
        name: "fa3-b0".into(),
        basis: Basis::B0,
        inputs: vec![
            Slot::new("x", Encoding::Std, 0),
            Slot::new("y", Encoding::Std, 0),
            Slot::new("z", Encoding::Std, 0),
        ],
        outputs: vec![
            Slot::new("sum", Encoding::Std, 0),
            Slot::new("carry", Encoding::Std, 1),
        ],
        templates: vec![sum, carry],
        accumulated_matrix: None,
    }
}

/// Encoder block turning decoded bits into one encoded slot.
pub fn encoder(enc: Encoding) -> BlockSpec {
    let (name, basis, in_names): (&str, Basis, &[&str]) = match enc {
        Encoding::XorPair => ("xor-pair-enc", Basis::B2, &["u", "v"]),
        Encoding::MonPair => ("mon-pair-enc", Basis::B0, &["u", "v"]),
        Encoding::SortTriple => ("sort-triple-enc", Basis::B0, &["u", "v", "w"]),
        Encoding::Std => ("std-enc", Basis::B0, &["u"]),
    };
    BlockSpec {
        name: name.into(),
        basis,
        inputs: in_names
            .iter()
            .map(|n| Slot::new(n, Encoding::Std, 0))
            .collect(),
        outputs: vec![Slot::new("p", enc, 0)],
        templates: enc.encoder_templates(0),
        accumulated_matrix: None,
    }
}

/// MDFA: the (5,3)-style CSA with XOR-pair encoded pairs, over B2.
///
/// Template variables: (x, v1, u1⊕v1, v2, u2⊕v2). Identity:
/// `x + u1 + v1 + u2 + v2 = c + 2(a + b)` with pair output (b, a⊕b).
pub fn mdfa() -> BlockSpec {
    let c = Formula::xor(Formula::xor(v(0), v(2)), v(4));
    let b = Formula::xor(Formula::and(Formula::xor(v(0), v(1)), v(2)), v(1));
    let axb = Formula::xor(
        Formula::or(Formula::xor(v(0), v(1)), v(2)),
        Formula::and(
            Formula::xor(Formula::xor(v(0), v(2)), v(3)),
            Formula::not(v(4)),
        ),
    );
    BlockSpec {
        name: "mdfa".into(),
        basis: Basis::B2,
        inputs: vec![
            Slot::new("x", Encoding::Std, 0),
            Slot::new("u1", Encoding::XorPair, 0),
            Slot::new("u2", Encoding::XorPair, 0),
        ],
        outputs: vec![
            Slot::new("c", Encoding::Std, 0),
            Slot::new("q", Encoding::XorPair, 1),
        ],
        templates: vec![c, b, axb],
        accumulated_matrix: None,
    }
}

/// The two Eq.-style threshold templates realized by the SFA5 carry pair:
/// (T_5^4, T_5^2) over variables (x1, u1v1, u1∨v1, u2v2, u2∨v2).
///
/// The second is the monotone dual of the first with the pair components
/// swapped.
pub fn eq4_threshold_templates() -> (Formula, Formula) {
    // a1b1 = (x1(u1∨v1) ∨ u1v1)·u2v2 ∨ x1·u1v1·(u2∨v2)
    let ab = Formula::or(
        Formula::and(Formula::or(Formula::and(v(0), v(2)), v(1)), v(3)),
        Formula::and(Formula::and(v(0), v(1)), v(4)),
    );
    let swap = [v(0), v(2), v(1), v(4), v(3)];
    let aob = ab
        .dualize_monotone()
        .expect("ab is monotone")
        .instantiate(&swap)
        .expect("swap arity");
    (ab, aob)
}

/// SFA5: the sorting (5,3)-CSA over B0 with monotone-pair encoded pairs.
///
/// Template variables: (x1, u1v1, u1∨v1, u2v2, u2∨v2). Identity:
/// `x1 + u1 + v1 + u2 + v2 = c + 2(a1 + b1)` with pair output
/// (a1b1, a1∨b1).
pub fn sfa5() -> BlockSpec {
    // ψ = x1(u1v1 ∨ ¬(u1∨v1)) ∨ ¬x1·¬(u1v1)·(u1∨v1);  χ = ¬(u2v2)·(u2∨v2)
    let psi = Formula::or(
        Formula::and(v(0), Formula::or(v(1), Formula::not(v(2)))),
        Formula::and(Formula::not(v(0)), Formula::and(Formula::not(v(1)), v(2))),
    );
    let chi = Formula::and(Formula::not(v(3)), v(4));
    let c = Formula::or(
        Formula::and(psi.clone(), chi.negated()),
        Formula::and(psi.negated(), chi),
    );
    let (ab, aob) = eq4_threshold_templates();
    BlockSpec {
        name: "sfa5".into(),
        basis: Basis::B0,
        inputs: vec![
            Slot::new("x1", Encoding::Std, 0),
            Slot::new("u1", Encoding::MonPair, 0),
            Slot::new("u2", Encoding::MonPair, 0),
        ],
        outputs: vec![
            Slot::new("c", Encoding::Std, 0),
            Slot::new("q", Encoding::MonPair, 1),
        ],
        templates: vec![c, ab, aob],
        accumulated_matrix: None,
    }
}

/// The T_4 threshold templates over (y1, s′, s″, s‴) of an encoded triple:
/// T_4^1 = y1 ∨ s′, T_4^2 = y1s′ ∨ s″, and their duals T_4^3, T_4^4
/// (obtained by dualization with s′ ↔ s‴ substituted).
pub fn eq7_t4_templates() -> [Formula; 4] {
    let t41 = Formula::or(v(0), v(1));
    let t42 = Formula::or(Formula::and(v(0), v(1)), v(2));
    let swap = [v(0), v(3), v(2), v(1)];
    let t43 = t42
        .dualize_monotone()
        .expect("monotone")
        .instantiate(&swap)
        .expect("arity");
    let t44 = t41
        .dualize_monotone()
        .expect("monotone")
        .instantiate(&swap)
        .expect("arity");
    [t41, t42, t43, t44]
}

/// The parity-style output q⊕ shared by SFA7 and SFA7′, over a given T_4
/// implementation and the second-triple components (s′, s″, s‴).
fn q_parity(t4: &[Formula; 4], sp: Formula, sm: Formula, st: Formula) -> Formula {
    let [t41, t42, t43, t44] = t4;
    let term1 = Formula::and(Formula::and(sp.negated(), t42.clone()), t44.negated());
    let term2 = Formula::and(
        Formula::and(Formula::and(sp.clone(), sm.negated()), t41.clone()),
        t43.negated(),
    );
    let term3 = Formula::and(
        Formula::and(sm, st.negated()),
        Formula::or(t44.clone(), t42.negated()),
    );
    let term4 = Formula::and(st, Formula::or(t43.clone(), t41.negated()));
    Formula::or(Formula::or(Formula::or(term1, term2), term3), term4)
}

/// The sorted outputs (q′, q″, q‴) shared by SFA7 and SFA7′.
///
/// `q′ = T4^1·s′ ∨ T4^2 ∨ s″`, `q″ = ⋁_{i+j=4} T4^i·T3^j`, and q‴ is the
/// monotone dual of q′ with s′ ↔ s‴ swapped everywhere (realized by
/// dualizing against a dual T_4 implementation).
fn q_sorted(
    t4: &[Formula; 4],
    t4_dual_swapped: &[Formula; 4],
    sp: Formula,
    sm: Formula,
    st: Formula,
) -> (Formula, Formula, Formula) {
    let [t41, t42, t43, t44] = t4;
    let qp = Formula::or(
        Formula::or(Formula::and(t41.clone(), sp.clone()), t42.clone()),
        sm.clone(),
    );
    let qm = Formula::or(
        Formula::or(
            Formula::or(Formula::and(t41.clone(), st.clone()), Formula::and(t42.clone(), sm.clone())),
            Formula::and(t43.clone(), sp),
        ),
        t44.clone(),
    );
    // q‴ = dual(q′) with s′↔s‴: dual(T41)|swap = T44d etc., structure
    // ((T41* ∨ s‴)·T42*)·s″ with the starred T's taken from the swapped duals
    let [d1, d2, _, _] = t4_dual_swapped;
    let qt = Formula::and(
        Formula::and(Formula::or(d1.clone(), st), d2.clone()),
        sm,
    );
    (qp, qm, qt)
}

/// SFA7: the sorting (7,4)-CSA over B0 with one standard input and two
/// sorted-triple inputs. Identity:
/// `x1 + Σ s̃1 + Σ s̃2 = c1 + 2(q′ + q″ + q‴)`.
pub fn sfa7() -> BlockSpec {
    // vars: 0:x1, 1..4: s′1,s″1,s‴1,s1⊕, 5..8: s′2,s″2,s‴2,s2⊕
    let sub = |base: u32, f: &Formula| {
        let args: Vec<Formula> = vec![v(0), v(base), v(base + 1), v(base + 2)];
        f.instantiate(&args).expect("arity")
    };
    let t4_raw = eq7_t4_templates();
    let t4: [Formula; 4] = [
        sub(1, &t4_raw[0]),
        sub(1, &t4_raw[1]),
        sub(1, &t4_raw[2]),
        sub(1, &t4_raw[3]),
    ];
    // duals with s′↔s‴ swapped: T41* = y·s‴, T42* = (y∨s‴)·s″
    let dual_swapped = |f: &Formula| {
        f.dualize_monotone()
            .expect("monotone")
            .instantiate(&[v(0), v(3), v(2), v(1), v(4), v(7), v(6), v(5), v(8)])
            .expect("arity")
    };
    let t4d: [Formula; 4] = [
        dual_swapped(&t4[0]),
        dual_swapped(&t4[1]),
        dual_swapped(&t4[2]),
        dual_swapped(&t4[3]),
    ];

    // c1 = x1 ⊕ s1⊕ ⊕ s2⊕ in B0
    let phi = xor_b0(&v(0), &v(4));
    let c1 = Formula::or(
        Formula::and(v(8), phi.negated()),
        Formula::and(Formula::not(v(8)), phi),
    );

    let (qp, qm, qt) = q_sorted(&t4, &t4d, v(5), v(6), v(7));
    let qx = q_parity(&t4, v(5), v(6), v(7));

    BlockSpec {
        name: "sfa7".into(),
        basis: Basis::B0,
        inputs: vec![
            Slot::new("x1", Encoding::Std, 0),
            Slot::new("s1", Encoding::SortTriple, 0),
            Slot::new("s2", Encoding::SortTriple, 0),
        ],
        outputs: vec![
            Slot::new("c1", Encoding::Std, 0),
            Slot::new("q", Encoding::SortTriple, 1),
        ],
        templates: vec![c1, qp, qm, qt, qx],
        accumulated_matrix: None,
    }
}

/// SFA7′: as SFA7, but with four standard inputs in place of the first
/// triple; the T_4 thresholds are implemented directly over x2..x5.
pub fn sfa7p() -> BlockSpec {
    // vars: 0..3: x2..x5, 4..7: s′3,s″3,s‴3,s3⊕
    let t41 = Formula::or(Formula::or(v(0), v(1)), Formula::or(v(2), v(3)));
    // T_4^2 = (y1∨y2)(y3∨y4) ∨ y1y2 ∨ y3y4
    let t42 = Formula::or(
        Formula::or(
            Formula::and(Formula::or(v(0), v(1)), Formula::or(v(2), v(3))),
            Formula::and(v(0), v(1)),
        ),
        Formula::and(v(2), v(3)),
    );
    let t43 = t42.dualize_monotone().expect("monotone");
    let t44 = t41.dualize_monotone().expect("monotone");
    let t4 = [t41, t42, t43, t44];
    // the duals of the T_4 family over standard bits are the family itself
    // reversed; the triple swap only affects s-components
    let t4d = [
        t4[3].clone(),
        t4[2].clone(),
        t4[1].clone(),
        t4[0].clone(),
    ];

    // c2 = (x2⊕x3⊕x4⊕x5) ⊕ s3⊕ with ψ per Eq.-style expansion
    let xorb = |a: u32, b: u32| xor_b0(&v(a), &v(b));
    let eqvb = |a: u32, b: u32| {
        Formula::or(
            Formula::and(v(a), v(b)),
            Formula::and(Formula::not(v(a)), Formula::not(v(b))),
        )
    };
    let psi = Formula::or(
        Formula::and(xorb(0, 1), eqvb(2, 3)),
        Formula::and(eqvb(0, 1), xorb(2, 3)),
    );
    let c2 = Formula::or(
        Formula::and(psi.clone(), Formula::not(v(7))),
        Formula::and(psi.negated(), v(7)),
    );

    let (qp, qm, qt) = q_sorted(&t4, &t4d, v(4), v(5), v(6));
    let qx = q_parity(&t4, v(4), v(5), v(6));

    BlockSpec {
        name: "sfa7p".into(),
        basis: Basis::B0,
        inputs: vec![
            Slot::new("x2", Encoding::Std, 0),
            Slot::new("x3", Encoding::Std, 0),
            Slot::new("x4", Encoding::Std, 0),
            Slot::new("x5", Encoding::Std, 0),
            Slot::new("s3", Encoding::SortTriple, 0),
        ],
        outputs: vec![
            Slot::new("c2", Encoding::Std, 0),
            Slot::new("q", Encoding::SortTriple, 1),
        ],
        templates: vec![c2, qp, qm, qt, qx],
        accumulated_matrix: None,
    }
}

/// Reconstructed (7,3)-CSA over B0: inputs one sorted triple and two
/// monotone pairs, outputs three standard bits z0 + 2·z1 + 4·z2.
pub fn csa73() -> BlockSpec {
    // vars: 0..3: q′,q″,q‴,q⊕, 4,5: p1.and,p1.or, 6,7: p2.and,p2.or
    let pe1 = Formula::and(v(5), Formula::not(v(4))); // u1⊕v1 = (u∨v)·¬(uv)
    let pe2 = Formula::and(v(7), Formula::not(v(6)));
    let g = Formula::or(
        Formula::and(v(3), pe1.negated()),
        Formula::and(Formula::not(v(3)), pe1.clone()),
    );
    let z0 = Formula::or(
        Formula::and(g.clone(), pe2.negated()),
        Formula::and(g.negated(), pe2.clone()),
    );

    // thresholds of the 7 decoded bits from the code components
    let t3c = |i: u32| -> Option<Formula> {
        match i {
            0 => None,
            1 => Some(v(0)),
            2 => Some(v(1)),
            3 => Some(v(2)),
            _ => unreachable!(),
        }
    };
    let t2c = |i: u32, and_ix: u32, or_ix: u32| -> Option<Formula> {
        match i {
            0 => None,
            1 => Some(v(or_ix)),
            2 => Some(v(and_ix)),
            _ => unreachable!(),
        }
    };
    let t7 = |k: u32| -> Formula {
        let mut terms = Vec::new();
        for i in 0..=3u32 {
            for j in 0..=2u32 {
                if i + j > k {
                    continue;
                }
                let l = k - i - j;
                if l > 2 {
                    continue;
                }
                let factors: Vec<Formula> = [t3c(i), t2c(j, 4, 5), t2c(l, 6, 7)]
                    .into_iter()
                    .flatten()
                    .collect();
                if factors.is_empty() {
                    terms.push(Formula::constant(true));
                } else {
                    terms.push(Formula::and_all(factors));
                }
            }
        }
        Formula::or_all(terms)
    };
    let z2 = t7(4);
    let z1 = Formula::or(Formula::and(t7(2), t7(4).negated()), t7(6));

    BlockSpec {
        name: "csa73".into(),
        basis: Basis::B0,
        inputs: vec![
            Slot::new("t", Encoding::SortTriple, 0),
            Slot::new("p1", Encoding::MonPair, 0),
            Slot::new("p2", Encoding::MonPair, 0),
        ],
        outputs: vec![
            Slot::new("z0", Encoding::Std, 0),
            Slot::new("z1", Encoding::Std, 1),
            Slot::new("z2", Encoding::Std, 2),
        ],
        templates: vec![z0, z1, z2],
        accumulated_matrix: None,
    }
}

/// A formula plus its leaf profile over the composite's primitive inputs,
/// used to accumulate leaf matrices along the wiring independently of the
/// expanded templates.
#[derive(Clone)]
struct Tracked {
    f: Formula,
    prof: Vec<u64>,
}

fn tracked_inputs(n: usize) -> Vec<Tracked> {
    (0..n)
        .map(|i| {
            let mut prof = vec![0u64; n];
            prof[i] = 1;
            Tracked { f: v(i as u32), prof }
        })
        .collect()
}

fn apply(block: &BlockSpec, args: &[Tracked]) -> Vec<Tracked> {
    let forms: Vec<Formula> = args.iter().map(|t| t.f.clone()).collect();
    let outs = block.instantiate(&forms).expect("library wiring is closed");
    let ncols = block.input_components();
    let width = args[0].prof.len();
    outs.into_iter()
        .zip(&block.templates)
        .map(|(f, tmpl)| {
            let coefs = tmpl.leaf_profile(ncols).expect("template arity").0;
            let mut prof = vec![0u64; width];
            for (coef, arg) in coefs.iter().zip(args) {
                for (p, q) in prof.iter_mut().zip(&arg.prof) {
                    *p += coef * q;
                }
            }
            Tracked { f, prof }
        })
        .collect()
}

fn txor(a: &Tracked, b: &Tracked) -> Tracked {
    Tracked {
        f: Formula::xor(a.f.clone(), b.f.clone()),
        prof: a.prof.iter().zip(&b.prof).map(|(x, y)| x + y).collect(),
    }
}

fn composite(
    name: &str,
    basis: Basis,
    inputs: Vec<Slot>,
    outputs: Vec<Slot>,
    tracked: Vec<Tracked>,
) -> BlockSpec {
    let row_names = BlockSpec::component_names(&outputs);
    let col_names = BlockSpec::component_names(&inputs);
    let entries = tracked.iter().map(|t| t.prof.clone()).collect();
    BlockSpec {
        name: name.into(),
        basis,
        inputs,
        outputs,
        templates: tracked.into_iter().map(|t| t.f).collect(),
        accumulated_matrix: Some(LeafMatrix { row_names, col_names, entries }),
    }
}

/// The two-MDFA composite (Fig. 2 style): fresh inputs x1..x4, three
/// XOR-pair inputs; the first MDFA takes (x2,x3) through an XOR pre-gate.
pub fn fig2() -> BlockSpec {
    let inp = tracked_inputs(10);
    let md = mdfa();
    let enc = encoder(Encoding::XorPair);
    // pair from (u=x2, v=x3): components (x3, x2⊕x3)
    let e = apply(&enc, &[inp[1].clone(), inp[2].clone()]);
    let a = apply(
        &md,
        &[inp[0].clone(), e[0].clone(), e[1].clone(), inp[4].clone(), inp[5].clone()],
    );
    let b = apply(
        &md,
        &[inp[3].clone(), inp[6].clone(), inp[7].clone(), inp[8].clone(), inp[9].clone()],
    );
    composite(
        "fig2",
        Basis::B2,
        vec![
            Slot::new("x1", Encoding::Std, 0),
            Slot::new("x2", Encoding::Std, 0),
            Slot::new("x3", Encoding::Std, 0),
            Slot::new("x4", Encoding::Std, 0),
            Slot::new("u1", Encoding::XorPair, 0),
            Slot::new("u2", Encoding::XorPair, 0),
            Slot::new("u3", Encoding::XorPair, 0),
        ],
        vec![
            Slot::new("c1", Encoding::Std, 0),
            Slot::new("c2", Encoding::Std, 0),
            Slot::new("qa", Encoding::XorPair, 1),
            Slot::new("qb", Encoding::XorPair, 1),
        ],
        vec![
            a[0].clone(),
            b[0].clone(),
            a[1].clone(),
            a[2].clone(),
            b[1].clone(),
            b[2].clone(),
        ],
    )
}

/// The SFA5 composite (Fig. 3 style): one SFA5 plus a monotone-pair encoder
/// over the two cheap fresh inputs.
pub fn fig3() -> BlockSpec {
    let inp = tracked_inputs(7);
    let s = apply(
        &sfa5(),
        &[inp[0].clone(), inp[3].clone(), inp[4].clone(), inp[5].clone(), inp[6].clone()],
    );
    let e = apply(&encoder(Encoding::MonPair), &[inp[1].clone(), inp[2].clone()]);
    composite(
        "fig3",
        Basis::B0,
        vec![
            Slot::new("x1", Encoding::Std, 0),
            Slot::new("x2", Encoding::Std, 0),
            Slot::new("x3", Encoding::Std, 0),
            Slot::new("u1", Encoding::MonPair, 0),
            Slot::new("u2", Encoding::MonPair, 0),
        ],
        vec![
            Slot::new("c", Encoding::Std, 0),
            Slot::new("q", Encoding::MonPair, 1),
            Slot::new("e", Encoding::MonPair, 0),
        ],
        vec![s[0].clone(), s[1].clone(), s[2].clone(), e[0].clone(), e[1].clone()],
    )
}

/// The SFA7 + SFA7′ composite (Fig. 4 style).
pub fn fig4() -> BlockSpec {
    let inp = tracked_inputs(17);
    let a = apply(
        &sfa7(),
        &[
            inp[0].clone(),
            inp[5].clone(),
            inp[6].clone(),
            inp[7].clone(),
            inp[8].clone(),
            inp[9].clone(),
            inp[10].clone(),
            inp[11].clone(),
            inp[12].clone(),
        ],
    );
    let b = apply(
        &sfa7p(),
        &[
            inp[1].clone(),
            inp[2].clone(),
            inp[3].clone(),
            inp[4].clone(),
            inp[13].clone(),
            inp[14].clone(),
            inp[15].clone(),
            inp[16].clone(),
        ],
    );
    composite(
        "fig4",
        Basis::B0,
        vec![
            Slot::new("x1", Encoding::Std, 0),
            Slot::new("x2", Encoding::Std, 0),
            Slot::new("x3", Encoding::Std, 0),
            Slot::new("x4", Encoding::Std, 0),
            Slot::new("x5", Encoding::Std, 0),
            Slot::new("s1", Encoding::SortTriple, 0),
            Slot::new("s2", Encoding::SortTriple, 0),
            Slot::new("s3", Encoding::SortTriple, 0),
        ],
        vec![
            Slot::new("c1", Encoding::Std, 0),
            Slot::new("c2", Encoding::Std, 0),
            Slot::new("q1", Encoding::SortTriple, 1),
            Slot::new("q2", Encoding::SortTriple, 1),
        ],
        vec![
            a[0].clone(),
            b[0].clone(),
            a[1].clone(),
            a[2].clone(),
            a[3].clone(),
            a[4].clone(),
            b[1].clone(),
            b[2].clone(),
            b[3].clone(),
            b[4].clone(),
        ],
    )
}

/// Chain of `m` MDFAs plus an outer FA3, with standard inputs and outputs.
///
/// Stage i (1-based) consumes fresh inputs at significance i−1: five for the
/// first stage (one standard plus two XOR-pair-encoded pairs), three for each
/// later stage; each stage's pair output feeds the next stage's second pair.
/// The final pair is resolved by FA3 together with one fresh input at
/// significance m. For m=4 this is a (15,6)-CSA.
pub fn compose_chain(m: u32) -> BlockSpec {
    assert!(m >= 1, "chain needs at least one MDFA");
    let n = (3 * m + 3) as usize;
    let inp = tracked_inputs(n);
    let md = mdfa();
    let enc = encoder(Encoding::XorPair);

    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut tracked = Vec::new();

    for i in 0..5 {
        inputs.push(Slot::new(&format!("x{i}"), Encoding::Std, 0));
    }
    let e1 = apply(&enc, &[inp[1].clone(), inp[2].clone()]);
    let e2 = apply(&enc, &[inp[3].clone(), inp[4].clone()]);
    let mut outs = apply(
        &md,
        &[inp[0].clone(), e1[0].clone(), e1[1].clone(), e2[0].clone(), e2[1].clone()],
    );
    tracked.push(outs[0].clone());
    outputs.push(Slot::new("c1", Encoding::Std, 0));

    for stage in 2..=m {
        let base = (5 + 3 * (stage - 2)) as usize;
        for k in 0..3 {
            inputs.push(Slot::new(&format!("x{}", base + k), Encoding::Std, stage - 1));
        }
        let e = apply(&enc, &[inp[base + 1].clone(), inp[base + 2].clone()]);
        let prev_v = outs[1].clone();
        let prev_p = outs[2].clone();
        outs = apply(
            &md,
            &[inp[base].clone(), e[0].clone(), e[1].clone(), prev_v, prev_p],
        );
        tracked.push(outs[0].clone());
        outputs.push(Slot::new(&format!("c{stage}"), Encoding::Std, stage - 1));
    }

    // resolve the final pair (v, u⊕v) with FA3: u = (u⊕v)⊕v
    let fresh = inp[n - 1].clone();
    inputs.push(Slot::new(&format!("x{}", n - 1), Encoding::Std, m));
    let u = txor(&outs[2], &outs[1]);
    let fa = apply(&fa3_b2(), &[fresh, u, outs[1].clone()]);
    tracked.push(fa[0].clone());
    tracked.push(fa[1].clone());
    outputs.push(Slot::new("sum", Encoding::Std, m));
    outputs.push(Slot::new("carry", Encoding::Std, m + 1));

    composite(&format!("chain{m}"), Basis::B2, inputs, outputs, tracked)
}

/// The (17,6)-CSA over B0: SFA7 plus two SFA5's at the bottom (fed through
/// the triple/pair encoders) and the reconstructed (7,3)-CSA at the top.
/// Standard inputs at significance 0, outputs at significances (0,0,0,1,2,3).
pub fn compose_17_6() -> BlockSpec {
    let inp = tracked_inputs(17);
    let tenc = encoder(Encoding::SortTriple);
    let menc = encoder(Encoding::MonPair);

    let t1 = apply(&tenc, &[inp[1].clone(), inp[2].clone(), inp[3].clone()]);
    let t2 = apply(&tenc, &[inp[4].clone(), inp[5].clone(), inp[6].clone()]);
    let s7 = apply(
        &sfa7(),
        &[
            inp[0].clone(),
            t1[0].clone(),
            t1[1].clone(),
            t1[2].clone(),
            t1[3].clone(),
            t2[0].clone(),
            t2[1].clone(),
            t2[2].clone(),
            t2[3].clone(),
        ],
    );

    let sfa5_out = |x: usize, p: usize, q: usize| {
        let pa = apply(&menc, &[inp[p].clone(), inp[p + 1].clone()]);
        let pb = apply(&menc, &[inp[q].clone(), inp[q + 1].clone()]);
        apply(
            &sfa5(),
            &[inp[x].clone(), pa[0].clone(), pa[1].clone(), pb[0].clone(), pb[1].clone()],
        )
    };
    let sa = sfa5_out(7, 8, 10);
    let sb = sfa5_out(12, 13, 15);

    let z = apply(
        &csa73(),
        &[
            s7[1].clone(),
            s7[2].clone(),
            s7[3].clone(),
            s7[4].clone(),
            sa[1].clone(),
            sa[2].clone(),
            sb[1].clone(),
            sb[2].clone(),
        ],
    );

    let inputs = (0..17)
        .map(|i| Slot::new(&format!("x{i}"), Encoding::Std, 0))
        .collect();
    composite(
        "csa17",
        Basis::B0,
        inputs,
        vec![
            Slot::new("c1", Encoding::Std, 0),
            Slot::new("c2", Encoding::Std, 0),
            Slot::new("c3", Encoding::Std, 0),
            Slot::new("z0", Encoding::Std, 1),
            Slot::new("z1", Encoding::Std, 2),
            Slot::new("z2", Encoding::Std, 3),
        ],
        vec![
            s7[0].clone(),
            sa[0].clone(),
            sb[0].clone(),
            z[0].clone(),
            z[1].clone(),
            z[2].clone(),
        ],
    )
}

/// The block registry.
pub fn block_library() -> Vec<BlockSpec> {
    vec![
        fa3_b2(),
        fa3_b0(),
        encoder(Encoding::XorPair),
        mdfa(),
        fig2(),
        encoder(Encoding::MonPair),
        sfa5(),
        fig3(),
        encoder(Encoding::SortTriple),
        sfa7(),
        sfa7p(),
        fig4(),
        csa73(),
    ]
}

/// Look up a block (registry names plus `chain1`..`chain4` and `csa17`).
pub fn block(name: &str) -> Option<BlockSpec> {
    if let Some(b) = block_library().into_iter().find(|b| b.name == name) {
        return Some(b);
    }
    match name {
        "chain1" => Some(compose_chain(1)),
        "chain2" => Some(compose_chain(2)),
        "chain3" => Some(compose_chain(3)),
        "chain4" => Some(compose_chain(4)),
        "csa17" => Some(compose_17_6()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::LeafProfile;

    #[test]
    fn registry_blocks_verify_exhaustively() {
        for b in block_library() {
            let r = b.verify().unwrap();
            assert!(r.pass, "{}: {:?}", b.name, r.failures);
        }
    }

    #[test]
    fn chains_verify_exhaustively() {
        for m in 1..=4 {
            let b = compose_chain(m);
            let r = b.verify().unwrap();
            assert!(r.pass, "chain{m}: {:?}", r.failures);
        }
    }

    #[test]
    fn csa17_verifies_exhaustively() {
        let b = compose_17_6();
        assert_eq!(b.decoded_input_bits(), 17);
        let r = b.verify().unwrap();
        assert_eq!(r.assignments, 1 << 17);
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn mdfa_profiles_match_published_coefficients() {
        let b = mdfa();
        let n = b.input_components();
        assert_eq!(
            b.templates[0].leaf_profile(n).unwrap(),
            LeafProfile(vec![1, 0, 1, 0, 1])
        );
        assert_eq!(
            b.templates[1].leaf_profile(n).unwrap(),
            LeafProfile(vec![1, 2, 1, 0, 0])
        );
        assert_eq!(
            b.templates[2].leaf_profile(n).unwrap(),
            LeafProfile(vec![2, 1, 2, 1, 1])
        );
    }

    #[test]
    fn sfa5_carry_profile_matches_published_coefficients() {
        let b = sfa5();
        let n = b.input_components();
        assert_eq!(
            b.templates[0].leaf_profile(n).unwrap(),
            LeafProfile(vec![4, 4, 4, 2, 2])
        );
        assert_eq!(b.templates[0].leaf_count(), 16);
        // pair outputs have equal size
        assert_eq!(b.templates[1].leaf_count(), b.templates[2].leaf_count());
    }

    #[test]
    fn sfa7_parity_output_is_twice_the_median() {
        let b = sfa7();
        // templates: [c1, q′, q″, q‴, q⊕]
        assert_eq!(b.templates[4].leaf_count(), 2 * b.templates[2].leaf_count());
        assert_eq!(b.templates[1].leaf_count(), b.templates[3].leaf_count());
        let bp = sfa7p();
        assert_eq!(bp.templates[4].leaf_count(), 2 * bp.templates[2].leaf_count());
        assert_eq!(bp.templates[1].leaf_count(), bp.templates[3].leaf_count());
    }

    #[test]
    fn fa3_b2_leaf_matrix() {
        let m = fa3_b2().leaf_matrix().unwrap();
        assert_eq!(m.entries, vec![vec![1, 1, 1], vec![2, 2, 1]]);
    }

    #[test]
    fn fig2_b1_is_cheap_in_x1_x2() {
        // b1 = (x1⊕x3)(x2⊕x3)⊕x3: profile (1,1,3) over (x1,x2,x3)
        let f = fig2();
        let prof = f.templates[2].leaf_profile(f.input_components()).unwrap();
        assert_eq!(&prof.0[0..4], &[1, 1, 3, 0]);
    }

    #[test]
    fn composite_matrices_agree_with_expanded_profiles() {
        for b in [fig2(), fig3(), fig4(), compose_chain(3), compose_17_6()] {
            let acc = b.accumulated_matrix.clone().unwrap();
            let direct = b.leaf_matrix().unwrap();
            assert_eq!(acc, direct, "{}", b.name);
        }
    }

    #[test]
    fn chain_shapes() {
        let c1 = compose_chain(1);
        assert_eq!(c1.inputs.len(), 6);
        assert_eq!(c1.outputs.len(), 3);
        let c4 = compose_chain(4);
        assert_eq!(c4.inputs.len(), 15);
        assert_eq!(c4.outputs.len(), 6);
        let in_sigs: Vec<u32> = c4.inputs.iter().map(|s| s.significance).collect();
        assert_eq!(in_sigs, vec![0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4]);
        let out_sigs: Vec<u32> = c4.outputs.iter().map(|s| s.significance).collect();
        assert_eq!(out_sigs, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn b0_blocks_validate_b0() {
        for b in [fa3_b0(), sfa5(), sfa7(), sfa7p(), csa73(), fig3(), fig4(), compose_17_6()] {
            for (i, t) in b.templates.iter().enumerate() {
                let r = t.validate_basis(crate::formula::Basis::B0);
                assert!(r.is_valid(), "{} template {i}: {:?}", b.name, r.violations);
            }
        }
    }

    #[test]
    fn monotone_outputs_have_no_negations() {
        // sorted outputs of the sorting adders must be monotone
        for (b, rows) in [(sfa5(), vec![1, 2]), (sfa7(), vec![1, 2, 3]), (sfa7p(), vec![1, 2, 3])] {
            for r in rows {
                assert!(
                    b.templates[r].dualize_monotone().is_ok(),
                    "{} template {r} is not monotone",
                    b.name
                );
            }
        }
    }
}
