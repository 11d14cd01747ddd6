//! Property tests: text round trips, leaf-count accounting, dualization
//! semantics, and margin scale invariance.

use proptest::prelude::*;

use csakit::analysis::{builtin_system, paper_params};
use csakit::formula::{parse, render, Formula, GateTable};

const NVARS: u32 = 6;

/// Arbitrary formulas over `NVARS` variables, all gate kinds.
fn any_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0..NVARS).prop_map(Formula::var),
        any::<bool>().prop_map(Formula::constant),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::xor(a, b)),
            (0u8..16, inner.clone(), inner).prop_map(|(t, a, b)| {
                Formula::gate(GateTable::new(t), a, b)
            }),
        ]
    })
}

/// Arbitrary monotone formulas (∧/∨ over variables and constants).
fn monotone_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0..NVARS).prop_map(Formula::var),
        any::<bool>().prop_map(Formula::constant),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}

proptest! {
    /// Rendering and reparsing reproduces the formula exactly.
    #[test]
    fn parse_render_round_trip(f in any_formula()) {
        let back = parse(&render(&f)).unwrap();
        prop_assert!(f.structurally_eq(&back));
    }

    /// Substitution multiplies leaves: the instantiated count is the
    /// profile-weighted sum of the argument counts.
    #[test]
    fn leaf_count_is_multiplicative_under_substitution(
        f in any_formula(),
        sizes in proptest::collection::vec(1u64..5, NVARS as usize),
    ) {
        let mut next = 0u32;
        let args: Vec<Formula> = sizes
            .iter()
            .map(|&s| {
                let mut g = Formula::var(next);
                next += 1;
                for _ in 1..s {
                    g = Formula::and(g, Formula::var(next));
                    next += 1;
                }
                g
            })
            .collect();
        let inst = f.instantiate(&args).unwrap();
        let profile = f.leaf_profile(NVARS as usize).unwrap();
        let want: u64 = profile.0.iter().zip(&sizes).map(|(c, s)| c * s).sum();
        prop_assert_eq!(inst.leaf_count(), want);
    }

    /// De Morgan dual: for monotone f, dual(f)(x) = ¬f(¬x), and the dual
    /// costs exactly as many leaves.
    #[test]
    fn dualization_negates_through(f in monotone_formula(), a in 0u32..1 << NVARS) {
        let d = f.dualize_monotone().unwrap();
        prop_assert_eq!(d.leaf_count(), f.leaf_count());
        let bits: Vec<bool> = (0..NVARS).map(|i| a >> i & 1 == 1).collect();
        let flipped: Vec<bool> = bits.iter().map(|&b| !b).collect();
        prop_assert_eq!(d.eval(&bits).unwrap(), !f.eval(&flipped).unwrap());
    }

    /// The 64-lane evaluator agrees with single-assignment evaluation.
    #[test]
    fn eval_many_agrees_with_eval(f in any_formula(), a in 0u32..1 << NVARS) {
        let bits: Vec<bool> = (0..NVARS).map(|i| a >> i & 1 == 1).collect();
        let columns: Vec<u64> = bits.iter().map(|&b| if b { 1 } else { 0 }).collect();
        let word = f.eval_many(&columns).unwrap();
        prop_assert_eq!(word & 1 == 1, f.eval(&bits).unwrap());
    }

    /// Balance margins are homogeneous of degree p in the sizes: scaling
    /// every weight by t scales every margin by t^p, so feasibility is
    /// scale-free.
    #[test]
    fn margins_scale_as_t_to_the_p(t in 0.1f64..10.0) {
        let sys = builtin_system("mdfa").unwrap();
        let ps = paper_params("paper-mdfa").unwrap();
        let alpha = ps.alpha.unwrap();
        let base = sys.margins(ps.p, alpha, &ps.weights);
        let scaled_w: Vec<f64> = ps.weights.iter().map(|w| w * t).collect();
        let scaled = sys.margins(ps.p, alpha, &scaled_w);
        let factor = t.powf(ps.p);
        for (b, s) in base.iter().zip(&scaled) {
            prop_assert!((s - b * factor).abs() <= 1e-9 * factor.max(1.0));
        }
    }
}
