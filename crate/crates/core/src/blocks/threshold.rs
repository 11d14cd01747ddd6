//! Monotone threshold formulas T_n^k over the standard basis.

use crate::formula::{Basis, Formula};

use super::library::{eq4_threshold_templates, eq7_t4_templates};
use super::{BlockError, Encoding};

/// Monotone B0 formula computing T_n^k (1 iff at least k of the n inputs are
/// 1). For n = 4 (k = 1..4) and n = 5 (k = 2, 4) the published encoded
/// templates are used, composed with the triple/pair encoders; other cases
/// use the standard monotone recursion. `T_n^0` is the constant 1 and
/// `T_n^{n+1}` the constant 0. The same formula serves both bases.
pub fn threshold_formula(n: u32, k: u32, _basis: Basis) -> Result<Formula, BlockError> {
    if n == 0 || n > 7 {
        return Err(BlockError::UnsupportedThreshold { n });
    }
    assert!(k <= n + 1, "threshold k={k} out of range for n={n}");
    if k == 0 {
        return Ok(Formula::constant(true));
    }
    if k > n {
        return Ok(Formula::constant(false));
    }
    if n == 4 {
        let t4 = eq7_t4_templates();
        let enc = Encoding::SortTriple.encoder_templates(1);
        let args = [
            Formula::var(0),
            enc[0].clone(),
            enc[1].clone(),
            enc[2].clone(),
        ];
        return Ok(t4[(k - 1) as usize].instantiate(&args)?);
    }
    if n == 5 && (k == 2 || k == 4) {
        let (t54, t52) = eq4_threshold_templates();
        let penc = |a: u32, b: u32| {
            (
                Formula::and(Formula::var(a), Formula::var(b)),
                Formula::or(Formula::var(a), Formula::var(b)),
            )
        };
        let (a1, o1) = penc(1, 2);
        let (a2, o2) = penc(3, 4);
        let args = [Formula::var(0), a1, o1, a2, o2];
        let t = if k == 4 { t54 } else { t52 };
        return Ok(t.instantiate(&args)?);
    }
    let vars: Vec<u32> = (0..n).collect();
    Ok(recurse(&vars, k))
}

fn recurse(vars: &[u32], k: u32) -> Formula {
    let n = vars.len() as u32;
    debug_assert!(k >= 1 && k <= n);
    if k == n {
        return Formula::and_all(vars.iter().map(|&i| Formula::var(i)));
    }
    if k == 1 {
        return Formula::or_all(vars.iter().map(|&i| Formula::var(i)));
    }
    let (&last, rest) = vars.split_last().unwrap();
    Formula::or(
        Formula::and(Formula::var(last), recurse(rest, k - 1)),
        recurse(rest, k),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u32, k: u32, f: &Formula) {
        for a in 0..1u32 << n {
            let bits: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            let want = bits.iter().filter(|&&b| b).count() as u32 >= k;
            assert_eq!(f.eval(&bits).unwrap(), want, "T_{n}^{k} on {bits:?}");
        }
    }

    #[test]
    fn all_supported_thresholds_are_correct_and_b0() {
        for n in 1..=7u32 {
            for k in 0..=n + 1 {
                let f = threshold_formula(n, k, Basis::B0).unwrap();
                assert!(f.validate_basis(Basis::B0).is_valid());
                brute(n, k, &f);
            }
        }
    }

    #[test]
    fn t2_definitions() {
        let t21 = threshold_formula(2, 1, Basis::B0).unwrap();
        assert!(t21.structurally_eq(&Formula::or(Formula::var(0), Formula::var(1))));
        let t22 = threshold_formula(2, 2, Basis::B0).unwrap();
        assert!(t22.structurally_eq(&Formula::and(Formula::var(0), Formula::var(1))));
    }

    #[test]
    fn unsupported_arity() {
        assert!(threshold_formula(8, 3, Basis::B0).is_err());
    }
}
