//! CSA building blocks: bit encodings, block specifications with formula
//! templates, exhaustive verification, instantiation, and leaf matrices.

mod library;
mod threshold;

pub use library::{
    block, block_library, compose_17_6, compose_chain, csa73, encoder, eq4_threshold_templates,
    eq7_t4_templates, fa3_b0, fa3_b2, fig2, fig3, fig4, mdfa, sfa5, sfa7, sfa7p,
};
pub use threshold::threshold_formula;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Basis, Formula, FormulaError, TruthTable, MAX_TABLE_VARS};

/// Bit encodings carried on block slots.
///
/// Component order (the flattening order used for template variables):
/// * `Std` — `(bit)`;
/// * `XorPair` — `(v, u⊕v)`;
/// * `MonPair` — `(u∧v, u∨v)`;
/// * `SortTriple` — `(s′, s″, s‴, s⊕)` with `s′ = u∨v∨w ≥ s″ = median ≥
///   s‴ = u∧v∧w` and `s⊕ = u⊕v⊕w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    Std,
    XorPair,
    MonPair,
    SortTriple,
}

impl Encoding {
    /// Number of raw bits the code word represents.
    pub fn decoded_bits(self) -> usize {
        match self {
            Encoding::Std => 1,
            Encoding::XorPair | Encoding::MonPair => 2,
            Encoding::SortTriple => 3,
        }
    }

    /// Number of code components.
    pub fn components(self) -> usize {
        match self {
            Encoding::Std => 1,
            Encoding::XorPair | Encoding::MonPair => 2,
            Encoding::SortTriple => 4,
        }
    }

    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            Encoding::Std => &["bit"],
            Encoding::XorPair => &["v", "uxv"],
            Encoding::MonPair => &["and", "or"],
            Encoding::SortTriple => &["s1", "s2", "s3", "sx"],
        }
    }

    /// Encode raw bits into code components.
    pub fn encode(self, bits: &[bool]) -> Vec<bool> {
        assert_eq!(bits.len(), self.decoded_bits());
        match self {
            Encoding::Std => vec![bits[0]],
            Encoding::XorPair => vec![bits[1], bits[0] ^ bits[1]],
            Encoding::MonPair => vec![bits[0] & bits[1], bits[0] | bits[1]],
            Encoding::SortTriple => {
                let (u, v, w) = (bits[0], bits[1], bits[2]);
                vec![u | v | w, (u | v) & w | u & v, u & v & w, u ^ v ^ w]
            }
        }
    }

    /// Is this component vector a valid code word?
    pub fn is_valid(self, comps: &[bool]) -> bool {
        assert_eq!(comps.len(), self.components());
        match self {
            Encoding::Std | Encoding::XorPair => true,
            Encoding::MonPair => comps[0] <= comps[1],
            Encoding::SortTriple => {
                comps[0] >= comps[1]
                    && comps[1] >= comps[2]
                    && comps[3] == (comps[0] ^ comps[1] ^ comps[2])
            }
        }
    }

    /// Sum of the decoded raw bits of a valid code word.
    pub fn decoded_sum(self, comps: &[bool]) -> u32 {
        assert_eq!(comps.len(), self.components());
        match self {
            Encoding::Std => comps[0] as u32,
            // comps (v, u⊕v): u = v ⊕ (u⊕v)
            Encoding::XorPair => (comps[0] ^ comps[1]) as u32 + comps[0] as u32,
            Encoding::MonPair => comps[0] as u32 + comps[1] as u32,
            Encoding::SortTriple => comps[0] as u32 + comps[1] as u32 + comps[2] as u32,
        }
    }

    /// Formulas computing each component from `decoded_bits` fresh variables
    /// starting at `base`, in the block's basis-agnostic monotone/XOR forms
    /// (the `XorPair` encoder uses an XOR gate and is B2-only; the others are
    /// B0-valid).
    pub fn encoder_templates(self, base: u32) -> Vec<Formula> {
        let v = |i: u32| Formula::var(base + i);
        match self {
            Encoding::Std => vec![v(0)],
            Encoding::XorPair => vec![v(1), Formula::xor(v(0), v(1))],
            Encoding::MonPair => {
                vec![Formula::and(v(0), v(1)), Formula::or(v(0), v(1))]
            }
            Encoding::SortTriple => {
                let s1 = Formula::or(Formula::or(v(0), v(1)), v(2));
                let s2 = Formula::or(
                    Formula::and(Formula::or(v(0), v(1)), v(2)),
                    Formula::and(v(0), v(1)),
                );
                let s3 = Formula::and(Formula::and(v(0), v(1)), v(2));
                let sx = xor_b0(&xor_b0(&v(0), &v(1)), &v(2));
                vec![s1, s2, s3, sx]
            }
        }
    }
}

/// `a ⊕ b` in the standard basis: `a·¬b ∨ ¬a·b` with the negations pushed to
/// the leaves. Doubles the leaf count of each argument.
pub(crate) fn xor_b0(a: &Formula, b: &Formula) -> Formula {
    Formula::or(
        Formula::and(a.clone(), b.negated()),
        Formula::and(a.negated(), b.clone()),
    )
}

/// A typed input or output of a block.
#[derive(Clone, Debug, Serialize)]
pub struct Slot {
    pub name: String,
    pub encoding: Encoding,
    /// Weight exponent: each decoded bit contributes `2^significance`.
    pub significance: u32,
}

impl Slot {
    pub fn new(name: &str, encoding: Encoding, significance: u32) -> Slot {
        Slot { name: name.to_string(), encoding, significance }
    }
}

/// A CSA block: typed slots plus one formula template per output code
/// component, written over the flattened input components (slot order, then
/// component order within each slot).
#[derive(Clone, Debug)]
pub struct BlockSpec {
    pub name: String,
    pub basis: Basis,
    pub inputs: Vec<Slot>,
    pub outputs: Vec<Slot>,
    pub templates: Vec<Formula>,
    /// For composites: the leaf matrix accumulated along the wiring, kept
    /// separately from the profile of the expanded templates so the two
    /// computation paths can be compared.
    pub accumulated_matrix: Option<LeafMatrix>,
}

#[derive(Debug, Error)]
pub enum BlockError {
    #[error("block {block}: {bits} decoded input bits exceed the {max} supported for exhaustive verification")]
    ResourceLimit { block: String, bits: usize, max: u32 },
    #[error("block {block}: expected {expected} input component formulas, got {got}")]
    ArgCount { block: String, expected: usize, got: usize },
    #[error("block {block}: input component {component} violates basis {basis}: {detail}")]
    BasisViolation {
        block: String,
        component: String,
        basis: Basis,
        detail: String,
    },
    #[error("threshold formulas support up to 7 inputs, got {n}")]
    UnsupportedThreshold { n: u32 },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Leaf-occurrence matrix: rows are output components, columns input
/// components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafMatrix {
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    pub entries: Vec<Vec<u64>>,
}

/// Result of exhaustive block verification.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub block: String,
    pub assignments: u64,
    pub basis_ok: bool,
    /// Failure descriptions, capped at 20.
    pub failures: Vec<String>,
    pub failure_count: u64,
    pub pass: bool,
}

impl BlockSpec {
    pub fn input_components(&self) -> usize {
        self.inputs.iter().map(|s| s.encoding.components()).sum()
    }

    pub fn output_components(&self) -> usize {
        self.outputs.iter().map(|s| s.encoding.components()).sum()
    }

    pub fn decoded_input_bits(&self) -> usize {
        self.inputs.iter().map(|s| s.encoding.decoded_bits()).sum()
    }

    /// Flattened component names, `slot.component` style.
    pub fn component_names(slots: &[Slot]) -> Vec<String> {
        let mut names = Vec::new();
        for s in slots {
            if s.encoding == Encoding::Std {
                names.push(s.name.clone());
            } else {
                for c in s.encoding.component_names() {
                    names.push(format!("{}.{}", s.name, c));
                }
            }
        }
        names
    }

    /// Leaf matrix of the templates as written (profile of each template over
    /// the flattened input components).
    pub fn leaf_matrix(&self) -> Result<LeafMatrix, FormulaError> {
        let ncols = self.input_components();
        let mut entries = Vec::with_capacity(self.templates.len());
        for t in &self.templates {
            entries.push(t.leaf_profile(ncols)?.0);
        }
        Ok(LeafMatrix {
            row_names: BlockSpec::component_names(&self.outputs),
            col_names: BlockSpec::component_names(&self.inputs),
            entries,
        })
    }

    /// Substitute formulas for the flattened input components.
    pub fn instantiate(&self, args: &[Formula]) -> Result<Vec<Formula>, BlockError> {
        let expected = self.input_components();
        if args.len() != expected {
            return Err(BlockError::ArgCount {
                block: self.name.clone(),
                expected,
                got: args.len(),
            });
        }
        let names = BlockSpec::component_names(&self.inputs);
        for (arg, name) in args.iter().zip(&names) {
            let report = arg.validate_basis(self.basis);
            if !report.is_valid() {
                return Err(BlockError::BasisViolation {
                    block: self.name.clone(),
                    component: name.clone(),
                    basis: self.basis,
                    detail: report.violations[0].clone(),
                });
            }
        }
        let mut outs = Vec::with_capacity(self.templates.len());
        for t in &self.templates {
            outs.push(t.instantiate(args)?);
        }
        Ok(outs)
    }

    /// [`BlockSpec::instantiate`] without the per-argument basis walk — for
    /// construction loops whose arguments are already known to be in basis
    /// (re-validating them is linear in the accumulated formula size).
    pub fn instantiate_unchecked(&self, args: &[Formula]) -> Result<Vec<Formula>, BlockError> {
        let expected = self.input_components();
        if args.len() != expected {
            return Err(BlockError::ArgCount {
                block: self.name.clone(),
                expected,
                got: args.len(),
            });
        }
        let mut outs = Vec::with_capacity(self.templates.len());
        for t in &self.templates {
            outs.push(t.instantiate(args)?);
        }
        Ok(outs)
    }

    /// Exhaustively verify the weighted-sum identity and output code-word
    /// validity over all assignments to the decoded input bits.
    pub fn verify(&self) -> Result<VerificationReport, BlockError> {
        let dbits = self.decoded_input_bits();
        if dbits as u32 > MAX_TABLE_VARS {
            return Err(BlockError::ResourceLimit {
                block: self.name.clone(),
                bits: dbits,
                max: MAX_TABLE_VARS,
            });
        }
        let nv = dbits as u32;

        let mut basis_ok = true;
        for t in &self.templates {
            if !t.validate_basis(self.basis).is_valid() {
                basis_ok = false;
            }
        }

        // truth tables of the encoded input components over the decoded bits
        let mut comp_tables: Vec<TruthTable> = Vec::new();
        let mut base = 0u32;
        for slot in &self.inputs {
            for enc_t in slot.encoding.encoder_templates(base) {
                comp_tables.push(enc_t.truth_table(nv)?);
            }
            base += slot.encoding.decoded_bits() as u32;
        }

        let out_tables: Vec<TruthTable> = self
            .templates
            .iter()
            .map(|t| t.truth_table_with(&comp_tables))
            .collect::<Result<_, _>>()?;

        // per-slot decoded-bit ranges and weights for the identity check
        let mut in_slot_bits: Vec<(u32, u32, u32)> = Vec::new(); // (lo, len, sig)
        let mut lo = 0u32;
        for slot in &self.inputs {
            let len = slot.encoding.decoded_bits() as u32;
            in_slot_bits.push((lo, len, slot.significance));
            lo += len;
        }

        let total = 1u64 << nv;
        let mut failures = Vec::new();
        let mut failure_count = 0u64;
        let mut comps_buf: Vec<bool> = Vec::new();
        for a in 0..total as u32 {
            let mut in_sum = 0u64;
            for &(lo, len, sig) in &in_slot_bits {
                let bits = (a >> lo) & ((1u32 << len) - 1);
                in_sum += (bits.count_ones() as u64) << sig;
            }
            let mut out_sum = 0u64;
            let mut comp_idx = 0usize;
            let mut ok = true;
            let mut reason = String::new();
            for slot in &self.outputs {
                let nc = slot.encoding.components();
                comps_buf.clear();
                for t in &out_tables[comp_idx..comp_idx + nc] {
                    comps_buf.push(t.get(a));
                }
                comp_idx += nc;
                if !slot.encoding.is_valid(&comps_buf) {
                    ok = false;
                    reason = format!("output {} is not a valid code word", slot.name);
                    break;
                }
                out_sum += (slot.encoding.decoded_sum(&comps_buf) as u64) << slot.significance;
            }
            if ok && out_sum != in_sum {
                ok = false;
                reason = format!("weighted sums differ: inputs {in_sum}, outputs {out_sum}");
            }
            if !ok {
                failure_count += 1;
                if failures.len() < 20 {
                    failures.push(format!("assignment {a:#x}: {reason}"));
                }
            }
        }

        Ok(VerificationReport {
            block: self.name.clone(),
            assignments: total,
            basis_ok,
            pass: basis_ok && failure_count == 0,
            failures,
            failure_count,
        })
    }
}
