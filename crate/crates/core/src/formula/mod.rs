//! Boolean formula intermediate representation.
//!
//! Formulas are immutable trees of variable leaves, constants, negations and
//! 2-input gates. Structurally identical subformulas may share storage (the
//! size model is still the fully expanded tree: all size accounting counts
//! variable-leaf occurrences of the expansion). Negations and constants are
//! free; `leaf_count` is the complexity measure used throughout the crate.

mod text;

pub use text::{parse, render, ParseError};

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// Formula basis policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    /// All sixteen 2-input gates, plus free negation and constants.
    B2,
    /// Only AND and OR at internal nodes; negation directly on variable
    /// leaves; constants allowed as leaves.
    B0,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::B2 => write!(f, "b2"),
            Basis::B0 => write!(f, "b0"),
        }
    }
}

/// A 2-input gate as an explicit 4-entry truth table.
///
/// Bit `i` of the byte is the output for inputs `(left, right)` with
/// `i = 2*left + right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GateTable(u8);

impl GateTable {
    pub const AND: GateTable = GateTable(0b1000);
    pub const OR: GateTable = GateTable(0b1110);
    pub const XOR: GateTable = GateTable(0b0110);

    pub fn new(bits: u8) -> GateTable {
        GateTable(bits & 0xf)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn apply(self, left: bool, right: bool) -> bool {
        let idx = ((left as u8) << 1) | right as u8;
        self.0 >> idx & 1 == 1
    }

    /// Bitwise-parallel [`GateTable::apply`]: each bit position of the words
    /// is an independent (left, right) pair.
    pub fn apply_words(self, left: u64, right: u64) -> u64 {
        let mut out = 0;
        if self.0 & 0b0001 != 0 {
            out |= !left & !right;
        }
        if self.0 & 0b0010 != 0 {
            out |= !left & right;
        }
        if self.0 & 0b0100 != 0 {
            out |= left & !right;
        }
        if self.0 & 0b1000 != 0 {
            out |= left & right;
        }
        out
    }

    /// The gate computing the complement of this one.
    pub fn complement(self) -> GateTable {
        GateTable(!self.0 & 0xf)
    }

    /// Four-character text form, outputs for (0,0),(0,1),(1,0),(1,1).
    pub fn as_text(self) -> String {
        (0..4).map(|i| if self.0 >> i & 1 == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Debug)]
enum Op {
    Var(u32),
    Const(bool),
    Not(Formula),
    Gate2 {
        table: GateTable,
        left: Formula,
        right: Formula,
    },
}

#[derive(Debug)]
struct Node {
    op: Op,
    /// Variable-leaf occurrences of the expanded tree.
    leaves: u64,
    /// Cached leaf-pushed negation; filled on first use so shared subgraphs
    /// are negated at most once, keeping repeated negation linear.
    neg: std::cell::OnceCell<Formula>,
}

/// A Boolean formula. Cheap to clone; see the module docs for the size model.
#[derive(Clone, Debug)]
pub struct Formula(Rc<Node>);

#[derive(Debug, Error, PartialEq)]
pub enum FormulaError {
    #[error("variable index {index} out of range for arity {arity}")]
    VarOutOfRange { index: u32, arity: u32 },
    #[error("truth table arity {0} exceeds the supported limit of 24 variables")]
    ArityLimit(u32),
    #[error("formula is not monotone: {0} at {1}")]
    NotMonotone(&'static str, String),
    #[error("missing argument for slot variable {0}")]
    MissingArgument(u32),
}

/// Occurrence counts of each slot variable in a template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafProfile(pub Vec<u64>);

impl LeafProfile {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// An explicit truth table over `nvars` variables; variable 0 is the least
/// significant bit of the assignment index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    nvars: u32,
    words: Vec<u64>,
}

pub const MAX_TABLE_VARS: u32 = 24;

impl TruthTable {
    fn zero(nvars: u32) -> TruthTable {
        let nwords = if nvars >= 6 { 1 << (nvars - 6) } else { 1 };
        TruthTable { nvars, words: vec![0; nwords] }
    }

    fn tail_mask(nvars: u32) -> u64 {
        if nvars >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << nvars)) - 1
        }
    }

    pub fn constant(nvars: u32, value: bool) -> TruthTable {
        let mut t = TruthTable::zero(nvars);
        if value {
            let mask = TruthTable::tail_mask(nvars);
            for w in &mut t.words {
                *w = mask;
            }
        }
        t
    }

    /// Table of the projection onto variable `index`.
    pub fn var(nvars: u32, index: u32) -> TruthTable {
        assert!(index < nvars);
        let mut t = TruthTable::zero(nvars);
        if index >= 6 {
            for (w, word) in t.words.iter_mut().enumerate() {
                if w >> (index - 6) & 1 == 1 {
                    *word = u64::MAX;
                }
            }
        } else {
            // within-word pattern: blocks of 2^index set bits
            let mut pat = 0u64;
            for a in 0..64u64 {
                if a >> index & 1 == 1 {
                    pat |= 1 << a;
                }
            }
            pat &= TruthTable::tail_mask(nvars);
            for word in &mut t.words {
                *word = pat;
            }
        }
        t
    }

    /// Build a table from a predicate on assignments.
    pub fn from_fn(nvars: u32, mut f: impl FnMut(u32) -> bool) -> TruthTable {
        let mut t = TruthTable::zero(nvars);
        for a in 0..(1u32 << nvars) {
            if f(a) {
                t.words[(a >> 6) as usize] |= 1 << (a & 63);
            }
        }
        t
    }

    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    pub fn len(&self) -> usize {
        1 << self.nvars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, assignment: u32) -> bool {
        debug_assert!(assignment < 1u32 << self.nvars);
        self.words[(assignment >> 6) as usize] >> (assignment & 63) & 1 == 1
    }

    fn not(&self) -> TruthTable {
        let mask = TruthTable::tail_mask(self.nvars);
        TruthTable {
            nvars: self.nvars,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    fn combine(table: GateTable, a: &TruthTable, b: &TruthTable) -> TruthTable {
        assert_eq!(a.nvars, b.nvars);
        let mask = TruthTable::tail_mask(a.nvars);
        let mut out = TruthTable::zero(a.nvars);
        for ((o, &x), &y) in out.words.iter_mut().zip(&a.words).zip(&b.words) {
            let mut w = 0u64;
            if table.apply(false, false) {
                w |= !x & !y;
            }
            if table.apply(false, true) {
                w |= !x & y;
            }
            if table.apply(true, false) {
                w |= x & !y;
            }
            if table.apply(true, true) {
                w |= x & y;
            }
            *o = w & mask;
        }
        out
    }

    /// Number of satisfying assignments.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

impl Formula {
    pub fn var(index: u32) -> Formula {
        Formula(Rc::new(Node { op: Op::Var(index), leaves: 1, neg: Default::default() }))
    }

    pub fn constant(value: bool) -> Formula {
        Formula(Rc::new(Node { op: Op::Const(value), leaves: 0, neg: Default::default() }))
    }

    pub fn not(f: Formula) -> Formula {
        let leaves = f.leaf_count();
        Formula(Rc::new(Node { op: Op::Not(f), leaves, neg: Default::default() }))
    }

    pub fn gate(table: GateTable, left: Formula, right: Formula) -> Formula {
        let leaves = left.leaf_count().saturating_add(right.leaf_count());
        Formula(Rc::new(Node { op: Op::Gate2 { table, left, right }, leaves, neg: Default::default() }))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::gate(GateTable::AND, left, right)
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::gate(GateTable::OR, left, right)
    }

    pub fn xor(left: Formula, right: Formula) -> Formula {
        Formula::gate(GateTable::XOR, left, right)
    }

    /// Conjunction of a non-empty list, left-associated.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        let first = it.next().expect("and_all of empty list");
        it.fold(first, Formula::and)
    }

    /// Disjunction of a non-empty list, left-associated.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        let first = it.next().expect("or_all of empty list");
        it.fold(first, Formula::or)
    }

    fn ptr(&self) -> *const Node {
        Rc::as_ptr(&self.0)
    }

    /// Pointer identity (same shared node).
    pub fn same_node(&self, other: &Formula) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// Variable-leaf occurrences of the expanded tree.
    pub fn leaf_count(&self) -> u64 {
        self.0.leaves
    }

    /// Largest variable index plus one, 0 for variable-free formulas.
    pub fn arity(&self) -> u32 {
        let mut max = 0u32;
        self.visit_nodes(|node| {
            if let Op::Var(i) = node.op {
                max = max.max(i + 1);
            }
        });
        max
    }

    /// Visit every distinct shared node once, children before parents.
    fn visit_nodes(&self, mut f: impl FnMut(&Node)) {
        let mut seen: HashMap<*const Node, ()> = HashMap::new();
        let mut stack: Vec<(Formula, bool)> = vec![(self.clone(), false)];
        while let Some((cur, expanded)) = stack.pop() {
            if expanded {
                f(&cur.0);
                continue;
            }
            if seen.contains_key(&cur.ptr()) {
                continue;
            }
            seen.insert(cur.ptr(), ());
            stack.push((cur.clone(), true));
            match &cur.0.op {
                Op::Var(_) | Op::Const(_) => {}
                Op::Not(c) => stack.push((c.clone(), false)),
                Op::Gate2 { left, right, .. } => {
                    stack.push((left.clone(), false));
                    stack.push((right.clone(), false));
                }
            }
        }
    }

    /// Evaluate under an assignment (`assignment[i]` is the value of `Var(i)`).
    pub fn eval(&self, assignment: &[bool]) -> Result<bool, FormulaError> {
        let arity = assignment.len() as u32;
        let mut memo: HashMap<*const Node, bool> = HashMap::new();
        let mut stack: Vec<(Formula, bool)> = vec![(self.clone(), false)];
        while let Some((cur, expanded)) = stack.pop() {
            if memo.contains_key(&cur.ptr()) {
                continue;
            }
            if !expanded {
                match &cur.0.op {
                    Op::Var(i) => {
                        if *i >= arity {
                            return Err(FormulaError::VarOutOfRange { index: *i, arity });
                        }
                        memo.insert(cur.ptr(), assignment[*i as usize]);
                    }
                    Op::Const(b) => {
                        memo.insert(cur.ptr(), *b);
                    }
                    Op::Not(c) => {
                        stack.push((cur.clone(), true));
                        stack.push((c.clone(), false));
                    }
                    Op::Gate2 { left, right, .. } => {
                        stack.push((cur.clone(), true));
                        stack.push((left.clone(), false));
                        stack.push((right.clone(), false));
                    }
                }
            } else {
                let v = match &cur.0.op {
                    Op::Not(c) => !memo[&c.ptr()],
                    Op::Gate2 { table, left, right } => {
                        table.apply(memo[&left.ptr()], memo[&right.ptr()])
                    }
                    _ => unreachable!(),
                };
                memo.insert(cur.ptr(), v);
            }
        }
        Ok(memo[&self.ptr()])
    }

    /// Evaluate up to 64 assignments at once. `columns[i]` carries the value
    /// of `Var(i)` across the assignments, one assignment per bit; the
    /// returned word carries the formula value in the same bit positions.
    pub fn eval_many(&self, columns: &[u64]) -> Result<u64, FormulaError> {
        let arity = columns.len() as u32;
        let mut memo: HashMap<*const Node, u64> = HashMap::new();
        let mut stack: Vec<(Formula, bool)> = vec![(self.clone(), false)];
        while let Some((cur, expanded)) = stack.pop() {
            if memo.contains_key(&cur.ptr()) {
                continue;
            }
            if !expanded {
                match &cur.0.op {
                    Op::Var(i) => {
                        if *i >= arity {
                            return Err(FormulaError::VarOutOfRange { index: *i, arity });
                        }
                        memo.insert(cur.ptr(), columns[*i as usize]);
                    }
                    Op::Const(b) => {
                        memo.insert(cur.ptr(), if *b { u64::MAX } else { 0 });
                    }
                    Op::Not(c) => {
                        stack.push((cur.clone(), true));
                        stack.push((c.clone(), false));
                    }
                    Op::Gate2 { left, right, .. } => {
                        stack.push((cur.clone(), true));
                        stack.push((left.clone(), false));
                        stack.push((right.clone(), false));
                    }
                }
            } else {
                let v = match &cur.0.op {
                    Op::Not(c) => !memo[&c.ptr()],
                    Op::Gate2 { table, left, right } => {
                        table.apply_words(memo[&left.ptr()], memo[&right.ptr()])
                    }
                    _ => unreachable!(),
                };
                memo.insert(cur.ptr(), v);
            }
        }
        Ok(memo[&self.ptr()])
    }

    /// Full truth table over `nvars` variables.
    pub fn truth_table(&self, nvars: u32) -> Result<TruthTable, FormulaError> {
        if nvars > MAX_TABLE_VARS {
            return Err(FormulaError::ArityLimit(nvars));
        }
        let inputs: Vec<TruthTable> = (0..nvars).map(|i| TruthTable::var(nvars, i)).collect();
        // memoize shared nodes only while tables are small
        let memoize = nvars <= 16;
        let mut memo: HashMap<*const Node, TruthTable> = HashMap::new();
        self.table_walk(&inputs, nvars, memoize, &mut memo)
    }

    /// Truth table where `Var(i)` is interpreted as the given input table.
    pub fn truth_table_with(&self, inputs: &[TruthTable]) -> Result<TruthTable, FormulaError> {
        let nvars = inputs
            .first()
            .map(|t| t.nvars)
            .unwrap_or(0);
        let mut memo = HashMap::new();
        self.table_walk(inputs, nvars, false, &mut memo)
    }

    fn table_walk(
        &self,
        inputs: &[TruthTable],
        nvars: u32,
        memoize: bool,
        memo: &mut HashMap<*const Node, TruthTable>,
    ) -> Result<TruthTable, FormulaError> {
        if memoize {
            if let Some(t) = memo.get(&self.ptr()) {
                return Ok(t.clone());
            }
        }
        let t = match &self.0.op {
            Op::Var(i) => inputs
                .get(*i as usize)
                .cloned()
                .ok_or(FormulaError::VarOutOfRange { index: *i, arity: inputs.len() as u32 })?,
            Op::Const(b) => TruthTable::constant(nvars, *b),
            Op::Not(c) => c.table_walk(inputs, nvars, memoize, memo)?.not(),
            Op::Gate2 { table, left, right } => {
                let l = left.table_walk(inputs, nvars, memoize, memo)?;
                let r = right.table_walk(inputs, nvars, memoize, memo)?;
                TruthTable::combine(*table, &l, &r)
            }
        };
        if memoize {
            memo.insert(self.ptr(), t.clone());
        }
        Ok(t)
    }

    /// Per-slot leaf occurrence counts of the expanded tree.
    pub fn leaf_profile(&self, nslots: usize) -> Result<LeafProfile, FormulaError> {
        // nodes in child-before-parent order
        let mut order: Vec<Formula> = Vec::new();
        self.visit_nodes_collect(&mut order);
        let index: HashMap<*const Node, usize> =
            order.iter().enumerate().map(|(i, f)| (f.ptr(), i)).collect();
        // tree-path multiplicities, root-down
        let mut mult = vec![0u64; order.len()];
        mult[index[&self.ptr()]] = 1;
        let mut counts = vec![0u64; nslots];
        for i in (0..order.len()).rev() {
            let m = mult[i];
            if m == 0 {
                continue;
            }
            match &order[i].0.op {
                Op::Var(v) => {
                    if *v as usize >= nslots {
                        return Err(FormulaError::VarOutOfRange {
                            index: *v,
                            arity: nslots as u32,
                        });
                    }
                    counts[*v as usize] = counts[*v as usize].saturating_add(m);
                }
                Op::Const(_) => {}
                Op::Not(c) => {
                    let j = index[&c.ptr()];
                    mult[j] = mult[j].saturating_add(m);
                }
                Op::Gate2 { left, right, .. } => {
                    let j = index[&left.ptr()];
                    mult[j] = mult[j].saturating_add(m);
                    let k = index[&right.ptr()];
                    mult[k] = mult[k].saturating_add(m);
                }
            }
        }
        Ok(LeafProfile(counts))
    }

    fn visit_nodes_collect(&self, out: &mut Vec<Formula>) {
        let mut seen: HashMap<*const Node, ()> = HashMap::new();
        let mut stack: Vec<(Formula, bool)> = vec![(self.clone(), false)];
        while let Some((cur, expanded)) = stack.pop() {
            if expanded {
                out.push(cur);
                continue;
            }
            if seen.contains_key(&cur.ptr()) {
                continue;
            }
            seen.insert(cur.ptr(), ());
            stack.push((cur.clone(), true));
            match &cur.0.op {
                Op::Var(_) | Op::Const(_) => {}
                Op::Not(c) => stack.push((c.clone(), false)),
                Op::Gate2 { left, right, .. } => {
                    stack.push((left.clone(), false));
                    stack.push((right.clone(), false));
                }
            }
        }
        // `out` is in child-before-parent order except for shared-node skips;
        // re-sort by a full post-order index
        // (visit_nodes already emits children first, so nothing to do)
    }

    /// Basis validity check; returns violating node paths (capped).
    pub fn validate_basis(&self, basis: Basis) -> BasisReport {
        let mut report = BasisReport { basis, violations: Vec::new() };
        if basis == Basis::B2 {
            return report; // everything is a B2 formula
        }
        let mut clean: HashMap<*const Node, bool> = HashMap::new();
        self.check_b0(&mut String::from("root"), &mut clean, &mut report);
        report
    }

    fn check_b0(
        &self,
        path: &mut String,
        clean: &mut HashMap<*const Node, bool>,
        report: &mut BasisReport,
    ) -> bool {
        if report.violations.len() >= 100 {
            return false;
        }
        if let Some(&ok) = clean.get(&self.ptr()) {
            if ok {
                return true;
            }
            // fall through to report violations along this path too? keep it
            // cheap: shared dirty subtrees are reported once
            return false;
        }
        let ok = match &self.0.op {
            Op::Var(_) | Op::Const(_) => true,
            Op::Not(c) => {
                if matches!(c.0.op, Op::Var(_)) {
                    true
                } else {
                    report
                        .violations
                        .push(format!("{path}: negation of a non-variable subformula"));
                    let len = path.len();
                    path.push_str(".0");
                    c.check_b0(path, clean, report);
                    path.truncate(len);
                    false
                }
            }
            Op::Gate2 { table, left, right } => {
                let mut ok = true;
                if *table != GateTable::AND && *table != GateTable::OR {
                    report
                        .violations
                        .push(format!("{path}: gate {} is not AND or OR", table.as_text()));
                    ok = false;
                }
                let len = path.len();
                path.push_str(".l");
                let lok = left.check_b0(path, clean, report);
                path.truncate(len);
                path.push_str(".r");
                let rok = right.check_b0(path, clean, report);
                path.truncate(len);
                ok && lok && rok
            }
        };
        clean.insert(self.ptr(), ok);
        ok
    }

    /// Swap AND with OR and complement constants. Requires a monotone formula
    /// (no negations, gates restricted to AND/OR); the result `f*` satisfies
    /// `f*(x) = !f(!x)` with the identical leaf profile.
    pub fn dualize_monotone(&self) -> Result<Formula, FormulaError> {
        let mut memo: HashMap<*const Node, Formula> = HashMap::new();
        self.dualize_inner(&mut memo)
    }

    fn dualize_inner(
        &self,
        memo: &mut HashMap<*const Node, Formula>,
    ) -> Result<Formula, FormulaError> {
        if let Some(f) = memo.get(&self.ptr()) {
            return Ok(f.clone());
        }
        let out = match &self.0.op {
            Op::Var(i) => Formula::var(*i),
            Op::Const(b) => Formula::constant(!*b),
            Op::Not(_) => {
                return Err(FormulaError::NotMonotone("negation", String::from("node")))
            }
            Op::Gate2 { table, left, right } => {
                let l = left.dualize_inner(memo)?;
                let r = right.dualize_inner(memo)?;
                if *table == GateTable::AND {
                    Formula::or(l, r)
                } else if *table == GateTable::OR {
                    Formula::and(l, r)
                } else {
                    return Err(FormulaError::NotMonotone(
                        "non-monotone gate",
                        table.as_text(),
                    ));
                }
            }
        };
        memo.insert(self.ptr(), out.clone());
        Ok(out)
    }

    /// Negation with the NOT pushed to the leaves: De Morgan through AND/OR,
    /// table complement for other gates, constant flip. Preserves both the
    /// leaf profile and B0 validity of B0 inputs.
    pub fn negated(&self) -> Formula {
        if let Some(f) = self.0.neg.get() {
            return f.clone();
        }
        let out = match &self.0.op {
            Op::Var(_) => Formula::not(self.clone()),
            Op::Const(b) => Formula::constant(!*b),
            Op::Not(c) => c.clone(),
            Op::Gate2 { table, left, right } => {
                if *table == GateTable::AND {
                    Formula::or(left.negated(), right.negated())
                } else if *table == GateTable::OR {
                    Formula::and(left.negated(), right.negated())
                } else {
                    Formula::gate(table.complement(), left.clone(), right.clone())
                }
            }
        };
        let _ = self.0.neg.set(out.clone());
        // the two nodes are each other's negation; the back link lets a
        // negate-negate round trip return the original node (the resulting
        // reference cycle pins the pair in memory, an accepted trade for
        // linear-size repeated negation)
        let _ = out.0.neg.set(self.clone());
        out
    }

    /// Replace every `Var(i)` leaf with `args[i]`; a negated leaf `Not(Var(i))`
    /// becomes the pushed negation of `args[i]`.
    pub fn instantiate(&self, args: &[Formula]) -> Result<Formula, FormulaError> {
        let mut memo: HashMap<*const Node, Formula> = HashMap::new();
        self.instantiate_inner(args, &mut memo)
    }

    fn instantiate_inner(
        &self,
        args: &[Formula],
        memo: &mut HashMap<*const Node, Formula>,
    ) -> Result<Formula, FormulaError> {
        if let Some(f) = memo.get(&self.ptr()) {
            return Ok(f.clone());
        }
        let out = match &self.0.op {
            Op::Var(i) => args
                .get(*i as usize)
                .cloned()
                .ok_or(FormulaError::MissingArgument(*i))?,
            Op::Const(b) => Formula::constant(*b),
            Op::Not(c) => c.instantiate_inner(args, memo)?.negated(),
            Op::Gate2 { table, left, right } => Formula::gate(
                *table,
                left.instantiate_inner(args, memo)?,
                right.instantiate_inner(args, memo)?,
            ),
        };
        memo.insert(self.ptr(), out.clone());
        Ok(out)
    }

    /// Structural equality of the expanded trees.
    pub fn structurally_eq(&self, other: &Formula) -> bool {
        if self.same_node(other) {
            return true;
        }
        match (&self.0.op, &other.0.op) {
            (Op::Var(a), Op::Var(b)) => a == b,
            (Op::Const(a), Op::Const(b)) => a == b,
            (Op::Not(a), Op::Not(b)) => a.structurally_eq(b),
            (
                Op::Gate2 { table: ta, left: la, right: ra },
                Op::Gate2 { table: tb, left: lb, right: rb },
            ) => ta == tb && la.structurally_eq(lb) && ra.structurally_eq(rb),
            _ => false,
        }
    }

    pub(crate) fn op_view(&self) -> OpView<'_> {
        match &self.0.op {
            Op::Var(i) => OpView::Var(*i),
            Op::Const(b) => OpView::Const(*b),
            Op::Not(c) => OpView::Not(c),
            Op::Gate2 { table, left, right } => OpView::Gate2(*table, left, right),
        }
    }
}

/// Borrowed view of a node, used by the text renderer.
pub(crate) enum OpView<'a> {
    Var(u32),
    Const(bool),
    Not(&'a Formula),
    Gate2(GateTable, &'a Formula, &'a Formula),
}

/// Result of a basis validation.
#[derive(Debug)]
pub struct BasisReport {
    pub basis: Basis,
    pub violations: Vec<String>,
}

impl BasisReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn eval_xor_of_equal_vars() {
        let f = Formula::xor(v(0), v(1));
        assert!(!f.eval(&[true, true]).unwrap());
        assert!(f.eval(&[true, false]).unwrap());
    }

    #[test]
    fn eval_constant_ignores_assignment() {
        let f = Formula::constant(false);
        assert!(!f.eval(&[]).unwrap());
        assert!(!f.eval(&[true, true, true]).unwrap());
    }

    #[test]
    fn eval_out_of_range_names_index() {
        let f = Formula::xor(v(0), v(7));
        let err = f.eval(&[true, false]).unwrap_err();
        assert_eq!(err, FormulaError::VarOutOfRange { index: 7, arity: 2 });
    }

    #[test]
    fn and_truth_table() {
        let f = Formula::and(v(0), v(1));
        let t = f.truth_table(2).unwrap();
        assert_eq!((t.get(0), t.get(1), t.get(2), t.get(3)), (false, false, false, true));
    }

    #[test]
    fn truth_table_arity_limit() {
        let f = v(0);
        assert_eq!(f.truth_table(25).unwrap_err(), FormulaError::ArityLimit(25));
    }

    #[test]
    fn truth_table_matches_eval_on_wide_table() {
        // crosses the 64-bit word boundary (7 vars = 2 words)
        let f = Formula::xor(Formula::and(v(0), v(6)), Formula::or(v(3), Formula::not(v(5))));
        let t = f.truth_table(7).unwrap();
        for a in 0..128u32 {
            let assignment: Vec<bool> = (0..7).map(|i| a >> i & 1 == 1).collect();
            assert_eq!(t.get(a), f.eval(&assignment).unwrap(), "assignment {a:#09b}");
        }
    }

    #[test]
    fn leaf_count_free_negations_and_constants() {
        let f = Formula::and(Formula::not(v(0)), Formula::or(Formula::constant(true), v(0)));
        assert_eq!(f.leaf_count(), 2);
    }

    #[test]
    fn leaf_profile_counts_occurrences() {
        let f = Formula::and(Formula::xor(v(0), v(2)), Formula::xor(v(2), Formula::not(v(2))));
        assert_eq!(f.leaf_profile(3).unwrap(), LeafProfile(vec![1, 0, 3]));
    }

    #[test]
    fn leaf_profile_respects_sharing_multiplicity() {
        let shared = Formula::or(v(0), v(1));
        let f = Formula::and(shared.clone(), Formula::and(shared.clone(), shared));
        assert_eq!(f.leaf_count(), 6);
        assert_eq!(f.leaf_profile(2).unwrap(), LeafProfile(vec![3, 3]));
    }

    #[test]
    fn validate_b0_rejects_xor() {
        let f = Formula::xor(v(0), v(1));
        let r = f.validate_basis(Basis::B0);
        assert!(!r.is_valid());
        assert!(r.violations[0].contains("0110"));
    }

    #[test]
    fn validate_b0_rejects_inner_negation() {
        let f = Formula::not(Formula::and(v(0), v(1)));
        let r = f.validate_basis(Basis::B0);
        assert!(!r.is_valid());
        assert!(r.violations[0].contains("negation"));
    }

    #[test]
    fn validate_b0_accepts_leaf_negation() {
        let f = Formula::and(Formula::not(v(0)), Formula::or(v(1), Formula::constant(false)));
        assert!(f.validate_basis(Basis::B0).is_valid());
        assert!(f.validate_basis(Basis::B2).is_valid());
    }

    #[test]
    fn dual_of_literal_is_itself() {
        let f = v(0);
        assert!(f.dualize_monotone().unwrap().structurally_eq(&f));
    }

    #[test]
    fn dual_semantics() {
        let f = Formula::or(Formula::and(v(0), v(1)), v(2));
        let d = f.dualize_monotone().unwrap();
        for a in 0..8u32 {
            let x: Vec<bool> = (0..3).map(|i| a >> i & 1 == 1).collect();
            let nx: Vec<bool> = x.iter().map(|b| !b).collect();
            assert_eq!(d.eval(&x).unwrap(), !f.eval(&nx).unwrap());
        }
    }

    #[test]
    fn dual_rejects_negation() {
        let f = Formula::not(v(0));
        assert!(f.dualize_monotone().is_err());
    }

    #[test]
    fn negated_preserves_leaf_count_and_b0() {
        let f = Formula::or(Formula::and(v(0), Formula::not(v(1))), v(2));
        let n = f.negated();
        assert_eq!(n.leaf_count(), f.leaf_count());
        assert!(n.validate_basis(Basis::B0).is_valid());
        for a in 0..8u32 {
            let x: Vec<bool> = (0..3).map(|i| a >> i & 1 == 1).collect();
            assert_eq!(n.eval(&x).unwrap(), !f.eval(&x).unwrap());
        }
    }

    #[test]
    fn instantiate_duplicates_argument() {
        let t = Formula::and(v(0), v(1));
        let got = t.instantiate(&[v(5), v(5)]).unwrap();
        assert!(got.structurally_eq(&Formula::and(v(5), v(5))));
        assert_eq!(got.leaf_count(), 2);
    }

    #[test]
    fn instantiate_missing_argument() {
        let t = Formula::and(v(0), v(3));
        assert_eq!(t.instantiate(&[v(0)]).unwrap_err(), FormulaError::MissingArgument(3));
    }

    #[test]
    fn instantiate_pushes_negation_de_morgan() {
        let t = Formula::not(v(0));
        let arg = Formula::or(v(4), v(5));
        let got = t.instantiate(&[arg]).unwrap();
        assert!(got
            .structurally_eq(&Formula::and(Formula::not(v(4)), Formula::not(v(5)))));
        assert!(got.validate_basis(Basis::B0).is_valid());
    }

    #[test]
    fn instantiate_leaf_count_multiplicative() {
        // template with profile (1,2,1)
        let t = Formula::xor(
            Formula::and(Formula::xor(v(0), v(1)), v(1)),
            v(2),
        );
        assert_eq!(t.leaf_profile(3).unwrap(), LeafProfile(vec![1, 2, 1]));
        let args = [v(0), v(1), Formula::xor(v(2), v(3))];
        let inst = t.instantiate(&args).unwrap();
        assert_eq!(inst.leaf_count(), 1 * 1 + 2 * 1 + 1 * 2);
    }

    #[test]
    fn var_table_patterns() {
        let t = TruthTable::var(3, 1);
        let bits: Vec<bool> = (0..8).map(|a| t.get(a)).collect();
        assert_eq!(bits, vec![false, false, true, true, false, false, true, true]);
    }
}
