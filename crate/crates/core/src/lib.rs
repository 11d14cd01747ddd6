//! Carry-save-adder formula constructions for the counting function.
//!
//! The crate provides four layers:
//!
//! * [`formula`] — a Boolean formula IR over the full binary basis (`B2`) or
//!   the standard basis (`B0`), with leaf-count size accounting;
//! * [`blocks`] — the CSA block library (full adders, MDFA, sorting full
//!   adders, composites) with exhaustive verification;
//! * [`analysis`] — cost-inequality systems, balance conditions, and the
//!   exponent optimizers that certify size bounds;
//! * [`build`] — a scheduler that assembles actual counter / symmetric-function
//!   formulas from the block library and measures their growth.

pub mod analysis;
pub mod blocks;
pub mod build;
pub mod cli;
pub mod formula;

/// Scalar type used by the optimizers and reports. The margin arithmetic in
/// [`analysis`] is generic over `num_traits::Float`; this alias pins the
/// concrete instantiation used by the CLI.
pub type Scalar = f64;

/// Strictness margin for all feasibility checks ("> 0" is realized as "> EPS").
pub const EPS: Scalar = 1e-9;
