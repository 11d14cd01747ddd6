//! Exponent certification: cost-inequality systems, balance margins,
//! parameter optimization, matrix exponents, and level planning.

mod expr;
mod optimize;
mod plan;
mod systems;

pub use expr::{parse_expr, Expr, ExprError};
pub use optimize::{
    bit_exponent, matrix_exponent, optimize_params, Budget, OptimizeOutcome,
};
pub use plan::{plan_levels, plan_levels_matrix, LevelPlan, PlanError, PlanType};
pub use systems::{builtin_matrix, builtin_system, paper_params};

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

/// One encoding type of a cost system: its input size variables and output
/// bound names.
#[derive(Clone, Debug, Serialize)]
pub struct TypeClass {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// Symbolic cost-transfer inequalities: one max-of-affine upper bound per
/// output size variable.
#[derive(Clone, Debug)]
pub struct CostSystem {
    pub name: String,
    pub has_alpha: bool,
    pub types: Vec<TypeClass>,
    /// Bound expression per output, flattened in type order.
    pub bounds: Vec<Expr>,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("unknown matrix {0:?}")]
    UnknownMatrix(String),
    #[error("unknown parameter set {0:?}")]
    UnknownParams(String),
    #[error("{file} line {line}: {message}")]
    FileFormat {
        file: String,
        line: usize,
        message: String,
    },
    #[error("system {system} needs {expected} weights, got {got}")]
    WeightCount {
        system: String,
        expected: usize,
        got: usize,
    },
    #[error("system {system} requires alpha but the parameter set has none")]
    MissingAlpha { system: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl CostSystem {
    /// Flattened input-variable names, in type order.
    pub fn input_names(&self) -> Vec<String> {
        self.types.iter().flat_map(|t| t.inputs.clone()).collect()
    }

    pub fn input_count(&self) -> usize {
        self.types.iter().map(|t| t.inputs.len()).sum()
    }

    /// Per-type balance margins Σ X^p − Σ Y^p with the outputs replaced by
    /// their upper bounds.
    pub fn margins<F: Float>(&self, p: F, alpha: F, weights: &[F]) -> Vec<F> {
        let mut out = Vec::with_capacity(self.types.len());
        let mut in_off = 0usize;
        let mut bound_off = 0usize;
        for t in &self.types {
            let mut m = F::zero();
            for w in &weights[in_off..in_off + t.inputs.len()] {
                m = m + w.powf(p);
            }
            for b in &self.bounds[bound_off..bound_off + t.outputs.len()] {
                m = m - b.eval(alpha, weights).powf(p);
            }
            out.push(m);
            in_off += t.inputs.len();
            bound_off += t.outputs.len();
        }
        out
    }

    /// Parse the structured text format (see the builtin systems for
    /// examples).
    pub fn parse(name_hint: &str, src: &str) -> Result<CostSystem, AnalysisError> {
        let mut name = name_hint.to_string();
        let mut has_alpha = false;
        let mut types: Vec<TypeClass> = Vec::new();
        let mut bound_lines: Vec<(usize, String, String)> = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AnalysisError::FileFormat {
                file: name_hint.to_string(),
                line: ln + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix("system ") {
                name = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("alpha ") {
                has_alpha = matches!(rest.trim(), "yes" | "true");
            } else if let Some(rest) = line.strip_prefix("type ") {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let in_pos = words.iter().position(|w| *w == "in");
                let out_pos = words.iter().position(|w| *w == "out");
                match (words.first(), in_pos, out_pos) {
                    (Some(tname), Some(i), Some(o)) if i < o => types.push(TypeClass {
                        name: tname.to_string(),
                        inputs: words[i + 1..o].iter().map(|s| s.to_string()).collect(),
                        outputs: words[o + 1..].iter().map(|s| s.to_string()).collect(),
                    }),
                    _ => {
                        return Err(err(
                            "expected `type NAME in VARS... out VARS...`".to_string()
                        ))
                    }
                }
            } else if let Some((lhs, rhs)) = line.split_once("<=") {
                bound_lines.push((ln + 1, lhs.trim().to_string(), rhs.trim().to_string()));
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        let inputs: Vec<String> = types.iter().flat_map(|t| t.inputs.clone()).collect();
        let mut bounds = Vec::new();
        for t in &types {
            for out in &t.outputs {
                let (ln, _, rhs) = bound_lines
                    .iter()
                    .find(|(_, lhs, _)| lhs == out)
                    .ok_or_else(|| AnalysisError::FileFormat {
                        file: name_hint.to_string(),
                        line: 0,
                        message: format!("no bound given for output {out}"),
                    })?;
                let e = parse_expr(rhs, &inputs).map_err(|e| AnalysisError::FileFormat {
                    file: name_hint.to_string(),
                    line: *ln,
                    message: e.to_string(),
                })?;
                bounds.push(e);
            }
        }
        Ok(CostSystem { name, has_alpha, types, bounds })
    }
}

/// A size-transfer matrix with significance annotations.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixSystem {
    pub name: String,
    /// outputs × inputs
    pub m: Vec<Vec<u64>>,
    pub sigs_in: Vec<u32>,
    pub sigs_out: Vec<u32>,
}

impl MatrixSystem {
    pub fn cols(&self) -> usize {
        self.m.first().map_or(0, Vec::len)
    }

    /// Output sizes `(M·X)_i`.
    pub fn outputs<F: Float>(&self, weights: &[F]) -> Vec<F> {
        self.m
            .iter()
            .map(|row| {
                let mut acc = F::zero();
                for (&c, w) in row.iter().zip(weights) {
                    acc = acc + F::from(c).unwrap() * *w;
                }
                acc
            })
            .collect()
    }

    /// Single balance margin Σ X^p − Σ (MX)^p.
    pub fn margin<F: Float>(&self, p: F, weights: &[F]) -> F {
        let mut m = F::zero();
        for w in weights {
            m = m + w.powf(p);
        }
        for y in self.outputs(weights) {
            m = m - y.powf(p);
        }
        m
    }

    /// Per-significance coefficients `a_s = Σ_{in sig s} X^p − Σ_{out sig s} Y^p`.
    pub fn sig_coeffs<F: Float>(&self, p: F, weights: &[F]) -> Vec<F> {
        let smax = self
            .sigs_in
            .iter()
            .chain(&self.sigs_out)
            .copied()
            .max()
            .unwrap_or(0) as usize;
        let mut a = vec![F::zero(); smax + 1];
        for (w, &s) in weights.iter().zip(&self.sigs_in) {
            a[s as usize] = a[s as usize] + w.powf(p);
        }
        for (y, &s) in self.outputs(weights).iter().zip(&self.sigs_out) {
            a[s as usize] = a[s as usize] - y.powf(p);
        }
        a
    }

    /// The ν-condition margin: min(a_0, Σ_s a_s ν^{-s}).
    pub fn bit_margin<F: Float>(&self, p: F, nu: F, weights: &[F]) -> F {
        let a = self.sig_coeffs(p, weights);
        let mut total = F::zero();
        for (s, v) in a.iter().enumerate() {
            total = total + *v * nu.powi(-(s as i32));
        }
        a[0].min(total)
    }

    /// Parse the whitespace-grid text format.
    pub fn parse(name_hint: &str, src: &str) -> Result<MatrixSystem, AnalysisError> {
        let mut name = name_hint.to_string();
        let mut rows: Option<usize> = None;
        let mut cols: Option<usize> = None;
        let mut m: Vec<Vec<u64>> = Vec::new();
        let mut sigs_in = Vec::new();
        let mut sigs_out = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AnalysisError::FileFormat {
                file: name_hint.to_string(),
                line: ln + 1,
                message,
            };
            let parse_ints = |s: &str| -> Result<Vec<u64>, AnalysisError> {
                s.split_whitespace()
                    .map(|w| {
                        w.parse::<u64>()
                            .map_err(|_| err(format!("invalid integer {w:?}")))
                    })
                    .collect()
            };
            if let Some(rest) = line.strip_prefix("matrix ") {
                name = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("rows ") {
                let words: Vec<&str> = rest.split_whitespace().collect();
                rows = Some(
                    words[0]
                        .parse()
                        .map_err(|_| err("invalid row count".to_string()))?,
                );
                if words.len() == 3 && words[1] == "cols" {
                    cols = Some(
                        words[2]
                            .parse()
                            .map_err(|_| err("invalid column count".to_string()))?,
                    );
                }
            } else if let Some(rest) = line.strip_prefix("sigs_in:") {
                sigs_in = parse_ints(rest)?.into_iter().map(|x| x as u32).collect();
            } else if let Some(rest) = line.strip_prefix("sigs_out:") {
                sigs_out = parse_ints(rest)?.into_iter().map(|x| x as u32).collect();
            } else {
                m.push(parse_ints(line)?);
            }
        }
        let err0 = |message: String| AnalysisError::FileFormat {
            file: name_hint.to_string(),
            line: 0,
            message,
        };
        if let Some(r) = rows {
            if m.len() != r {
                return Err(err0(format!("expected {r} matrix rows, got {}", m.len())));
            }
        }
        let ncols = m.first().map_or(0, Vec::len);
        if m.iter().any(|r| r.len() != ncols) || ncols == 0 {
            return Err(err0("ragged or empty matrix".to_string()));
        }
        if let Some(c) = cols {
            if ncols != c {
                return Err(err0(format!("expected {c} columns, got {ncols}")));
            }
        }
        if sigs_in.is_empty() {
            sigs_in = vec![0; ncols];
        }
        if sigs_out.is_empty() {
            sigs_out = vec![0; m.len()];
        }
        if sigs_in.len() != ncols || sigs_out.len() != m.len() {
            return Err(err0("significance annotations do not match matrix shape".into()));
        }
        Ok(MatrixSystem { name, m, sigs_in, sigs_out })
    }
}

/// The tunables certifying an exponent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamSet {
    pub p: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Scalar>,
    /// Aligned with the system's flattened input order.
    pub weights: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Scalar>,
}

/// Balance-check result.
#[derive(Clone, Debug, Serialize)]
pub struct Margins {
    /// (type name, margin value)
    pub per_type: Vec<(String, Scalar)>,
    pub feasible: bool,
}

/// Substitute the upper bounds and compute every per-type margin;
/// feasible iff all margins exceed [`crate::EPS`].
pub fn check_balance(sys: &CostSystem, params: &ParamSet) -> Result<Margins, AnalysisError> {
    if params.weights.len() != sys.input_count() {
        return Err(AnalysisError::WeightCount {
            system: sys.name.clone(),
            expected: sys.input_count(),
            got: params.weights.len(),
        });
    }
    let alpha = match (sys.has_alpha, params.alpha) {
        (true, None) => return Err(AnalysisError::MissingAlpha { system: sys.name.clone() }),
        (_, a) => a.unwrap_or(1.0),
    };
    let values = sys.margins(params.p, alpha, &params.weights);
    let per_type: Vec<(String, Scalar)> = sys
        .types
        .iter()
        .map(|t| t.name.clone())
        .zip(values)
        .collect();
    let feasible = per_type.iter().all(|(_, m)| *m > crate::EPS);
    Ok(Margins { per_type, feasible })
}
