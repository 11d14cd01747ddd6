//! Built-in cost systems, transfer matrices, and published parameter sets.

use super::{AnalysisError, CostSystem, MatrixSystem, ParamSet};

const MDFA_SYSTEM: &str = "\
# Cost-transfer inequalities for the double full adder over the full binary
# basis: four standard inputs X1..X4, three xor-pair inputs U1..U3, a free
# block parameter alpha.
system mdfa
alpha yes
type std in X1 X2 X3 X4 out C1 C2
type xor-pair in U1 U2 U3 out A1 A2
C1 <= X1 + X2 + X3 + a*U1
C2 <= X4 + a*U2 + a*U3
A1 <= max(X1 + X2 + 3*X3, (2/a)*X1 + (2/a)*X2 + (3/a)*X3 + ((a+1)/a)*U1)
A2 <= max(X4 + (a+2)*U2, (2/a)*X4 + ((2*a+1)/a)*U2 + ((a+1)/a)*U3)
";

const SFA5_SYSTEM: &str = "\
# Cost-transfer inequalities for the five-input sorting full adder over the
# monotone-with-negated-leaves basis: one standard input and two
# monotone-pair inputs.
system sfa5
alpha no
type std in X1 X2 X3 out C
type mon-pair in U1 U2 out A1 A2
C <= 4*X1 + 8*U1 + 4*U2
A1 <= 2*X1 + 3*U1 + 2*U2
A2 <= X2 + X3
";

const SFA7_SYSTEM: &str = "\
# Cost-transfer inequalities for the paired seven-input sorting full adders:
# five standard inputs, three sorted-triple inputs, a free block parameter
# alpha.
system sfa7
alpha yes
type std in X1 X2 X3 X4 X5 out C1 C2
type sort-triple in S1 S2 S3 out Q1 Q2
C1 <= 4*X1 + 8*a*S1 + 4*a*S2
C2 <= 8*(X2 + X3 + X4 + X5) + 4*a*S3
Q1 <= max(2*X1 + (a+2)*S1 + (a+1)*S2, (4/a)*X1 + ((2*a+4)/a)*S1 + ((a+2)/a)*S2)
Q2 <= max(3*(X2 + X3 + X4 + X5) + (a+1)*S3, (6/a)*(X2 + X3 + X4 + X5) + ((a+2)/a)*S3)
";

const MATRIX_15X6: &str = "\
# (15,6) size-transfer matrix with carry significances.
matrix paper-15x6
rows 6 cols 15
0 0 0 0 0 0 0 0 0 0 1 1 1 1 1
0 0 0 0 0 0 0 1 1 1 1 2 2 2 3
0 0 0 0 1 1 1 2 2 3 1 2 3 3 6
0 1 1 1 2 2 3 3 3 6 1 2 3 3 6
1 2 2 3 3 3 6 3 3 6 1 2 3 3 6
1 4 4 9 3 3 6 3 3 6 1 2 3 3 6
sigs_in: 4 3 3 3 2 2 2 1 1 1 0 0 0 0 0
sigs_out: 0 1 2 3 4 5
";

const MATRIX_17X6: &str = "\
# (17,6) size-transfer matrix with carry significances.
matrix paper-17x6
rows 6 cols 17
4 8 8 8 8 8 8 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 4 4 4 8 8 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 4 4 4 8 8
12 16 16 24 24 24 24 16 16 16 24 24 16 16 16 24 24
14 20 20 24 24 24 24 24 24 24 36 36 24 24 24 36 36
7 10 10 12 12 12 12 12 12 12 18 18 12 12 12 18 18
sigs_in: 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
sigs_out: 0 0 0 1 2 3
";

/// Look up a built-in cost system by name (`mdfa`, `sfa5`, `sfa7`).
pub fn builtin_system(name: &str) -> Result<CostSystem, AnalysisError> {
    let src = match name {
        "mdfa" => MDFA_SYSTEM,
        "sfa5" => SFA5_SYSTEM,
        "sfa7" => SFA7_SYSTEM,
        _ => return Err(AnalysisError::UnknownSystem(name.to_string())),
    };
    CostSystem::parse(name, src)
}

/// Look up a built-in transfer matrix (`paper-15x6`, `paper-17x6`).
pub fn builtin_matrix(name: &str) -> Result<MatrixSystem, AnalysisError> {
    let src = match name {
        "paper-15x6" => MATRIX_15X6,
        "paper-17x6" => MATRIX_17X6,
        _ => return Err(AnalysisError::UnknownMatrix(name.to_string())),
    };
    MatrixSystem::parse(name, src)
}

/// Published certificate parameter sets (`paper-mdfa`, `paper-sfa5`,
/// `paper-sfa7`), aligned with the corresponding builtin system's input
/// order.
pub fn paper_params(name: &str) -> Result<ParamSet, AnalysisError> {
    let ps = match name {
        "paper-mdfa" => ParamSet {
            p: 0.327781,
            alpha: Some(2.906),
            weights: vec![
                1.0, 1.0, 0.5149081, 1.9198088, // X1..X4
                1.2176395, 1.0031176, 2.3573055, // U1..U3
            ],
            nu: None,
        },
        "paper-sfa5" => ParamSet {
            p: 0.219978,
            alpha: None,
            weights: vec![1.0, 0.031702, 0.031702, 1.018913, 2.0],
            nu: None,
        },
        "paper-sfa7" => ParamSet {
            p: 0.2204718,
            alpha: Some(1.6782),
            weights: vec![
                1.0,
                0.3569540333,
                0.3569540333,
                0.3569540333,
                0.3569540333,
                1.1282983248,
                2.424317629,
                1.6884745179,
            ],
            nu: None,
        },
        _ => return Err(AnalysisError::UnknownParams(name.to_string())),
    };
    Ok(ps)
}
