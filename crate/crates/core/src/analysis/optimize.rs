//! Exponent optimization: bisection on p with an inner log-space
//! Nelder-Mead search for balancing weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{paper_params, CostSystem, MatrixSystem, ParamSet};
use crate::{Scalar, EPS};

/// Search effort knobs.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub seed: u64,
    /// Random restarts per inner solve, in addition to the warm and zero
    /// starts.
    pub restarts: usize,
    /// Bisection iterations on p.
    pub bisect_iters: usize,
    /// Worker threads for evaluating restarts (1 = sequential; results are
    /// identical regardless).
    pub jobs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { seed: 1, restarts: 6, bisect_iters: 30, jobs: 1 }
    }
}

/// Result of an exponent search.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizeOutcome {
    /// Largest certified p.
    pub p_star: Scalar,
    /// The exponent 1/p*.
    pub inv_p: Scalar,
    /// Certificate parameters at p*.
    pub params: ParamSet,
    /// Worst per-type margin at p* under `params`.
    pub margin: Scalar,
}

const EXP_CLAMP: f64 = 30.0;

fn clamped_exp(z: f64) -> f64 {
    z.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
}

/// Decode an unconstrained search vector into positive parameters. The
/// weight block is mean-normalized in log space (balance margins are scale
/// invariant, so this only conditions the search); a leading α coordinate,
/// when present, is exponentiated directly.
fn decode(z: &[f64], has_alpha: bool) -> (f64, Vec<f64>) {
    let (alpha, wz) = if has_alpha {
        (clamped_exp(z[0]), &z[1..])
    } else {
        (1.0, z)
    };
    let mean = wz.iter().sum::<f64>() / wz.len() as f64;
    (alpha, wz.iter().map(|v| clamped_exp(v - mean)).collect())
}

/// Scipy-style Nelder-Mead minimization.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64]) -> (f64, Vec<f64>) {
    const MAXFEV: usize = 3000;
    const XATOL: f64 = 1e-9;
    const FATOL: f64 = 1e-14;
    let n = x0.len();
    let mut sim: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    sim.push(x0.to_vec());
    for k in 0..n {
        let mut x = x0.to_vec();
        if x[k] != 0.0 {
            x[k] *= 1.05;
        } else {
            x[k] = 0.00025;
        }
        sim.push(x);
    }
    let mut nfev = 0usize;
    let eval = |x: &[f64], nfev: &mut usize| {
        *nfev += 1;
        f(x)
    };
    let mut fsim: Vec<f64> = sim.iter().map(|x| eval(x, &mut nfev)).collect();
    let order_simplex = |sim: &mut Vec<Vec<f64>>, fsim: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..sim.len()).collect();
        idx.sort_by(|&a, &b| fsim[a].partial_cmp(&fsim[b]).unwrap_or(std::cmp::Ordering::Equal));
        *sim = idx.iter().map(|&i| sim[i].clone()).collect();
        *fsim = idx.iter().map(|&i| fsim[i]).collect();
    };
    order_simplex(&mut sim, &mut fsim);
    while nfev < MAXFEV {
        let xspread = sim[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let fspread = fsim[1..]
            .iter()
            .map(|v| (v - fsim[0]).abs())
            .fold(0.0f64, f64::max);
        if xspread <= XATOL && fspread <= FATOL {
            break;
        }
        // centroid of the n best
        let mut xbar = vec![0.0; n];
        for x in &sim[..n] {
            for (b, v) in xbar.iter_mut().zip(x) {
                *b += v / n as f64;
            }
        }
        let worst = sim[n].clone();
        let lerp = |t: f64| -> Vec<f64> {
            xbar.iter()
                .zip(&worst)
                .map(|(b, w)| b + t * (b - w))
                .collect()
        };
        let xr = lerp(1.0);
        let fr = eval(&xr, &mut nfev);
        let mut shrink = false;
        if fr < fsim[0] {
            let xe = lerp(2.0);
            let fe = eval(&xe, &mut nfev);
            if fe < fr {
                sim[n] = xe;
                fsim[n] = fe;
            } else {
                sim[n] = xr;
                fsim[n] = fr;
            }
        } else if fr < fsim[n - 1] {
            sim[n] = xr;
            fsim[n] = fr;
        } else if fr < fsim[n] {
            // outside contraction
            let xc = lerp(0.5);
            let fc = eval(&xc, &mut nfev);
            if fc <= fr {
                sim[n] = xc;
                fsim[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            // inside contraction
            let xcc = lerp(-0.5);
            let fcc = eval(&xcc, &mut nfev);
            if fcc < fsim[n] {
                sim[n] = xcc;
                fsim[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            for i in 1..=n {
                let xi: Vec<f64> = sim[0]
                    .iter()
                    .zip(&sim[i])
                    .map(|(b, v)| b + 0.5 * (v - b))
                    .collect();
                fsim[i] = eval(&xi, &mut nfev);
                sim[i] = xi;
            }
        }
        order_simplex(&mut sim, &mut fsim);
    }
    (fsim[0], sim.swap_remove(0))
}

/// Maximize `margin(p, z)` over z at a fixed p via multi-start Nelder-Mead
/// (each start run twice, as restarting from the solution often escapes a
/// degenerate simplex). Returns (best margin, argmax). Deterministic for a
/// fixed start list; ties between starts go to the lower start index,
/// independent of the job count.
fn solve_best<F>(margin: &F, p: f64, n: usize, warm: &[Vec<f64>], rng: &mut ChaCha8Rng, budget: &Budget) -> (f64, Vec<f64>)
where
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    let mut starts: Vec<Vec<f64>> = warm.to_vec();
    starts.push(vec![0.0; n]);
    for _ in 0..budget.restarts {
        starts.push((0..n).map(|_| rng.gen_range(-2.5..2.5)).collect());
    }
    let run_one = |s: &Vec<f64>| -> (f64, Vec<f64>) {
        let f = |z: &[f64]| -margin(p, z);
        let (_, x1) = nelder_mead(&f, s);
        let (fx, x2) = nelder_mead(&f, &x1);
        (-fx, x2)
    };
    let results: Vec<(f64, Vec<f64>)> = if budget.jobs > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = starts
                .chunks((starts.len() + budget.jobs - 1) / budget.jobs)
                .map(|chunk| scope.spawn(move || chunk.iter().map(run_one).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        })
    } else {
        starts.iter().map(run_one).collect()
    };
    let mut best_i = 0;
    for i in 1..results.len() {
        if results[i].0 > results[best_i].0 {
            best_i = i;
        }
    }
    results.into_iter().nth(best_i).unwrap()
}

/// Bisection on p: `lo` stays certified (margin > EPS), `hi` stays
/// uncertified. Returns (p*, best search vector at p*).
fn maximize_p<F>(margin: &F, n: usize, warm0: &[Vec<f64>], budget: &Budget) -> Option<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let (mut lo, mut hi) = (0.05f64, 0.9f64);
    let (m0, x0) = solve_best(margin, lo, n, warm0, &mut rng, budget);
    if m0 <= EPS {
        return None;
    }
    let mut warm = vec![x0];
    for _ in 0..budget.bisect_iters {
        let mid = 0.5 * (lo + hi);
        let (m, x) = solve_best(margin, mid, n, &warm, &mut rng, budget);
        if m > EPS {
            lo = mid;
            warm = vec![x];
        } else {
            hi = mid;
        }
    }
    Some((lo, warm.pop().unwrap()))
}

fn warm_from_params(ps: &ParamSet, has_alpha: bool) -> Vec<f64> {
    let mut z = Vec::new();
    if has_alpha {
        z.push(ps.alpha.unwrap_or(1.0).ln());
    }
    z.extend(ps.weights.iter().map(|w| w.ln()));
    z
}

/// Maximize the certified p for a cost system. Warm-starts from the
/// published certificate when one exists for this system name.
pub fn optimize_params(sys: &CostSystem, budget: &Budget) -> Option<OptimizeOutcome> {
    let has_alpha = sys.has_alpha;
    let nw = sys.input_count();
    let n = nw + usize::from(has_alpha);
    let margin = |p: f64, z: &[f64]| -> f64 {
        let (alpha, w) = decode(z, has_alpha);
        sys.margins(p, alpha, &w)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    };
    let mut warm = Vec::new();
    if let Ok(ps) = paper_params(&format!("paper-{}", sys.name)) {
        if ps.weights.len() == nw {
            warm.push(warm_from_params(&ps, has_alpha));
        }
    }
    let (p_star, z) = maximize_p(&margin, n, &warm, budget)?;
    let (alpha, weights) = decode(&z, has_alpha);
    let m = margin(p_star, &z);
    Some(OptimizeOutcome {
        p_star,
        inv_p: 1.0 / p_star,
        params: ParamSet {
            p: p_star,
            alpha: has_alpha.then_some(alpha),
            weights,
            nu: None,
        },
        margin: m,
    })
}

/// Maximize the certified p for the plain matrix balance condition.
pub fn matrix_exponent(ms: &MatrixSystem, budget: &Budget) -> Option<OptimizeOutcome> {
    let n = ms.cols();
    let margin = |p: f64, z: &[f64]| -> f64 {
        let (_, w) = decode(z, false);
        ms.margin(p, &w)
    };
    let (p_star, z) = maximize_p(&margin, n, &[], budget)?;
    let (_, weights) = decode(&z, false);
    let m = margin(p_star, &z);
    Some(OptimizeOutcome {
        p_star,
        inv_p: 1.0 / p_star,
        params: ParamSet { p: p_star, alpha: None, weights, nu: None },
        margin: m,
    })
}

/// Maximize the certified p for the significance-weighted (single output
/// bit) condition with ν = 2^p.
pub fn bit_exponent(ms: &MatrixSystem, budget: &Budget) -> Option<OptimizeOutcome> {
    let n = ms.cols();
    let margin = |p: f64, z: &[f64]| -> f64 {
        let (_, w) = decode(z, false);
        ms.bit_margin(p, 2f64.powf(p), &w)
    };
    let (p_star, z) = maximize_p(&margin, n, &[], budget)?;
    let (_, weights) = decode(&z, false);
    let m = margin(p_star, &z);
    Some(OptimizeOutcome {
        p_star,
        inv_p: 1.0 / p_star,
        params: ParamSet {
            p: p_star,
            alpha: None,
            weights,
            nu: Some(2f64.powf(p_star)),
        },
        margin: m,
    })
}
