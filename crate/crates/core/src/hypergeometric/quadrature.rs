//! Gauss rules from the Golub–Welsch eigenproblem and graded composite rules on `[0, 1]`.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{KzError, Result};

/// Nodes and weights of the `n`-point Gauss rule for `(1−x)^α (1+x)^β` on `[−1, 1]`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(KzError::Convergence(format!(
            "Jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        t[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            let b2 = if m == 1.0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let b = b2.sqrt();
            t[(k, k + 1)] = b;
            t[(k + 1, k)] = b;
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// A node of a rule on `[0, 1]`: `u`, an accurate `1 − u`, and the weight to use
/// against the full integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub u: f64,
    pub one_minus: f64,
    pub w: f64,
}

/// Rule shape: number of dyadic levels toward each end and points per piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub levels: usize,
    pub npts: usize,
}

/// Refinement ladder shared by all adaptive integrations.
pub const LADDER: [Schedule; 8] = [
    Schedule { levels: 8, npts: 6 },
    Schedule { levels: 12, npts: 8 },
    Schedule { levels: 16, npts: 10 },
    Schedule { levels: 20, npts: 12 },
    Schedule { levels: 26, npts: 14 },
    Schedule { levels: 32, npts: 16 },
    Schedule { levels: 40, npts: 20 },
    Schedule { levels: 48, npts: 24 },
];

/// Rule on `[0, 1/2]` graded toward 0. With `a = Some(e)` the end piece uses the
/// Gauss–Jacobi rule for `u^e` and weights are divided by `u^e`.
fn half_rule(a: Option<f64>, s: Schedule) -> Result<Vec<(f64, f64)>> {
    let (xl, wl) = gauss_jacobi(s.npts, 0.0, 0.0)?;
    let mut out = Vec::with_capacity(s.levels * s.npts);
    let h_end = 0.5f64.powi(s.levels as i32);
    match a {
        Some(e) if e != 0.0 => {
            let (xj, wj) = gauss_jacobi(s.npts, 0.0, e)?;
            for (x, w) in xj.iter().zip(&wj) {
                let v = (x + 1.0) / 2.0;
                // ∫_0^h u^e g = h^{e+1} 2^{-e-1} ∫ (1+x)^e g
                let u = h_end * v;
                let weff = w * h_end * 0.5f64.powf(e + 1.0) * h_end.powf(e) / u.powf(e);
                out.push((u, weff));
            }
        }
        _ => {
            for (x, w) in xl.iter().zip(&wl) {
                out.push((h_end * (x + 1.0) / 2.0, w * h_end / 2.0));
            }
        }
    }
    for lev in (1..s.levels).rev() {
        let (lo, hi) = (0.5f64.powi(lev as i32 + 1), 0.5f64.powi(lev as i32));
        for (x, w) in xl.iter().zip(&wl) {
            out.push((lo + (hi - lo) * (x + 1.0) / 2.0, w * (hi - lo) / 2.0));
        }
    }
    Ok(out)
}

/// Composite rule on `[0, 1]` graded toward both ends, with optional algebraic
/// endpoint exponents `a0` at 0 and `a1` at 1 (each in `(−1, ∞)`).
pub fn graded_rule(a0: Option<f64>, a1: Option<f64>, s: Schedule) -> Result<Vec<Node>> {
    let mut out: Vec<Node> = half_rule(a0, s)?
        .into_iter()
        .map(|(u, w)| Node { u, one_minus: 1.0 - u, w })
        .collect();
    let upper = half_rule(a1, s)?;
    out.extend(upper.into_iter().rev().map(|(v, w)| Node {
        u: 1.0 - v,
        one_minus: v,
        w,
    }));
    Ok(out)
}

/// Reduces an exponent modulo 1 into `(−1, 0]`. A Jacobi weight with the reduced
/// exponent differs from the true behavior by a nonnegative integer power.
pub fn reduce_exponent(a: f64) -> f64 {
    let r = a - (a + 1.0).floor();
    if r <= -1.0 + 1e-12 {
        r + 1.0
    } else if r > -1e-12 {
        0.0
    } else {
        r
    }
}

/// Adaptive integral of `f` over `[0, 1]` with endpoint exponents: successive rules
/// of the ladder until two agree to `tol` (relative). Returns value and estimate.
pub fn integrate_unit(f: impl Fn(f64, f64) -> f64, a0: Option<f64>, a1: Option<f64>, tol: f64) -> Result<(f64, f64)> {
    let eval = |s: Schedule| -> Result<f64> {
        Ok(graded_rule(a0, a1, s)?.iter().map(|n| n.w * f(n.u, n.one_minus)).sum())
    };
    let mut prev = eval(LADDER[0])?;
    let mut err = f64::INFINITY;
    for s in &LADDER[1..] {
        let cur = eval(*s)?;
        err = (cur - prev).abs();
        if err <= tol * cur.abs().max(f64::MIN_POSITIVE) {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(KzError::Accuracy {
        achieved: err / prev.abs().max(f64::MIN_POSITIVE),
        requested: tol,
    })
}

/// Adaptive integral over `(0, ∞)` through `t = ℓ s/(1−s)`; `a0` is the exponent at 0.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, a0: Option<f64>, scale: f64, tol: f64) -> Result<(f64, f64)> {
    integrate_unit(
        |u, om| {
            let t = scale * u / om;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (om * om)
            }
        },
        a0,
        None,
        tol,
    )
}
