//! Real-zero extraction for the recurrence polynomials, empirical
//! zero-counting measures, an Aberth–Ehrlich complex root finder and
//! finite-n Toeplitz characteristic-polynomial spectra.
//!
//! Zeros are found by interlacing-bracketed bisection: given the zeros of
//! `P_{k-1}`, each of the `k` intervals they cut out of `[-R, R]` contains
//! exactly one zero of `P_k`, and a sign bisection on
//! [`eval_poly`](crate::model::eval_poly) is backward stable. A bracket
//! without a sign change is reported as an interlacing violation — the
//! detector for recurrence families that do not satisfy the interlacing
//! hypothesis.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{eval_poly, CoeffSource, CoeffTriple, ModelError, ScaledCoeffs, ScaledParams};
use crate::symbol::{self, SymbolError};

#[derive(Debug, Error)]
pub enum PolyzeroError {
    #[error("no sign change in bracket [{lo}, {hi}] for degree {degree}: interlacing violated")]
    InterlacingViolation { degree: usize, lo: f64, hi: f64 },
    #[error("abscissa kept hitting exact zeros of intermediate polynomials near x = {x}")]
    PersistentZeroHit { x: f64 },
    #[error("Aberth iteration did not converge after {sweeps} sweeps (worst step {worst:e})")]
    AberthNoConvergence { sweeps: usize, worst: f64 },
    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("ratio check needs |x| > R = {radius}, got x = {x}")]
    InsideZeroDisk { x: f64, radius: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Sorted real zeros of a recurrence polynomial together with the row-sum
/// containment radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub degree: usize,
    pub zeros: Vec<f64>,
    pub radius: f64,
}

/// Zero counting measure with weight `1/k` per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn from_zero_set(zs: &ZeroSet) -> Self {
        Self { atoms: zs.zeros.clone() }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        k as f64 / self.atoms.len() as f64
    }

    /// Kolmogorov distance to a reference CDF, evaluated at the atoms.
    pub fn kolmogorov_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.atoms.len() as f64;
        let mut worst = 0.0f64;
        for (i, &x) in self.atoms.iter().enumerate() {
            let f = cdf(x);
            worst = worst.max((f - i as f64 / n).abs()).max((f - (i as f64 + 1.0) / n).abs());
        }
        worst
    }
}

/// Containment radius `R = sup_{j ≤ k_max} (1 + Σ_band |coeff|)`: every zero
/// of every `P_k`, `k ≤ k_max`, lies in `[-R, R]` (maximum absolute row sum
/// of the companion-like band matrix).
pub fn zero_bound<S: CoeffSource + ?Sized>(src: &S, k_max: usize) -> f64 {
    let bands = src.bands();
    let mut r = 0.0f64;
    for k in 0..=k_max {
        let mut row = 1.0;
        for band in 0..bands {
            row += src.coeff(k, band).abs();
        }
        r = r.max(row);
    }
    r
}

fn sign_at<S: CoeffSource + ?Sized>(src: &S, k: usize, x: f64, bump: f64) -> Result<i8, PolyzeroError> {
    let mut dx = 0.0;
    for _ in 0..4 {
        match eval_poly(src, k, x + dx) {
            Ok(e) => return Ok(e.sign),
            Err(ModelError::EvalHitZero { .. }) => {
                dx = if dx == 0.0 { bump } else { dx * 2.0 };
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(PolyzeroError::PersistentZeroHit { x })
}

fn bisect_bracket<S: CoeffSource + ?Sized>(
    src: &S,
    k: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    bump: f64,
) -> Result<f64, PolyzeroError> {
    let s_lo = sign_at(src, k, lo, bump)?;
    let s_hi = sign_at(src, k, hi, bump)?;
    if s_lo == s_hi {
        return Err(PolyzeroError::InterlacingViolation { degree: k, lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s_mid = sign_at(src, k, mid, bump)?;
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Computes `ZeroSet(1), …, ZeroSet(k_max)` inductively by
/// interlacing-bracketed bisection (absolute tolerance `1e-12·R`).
pub fn interlaced_zero_sweep<S: CoeffSource + Sync + ?Sized>(
    src: &S,
    k_max: usize,
) -> Result<Vec<ZeroSet>, PolyzeroError> {
    assert!(k_max >= 1);
    let radius = zero_bound(src, k_max);
    let tol = 1e-12 * radius;
    let bump = 1e-14 * radius;

    let mut out: Vec<ZeroSet> = Vec::with_capacity(k_max);
    out.push(ZeroSet { degree: 1, zeros: vec![src.coeff(0, 0)], radius });

    for k in 2..=k_max {
        let prev = &out[k - 2].zeros;
        let mut edges = Vec::with_capacity(k + 1);
        edges.push(-radius);
        edges.extend_from_slice(prev);
        edges.push(radius);

        let brackets: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        let zeros: Vec<f64> = if k >= 48 {
            brackets
                .par_iter()
                .map(|&(lo, hi)| bisect_bracket(src, k, lo, hi, tol, bump))
                .collect::<Result<_, _>>()?
        } else {
            brackets
                .iter()
                .map(|&(lo, hi)| bisect_bracket(src, k, lo, hi, tol, bump))
                .collect::<Result<_, _>>()?
        };
        debug_assert!(zeros.windows(2).all(|w| w[0] < w[1]));
        out.push(ZeroSet { degree: k, zeros, radius });
    }
    Ok(out)
}

/// Zeros of the degree-`k` recurrence polynomial (final element of the
/// inductive sweep).
pub fn zeros_interlaced<S: CoeffSource + Sync + ?Sized>(src: &S, k: usize) -> Result<ZeroSet, PolyzeroError> {
    Ok(interlaced_zero_sweep(src, k)?.pop().expect("k >= 1"))
}

/// Strict interlacing test: `zs_k1` must have degree `zs_k.degree + 1` and
/// satisfy `x_j^{k+1} < x_j^k < x_{j+1}^{k+1}` for all `j`.
pub fn verify_interlacing(zs_k: &ZeroSet, zs_k1: &ZeroSet) -> bool {
    if zs_k1.degree != zs_k.degree + 1 || zs_k1.zeros.len() != zs_k.zeros.len() + 1 {
        return false;
    }
    zs_k
        .zeros
        .iter()
        .enumerate()
        .all(|(j, &x)| zs_k1.zeros[j] < x && x < zs_k1.zeros[j + 1])
}

/// Deviation `|B_{n+1,n}(x)/B_{n,n}(x) - z₁(x, 1)|` of the ratio asymptotics
/// at a real `x` outside the zero disk.
pub fn ratio_asymptotics_check(sp: &ScaledParams, x: f64, n: usize) -> Result<f64, PolyzeroError> {
    let src = ScaledCoeffs::new(*sp, n)?;
    let radius = zero_bound(&src, n + 1);
    if x.abs() <= radius {
        return Err(PolyzeroError::InsideZeroDisk { x, radius });
    }
    let top = eval_poly(&src, n + 1, x)?;
    let bot = eval_poly(&src, n, x)?;
    let ratio = (top.sign * bot.sign) as f64 * (top.ln_abs - bot.ln_abs).exp();
    let z1 = symbol::solve_symbol(sp, 1.0, Complex64::new(x, 0.0))?.z1;
    Ok((ratio - z1.re).abs().hypot(z1.im))
}

// ---------------------------------------------------------------------------
// Aberth–Ehrlich simultaneous iteration
// ---------------------------------------------------------------------------

const ABERTH_MAX_DEGREE: usize = 512;
const ABERTH_MAX_SWEEPS: usize = 200;

/// Simultaneous root refinement; `eval` returns `(p(z), p'(z))` up to a
/// common scale factor.
///
/// Converges when every relative step falls below `step_tol`; a plateau
/// above that but below `plateau_tol` is accepted too (ill-conditioned roots
/// stall there), leaving the final acceptance to the caller's residual
/// check.
fn aberth_iterate(
    eval: &dyn Fn(Complex64) -> (Complex64, Complex64),
    guesses: &mut [Complex64],
    step_tol: f64,
    plateau_tol: f64,
) -> Result<(), PolyzeroError> {
    let d = guesses.len();
    let mut best = f64::INFINITY;
    for _sweep in 0..ABERTH_MAX_SWEEPS {
        let mut worst = 0.0f64;
        for i in 0..d {
            let z = guesses[i];
            let (p, dp) = eval(z);
            if p.norm_sqr() == 0.0 {
                continue;
            }
            let newton = if dp.norm_sqr() > 0.0 { p / dp } else { Complex64::new(step_tol, 0.0) };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &other) in guesses.iter().enumerate() {
                if j != i {
                    let diff = z - other;
                    if diff.norm_sqr() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm_sqr() > 0.0 { newton / denom } else { newton };
            guesses[i] = z - step;
            worst = worst.max(step.norm() / (1.0 + guesses[i].norm()));
        }
        if worst <= step_tol {
            return Ok(());
        }
        best = best.min(worst);
    }
    if best <= plateau_tol {
        return Ok(());
    }
    Err(PolyzeroError::AberthNoConvergence { sweeps: ABERTH_MAX_SWEEPS, worst: best })
}

/// All complex roots of a polynomial given by ascending real monomial
/// coefficients `[a₀, a₁, …, a_d]`, degree `d ≤ 512`.
///
/// Residuals satisfy `|p(z)| ≤ 1e-10 · max|aᵢ| · max(1, |z|)^d`.
pub fn aberth_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, PolyzeroError> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    if degree > ABERTH_MAX_DEGREE {
        return Err(PolyzeroError::DegreeTooLarge { degree, max: ABERTH_MAX_DEGREE });
    }
    let lead = coeffs[degree];
    if lead == 0.0 {
        return Err(PolyzeroError::ZeroLeadingCoefficient);
    }

    let eval = move |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };

    // perturbed-circle start; Fujiwara bound capped by the geometric mean of
    // the root moduli so extreme constant terms do not inflate the start
    let fujiwara = 2.0
        * (1..=degree)
            .map(|k| {
                let c = coeffs[degree - k] / lead;
                let c = if k == degree { 0.5 * c } else { c };
                c.abs().powf(1.0 / k as f64)
            })
            .fold(0.0f64, f64::max);
    let geo = (coeffs[0] / lead).abs().powf(1.0 / degree as f64);
    let start = if coeffs[0] != 0.0 { fujiwara.min(4.0 * geo) } else { fujiwara }.max(1e-3);
    let mut guesses: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / degree as f64 + 0.43;
            Complex64::from_polar(start * (1.0 + 1e-3 * (k % 7) as f64), angle)
        })
        .collect();

    aberth_iterate(&eval, &mut guesses, 1e-13, 1e-7)?;

    let max_coeff = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for &z in &guesses {
        let (p, _) = eval(z);
        let budget = 1e-10 * max_coeff * z.norm().max(1.0).powi(degree as i32);
        if p.norm() > budget {
            return Err(PolyzeroError::AberthNoConvergence { sweeps: ABERTH_MAX_SWEEPS, worst: p.norm() / budget });
        }
    }
    Ok(guesses)
}

/// Eigenvalues of the `n × n` banded Toeplitz matrix `T_n(A_s)` (`1` on the
/// superdiagonal, `b(s), c(s), d(s)` on the diagonal and the two
/// subdiagonals), computed as the roots of its characteristic polynomial.
///
/// The characteristic polynomial is generated by the constant-coefficient
/// recurrence `D_{k+1} = (x-b) D_k - c D_{k-1} - d D_{k-2}`; the Aberth
/// solver evaluates it (and its derivative) directly through that
/// recurrence, which stays well conditioned where a monomial expansion would
/// not. Capped at `n = 512`.
pub fn toeplitz_spectrum(sp: &ScaledParams, s: f64, n: usize) -> Result<Vec<Complex64>, PolyzeroError> {
    assert!(n >= 1, "matrix dimension must be positive");
    if n > ABERTH_MAX_DEGREE {
        return Err(PolyzeroError::DegreeTooLarge { degree: n, max: ABERTH_MAX_DEGREE });
    }
    let CoeffTriple { b, c, d } = crate::model::limit_coeffs(sp, s);
    if c == 0.0 && d == 0.0 {
        // triangular matrix
        return Ok(vec![Complex64::new(b, 0.0); n]);
    }
    if n == 1 {
        return Ok(vec![Complex64::new(b, 0.0)]);
    }

    let eval = move |z: Complex64| {
        // windows over (D, D'), jointly renormalised: only the ratio matters
        let mut p = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut dp = [Complex64::new(0.0, 0.0); 3];
        for _ in 0..n {
            let zb = z - b;
            let next = zb * p[0] - c * p[1] - d * p[2];
            let dnext = p[0] + zb * dp[0] - c * dp[1] - d * dp[2];
            p = [next, p[0], p[1]];
            dp = [dnext, dp[0], dp[1]];
            let m = p.iter().chain(dp.iter()).fold(0.0f64, |acc, v| acc.max(v.norm_sqr()));
            if m > 1e280 {
                let inv = 1.0 / m.sqrt();
                for v in p.iter_mut().chain(dp.iter_mut()) {
                    *v *= inv;
                }
            }
        }
        (p[0], dp[0])
    };

    // start on a thin ellipse around Γ₁(s) when available, else a circle
    let mut guesses: Vec<Complex64> = match symbol::edge_curves(sp, s) {
        Ok(e) => {
            let center = 0.5 * (e.beta + e.gamma);
            let ax = 0.55 * (e.gamma - e.beta) + 1e-3;
            let ay = 0.08 * (e.gamma - e.beta) + 1e-3;
            (0..n)
                .map(|k| {
                    let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64 + 0.21;
                    Complex64::new(center + ax * angle.cos(), ay * angle.sin())
                })
                .collect()
        }
        Err(_) => {
            let r = 1.0 + b.abs() + c.abs() + d.abs();
            (0..n)
                .map(|k| {
                    let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64 + 0.21;
                    Complex64::from_polar(r, angle)
                })
                .collect()
        }
    };

    aberth_iterate(&eval, &mut guesses, 1e-13, 1e-9)?;
    guesses.sort_by(|u, v| u.re.partial_cmp(&v.re).unwrap().then(u.im.partial_cmp(&v.im).unwrap()));
    Ok(guesses)
}
