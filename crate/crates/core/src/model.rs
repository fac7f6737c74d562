//! Model parameters, modified-Bessel weights, recurrence coefficients and
//! overflow-safe evaluation of the recurrence polynomials.
//!
//! The average characteristic polynomials `B_k` of the path ensemble satisfy
//! a four-term recurrence
//!
//! ```text
//! x B_k(x) = B_{k+1}(x) + b_k B_k(x) + c_k B_{k-1}(x) + d_k B_{k-2}(x)
//! ```
//!
//! whose coefficients are known explicitly both at finite parameters
//! ([`recurrence_coeffs_finite`]) and after the diffusive rescaling
//! `t ↦ t/(2n)`, `T ↦ 1/(2n)`, `α ↦ p·n` ([`recurrence_coeffs_scaled`]).
//! As `k, n → ∞` with `k/n → s` the coefficients converge to the limit
//! functions `b(s), c(s), d(s)` ([`limit_coeffs`]) that define the symbol of
//! the [`crate::symbol`] module.
//!
//! Evaluation ([`eval_poly`]) accepts the general m-term coefficient layout
//! through the [`CoeffSource`] trait; the four-term family is the primary
//! instance.

use serde::Serialize;
use thiserror::Error;

use crate::quad::{self, QuadError};
use crate::special::{self, SpecialError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("scaled coefficients need n >= 1")]
    ZeroN,
    #[error("polynomial value vanished exactly at x = {x:e} while evaluating degree {degree}")]
    EvalHitZero { degree: usize, x: f64 },
    #[error("orthogonality check needs even n <= 8 and k < n/2, got n = {n}, k = {k}")]
    InvalidOrthoArgs { n: usize, k: usize },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Parameters of the finite (unrescaled) ensemble: start point `a`, Bessel
/// order `alpha`, observation time `t` and horizon `cap_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteParams {
    pub a: f64,
    pub alpha: f64,
    pub t: f64,
    pub cap_t: f64,
}

impl FiniteParams {
    pub fn new(a: f64, alpha: f64, t: f64, cap_t: f64) -> Result<Self, ModelError> {
        if !(a > 0.0) {
            return Err(ModelError::InvalidParams(format!("a must be positive, got {a}")));
        }
        if !(alpha > -1.0) {
            return Err(ModelError::InvalidParams(format!("alpha must exceed -1, got {alpha}")));
        }
        if !(t > 0.0 && t < cap_t) {
            return Err(ModelError::InvalidParams(format!(
                "time must satisfy 0 < t < T, got t = {t}, T = {cap_t}"
            )));
        }
        Ok(Self { a, alpha, t, cap_t })
    }
}

/// Parameters of the rescaled picture: start point `a ≥ 0`, time `t ∈ (0,1)`
/// and the order growth rate `p ≥ 0` (so `α = p·n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledParams {
    pub a: f64,
    pub t: f64,
    pub p: f64,
}

impl ScaledParams {
    pub fn new(a: f64, t: f64, p: f64) -> Result<Self, ModelError> {
        if !(a >= 0.0) {
            return Err(ModelError::InvalidParams(format!("a must be nonnegative, got {a}")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(ModelError::InvalidParams(format!("t must lie in (0,1), got {t}")));
        }
        if !(p >= 0.0) {
            return Err(ModelError::InvalidParams(format!("p must be nonnegative, got {p}")));
        }
        Ok(Self { a, t, p })
    }

    /// Critical time `t* = a/(1+a)` at which the lowest paths reach the wall
    /// (for fixed order, `p = 0`).
    pub fn t_star(&self) -> f64 {
        self.a / (1.0 + self.a)
    }

    /// Degenerate ratio `s* = a(1-t)/t` where the three symbol zeros merge.
    /// Only meaningful for `p = 0`.
    pub fn s_star(&self) -> Option<f64> {
        (self.p == 0.0).then(|| self.a * (1.0 - self.t) / self.t)
    }

    /// `x₀ = (1-t)(a(1-t) + p t)`, the common `s → 0⁺` limit of the edge
    /// curves `β` and `γ`; the external field `V` vanishes there.
    pub fn x0(&self) -> f64 {
        (1.0 - self.t) * (self.a * (1.0 - self.t) + self.p * self.t)
    }

    /// Rounded Bessel order used by the scaled family at size `n`.
    pub fn alpha_for(&self, n: usize) -> f64 {
        (self.p * n as f64).round()
    }
}

/// One row of four-term recurrence coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffTriple {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Coefficient rows of an m-term recurrence
/// `x P_k = P_{k+1} + b⁰_k P_k + b¹_k P_{k-1} + … + b^{m-2}_k P_{k+2-m}`.
///
/// `bands()` returns the number of lower coefficient sequences (`m - 1`);
/// `coeff(k, j)` returns `b^{(j)}_k`. Band 0 is the same-degree coefficient.
pub trait CoeffSource {
    fn bands(&self) -> usize;
    fn coeff(&self, k: usize, band: usize) -> f64;

    fn triple(&self, k: usize) -> CoeffTriple {
        debug_assert!(self.bands() >= 3);
        CoeffTriple { b: self.coeff(k, 0), c: self.coeff(k, 1), d: self.coeff(k, 2) }
    }
}

/// Finite-parameter coefficient rows.
#[derive(Debug, Clone, Copy)]
pub struct FiniteCoeffs(pub FiniteParams);

impl CoeffSource for FiniteCoeffs {
    fn bands(&self) -> usize {
        3
    }
    fn coeff(&self, k: usize, band: usize) -> f64 {
        let CoeffTriple { b, c, d } = recurrence_coeffs_finite(&self.0, k);
        [b, c, d][band]
    }
}

/// Scaled-family coefficient rows `(b_{k,n}, c_{k,n}, d_{k,n})` at fixed `n`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCoeffs {
    pub sp: ScaledParams,
    pub n: usize,
}

impl ScaledCoeffs {
    pub fn new(sp: ScaledParams, n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroN);
        }
        Ok(Self { sp, n })
    }
}

impl CoeffSource for ScaledCoeffs {
    fn bands(&self) -> usize {
        3
    }
    fn coeff(&self, k: usize, band: usize) -> f64 {
        let CoeffTriple { b, c, d } =
            recurrence_coeffs_scaled(&self.sp, k, self.n).expect("n validated at construction");
        [b, c, d][band]
    }
}

/// Constant coefficient rows, e.g. the scaling limit frozen at one `s`.
#[derive(Debug, Clone, Copy)]
pub struct ConstCoeffs(pub CoeffTriple);

impl CoeffSource for ConstCoeffs {
    fn bands(&self) -> usize {
        3
    }
    fn coeff(&self, _k: usize, band: usize) -> f64 {
        [self.0.b, self.0.c, self.0.d][band]
    }
}

/// Finite-parameter recurrence coefficients `b_k, c_k, d_k`.
///
/// `c_0 = 0` and `d_0 = d_1 = 0` because of the `k` and `k(k-1)` factors.
pub fn recurrence_coeffs_finite(fp: &FiniteParams, k: usize) -> CoeffTriple {
    let FiniteParams { a, alpha, t, cap_t: tt } = *fp;
    let k = k as f64;
    let ratio = (tt - t) / tt;
    let b = a * ratio * ratio + 2.0 * t * ratio * (2.0 * k + alpha + 1.0);
    let c = 4.0 * a * t * ratio.powi(3) * k + 4.0 * t * t * ratio * ratio * k * (k + alpha);
    let d = 4.0 * a * t * t * ratio.powi(4) * k * (k - 1.0);
    CoeffTriple { b, c, d }
}

/// Scaled-family coefficients `b_{k,n}, c_{k,n}, d_{k,n}` with
/// `α = round(p·n)` substituted.
pub fn recurrence_coeffs_scaled(sp: &ScaledParams, k: usize, n: usize) -> Result<CoeffTriple, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroN);
    }
    let ScaledParams { a, t, .. } = *sp;
    let alpha = sp.alpha_for(n);
    let k = k as f64;
    let n = n as f64;
    let omt = 1.0 - t;
    let b = a * omt * omt + t * omt * (2.0 * k + alpha + 1.0) / n;
    let c = 2.0 * a * t * omt.powi(3) * k / n + t * t * omt * omt * k * (k + alpha) / (n * n);
    let d = a * t * t * omt.powi(4) * k * (k - 1.0) / (n * n);
    Ok(CoeffTriple { b, c, d })
}

/// Scaling limits `b(s), c(s), d(s)` of the recurrence coefficients,
/// including the `p`-dependent terms; `p = 0` recovers the fixed-order case.
pub fn limit_coeffs(sp: &ScaledParams, s: f64) -> CoeffTriple {
    assert!(s >= 0.0, "ratio s must be nonnegative");
    let ScaledParams { a, t, p } = *sp;
    let omt = 1.0 - t;
    let b = a * omt * omt + 2.0 * s * t * omt + p * t * omt;
    let c = 2.0 * a * s * t * omt.powi(3) + s * s * t * t * omt * omt + p * s * t * t * omt * omt;
    let d = a * s * s * t * t * omt.powi(4);
    CoeffTriple { b, c, d }
}

/// Sign and log-magnitude of a recurrence polynomial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub sign: i8,
    pub ln_abs: f64,
}

impl PolyEval {
    /// Natural-scale value; may overflow to ±∞ for large degrees.
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
}

/// Evaluates the degree-`k` monic recurrence polynomial at `x`, returning its
/// sign and log-magnitude.
///
/// The recurrence window is rescaled by exact powers of two whenever its
/// magnitude leaves `[1e-150, 1e150]`, so no intermediate value overflows for
/// degrees up to 10⁵. An exact zero of the final value (or of the whole
/// window) is reported as [`ModelError::EvalHitZero`]; callers retry with a
/// perturbed abscissa.
pub fn eval_poly<S: CoeffSource + ?Sized>(src: &S, k: usize, x: f64) -> Result<PolyEval, ModelError> {
    let bands = src.bands();
    assert!(bands >= 1, "coefficient source must have at least one band");
    if k == 0 {
        return Ok(PolyEval { sign: 1, ln_abs: 0.0 });
    }

    let up = 512.0f64.exp2();
    let down = (-512.0f64).exp2();
    let ln2 = std::f64::consts::LN_2;

    // window[j] = P_{current-j}
    let mut window = vec![0.0f64; bands];
    window[0] = 1.0;
    let mut exp2: i64 = 0;

    for j in 0..k {
        let mut next = (x - src.coeff(j, 0)) * window[0];
        for band in 1..bands.min(j + 1) {
            let c = src.coeff(j, band);
            if c != 0.0 {
                next -= c * window[band];
            }
        }
        for idx in (1..bands).rev() {
            window[idx] = window[idx - 1];
        }
        window[0] = next;

        let m = window.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if m == 0.0 {
            return Err(ModelError::EvalHitZero { degree: j + 1, x });
        }
        if m > 1e150 {
            for v in window.iter_mut() {
                *v *= down;
            }
            exp2 += 512;
        } else if m < 1e-150 {
            for v in window.iter_mut() {
                *v *= up;
            }
            exp2 -= 512;
        }
    }

    let v = window[0];
    if v == 0.0 {
        return Err(ModelError::EvalHitZero { degree: k, x });
    }
    Ok(PolyEval { sign: if v > 0.0 { 1 } else { -1 }, ln_abs: v.abs().ln() + exp2 as f64 * ln2 })
}

/// Monomial coefficients (ascending) of the degree-`k` recurrence polynomial.
/// Intended for small degrees (oracles, Toeplitz cross-checks); coefficient
/// growth makes this unusable beyond a few hundred.
pub fn recurrence_poly_coeffs<S: CoeffSource + ?Sized>(src: &S, k: usize) -> Vec<f64> {
    let bands = src.bands();
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    for j in 0..k {
        let mut next = vec![0.0; j + 2];
        // x * P_j
        for (i, &a) in polys[j].iter().enumerate() {
            next[i + 1] += a;
        }
        for band in 0..bands.min(j + 1) {
            let c = src.coeff(j, band);
            if c == 0.0 {
                continue;
            }
            for (i, &a) in polys[j - band].iter().enumerate() {
                next[i] -= c * a;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Which of the two Bessel weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    W1,
    W2,
}

/// The modified-Bessel weight `w_j(x)` at `x > 0`:
///
/// ```text
/// w₁(x) = x^{α/2}      e^{-T x / (2 t (T-t))} I_α    (√(a x)/t)
/// w₂(x) = x^{(α+1)/2}  e^{-T x / (2 t (T-t))} I_{α+1}(√(a x)/t)
/// ```
///
/// (The exponent is written in the scale-covariant form; at `T = 1` it is the
/// usual `e^{-x/(2 t (1-t))}`.)
pub fn bessel_weight(fp: &FiniteParams, which: Weight, x: f64) -> Result<f64, ModelError> {
    if !(x > 0.0) {
        return Err(ModelError::InvalidParams(format!("weight argument must be positive, got {x}")));
    }
    let FiniteParams { a, alpha, t, cap_t: tt } = *fp;
    let (pow, order) = match which {
        Weight::W1 => (0.5 * alpha, alpha),
        Weight::W2 => (0.5 * (alpha + 1.0), alpha + 1.0),
    };
    let z = (a * x).sqrt() / t;
    let ln_w = pow * x.ln() - tt * x / (2.0 * t * (tt - t)) + special::ln_bessel_i(order, z)?;
    Ok(ln_w.exp())
}

/// Normalised orthogonality residual
/// `|∫ B_n x^k w_j| / ∫ |B_n| x^k w_j` for the recurrence polynomial `B_n`.
///
/// Desk-scale check: requires even `n ≤ 8` and `k < n/2`. Quadrature is
/// truncated where the integrand envelope falls below `1e-16` of its peak.
pub fn check_orthogonality(fp: &FiniteParams, n: usize, which: Weight, k: usize) -> Result<f64, ModelError> {
    if n == 0 || n % 2 != 0 || n > 8 || k >= n / 2 {
        return Err(ModelError::InvalidOrthoArgs { n, k });
    }
    let coeffs = recurrence_poly_coeffs(&FiniteCoeffs(*fp), n);
    orthogonality_residual(fp, &coeffs, which, k)
}

/// Residual of the orthogonality functional for an arbitrary polynomial
/// given by ascending monomial coefficients. Used by [`check_orthogonality`]
/// and by negative-control tests.
pub fn orthogonality_residual(
    fp: &FiniteParams,
    poly: &[f64],
    which: Weight,
    k: usize,
) -> Result<f64, ModelError> {
    let horner = |x: f64| poly.iter().rev().fold(0.0f64, |acc, &c| acc * x + c);

    // locate the integrand peak and the 1e-16 truncation point by scanning
    let g = |x: f64| -> Result<f64, ModelError> {
        Ok(horner(x).abs() * x.powi(k as i32) * bessel_weight(fp, which, x)?)
    };
    let mut hi = 1.0f64;
    let mut peak = 0.0f64;
    for _ in 0..60 {
        let mut local_peak = 0.0f64;
        for i in 1..=200 {
            let x = hi * i as f64 / 200.0;
            local_peak = local_peak.max(g(x)?);
        }
        peak = peak.max(local_peak);
        if g(hi)? < 1e-16 * peak && g(0.75 * hi)? < 1e-16 * peak {
            break;
        }
        hi *= 2.0;
    }

    let breaks: Vec<f64> = (0..=8).map(|i| hi * i as f64 / 8.0).collect();
    let denom = {
        let mut f = |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            g(x).unwrap_or(f64::NAN)
        };
        quad::adaptive_split(&mut f, &breaks, 1e-13 * peak * hi)?
    };
    let numer = {
        let mut f = |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            let w = bessel_weight(fp, which, x).unwrap_or(f64::NAN);
            horner(x) * x.powi(k as i32) * w
        };
        quad::adaptive_split(&mut f, &breaks, (1e-10 * denom).max(1e-300))?
    };
    Ok(numer.abs() / denom)
}
