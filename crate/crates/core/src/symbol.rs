//! The cubic symbol `A_s(z) = z + b(s) + c(s)/z + d(s)/z²`, its ordered
//! roots, the equimodularity sets `Γ₁(s) = [β(s), γ(s)]` and
//! `Γ₂(s) = (-∞, η(s)]`, the edge curves and their inverses `s*(x)`.
//!
//! For `s > 0` (and `a > 0`) the symbol has three negative zeros, so its
//! derivative has three real critical points `y₁ ≤ y₂ < 0 < y₃`:
//! a local maximum `y₁` between the two leftmost zeros, a local minimum `y₂`
//! between the two rightmost ones and a local minimum `y₃` on the positive
//! axis. The critical values are the edges:
//!
//! ```text
//! β(s) = A_s(y₁) ≥ 0,   η(s) = A_s(y₂) ≤ 0,   γ(s) = A_s(y₃) > 0.
//! ```
//!
//! For `p = 0` the double zero `-s t(1-t)` of the symbol is itself a
//! critical point, which pins `η ≡ 0` for `s ≤ s*` and `β ≡ 0` for
//! `s ≥ s* = a(1-t)/t`; the evaluation below uses the exact factored
//! critical points in that case so the `s = s*` triple degeneracy is not a
//! 0/0.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::cubic::{solve_cubic_complex, solve_cubic_real, CubicRoots};
use crate::model::{limit_coeffs, CoeffTriple, ScaledParams};

/// Relative tolerance for the `|z_i|` tie tests on the Γ sets.
const MODULUS_TIE_TOL: f64 = 1e-9;
/// Band within which the interval test and the modulus test must agree.
const MEMBERSHIP_BAND: f64 = 1e-7;
/// Relative bisection tolerance for the `s*(x)` inversions.
const S_STAR_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("symbol is undefined at z = 0")]
    ZeroArgument,
    #[error("symbol degenerates for s = {s} (d(s) = 0): the equation A_s(z) = x is quadratic")]
    DegenerateSymbol { s: f64 },
    #[error("expected three real critical points at s = {s}, found a complex pair")]
    UnexpectedCriticalPoints { s: f64 },
    #[error("interval and modulus membership tests disagree at x = {x} (s = {s})")]
    InconsistentMembership { x: f64, s: f64 },
    #[error("x = {x} is outside the invertible range of {curve}")]
    OutsideRange { x: f64, curve: &'static str },
    #[error("root classification ambiguous: cubic discriminant within 1e-12 of zero")]
    AmbiguousClassification,
    #[error("s must be positive, got {s}")]
    NonPositiveS { s: f64 },
}

/// The three solutions of `A_s(z) = x`, ordered by descending modulus with
/// ties broken by ascending argument in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolRoots {
    pub z1: Complex64,
    pub z2: Complex64,
    pub z3: Complex64,
}

impl SymbolRoots {
    pub fn all(&self) -> [Complex64; 3] {
        [self.z1, self.z2, self.z3]
    }

    /// Member of the leading conjugate pair with positive imaginary part, if
    /// the largest two moduli belong to a genuine pair (`x ∈ int Γ₁`).
    pub fn upper_of_leading_pair(&self) -> Option<Complex64> {
        if self.z1.im != 0.0 && (self.z1.im + self.z2.im).abs() < 1e-12 * self.z1.im.abs() {
            Some(if self.z1.im > 0.0 { self.z1 } else { self.z2 })
        } else {
            None
        }
    }

    /// Member of the trailing conjugate pair with positive imaginary part
    /// (`x ∈ int Γ₂`).
    pub fn upper_of_trailing_pair(&self) -> Option<Complex64> {
        if self.z3.im != 0.0 && (self.z2.im + self.z3.im).abs() < 1e-12 * self.z3.im.abs() {
            Some(if self.z2.im > 0.0 { self.z2 } else { self.z3 })
        } else {
            None
        }
    }
}

/// Edge curves at one value of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeCurves {
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
}

/// Which equimodularity set a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaSet {
    Gamma1,
    Gamma2,
    Neither,
}

/// Evaluates `A_s(z) = z + b(s) + c(s)/z + d(s)/z²`.
pub fn symbol_eval(sp: &ScaledParams, s: f64, z: Complex64) -> Result<Complex64, SymbolError> {
    if z.norm_sqr() == 0.0 {
        return Err(SymbolError::ZeroArgument);
    }
    let CoeffTriple { b, c, d } = limit_coeffs(sp, s);
    Ok(z + b + c / z + d / (z * z))
}

/// Derivative `A_s'(z) = 1 - c/z² - 2d/z³`.
pub fn symbol_derivative(sp: &ScaledParams, s: f64, z: Complex64) -> Complex64 {
    let CoeffTriple { c, d, .. } = limit_coeffs(sp, s);
    Complex64::new(1.0, 0.0) - c / (z * z) - 2.0 * d / (z * z * z)
}

fn order_roots(mut roots: [Complex64; 3]) -> SymbolRoots {
    roots.sort_by(|u, v| v.norm().total_cmp(&u.norm()).then(u.arg().total_cmp(&v.arg())));
    SymbolRoots { z1: roots[0], z2: roots[1], z3: roots[2] }
}

/// Solves `A_s(z) = x`, i.e. the cubic `z³ + (b-x) z² + c z + d = 0`.
///
/// Requires `d(s) ≠ 0` (`s > 0` and `a > 0`); otherwise the equation is
/// quadratic and [`SymbolError::DegenerateSymbol`] is raised. For real `x`
/// the root multiset is exactly closed under conjugation.
pub fn solve_symbol(sp: &ScaledParams, s: f64, x: Complex64) -> Result<SymbolRoots, SymbolError> {
    let CoeffTriple { b, c, d } = limit_coeffs(sp, s);
    if d == 0.0 {
        return Err(SymbolError::DegenerateSymbol { s });
    }
    let roots = if x.im == 0.0 {
        match solve_cubic_real(b - x.re, c, d) {
            CubicRoots::ThreeReal(r) => r.map(|v| Complex64::new(v, 0.0)),
            CubicRoots::OneRealPair { real, pair } => {
                [Complex64::new(real, 0.0), pair, pair.conj()]
            }
        }
    } else {
        solve_cubic_complex(Complex64::new(b, 0.0) - x, Complex64::new(c, 0.0), Complex64::new(d, 0.0))
    };
    Ok(order_roots(roots))
}

/// Real critical points of `A_s`, ascending: roots of `z³ - c z - 2d = 0`.
fn critical_points(sp: &ScaledParams, s: f64) -> Result<[f64; 3], SymbolError> {
    let CoeffTriple { c, d, .. } = limit_coeffs(sp, s);
    if sp.p == 0.0 {
        // the double zero -m of the symbol is always critical; the others
        // solve z² - m z - 2d/m = 0, which keeps s = s* exact
        let m = s * sp.t * (1.0 - sp.t);
        if m == 0.0 {
            return Err(SymbolError::DegenerateSymbol { s });
        }
        let disc = (m * m + 8.0 * sp.a * m * (1.0 - sp.t) * (1.0 - sp.t)).sqrt();
        let y_plus = 0.5 * (m + disc);
        let y_minus = 0.5 * (m - disc);
        let mut ys = [-m, y_minus, y_plus];
        ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
        return Ok(ys);
    }
    match solve_cubic_real(0.0, -c, -2.0 * d) {
        CubicRoots::ThreeReal(r) => Ok(r),
        CubicRoots::OneRealPair { pair, .. } => {
            // tolerate a numerically tiny imaginary part
            if pair.im.abs() < 1e-9 * (1.0 + pair.re.abs()) {
                let mut ys = [pair.re, pair.re, 0.0];
                // recover the remaining real root from the product 2d
                ys[2] = 2.0 * d / (pair.norm_sqr());
                ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
                Ok(ys)
            } else {
                Err(SymbolError::UnexpectedCriticalPoints { s })
            }
        }
    }
}

/// Edge curves `(β(s), γ(s), η(s))` at `s > 0`.
///
/// The critical points `y₁ ≤ y₂ < 0 < y₃` of `A_s` give `β = A_s(y₁)`,
/// `η = A_s(y₂)`, `γ = A_s(y₃)`; for `p = 0` the identities `η ≡ 0` on
/// `(0, s*]` and `β ≡ 0` on `[s*, ∞)` hold exactly by construction.
pub fn edge_curves(sp: &ScaledParams, s: f64) -> Result<EdgeCurves, SymbolError> {
    if !(s > 0.0) {
        return Err(SymbolError::NonPositiveS { s });
    }
    let ys = critical_points(sp, s)?;
    if !(ys[0] <= ys[1] && ys[1] < 0.0 && ys[2] > 0.0) {
        return Err(SymbolError::UnexpectedCriticalPoints { s });
    }
    let at = |y: f64| {
        symbol_eval(sp, s, Complex64::new(y, 0.0))
            .expect("critical points are nonzero")
            .re
    };
    let mut beta = at(ys[0]);
    let gamma = at(ys[2]);
    let mut eta = at(ys[1]);
    if sp.p == 0.0 {
        // clamp the exactly-zero branch against rounding in A_s(y)
        let m = s * sp.t * (1.0 - sp.t);
        if (ys[0] + m).abs() <= 1e-12 * m {
            beta = 0.0;
        }
        if (ys[1] + m).abs() <= 1e-12 * m {
            eta = 0.0;
        }
        beta = beta.max(0.0);
        eta = eta.min(0.0);
    }
    Ok(EdgeCurves { beta, gamma, eta })
}

/// Membership of a real `x` in `Γ₁(s)`, `Γ₂(s)` or neither.
///
/// The interval test against [`edge_curves`] is authoritative; the
/// root-modulus test is computed as a cross-check and any disagreement
/// farther than `1e-7` from the relevant edge is an error.
pub fn gamma_membership(sp: &ScaledParams, s: f64, x: f64) -> Result<GammaSet, SymbolError> {
    let edges = edge_curves(sp, s)?;
    let interval = if x >= edges.beta && x <= edges.gamma {
        GammaSet::Gamma1
    } else if x <= edges.eta {
        GammaSet::Gamma2
    } else {
        GammaSet::Neither
    };

    let roots = solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    let (m1, m2, m3) = (roots.z1.norm(), roots.z2.norm(), roots.z3.norm());
    let modulus = if m1 - m2 <= MODULUS_TIE_TOL * (1.0 + m1) {
        GammaSet::Gamma1
    } else if m2 - m3 <= MODULUS_TIE_TOL * (1.0 + m2) {
        GammaSet::Gamma2
    } else {
        GammaSet::Neither
    };

    if interval != modulus {
        let edge_dist = [edges.beta, edges.gamma, edges.eta]
            .iter()
            .map(|e| (x - e).abs())
            .fold(f64::INFINITY, f64::min);
        if edge_dist > MEMBERSHIP_BAND * (1.0 + x.abs()) {
            return Err(SymbolError::InconsistentMembership { x, s });
        }
    }
    Ok(interval)
}

fn bisect_monotone(
    mut f: impl FnMut(f64) -> Result<f64, SymbolError>,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    increasing: bool,
) -> Result<f64, SymbolError> {
    for _ in 0..200 {
        if hi - lo <= S_STAR_REL_TOL * hi.abs().max(1e-30) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        let go_right = if increasing { v < target } else { v > target };
        if go_right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest `s ≥ 0` with `x ∈ Γ₁(s)`, for `x > 0`.
///
/// Inverts `γ(s) = x` when `x > x₀` and `β(s) = x` when `0 < x < x₀`, using
/// the strict monotonicity of both curves; `s*(x₀) = 0`.
pub fn s_star_upper(sp: &ScaledParams, x: f64) -> Result<f64, SymbolError> {
    if !(x > 0.0) {
        return Err(SymbolError::OutsideRange { x, curve: "gamma/beta (need x > 0)" });
    }
    let x0 = sp.x0();
    if (x - x0).abs() <= 1e-14 * x0.max(1.0) {
        return Ok(0.0);
    }
    if x > x0 {
        // γ is strictly increasing from x₀ to ∞
        let mut hi = 1.0;
        while edge_curves(sp, hi)?.gamma < x {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(SymbolError::OutsideRange { x, curve: "gamma" });
            }
        }
        bisect_monotone(|s| Ok(edge_curves(sp, s)?.gamma), 0.0, hi, x, true)
    } else {
        // β is strictly decreasing from x₀ towards 0
        let mut hi = 1.0;
        while edge_curves(sp, hi)?.beta > x {
            if let Some(s_star) = sp.s_star() {
                // for p = 0, β vanishes at s*; no doubling needed beyond it
                hi = s_star;
                break;
            }
            hi *= 2.0;
            if hi > 1e12 {
                return Err(SymbolError::OutsideRange { x, curve: "beta" });
            }
        }
        bisect_monotone(|s| Ok(edge_curves(sp, s)?.beta), 0.0, hi, x, false)
    }
}

/// Largest `s` with `x ∈ Γ₂(s)`: inverts `η(s) = x`.
///
/// Requires `x < -p²t²/(4a)` (for `p = 0`: `x < 0`), the supremum of the
/// union of the `Γ₂(s)`.
pub fn s_star_lower(sp: &ScaledParams, x: f64) -> Result<f64, SymbolError> {
    let sigma_edge = -sp.p * sp.p * sp.t * sp.t / (4.0 * sp.a);
    if !(x < sigma_edge) {
        return Err(SymbolError::OutsideRange { x, curve: "eta (need x < -p^2 t^2 / 4a)" });
    }
    // η decreases to -∞; for p = 0 it leaves 0 only after s*
    let mut lo = match sp.s_star() {
        Some(s_star) => s_star,
        None => 0.0,
    };
    let mut hi = (lo.max(1.0)) * 2.0;
    while edge_curves(sp, hi)?.eta > x {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(SymbolError::OutsideRange { x, curve: "eta" });
        }
    }
    bisect_monotone(|s| Ok(edge_curves(sp, s)?.eta), lo, hi, x, false)
}

/// The degree-3 algebraic equation in `x` for the boundary of the bulk at
/// `s = 1` (discriminant of `z²A₁(z) - z²x` in `z`): returns `(β(1), γ(1))`.
///
/// For `p = 0` the equation factors as `x` times a quadratic; the closed-form
/// quadratic roots are used directly so the result doubles as an independent
/// oracle for [`edge_curves`].
pub fn boundary_cubic(sp: &ScaledParams) -> Result<(f64, f64), SymbolError> {
    let ScaledParams { a, t, p } = *sp;
    let omt = 1.0 - t;
    if p == 0.0 {
        // 4a x² - (8a²(1-t)² + 20at(1-t) - t²) x + 4(1-t)(a(1-t)-t)³ = 0
        let b = 8.0 * a * a * omt * omt + 20.0 * a * t * omt - t * t;
        let c = 4.0 * omt * (a * omt - t).powi(3);
        let disc = b * b - 16.0 * a * c;
        if disc < 0.0 {
            return Err(SymbolError::AmbiguousClassification);
        }
        let sq = disc.sqrt();
        // stable quadratic formula for 4a x² - b x + c
        let q = 0.5 * (b + sq.copysign(b));
        let (mut r1, mut r2) = (q / (4.0 * a), c / q);
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        // roots {x₂, x₃}; x₂ < 0 means the hard edge is active and β = 0
        Ok((r1.max(0.0), r2))
    } else {
        let coeff2 = -(8.0 * a * a * omt * omt + 4.0 * a * t * omt * (2.0 * p + 5.0)
            - t * t * (p + 1.0) * (p + 1.0));
        let coeff1 = omt
            * (4.0 * a.powi(3) * omt.powi(3) + 4.0 * a * a * t * omt * omt * (2.0 * p - 3.0)
                + 2.0 * a * t * t * omt * (p * p + p + 6.0)
                - 2.0 * t.powi(3) * (p + 2.0) * (p + 1.0) * (p + 1.0));
        let coeff0 = p * p * t * t * omt * omt
            * (a * a * omt * omt + 2.0 * a * t * omt * (p - 1.0) + t * t * (p + 1.0) * (p + 1.0));
        let lead = 4.0 * a;
        match solve_cubic_real(coeff2 / lead, coeff1 / lead, coeff0 / lead) {
            CubicRoots::ThreeReal(r) => {
                // ascending roots are {η(1), β(1), γ(1)} for p > 0
                if !(r[0] < 0.0 && r[1] > 0.0 && r[1] < r[2]) {
                    return Err(SymbolError::AmbiguousClassification);
                }
                Ok((r[1], r[2]))
            }
            CubicRoots::OneRealPair { .. } => Err(SymbolError::AmbiguousClassification),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sp(a: f64, t: f64, p: f64) -> ScaledParams {
        ScaledParams::new(a, t, p).unwrap()
    }

    const SETS: [(f64, f64, f64); 3] = [(1.0, 0.2, 0.0), (1.0, 0.9, 0.0), (1.0, 0.3, 5.0)];

    #[test]
    fn symbol_vanishes_at_its_zeros() {
        let params = sp(1.0, 0.2, 0.0);
        let s = 1.0;
        let m = s * 0.2 * 0.8; // double zero -st(1-t)
        let v = symbol_eval(&params, s, Complex64::new(-m, 0.0)).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-14);
        let v = symbol_eval(&params, s, Complex64::new(-0.64, 0.0)).unwrap();
        assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-13);
        assert!(symbol_eval(&params, s, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn solve_symbol_at_origin_recovers_symbol_zeros() {
        let roots = solve_symbol(&sp(1.0, 0.2, 0.0), 1.0, Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(roots.z1.re, -0.64, epsilon = 1e-10);
        assert_relative_eq!(roots.z2.re, -0.16, epsilon = 1e-8);
        assert_relative_eq!(roots.z3.re, -0.16, epsilon = 1e-8);
    }

    #[test]
    fn roots_satisfy_cubic_and_vieta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            for _ in 0..60 {
                let s = rng.gen_range(0.05..4.0);
                let x = Complex64::new(rng.gen_range(-4.0..4.0), 0.0);
                let CoeffTriple { b, c, d } = limit_coeffs(&params, s);
                let roots = solve_symbol(&params, s, x).unwrap();
                for z in roots.all() {
                    let res = ((z + (b - x.re)) * z + c) * z + d;
                    assert!(res.norm() <= 1e-10 * (1.0 + z.norm()).powi(3), "residual {}", res.norm());
                }
                let sum = roots.z1 + roots.z2 + roots.z3;
                let prod = roots.z1 * roots.z2 * roots.z3;
                assert_relative_eq!(sum.re, x.re - b, max_relative = 1e-10, epsilon = 1e-10);
                assert_relative_eq!(prod.re, -d, max_relative = 1e-10, epsilon = 1e-12);
                // conjugate closure for real x
                let mut ims: Vec<f64> = roots.all().iter().map(|z| z.im).collect();
                ims.sort_by(|u, v| u.partial_cmp(v).unwrap());
                assert_abs_diff_eq!(ims[0] + ims[2], 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(ims[1], 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ordering_is_by_descending_modulus() {
        let params = sp(1.0, 0.3, 5.0);
        for x in [-3.0, -1.0, 0.5, 1.0, 4.0, 10.0] {
            let r = solve_symbol(&params, 1.0, Complex64::new(x, 0.0)).unwrap();
            assert!(r.z1.norm() >= r.z2.norm() && r.z2.norm() >= r.z3.norm());
            assert!(r.z3.norm() > 0.0);
        }
    }

    #[test]
    fn large_x_leading_root() {
        let params = sp(1.0, 0.2, 0.0);
        let b = limit_coeffs(&params, 1.0).b;
        let x = 1e6;
        let r = solve_symbol(&params, 1.0, Complex64::new(x, 0.0)).unwrap();
        assert_relative_eq!(r.z1.re, x - b, max_relative = 1e-5);
    }

    #[test]
    fn edges_match_known_values() {
        // s → 0⁺ limits: β, γ → a(1-t)² for p = 0
        let params = sp(1.0, 0.2, 0.0);
        let e = edge_curves(&params, 1e-7).unwrap();
        assert_relative_eq!(e.beta, 0.64, epsilon = 1e-3);
        assert_relative_eq!(e.gamma, 0.64, epsilon = 1e-3);

        // p > 0: η(0⁺) → -p²t²/(4a)
        let params = sp(1.0, 0.3, 5.0);
        let e = edge_curves(&params, 1e-7).unwrap();
        assert_relative_eq!(e.eta, -0.5625, epsilon = 1e-4);
        let x0 = params.x0();
        assert_relative_eq!(e.beta, x0, epsilon = 1e-3);
        assert_relative_eq!(e.gamma, x0, epsilon = 1e-3);
    }

    #[test]
    fn edge_values_at_s_one() {
        // t = 0.5 is the triple-degenerate point s* = 1: β = 0 and
        // γ = A₁(0.5) = (0.75)³/0.25 = 1.6875
        let e = edge_curves(&sp(1.0, 0.5, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(e.beta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eta, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.gamma, 1.6875, epsilon = 1e-12);

        // t = 0.2: quadratic-formula oracle
        // β, γ = (8.28 ∓ √57.4992)/8, and β + γ = 2.07 by Vieta
        let e = edge_curves(&sp(1.0, 0.2, 0.0), 1.0).unwrap();
        assert_relative_eq!(e.beta, (8.28 - 57.4992f64.sqrt()) / 8.0, epsilon = 1e-10);
        assert_relative_eq!(e.gamma, (8.28 + 57.4992f64.sqrt()) / 8.0, epsilon = 1e-10);
        assert_relative_eq!(e.beta + e.gamma, 2.07, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eta, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn edge_monotonicity_and_limits() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let s_star = params.s_star();
            let mut prev: Option<EdgeCurves> = None;
            for i in 1..=200 {
                let s = 8.0 * i as f64 / 200.0;
                let e = edge_curves(&params, s).unwrap();
                assert!(e.eta <= 0.0 && e.beta >= 0.0 && e.beta < e.gamma);
                if p > 0.0 {
                    assert!(e.eta < 0.0 && e.beta > 0.0);
                }
                if let Some(q) = prev {
                    assert!(e.gamma > q.gamma, "gamma not increasing at s = {s}");
                    match s_star {
                        Some(ss) => {
                            if s < ss {
                                assert!(e.beta < q.beta, "beta not decreasing at s = {s}");
                                assert_eq!(e.eta, 0.0);
                            } else {
                                assert_eq!(e.beta, 0.0);
                            }
                            if s - 8.0 / 200.0 > ss {
                                assert!(e.eta < q.eta, "eta not decreasing at s = {s}");
                            }
                        }
                        None => {
                            assert!(e.beta < q.beta);
                            assert!(e.eta < q.eta);
                        }
                    }
                }
                prev = Some(e);
            }
        }
    }

    #[test]
    fn membership_examples() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let s = 1.0;
            let e = edge_curves(&params, s).unwrap();
            let mid = 0.5 * (e.beta + e.gamma);
            assert_eq!(gamma_membership(&params, s, mid).unwrap(), GammaSet::Gamma1);
            assert_eq!(gamma_membership(&params, s, e.eta - 1.0).unwrap(), GammaSet::Gamma2);
            assert_eq!(gamma_membership(&params, s, e.gamma + 1.0).unwrap(), GammaSet::Neither);
            // Γ₁ ⊂ [0,∞), Γ₂ ⊂ (-∞,0]
            for i in 1..=40 {
                let x = -4.0 * i as f64 / 40.0;
                assert_ne!(gamma_membership(&params, s, x).unwrap(), GammaSet::Gamma1);
                assert_ne!(gamma_membership(&params, s, -x).unwrap(), GammaSet::Gamma2);
            }
        }
    }

    #[test]
    fn gamma_sets_meet_only_at_triple_point() {
        // p = 0, s = s*: Γ₁ ∩ Γ₂ = {0}
        let params = sp(1.0, 0.5, 0.0);
        let s_star = params.s_star().unwrap();
        let e = edge_curves(&params, s_star).unwrap();
        assert_abs_diff_eq!(e.beta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nesting_of_gamma_sets() {
        // Γ₁ grows with s, Γ₂ shrinks
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let mut prev: Option<EdgeCurves> = None;
            for s in [0.5, 1.0, 2.0, 4.0] {
                let e = edge_curves(&params, s).unwrap();
                if let Some(q) = prev {
                    assert!(e.beta <= q.beta + 1e-14 && e.gamma >= q.gamma);
                    assert!(e.eta <= q.eta + 1e-14);
                }
                prev = Some(e);
            }
        }
    }

    #[test]
    fn s_star_upper_round_trips() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let x0 = params.x0();
            assert_abs_diff_eq!(s_star_upper(&params, x0).unwrap(), 0.0, epsilon = 1e-12);
            for factor in [1.3, 2.0, 5.0] {
                let x = x0 * factor;
                let s = s_star_upper(&params, x).unwrap();
                assert_relative_eq!(edge_curves(&params, s).unwrap().gamma, x, epsilon = 1e-8);
            }
            for factor in [0.8, 0.5, 0.2] {
                let x = x0 * factor;
                let s = s_star_upper(&params, x).unwrap();
                assert_relative_eq!(edge_curves(&params, s).unwrap().beta, x, epsilon = 1e-8);
            }
            assert!(s_star_upper(&params, 0.0).is_err());
        }
    }

    #[test]
    fn s_star_upper_is_v_shaped_around_x0() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let x0 = params.x0();
            let mut prev = None;
            for factor in [0.2, 0.4, 0.6, 0.8] {
                let s = s_star_upper(&params, x0 * factor).unwrap();
                if let Some(q) = prev {
                    assert!(s < q, "not decreasing on (0, x0)");
                }
                prev = Some(s);
            }
            let mut prev = None;
            for factor in [1.2, 1.6, 2.4, 4.0] {
                let s = s_star_upper(&params, x0 * factor).unwrap();
                if let Some(q) = prev {
                    assert!(s > q, "not increasing on (x0, ∞)");
                }
                prev = Some(s);
            }
        }
    }

    #[test]
    fn s_star_lower_round_trips() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let edge = -p * p * t * t / (4.0 * a);
            let mut prev = None;
            for dx in [0.05, 0.2, 1.0, 5.0] {
                let x = edge - dx;
                let s = s_star_lower(&params, x).unwrap();
                assert_relative_eq!(edge_curves(&params, s).unwrap().eta, x, max_relative = 1e-8);
                if let Some(q) = prev {
                    assert!(s > q, "s_star_lower must decrease in x");
                }
                prev = Some(s);
            }
            assert!(s_star_lower(&params, edge + 1e-6).is_err());
            assert!(s_star_lower(&params, 0.5).is_err());
        }
        // p > 0: s* → 0 as x approaches the σ edge from below
        let params = sp(1.0, 0.3, 5.0);
        let edge = -0.5625;
        let s = s_star_lower(&params, edge - 1e-8).unwrap();
        assert!(s < 1e-3, "expected s* → 0 at the sigma edge, got {s}");
    }

    #[test]
    fn boundary_cubic_matches_edge_curves() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let (beta, gamma) = boundary_cubic(&params).unwrap();
            let e = edge_curves(&params, 1.0).unwrap();
            assert_abs_diff_eq!(beta, e.beta, epsilon = 1e-9);
            assert_abs_diff_eq!(gamma, e.gamma, epsilon = 1e-9);
        }
        for i in 1..=9 {
            let t = i as f64 / 10.0;
            let params = sp(1.0, t, 0.0);
            let (beta, gamma) = boundary_cubic(&params).unwrap();
            let e = edge_curves(&params, 1.0).unwrap();
            assert_abs_diff_eq!(beta, e.beta, epsilon = 1e-9);
            assert_abs_diff_eq!(gamma, e.gamma, epsilon = 1e-9);
        }
    }

    #[test]
    fn boundary_cubic_degenerate_point() {
        // t = t* = 0.5: hard edge exactly arriving, (β, γ) = (0, 1.6875)
        let (beta, gamma) = boundary_cubic(&sp(1.0, 0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(beta, 0.0, epsilon = 1e-12);
        assert_relative_eq!(gamma, 1.6875, epsilon = 1e-12);
        // t < t*: constraint inactive, lower boundary positive
        let (beta, _) = boundary_cubic(&sp(1.0, 0.2, 0.0)).unwrap();
        assert!(beta > 0.0);
    }

    #[test]
    fn degenerate_symbol_is_signalled() {
        let params = sp(1.0, 0.2, 0.0);
        assert!(matches!(
            solve_symbol(&params, 0.0, Complex64::new(1.0, 0.0)),
            Err(SymbolError::DegenerateSymbol { .. })
        ));
        let a0 = ScaledParams::new(0.0, 0.2, 0.0).unwrap();
        assert!(matches!(
            solve_symbol(&a0, 1.0, Complex64::new(1.0, 0.0)),
            Err(SymbolError::DegenerateSymbol { .. })
        ));
    }

    #[test]
    fn three_distinct_real_roots_beyond_gamma() {
        let params = sp(1.0, 0.2, 0.0);
        let e = edge_curves(&params, 1.0).unwrap();
        for i in 1..=20 {
            let x = e.gamma + 0.3 * i as f64;
            let r = solve_symbol(&params, 1.0, Complex64::new(x, 0.0)).unwrap();
            for z in r.all() {
                assert_eq!(z.im, 0.0);
            }
            assert!(r.z1.norm() > r.z2.norm() + 1e-12);
            assert!(r.z2.norm() > r.z3.norm() + 1e-12);
        }
    }
}
