//! Densities, masses and transforms of the limit measures.
//!
//! On the interval `Γ₁(s)` the Toeplitz limit measure `μ₁ˢ` has density
//! `(1/π) |Im(1/(z A_s'(z)))|` evaluated at the boundary value `z = z₁₊(x)`,
//! the member of the leading conjugate root pair lying in the upper half
//! plane (all arcs here are real intervals, so the upper-half-plane limit is
//! that root exactly). `μ₂ˢ` is the same expression at the trailing pair,
//! supported on `Γ₂(s)` with mass `1/2`.
//!
//! The averaged measures are `ν_j^ξ = ξ⁻¹ ∫₀^ξ μ_j^s ds`; the constraint is
//! `σ = ∫₀^∞ μ₂ˢ ds` and the external field is
//! `V(x) = ∫₀^∞ ln|z₁/z₂| ds`, both of which also have closed forms
//! ([`sigma_closed`], [`v_closed`]) that the quadrature routines
//! ([`sigma_numeric`], [`v_numeric`]) are checked against.
//!
//! Exact cumulative functions come for free from the argument of the root:
//! writing `z₁₊(x) = ρ e^{iθ}`, the density of `μ₁ˢ` is `-θ'(x)/π` with
//! `θ(β) = π` and `θ(γ) = 0`, so `F_{μ₁ˢ}(x) = 1 - θ(x)/π` with no
//! quadrature at all; similarly `F_{μ₂ˢ}(x) = θ₂(x)/π - 1/2` runs from `0`
//! at `-∞` (`θ₂ = π/2`) to `1/2` at `η` (`θ₂ = π`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::ScaledParams;
use crate::quad::{self, QuadError};
use crate::symbol::{self, SymbolError};

#[derive(Debug, Error)]
pub enum MeasuresError {
    #[error("x = {x} is outside the support of {measure}")]
    OutsideSupport { measure: &'static str, x: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

// ---------------------------------------------------------------------------
// pointwise densities
// ---------------------------------------------------------------------------

fn pair_density(z: Complex64, sp: &ScaledParams, s: f64) -> f64 {
    let ap = symbol::symbol_derivative(sp, s, z);
    ((z * ap).inv()).im.abs() / PI
}

/// Density of `μ₁ˢ` at `x ∈ (β(s), γ(s))`.
pub fn mu1_density(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let roots = symbol::solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    let z = roots
        .upper_of_leading_pair()
        .ok_or(MeasuresError::OutsideSupport { measure: "mu1", x })?;
    Ok(pair_density(z, sp, s))
}

/// Density of `μ₂ˢ` at `x < η(s)`.
pub fn mu2_density(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let roots = symbol::solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    let z = roots
        .upper_of_trailing_pair()
        .ok_or(MeasuresError::OutsideSupport { measure: "mu2", x })?;
    Ok(pair_density(z, sp, s))
}

fn mu1_density_or_zero(sp: &ScaledParams, s: f64, x: f64) -> f64 {
    match mu1_density(sp, s, x) {
        Ok(v) => v,
        Err(MeasuresError::OutsideSupport { .. }) => 0.0,
        Err(_) => f64::NAN,
    }
}

fn mu2_density_or_zero(sp: &ScaledParams, s: f64, x: f64) -> f64 {
    match mu2_density(sp, s, x) {
        Ok(v) => v,
        Err(MeasuresError::OutsideSupport { .. }) => 0.0,
        Err(_) => f64::NAN,
    }
}

/// Exact CDF of `μ₁ˢ` through the argument of the leading root pair.
pub fn mu1_cdf(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    if x <= e.beta {
        return Ok(0.0);
    }
    if x >= e.gamma {
        return Ok(1.0);
    }
    let roots = symbol::solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    match roots.upper_of_leading_pair() {
        Some(z) => Ok(1.0 - z.arg() / PI),
        // interior point resolved as real only through rounding at an edge
        None => Ok(if x - e.beta < e.gamma - x { 0.0 } else { 1.0 }),
    }
}

/// Exact CDF of `μ₂ˢ` (total mass `1/2`).
pub fn mu2_cdf(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    if x >= e.eta {
        return Ok(0.5);
    }
    let roots = symbol::solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    match roots.upper_of_trailing_pair() {
        Some(z) => Ok(z.arg() / PI - 0.5),
        None => Ok(0.5),
    }
}

/// Mass of `μ₁ˢ` by quadrature with square-root edge substitutions
/// (oracle for the density path; the exact value is 1).
pub fn mu1_mass(sp: &ScaledParams, s: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    let mid = 0.5 * (e.beta + e.gamma);
    let left = quad::adaptive_sqrt_lower(&mut |x| mu1_density_or_zero(sp, s, x), e.beta, mid, 1e-9)?;
    let right = quad::adaptive_sqrt_upper(&mut |x| mu1_density_or_zero(sp, s, x), mid, e.gamma, 1e-9)?;
    Ok(left + right)
}

/// Mass of `μ₂ˢ` by quadrature (edge substitution at `η`, `x = -1/w²` on the
/// tail); the exact value is 1/2.
pub fn mu2_mass(sp: &ScaledParams, s: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    let cut = e.eta - (2.0 * e.eta.abs()).max(2.0);
    let edge = quad::adaptive_sqrt_upper(&mut |x| mu2_density_or_zero(sp, s, x), cut, e.eta, 1e-9)?;
    let tail = quad::adaptive_neg_tail(&mut |x| mu2_density_or_zero(sp, s, x), cut, 1e-9)?;
    Ok(edge + tail)
}

/// Stieltjes transform `∫ dμ₁ˢ(y)/(x-y)` by quadrature, for real `x` off
/// `Γ₁(s)`.
pub fn stieltjes_mu1(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    if x >= e.beta && x <= e.gamma {
        return Err(MeasuresError::InvalidArgument(format!("x = {x} lies on Gamma1({s})")));
    }
    let mid = 0.5 * (e.beta + e.gamma);
    let mut f = |y: f64| mu1_density_or_zero(sp, s, y) / (x - y);
    let left = quad::adaptive_sqrt_lower(&mut f, e.beta, mid, 1e-10)?;
    let right = quad::adaptive_sqrt_upper(&mut f, mid, e.gamma, 1e-10)?;
    Ok(left + right)
}

/// Closed-form value `z₁'/z₁ = 1/(z₁ A_s'(z₁))` that the transform must
/// match off the support.
pub fn stieltjes_mu1_reference(sp: &ScaledParams, s: f64, x: f64) -> Result<f64, MeasuresError> {
    let roots = symbol::solve_symbol(sp, s, Complex64::new(x, 0.0))?;
    let z = roots.z1;
    let v = (z * symbol::symbol_derivative(sp, s, z)).inv();
    Ok(v.re)
}

// ---------------------------------------------------------------------------
// averaged measures
// ---------------------------------------------------------------------------

/// Density of `ν₁^ξ = ξ⁻¹ ∫₀^ξ μ₁ˢ ds` at `x`; zero off `[β(ξ), γ(ξ)]`.
pub fn nu1_density(sp: &ScaledParams, xi: f64, x: f64) -> Result<f64, MeasuresError> {
    if !(xi > 0.0) {
        return Err(MeasuresError::InvalidArgument(format!("xi must be positive, got {xi}")));
    }
    let e = symbol::edge_curves(sp, xi)?;
    if x <= e.beta || x >= e.gamma {
        return Ok(0.0);
    }
    let s_lo = symbol::s_star_upper(sp, x)?;
    if s_lo >= xi {
        return Ok(0.0);
    }
    let v = quad::adaptive_sqrt_lower(&mut |s| mu1_density_or_zero(sp, s, x), s_lo, xi, 1e-9)?;
    Ok(v / xi)
}

/// Density of `ν₂^ξ = ξ⁻¹ ∫₀^ξ μ₂ˢ ds` at `x < 0`.
pub fn nu2_density(sp: &ScaledParams, xi: f64, x: f64) -> Result<f64, MeasuresError> {
    if !(xi > 0.0) {
        return Err(MeasuresError::InvalidArgument(format!("xi must be positive, got {xi}")));
    }
    if x >= sigma_support_edge(sp) {
        return Ok(0.0);
    }
    let s_hi = symbol::s_star_lower(sp, x)?.min(xi);
    let v = quad::adaptive_sqrt_upper(&mut |s| mu2_density_or_zero(sp, s, x), 0.0, s_hi, 1e-9)?;
    Ok(v / xi)
}

/// CDF of `ν₁^ξ`, quadrature-free in `x`: averages the exact `μ₁ˢ` CDF over
/// `s` (one 1-d quadrature with a square-root substitution at `s*(x)`).
pub fn nu1_cdf(sp: &ScaledParams, xi: f64, x: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, xi)?;
    if x <= e.beta {
        return Ok(0.0);
    }
    if x >= e.gamma {
        return Ok(1.0);
    }
    let s_lo = symbol::s_star_upper(sp, x)?;
    // below s*(x) the point sits right of Γ₁(s) (full mass) when x > x₀,
    // left of it (no mass) when x < x₀
    let below = if x > sp.x0() { s_lo } else { 0.0 };
    let mut f = |s: f64| match mu1_cdf(sp, s, x) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    };
    let above = quad::adaptive_sqrt_lower(&mut f, s_lo, xi, 1e-8)?;
    Ok((below + above) / xi)
}

/// Mass of `ν₁^ξ` by nested quadrature (exact value 1).
pub fn nu1_mass(sp: &ScaledParams, xi: f64) -> Result<f64, MeasuresError> {
    let e = symbol::edge_curves(sp, xi)?;
    let mid = 0.5 * (e.beta + e.gamma);
    let mut f = |x: f64| nu1_density(sp, xi, x).unwrap_or(f64::NAN);
    let left = quad::adaptive_sqrt_lower(&mut f, e.beta, mid, 1e-7)?;
    let right = quad::adaptive_sqrt_upper(&mut f, mid, e.gamma, 1e-7)?;
    Ok(left + right)
}

/// Mass of `ν₂^ξ` by nested quadrature (exact value 1/2).
pub fn nu2_mass(sp: &ScaledParams, xi: f64) -> Result<f64, MeasuresError> {
    let hi = sigma_support_edge(sp);
    let e = symbol::edge_curves(sp, xi)?;
    let cut = e.eta - (2.0 * e.eta.abs()).max(2.0);
    let mut f = |x: f64| nu2_density(sp, xi, x).unwrap_or(f64::NAN);
    let edge = quad::adaptive_sqrt_upper(&mut f, cut, hi, 1e-7)?;
    let tail = quad::adaptive_neg_tail(&mut f, cut, 1e-7)?;
    Ok(edge + tail)
}

// ---------------------------------------------------------------------------
// constraint σ and external field V
// ---------------------------------------------------------------------------

/// Upper end of the support of `σ` (and of `ν₂^ξ`): `-p²t²/(4a)`, which is
/// `0` when `p = 0`.
pub fn sigma_support_edge(sp: &ScaledParams) -> f64 {
    -sp.p * sp.p * sp.t * sp.t / (4.0 * sp.a)
}

/// Closed-form density of the constraint `σ`:
/// `√(4a|x| - p²t²) / (2πt|x|)` below `-p²t²/(4a)`, zero in the gap up to 0.
pub fn sigma_closed(sp: &ScaledParams, x: f64) -> f64 {
    assert!(x <= 0.0, "sigma lives on the negative half line");
    let ScaledParams { a, t, p } = *sp;
    if x == 0.0 {
        return if p == 0.0 { f64::INFINITY } else { 0.0 };
    }
    let radicand = 4.0 * a * x.abs() - p * p * t * t;
    if radicand <= 0.0 {
        return 0.0;
    }
    radicand.sqrt() / (2.0 * PI * t * x.abs())
}

/// `σ` density by quadrature of `μ₂ˢ` over `s ∈ (0, s*(x))`; must agree with
/// [`sigma_closed`] to 1e-6 relative.
pub fn sigma_numeric(sp: &ScaledParams, x: f64) -> Result<f64, MeasuresError> {
    if !(x < sigma_support_edge(sp)) {
        return Err(MeasuresError::OutsideSupport { measure: "sigma", x });
    }
    let s_hi = symbol::s_star_lower(sp, x)?;
    let v = quad::adaptive_sqrt_upper(&mut |s| mu2_density_or_zero(sp, s, x), 0.0, s_hi, 1e-10)?;
    Ok(v)
}

/// Closed-form external field
///
/// ```text
/// V(x) = x/(t(1-t)) - √(p²t² + 4ax)/t - p ln(√(p²t² + 4ax) - pt)
///        + a(1-t)/t + p ln(2a(1-t)),        x ≥ 0,
/// ```
///
/// which reduces to `(√x - √a (1-t))² / (t(1-t))` for `p = 0`. `V(x₀) = 0`.
pub fn v_closed(sp: &ScaledParams, x: f64) -> Result<f64, MeasuresError> {
    if x < 0.0 {
        return Err(MeasuresError::InvalidArgument(format!("V is defined on [0, ∞), got {x}")));
    }
    let ScaledParams { a, t, p } = *sp;
    let root = (p * p * t * t + 4.0 * a * x).sqrt();
    let mut v = x / (t * (1.0 - t)) - root / t + a * (1.0 - t) / t;
    if p > 0.0 {
        v += -p * (root - p * t).ln() + p * (2.0 * a * (1.0 - t)).ln();
    }
    Ok(v)
}

/// Derivative of the closed-form field,
/// `V'(x) = 1/(t(1-t)) - 2a / (t (√(p²t² + 4ax) - pt))`.
pub fn v_prime_closed(sp: &ScaledParams, x: f64) -> f64 {
    let ScaledParams { a, t, p } = *sp;
    let root = (p * p * t * t + 4.0 * a * x).sqrt();
    1.0 / (t * (1.0 - t)) - 2.0 * a / (t * (root - p * t))
}

/// External field by quadrature: `V(x) = ∫₀^{s*(x)} ln|z₁/z₂| ds`.
///
/// The integrand diverges like `-ln s` at the lower endpoint (`z₂ ~ s·z̃₂`
/// with a finite limit for `z₂/s`), so the lowest panel is integrated with
/// the exact `∫ ln s ds` split off; it vanishes like a square root at
/// `s*(x)`, handled by the usual substitution.
pub fn v_numeric(sp: &ScaledParams, x: f64) -> Result<f64, MeasuresError> {
    if !(x > 0.0) {
        return Err(MeasuresError::InvalidArgument(format!("v_numeric needs x > 0, got {x}")));
    }
    let s_star = symbol::s_star_upper(sp, x)?;
    if s_star == 0.0 {
        return Ok(0.0);
    }
    let ratio_ln = |s: f64| -> f64 {
        match symbol::solve_symbol(sp, s, Complex64::new(x, 0.0)) {
            Ok(r) => (r.z1.norm() / r.z2.norm()).ln(),
            Err(_) => f64::NAN,
        }
    };
    let eps = 0.01 * s_star;
    // ∫_0^ε ln|z₁/z₂| ds = ∫_0^ε (ln|z₁/z₂| + ln s) ds - (ε ln ε - ε)
    let low = quad::adaptive(&mut |s: f64| ratio_ln(s) + s.ln(), 0.0, eps, 1e-8)? - (eps * eps.ln() - eps);
    let high = quad::adaptive_sqrt_upper(&mut |s| ratio_ln(s), eps, s_star, 1e-8)?;
    Ok(low + high)
}

// ---------------------------------------------------------------------------
// Marchenko–Pastur limit (a → 0)
// ---------------------------------------------------------------------------

/// Edges `ρ₁(t), ρ₂(t) = t(1-t)(p + 2 ∓ 2√(p+1))` of the `a → 0` limit law.
pub fn mp_edges(t: f64, p: f64) -> (f64, f64) {
    let base = t * (1.0 - t);
    let spread = 2.0 * (p + 1.0).sqrt();
    (base * (p + 2.0 - spread), base * (p + 2.0 + spread))
}

/// Marchenko–Pastur density `√((ρ₂-x)(x-ρ₁)) / (2πt(1-t)x)` on `[ρ₁, ρ₂]`.
pub fn mp_density(t: f64, p: f64, x: f64) -> f64 {
    let (r1, r2) = mp_edges(t, p);
    if x <= r1 || x >= r2 || x <= 0.0 {
        return 0.0;
    }
    ((r2 - x) * (x - r1)).sqrt() / (2.0 * PI * t * (1.0 - t) * x)
}

/// Mass of the Marchenko–Pastur density by substitution quadrature.
pub fn mp_mass(t: f64, p: f64) -> Result<f64, MeasuresError> {
    let (r1, r2) = mp_edges(t, p);
    let mid = 0.5 * (r1 + r2);
    let left = quad::adaptive_sqrt_lower(&mut |x| mp_density(t, p, x), r1, mid, 1e-10)?;
    let right = quad::adaptive_sqrt_upper(&mut |x| mp_density(t, p, x), mid, r2, 1e-10)?;
    Ok(left + right)
}

// ---------------------------------------------------------------------------
// sampled measures
// ---------------------------------------------------------------------------

/// Node clustering at a support endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeRule {
    /// Density is smooth up to the endpoint.
    Smooth,
    /// Density vanishes like a square root: mild clustering.
    SqrtVanish,
    /// Density blows up like an inverse square root: strong clustering, the
    /// endpoint itself excluded, with the sliver mass added analytically.
    InvSqrtBlowup,
}

/// A measure sampled on a finite grid, with per-interval Gauss data so that
/// integrals against it are cheap and accurate.
///
/// Heavy-tailed measures (everything supported on `(-∞, η]`) carry the mass
/// below `support.0` in `tail_mass`, estimated from the `|x|^{-3/2}` decay.
#[derive(Debug, Clone, Serialize)]
pub struct DensityGrid {
    pub support: (f64, f64),
    pub nodes: Vec<f64>,
    pub density: Vec<f64>,
    pub cum_mass: Vec<f64>,
    pub mass: f64,
    pub tail_mass: f64,
    #[serde(skip)]
    pub(crate) gauss_y: Vec<[f64; 4]>,
    #[serde(skip)]
    pub(crate) gauss_w: Vec<[f64; 4]>,
}

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_85,
];

impl DensityGrid {
    /// Builds a grid for a density on `[lo, hi]`. `tail` adds a `(-∞, lo]`
    /// extension for `|x|^{-3/2}` tails.
    pub fn build(
        f: &mut dyn FnMut(f64) -> f64,
        lo: f64,
        hi: f64,
        lo_edge: EdgeRule,
        hi_edge: EdgeRule,
        points_per_half: usize,
        tail: bool,
    ) -> Result<Self, MeasuresError> {
        assert!(hi > lo);
        let n = points_per_half.max(24);
        let mid = 0.5 * (lo + hi);
        let half = mid - lo;

        let power = |rule: EdgeRule| match rule {
            EdgeRule::Smooth => 1.0,
            EdgeRule::SqrtVanish => 2.0,
            EdgeRule::InvSqrtBlowup => 6.0,
        };
        let (qlo, qhi) = (power(lo_edge), power(hi_edge));

        let mut nodes: Vec<f64> = Vec::with_capacity(2 * n + 1);
        let lo_start = if lo_edge == EdgeRule::InvSqrtBlowup { 1 } else { 0 };
        for j in lo_start..=n {
            nodes.push(lo + half * (j as f64 / n as f64).powf(qlo));
        }
        let hi_end = if hi_edge == EdgeRule::InvSqrtBlowup { 1 } else { 0 };
        for j in (hi_end..n).rev() {
            nodes.push(hi - half * (j as f64 / n as f64).powf(qhi));
        }
        nodes.dedup_by(|a, b| *a <= *b);

        let mut all_nodes: Vec<f64> = Vec::new();
        if tail {
            assert!(lo < 0.0, "tail extension requires a negative lower endpoint");
            let far = -(1e10f64).max(1e3 * lo.abs());
            let w_far = 1.0 / (-far).sqrt();
            let w_lo = 1.0 / (-lo).sqrt();
            let m = 160usize;
            for i in 0..m {
                let w = w_far + (w_lo - w_far) * i as f64 / m as f64;
                all_nodes.push(-1.0 / (w * w));
            }
        }
        all_nodes.extend_from_slice(&nodes);

        let density: Vec<f64> = all_nodes.iter().map(|&x| f(x)).collect();
        if density.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MeasuresError::InvalidArgument(
                "density evaluation produced a negative or non-finite value".into(),
            ));
        }

        let m = all_nodes.len() - 1;
        let mut gauss_y = Vec::with_capacity(m);
        let mut gauss_w = Vec::with_capacity(m);
        let mut interval_mass = Vec::with_capacity(m);
        for i in 0..m {
            let (xa, xb) = (all_nodes[i], all_nodes[i + 1]);
            let (c, h) = (0.5 * (xa + xb), 0.5 * (xb - xa));
            let mut ys = [0.0f64; 4];
            let mut ws = [0.0f64; 4];
            let mut mass = 0.0;
            for g in 0..4 {
                let y = c + h * GL4_X[g];
                let w = h * GL4_W[g] * f(y);
                ys[g] = y;
                ws[g] = w;
                mass += w;
            }
            gauss_y.push(ys);
            gauss_w.push(ws);
            interval_mass.push(mass);
        }

        // analytic corrections: |x|^{-3/2} mass below the far node, slivers
        // at excluded blow-up endpoints
        let mut below_first = 0.0;
        if tail {
            let x_far = all_nodes[0];
            below_first += 2.0 * f(x_far) * x_far.abs();
        } else if lo_edge == EdgeRule::InvSqrtBlowup {
            let x0 = all_nodes[0];
            below_first += 2.0 * f(x0) * (x0 - lo);
        }
        let sliver_hi = if hi_edge == EdgeRule::InvSqrtBlowup {
            let xn = *all_nodes.last().unwrap();
            2.0 * f(xn) * (hi - xn)
        } else {
            0.0
        };

        let mut cum = Vec::with_capacity(all_nodes.len());
        let mut acc = below_first;
        cum.push(acc);
        for im in &interval_mass {
            acc += im;
            cum.push(acc);
        }
        let mass = acc + sliver_hi;

        Ok(Self {
            support: (*all_nodes.first().unwrap(), hi),
            nodes: all_nodes,
            density,
            cum_mass: cum,
            mass,
            tail_mass: below_first,
            gauss_y,
            gauss_w,
        })
    }

    /// `∫ g dν` over the sampled measure.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (ys, ws) in self.gauss_y.iter().zip(self.gauss_w.iter()) {
            for k in 0..4 {
                acc += ws[k] * g(ys[k]);
            }
        }
        if self.tail_mass > 0.0 {
            acc += self.tail_mass * g(2.0 * self.support.0.min(-1.0));
        }
        let sliver = self.mass - self.cum_mass.last().unwrap();
        if sliver > 0.0 {
            acc += sliver * g(self.support.1);
        }
        acc
    }

    /// Interpolated CDF at `x` (clamped outside the grid).
    pub fn cdf(&self, x: f64) -> f64 {
        match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => self.cum_mass[i],
            Err(0) => 0.0,
            Err(i) if i >= self.nodes.len() => self.mass,
            Err(i) => {
                let (xa, xb) = (self.nodes[i - 1], self.nodes[i]);
                let frac = (x - xa) / (xb - xa);
                self.cum_mass[i - 1] + frac * (self.cum_mass[i] - self.cum_mass[i - 1])
            }
        }
    }
}

fn beta_edge_rule(beta: f64) -> EdgeRule {
    if beta <= 1e-12 {
        EdgeRule::InvSqrtBlowup
    } else {
        EdgeRule::SqrtVanish
    }
}

/// Sampled `μ₁ˢ` on `Γ₁(s)`.
pub fn grid_mu1(sp: &ScaledParams, s: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    DensityGrid::build(
        &mut |x| mu1_density_or_zero(sp, s, x),
        e.beta,
        e.gamma,
        beta_edge_rule(e.beta),
        EdgeRule::SqrtVanish,
        points,
        false,
    )
}

/// Sampled `μ₂ˢ` on `(-∞, η(s)]`.
pub fn grid_mu2(sp: &ScaledParams, s: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let e = symbol::edge_curves(sp, s)?;
    let cut = e.eta - (2.0 * e.eta.abs()).max(2.0);
    let hi_rule = if e.eta == 0.0 { EdgeRule::InvSqrtBlowup } else { EdgeRule::SqrtVanish };
    DensityGrid::build(&mut |x| mu2_density_or_zero(sp, s, x), cut, e.eta, EdgeRule::Smooth, hi_rule, points, true)
}

/// Sampled `ν₁^ξ` on `Γ₁(ξ)`.
pub fn grid_nu1(sp: &ScaledParams, xi: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let e = symbol::edge_curves(sp, xi)?;
    DensityGrid::build(
        &mut |x| nu1_density(sp, xi, x).unwrap_or(f64::NAN),
        e.beta,
        e.gamma,
        beta_edge_rule(e.beta),
        EdgeRule::SqrtVanish,
        points,
        false,
    )
}

/// Sampled `ν₂^ξ` on `(-∞, -p²t²/4a]`.
pub fn grid_nu2(sp: &ScaledParams, xi: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let hi = sigma_support_edge(sp);
    let e = symbol::edge_curves(sp, xi)?;
    let cut = e.eta - (2.0 * e.eta.abs()).max(2.0);
    let hi_rule = if sp.p == 0.0 { EdgeRule::InvSqrtBlowup } else { EdgeRule::SqrtVanish };
    DensityGrid::build(
        &mut |x| nu2_density(sp, xi, x).unwrap_or(f64::NAN),
        cut,
        hi,
        EdgeRule::Smooth,
        hi_rule,
        points,
        true,
    )
}

/// Sampled constraint `σ` truncated at `lo`.
pub fn grid_sigma(sp: &ScaledParams, lo: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let hi = sigma_support_edge(sp);
    assert!(lo < hi);
    let hi_rule = if sp.p == 0.0 { EdgeRule::InvSqrtBlowup } else { EdgeRule::SqrtVanish };
    DensityGrid::build(&mut |x| sigma_closed(sp, x), lo, hi, EdgeRule::Smooth, hi_rule, points, true)
}

/// Sampled Marchenko–Pastur density.
pub fn grid_mp(t: f64, p: f64, points: usize) -> Result<DensityGrid, MeasuresError> {
    let (r1, r2) = mp_edges(t, p);
    let lo_rule = if p == 0.0 { EdgeRule::InvSqrtBlowup } else { EdgeRule::SqrtVanish };
    DensityGrid::build(&mut |x| mp_density(t, p, x), r1, r2, lo_rule, EdgeRule::SqrtVanish, points, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sp(a: f64, t: f64, p: f64) -> ScaledParams {
        ScaledParams::new(a, t, p).unwrap()
    }

    const SETS: [(f64, f64, f64); 3] = [(1.0, 0.2, 0.0), (1.0, 0.9, 0.0), (1.0, 0.3, 5.0)];

    #[test]
    fn mu_masses_normalise() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            for s in [0.5, 1.0, 2.0] {
                assert_abs_diff_eq!(mu1_mass(&params, s).unwrap(), 1.0, epsilon = 1e-5);
                assert_abs_diff_eq!(mu2_mass(&params, s).unwrap(), 0.5, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn mu_cdfs_match_density_quadrature() {
        let params = sp(1.0, 0.2, 0.0);
        let s = 1.0;
        let e = symbol::edge_curves(&params, s).unwrap();
        for frac in [0.15, 0.4, 0.8] {
            let x = e.beta + frac * (e.gamma - e.beta);
            let by_quad =
                quad::adaptive_sqrt_lower(&mut |y| mu1_density_or_zero(&params, s, y), e.beta, x, 1e-10).unwrap();
            assert_abs_diff_eq!(mu1_cdf(&params, s, x).unwrap(), by_quad, epsilon = 1e-7);
        }
        // μ₂ on a point inside the support
        let params = sp(1.0, 0.9, 0.0);
        let e = symbol::edge_curves(&params, 1.0).unwrap();
        let x = e.eta - 0.7;
        let by_quad = mu2_mass(&params, 1.0).unwrap()
            - quad::adaptive_sqrt_upper(&mut |y| mu2_density_or_zero(&params, 1.0, y), x, e.eta, 1e-10).unwrap();
        assert_abs_diff_eq!(mu2_cdf(&params, 1.0, x).unwrap(), by_quad, epsilon = 1e-6);
    }

    #[test]
    fn stieltjes_identity_off_support() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            for s in [0.5, 1.0, 2.0] {
                let e = symbol::edge_curves(&params, s).unwrap();
                let mut points = vec![
                    2.0 * e.gamma,
                    1.2 * e.gamma,
                    e.gamma + 1.0,
                    5.0 * e.gamma,
                    e.eta - 0.5,
                    e.eta - 2.0,
                ];
                if e.beta > 1e-6 {
                    points.push(0.5 * e.beta);
                    points.push(0.25 * e.beta);
                }
                for x in points {
                    let lhs = stieltjes_mu1(&params, s, x).unwrap();
                    let rhs = stieltjes_mu1_reference(&params, s, x).unwrap();
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-6, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn stieltjes_far_field_unit_mass() {
        let params = sp(1.0, 0.2, 0.0);
        let x = 1e5;
        let v = stieltjes_mu1_reference(&params, 1.0, x).unwrap();
        assert_relative_eq!(v, 1.0 / x, max_relative = 1e-3);
    }

    #[test]
    fn mu2_edge_exponent_is_half() {
        // density → 0 like √(η - x): log-log slope 0.5 ± 0.05
        let params = sp(1.0, 0.9, 0.0);
        let e = symbol::edge_curves(&params, 1.0).unwrap();
        let mut logs = Vec::new();
        for &d in &[1e-6, 1e-5, 1e-4, 1e-3] {
            let rho = mu2_density(&params, 1.0, e.eta - d).unwrap();
            logs.push((d.ln(), rho.ln()));
        }
        let slope = (logs[3].1 - logs[0].1) / (logs[3].0 - logs[0].0);
        assert!((slope - 0.5).abs() <= 0.05, "edge exponent {slope}");
    }

    #[test]
    fn nu_masses_normalise() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            for xi in [0.5, 1.0, 2.0] {
                assert_abs_diff_eq!(nu1_mass(&params, xi).unwrap(), 1.0, epsilon = 1e-5);
                assert_abs_diff_eq!(nu2_mass(&params, xi).unwrap(), 0.5, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn nu1_zero_off_support() {
        let params = sp(1.0, 0.2, 0.0);
        let e = symbol::edge_curves(&params, 1.0).unwrap();
        assert_eq!(nu1_density(&params, 1.0, e.gamma + 0.1).unwrap(), 0.0);
        assert_eq!(nu1_density(&params, 1.0, e.beta - 0.01).unwrap(), 0.0);
    }

    #[test]
    fn nu1_hard_edge_blowup_exponent() {
        // p = 0, t = 0.9 > t*: density ~ C x^{-1/2} as x → 0⁺
        let params = sp(1.0, 0.9, 0.0);
        let mut logs = Vec::new();
        for &x in &[1e-6, 1e-5, 1e-4] {
            let rho = nu1_density(&params, 1.0, x).unwrap();
            logs.push((x.ln(), rho.ln()));
        }
        let slope = (logs[2].1 - logs[0].1) / (logs[2].0 - logs[0].0);
        assert!((slope + 0.5).abs() <= 0.05, "hard-edge exponent {slope}");
    }

    #[test]
    fn nu1_cdf_matches_density_quadrature() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let e = symbol::edge_curves(&params, 1.0).unwrap();
            for frac in [0.2, 0.5, 0.9] {
                let x = e.beta + frac * (e.gamma - e.beta);
                // outer tolerance sits well above the inner quadrature noise
                let by_quad = quad::adaptive_sqrt_lower(
                    &mut |y| nu1_density(&params, 1.0, y).unwrap_or(f64::NAN),
                    e.beta,
                    x,
                    3e-7,
                )
                .unwrap();
                let exact = nu1_cdf(&params, 1.0, x).unwrap();
                assert_abs_diff_eq!(exact, by_quad, epsilon = 1e-5);
            }
            assert_eq!(nu1_cdf(&params, 1.0, e.beta - 1e-6).unwrap(), 0.0);
            assert_eq!(nu1_cdf(&params, 1.0, e.gamma + 1e-6).unwrap(), 1.0);
        }
    }

    #[test]
    fn sigma_closed_examples() {
        let params = sp(1.0, 0.2, 0.0);
        assert_relative_eq!(sigma_closed(&params, -1.0), 1.0 / (0.2 * PI), epsilon = 1e-14);
        let pp = sp(1.0, 0.3, 5.0);
        assert_eq!(sigma_closed(&pp, sigma_support_edge(&pp)), 0.0);
        assert_eq!(sigma_closed(&pp, -0.1), 0.0); // inside the gap
    }

    #[test]
    fn sigma_numeric_matches_closed_form() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let edge = sigma_support_edge(&params);
            let eta3 = symbol::edge_curves(&params, 3.0).unwrap().eta;
            let lo = eta3.min(edge - 2.0 * params.a);
            let margin = 0.02 * (edge - lo).abs();
            for i in 0..50 {
                let x = lo + (edge - margin - lo) * i as f64 / 49.0;
                let num = sigma_numeric(&params, x).unwrap();
                let clo = sigma_closed(&params, x);
                assert_relative_eq!(num, clo, max_relative = 1e-6);
            }
            assert!(sigma_numeric(&params, edge + 0.1).is_err());
        }
    }

    #[test]
    fn v_closed_examples() {
        let params = sp(1.0, 0.2, 0.0);
        assert_relative_eq!(v_closed(&params, 1.0).unwrap(), 0.25, epsilon = 1e-14);
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let x0 = params.x0();
            assert_abs_diff_eq!(v_closed(&params, x0).unwrap(), 0.0, epsilon = 1e-13);
            // V ≥ 0 with the unique zero at x₀: V' changes sign there
            assert!(v_prime_closed(&params, 0.5 * x0) < 0.0);
            assert!(v_prime_closed(&params, 2.0 * x0) > 0.0);
            for i in 1..=40 {
                let x = 3.0 * x0 * i as f64 / 40.0;
                assert!(v_closed(&params, x).unwrap() >= -1e-12);
            }
        }
        assert!(v_closed(&sp(1.0, 0.2, 0.0), -0.5).is_err());
    }

    #[test]
    fn v_numeric_matches_closed_form() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let gamma1 = symbol::edge_curves(&params, 1.0).unwrap().gamma;
            for i in 1..=25 {
                let x = 2.0 * gamma1 * i as f64 / 25.0;
                let num = v_numeric(&params, x).unwrap();
                let clo = v_closed(&params, x).unwrap();
                assert_abs_diff_eq!(num, clo, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn v_numeric_at_x0_is_zero() {
        let params = sp(1.0, 0.3, 5.0);
        assert_eq!(v_numeric(&params, params.x0()).unwrap(), 0.0);
    }

    #[test]
    fn mp_examples() {
        let (r1, r2) = mp_edges(0.2, 0.0);
        assert_eq!(r1, 0.0);
        assert_relative_eq!(r2, 4.0 * 0.2 * 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(mp_mass(0.2, 0.0).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(mp_mass(0.3, 5.0).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn mp_is_small_a_limit_of_edges() {
        for &(t, p) in &[(0.2, 0.0), (0.3, 5.0)] {
            let params = sp(1e-6, t, p);
            let e = symbol::edge_curves(&params, 1.0).unwrap();
            let (r1, r2) = mp_edges(t, p);
            assert_abs_diff_eq!(e.beta, r1, epsilon = 1e-2);
            assert_abs_diff_eq!(e.gamma, r2, epsilon = 1e-2);
        }
    }

    #[test]
    fn nu2_respects_sigma_constraint() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let xi = 1.0;
            let edge = sigma_support_edge(&params);
            let eta_xi = symbol::edge_curves(&params, xi).unwrap().eta;
            for i in 1..=100 {
                let x = edge - 0.08 * i as f64;
                let nu = xi * nu2_density(&params, xi, x).unwrap();
                let sig = sigma_closed(&params, x);
                assert!(nu <= sig * (1.0 + 1e-6) + 1e-12, "constraint violated at {x}: {nu} > {sig}");
                if x > eta_xi {
                    // equality region: supp(σ - ξν₂) = Γ₂(ξ)
                    assert_relative_eq!(nu, sig, max_relative = 1e-6, epsilon = 1e-10);
                } else if x < eta_xi - 0.1 {
                    assert!(nu < sig, "σ - ξν₂ should be positive below η(ξ)");
                }
            }
        }
    }

    #[test]
    fn grids_are_consistent() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let g1 = grid_mu1(&params, 1.0, 240).unwrap();
            assert_abs_diff_eq!(g1.mass, 1.0, epsilon = 2e-6);
            assert!(g1.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(g1.density.iter().all(|&d| d >= 0.0));

            let g2 = grid_mu2(&params, 1.0, 240).unwrap();
            assert_abs_diff_eq!(g2.mass, 0.5, epsilon = 2e-6);

            // ∫ 1 dν through the Gauss data reproduces the mass
            assert_abs_diff_eq!(g1.integrate(|_| 1.0), g1.mass, epsilon = 1e-12);
            assert_abs_diff_eq!(g2.integrate(|_| 1.0), g2.mass, epsilon = 1e-12);

            // first moment against direct quadrature
            let e = symbol::edge_curves(&params, 1.0).unwrap();
            let mid = 0.5 * (e.beta + e.gamma);
            let m1 = quad::adaptive_sqrt_lower(&mut |x| x * mu1_density_or_zero(&params, 1.0, x), e.beta, mid, 1e-9)
                .unwrap()
                + quad::adaptive_sqrt_upper(&mut |x| x * mu1_density_or_zero(&params, 1.0, x), mid, e.gamma, 1e-9)
                    .unwrap();
            assert_abs_diff_eq!(g1.integrate(|x| x), m1, epsilon = 1e-5);
        }
    }

    #[test]
    fn nu_grids_normalise() {
        for &(a, t, p) in &SETS {
            let params = sp(a, t, p);
            let g1 = grid_nu1(&params, 1.0, 220).unwrap();
            assert_abs_diff_eq!(g1.mass, 1.0, epsilon = 1e-5);
            let g2 = grid_nu2(&params, 1.0, 220).unwrap();
            assert_abs_diff_eq!(g2.mass, 0.5, epsilon = 1e-5);
        }
    }
}
