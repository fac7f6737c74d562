//! Closed-form cubic solvers.
//!
//! Monic cubics with real coefficients are solved by a discriminant-aware
//! branch: the trigonometric form when all three roots are real, a
//! cancellation-free Cardano form otherwise. Every root gets one Newton
//! polish step on the original cubic. A complex-coefficient variant backs
//! symbol-equation solves at non-real arguments.

use num_complex::Complex64;

/// Roots of a monic real cubic `z³ + a2 z² + a1 z + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots in ascending order.
    ThreeReal([f64; 3]),
    /// One real root and a conjugate pair; `pair` is the member with
    /// positive imaginary part.
    OneRealPair { real: f64, pair: Complex64 },
}

fn horner(a2: f64, a1: f64, a0: f64, z: f64) -> (f64, f64) {
    let p = ((z + a2) * z + a1) * z + a0;
    let dp = (3.0 * z + 2.0 * a2) * z + a1;
    (p, dp)
}

fn polish_real(a2: f64, a1: f64, a0: f64, mut z: f64) -> f64 {
    for _ in 0..2 {
        let (p, dp) = horner(a2, a1, a0, z);
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() || step.abs() > 1e-2 * (1.0 + z.abs()) {
            break;
        }
        z -= step;
    }
    z
}

fn polish_complex(a2: Complex64, a1: Complex64, a0: Complex64, mut z: Complex64) -> Complex64 {
    for _ in 0..2 {
        let p = ((z + a2) * z + a1) * z + a0;
        let dp = (3.0 * z + 2.0 * a2) * z + a1;
        if dp.norm_sqr() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() || step.norm() > 1e-2 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    z
}

/// Solves the monic cubic `z³ + a2 z² + a1 z + a0 = 0` with real coefficients.
pub fn solve_cubic_real(a2: f64, a1: f64, a0: f64) -> CubicRoots {
    // dominant-root regime: the depressed-cubic intermediates (~a2³) would
    // overflow, but one root is -a2 + a1/a2 + O(a2^-3) and the other two
    // solve the deflated quadratic z² + (a1/a2) z + a0/a2 = 0 by Vieta
    if a2.abs() > 1e50 * (1.0 + a1.abs().sqrt() + a0.abs().cbrt()) {
        let big = -a2 + a1 / a2;
        let b = a1 / a2;
        let c = a0 / a2;
        let disc = b * b - 4.0 * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (b + sq.copysign(b));
            let (r1, r2) = if q != 0.0 { (q, c / q) } else { (0.0, 0.0) };
            let mut roots = [big, r1, r2];
            roots.sort_by(f64::total_cmp);
            return CubicRoots::ThreeReal(roots);
        }
        return CubicRoots::OneRealPair {
            real: big,
            pair: Complex64::new(-0.5 * b, (-disc).sqrt() * 0.5),
        };
    }

    // depressed form t³ + p t + q with z = t - a2/3
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = a0 - a2 * a1 / 3.0 + 2.0 * a2 * a2 * a2 / 27.0;

    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    if disc <= 0.0 {
        // three real roots: trigonometric form (p < 0 here up to rounding)
        let m = (-third_p).max(0.0).sqrt();
        let cos_arg = if m > 0.0 { (half_q / (m * m * m)).clamp(-1.0, 1.0) } else { 1.0 };
        let theta = cos_arg.acos() / 3.0;
        let mut roots = [0.0f64; 3];
        for (k, r) in roots.iter_mut().enumerate() {
            let angle = theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            // t = -2m cos(angle) solves t³ - 3m²t + 2m³cos(3θ) = 0
            *r = polish_real(a2, a1, a0, -2.0 * m * angle.cos() - shift);
        }
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        CubicRoots::ThreeReal(roots)
    } else {
        // one real root; pick the cube root branch avoiding cancellation
        let s = disc.sqrt();
        let u = if half_q >= 0.0 { -(half_q + s).cbrt() } else { (-half_q + s).cbrt() };
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        let real = polish_real(a2, a1, a0, u + v - shift);
        // remaining quadratic by deflation: z² + (a2 + real) z - a0/real
        let b = a2 + real;
        let re = -0.5 * b;
        let im_sq = (a1 + real * b) - re * re;
        let im = im_sq.max(0.0).sqrt();
        let pair = polish_complex(
            Complex64::new(a2, 0.0),
            Complex64::new(a1, 0.0),
            Complex64::new(a0, 0.0),
            Complex64::new(re, im),
        );
        let pair = if pair.im < 0.0 { pair.conj() } else { pair };
        CubicRoots::OneRealPair { real, pair }
    }
}

/// Solves the monic cubic with complex coefficients by Cardano's formula in
/// complex arithmetic plus Newton polish.
pub fn solve_cubic_complex(a2: Complex64, a1: Complex64, a0: Complex64) -> [Complex64; 3] {
    let third: f64 = 1.0 / 3.0;
    let shift = a2 * third;
    let p = a1 - a2 * a2 * third;
    let q = a0 - a2 * a1 * third + a2 * a2 * a2 * (2.0 / 27.0);

    let half_q = q * 0.5;
    let third_p = p * third;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let s = disc.sqrt();

    // choose the branch with the larger |−q/2 ± s| to avoid cancellation
    let c1 = -half_q + s;
    let c2 = -half_q - s;
    let c = if c1.norm_sqr() >= c2.norm_sqr() { c1 } else { c2 };
    let u = c.powf(third);

    let omega = Complex64::new(-0.5, 0.5 * 3.0f64.sqrt());
    let mut roots = [Complex64::default(); 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(k as u32);
        let t = if uk.norm_sqr() > 0.0 { uk - third_p / uk } else { uk };
        *r = polish_complex(a2, a1, a0, t - shift);
    }
    roots
}
