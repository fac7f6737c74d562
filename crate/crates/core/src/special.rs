//! Modified Bessel functions of the first kind `I_ν` for real order `ν > -1`
//! and nonnegative argument.
//!
//! The ascending power series (with compensated summation) is used for
//! arguments up to the crossover at `z = 30`; beyond that the large-argument
//! asymptotic expansion takes over. Both branches target a relative accuracy
//! of `1e-12` and an error is raised when the asymptotic series cannot reach
//! that before its terms start diverging (very large orders at moderate
//! arguments).

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Crossover argument between the power series and the asymptotic expansion.
pub const SERIES_ASYMPTOTIC_SWITCH: f64 = 30.0;

const TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpecialError {
    #[error("modified Bessel order must exceed -1, got {nu}")]
    InvalidOrder { nu: f64 },
    #[error("modified Bessel argument must be nonnegative, got {z}")]
    InvalidArgument { z: f64 },
    #[error("asymptotic expansion for I_{nu}({z}) stalls at relative term {best:e} (target 1e-12)")]
    NoConvergence { nu: f64, z: f64, best: f64 },
}

/// `ln I_ν(z)` for `ν > -1`, `z ≥ 0`.
pub fn ln_bessel_i(nu: f64, z: f64) -> Result<f64, SpecialError> {
    if !(nu > -1.0) {
        return Err(SpecialError::InvalidOrder { nu });
    }
    if !(z >= 0.0) {
        return Err(SpecialError::InvalidArgument { z });
    }
    if z == 0.0 {
        // I_0(0) = 1, I_ν(0) = 0 for ν > 0, divergent for ν ∈ (-1, 0)
        return Ok(if nu == 0.0 {
            0.0
        } else if nu > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
    }
    if z <= SERIES_ASYMPTOTIC_SWITCH {
        Ok(ln_series(nu, z))
    } else {
        ln_asymptotic(nu, z)
    }
}

/// `I_ν(z)` in natural scale; overflows to `+∞` for very large arguments.
pub fn bessel_i(nu: f64, z: f64) -> Result<f64, SpecialError> {
    ln_bessel_i(nu, z).map(f64::exp)
}

/// Ascending series                       Σ_k (z/2)^{2k+ν} / (k! Γ(k+ν+1)),
/// summed in natural scale relative to the leading factor, with Kahan
/// compensation.
fn ln_series(nu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let ln_lead = nu * half.ln() - ln_gamma(nu + 1.0);
    // term ratio t_{k+1}/t_k = (z/2)² / ((k+1)(k+ν+1))
    let q = half * half;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for k in 0..400 {
        term *= q / ((k as f64 + 1.0) * (k as f64 + nu + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term < TOL * 1e-4 * sum {
            break;
        }
    }
    ln_lead + sum.ln()
}

/// Large-argument expansion `I_ν(z) ~ e^z/√(2πz) · Σ_k (-1)^k a_k(ν)/z^k`
/// with `a_k = Π_{j=1..k} (4ν² - (2j-1)²) / (k! 8^k)`.
fn ln_asymptotic(nu: f64, z: f64) -> Result<f64, SpecialError> {
    let four_nu_sq = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut best = f64::INFINITY;
    let mut converged = false;
    for k in 1..60 {
        let j = (2 * k - 1) as f64;
        term *= -(four_nu_sq - j * j) / (8.0 * k as f64 * z);
        let rel = term.abs() / sum.abs().max(1e-300);
        if rel >= best {
            // asymptotic series started diverging before reaching tolerance
            break;
        }
        best = rel;
        sum += term;
        if rel < TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecialError::NoConvergence { nu, z, best });
    }
    Ok(z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + sum.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num::{BigRational, FromPrimitive, ToPrimitive};

    #[test]
    fn i0_at_one_matches_rational_series() {
        // independent oracle: 40 series terms of I_0(1) in exact arithmetic
        let mut sum = BigRational::from_u8(0).unwrap();
        let mut term = BigRational::from_u8(1).unwrap();
        for k in 0..40u32 {
            if k > 0 {
                let k_big = BigRational::from_u32(4 * k * k).unwrap();
                term /= k_big; // divide by (2k)²·... built up as 4k²
            }
            sum += term.clone();
        }
        let oracle = sum.to_f64().unwrap();
        assert_relative_eq!(oracle, 1.2660658777520084, epsilon = 1e-15);
        assert_relative_eq!(bessel_i(0.0, 1.0).unwrap(), oracle, epsilon = 1e-13);
    }

    #[test]
    fn small_argument_leading_term() {
        // I_ν(z) ~ (z/2)^ν / Γ(ν+1) as z → 0⁺
        for nu in [0.0, 0.5, 2.0, 3.5] {
            let z = 1e-6;
            let lead = (z / 2.0f64).powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
            assert_relative_eq!(bessel_i(nu, z).unwrap(), lead, max_relative = 1e-10);
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        // the two regimes must blend to within 1e-12 at the crossover
        for nu in [0.0, 1.0, 2.5, 5.0] {
            let s = ln_series(nu, SERIES_ASYMPTOTIC_SWITCH);
            let a = ln_asymptotic(nu, SERIES_ASYMPTOTIC_SWITCH).unwrap();
            assert_relative_eq!(s, a, epsilon = 1e-12);
        }
    }

    #[test]
    fn positive_on_samples() {
        for nu in [0.0, 0.3, 1.0, 4.0] {
            for &z in &[0.01, 0.5, 3.0, 20.0, 50.0, 200.0] {
                assert!(ln_bessel_i(nu, z).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn huge_order_signals_nonconvergence() {
        assert!(matches!(
            ln_bessel_i(250.0, 40.0),
            Err(SpecialError::NoConvergence { .. })
        ));
    }

    #[test]
    fn known_values() {
        // Abramowitz & Stegun style reference points
        assert_relative_eq!(bessel_i(1.0, 1.0).unwrap(), 0.5651591039924851, epsilon = 1e-12);
        assert_relative_eq!(bessel_i(0.0, 2.0).unwrap(), 2.2795853023360673, epsilon = 1e-12);
        assert_relative_eq!(
            ln_bessel_i(0.0, 100.0).unwrap(),
            // ln(e^100/√(200π) · (1 + 1/800 + ...))
            100.0 - 0.5 * (200.0 * std::f64::consts::PI).ln() + (1.0f64 + 1.0 / 800.0 + 4.5 / 640_000.0).ln(),
            epsilon = 1e-7
        );
    }
}
