//! Acceptance suite: one runner per criterion, each returning a pass/fail
//! outcome with measured values, shared by the CLI `accept` subcommand and
//! the `acceptance` integration test target.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::equilibrium;
use crate::measures;
use crate::model::{self, FiniteParams, ScaledParams, ScaledCoeffs, Weight};
use crate::polyzeros::{self, EmpiricalMeasure};
use crate::sim::{self, SimConfig};
use crate::symbol;

/// The three canonical parameter sets `(a, t, p)`.
pub const PARAM_SETS: [(f64, f64, f64); 3] = [(1.0, 0.2, 0.0), (1.0, 0.9, 0.0), (1.0, 0.3, 5.0)];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

fn params(set: (f64, f64, f64)) -> ScaledParams {
    ScaledParams::new(set.0, set.1, set.2).expect("canonical parameter sets are valid")
}

type CheckResult = Result<(bool, String), String>;

fn run_check(id: usize, name: &'static str, budget_secs: f64, f: impl FnOnce() -> CheckResult) -> CriterionOutcome {
    let start = Instant::now();
    let (mut passed, mut detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    if seconds > budget_secs {
        passed = false;
        detail = format!("{detail}; runtime {seconds:.1}s exceeded budget {budget_secs}s");
    }
    CriterionOutcome { id, name, passed, seconds, detail }
}

/// 1. `max |V_closed - V_numeric| ≤ 1e-6` over 50 points of `(0, 2γ(1)]`.
pub fn c01_field_closed_vs_numeric() -> CriterionOutcome {
    run_check(1, "external field V: closed form vs quadrature", 30.0, || {
        let mut worst = 0.0f64;
        for set in PARAM_SETS {
            let sp = params(set);
            let gamma1 = symbol::edge_curves(&sp, 1.0).map_err(|e| e.to_string())?.gamma;
            for i in 1..=50 {
                let x = 2.0 * gamma1 * i as f64 / 50.0;
                let num = measures::v_numeric(&sp, x).map_err(|e| e.to_string())?;
                let clo = measures::v_closed(&sp, x).map_err(|e| e.to_string())?;
                worst = worst.max((num - clo).abs());
            }
        }
        Ok((worst <= 1e-6, format!("max |V_closed - V_numeric| = {worst:.3e} (tol 1e-6)")))
    })
}

/// 2. `σ` closed form vs quadrature to 1e-6 relative over 50 points.
pub fn c02_sigma_closed_vs_numeric() -> CriterionOutcome {
    run_check(2, "constraint sigma: closed form vs quadrature", 30.0, || {
        let mut worst = 0.0f64;
        for set in PARAM_SETS {
            let sp = params(set);
            let edge = measures::sigma_support_edge(&sp);
            let eta3 = symbol::edge_curves(&sp, 3.0).map_err(|e| e.to_string())?.eta;
            let lo = eta3.min(edge - 2.0 * sp.a);
            let margin = 0.02 * (edge - lo).abs();
            for i in 0..50 {
                let x = lo + (edge - margin - lo) * i as f64 / 49.0;
                let num = measures::sigma_numeric(&sp, x).map_err(|e| e.to_string())?;
                let clo = measures::sigma_closed(&sp, x);
                worst = worst.max((num - clo).abs() / clo);
            }
        }
        Ok((worst <= 1e-6, format!("max relative error = {worst:.3e} (tol 1e-6)")))
    })
}

/// 3. `edge_curves(s=1)` agrees with the degree-3 boundary equation roots to
/// 1e-9; at `(1, 0.5, 0)` the hard edge has exactly arrived: `β(1) = 0`.
pub fn c03_edge_cross_oracle() -> CriterionOutcome {
    run_check(3, "edge curves vs boundary cubic", 1.0, || {
        let mut worst = 0.0f64;
        let mut cases: Vec<ScaledParams> = PARAM_SETS.iter().map(|&s| params(s)).collect();
        for i in 1..=9 {
            cases.push(params((1.0, i as f64 / 10.0, 0.0)));
        }
        for sp in &cases {
            let (beta_c, gamma_c) = symbol::boundary_cubic(sp).map_err(|e| e.to_string())?;
            let e = symbol::edge_curves(sp, 1.0).map_err(|e| e.to_string())?;
            worst = worst.max((beta_c - e.beta).abs()).max((gamma_c - e.gamma).abs());
        }
        // degenerate point t = t* = 1/2: the x = 0 root is double
        let degenerate = params((1.0, 0.5, 0.0));
        let (beta_d, gamma_d) = symbol::boundary_cubic(&degenerate).map_err(|e| e.to_string())?;
        let e_d = symbol::edge_curves(&degenerate, 1.0).map_err(|e| e.to_string())?;
        let ok = worst <= 1e-9
            && beta_d.abs() <= 1e-9
            && (gamma_d - e_d.gamma).abs() <= 1e-9
            && (e_d.gamma - 1.6875).abs() <= 1e-12;
        Ok((ok, format!(
            "max |edges - cubic roots| = {worst:.3e} (tol 1e-9); at t = 1/2: (beta, gamma) = ({beta_d:.3e}, {gamma_d})"
        )))
    })
}

/// 4. Mass normalisations `∫μ₁ˢ = 1`, `∫μ₂ˢ = 1/2`, `∫ν₁^ξ = 1`,
/// `∫ν₂^ξ = 1/2` to 1e-5 at `s, ξ ∈ {0.5, 1, 2}`.
pub fn c04_mass_normalisations() -> CriterionOutcome {
    run_check(4, "mass normalisations", 120.0, || {
        let mut worst = 0.0f64;
        for set in PARAM_SETS {
            let sp = params(set);
            for v in [0.5, 1.0, 2.0] {
                worst = worst.max((measures::mu1_mass(&sp, v).map_err(|e| e.to_string())? - 1.0).abs());
                worst = worst.max((measures::mu2_mass(&sp, v).map_err(|e| e.to_string())? - 0.5).abs());
                worst = worst.max((measures::nu1_mass(&sp, v).map_err(|e| e.to_string())? - 1.0).abs());
                worst = worst.max((measures::nu2_mass(&sp, v).map_err(|e| e.to_string())? - 0.5).abs());
            }
        }
        Ok((worst <= 1e-5, format!("max mass deviation = {worst:.3e} (tol 1e-5)")))
    })
}

/// 5. Stieltjes identity `∫ dμ₁ˢ(y)/(x-y) = 1/(z₁ A_s'(z₁))` at 10 exterior
/// points per `(s, parameter set)` to 1e-6 relative.
pub fn c05_stieltjes_identity() -> CriterionOutcome {
    run_check(5, "Stieltjes identity off the support", 30.0, || {
        let mut worst = 0.0f64;
        for set in PARAM_SETS {
            let sp = params(set);
            for s in [0.5, 1.0, 2.0] {
                let e = symbol::edge_curves(&sp, s).map_err(|e| e.to_string())?;
                let mut points = vec![
                    1.1 * e.gamma,
                    1.5 * e.gamma,
                    2.0 * e.gamma,
                    4.0 * e.gamma,
                    8.0 * e.gamma,
                    e.eta - 0.3,
                    e.eta - 1.0,
                    e.eta - 4.0,
                ];
                if e.beta > 1e-6 {
                    points.push(0.5 * e.beta);
                    points.push(0.1 * e.beta);
                } else {
                    points.push(16.0 * e.gamma);
                    points.push(e.eta - 10.0);
                }
                for x in points {
                    let lhs = measures::stieltjes_mu1(&sp, s, x).map_err(|e| e.to_string())?;
                    let rhs = measures::stieltjes_mu1_reference(&sp, s, x).map_err(|e| e.to_string())?;
                    worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-12));
                }
            }
        }
        Ok((worst <= 1e-6, format!("max relative deviation = {worst:.3e} (tol 1e-6)")))
    })
}

/// 6. Kolmogorov distance between the zeros of `B_{n,n}` and `ν₁^1`:
/// `≤ 0.05` at `n = 200` and decreasing from `n = 100` to `n = 400`.
pub fn c06_zero_distribution() -> CriterionOutcome {
    run_check(6, "zero counting measure converges to nu1", 180.0, || {
        let mut detail = String::new();
        let mut ok = true;
        for set in PARAM_SETS {
            let sp = params(set);
            let mut ks = Vec::new();
            for n in [100usize, 200, 400] {
                let src = ScaledCoeffs::new(sp, n).map_err(|e| e.to_string())?;
                let zeros = polyzeros::zeros_interlaced(&src, n).map_err(|e| e.to_string())?;
                let emp = EmpiricalMeasure::from_zero_set(&zeros);
                let d = emp.kolmogorov_distance(|x| measures::nu1_cdf(&sp, 1.0, x).unwrap_or(f64::NAN));
                ks.push(d);
            }
            ok &= ks[1] <= 0.05 && ks[2] < ks[0];
            detail.push_str(&format!("{set:?}: KS(100,200,400) = ({:.4}, {:.4}, {:.4}); ", ks[0], ks[1], ks[2]));
        }
        detail.push_str("(tol: KS(200) <= 0.05, KS(400) < KS(100))");
        Ok((ok, detail))
    })
}

/// 7. Interlacing holds for every consecutive degree pair up to `k = 500`
/// at `n = 250`, and every zero is positive.
pub fn c07_interlacing() -> CriterionOutcome {
    run_check(7, "interlacing of recurrence polynomial zeros", 120.0, || {
        for set in PARAM_SETS {
            let sp = params(set);
            let src = ScaledCoeffs::new(sp, 250).map_err(|e| e.to_string())?;
            let sweep = polyzeros::interlaced_zero_sweep(&src, 500).map_err(|e| e.to_string())?;
            for w in sweep.windows(2) {
                if !polyzeros::verify_interlacing(&w[0], &w[1]) {
                    return Ok((false, format!("interlacing fails at degree {} for {set:?}", w[1].degree)));
                }
            }
            if let Some((k, &z)) = sweep
                .iter()
                .flat_map(|zs| zs.zeros.iter().map(move |z| (zs.degree, z)))
                .find(|&(_, &z)| z <= 0.0)
            {
                return Ok((false, format!("nonpositive zero {z} at degree {k} for {set:?}")));
            }
        }
        Ok((true, "all consecutive pairs interlace up to k = 500 (n = 250), all zeros positive".into()))
    })
}

/// 8. Toeplitz spectra accumulate on `Γ₁(1)`: at `n = 256` every eigenvalue
/// is within 0.05 of `[β(1), γ(1)]` and the Hausdorff distance decreases
/// over `n ∈ {32, 64, 128, 256}`.
pub fn c08_toeplitz_accumulation() -> CriterionOutcome {
    run_check(8, "Toeplitz spectrum accumulates on Gamma1", 60.0, || {
        let mut detail = String::new();
        let mut ok = true;
        for set in PARAM_SETS {
            let sp = params(set);
            let e = symbol::edge_curves(&sp, 1.0).map_err(|e| e.to_string())?;
            let dist_to_interval =
                |z: &Complex64| (z - Complex64::new(z.re.clamp(e.beta, e.gamma), 0.0)).norm();
            let mut hausdorff = Vec::new();
            let mut max_dist_256 = 0.0f64;
            for n in [32usize, 64, 128, 256] {
                let spec = polyzeros::toeplitz_spectrum(&sp, 1.0, n).map_err(|e| e.to_string())?;
                let forward = spec.iter().map(&dist_to_interval).fold(0.0f64, f64::max);
                let backward = (0..=2000)
                    .map(|i| {
                        let x = e.beta + (e.gamma - e.beta) * i as f64 / 2000.0;
                        spec.iter()
                            .map(|z| (z - Complex64::new(x, 0.0)).norm())
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0f64, f64::max);
                hausdorff.push(forward.max(backward));
                if n == 256 {
                    max_dist_256 = forward;
                }
            }
            ok &= max_dist_256 <= 0.05 && hausdorff.windows(2).all(|w| w[1] < w[0]);
            detail.push_str(&format!(
                "{set:?}: max dist at 256 = {max_dist_256:.4}, Hausdorff = {:?}; ",
                hausdorff.iter().map(|h| (h * 1e4).round() / 1e4).collect::<Vec<_>>()
            ));
        }
        Ok((ok, detail))
    })
}

/// 9. Variational conditions: `μ`-level residual ≤ 5e-5, `ν`-level residual
/// ≤ 1e-4, with the correct active/inactive constraint classification.
pub fn c09_variational_conditions() -> CriterionOutcome {
    run_check(9, "Euler-Lagrange variational conditions", 300.0, || {
        let mut detail = String::new();
        let mut ok = true;
        for (set, expect_active) in PARAM_SETS.iter().zip([false, true, true]) {
            let sp = params(*set);
            let mu = equilibrium::check_variational_mu(&sp, 1.0, 60).map_err(|e| e.to_string())?;
            let nu = equilibrium::check_variational_nu(&sp, 1.0, 60).map_err(|e| e.to_string())?;
            let mu_resid = mu.cond1.max_equality_residual.max(mu.cond2.max_equality_residual);
            let nu_resid = nu.cond1.max_equality_residual.max(nu.cond2.max_equality_residual);
            ok &= mu_resid <= 5e-5
                && nu_resid <= 1e-4
                && nu.constraint_active == expect_active
                && nu.cond1.min_inequality_margin >= -1e-6
                && nu.cond2.min_inequality_margin >= -1e-6;
            detail.push_str(&format!(
                "{set:?}: mu-residual {mu_resid:.2e}, nu-residual {nu_resid:.2e}, active = {}; ",
                nu.constraint_active
            ));
        }
        detail.push_str("(tol 5e-5 / 1e-4; expected active = [false, true, true])");
        Ok((ok, detail))
    })
}

/// 10. Hard-edge phenomenology for `p = 0`: `β(1) > 0` at `t = 0.2`,
/// `β(1) = 0` (to 1e-9) at `t = 0.9`, and the `ν₁` density exponent at the
/// hard edge is `-0.5 ± 0.05`.
pub fn c10_hard_edge() -> CriterionOutcome {
    run_check(10, "hard-edge phenomenology", 60.0, || {
        let soft = symbol::edge_curves(&params((1.0, 0.2, 0.0)), 1.0).map_err(|e| e.to_string())?;
        let hard_sp = params((1.0, 0.9, 0.0));
        let hard = symbol::edge_curves(&hard_sp, 1.0).map_err(|e| e.to_string())?;
        let mut logs = Vec::new();
        for &x in &[1e-6, 1e-5, 1e-4] {
            let rho = measures::nu1_density(&hard_sp, 1.0, x).map_err(|e| e.to_string())?;
            logs.push((x.ln(), rho.ln()));
        }
        let slope = (logs[2].1 - logs[0].1) / (logs[2].0 - logs[0].0);
        let ok = soft.beta > 0.0 && hard.beta.abs() <= 1e-9 && (slope + 0.5).abs() <= 0.05;
        Ok((ok, format!(
            "beta(1; t=0.2) = {:.6} > 0, beta(1; t=0.9) = {:.2e}, hard-edge exponent = {slope:.4}",
            soft.beta, hard.beta
        )))
    })
}

/// 11. Marchenko–Pastur limit: with `a = 1e-6` the `s = 1` edges are within
/// 1e-2 of `ρ₁(t), ρ₂(t)`, and the MP density has unit mass to 1e-8.
pub fn c11_marchenko_pastur() -> CriterionOutcome {
    run_check(11, "Marchenko-Pastur limit (a -> 0)", 10.0, || {
        let mut worst_edge = 0.0f64;
        let mut worst_mass = 0.0f64;
        for &(t, p) in &[(0.2, 0.0), (0.3, 5.0)] {
            let sp = ScaledParams::new(1e-6, t, p).map_err(|e| e.to_string())?;
            let e = symbol::edge_curves(&sp, 1.0).map_err(|e| e.to_string())?;
            let (r1, r2) = measures::mp_edges(t, p);
            worst_edge = worst_edge.max((e.beta - r1).abs()).max((e.gamma - r2).abs());
            worst_mass = worst_mass.max((measures::mp_mass(t, p).map_err(|e| e.to_string())? - 1.0).abs());
        }
        Ok((
            worst_edge <= 1e-2 && worst_mass <= 1e-8,
            format!("max edge deviation = {worst_edge:.3e} (tol 1e-2), mass deviation = {worst_mass:.3e} (tol 1e-8)"),
        ))
    })
}

/// 12. Simulation calibration: single-path moments within 3 standard errors
/// at 10⁴ replicas; 50-path envelope outliers ≤ 0.08; the `p = 5` minimum
/// path stays above `β(1;τ)/2`; the `p = 0` minimum path crosses 0.02 only
/// after `τ = t*`.
pub fn c12_simulation() -> CriterionOutcome {
    run_check(12, "path simulation calibration", 300.0, || {
        let mut detail = String::new();

        // moment test, n = 1, alpha ∈ {0, 2}
        for alpha in [0usize, 2] {
            let cfg = SimConfig::new(8, 2024, 10_000).map_err(|e| e.to_string())?;
            let ensembles = sim::simulate(1, alpha, 1.0, &cfg).map_err(|e| e.to_string())?;
            let t_prime = ensembles[0].horizon();
            for j in [2usize, 4, 6] {
                let u = ensembles[0].times[j];
                let samples: Vec<f64> = ensembles.iter().map(|e| e.positions[j][0]).collect();
                let mean = samples.iter().sum::<f64>() / samples.len() as f64;
                let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                    / (samples.len() as f64 - 1.0);
                let se = (var / samples.len() as f64).sqrt();
                let expected = sim::bridge_mean(1.0, alpha, t_prime, u);
                if (mean - expected).abs() > 3.0 * se {
                    return Ok((false, format!(
                        "moment test failed: alpha = {alpha}, u = {u}: {mean:.5} vs {expected:.5} (se {se:.2e})"
                    )));
                }
            }
        }
        detail.push_str("moments (alpha = 0, 2) within 3 SE; ");

        // envelope, n = 50, p = 0
        let cfg = SimConfig::new(60, 5, 1).map_err(|e| e.to_string())?;
        let flat = sim::simulate_replica(50, 0, 1.0, &cfg, 0).map_err(|e| e.to_string())?;
        let report = sim::envelope_check(&flat, &params((1.0, 0.2, 0.0))).map_err(|e| e.to_string())?;
        detail.push_str(&format!("envelope outlier fraction = {:.3}; ", report.max_outlier_fraction));
        if report.max_outlier_fraction > 0.08 {
            return Ok((false, detail + "(envelope tolerance 0.08 exceeded)"));
        }

        // p = 5: minimum path bounded away from the wall
        let lifted = sim::simulate_replica(50, 250, 1.0, &cfg, 0).map_err(|e| e.to_string())?;
        let p5 = ScaledParams::new(1.0, 0.3, 5.0).map_err(|e| e.to_string())?;
        for j in 1..lifted.times.len() - 1 {
            let tau = lifted.tau(j);
            if !(0.05..=0.95).contains(&tau) {
                continue;
            }
            let env = ScaledParams::new(1.0, tau, 5.0).map_err(|e| e.to_string())?;
            let beta = symbol::edge_curves(&env, 1.0).map_err(|e| e.to_string())?.beta;
            if lifted.positions[j][0] < 0.5 * beta {
                return Ok((false, format!(
                    "p = 5 minimum path {} dipped below beta/2 = {} at tau = {tau}",
                    lifted.positions[j][0],
                    0.5 * beta
                )));
            }
        }
        let _ = p5;
        detail.push_str("p = 5 min path stays above beta(1;tau)/2; ");

        // p = 0: the wall is reached only after t* = 1/2
        let t_star = 0.5;
        let mut before_ok = true;
        let mut after_hit = false;
        for j in 1..flat.times.len() - 1 {
            let tau = flat.tau(j);
            let min = flat.positions[j][0];
            if (0.05..=0.25).contains(&tau) && min < 0.02 {
                before_ok = false;
            }
            if tau > t_star && min < 0.02 {
                after_hit = true;
            }
        }
        detail.push_str(&format!("hard edge: early min > 0.02 = {before_ok}, reached after t* = {after_hit}"));
        Ok((before_ok && after_hit, detail))
    })
}

/// 13. Orthogonality spot-check: normalised residuals ≤ 1e-6 for
/// `n ∈ {2, 4}`, both weights, all admissible `k`.
pub fn c13_orthogonality() -> CriterionOutcome {
    run_check(13, "multiple orthogonality of recurrence polynomials", 120.0, || {
        let fp = FiniteParams::new(1.0, 0.0, 0.25, 1.0).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for n in [2usize, 4] {
            for which in [Weight::W1, Weight::W2] {
                for k in 0..n / 2 {
                    let r = model::check_orthogonality(&fp, n, which, k).map_err(|e| e.to_string())?;
                    worst = worst.max(r);
                }
            }
        }
        Ok((worst <= 1e-6, format!("max normalised residual = {worst:.3e} (tol 1e-6)")))
    })
}

/// Runs the full suite in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        c01_field_closed_vs_numeric(),
        c02_sigma_closed_vs_numeric(),
        c03_edge_cross_oracle(),
        c04_mass_normalisations(),
        c05_stieltjes_identity(),
        c06_zero_distribution(),
        c07_interlacing(),
        c08_toeplitz_accumulation(),
        c09_variational_conditions(),
        c10_hard_edge(),
        c11_marchenko_pastur(),
        c12_simulation(),
        c13_orthogonality(),
    ]
}
