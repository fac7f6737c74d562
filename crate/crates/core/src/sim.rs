//! Monte-Carlo simulation of `n` non-intersecting squared Bessel bridges
//! from a common start `a > 0` down to `0`.
//!
//! The sampler uses the matrix-bridge construction: `X(u)` is an
//! `(n+α) × n` complex matrix whose entries perform independent Brownian
//! bridges on `[0, T']`, `T' = 1/(2n)`, from `X₀ = √a·[Iₙ; 0]` to the zero
//! matrix (each real/imaginary component a standard Brownian bridge with
//! variance `u(T'-u)/T'`). The ordered eigenvalues of `X(u)*X(u)` are then
//! exactly the non-colliding squared Bessel system with integer parameter
//! `α`; non-integer orders (round-off from `p·n`) are approximated by the
//! nearest integer.
//!
//! Bridges are sampled exactly on the time grid through conditioned Gaussian
//! increments — there is no Euler discretisation bias to calibrate away.
//! Every matrix entry draws from its own counter-derived ChaCha substream
//! keyed by `(seed, replica, row, column, component)`, so the fill is
//! deterministic under any parallel schedule.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::ScaledParams;
use crate::symbol::{self, SymbolError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigenpair residual {residual:e} exceeds 1e-10 · ‖H‖")]
    EigenResidual { residual: f64 },
    #[error("paths collided at time index {time_index} (gap {gap:e})")]
    NonIntersectionViolation { time_index: usize, gap: f64 },
    #[error("ensemble/parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Simulation controls. Fixed `seed` gives bit-identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub steps: usize,
    pub seed: u64,
    pub replicas: usize,
}

impl SimConfig {
    pub fn new(steps: usize, seed: u64, replicas: usize) -> Result<Self, SimError> {
        if steps < 2 {
            return Err(SimError::InvalidConfig(format!("need at least 2 steps, got {steps}")));
        }
        if replicas == 0 {
            return Err(SimError::InvalidConfig("need at least one replica".into()));
        }
        Ok(Self { steps, seed, replicas })
    }
}

/// One simulated replica: sorted particle positions on a time grid across
/// `[0, T']`, `T' = 1/(2n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEnsemble {
    pub n: usize,
    pub alpha: usize,
    pub a: f64,
    /// Raw times `u_j ∈ [0, T']`.
    pub times: Vec<f64>,
    /// `positions[j]` is the ascending vector of the `n` particle positions
    /// at `times[j]`.
    pub positions: Vec<Vec<f64>>,
}

impl PathEnsemble {
    /// Rescaled horizon `T' = 1/(2n)`.
    pub fn horizon(&self) -> f64 {
        1.0 / (2.0 * self.n as f64)
    }

    /// Plotted time `τ = u/T' ∈ [0, 1]` of grid index `j`.
    pub fn tau(&self, j: usize) -> f64 {
        self.times[j] / self.horizon()
    }

    /// Emits CSV rows `replica,tau,path_index,position` (header included
    /// when `header` is set).
    pub fn write_csv<W: Write>(&self, w: &mut W, replica: usize, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "replica,tau,path_index,position")?;
        }
        for (j, row) in self.positions.iter().enumerate() {
            let tau = self.tau(j);
            for (i, x) in row.iter().enumerate() {
                writeln!(w, "{replica},{tau},{i},{x}")?;
            }
        }
        Ok(())
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn entry_rng(seed: u64, replica: usize, row: usize, col: usize, comp: usize) -> ChaCha8Rng {
    let mut state = seed
        ^ (replica as u64).wrapping_mul(0x5851_f42d_4c95_7f2d)
        ^ (row as u64).wrapping_mul(0x1405_7b7e_f767_814f)
        ^ (col as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (comp as u64).wrapping_mul(0xda94_2042_e4dd_58b5);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard Brownian bridge from `start` at time 0 to 0 at `t_prime`,
/// sampled exactly on `times` by conditioned Gaussian increments.
fn sample_bridge(start: f64, times: &[f64], t_prime: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut value = start;
    out.push(value);
    for j in 1..times.len() {
        let (u_prev, u) = (times[j - 1], times[j]);
        if u >= t_prime {
            value = 0.0;
        } else {
            let remaining = t_prime - u_prev;
            let dt = u - u_prev;
            let mean = value * (t_prime - u) / remaining;
            let var = dt * (t_prime - u) / remaining;
            let g: f64 = rng.sample(StandardNormal);
            value = mean + var.sqrt() * g;
        }
        out.push(value);
    }
    out
}

/// Cyclic Jacobi diagonalisation of a real symmetric matrix; returns the
/// unsorted diagonal and the accumulated rotations. Foolproof on repeated
/// eigenvalues, which the doubled spectrum of the complex embedding always
/// has.
fn jacobi_symmetric(mut a: DMatrix<f64>, max_sweeps: usize) -> Result<(DVector<f64>, DMatrix<f64>), SimError> {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * frob {
            return Ok((a.diagonal(), v));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp - s * (akq + tau * akp);
                        a[(p, k)] = a[(k, p)];
                        a[(k, q)] = akq + s * (akp - tau * akq);
                        a[(q, k)] = a[(k, q)];
                    }
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp - s * (vkq + tau * vkp);
                    v[(k, q)] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    Err(SimError::EigenResidual { residual: f64::NAN })
}

/// Sorted eigenvalues of a complex Hermitian matrix via cyclic Jacobi on
/// the `2n × 2n` real-symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`
/// (every eigenvalue appears twice there). Residuals `‖Hv - λv‖` are
/// verified against `1e-10 · ‖H‖`; non-convergence after 30 sweeps is an
/// error.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>, SimError> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "matrix must be square");
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut deviation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            deviation = deviation.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    if deviation > 1e-12 * (1.0 + norm) {
        return Err(SimError::NotHermitian { deviation });
    }

    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // symmetrised entries kill rounding asymmetry
            let re = 0.5 * (h[(i, j)].re + h[(j, i)].re);
            let im = 0.5 * (h[(i, j)].im - h[(j, i)].im);
            embed[(i, j)] = re;
            embed[(i + n, j + n)] = re;
            embed[(i, j + n)] = -im;
            embed[(i + n, j)] = im;
        }
    }
    let (eigenvalues, vectors) = jacobi_symmetric(embed, 30)?;

    // verify a residual per doubled pair using the complex eigenvector
    // reconstructed from the embedding
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    for &idx in order.iter().step_by(2) {
        let lambda = eigenvalues[idx];
        let col = vectors.column(idx);
        let v = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]));
        let residual = (h * &v - v.scale(lambda)).norm();
        if residual > 1e-10 * (1.0 + norm) {
            return Err(SimError::EigenResidual { residual });
        }
    }

    let mut vals: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    vals = vals.chunks_exact(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
    Ok(vals)
}

/// Simulates one replica from an arbitrary start matrix (exposed for the
/// invariance tests; [`simulate`] uses the canonical `√a·[Iₙ; 0]`).
pub fn simulate_from_start(
    start: &DMatrix<Complex64>,
    n: usize,
    alpha: usize,
    a: f64,
    cfg: &SimConfig,
    replica: usize,
) -> Result<PathEnsemble, SimError> {
    let rows = n + alpha;
    assert_eq!(start.nrows(), rows, "start matrix must be (n+alpha) x n");
    assert_eq!(start.ncols(), n);
    let t_prime = 1.0 / (2.0 * n as f64);
    let times: Vec<f64> = (0..=cfg.steps).map(|j| t_prime * j as f64 / cfg.steps as f64).collect();

    // per-entry bridges, deterministic under parallel fill
    let entries: Vec<Vec<Complex64>> = (0..rows * n)
        .into_par_iter()
        .map(|idx| {
            let (r, c) = (idx / n, idx % n);
            let mut rng_re = entry_rng(cfg.seed, replica, r, c, 0);
            let mut rng_im = entry_rng(cfg.seed, replica, r, c, 1);
            let re = sample_bridge(start[(r, c)].re, &times, t_prime, &mut rng_re);
            let im = sample_bridge(start[(r, c)].im, &times, t_prime, &mut rng_im);
            re.into_iter().zip(im).map(|(x, y)| Complex64::new(x, y)).collect()
        })
        .collect();

    let positions: Vec<Vec<f64>> = (0..=cfg.steps)
        .into_par_iter()
        .map(|j| {
            let x = DMatrix::<Complex64>::from_fn(rows, n, |r, c| entries[r * n + c][j]);
            let h = x.adjoint() * &x;
            hermitian_eigenvalues(&h)
        })
        .collect::<Result<_, _>>()?;

    for (j, row) in positions.iter().enumerate() {
        if j == 0 || j == cfg.steps {
            continue;
        }
        for w in row.windows(2) {
            let gap = w[1] - w[0];
            if gap < 1e-13 {
                return Err(SimError::NonIntersectionViolation { time_index: j, gap });
            }
        }
    }

    Ok(PathEnsemble { n, alpha, a, times, positions })
}

/// Simulates one replica of `n` non-intersecting squared Bessel bridges with
/// integer parameter `alpha`, all started at `a` and pinned to 0.
pub fn simulate_replica(
    n: usize,
    alpha: usize,
    a: f64,
    cfg: &SimConfig,
    replica: usize,
) -> Result<PathEnsemble, SimError> {
    if n == 0 {
        return Err(SimError::InvalidConfig("need at least one path".into()));
    }
    if !(a > 0.0) {
        return Err(SimError::InvalidConfig(format!("start value must be positive, got {a}")));
    }
    let mut start = DMatrix::<Complex64>::zeros(n + alpha, n);
    for i in 0..n {
        start[(i, i)] = Complex64::new(a.sqrt(), 0.0);
    }
    simulate_from_start(&start, n, alpha, a, cfg, replica)
}

/// All replicas requested by the config, in replica order.
pub fn simulate(n: usize, alpha: usize, a: f64, cfg: &SimConfig) -> Result<Vec<PathEnsemble>, SimError> {
    (0..cfg.replicas).map(|r| simulate_replica(n, alpha, a, cfg, r)).collect()
}

/// Mean of a single squared Bessel bridge at raw time `u`:
/// `(1 - u/T')² a + 2(α+1) u (T'-u)/T'`.
pub fn bridge_mean(a: f64, alpha: usize, t_prime: f64, u: f64) -> f64 {
    let frac = 1.0 - u / t_prime;
    frac * frac * a + 2.0 * (alpha as f64 + 1.0) * u * (t_prime - u) / t_prime
}

/// Per-time envelope statistics of one replica against the bulk boundary
/// `[β(1; τ), γ(1; τ)]` computed from the symbol with `t := τ`.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    /// Worst outlier fraction over plotted times `τ ∈ [0.1, 0.9]`.
    pub max_outlier_fraction: f64,
    /// Rows `(τ, outlier fraction, β(1;τ), γ(1;τ), min path, max path)`.
    pub per_time: Vec<(f64, f64, f64, f64, f64, f64)>,
}

/// Fraction of paths outside the widened envelope
/// `[β - δ, γ + δ]`, `δ = 0.15 (γ - β)`, at each interior plotted time.
pub fn envelope_check(ens: &PathEnsemble, sp: &ScaledParams) -> Result<EnvelopeReport, SimError> {
    let expected_alpha = sp.alpha_for(ens.n) as usize;
    if (ens.a - sp.a).abs() > 1e-12 || ens.alpha != expected_alpha {
        return Err(SimError::ParamMismatch(format!(
            "ensemble has (a, alpha) = ({}, {}), parameters require ({}, {})",
            ens.a, ens.alpha, sp.a, expected_alpha
        )));
    }
    let mut per_time = Vec::new();
    let mut worst = 0.0f64;
    for j in 1..ens.times.len().saturating_sub(1) {
        let tau = ens.tau(j);
        if !(0.02..=0.98).contains(&tau) {
            continue;
        }
        let env_params = ScaledParams::new(sp.a, tau, sp.p)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        let e = symbol::edge_curves(&env_params, 1.0)?;
        let delta = 0.15 * (e.gamma - e.beta);
        let row = &ens.positions[j];
        let outliers = row.iter().filter(|&&x| x < e.beta - delta || x > e.gamma + delta).count();
        let frac = outliers as f64 / row.len() as f64;
        if (0.1..=0.9).contains(&tau) {
            worst = worst.max(frac);
        }
        per_time.push((tau, frac, e.beta, e.gamma, row[0], *row.last().unwrap()));
    }
    Ok(EnvelopeReport { max_outlier_fraction: worst, per_time })
}
