//! Normalized character products of independent heat-kernel increments.
//!
//! For an irrep β and total time `T` split into `n` equal increments
//! `U_1, …, U_n ~ p_{T/n}` i.i.d., the product statistic is
//!
//! ```text
//! W_n = (dim β)^{-(n-1)} · Π_i χ_β(U_i).
//! ```
//!
//! Its mean is `dim β · e^{-c₂(β) T / 2}` for every `n`. For the
//! semi-simple groups the variance collapses as `n → ∞`, so `W_n`
//! concentrates at that constant; for U(1) the statistic is the single
//! heat-kernel phase `e^{iθ(T)}` at every `n` and its law does not move.
//! [`convergence_experiment`] measures the L² distance along a ladder of
//! increment counts.

use crate::error::{Error, Result};
use crate::group::{character, Group, Irrep};
use crate::heat::sample_heat_kernel;
use crate::rng::Rng;
use crate::stats::{mean_stderr, mean_stderr_complex};
use num_complex::Complex64;

/// One draw of the normalized character product.
#[derive(Debug, Clone)]
pub struct ProductStatistic {
    pub beta: Irrep,
    pub t: f64,
    pub n: usize,
    pub value: Complex64,
}

/// The constant `dim β · e^{-c₂(β) T / 2}` that the statistic averages to
/// at every increment count (and concentrates at, for semi-simple groups).
pub fn limit_constant(beta: &Irrep, t: f64) -> f64 {
    beta.dim() * (-beta.casimir() * t / 2.0).exp()
}

/// Draw `W_n` from `n` independent increments at time `T/n` each.
pub fn sample_product_statistic(
    beta: &Irrep,
    t: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<ProductStatistic> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one increment".into()));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t, "total time must be positive"));
    }
    let step = t / n as f64;
    if beta.group != Group::U1 && step < crate::heat::SU2_SO3_TIME_FLOOR {
        return Err(Error::InvalidArgument(format!(
            "increment time T/n = {step:.3e} is below the sampler floor 1e-4; \
             use fewer increments (smaller n) or a larger total time"
        )));
    }
    let mut value = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let u = sample_heat_kernel(beta.group, step, rng)?;
        value *= character(beta, &u.conj_class());
    }
    value /= beta.dim().powi(n as i32 - 1);
    Ok(ProductStatistic {
        beta: *beta,
        t,
        n,
        value,
    })
}

/// Monte-Carlo summary of one rung of the increment ladder.
#[derive(Debug, Clone)]
pub struct ConvergenceRung {
    pub n: usize,
    /// Estimate of `E |W_n − limit|²` with its batch-means stderr.
    pub l2_sq: f64,
    pub l2_stderr: f64,
    /// Sample mean of `W_n` with its stderr (for the mean identity).
    pub mean: Complex64,
    pub mean_stderr: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub beta: Irrep,
    pub t: f64,
    pub limit: f64,
    pub n_mc: usize,
    pub rungs: Vec<ConvergenceRung>,
}

impl ConvergenceReport {
    /// L² distances decrease along the ladder (one inversion tolerated if
    /// it is within one combined stderr) and the final rung sits below a
    /// quarter of the first.
    pub fn decays(&self) -> bool {
        let mut inversions = 0;
        for pair in self.rungs.windows(2) {
            if pair[1].l2_sq > pair[0].l2_sq {
                let slack = pair[0].l2_stderr.hypot(pair[1].l2_stderr);
                if pair[1].l2_sq - pair[0].l2_sq > slack {
                    return false;
                }
                inversions += 1;
            }
        }
        let first = self.rungs.first().map_or(0.0, |r| r.l2_sq);
        let last = self.rungs.last().map_or(0.0, |r| r.l2_sq);
        inversions <= 1 && last < 0.25 * first
    }

    /// First and last rungs agree within `k` combined standard errors
    /// (the expected behaviour for U(1), whose law does not move with `n`).
    pub fn is_flat(&self, k: f64) -> bool {
        match (self.rungs.first(), self.rungs.last()) {
            (Some(a), Some(b)) => (a.l2_sq - b.l2_sq).abs() <= k * a.l2_stderr.hypot(b.l2_stderr),
            _ => true,
        }
    }

    /// The sample mean matches `limit` within `k` stderr at every rung.
    pub fn mean_identity_holds(&self, k: f64) -> bool {
        self.rungs.iter().all(|r| {
            let gap = (r.mean - Complex64::new(self.limit, 0.0)).norm();
            gap <= k * r.mean_stderr + 1e-12
        })
    }
}

/// Estimate `E |W_n − limit|²` for each `n` in the ladder from `n_mc`
/// independent draws per rung.
pub fn convergence_experiment(
    beta: &Irrep,
    t: f64,
    n_ladder: &[usize],
    n_mc: usize,
    rng: &mut Rng,
) -> Result<ConvergenceReport> {
    if n_ladder.is_empty() {
        return Err(Error::InvalidArgument("empty increment ladder".into()));
    }
    if n_mc < 32 {
        return Err(Error::InvalidArgument(
            "need at least 32 Monte-Carlo draws per rung".into(),
        ));
    }
    let limit = limit_constant(beta, t);
    let bound = beta.dim();
    let mut rungs = Vec::with_capacity(n_ladder.len());
    for &n in n_ladder {
        let mut sq_devs = Vec::with_capacity(n_mc);
        let mut values = Vec::with_capacity(n_mc);
        for _ in 0..n_mc {
            let w = sample_product_statistic(beta, t, n, rng)?;
            debug_assert!(
                w.value.norm() <= bound * (1.0 + 1e-9),
                "|W_n| = {} exceeds dim β = {bound}",
                w.value.norm()
            );
            sq_devs.push((w.value - Complex64::new(limit, 0.0)).norm_sqr());
            values.push(w.value);
        }
        let (l2_sq, l2_stderr) = mean_stderr(&sq_devs);
        let (mean, mean_stderr) = mean_stderr_complex(&values);
        rungs.push(ConvergenceRung {
            n,
            l2_sq,
            l2_stderr,
            mean,
            mean_stderr,
        });
    }
    Ok(ConvergenceReport {
        beta: *beta,
        t,
        limit,
        n_mc,
        rungs,
    })
}
