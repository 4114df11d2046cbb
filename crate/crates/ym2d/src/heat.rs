//! The heat kernel `p_t` on U(1), SU(2) and SO(3).
//!
//! `p_t` is the density against Haar measure of the time-`t` heat
//! distribution, given by the character expansion
//! `p_t([g]) = Σ_β dim β · e^{−c₂(β) t / 2} · χ_β([g])`.
//!
//! For U(1) below `t = 1` the expansion is summed in its Poisson-dual
//! (wrapped Gaussian) form `√(2π/t) · Σ_k exp(−(θ − 2πk)²/(2t)) / √(2π)`,
//! which needs O(1) terms where the character series would need O(t^{−1/2}).
//! For SU(2)/SO(3) below `t = 1` the analogous Jacobi image sum is used,
//! evaluated in log scale: in the class-angle tails the character series
//! cancels down to values below double-precision roundoff noise, while the
//! image sum stays positive term by term (up to one final one-bit
//! subtraction) and therefore resolves the kernel at any depth.

use crate::error::{Error, Result};
use crate::group::{
    character, class_quadrature, haar_sample, irrep_enumerate, ConjClass, Group, GroupElement,
    Irrep, TAU,
};
use crate::rng::Rng;
use num_complex::Complex64;
use rand::Rng as _;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Hard cap on the Casimir cutoff of any character series.
pub(crate) const CASIMIR_HARD_CAP: f64 = 1e6;
/// Smallest admissible time for SU(2)/SO(3) evaluation.
pub(crate) const SU2_SO3_TIME_FLOOR: f64 = 1e-4;
/// Below this time SU(2)/SO(3) switch from the character series to the
/// image sum, matching the U(1) policy. The image sum is exact to roundoff
/// for all `t ≤ 1`, whereas the alternating character series loses its
/// footing near θ = π as `t` shrinks: min_θ p_t ≈ 2.3e-6 at `t = 1`
/// (a 7e8 margin over the series' ~3e-15 cancellation noise) but already
/// ≈ 3.4e-14 at `t = 0.5` — bare rounding units above the noise.
pub(crate) const SEMISIMPLE_DUAL_SWITCH: f64 = 1.0;
/// Class angles are clamped this far away from the endpoints 0 and π when
/// forming image-sum ratios whose numerator and denominator both vanish
/// linearly there; the clamp perturbs the ratio only at O(floor²/t).
const DUAL_ANGLE_FLOOR: f64 = 1e-12;
/// Grid size of the inverse-CDF sampling tables.
const CDF_TABLE_NODES: usize = 4096;

/// A heat-kernel evaluation together with its truncation certificate.
#[derive(Debug, Clone, Copy)]
pub struct HeatKernelEval {
    pub group: Group,
    pub t: f64,
    pub value: f64,
    /// Largest Casimir actually included in the series.
    pub cutoff_casimir: f64,
    /// Certified bound on the dropped tail.
    pub tail_bound: f64,
}

fn check_time(group: Group, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t, "time must be positive"));
    }
    if group != Group::U1 && t < SU2_SO3_TIME_FLOOR {
        return Err(Error::InvalidTime(
            t,
            "below the su2/so3 character-mode floor of 1e-4",
        ));
    }
    Ok(())
}

/// Wrapped-Gaussian (Poisson dual) form of the U(1) heat kernel.
fn u1_heat_dual(t: f64, theta: f64) -> f64 {
    let scale = (TAU / t).sqrt();
    let mut sum = 0.0;
    let k0 = (theta / TAU).round() as i64;
    for k in (k0 - 6)..=(k0 + 6) {
        let d = theta - TAU * k as f64;
        sum += (-d * d / (2.0 * t)).exp();
    }
    scale * sum
}

/// U(1) character series `Σ_n e^{−n²t/2} e^{inθ}` summed over paired `±n`.
fn u1_heat_series(t: f64, theta: f64, tol: f64) -> HeatKernelEval {
    let mut value: f64 = 1.0;
    let mut n = 1i64;
    loop {
        let c2 = (n * n) as f64;
        let term_bound = 2.0 * (-c2 * t / 2.0).exp();
        if term_bound < tol * value.abs().max(1e-3) {
            // Certified geometric tail starting at the first excluded term:
            // e^{−(n+m)²t/2} ≤ e^{−n²t/2} e^{−nmt}.
            let r = (-(n as f64) * t).exp();
            let tail = term_bound / (1.0 - r);
            return HeatKernelEval {
                group: Group::U1,
                t,
                value,
                cutoff_casimir: ((n - 1) * (n - 1)) as f64,
                tail_bound: tail,
            };
        }
        value += term_bound * (n as f64 * theta).cos();
        n += 1;
    }
}

/// Character series for SU(2)/SO(3).
fn semisimple_heat_series(group: Group, t: f64, theta: f64, tol: f64) -> Result<HeatKernelEval> {
    let mut value: f64 = 0.0;
    let mut label = 0i64;
    loop {
        let r = Irrep { group, label };
        let c2 = r.casimir();
        if c2 > CASIMIR_HARD_CAP {
            return Err(Error::SeriesCutoffExceeded);
        }
        let dim = r.dim();
        let weight = dim * (-c2 * t / 2.0).exp();
        let term_bound = dim * weight; // |χ| ≤ dim
        if label > 0 && term_bound < tol * value.abs().max(1e-3) {
            // Consecutive-term ratio is eventually < 1; bound the tail by a
            // geometric series once it is.
            let next = Irrep {
                group,
                label: label + 1,
            };
            let ratio = (next.dim() / dim).powi(2) * (-(next.casimir() - c2) * t / 2.0).exp();
            if ratio < 0.9 {
                // Consecutive term-bound ratios decrease, so the first one
                // dominates a geometric tail that includes this term.
                let tail = term_bound / (1.0 - ratio);
                return Ok(HeatKernelEval {
                    group,
                    t,
                    value,
                    cutoff_casimir: Irrep {
                        group,
                        label: label - 1,
                    }
                    .casimir(),
                    tail_bound: tail,
                });
            }
        }
        value += weight
            * character(
                &r,
                &ConjClass {
                    group,
                    angle: theta,
                },
            )
            .re;
        label += 1;
    }
}

// ---------------------------------------------------------------------------
// Small-time image-sum (Poisson dual) evaluation in log scale.
//
// Both semisimple kernels reduce to the odd periodic sum
//   F_a(ψ) = Σ_{m∈ℤ} (ψ − 2πm) e^{−(ψ−2πm)²/(4a)},
// the Jacobi transform of Σ_{n≥1} n e^{−an²} sin nψ = (√π/4) a^{−3/2} F_a(ψ):
//   SU(2):  p_t(θ) = e^{t/8} (√π/4) a^{−3/2} · F_a(θ) / sin θ,          a = t/8
//   SO(3):  p_t(θ) = e^{t/8} (√π/4) a^{−3/2} · [F_a(θ) − ¼F_{4a}(2θ)] / sin θ
// (SO(3) keeps only odd `n = 2·label + 1`; subtracting the even part
// re-indexed as n = 2m gives the bracket, and F_a(θ) ≥ 2 · ¼F_{4a}(2θ) in
// the small-`a` limit so the subtraction loses at most one bit.)
//
// Everything is assembled in log scale from signed `(ln |x|, sign x)` terms,
// so values as deep as e^{−1600} come back as finite logarithms.
// ---------------------------------------------------------------------------

/// Combine signed log-scale terms: `(ln|x_i|, sgn x_i) ↦ (ln|Σx_i|, sgn Σx_i)`
/// with the largest magnitude factored out.
fn signed_lse(terms: &[(f64, f64)]) -> (f64, f64) {
    let m = terms.iter().fold(f64::NEG_INFINITY, |acc, t| acc.max(t.0));
    let sum: f64 = terms.iter().map(|&(l, s)| s * (l - m).exp()).sum();
    (m + sum.abs().ln(), if sum >= 0.0 { 1.0 } else { -1.0 })
}

/// Image terms of `F_a(ψ)` for `ψ ∈ (0, π/2]`: the central image plus four
/// `±` pairs at shifts 2πk. With `a ≤ 1/2` the first dropped pair is below
/// e^{−440} relative to the central image. Kept pairs nearly cancel
/// internally only when ψ is tiny, where their whole weight relative to the
/// central image is under e^{−15}, so plain signed summation is safe.
fn images_from_zero(a: f64, psi: f64, terms: &mut Vec<(f64, f64)>) {
    terms.push((psi.ln() - psi * psi / (4.0 * a), 1.0));
    for k in 1..=4 {
        let u = TAU * k as f64;
        let (wp, wm) = (u + psi, u - psi);
        terms.push((wp.ln() - wp * wp / (4.0 * a), 1.0));
        terms.push((wm.ln() - wm * wm / (4.0 * a), -1.0));
    }
}

/// Image terms of `F_a(π − d)` for `d ∈ (0, π/2]`, grouped as pairs
/// `(2k+1)π ∓ d` around each odd multiple of π. When the pair nearly
/// cancels (`x = (2k+1)π·d/2a < 1`) it is fused through
/// `(p−d)e^{−(p−d)²/4a} − (p+d)e^{−(p+d)²/4a} = 2e^{−(p²+d²)/4a}(p·sinh x − d·cosh x)`,
/// whose inner difference ≈ `d(p²/2a − 1)` is positive and fully accurate
/// because `p²/2a ≥ 9` for `a ≤ 1/2`; otherwise the images stay separate.
fn images_near_pi(a: f64, d: f64, terms: &mut Vec<(f64, f64)>) {
    for k in 0..5u32 {
        let p = (2 * k + 1) as f64 * PI;
        let x = p * d / (2.0 * a);
        if x < 1.0 {
            let inner = p * x.sinh() - d * x.cosh();
            terms.push(((2.0 * inner).ln() - (p * p + d * d) / (4.0 * a), 1.0));
        } else {
            let (wm, wp) = (p - d, p + d);
            terms.push((wm.ln() - wm * wm / (4.0 * a), 1.0));
            terms.push((wp.ln() - wp * wp / (4.0 * a), -1.0));
        }
    }
}

/// `(ln |F_a(ψ)|, sign)` for `ψ ∈ [0, π]`. `F_a` vanishes linearly at both
/// endpoints, so the argument is clamped `DUAL_ANGLE_FLOOR` away from them;
/// callers whose denominator shares the zero must clamp *before* calling so
/// numerator and denominator see the same angle.
fn f_log(a: f64, psi: f64) -> (f64, f64) {
    let mut terms = Vec::with_capacity(10);
    if psi <= PI / 2.0 {
        images_from_zero(a, psi.max(DUAL_ANGLE_FLOOR), &mut terms);
    } else {
        images_near_pi(a, (PI - psi).max(DUAL_ANGLE_FLOOR), &mut terms);
    }
    signed_lse(&terms)
}

/// `ln( e^a √π a^{−3/2} / 4 )`, the prefactor shared by both dual forms.
fn dual_log_prefactor(a: f64) -> f64 {
    a + 0.5 * PI.ln() - 4.0f64.ln() - 1.5 * a.ln()
}

/// `ln p_t(θ)` on SU(2) through the image sum (valid for `t ≤ 1`).
fn su2_log_dual(t: f64, theta: f64) -> f64 {
    let a = t / 8.0;
    let mut terms = Vec::with_capacity(10);
    // F and sin share simple zeros at 0 and π; evaluating both at the same
    // clamped angle keeps their (finite, nonzero) ratio exact there.
    let (log_f, sign, ln_sin) = if theta <= PI / 2.0 {
        let p = theta.max(DUAL_ANGLE_FLOOR);
        images_from_zero(a, p, &mut terms);
        let (l, s) = signed_lse(&terms);
        (l, s, p.sin().ln())
    } else {
        let d = (PI - theta).max(DUAL_ANGLE_FLOOR);
        images_near_pi(a, d, &mut terms);
        let (l, s) = signed_lse(&terms);
        (l, s, d.sin().ln())
    };
    debug_assert!(
        sign > 0.0,
        "su2 image sum lost positivity at t={t}, θ={theta}"
    );
    dual_log_prefactor(a) + log_f - ln_sin
}

/// `ln p_t(θ)` on SO(3) through the image sum (valid for `t ≤ 1`).
fn so3_log_dual(t: f64, theta: f64) -> f64 {
    let a = t / 8.0;
    let mut terms = Vec::with_capacity(10);
    let ((log_num, sign), ln_sin) = if theta <= PI / 2.0 {
        let p = theta.max(DUAL_ANGLE_FLOOR);
        images_from_zero(a, p, &mut terms);
        let f1 = signed_lse(&terms);
        // Both F arguments derive from the same clamped angle: near θ = 0
        // the bracket is F_a(p) − ¼F_{4a}(2p) ≈ p − p/2, and the halved slope
        // must divide the same sin p.
        let (l2, s2) = f_log(4.0 * a, 2.0 * p);
        (signed_lse(&[f1, (l2 - 4.0f64.ln(), -s2)]), p.sin().ln())
    } else {
        let d = (PI - theta).max(DUAL_ANGLE_FLOOR);
        images_near_pi(a, d, &mut terms);
        let f1 = signed_lse(&terms);
        // F_{4a}(2θ) = −F_{4a}(2π − 2θ) = −F_{4a}(2d) by oddness and
        // 2π-periodicity, so the even-part correction enters with a plus
        // sign; using the same clamped `d` keeps the ratio against
        // sin θ = sin d exact where all three factors vanish linearly.
        let (l2, s2) = f_log(4.0 * a, 2.0 * d);
        (signed_lse(&[f1, (l2 - 4.0f64.ln(), s2)]), d.sin().ln())
    };
    debug_assert!(
        sign > 0.0,
        "so3 image sum lost positivity at t={t}, θ={theta}"
    );
    dual_log_prefactor(a) + log_num - ln_sin
}

/// `ln p_t(θ)` on U(1): wrapped Gaussian with the nearest image factored
/// out, so deep tails return finite logs instead of underflowing.
fn u1_log_dual(t: f64, theta: f64) -> f64 {
    let d0 = theta - TAU * (theta / TAU).round();
    let mut rest = 0.0;
    for k in -6i64..=6 {
        let d = d0 - TAU * k as f64;
        rest += ((d0 * d0 - d * d) / (2.0 * t)).exp();
    }
    (TAU / t).sqrt().ln() - d0 * d0 / (2.0 * t) + rest.ln()
}

/// Evaluate `p_t` on a conjugacy class with certified truncation.
pub fn heat_kernel_eval(group: Group, t: f64, c: &ConjClass, tol: f64) -> Result<HeatKernelEval> {
    if c.group != group {
        return Err(Error::GroupMismatch(group.name(), c.group.name()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check_time(group, t)?;
    match group {
        Group::U1 => {
            if t < 1.0 {
                // The dual series truncated at |k − θ/2π| ≤ 6 has tail below
                // e^{−(2π·5)²/2} / √t, far under any practical tolerance.
                Ok(HeatKernelEval {
                    group,
                    t,
                    value: u1_heat_dual(t, c.angle),
                    cutoff_casimir: 0.0,
                    tail_bound: f64::MIN_POSITIVE,
                })
            } else {
                Ok(u1_heat_series(t, c.angle, tol))
            }
        }
        _ => {
            if t < SEMISIMPLE_DUAL_SWITCH {
                // Image sum: exact to roundoff; images beyond the 4th are
                // below e^{−440} relative, so the only representable bound
                // on the dropped tail is the smallest positive double.
                let log_p = match group {
                    Group::Su2 => su2_log_dual(t, c.angle),
                    _ => so3_log_dual(t, c.angle),
                };
                Ok(HeatKernelEval {
                    group,
                    t,
                    value: log_p.exp(),
                    cutoff_casimir: 0.0,
                    tail_bound: f64::MIN_POSITIVE,
                })
            } else {
                semisimple_heat_series(group, t, c.angle, tol)
            }
        }
    }
}

/// Evaluate `p_t` on a conjugacy class (value only, default certificate).
pub fn heat_kernel(group: Group, t: f64, c: &ConjClass, tol: f64) -> Result<f64> {
    heat_kernel_eval(group, t, c, tol).map(|e| e.value)
}

/// `ln p_t` on a conjugacy class, finite even where the kernel value
/// underflows double precision.
///
/// In the image-sum regime (`t < 1` for every group) the log is formed
/// directly, so tail values like e^{−1600} come back exact to roundoff.
/// Otherwise the character series is evaluated and its logarithm taken; in
/// that regime the kernel minimum provably clears the series' roundoff
/// noise, and a nonpositive value is reported as an error rather than a NaN.
pub fn log_heat_kernel(group: Group, t: f64, c: &ConjClass, tol: f64) -> Result<f64> {
    if c.group != group {
        return Err(Error::GroupMismatch(group.name(), c.group.name()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check_time(group, t)?;
    match group {
        Group::U1 => {
            if t < 1.0 {
                Ok(u1_log_dual(t, c.angle))
            } else {
                // min_θ p_t(θ) = p_1(π) ≈ 0.0354 at t = 1 and increases
                // with t, so the series value is safely positive here.
                Ok(u1_heat_series(t, c.angle, tol).value.ln())
            }
        }
        _ => {
            if t < SEMISIMPLE_DUAL_SWITCH {
                Ok(match group {
                    Group::Su2 => su2_log_dual(t, c.angle),
                    _ => so3_log_dual(t, c.angle),
                })
            } else {
                let eval = semisimple_heat_series(group, t, c.angle, tol)?;
                if eval.value > 0.0 {
                    Ok(eval.value.ln())
                } else {
                    Err(Error::SeriesResolution {
                        t,
                        value: eval.value,
                    })
                }
            }
        }
    }
}

/// Casimir cutoff beyond which every irrep contributes less than `tol` to
/// any time-`t` character series (used to fix projection bases).
pub fn casimir_cutoff_for(group: Group, t: f64, tol: f64) -> f64 {
    let mut cutoff: f64 = 1.0;
    loop {
        let worst = irrep_enumerate(group, cutoff)
            .last()
            .map(|r| r.dim() * r.dim() * (-r.casimir() * t / 2.0).exp())
            .unwrap_or(1.0);
        if worst < tol || cutoff > CASIMIR_HARD_CAP {
            return cutoff;
        }
        cutoff *= 2.0;
    }
}

/// Residual `|(p_s ⋆ p_t)(c) − p_{s+t}(c)|`.
///
/// The convolution is computed honestly through quadrature: both kernels are
/// projected onto characters with `n_quad`-point class quadrature and the
/// coefficients combined by `χ_α ⋆ χ_β = δ_{αβ} χ_α / dim α`. Only the
/// comparison value `p_{s+t}` uses the closed-form series.
pub fn semigroup_check(group: Group, s: f64, t: f64, c: &ConjClass, n_quad: usize) -> Result<f64> {
    check_time(group, s)?;
    check_time(group, t)?;
    let nodes = class_quadrature(group, n_quad)?;
    let tol = 1e-12;
    let cutoff = casimir_cutoff_for(group, s.min(t), 1e-14);
    let irreps = irrep_enumerate(group, cutoff);

    let ps: Vec<f64> = nodes
        .iter()
        .map(|(node, _)| heat_kernel(group, s, node, tol))
        .collect::<Result<_>>()?;
    let pt: Vec<f64> = nodes
        .iter()
        .map(|(node, _)| heat_kernel(group, t, node, tol))
        .collect::<Result<_>>()?;

    let mut conv = Complex64::ZERO;
    for r in &irreps {
        let mut a = Complex64::ZERO;
        let mut b = Complex64::ZERO;
        for (i, (node, w)) in nodes.iter().enumerate() {
            let chi = character(r, node);
            a += w * ps[i] * chi.conj();
            b += w * pt[i] * chi.conj();
        }
        conv += a * b * character(r, c) / r.dim();
    }
    let direct = heat_kernel(group, s + t, c, tol)?;
    Ok((conv.re - direct).abs().max(conv.im.abs()))
}

/// Inverse-CDF table for the class-angle density of `p_t`.
struct CdfTable {
    /// Angles at the table nodes (uniform grid on the adaptive support).
    angles: Vec<f64>,
    /// Cumulative masses at the nodes, normalized so the last entry is 1.
    cdf: Vec<f64>,
}

impl CdfTable {
    fn build(group: Group, t: f64) -> Result<CdfTable> {
        // Adaptive support: the class density is negligible beyond ~20√t,
        // and tightening the grid keeps interpolation bias well below
        // Monte-Carlo error at small t.
        let (lo, hi) = match group {
            Group::U1 => {
                let l = PI.min(20.0 * t.sqrt());
                (-l, l)
            }
            _ => (0.0, PI.min(20.0 * t.sqrt())),
        };
        let n = CDF_TABLE_NODES;
        let tol = 1e-12;
        let mut angles = Vec::with_capacity(n + 1);
        let mut dens = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let theta = lo + (hi - lo) * i as f64 / n as f64;
            let class_angle = if theta < 0.0 { theta + TAU } else { theta };
            let p = heat_kernel(
                group,
                t,
                &ConjClass {
                    group,
                    angle: class_angle,
                },
                tol,
            )?;
            // Density of the class angle itself: Haar pushforward weight.
            let weight = match group {
                Group::U1 => 1.0 / TAU,
                _ => 2.0 / PI * theta.sin().powi(2),
            };
            angles.push(theta);
            dens.push((p * weight).max(0.0));
        }
        let mut cdf = vec![0.0];
        for i in 1..=n {
            let step = angles[i] - angles[i - 1];
            cdf.push(cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * step);
        }
        let total = *cdf.last().unwrap();
        if !(total > 0.0) {
            return Err(Error::InvalidTime(t, "degenerate class density table"));
        }
        for v in &mut cdf {
            *v /= total;
        }
        Ok(CdfTable { angles, cdf })
    }

    fn sample_angle(&self, u: f64) -> f64 {
        // Binary search for the bracketing interval, then linear interp.
        let i = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (a0, a1) = (self.angles[i - 1], self.angles[i]);
        if c1 > c0 {
            a0 + (a1 - a0) * (u - c0) / (c1 - c0)
        } else {
            a0
        }
    }
}

type CdfCache = Mutex<HashMap<(Group, u64), Arc<CdfTable>>>;

fn cdf_table(group: Group, t: f64) -> Result<Arc<CdfTable>> {
    static CACHE: OnceLock<CdfCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (group, t.to_bits());
    if let Some(table) = cache.lock().unwrap().get(&key) {
        return Ok(table.clone());
    }
    let table = Arc::new(CdfTable::build(group, t)?);
    cache.lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// Draw one element with law `p_t` (exact up to the tabulated inverse CDF).
///
/// The class angle is drawn by inverse transform on a 4096-node table of the
/// class density; the element is completed by conjugating a representative
/// by an independent Haar element (SU(2)/SO(3)) or used directly (U(1)).
pub fn sample_heat_kernel(group: Group, t: f64, rng: &mut Rng) -> Result<GroupElement> {
    check_time(group, t)?;
    let table = cdf_table(group, t)?;
    let theta = table.sample_angle(rng.random::<f64>());
    match group {
        Group::U1 => Ok(GroupElement::u1(theta)),
        _ => {
            let rep = ConjClass {
                group,
                angle: theta,
            }
            .representative();
            let k = haar_sample(group, rng);
            Ok(rep.conjugate_by(&k))
        }
    }
}

/// Class-angle distance to the identity: `min(θ, 2π−θ)` for U(1), the class
/// angle itself for SU(2)/SO(3).
pub fn rho(g: &GroupElement) -> f64 {
    let c = g.conj_class();
    match g.group() {
        Group::U1 => c.angle.min(TAU - c.angle),
        _ => c.angle,
    }
}

/// Monte-Carlo estimate of `∫ ρ(g)^p p_t(g) dg`.
pub fn rho_moment(group: Group, t: f64, p: u32, n_mc: usize, rng: &mut Rng) -> Result<f64> {
    if ![1, 2, 4].contains(&p) {
        return Err(Error::InvalidArgument(
            "rho moment power must be 1, 2 or 4".into(),
        ));
    }
    let mut acc = 0.0;
    for _ in 0..n_mc {
        let g = sample_heat_kernel(group, t, rng)?;
        acc += rho(&g).powi(p as i32);
    }
    Ok(acc / n_mc as f64)
}
