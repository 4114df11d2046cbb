//! Gaussian and white-noise realization of the U(1) measure on a closed
//! surface.
//!
//! With faces of areas `σ_1, …, σ_F` summing to `σ_M`, the joint law of
//! the face-boundary holonomies is realized exactly as
//!
//! ```text
//! H_i = exp(i(X_i + (σ_i/σ_M)·T)),   X_i = Y_i − (σ_i/σ_M)·S,
//! ```
//!
//! where `Y_i ~ N(0, σ_i)` are independent (a white noise evaluated on the
//! faces), `S = Σ Y_i`, and `T` is an independent discrete Gaussian on
//! `x + 2πZ` of scale `σ_M` carrying the total holonomy `e^{ix}` (`x = 0`
//! for the unconditioned closed surface). The bridge part sums to zero, so
//! `Π H_i = e^{ix}` holds identically, draw by draw.
//!
//! Holonomies of arbitrary closed words follow by decomposing the word in
//! homology: `c = Σ λ_j ℓ_j + Σ μ_F ∂F` gives
//!
//! ```text
//! WH_c = exp(i(W(u_c) + σ_int(c)·T)) · Π_j U_j^{λ_j},
//! ```
//!
//! with `u_c = Σ μ_F 1_F − σ_int(c)·1` the mean-adjusted face indicator,
//! `σ_int(c) = Σ μ_F σ_F / σ_M`, `W(u_c) = Σ c_F Y_F` the white-noise
//! pairing, and `U_j` independent uniform phases on the first-homology
//! generators. This is multiplicative in the word by construction.

use crate::error::{Error, Result};
use crate::graph::{IntCycle, PathWord, SurfaceGraph};
use crate::group::{reduce_angle, GroupElement, TAU};
use crate::rng::Rng;
use crate::stats::{gap_passes, mean_stderr, mean_stderr_complex};
use crate::ym::{metropolis_sample, wilson_estimator, ConditioningSpec};
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

/// Draw the total-holonomy lift: a discrete Gaussian on `x + 2πZ` with
/// weights `∝ e^{−t²/(2σ)}`. The summation window is chosen so the
/// discarded tail is below 1e-15 of the total mass.
pub fn sample_t_lift(sigma: f64, x: f64, rng: &mut Rng) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidTime(
            sigma,
            "total area must be positive and finite",
        ));
    }
    // e^{−(2πk)²/(2σ)} < 1e-15 · max weight once (2πk − |x|)² > 2σ·36.
    let k_max = (((72.0 * sigma).sqrt() + x.abs()) / TAU).ceil() as i64 + 2;
    let mut weights = Vec::with_capacity((2 * k_max + 1) as usize);
    let mut total = 0.0;
    for k in -k_max..=k_max {
        let t = x + TAU * k as f64;
        let w = (-t * t / (2.0 * sigma)).exp();
        total += w;
        weights.push((t, w));
    }
    let mut u = rng.random::<f64>() * total;
    for (t, w) in &weights {
        u -= w;
        if u <= 0.0 {
            return Ok(*t);
        }
    }
    Ok(weights.last().expect("window is nonempty").0)
}

/// A joint draw of the Gaussian face field: white-noise masses `Y_i` and
/// the total lift `T`.
#[derive(Debug, Clone)]
pub struct GaussianFaceField {
    pub areas: Vec<f64>,
    /// Total holonomy angle: the faces multiply to `e^{ix}`.
    pub x: f64,
    /// White-noise masses, `Y_i ~ N(0, σ_i)` independent.
    pub y: Vec<f64>,
    /// `S = Σ Y_i`.
    pub s: f64,
    /// Discrete-Gaussian lift in `x + 2πZ`.
    pub t_lift: f64,
}

impl GaussianFaceField {
    pub fn sigma_total(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Lifted face angle `X_i + (σ_i/σ_M)·T`.
    pub fn angle(&self, i: usize) -> f64 {
        let ratio = self.areas[i] / self.sigma_total();
        self.y[i] - ratio * self.s + ratio * self.t_lift
    }

    pub fn holonomy(&self, i: usize) -> GroupElement {
        GroupElement::u1(reduce_angle(self.angle(i)))
    }

    pub fn holonomies(&self) -> Vec<GroupElement> {
        (0..self.areas.len()).map(|i| self.holonomy(i)).collect()
    }
}

/// Sample the Gaussian representation of the face-holonomy law with total
/// holonomy `e^{ix}`.
pub fn sample_gaussian_rep(areas: &[f64], x: f64, rng: &mut Rng) -> Result<GaussianFaceField> {
    if areas.is_empty() {
        return Err(Error::InvalidArgument("need at least one face".into()));
    }
    if areas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidArgument(
            "face areas must be positive and finite".into(),
        ));
    }
    let sigma: f64 = areas.iter().sum();
    let y: Vec<f64> = areas
        .iter()
        .map(|&a| {
            let z: f64 = StandardNormal.sample(rng);
            z * a.sqrt()
        })
        .collect();
    let s = y.iter().sum();
    let t_lift = sample_t_lift(sigma, x, rng)?;
    Ok(GaussianFaceField {
        areas: areas.to_vec(),
        x,
        y,
        s,
        t_lift,
    })
}

/// White-noise pairing data for one closed word.
#[derive(Debug, Clone, PartialEq)]
pub struct DlpVector {
    /// Per-face coefficient of the mean-adjusted indicator,
    /// `c_F = μ_F − σ_int`.
    pub face_coefficients: Vec<f64>,
    /// `Σ μ_F σ_F / σ_M` (unreduced; for `x = 0` only its value mod 1
    /// affects the holonomy since `T ∈ 2πZ`).
    pub sigma_int: f64,
    /// Winding numbers `λ_j` on the first-homology generators.
    pub h1_exponents: Vec<i64>,
}

impl DlpVector {
    /// `‖u_c‖²_{L²(area)} = Σ c_F² σ_F`. For a single face boundary this is
    /// `σ_F (σ_M − σ_F) / σ_M`.
    pub fn norm_sqr(&self, areas: &[f64]) -> f64 {
        self.face_coefficients
            .iter()
            .zip(areas)
            .map(|(c, a)| c * c * a)
            .sum()
    }
}

/// Decompose a closed word in homology and build its white-noise pairing
/// vector.
pub fn dlp_of_cycle(g: &SurfaceGraph, w: &PathWord, h1_loops: &[IntCycle]) -> Result<DlpVector> {
    if !w.is_empty() && !g.word_is_closed(w)? {
        return Err(Error::InvalidWord(
            "white-noise holonomy needs a closed word".into(),
        ));
    }
    let c = IntCycle::from_word(g.n_edges(), w);
    let (lambda, mu) = crate::graph::homology_decompose(g, &c, h1_loops)?;
    let sigma_m = g.total_area();
    let sigma_int = mu
        .iter()
        .zip(&g.faces)
        .map(|(&m, f)| m as f64 * f.area)
        .sum::<f64>()
        / sigma_m;
    let face_coefficients = mu.iter().map(|&m| m as f64 - sigma_int).collect();
    Ok(DlpVector {
        face_coefficients,
        sigma_int,
        h1_exponents: lambda,
    })
}

/// Lifted angle of the white-noise holonomy under one field draw:
/// `W(u_c) + σ_int·T + Σ λ_j φ_j` (the `φ_j` are the uniform phases of the
/// homology generators for this draw).
pub fn wn_angle(dlp: &DlpVector, field: &GaussianFaceField, h1_phases: &[f64]) -> Result<f64> {
    if dlp.face_coefficients.len() != field.areas.len() {
        return Err(Error::InvalidArgument(format!(
            "pairing vector has {} faces, field has {}",
            dlp.face_coefficients.len(),
            field.areas.len()
        )));
    }
    if dlp.h1_exponents.len() != h1_phases.len() {
        return Err(Error::InvalidArgument(format!(
            "{} homology exponents but {} phases",
            dlp.h1_exponents.len(),
            h1_phases.len()
        )));
    }
    let w0: f64 = dlp
        .face_coefficients
        .iter()
        .zip(&field.y)
        .map(|(c, y)| c * y)
        .sum();
    let h1: f64 = dlp
        .h1_exponents
        .iter()
        .zip(h1_phases)
        .map(|(&l, p)| l as f64 * p)
        .sum();
    Ok(w0 + dlp.sigma_int * field.t_lift + h1)
}

/// The white-noise holonomy `WH_c = e^{i·wn_angle}`.
pub fn wn_holonomy(
    dlp: &DlpVector,
    field: &GaussianFaceField,
    h1_phases: &[f64],
) -> Result<Complex64> {
    Ok(Complex64::from_polar(1.0, wn_angle(dlp, field, h1_phases)?))
}

/// One moment to compare between the two realizations.
#[derive(Debug, Clone)]
pub struct TestWord {
    pub label: String,
    pub word: PathWord,
    /// Winding power `k`: the compared moment is `E[H^k]`.
    pub power: i64,
}

impl TestWord {
    pub fn new(label: &str, word: PathWord, power: i64) -> TestWord {
        TestWord {
            label: label.to_string(),
            word,
            power,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentComparison {
    pub label: String,
    pub power: i64,
    pub wn: Complex64,
    pub wn_stderr: f64,
    pub mc: Complex64,
    pub mc_stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct LawEqualityReport {
    pub fixture: String,
    pub comparisons: Vec<MomentComparison>,
    pub pass: bool,
}

/// Compare word moments `E[H_w^k]` between the white-noise realization and
/// a Metropolis chain sampling the edge measure on the same graph. The two
/// laws are equal, so every comparison must agree within `k_sigma` combined
/// standard errors.
#[allow(clippy::too_many_arguments)]
pub fn law_equality_test(
    name: &str,
    graph: &SurfaceGraph,
    h1_loops: &[IntCycle],
    words: &[TestWord],
    n_wn: usize,
    mc_steps: usize,
    k_sigma: f64,
    rng: &mut Rng,
) -> Result<LawEqualityReport> {
    let report = graph.validate();
    if !report.is_ok() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    if !graph.is_closed() {
        return Err(Error::InvalidGraph(
            "the white-noise realization needs a closed surface".into(),
        ));
    }
    let areas: Vec<f64> = graph.faces.iter().map(|f| f.area).collect();
    let dlps: Vec<DlpVector> = words
        .iter()
        .map(|tw| dlp_of_cycle(graph, &tw.word, h1_loops))
        .collect::<Result<_>>()?;

    // White-noise side: shared field and phases per draw.
    let mut wn_values: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n_wn); words.len()];
    for _ in 0..n_wn {
        let field = sample_gaussian_rep(&areas, 0.0, rng)?;
        let phases: Vec<f64> = (0..h1_loops.len())
            .map(|_| rng.random::<f64>() * TAU)
            .collect();
        for (tw, (dlp, acc)) in words.iter().zip(dlps.iter().zip(&mut wn_values)) {
            let angle = wn_angle(dlp, &field, &phases)?;
            acc.push(Complex64::from_polar(1.0, tw.power as f64 * angle));
        }
    }

    // Edge-measure side: one chain, all words measured on it.
    let chain = metropolis_sample(
        crate::group::Group::U1,
        graph,
        &ConditioningSpec::none(),
        mc_steps,
        None,
        4,
        rng,
    )?;
    let burn = chain.samples.len() / 10;

    let mut comparisons = Vec::with_capacity(words.len());
    let mut pass = true;
    for (tw, values) in words.iter().zip(&wn_values) {
        let (wn, wn_stderr) = mean_stderr_complex(values);
        let beta = crate::group::Irrep::new(crate::group::Group::U1, tw.power)?;
        let (mc, mc_stderr) = wilson_estimator(&chain, &tw.word, &beta, burn)?;
        let ok = gap_passes(wn, wn_stderr, mc, mc_stderr, k_sigma, 1e-9);
        pass &= ok;
        comparisons.push(MomentComparison {
            label: tw.label.clone(),
            power: tw.power,
            wn,
            wn_stderr,
            mc,
            mc_stderr,
            pass: ok,
        });
    }
    Ok(LawEqualityReport {
        fixture: name.to_string(),
        comparisons,
        pass,
    })
}

/// The three standard closed fixtures with a preregistered word battery.
pub fn standard_law_equality_suite(
    n_wn: usize,
    mc_steps: usize,
    k_sigma: f64,
    rng: &mut Rng,
) -> Result<Vec<LawEqualityReport>> {
    use crate::graph::fixtures::{sphere_three_face, sphere_two_face, torus_h1, torus_two_face};
    let mut out = Vec::new();

    let g = sphere_two_face(0.35, 0.65);
    let f0 = g.faces[0].word.clone();
    let f1 = g.faces[1].word.clone();
    let words = vec![
        TestWord::new("face0 k=1", f0.clone(), 1),
        TestWord::new("face0 k=2", f0.clone(), 2),
        TestWord::new("face0 k=3", f0, 3),
        TestWord::new("face1 k=1", f1, 1),
    ];
    out.push(law_equality_test(
        "sphere-2",
        &g,
        &[],
        &words,
        n_wn,
        mc_steps,
        k_sigma,
        rng,
    )?);

    let g = sphere_three_face(0.25, 0.35, 0.4);
    let f0 = g.faces[0].word.clone();
    let f1 = g.faces[1].word.clone();
    let f2 = g.faces[2].word.clone();
    let words = vec![
        TestWord::new("face0 k=1", f0.clone(), 1),
        TestWord::new("face1 k=1", f1.clone(), 1),
        TestWord::new("face2 k=1", f2, 1),
        TestWord::new("face1 k=2", f1.clone(), 2),
        TestWord::new("face0·face1 k=1", f0.concat(&f1), 1),
    ];
    out.push(law_equality_test(
        "sphere-3",
        &g,
        &[],
        &words,
        n_wn,
        mc_steps,
        k_sigma,
        rng,
    )?);

    let g = torus_two_face(0.5, 0.5);
    let h1 = torus_h1(g.n_edges());
    let f0 = g.faces[0].word.clone();
    let a = PathWord(vec![(0, 1)]);
    let b = PathWord(vec![(1, 1)]);
    let words = vec![
        TestWord::new("face0 k=1", f0.clone(), 1),
        TestWord::new("face0 k=2", f0.clone(), 2),
        TestWord::new("loop a k=1", a.clone(), 1),
        TestWord::new("loop b k=1", b, 1),
        TestWord::new("a·face0 k=1", a.concat(&f0), 1),
    ];
    out.push(law_equality_test(
        "torus-2", &g, &h1, &words, n_wn, mc_steps, k_sigma, rng,
    )?);

    Ok(out)
}

/// Summary of the white-noise extraction statistic
/// `I = (1/i) Σ_j f_j (H_j − 1)` over an equal-area partition.
#[derive(Debug, Clone)]
pub struct ExtractionReport {
    pub n_faces: usize,
    pub n_draws: usize,
    pub mean_re: f64,
    pub mean_re_stderr: f64,
    pub var_re: f64,
    pub var_re_stderr: f64,
    pub mean_im: f64,
    pub mean_im_stderr: f64,
    /// RMS of `Re I − T` across draws (for `f ≡ 1` this vanishes as the
    /// partition refines: the imaginary parts of `H_j` recover the lift).
    pub rms_re_minus_t: f64,
}

/// Estimate the law of `I = (1/i) Σ f_j (H_j − 1)`, i.e.
/// `Re I = Σ f_j sin θ_j` and `Im I = Σ f_j (1 − cos θ_j)`, under the
/// Gaussian face field on an equal-area partition with total holonomy
/// `e^{ix}`. As the partition refines, `Re I` converges to the white-noise
/// pairing `W(f) + f̄·T` (variance `‖f‖²` for mean-zero `f`) and `Im I` to
/// `Σ f_j σ_j / 2`.
pub fn wn_extraction_experiment(
    areas: &[f64],
    f: &[f64],
    x: f64,
    n_draws: usize,
    rng: &mut Rng,
) -> Result<ExtractionReport> {
    if areas.len() != f.len() {
        return Err(Error::InvalidArgument(format!(
            "{} areas but {} test-function values",
            areas.len(),
            f.len()
        )));
    }
    if areas.is_empty() || n_draws < 32 {
        return Err(Error::InvalidArgument(
            "need at least one face and 32 draws".into(),
        ));
    }
    let a0 = areas[0];
    if areas.iter().any(|&a| (a - a0).abs() > 1e-12 * a0.max(1.0)) {
        return Err(Error::InvalidArgument(
            "white-noise extraction requires an equal-area partition".into(),
        ));
    }

    let mut res = Vec::with_capacity(n_draws);
    let mut ims = Vec::with_capacity(n_draws);
    let mut sq_gap = 0.0;
    for _ in 0..n_draws {
        let field = sample_gaussian_rep(areas, x, rng)?;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &fj) in f.iter().enumerate() {
            let theta = field.angle(j);
            re += fj * theta.sin();
            im += fj * (1.0 - theta.cos());
        }
        sq_gap += (re - field.t_lift) * (re - field.t_lift);
        res.push(re);
        ims.push(im);
    }
    let (mean_re, mean_re_stderr) = mean_stderr(&res);
    let (mean_im, mean_im_stderr) = mean_stderr(&ims);
    let centered: Vec<f64> = res.iter().map(|r| (r - mean_re) * (r - mean_re)).collect();
    let (var_re, var_re_stderr) = mean_stderr(&centered);
    Ok(ExtractionReport {
        n_faces: areas.len(),
        n_draws,
        mean_re,
        mean_re_stderr,
        var_re,
        var_re_stderr,
        mean_im,
        mean_im_stderr,
        rms_re_minus_t: (sq_gap / n_draws as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn t_lift_lives_on_the_shifted_lattice() {
        let mut rng = stream(81, 0);
        for x in [0.0, 1.234] {
            for _ in 0..500 {
                let t = sample_t_lift(5.0, x, &mut rng).unwrap();
                let k = (t - x) / TAU;
                assert_abs_diff_eq!(k, k.round(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn t_lift_matches_discrete_gaussian_frequencies() {
        // σ = 20: P(±2π)/P(0) = e^{−(2π)²/40} ≈ 0.37277.
        let mut rng = stream(82, 0);
        let n = 40_000;
        let mut counts = [0usize; 3]; // k = 0, |k| = 1, |k| ≥ 2
        for _ in 0..n {
            let t = sample_t_lift(20.0, 0.0, &mut rng).unwrap();
            let k = (t / TAU).round().abs() as usize;
            counts[k.min(2)] += 1;
        }
        let ratio = (-TAU * TAU / 40.0).exp();
        let ratio2 = (-4.0 * TAU * TAU / 40.0).exp();
        let z = 1.0 + 2.0 * ratio + 2.0 * ratio2;
        let expect0 = 1.0 / z;
        let p0 = counts[0] as f64 / n as f64;
        let se = (expect0 * (1.0 - expect0) / n as f64).sqrt();
        assert!((p0 - expect0).abs() < 4.0 * se, "p0 {p0} vs {expect0}");
        let expect1 = 2.0 * ratio / z;
        let p1 = counts[1] as f64 / n as f64;
        let se1 = (expect1 * (1.0 - expect1) / n as f64).sqrt();
        assert!((p1 - expect1).abs() < 4.0 * se1, "p1 {p1} vs {expect1}");
    }

    #[test]
    fn face_product_is_total_holonomy_exactly() {
        let mut rng = stream(83, 0);
        for x in [0.0, 1.234, -2.5] {
            for _ in 0..200 {
                let field = sample_gaussian_rep(&[0.25, 0.35, 0.4], x, &mut rng).unwrap();
                let total: f64 = (0..3).map(|i| field.angle(i)).sum();
                // Σ angles = T exactly, and T ≡ x (mod 2π).
                assert_abs_diff_eq!(total, field.t_lift, epsilon = 1e-12);
                let prod = field
                    .holonomies()
                    .iter()
                    .fold(GroupElement::identity(crate::group::Group::U1), |acc, h| {
                        h.multiply(&acc)
                    });
                let d = reduce_angle(prod.angle() - x);
                assert!(d.min(TAU - d) < 1e-9, "product angle off by {d}");
            }
        }
    }

    #[test]
    fn two_face_marginal_matches_heat_kernel_moment() {
        // E[e^{iθ_0}] on areas (0.3, 0.7) equals the closed-form sphere
        // moment e^{−0.3·0.7/2} up to a discrete-Gaussian correction < 1e-9.
        let mut rng = stream(84, 0);
        let n = 40_000;
        let values: Vec<Complex64> = (0..n)
            .map(|_| {
                let field = sample_gaussian_rep(&[0.3, 0.7], 0.0, &mut rng).unwrap();
                Complex64::from_polar(1.0, field.angle(0))
            })
            .collect();
        let (mean, stderr) = mean_stderr_complex(&values);
        let expect = Complex64::new(0.900324516280397, 0.0);
        assert!(
            gap_passes(mean, stderr, expect, 0.0, 4.0, 1e-12),
            "mean {mean} vs {expect} (σ {stderr})"
        );
    }

    #[test]
    fn dlp_face_boundary_identities() {
        let g = sphere_three_face(0.25, 0.35, 0.4);
        let areas: Vec<f64> = g.faces.iter().map(|f| f.area).collect();
        let sigma_m: f64 = areas.iter().sum();
        for (fi, f) in g.faces.iter().enumerate() {
            let dlp = dlp_of_cycle(&g, &f.word, &[]).unwrap();
            let sf = areas[fi];
            assert_abs_diff_eq!(
                dlp.norm_sqr(&areas),
                sf * (sigma_m - sf) / sigma_m,
                epsilon = 1e-12
            );
            // σ_int ≡ σ_F/σ_M (mod 1): the closed-surface face basis drops
            // one face, so ∂F_last decomposes through the others.
            let frac = (dlp.sigma_int - sf / sigma_m).rem_euclid(1.0);
            assert!(
                frac.min(1.0 - frac) < 1e-12,
                "face {fi}: sigma_int {} vs {}",
                dlp.sigma_int,
                sf / sigma_m
            );
            assert!(dlp.h1_exponents.is_empty());
        }
    }

    #[test]
    fn dlp_is_additive_and_rejects_open_words() {
        let g = torus_two_face(0.5, 0.5);
        let h1 = torus_h1(g.n_edges());
        let a = PathWord(vec![(0, 1)]);
        let f0 = g.faces[0].word.clone();
        let d_a = dlp_of_cycle(&g, &a, &h1).unwrap();
        let d_f = dlp_of_cycle(&g, &f0, &h1).unwrap();
        let d_af = dlp_of_cycle(&g, &a.concat(&f0), &h1).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(
                d_af.face_coefficients[i],
                d_a.face_coefficients[i] + d_f.face_coefficients[i],
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(
            d_af.sigma_int,
            d_a.sigma_int + d_f.sigma_int,
            epsilon = 1e-12
        );
        assert_eq!(
            d_af.h1_exponents[0],
            d_a.h1_exponents[0] + d_f.h1_exponents[0]
        );
        assert_eq!(d_a.h1_exponents, vec![1, 0]);

        // Empty word: zero vector.
        let d0 = dlp_of_cycle(&g, &PathWord::empty(), &h1).unwrap();
        assert!(d0.face_coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(d0.h1_exponents, vec![0, 0]);
        assert_eq!(d0.sigma_int, 0.0);

        // Open word on the 3-face sphere is rejected.
        let g = sphere_three_face(0.2, 0.3, 0.5);
        // All fixture edges are self-loops there, so build an open word by
        // subdividing first.
        let g = g.subdivide_edge(0).unwrap();
        let open = PathWord(vec![(0, 1)]);
        assert!(!g.word_is_closed(&open).unwrap());
        assert!(dlp_of_cycle(&g, &open, &[]).is_err());
    }

    #[test]
    fn wn_holonomy_is_exactly_multiplicative() {
        let mut rng = stream(85, 0);
        let g = torus_two_face(0.6, 0.4);
        let h1 = torus_h1(g.n_edges());
        let areas: Vec<f64> = g.faces.iter().map(|f| f.area).collect();
        let words = [
            PathWord(vec![(0, 1)]),
            PathWord(vec![(1, 1)]),
            g.faces[0].word.clone(),
            PathWord(vec![(0, 1), (1, -1)]),
        ];
        for _ in 0..100 {
            let field = sample_gaussian_rep(&areas, 0.0, &mut rng).unwrap();
            let phases = [rng.random::<f64>() * TAU, rng.random::<f64>() * TAU];
            for w1 in &words {
                for w2 in &words {
                    let d1 = dlp_of_cycle(&g, w1, &h1).unwrap();
                    let d2 = dlp_of_cycle(&g, w2, &h1).unwrap();
                    let d12 = dlp_of_cycle(&g, &w1.concat(w2), &h1).unwrap();
                    let v1 = wn_holonomy(&d1, &field, &phases).unwrap();
                    let v2 = wn_holonomy(&d2, &field, &phases).unwrap();
                    let v12 = wn_holonomy(&d12, &field, &phases).unwrap();
                    assert!((v12 - v1 * v2).norm() < 1e-10, "{w1:?}·{w2:?}");
                }
            }
        }
    }

    #[test]
    fn law_equality_on_standard_fixtures() {
        let mut rng = stream(86, 0);
        let reports = standard_law_equality_suite(20_000, 48_000, 4.0, &mut rng).unwrap();
        assert_eq!(reports.len(), 3);
        for report in &reports {
            assert!(report.pass, "{}: {:#?}", report.fixture, report.comparisons);
        }
    }

    #[test]
    fn extraction_requires_equal_areas() {
        let mut rng = stream(87, 0);
        let err =
            wn_extraction_experiment(&[0.3, 0.7], &[1.0, -1.0], 0.0, 100, &mut rng).unwrap_err();
        assert!(err.to_string().contains("equal-area"), "{err}");
    }

    #[test]
    fn extraction_variance_recovers_test_function_norm() {
        // Mean-zero f with ‖f‖²_{L²(area)} = Σ f_j² σ_j = 1 on 1024 equal
        // faces of total area 1: Var(Re I) → ‖f‖² = 1 and E[Im I] = 0.
        let n = 1024;
        let areas = vec![1.0 / n as f64; n];
        let f: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let norm: f64 = f.iter().zip(&areas).map(|(v, a)| v * v * a).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        let mut rng = stream(88, 0);
        let report = wn_extraction_experiment(&areas, &f, 0.0, 20_000, &mut rng).unwrap();
        assert!(
            (report.var_re - 1.0).abs() < 0.05,
            "Var(Re I) = {} ± {}",
            report.var_re,
            report.var_re_stderr
        );
        assert!(
            report.mean_im.abs() < 4.0 * report.mean_im_stderr + 1e-9,
            "E[Im I] = {} ± {}",
            report.mean_im,
            report.mean_im_stderr
        );
        assert!(
            report.mean_re.abs() < 4.0 * report.mean_re_stderr + 1e-9,
            "E[Re I] = {} ± {}",
            report.mean_re,
            report.mean_re_stderr
        );
    }

    #[test]
    fn extraction_with_constant_function_recovers_lift_and_half_area() {
        // f ≡ 1, σ_M = 1, x = 0: Re I tracks the discrete-Gaussian lift T
        // and E[Im I] → σ_M/2 = 1/2 as the partition refines.
        let n = 1024;
        let areas = vec![1.0 / n as f64; n];
        let f = vec![1.0; n];
        let mut rng = stream(89, 0);
        let report = wn_extraction_experiment(&areas, &f, 0.0, 20_000, &mut rng).unwrap();
        assert!(
            report.rms_re_minus_t < 0.01,
            "rms {}",
            report.rms_re_minus_t
        );
        assert!(
            (report.mean_im - 0.5).abs() < 0.05 * 0.5,
            "E[Im I] = {} ± {}",
            report.mean_im,
            report.mean_im_stderr
        );
    }
}
