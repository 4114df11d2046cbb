//! The discrete Yang–Mills probability measure on edge configurations.
//!
//! A configuration assigns a group element to every edge of a surface
//! graph; its unnormalized density is the product, over faces, of the heat
//! kernel at the face's area evaluated on the face-boundary holonomy. This
//! module provides holonomy and density evaluation, exact conditional Haar
//! sampling, a Metropolis sampler with exact loop conditioning, Wilson-loop
//! estimation with a closed-form sphere oracle, the gauge action, and the
//! subdivision-invariance check.

use crate::error::{Error, Result};
use crate::graph::{subdivision_word_rewrite, PathWord, SurfaceGraph};
use crate::group::{
    character, class_quadrature, haar_sample, ConjClass, Group, GroupElement, Irrep,
};
use crate::heat::{heat_kernel, log_heat_kernel, rho, sample_heat_kernel};
use crate::partition::{z_eval, SurfaceSignature};
use crate::rng::Rng;
use crate::stats::{gap_passes, mean_stderr, mean_stderr_complex};
use num_complex::Complex64;
use rand::Rng as _;
use std::sync::Arc;

/// Series tolerance used by density evaluations inside the sampler.
const DENSITY_TOL: f64 = 1e-12;

/// A discrete connection: one group element per edge.
#[derive(Debug, Clone)]
pub struct EdgeConfig {
    pub graph: Arc<SurfaceGraph>,
    pub values: Vec<GroupElement>,
}

impl EdgeConfig {
    pub fn new(graph: Arc<SurfaceGraph>, values: Vec<GroupElement>) -> Result<EdgeConfig> {
        if values.len() != graph.n_edges() {
            return Err(Error::InvalidArgument(format!(
                "{} edge values for a graph with {} edges",
                values.len(),
                graph.n_edges()
            )));
        }
        if let Some(first) = values.first() {
            if values.iter().any(|v| v.group() != first.group()) {
                return Err(Error::GroupMismatch(first.group().name(), "mixed"));
            }
        }
        Ok(EdgeConfig { graph, values })
    }

    pub fn group(&self) -> Group {
        self.values[0].group()
    }
}

/// Holonomy along a word: the reversed-order product
/// `g_{i_n}^{ε_n} ⋯ g_{i_1}^{ε_1}`. The empty word yields the identity, so
/// `holonomy(w₁·w₂) = holonomy(w₂)·holonomy(w₁)`.
pub fn holonomy(cfg: &EdgeConfig, w: &PathWord) -> Result<GroupElement> {
    if w.is_empty() {
        return Ok(GroupElement::identity(cfg.group()));
    }
    cfg.graph.word_endpoints(w)?;
    let mut h = GroupElement::identity(cfg.group());
    for &(e, s) in &w.0 {
        let v = if s > 0 {
            cfg.values[e]
        } else {
            cfg.values[e].inverse()
        };
        h = v.multiply(&h);
    }
    Ok(h)
}

fn face_log_density(cfg: &EdgeConfig, face: usize) -> Result<f64> {
    let f = &cfg.graph.faces[face];
    let h = holonomy(cfg, &f.word)?;
    // Log-scale evaluation: at small areas the kernel dips far below the
    // double-precision floor in the class-angle tails, where a value-scale
    // route would return 0 or signed roundoff noise.
    match log_heat_kernel(cfg.group(), f.area, &h.conj_class(), DENSITY_TOL) {
        Ok(lp) => Ok(lp),
        Err(Error::SeriesResolution { value, .. }) => {
            Err(Error::NonpositiveDensity { face, value })
        }
        Err(e) => Err(e),
    }
}

/// Log of the unnormalized density `Π_F p_{σ(F)}(h_{∂F})`. Independent of
/// the base point and orientation of each face word (the heat kernel is
/// central and inversion-symmetric).
pub fn log_density(cfg: &EdgeConfig) -> Result<f64> {
    let mut total = 0.0;
    for face in 0..cfg.graph.n_faces() {
        total += face_log_density(cfg, face)?;
    }
    Ok(total)
}

/// Draw `(g₁,…,g_n)` Haar-distributed conditioned on `g_n ⋯ g₁ = x`:
/// the first `n−1` coordinates are independent Haar and the last is
/// derived, which realizes the exact conditional law (any `n−1` of the
/// coordinates are jointly Haar).
pub fn sample_conditional_haar(
    x: &GroupElement,
    n: usize,
    rng: &mut Rng,
) -> Result<Vec<GroupElement>> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one factor".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut prefix = GroupElement::identity(x.group());
    for _ in 0..n - 1 {
        let g = haar_sample(x.group(), rng);
        prefix = g.multiply(&prefix);
        out.push(g);
    }
    out.push(x.multiply(&prefix.inverse()));
    Ok(out)
}

/// Target value for a conditioned loop: a fixed element, or a conjugacy
/// class (realized through a resampled Haar conjugator).
#[derive(Debug, Clone)]
pub enum CondValue {
    Element(GroupElement),
    Class(ConjClass),
}

/// Conditioning data: edge-disjoint simple loops pinned to target values.
#[derive(Debug, Clone, Default)]
pub struct ConditioningSpec {
    pub loops: Vec<PathWord>,
    pub values: Vec<CondValue>,
}

impl ConditioningSpec {
    pub fn none() -> ConditioningSpec {
        ConditioningSpec::default()
    }

    pub fn validate(&self, graph: &SurfaceGraph) -> Result<()> {
        if self.loops.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} loops but {} target values",
                self.loops.len(),
                self.values.len()
            )));
        }
        let mut seen = vec![false; graph.n_edges()];
        for w in &self.loops {
            if !graph.word_is_closed(w)? {
                return Err(Error::InvalidWord("conditioned loop is not closed".into()));
            }
            // Simple: interior vertices distinct (each edge then appears once).
            let mut vertices = vec![graph.letter_source(w.0[0])];
            for &letter in &w.0[..w.len() - 1] {
                let v = graph.letter_target(letter);
                if vertices.contains(&v) {
                    return Err(Error::InvalidWord(
                        "conditioned loop is not a simple cycle".into(),
                    ));
                }
                vertices.push(v);
            }
            for &(e, _) in &w.0 {
                if seen[e] {
                    return Err(Error::InvalidWord(
                        "conditioned loops must be edge-disjoint".into(),
                    ));
                }
                seen[e] = true;
            }
        }
        Ok(())
    }
}

/// A thinned Metropolis chain together with its acceptance statistics.
#[derive(Debug, Clone)]
pub struct Chain {
    pub graph: Arc<SurfaceGraph>,
    pub samples: Vec<EdgeConfig>,
    pub acceptance: f64,
    pub step_t: f64,
}

struct LoopState {
    word: PathWord,
    derived_edge: usize,
    derived_sign: i8,
    value: CondValue,
    /// Haar conjugator for class conditioning (`target = y·rep·y⁻¹`).
    conjugator: Option<GroupElement>,
}

impl LoopState {
    fn target(&self) -> GroupElement {
        match &self.value {
            CondValue::Element(x) => *x,
            CondValue::Class(t) => {
                let y = self
                    .conjugator
                    .as_ref()
                    .expect("class loops carry a conjugator");
                t.representative().conjugate_by(y)
            }
        }
    }

    /// Solve the last letter so the loop holonomy equals the target.
    fn derive(&self, cfg: &EdgeConfig) -> Result<GroupElement> {
        let prefix = holonomy(cfg, &PathWord(self.word.0[..self.word.len() - 1].to_vec()))?;
        let x = self.target();
        Ok(if self.derived_sign > 0 {
            x.multiply(&prefix.inverse())
        } else {
            prefix.multiply(&x.inverse())
        })
    }
}

/// Sample the Yang–Mills measure, conditioned on the loops in `cond`, by a
/// Metropolis chain over the free edges.
///
/// Conditioned loops are reparameterized: the last letter's edge is derived
/// from the others so the constraint holds exactly at every step. Proposals
/// left-multiply one uniformly chosen movable edge by a heat-kernel
/// increment at scale `step_t` (default: min face area / 4, a scale-aware
/// symmetric proposal); class conditioning adds a conjugator-resampling
/// move per class loop. The chain is thinned to every `stride`-th step.
pub fn metropolis_sample(
    group: Group,
    graph: &SurfaceGraph,
    cond: &ConditioningSpec,
    n_steps: usize,
    step_t: Option<f64>,
    stride: usize,
    rng: &mut Rng,
) -> Result<Chain> {
    let report = graph.validate();
    if !report.is_ok() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    cond.validate(graph)?;
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be ≥ 1".into()));
    }
    for v in &cond.values {
        let vg = match v {
            CondValue::Element(x) => x.group(),
            CondValue::Class(t) => t.group,
        };
        if vg != group {
            return Err(Error::GroupMismatch(group.name(), vg.name()));
        }
    }
    let graph = Arc::new(graph.clone());
    let min_area = graph
        .faces
        .iter()
        .map(|f| f.area)
        .fold(f64::INFINITY, f64::min);
    let step_t = step_t.unwrap_or(min_area / 4.0);
    if !(step_t > 0.0) {
        return Err(Error::InvalidTime(
            step_t,
            "proposal scale must be positive",
        ));
    }

    // Loop bookkeeping: which edge is derived, which loop owns each edge.
    let mut loops: Vec<LoopState> = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; graph.n_edges()];
    let mut derived: Vec<bool> = vec![false; graph.n_edges()];
    for (i, w) in cond.loops.iter().enumerate() {
        let &(last_edge, last_sign) = w.0.last().expect("validated loops are nonempty");
        for &(e, _) in &w.0 {
            owner[e] = Some(i);
        }
        derived[last_edge] = true;
        loops.push(LoopState {
            word: w.clone(),
            derived_edge: last_edge,
            derived_sign: last_sign,
            value: cond.values[i].clone(),
            conjugator: match &cond.values[i] {
                CondValue::Class(_) => Some(haar_sample(group, rng)),
                CondValue::Element(_) => None,
            },
        });
    }
    let movable: Vec<usize> = (0..graph.n_edges()).filter(|&e| !derived[e]).collect();
    if movable.is_empty() {
        return Err(Error::InvalidArgument(
            "conditioning leaves no free edges to sample".into(),
        ));
    }
    let conj_moves: Vec<usize> = loops
        .iter()
        .enumerate()
        .filter(|(_, l)| l.conjugator.is_some())
        .map(|(i, _)| i)
        .collect();

    // Faces adjacent to each edge.
    let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); graph.n_edges()];
    for (fi, f) in graph.faces.iter().enumerate() {
        for &(e, _) in &f.word.0 {
            if !edge_faces[e].contains(&fi) {
                edge_faces[e].push(fi);
            }
        }
    }

    // Initial state: Haar on movable edges, derived edges solved.
    let mut cfg = EdgeConfig::new(
        graph.clone(),
        (0..graph.n_edges())
            .map(|_| haar_sample(group, rng))
            .collect(),
    )?;
    for l in &loops {
        cfg.values[l.derived_edge] = l.derive(&cfg)?;
    }
    let mut face_logs: Vec<f64> = (0..graph.n_faces())
        .map(|f| face_log_density(&cfg, f))
        .collect::<Result<_>>()?;

    let n_moves = movable.len() + conj_moves.len();
    let mut samples = Vec::with_capacity(n_steps / stride + 1);
    let mut accepted = 0usize;
    for step in 0..n_steps {
        let pick = rng.random_range(0..n_moves);
        // Determine changed edges under this proposal.
        let mut changed: Vec<(usize, GroupElement)> = Vec::with_capacity(2);
        let mut new_conjugator: Option<(usize, GroupElement)> = None;
        if pick < movable.len() {
            let e = movable[pick];
            let increment = sample_heat_kernel(group, step_t, rng)?;
            let proposed = increment.multiply(&cfg.values[e]);
            changed.push((e, proposed));
            if let Some(li) = owner[e] {
                // Re-solve the loop's derived edge against the tentative value.
                let mut tentative = cfg.clone();
                tentative.values[e] = changed[0].1;
                let d = loops[li].derive(&tentative)?;
                changed.push((loops[li].derived_edge, d));
            }
        } else {
            let li = conj_moves[pick - movable.len()];
            let y = haar_sample(group, rng);
            let tentative_loop = LoopState {
                word: loops[li].word.clone(),
                derived_edge: loops[li].derived_edge,
                derived_sign: loops[li].derived_sign,
                value: loops[li].value.clone(),
                conjugator: Some(y),
            };
            let d = tentative_loop.derive(&cfg)?;
            changed.push((loops[li].derived_edge, d));
            new_conjugator = Some((li, y));
        }

        // Affected faces and the density change.
        let mut affected: Vec<usize> = changed
            .iter()
            .flat_map(|(e, _)| edge_faces[*e].iter().copied())
            .collect();
        affected.sort_unstable();
        affected.dedup();

        let old_values: Vec<(usize, GroupElement)> =
            changed.iter().map(|(e, _)| (*e, cfg.values[*e])).collect();
        for &(e, v) in &changed {
            cfg.values[e] = v;
        }
        let mut delta = 0.0;
        let mut new_logs = Vec::with_capacity(affected.len());
        let mut valid = true;
        for &f in &affected {
            match face_log_density(&cfg, f) {
                Ok(l) => {
                    delta += l - face_logs[f];
                    new_logs.push(l);
                }
                Err(_) => {
                    valid = false;
                    break;
                }
            }
        }
        let accept = valid && (delta >= 0.0 || rng.random::<f64>() < delta.exp());
        if accept {
            for (&f, &l) in affected.iter().zip(&new_logs) {
                face_logs[f] = l;
            }
            if let Some((li, y)) = new_conjugator {
                loops[li].conjugator = Some(y);
            }
            accepted += 1;
        } else {
            for (e, v) in old_values {
                cfg.values[e] = v;
            }
        }

        if (step + 1) % stride == 0 {
            samples.push(cfg.clone());
        }
    }
    Ok(Chain {
        graph,
        samples,
        acceptance: accepted as f64 / n_steps.max(1) as f64,
        step_t,
    })
}

/// Closed-form Wilson-loop oracle on the sphere: for a simple loop
/// splitting a sphere of total area `big_a` into faces of areas
/// `(a, big_a − a)`,
///
/// ```text
/// E[χ_β(H)] = (Σ_{α,γ} dim α dim γ e^{−(c₂(α)a + c₂(γ)(A−a))/2} N^{βα}_γ)
///              / Z_{0,0,A},
/// ```
///
/// where the fusion multiplicities `N^{βα}_γ = (χ_β χ_α, χ_γ)` are
/// evaluated by class quadrature and snapped to integers.
pub fn exact_sphere_loop_moment(
    group: Group,
    a: f64,
    big_a: f64,
    beta: &Irrep,
    tol: f64,
) -> Result<f64> {
    if !(0.0 < a && a < big_a) {
        return Err(Error::InvalidArgument(format!(
            "loop area {a} must lie strictly inside (0, {big_a})"
        )));
    }
    if beta.group != group {
        return Err(Error::GroupMismatch(group.name(), beta.group.name()));
    }
    let rest = big_a - a;

    // Candidate γ labels allowed by the fusion rules for β ⊗ α.
    let gammas_for = |alpha: &Irrep| -> Vec<Irrep> {
        match group {
            Group::U1 => vec![Irrep {
                group,
                label: alpha.label + beta.label,
            }],
            Group::Su2 => {
                let lo = (alpha.label - beta.label).abs();
                let hi = alpha.label + beta.label;
                (lo..=hi)
                    .step_by(2)
                    .map(|label| Irrep { group, label })
                    .collect()
            }
            Group::So3 => {
                let lo = (alpha.label - beta.label).abs();
                let hi = alpha.label + beta.label;
                (lo..=hi).map(|label| Irrep { group, label }).collect()
            }
        }
    };

    // How far α must run: the γ ≥ |α − β| selection rule makes the joint
    // weight decay in α even when `a` is tiny.
    let mut max_abs_label = beta.label.abs();
    {
        let mut label = 0i64;
        loop {
            let alpha = Irrep { group, label };
            // Slowest-decaying γ reachable from |α| = label (for U(1): the
            // worst of α = ±label is γ with |γ| = |label − |β||).
            let gmin = Irrep {
                group,
                label: (label - beta.label.abs()).abs(),
            };
            let bound = alpha.dim()
                * gmin.dim()
                * (-(alpha.casimir() * a + gmin.casimir() * rest) / 2.0).exp();
            if label > beta.label.abs() + 2 && bound < tol * 1e-3 {
                break;
            }
            max_abs_label = max_abs_label.max(label + beta.label.abs());
            label += 1;
            if alpha.casimir() > crate::heat::CASIMIR_HARD_CAP {
                return Err(Error::SeriesCutoffExceeded);
            }
        }
    }

    // Quadrature resolving all character products that appear (Fourier
    // content up to ≈ 2·max + 2|β|, with slack).
    let n_quad = (4 * max_abs_label as usize + 32).max(64);
    let quad = class_quadrature(group, n_quad)?;
    let fusion = |alpha: &Irrep, gamma: &Irrep| -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, w) in &quad {
            acc += character(beta, c) * character(alpha, c) * character(gamma, c).conj() * w;
        }
        let n = acc.re.round();
        if (acc.re - n).abs() > 0.1 || acc.im.abs() > 0.1 {
            return Err(Error::InvalidArgument(format!(
                "fusion multiplicity quadrature drifted: {acc}"
            )));
        }
        Ok(n)
    };

    let mut numerator = 0.0;
    let alphas: Vec<Irrep> = match group {
        Group::U1 => {
            let m = max_abs_label;
            (-m..=m).map(|label| Irrep { group, label }).collect()
        }
        _ => (0..=max_abs_label)
            .map(|label| Irrep { group, label })
            .collect(),
    };
    for alpha in &alphas {
        for gamma in gammas_for(alpha) {
            let weight = alpha.dim()
                * gamma.dim()
                * (-(alpha.casimir() * a + gamma.casimir() * rest) / 2.0).exp();
            if weight < tol * 1e-6 {
                continue;
            }
            let n = fusion(alpha, &gamma)?;
            if n != 0.0 {
                numerator += weight * n;
            }
        }
    }
    let z = z_eval(group, &SurfaceSignature::new(0, 0, big_a), &[], tol)?.value;
    Ok(numerator / z)
}

/// Batch-means estimate of `E[χ_β(holonomy(w))]` along a chain.
pub fn wilson_estimator(
    chain: &Chain,
    w: &PathWord,
    beta: &Irrep,
    burn_in: usize,
) -> Result<(Complex64, f64)> {
    if burn_in >= chain.samples.len() {
        return Err(Error::InvalidArgument(format!(
            "burn-in {burn_in} consumes the whole chain of {} samples",
            chain.samples.len()
        )));
    }
    let values: Vec<Complex64> = chain.samples[burn_in..]
        .iter()
        .map(|cfg| {
            let h = holonomy(cfg, w)?;
            Ok(character(beta, &h.conj_class()))
        })
        .collect::<Result<_>>()?;
    Ok(mean_stderr_complex(&values))
}

/// A gauge transformation: one group element per vertex.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    pub values: Vec<GroupElement>,
}

/// Act on a configuration: an edge `(s, t)` maps to `j(t)⁻¹ · g · j(s)`.
/// Loop holonomies are conjugated at their base point; the density is
/// invariant.
pub fn gauge_transform(cfg: &EdgeConfig, j: &GaugeTransform) -> Result<EdgeConfig> {
    if j.values.len() != cfg.graph.n_vertices {
        return Err(Error::InvalidArgument(format!(
            "{} gauge values for {} vertices",
            j.values.len(),
            cfg.graph.n_vertices
        )));
    }
    let values = cfg
        .values
        .iter()
        .enumerate()
        .map(|(e, g)| {
            let (s, t) = cfg.graph.edges[e];
            j.values[t].inverse().multiply(g).multiply(&j.values[s])
        })
        .collect();
    EdgeConfig::new(cfg.graph.clone(), values)
}

/// A refinement: subdivide an edge, or split a face along a chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinementMove {
    SubdivideEdge {
        edge: usize,
    },
    SplitFace {
        face: usize,
        position_i: usize,
        position_j: usize,
        fraction: f64,
    },
}

/// Apply refinement moves to a graph, transporting `words` so they denote
/// the same paths on the refined graph.
pub fn apply_refinements(
    graph: &SurfaceGraph,
    moves: &[RefinementMove],
    words: &[PathWord],
) -> Result<(SurfaceGraph, Vec<PathWord>)> {
    let mut g = graph.clone();
    let mut ws: Vec<PathWord> = words.to_vec();
    for mv in moves {
        match *mv {
            RefinementMove::SubdivideEdge { edge } => {
                let new_edge = g.n_edges();
                g = g.subdivide_edge(edge)?;
                for w in &mut ws {
                    *w = subdivision_word_rewrite(edge, new_edge, w);
                }
            }
            RefinementMove::SplitFace {
                face,
                position_i,
                position_j,
                fraction,
            } => {
                // Existing edges keep their indices; words are unchanged.
                g = g.split_face(face, position_i, position_j, fraction)?;
            }
        }
    }
    Ok((g, ws))
}

/// Comparison of one Wilson estimate across a refinement.
#[derive(Debug, Clone)]
pub struct WordComparison {
    pub coarse: Complex64,
    pub coarse_stderr: f64,
    pub fine: Complex64,
    pub fine_stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SubdivisionReport {
    pub words: Vec<WordComparison>,
    /// For U(1) face splits: worst deviation of the exact merged-face
    /// marginal (a heat-kernel convolution) from the unsplit face kernel.
    pub u1_merge_residual: Option<f64>,
    pub pass: bool,
}

/// Verify invariance by subdivision: Wilson estimates for the given words
/// agree (within 3σ) between independent chains on the original and the
/// refined graph. For U(1) face splits, additionally checks the exact
/// pushforward identity `p_{s} ⋆ p_{t} = p_{s+t}` for each split pair by
/// direct angle quadrature.
pub fn subdivision_invariance_test(
    group: Group,
    graph: &SurfaceGraph,
    moves: &[RefinementMove],
    words: &[PathWord],
    beta: &Irrep,
    n_steps: usize,
    rng: &mut Rng,
) -> Result<SubdivisionReport> {
    let (refined, refined_words) = apply_refinements(graph, moves, words)?;

    // Trivial refinements replay the identical stream so the two runs
    // coincide bit for bit; otherwise the chains are independent.
    let master: u64 = rng.random();
    let mut rng1 = crate::rng::stream(master, 1);
    let mut rng2 = crate::rng::stream(master, if moves.is_empty() { 1 } else { 2 });

    let cond = ConditioningSpec::none();
    let chain1 = metropolis_sample(group, graph, &cond, n_steps, None, 1, &mut rng1)?;
    let chain2 = metropolis_sample(group, &refined, &cond, n_steps, None, 1, &mut rng2)?;
    let burn = n_steps / 10;

    let mut comparisons = Vec::new();
    let mut pass = true;
    for (w1, w2) in words.iter().zip(&refined_words) {
        let (m1, e1) = wilson_estimator(&chain1, w1, beta, burn)?;
        let (m2, e2) = wilson_estimator(&chain2, w2, beta, burn)?;
        let ok = gap_passes(m1, e1, m2, e2, 3.0, 1e-9);
        pass &= ok;
        comparisons.push(WordComparison {
            coarse: m1,
            coarse_stderr: e1,
            fine: m2,
            fine_stderr: e2,
            pass: ok,
        });
    }

    let mut u1_residual = None;
    if group == Group::U1 {
        let mut worst: f64 = 0.0;
        let mut any = false;
        for mv in moves {
            if let RefinementMove::SplitFace { face, fraction, .. } = *mv {
                any = true;
                let area = graph.faces[face].area;
                worst = worst.max(u1_merge_residual(fraction * area, (1.0 - fraction) * area)?);
            }
        }
        if any {
            u1_residual = Some(worst);
            pass &= worst < 1e-8;
        }
    }
    Ok(SubdivisionReport {
        words: comparisons,
        u1_merge_residual: u1_residual,
        pass,
    })
}

/// Exact U(1) pushforward residual for merging two faces: trapezoid
/// convolution of `p_s` and `p_t` against `p_{s+t}`, max over a grid.
pub fn u1_merge_residual(s: f64, t: f64) -> Result<f64> {
    let n = 1024;
    let mut worst: f64 = 0.0;
    for k in 0..32 {
        let theta = crate::group::TAU * k as f64 / 32.0;
        let mut conv = 0.0;
        for i in 0..n {
            let phi = crate::group::TAU * i as f64 / n as f64;
            let a = ConjClass::new(Group::U1, phi)?;
            let b = ConjClass::new(Group::U1, crate::group::reduce_angle(theta - phi))?;
            conv += heat_kernel(Group::U1, s, &b, DENSITY_TOL)?
                * heat_kernel(Group::U1, t, &a, DENSITY_TOL)?
                / n as f64;
        }
        let direct = heat_kernel(
            Group::U1,
            s + t,
            &ConjClass::new(Group::U1, theta)?,
            DENSITY_TOL,
        )?;
        worst = worst.max((conv - direct).abs());
    }
    Ok(worst)
}

/// Estimate of `E[ρ(holonomy)]` for a loop bounding a small disk, with the
/// ratio against `√area` (which stays bounded as the disk shrinks).
#[derive(Debug, Clone)]
pub struct SmallDiskEstimate {
    pub mean_rho: f64,
    pub stderr: f64,
    pub ratio: f64,
}

pub fn small_disk_estimate(
    chain: &Chain,
    w: &PathWord,
    disk_area: f64,
    burn_in: usize,
) -> Result<SmallDiskEstimate> {
    if burn_in >= chain.samples.len() {
        return Err(Error::InvalidArgument(
            "burn-in consumes the whole chain".into(),
        ));
    }
    if !(disk_area > 0.0) {
        return Err(Error::InvalidArgument("disk area must be positive".into()));
    }
    let values: Vec<f64> = chain.samples[burn_in..]
        .iter()
        .map(|cfg| Ok(rho(&holonomy(cfg, w)?)))
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(SmallDiskEstimate {
        mean_rho: mean,
        stderr,
        ratio: mean / disk_area.sqrt(),
    })
}
