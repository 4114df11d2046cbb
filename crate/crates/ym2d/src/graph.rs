//! Combinatorial maps on compact orientable surfaces.
//!
//! A graph is stored purely combinatorially: vertices are indices, edges are
//! ordered vertex pairs, faces carry a boundary word and an area, and the
//! surface is described by its genus and (possibly empty) list of boundary
//! loops. No embedding coordinates are kept — only the combinatorics and
//! the areas matter for every measure computed on top.
//!
//! The JSON exchange format is
//! `{vertices, edges: [[s,t],…], faces: [{word: [[e,±1],…], area},…],
//!   genus, boundary: [word,…]}`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A path as a word in oriented edges: letters `(edge index, ±1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PathWord(pub Vec<(usize, i8)>);

impl PathWord {
    pub fn new(letters: Vec<(usize, i8)>) -> PathWord {
        PathWord(letters)
    }

    pub fn empty() -> PathWord {
        PathWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The reversed word with all signs flipped.
    pub fn inverse(&self) -> PathWord {
        PathWord(self.0.iter().rev().map(|&(e, s)| (e, -s)).collect())
    }

    pub fn concat(&self, other: &PathWord) -> PathWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        PathWord(letters)
    }
}

/// A face: boundary word plus area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub word: PathWord,
    pub area: f64,
}

/// An integer linear combination of edges (a 1-chain; the cycle condition
/// is checked against a graph on demand).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntCycle(pub Vec<i64>);

impl IntCycle {
    pub fn zero(n_edges: usize) -> IntCycle {
        IntCycle(vec![0; n_edges])
    }

    pub fn from_word(n_edges: usize, w: &PathWord) -> IntCycle {
        let mut coeffs = vec![0i64; n_edges];
        for &(e, s) in &w.0 {
            coeffs[e] += s as i64;
        }
        IntCycle(coeffs)
    }

    pub fn add(&self, other: &IntCycle) -> IntCycle {
        IntCycle(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> IntCycle {
        IntCycle(self.0.iter().map(|a| a * k).collect())
    }
}

/// A combinatorial map: graph on a compact orientable surface of the given
/// genus, with faces carrying areas and optional boundary loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGraph {
    #[serde(rename = "vertices")]
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub faces: Vec<Face>,
    pub genus: usize,
    #[serde(rename = "boundary", default)]
    pub boundary_loops: Vec<PathWord>,
}

/// Result of [`SurfaceGraph::validate`].
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SurfaceGraph {
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    /// Sum of the face areas.
    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    /// Source vertex of a letter (respecting its sign).
    pub fn letter_source(&self, letter: (usize, i8)) -> usize {
        let (s, t) = self.edges[letter.0];
        if letter.1 > 0 {
            s
        } else {
            t
        }
    }

    /// Target vertex of a letter (respecting its sign).
    pub fn letter_target(&self, letter: (usize, i8)) -> usize {
        let (s, t) = self.edges[letter.0];
        if letter.1 > 0 {
            t
        } else {
            s
        }
    }

    /// Check that consecutive letters are endpoint-compatible and indices
    /// are in range. Returns the (start, end) vertices of the path.
    pub fn word_endpoints(&self, w: &PathWord) -> Result<(usize, usize)> {
        if w.is_empty() {
            return Err(Error::InvalidWord("empty word has no endpoints".into()));
        }
        for &(e, s) in &w.0 {
            if e >= self.n_edges() {
                return Err(Error::InvalidWord(format!("edge index {e} out of range")));
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidWord(format!("sign {s} must be ±1")));
            }
        }
        let mut current = self.letter_source(w.0[0]);
        let start = current;
        for &letter in &w.0 {
            if self.letter_source(letter) != current {
                return Err(Error::InvalidWord(format!(
                    "letter ({}, {}) starts at {} but path is at {current}",
                    letter.0,
                    letter.1,
                    self.letter_source(letter)
                )));
            }
            current = self.letter_target(letter);
        }
        Ok((start, current))
    }

    pub fn word_is_closed(&self, w: &PathWord) -> Result<bool> {
        let (a, b) = self.word_endpoints(w)?;
        Ok(a == b)
    }

    /// Check every structural invariant; the report lists all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n_vertices == 0 {
            violations.push("graph has no vertices".to_string());
        }
        for (i, &(s, t)) in self.edges.iter().enumerate() {
            if s >= self.n_vertices || t >= self.n_vertices {
                violations.push(format!("edge {i} = ({s},{t}) has an endpoint out of range"));
            }
        }
        if self.faces.is_empty() {
            violations.push("graph has no faces".to_string());
        }
        for (i, f) in self.faces.iter().enumerate() {
            if !(f.area > 0.0 && f.area.is_finite()) {
                violations.push(format!("face {i} has nonpositive area {}", f.area));
            }
            match self.word_is_closed(&f.word) {
                Ok(true) => {}
                Ok(false) => violations.push(format!("face {i} boundary word is not closed")),
                Err(e) => violations.push(format!("face {i} boundary word invalid: {e}")),
            }
        }
        for (i, b) in self.boundary_loops.iter().enumerate() {
            match self.word_is_closed(b) {
                Ok(true) => {}
                Ok(false) => violations.push(format!("boundary loop {i} is not closed")),
                Err(e) => violations.push(format!("boundary loop {i} invalid: {e}")),
            }
        }

        // Edge occurrence discipline: every edge appears exactly twice with
        // opposite signs, either twice in faces (interior edge) or once in a
        // face and once in a boundary loop (boundary edge).
        let ne = self.n_edges();
        let mut face_count = vec![0usize; ne];
        let mut boundary_count = vec![0usize; ne];
        let mut signed = vec![0i64; ne];
        for f in &self.faces {
            for &(e, s) in &f.word.0 {
                if e < ne {
                    face_count[e] += 1;
                    signed[e] += s as i64;
                }
            }
        }
        for b in &self.boundary_loops {
            for &(e, s) in &b.0 {
                if e < ne {
                    boundary_count[e] += 1;
                    signed[e] += s as i64;
                }
            }
        }
        for e in 0..ne {
            let total = face_count[e] + boundary_count[e];
            if total != 2 || boundary_count[e] > 1 || signed[e] != 0 {
                violations.push(format!(
                    "edge {e} occurs {} time(s) in faces and {} in boundary with signed sum {}",
                    face_count[e], boundary_count[e], signed[e]
                ));
            }
        }

        // Euler characteristic.
        let v = self.n_vertices as i64;
        let e = self.n_edges() as i64;
        let f = self.n_faces() as i64;
        let b = self.boundary_loops.len() as i64;
        let chi = v - e + f;
        let expected = 2 - 2 * self.genus as i64 - b;
        if chi != expected {
            violations.push(format!(
                "Euler characteristic {chi} ≠ 2 − 2·{} − {b} = {expected}",
                self.genus
            ));
        }

        // Connectivity over the union of edge endpoints.
        if self.n_vertices > 0 {
            let mut parent: Vec<usize> = (0..self.n_vertices).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let root = find(parent, parent[x]);
                    parent[x] = root;
                }
                parent[x]
            }
            for &(s, t) in &self.edges {
                if s < self.n_vertices && t < self.n_vertices {
                    let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                    parent[a] = b;
                }
            }
            let root = find(&mut parent, 0);
            if (0..self.n_vertices).any(|v| find(&mut parent, v) != root) {
                violations.push("graph is not connected".to_string());
            }
        }

        ValidationReport { violations }
    }

    /// Replace edge `e = (s, t)` by `e = (s, v*) · e' = (v*, t)` through a
    /// fresh vertex, rewriting every face and boundary word. Areas, genus
    /// and face count are unchanged.
    pub fn subdivide_edge(&self, edge: usize) -> Result<SurfaceGraph> {
        if edge >= self.n_edges() {
            return Err(Error::InvalidIndex(format!("edge {edge} out of range")));
        }
        let mut g = self.clone();
        let fresh = g.n_vertices;
        g.n_vertices += 1;
        let (s, t) = g.edges[edge];
        g.edges[edge] = (s, fresh);
        let new_edge = g.edges.len();
        g.edges.push((fresh, t));
        for f in &mut g.faces {
            f.word = subdivision_word_rewrite(edge, new_edge, &f.word);
        }
        for b in &mut g.boundary_loops {
            *b = subdivision_word_rewrite(edge, new_edge, b);
        }
        Ok(g)
    }

    /// Split a face along a new edge between two vertex occurrences on its
    /// boundary word (letter positions `i < j`, each naming the vertex at
    /// the start of that letter). The piece spanned by letters `i..j`
    /// receives `area_fraction` of the face's area.
    pub fn split_face(
        &self,
        face: usize,
        position_i: usize,
        position_j: usize,
        area_fraction: f64,
    ) -> Result<SurfaceGraph> {
        if face >= self.n_faces() {
            return Err(Error::InvalidIndex(format!("face {face} out of range")));
        }
        if !(area_fraction > 0.0 && area_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "area fraction {area_fraction} must lie strictly between 0 and 1"
            )));
        }
        let word = &self.faces[face].word;
        if position_i >= position_j || position_j >= word.len() {
            return Err(Error::InvalidIndex(format!(
                "positions ({position_i}, {position_j}) must satisfy i < j < word length {}",
                word.len()
            )));
        }
        let vi = self.letter_source(word.0[position_i]);
        let vj = self.letter_source(word.0[position_j]);
        let mut g = self.clone();
        let d = g.edges.len();
        g.edges.push((vi, vj));

        let mut w1 = word.0[position_i..position_j].to_vec();
        w1.push((d, -1));
        let mut w2 = word.0[position_j..].to_vec();
        w2.extend_from_slice(&word.0[..position_i]);
        w2.push((d, 1));

        let area = self.faces[face].area;
        g.faces[face] = Face {
            word: PathWord(w1),
            area: area_fraction * area,
        };
        g.faces.push(Face {
            word: PathWord(w2),
            area: (1.0 - area_fraction) * area,
        });
        Ok(g)
    }
}

/// Rewrite a word after `edge` was subdivided into `edge · new_edge`:
/// `(e,+) → (e,+)(e′,+)` and `(e,−) → (e′,−)(e,−)`.
pub fn subdivision_word_rewrite(edge: usize, new_edge: usize, w: &PathWord) -> PathWord {
    let mut out = Vec::with_capacity(w.len() + 2);
    for &(e, sign) in &w.0 {
        if e == edge {
            if sign > 0 {
                out.push((edge, 1));
                out.push((new_edge, 1));
            } else {
                out.push((new_edge, -1));
                out.push((edge, -1));
            }
        } else {
            out.push((e, sign));
        }
    }
    PathWord(out)
}

/// Iteratively cancel adjacent `(e,+)(e,−)` pairs until none remain.
pub fn reduce_word(w: &PathWord) -> PathWord {
    let mut stack: Vec<(usize, i8)> = Vec::with_capacity(w.len());
    for &letter in &w.0 {
        if let Some(&top) = stack.last() {
            if top.0 == letter.0 && top.1 == -letter.1 {
                stack.pop();
                continue;
            }
        }
        stack.push(letter);
    }
    PathWord(stack)
}

/// Peel a word into lassos `s·b·s⁻¹` (spur `s`, simple-cycle buckle `b`)
/// plus an injective remainder path, by splitting at the first revisited
/// vertex (earliest earlier occurrence).
///
/// The concatenation `l₁ ⋯ l_p · remainder` is basically equivalent to the
/// input word, so any holonomy along it agrees with the original.
pub fn lasso_decompose(g: &SurfaceGraph, w: &PathWord) -> Result<(Vec<PathWord>, PathWord)> {
    let mut lassos = Vec::new();
    let mut current = reduce_word(w);
    loop {
        if current.is_empty() {
            return Ok((lassos, current));
        }
        g.word_endpoints(&current)?;
        let m = current.len();
        // Vertex sequence v_0..v_m along the path.
        let mut vertices = Vec::with_capacity(m + 1);
        vertices.push(g.letter_source(current.0[0]));
        for &letter in &current.0 {
            vertices.push(g.letter_target(letter));
        }
        // First index i with v_{i+1} already visited.
        let mut split = None;
        'scan: for i in 0..m {
            for j in 0..=i {
                if vertices[j] == vertices[i + 1] {
                    split = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((i, j)) = split else {
            // Injective open path: nothing more to peel.
            return Ok((lassos, current));
        };
        let spur = PathWord(current.0[..j].to_vec());
        let buckle = PathWord(current.0[j..=i].to_vec());
        let lasso = spur.concat(&buckle).concat(&spur.inverse());
        lassos.push(lasso);
        let mut rest = spur.0;
        rest.extend_from_slice(&current.0[i + 1..]);
        current = reduce_word(&PathWord(rest));
    }
}

/// Boundary cycles of all faces (surface with boundary) or of all but the
/// last face (closed surface, where the full set satisfies one relation).
pub fn face_cycle_basis(g: &SurfaceGraph) -> Result<Vec<IntCycle>> {
    let report = g.validate();
    if !report.is_ok() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    let take = if g.is_closed() {
        g.n_faces().saturating_sub(1)
    } else {
        g.n_faces()
    };
    Ok(g.faces[..take]
        .iter()
        .map(|f| IntCycle::from_word(g.n_edges(), &f.word))
        .collect())
}

/// Solve `c = Σ λ_i ℓ_i + Σ μ_j ∂F_j` in integers, where the `ℓ_i` are the
/// caller-provided first-homology generators and the `∂F_j` run over
/// [`face_cycle_basis`]. Returns `(λ, μ)` with `μ` padded to one entry per
/// face (the dropped face of a closed surface gets 0).
pub fn homology_decompose(
    g: &SurfaceGraph,
    c: &IntCycle,
    h1_loops: &[IntCycle],
) -> Result<(Vec<i64>, Vec<i64>)> {
    let basis = face_cycle_basis(g)?;
    let ne = g.n_edges();
    if c.0.len() != ne {
        return Err(Error::InvalidArgument(format!(
            "cycle has {} coefficients, graph has {ne} edges",
            c.0.len()
        )));
    }
    let cols: Vec<&IntCycle> = h1_loops.iter().chain(basis.iter()).collect();
    let m = cols.len();
    let mut a = vec![vec![0i128; m]; ne];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.0.iter().enumerate() {
            a[i][j] = v as i128;
        }
    }
    let rhs: Vec<i128> = c.0.iter().map(|&v| v as i128).collect();
    let x = solve_integer_system(a, rhs).ok_or_else(|| {
        Error::NoIntegerSolution(
            "cycle is not an integer combination of the given homology generators \
             and face boundaries"
                .into(),
        )
    })?;

    // Verify the reconstruction exactly.
    let mut recon = vec![0i64; ne];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.0.iter().enumerate() {
            recon[i] += v * x[j] as i64;
        }
    }
    if recon != c.0 {
        return Err(Error::NoIntegerSolution("reconstruction mismatch".into()));
    }

    let lambda: Vec<i64> = x[..h1_loops.len()].iter().map(|&v| v as i64).collect();
    let mut mu: Vec<i64> = x[h1_loops.len()..].iter().map(|&v| v as i64).collect();
    mu.resize(g.n_faces(), 0);
    Ok((lambda, mu))
}

/// Solve `A x = b` over the integers by diagonalizing `A` with unimodular
/// row/column operations (a Smith-normal-form style reduction). Returns
/// `None` when no integer solution exists.
// The elimination loops combine two rows (or columns) of the same matrix,
// so indexed access is clearer than split mutable borrows.
#[allow(clippy::needless_range_loop)]
fn solve_integer_system(mut a: Vec<Vec<i128>>, mut b: Vec<i128>) -> Option<Vec<i128>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    // v tracks the accumulated column operations: x = v · y.
    let mut v = vec![vec![0i128; cols]; cols];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1;
    }

    let mut t = 0;
    while t < rows.min(cols) {
        // Find the smallest nonzero pivot in the remaining submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        b.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        v.swap(t, pj);

        let mut clean = true;
        for i in (t + 1)..rows {
            if a[i][t] != 0 {
                let q = a[i][t].div_euclid(a[t][t]);
                for j in 0..cols {
                    a[i][j] -= q * a[t][j];
                }
                b[i] -= q * b[t];
                if a[i][t] != 0 {
                    clean = false;
                }
            }
        }
        for j in (t + 1)..cols {
            if a[t][j] != 0 {
                let q = a[t][j].div_euclid(a[t][t]);
                for i in 0..rows {
                    a[i][j] -= q * a[i][t];
                }
                for r in 0..cols {
                    v[r][j] -= q * v[r][t];
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
        }
        if clean {
            t += 1;
        }
        // Otherwise re-pivot on the smaller remainders until the row and
        // column are clear (terminates: |pivot| strictly decreases).
    }
    let rank = t;

    // Back-substitute on the diagonal system D y = b.
    let mut y = vec![0i128; cols];
    for i in 0..rank {
        if b[i] % a[i][i] != 0 {
            return None;
        }
        y[i] = b[i] / a[i][i];
    }
    for (i, &bi) in b.iter().enumerate().skip(rank) {
        let _ = i;
        if bi != 0 {
            return None;
        }
    }
    // x = V y.
    let mut x = vec![0i128; cols];
    for (r, row) in v.iter().enumerate() {
        x[r] = row.iter().zip(&y).map(|(vv, yy)| vv * yy).sum();
    }
    Some(x)
}

/// Canonical test surfaces used across the crate and as CLI fixtures.
pub mod fixtures {
    use super::*;

    /// Sphere: one vertex, one loop edge, two faces `e` / `e⁻¹`.
    pub fn sphere_two_face(a1: f64, a2: f64) -> SurfaceGraph {
        SurfaceGraph {
            n_vertices: 1,
            edges: vec![(0, 0)],
            faces: vec![
                Face {
                    word: PathWord(vec![(0, 1)]),
                    area: a1,
                },
                Face {
                    word: PathWord(vec![(0, -1)]),
                    area: a2,
                },
            ],
            genus: 0,
            boundary_loops: vec![],
        }
    }

    /// Sphere: one vertex, two loop edges, three faces
    /// `e₀` / `e₀⁻¹e₁` / `e₁⁻¹`.
    pub fn sphere_three_face(a1: f64, a2: f64, a3: f64) -> SurfaceGraph {
        SurfaceGraph {
            n_vertices: 1,
            edges: vec![(0, 0), (0, 0)],
            faces: vec![
                Face {
                    word: PathWord(vec![(0, 1)]),
                    area: a1,
                },
                Face {
                    word: PathWord(vec![(0, -1), (1, 1)]),
                    area: a2,
                },
                Face {
                    word: PathWord(vec![(1, -1)]),
                    area: a3,
                },
            ],
            genus: 0,
            boundary_loops: vec![],
        }
    }

    /// Torus as the standard square: one vertex, edges `a, b`, one face
    /// `a b a⁻¹ b⁻¹`.
    pub fn torus_one_face(area: f64) -> SurfaceGraph {
        SurfaceGraph {
            n_vertices: 1,
            edges: vec![(0, 0), (0, 0)],
            faces: vec![Face {
                word: PathWord(vec![(0, 1), (1, 1), (0, -1), (1, -1)]),
                area,
            }],
            genus: 1,
            boundary_loops: vec![],
        }
    }

    /// Torus cut along a diagonal `d`: faces `a b d⁻¹` and `d a⁻¹ b⁻¹`.
    pub fn torus_two_face(a1: f64, a2: f64) -> SurfaceGraph {
        SurfaceGraph {
            n_vertices: 1,
            edges: vec![(0, 0), (0, 0), (0, 0)],
            faces: vec![
                Face {
                    word: PathWord(vec![(0, 1), (1, 1), (2, -1)]),
                    area: a1,
                },
                Face {
                    word: PathWord(vec![(2, 1), (0, -1), (1, -1)]),
                    area: a2,
                },
            ],
            genus: 1,
            boundary_loops: vec![],
        }
    }

    /// Disk: one vertex, one loop edge, one face, one boundary loop.
    pub fn disk(area: f64) -> SurfaceGraph {
        SurfaceGraph {
            n_vertices: 1,
            edges: vec![(0, 0)],
            faces: vec![Face {
                word: PathWord(vec![(0, 1)]),
                area,
            }],
            genus: 0,
            boundary_loops: vec![PathWord(vec![(0, -1)])],
        }
    }

    /// First-homology generators for the torus fixtures (`a` and `b`).
    pub fn torus_h1(n_edges: usize) -> Vec<IntCycle> {
        let mut a = IntCycle::zero(n_edges);
        a.0[0] = 1;
        let mut b = IntCycle::zero(n_edges);
        b.0[1] = 1;
        vec![a, b]
    }
}
