//! Group arithmetic, Haar sampling, conjugacy classes, irreducible
//! characters and class-function quadrature for U(1), SU(2) and SO(3).
//!
//! U(1) elements are angles in `[0, 2π)`. SU(2) elements are unit
//! quaternions with the Hamilton product (`i·j = k`). SO(3) elements are
//! unit quaternions under the identification `q ~ -q`, canonicalized so the
//! first nonzero coordinate is positive.

use crate::error::{Error, Result};
use crate::rng::Rng;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Full circle, `2π`.
pub const TAU: f64 = 2.0 * PI;

/// Threshold below which SU(2)/SO(3) characters switch to a Taylor series
/// around the removable singularities at `θ ∈ {0, π}`.
const CHARACTER_SERIES_THRESHOLD: f64 = 1e-6;

/// One of the three supported compact groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    U1,
    Su2,
    So3,
}

impl Group {
    /// U(1) is abelian; SU(2) and SO(3) are non-abelian and semi-simple.
    pub fn is_abelian(self) -> bool {
        matches!(self, Group::U1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::U1 => "u1",
            Group::Su2 => "su2",
            Group::So3 => "so3",
        }
    }
}

impl std::str::FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u1" | "u(1)" => Ok(Group::U1),
            "su2" | "su(2)" => Ok(Group::Su2),
            "so3" | "so(3)" => Ok(Group::So3),
            other => Err(Error::InvalidArgument(format!("unknown group {other:?}"))),
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of one of the supported groups.
///
/// The payload is an angle for U(1) (stored in `data[0]`, reduced to
/// `[0, 2π)`) and a unit quaternion `(w, x, y, z)` for SU(2)/SO(3).
/// Quaternions are renormalized after every product; SO(3) quaternions are
/// canonicalized to first nonzero coordinate positive so that equality is
/// testable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    group: Group,
    data: [f64; 4],
}

pub fn reduce_angle(theta: f64) -> f64 {
    let mut a = theta % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // `-1e-18 % TAU` rounds to TAU itself; fold that back to 0.
    if a >= TAU {
        a = 0.0;
    }
    a
}

fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [aw, ax, ay, az] = a;
    let [bw, bx, by, bz] = b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

fn quat_normalize(q: [f64; 4]) -> [f64; 4] {
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

/// Flip the overall sign so the first nonzero coordinate is positive.
fn quat_canonicalize_projective(q: [f64; 4]) -> [f64; 4] {
    for v in q {
        if v != 0.0 {
            return if v < 0.0 {
                [-q[0], -q[1], -q[2], -q[3]]
            } else {
                q
            };
        }
    }
    q
}

impl GroupElement {
    /// The U(1) element with the given angle (radians; any real accepted).
    pub fn u1(theta: f64) -> GroupElement {
        GroupElement {
            group: Group::U1,
            data: [reduce_angle(theta), 0.0, 0.0, 0.0],
        }
    }

    /// An SU(2) or SO(3) element from quaternion components; the quaternion
    /// is normalized, and canonicalized for SO(3).
    pub fn quaternion(group: Group, q: [f64; 4]) -> Result<GroupElement> {
        if group == Group::U1 {
            return Err(Error::InvalidArgument(
                "quaternion constructor applies to su2/so3 only".into(),
            ));
        }
        let n2 = q.iter().map(|v| v * v).sum::<f64>();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::InvalidArgument(
                "quaternion must be nonzero and finite".into(),
            ));
        }
        let mut q = quat_normalize(q);
        if group == Group::So3 {
            q = quat_canonicalize_projective(q);
        }
        Ok(GroupElement { group, data: q })
    }

    /// The identity element of `group`.
    pub fn identity(group: Group) -> GroupElement {
        match group {
            Group::U1 => GroupElement::u1(0.0),
            _ => GroupElement {
                group,
                data: [1.0, 0.0, 0.0, 0.0],
            },
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    /// U(1) angle in `[0, 2π)`. Panics for SU(2)/SO(3) elements.
    pub fn angle(&self) -> f64 {
        assert_eq!(self.group, Group::U1, "angle() is defined for u1 elements");
        self.data[0]
    }

    /// Quaternion components. Panics for U(1) elements.
    pub fn quat(&self) -> [f64; 4] {
        assert_ne!(
            self.group,
            Group::U1,
            "quat() is defined for su2/so3 elements"
        );
        self.data
    }

    /// Group product `a · b`.
    ///
    /// Panics on a group mismatch (that is a programming error, not a data
    /// condition); FFI and CLI entry points validate groups before calling.
    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(
            self.group, other.group,
            "group mismatch in multiply: {} vs {}",
            self.group, other.group
        );
        match self.group {
            Group::U1 => GroupElement::u1(self.data[0] + other.data[0]),
            group => {
                let mut q = quat_normalize(quat_mul(self.data, other.data));
                if group == Group::So3 {
                    q = quat_canonicalize_projective(q);
                }
                GroupElement { group, data: q }
            }
        }
    }

    /// Group inverse (angle negation / quaternion conjugate).
    pub fn inverse(&self) -> GroupElement {
        match self.group {
            Group::U1 => GroupElement::u1(-self.data[0]),
            group => {
                let [w, x, y, z] = self.data;
                let mut q = [w, -x, -y, -z];
                if group == Group::So3 {
                    q = quat_canonicalize_projective(q);
                }
                GroupElement { group, data: q }
            }
        }
    }

    /// Conjugation `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &GroupElement) -> GroupElement {
        h.multiply(self).multiply(&h.inverse())
    }

    /// The conjugacy class of this element.
    ///
    /// U(1): the angle itself. SU(2): the rotation angle `θ = acos(w)` in
    /// `[0, π]`. SO(3): `acos(|w|)`, which lands in `[0, π/2]` on canonical
    /// representatives (both lifts of a rotation give the same value).
    pub fn conj_class(&self) -> ConjClass {
        let angle = match self.group {
            Group::U1 => self.data[0],
            Group::Su2 => self.data[0].clamp(-1.0, 1.0).acos(),
            Group::So3 => self.data[0].abs().clamp(-1.0, 1.0).acos(),
        };
        ConjClass {
            group: self.group,
            angle,
        }
    }

    /// Distance between elements: for U(1) the circular angle distance, for
    /// SU(2)/SO(3) the Euclidean quaternion distance (up to sign for SO(3),
    /// handled by canonicalization).
    pub fn distance(&self, other: &GroupElement) -> f64 {
        assert_eq!(self.group, other.group, "group mismatch in distance");
        match self.group {
            Group::U1 => {
                let d = (self.data[0] - other.data[0]).abs();
                d.min(TAU - d)
            }
            _ => self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        self.group == other.group && self.distance(other) <= tol
    }
}

/// Draw one element from the normalized Haar measure.
///
/// U(1): uniform angle. SU(2): uniform on the 3-sphere (four independent
/// standard normals, normalized). SO(3): pushforward of the SU(2) sample.
pub fn haar_sample(group: Group, rng: &mut Rng) -> GroupElement {
    match group {
        Group::U1 => GroupElement::u1(TAU * rng.random::<f64>()),
        _ => loop {
            let q: [f64; 4] = [
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            ];
            let n2: f64 = q.iter().map(|v| v * v).sum();
            if n2 > 1e-12 {
                return GroupElement::quaternion(group, q).expect("nonzero quaternion");
            }
        },
    }
}

/// A conjugacy class, parameterized by a single angle.
///
/// U(1): `θ ∈ [0, 2π)`. SU(2): `θ ∈ [0, π]`. SO(3): `θ ∈ [0, π]` in the
/// SU(2) double-cover parameterization (classes produced by
/// [`GroupElement::conj_class`] land in `[0, π/2]`; the two lifts `θ` and
/// `π − θ` describe the same class and all even characters agree on them).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjClass {
    pub group: Group,
    pub angle: f64,
}

impl ConjClass {
    pub fn new(group: Group, angle: f64) -> Result<ConjClass> {
        let ok = match group {
            Group::U1 => (0.0..TAU).contains(&angle),
            Group::Su2 | Group::So3 => (0.0..=PI).contains(&angle),
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "class angle {angle} out of range for {group}"
            )));
        }
        Ok(ConjClass { group, angle })
    }

    pub fn identity(group: Group) -> ConjClass {
        ConjClass { group, angle: 0.0 }
    }

    /// The class of the inverse: negated angle for U(1); for SU(2)/SO(3)
    /// every element is conjugate to its inverse, so the class is unchanged.
    pub fn inverse(&self) -> ConjClass {
        match self.group {
            Group::U1 => ConjClass {
                group: Group::U1,
                angle: reduce_angle(-self.angle),
            },
            _ => *self,
        }
    }

    /// A group element representing this class.
    pub fn representative(&self) -> GroupElement {
        match self.group {
            Group::U1 => GroupElement::u1(self.angle),
            group => {
                GroupElement::quaternion(group, [self.angle.cos(), self.angle.sin(), 0.0, 0.0])
                    .expect("unit representative")
            }
        }
    }
}

/// An irreducible-representation label.
///
/// U(1): winding `n ∈ Z`. SU(2): doubled spin `k = 2j ∈ {0, 1, 2, …}`.
/// SO(3): integer spin `j ∈ {0, 1, 2, …}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Irrep {
    pub group: Group,
    pub label: i64,
}

impl Irrep {
    pub fn new(group: Group, label: i64) -> Result<Irrep> {
        if group != Group::U1 && label < 0 {
            return Err(Error::InvalidArgument(format!(
                "irrep label {label} must be nonnegative for {group}"
            )));
        }
        Ok(Irrep { group, label })
    }

    pub fn trivial(group: Group) -> Irrep {
        Irrep { group, label: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.label == 0
    }

    pub fn dim(&self) -> f64 {
        match self.group {
            Group::U1 => 1.0,
            Group::Su2 => (self.label + 1) as f64,
            Group::So3 => (2 * self.label + 1) as f64,
        }
    }

    /// Casimir eigenvalue: `n²` (U1), `(k/2)(k/2 + 1)` (SU2), `j(j+1)` (SO3).
    pub fn casimir(&self) -> f64 {
        match self.group {
            Group::U1 => (self.label * self.label) as f64,
            Group::Su2 => {
                let j = self.label as f64 / 2.0;
                j * (j + 1.0)
            }
            Group::So3 => (self.label * (self.label + 1)) as f64,
        }
    }

    /// The conjugate irrep (`n ↦ −n` for U(1); self-conjugate otherwise).
    pub fn conjugate(&self) -> Irrep {
        match self.group {
            Group::U1 => Irrep {
                group: Group::U1,
                label: -self.label,
            },
            _ => *self,
        }
    }
}

/// `sin((k+1)θ)/sin(θ)` with the removable singularities at `θ ∈ {0, π}`
/// expanded in a 3-term Taylor series to avoid cancellation.
fn chi_su2(k: i64, theta: f64) -> f64 {
    let m = (k + 1) as f64;
    let taylor = |eps: f64| {
        let x = eps * eps;
        let m2 = m * m;
        m * (1.0 - (m2 - 1.0) * x / 6.0 + (m2 - 1.0) * (3.0 * m2 - 7.0) * x * x / 360.0)
    };
    if theta.abs() < CHARACTER_SERIES_THRESHOLD {
        taylor(theta)
    } else if (PI - theta).abs() < CHARACTER_SERIES_THRESHOLD {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * taylor(PI - theta)
    } else {
        (m * theta).sin() / theta.sin()
    }
}

/// The character `χ_r` evaluated on a conjugacy class.
///
/// Real-valued for SU(2)/SO(3); complex `e^{inθ}` for U(1).
pub fn character(r: &Irrep, c: &ConjClass) -> Complex64 {
    assert_eq!(
        r.group, c.group,
        "group mismatch in character: {} vs {}",
        r.group, c.group
    );
    match r.group {
        Group::U1 => Complex64::from_polar(1.0, r.label as f64 * c.angle),
        Group::Su2 => Complex64::new(chi_su2(r.label, c.angle), 0.0),
        Group::So3 => Complex64::new(chi_su2(2 * r.label, c.angle), 0.0),
    }
}

/// All irreps with Casimir ≤ `casimir_cutoff`, sorted ascending by Casimir
/// then by label. For U(1) both signs `±n` are included (with `−n` first).
pub fn irrep_enumerate(group: Group, casimir_cutoff: f64) -> Vec<Irrep> {
    let mut out = Vec::new();
    match group {
        Group::U1 => {
            out.push(Irrep { group, label: 0 });
            let mut n = 1i64;
            while (n * n) as f64 <= casimir_cutoff {
                out.push(Irrep { group, label: -n });
                out.push(Irrep { group, label: n });
                n += 1;
            }
        }
        Group::Su2 | Group::So3 => {
            let mut k = 0i64;
            loop {
                let r = Irrep { group, label: k };
                if r.casimir() > casimir_cutoff {
                    break;
                }
                out.push(r);
                k += 1;
            }
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; standard Chebyshev-based
/// initial guesses. Accurate to machine precision for the sizes used here.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess for the i-th root (descending order).
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Quadrature for class functions: `Σ wᵢ f(cᵢ) ≈ ∫_G f([g]) dg`.
///
/// U(1): uniform nodes on `[0, 2π)` with weight `1/n` (the trapezoid rule on
/// the circle, spectrally accurate for trigonometric integrands).
/// SU(2)/SO(3): Gauss–Legendre on `[0, π]` against the Weyl density
/// `(2/π) sin²θ dθ`. For SO(3) the lifted parameterization double-counts
/// each class, which is harmless because its class functions are symmetric
/// under `θ ↦ π − θ`.
pub fn class_quadrature(group: Group, n_points: usize) -> Result<Vec<(ConjClass, f64)>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least 2 points".into(),
        ));
    }
    let nodes = match group {
        Group::U1 => (0..n_points)
            .map(|i| {
                let theta = TAU * i as f64 / n_points as f64;
                (
                    ConjClass {
                        group,
                        angle: theta,
                    },
                    1.0 / n_points as f64,
                )
            })
            .collect(),
        Group::Su2 | Group::So3 => gauss_legendre(n_points)
            .into_iter()
            .map(|(x, w)| {
                let theta = 0.5 * PI * (x + 1.0);
                let s = theta.sin();
                (
                    ConjClass {
                        group,
                        angle: theta,
                    },
                    w * s * s,
                )
            })
            .collect(),
    };
    Ok(nodes)
}

/// Monte-Carlo report for the two conjugation-averaging character
/// identities:
///
/// * `rel 1`: `∫ χ(x y x⁻¹ z) dx = χ(y) χ(z) / dim`,
/// * `rel 2`: `∫∫ χ([a,b] x) da db = χ(x) / dim²`.
#[derive(Debug, Clone)]
pub struct CharacterIdentityReport {
    pub irrep: Irrep,
    pub n_mc: usize,
    pub rel1_estimate: Complex64,
    pub rel1_target: Complex64,
    pub rel1_stderr: f64,
    pub rel2_estimate: Complex64,
    pub rel2_target: Complex64,
    pub rel2_stderr: f64,
    pub pass: bool,
}

/// Verify the conjugation-averaging identities by Monte Carlo.
///
/// Fixed test points `y, z, x` are drawn from Haar once; the averages over
/// the conjugating variables are then estimated with `n_mc` samples each.
/// Passes when both deviations are below `4·stderr` (plus a 1e-12 absolute
/// floor for the abelian case, where the estimates are exact and the
/// standard error degenerates to zero).
pub fn verify_character_identities(
    r: &Irrep,
    n_mc: usize,
    rng: &mut Rng,
) -> Result<CharacterIdentityReport> {
    if n_mc < 1000 {
        return Err(Error::InvalidArgument("need at least 1e3 samples".into()));
    }
    let group = r.group;
    let dim = r.dim();
    let y = haar_sample(group, rng);
    let z = haar_sample(group, rng);
    let x = haar_sample(group, rng);

    let chi = |g: &GroupElement| character(r, &g.conj_class());

    let samples1: Vec<Complex64> = (0..n_mc)
        .map(|_| {
            let u = haar_sample(group, rng);
            chi(&u.multiply(&y).multiply(&u.inverse()).multiply(&z))
        })
        .collect();
    let samples2: Vec<Complex64> = (0..n_mc)
        .map(|_| {
            let a = haar_sample(group, rng);
            let b = haar_sample(group, rng);
            let comm = a.multiply(&b).multiply(&a.inverse()).multiply(&b.inverse());
            chi(&comm.multiply(&x))
        })
        .collect();

    let (m1, e1) = crate::stats::mean_stderr_complex(&samples1);
    let (m2, e2) = crate::stats::mean_stderr_complex(&samples2);
    let t1 = chi(&y) * chi(&z) / dim;
    let t2 = chi(&x) / (dim * dim);
    let floor = 1e-12;
    let pass = (m1 - t1).norm() < 4.0 * e1 + floor && (m2 - t2).norm() < 4.0 * e2 + floor;
    Ok(CharacterIdentityReport {
        irrep: *r,
        n_mc,
        rel1_estimate: m1,
        rel1_target: t1,
        rel1_stderr: e1,
        rel2_estimate: m2,
        rel2_target: t2,
        rel2_stderr: e2,
        pass,
    })
}
