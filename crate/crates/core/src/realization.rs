//! Planar realizations: cross ratios, circumcircle intersection angles and
//! the two finite notions of discrete conformality.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
// Float math for no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forms::check_len;
use crate::mesh::{EdgeId, FaceId, TriMesh, VertexId};

/// Faces with `|Im((z_j - z_i) conj(z_k - z_i))| <= COLLINEAR_TOL * scale²` are rejected.
pub const COLLINEAR_TOL: f64 = 1e-14;

/// Vertex positions in the complex plane for a fixed mesh.
#[derive(Debug, Clone)]
pub struct Realization<'m> {
    mesh: &'m TriMesh,
    z: Vec<Complex64>,
}

impl<'m> Realization<'m> {
    /// Checks that every face is non-degenerate. Orientation-reversed faces are allowed.
    pub fn new(mesh: &'m TriMesh, z: Vec<Complex64>) -> Result<Self> {
        check_len(mesh.vertex_count(), z.len())?;
        if let Some(v) = z.iter().position(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::NonFinite { vertex: v });
        }
        let r = Realization { mesh, z };
        for f in 0..mesh.face_count() {
            let [i, j, k] = mesh.faces()[f];
            let (a, b, c) = (r.z[j] - r.z[i], r.z[k] - r.z[j], r.z[i] - r.z[k]);
            let scale = a.norm().max(b.norm()).max(c.norm());
            if r.area2(f).abs() <= COLLINEAR_TOL * scale * scale {
                return Err(Error::DegenerateFace { face: f });
            }
        }
        Ok(r)
    }

    pub fn mesh(&self) -> &'m TriMesh {
        self.mesh
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn into_positions(self) -> Vec<Complex64> {
        self.z
    }

    /// `dz(e_ij) = z_j - z_i`.
    pub fn dz(&self, i: VertexId, j: VertexId) -> Complex64 {
        self.z[j] - self.z[i]
    }

    /// `z_hi - z_lo` for an edge id.
    pub fn edge_vector(&self, e: EdgeId) -> Complex64 {
        let [a, b] = self.mesh.edge(e).v;
        self.z[b] - self.z[a]
    }

    /// Twice the signed area of a face, positive when counterclockwise.
    pub fn area2(&self, f: FaceId) -> f64 {
        let [i, j, k] = self.mesh.faces()[f];
        ((self.z[j] - self.z[i]).conj() * (self.z[k] - self.z[i])).im
    }

    /// Cotangent of the signed interior angle of face `f` at vertex `v`.
    pub fn cot_at(&self, f: FaceId, v: VertexId) -> f64 {
        let (a, b) = self.others(f, v);
        let w = (self.z[a] - self.z[v]).conj() * (self.z[b] - self.z[v]);
        w.re / w.im
    }

    /// Signed interior angle of face `f` at vertex `v`, in `(-π, π)`.
    pub fn angle_at(&self, f: FaceId, v: VertexId) -> f64 {
        let (a, b) = self.others(f, v);
        let w = (self.z[a] - self.z[v]).conj() * (self.z[b] - self.z[v]);
        w.im.atan2(w.re)
    }

    /// Circumradius of a face.
    pub fn circumradius(&self, f: FaceId) -> f64 {
        circumradius(self.face_points(f))
    }

    pub fn face_points(&self, f: FaceId) -> [Complex64; 3] {
        let [i, j, k] = self.mesh.faces()[f];
        [self.z[i], self.z[j], self.z[k]]
    }

    /// The realization `Φ ∘ z` for an arbitrary map.
    pub fn mapped(&self, map: impl Fn(Complex64) -> Complex64) -> Result<Realization<'m>> {
        Realization::new(self.mesh, self.z.iter().map(|&p| map(p)).collect())
    }

    /// Largest edge length, used to make tolerances scale-free.
    pub fn scale(&self) -> f64 {
        (0..self.mesh.edge_count()).map(|e| self.edge_vector(e).norm()).fold(0.0, f64::max)
    }

    // The two other vertices of `f`, in counterclockwise order after `v`.
    fn others(&self, f: FaceId, v: VertexId) -> (VertexId, VertexId) {
        let t = self.mesh.faces()[f];
        let c = t.iter().position(|&x| x == v).expect("vertex belongs to face");
        (t[(c + 1) % 3], t[(c + 2) % 3])
    }
}

pub fn circumradius(p: [Complex64; 3]) -> f64 {
    let (a, b, c) = ((p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm());
    let area2 = ((p[1] - p[0]).conj() * (p[2] - p[0])).im;
    a * b * c / (2.0 * area2.abs())
}

/// Cross ratio of four points as attached to an interior edge `{ij}` with
/// left apex `k` and right apex `l`.
pub fn cross_ratio(zi: Complex64, zj: Complex64, zk: Complex64, zl: Complex64) -> Complex64 {
    (zj - zk) * (zi - zl) / ((zk - zi) * (zl - zj))
}

/// Cross ratio per edge id; boundary edges hold zero.
pub fn cross_ratios(r: &Realization) -> Result<Vec<Complex64>> {
    let mesh = r.mesh();
    let z = r.z();
    let mut out = vec![Complex64::new(0.0, 0.0); mesh.edge_count()];
    for &id in mesh.interior_edges() {
        let e = mesh.edge(id);
        let [i, j] = e.v;
        let (k, l) = (e.left_apex.unwrap(), e.right_apex.unwrap());
        let cr = cross_ratio(z[i], z[j], z[k], z[l]);
        if !(cr.re.is_finite() && cr.im.is_finite()) || cr.norm() == 0.0 {
            return Err(Error::DegenerateFace { face: e.left.unwrap() });
        }
        out[id] = cr;
    }
    Ok(out)
}

/// Circumcircle intersection angles `arg(cr)` in `[0, 2π)`; boundary edges hold zero.
pub fn intersection_angles(r: &Realization) -> Result<Vec<f64>> {
    let mesh = r.mesh();
    let cr = cross_ratios(r)?;
    let mut out = vec![0.0; mesh.edge_count()];
    for &id in mesh.interior_edges() {
        out[id] = wrap_2pi(cr[id].arg());
    }
    Ok(out)
}

pub fn wrap_2pi(a: f64) -> f64 {
    let mut w = a % TAU;
    if w < 0.0 {
        w += TAU;
    }
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let w = wrap_2pi(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Largest per-edge defect; relative for conformal equivalence, in radians for patterns.
    pub max_defect: f64,
    pub worst_edge: Option<EdgeId>,
    /// Per-vertex scale factors `u` (conformal) or angular offsets `α` in `[0, 2π)`
    /// (pattern); present only when equivalent.
    pub vertex_values: Option<Vec<f64>>,
    /// Largest disagreement between values reconstructed from different
    /// incident triangles at the same vertex.
    pub spread: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;

/// Conformal equivalence: `|cr_a| = |cr_b|` on every interior edge, with the
/// scale factors `u` such that `|w_j - w_i| = e^{(u_i + u_j)/2} |z_j - z_i|`.
pub fn check_conformal_equiv(a: &Realization, b: &Realization, tol: f64) -> Result<EquivalenceReport> {
    let mesh = same_mesh(a, b)?;
    mesh.require_disk()?;
    let (ca, cb) = (cross_ratios(a)?, cross_ratios(b)?);
    let mut report =
        EquivalenceReport { equivalent: true, max_defect: 0.0, worst_edge: None, vertex_values: None, spread: 0.0 };
    for &id in mesh.interior_edges() {
        let na = ca[id].norm();
        let d = (na - cb[id].norm()).abs() / na;
        if d > report.max_defect {
            report.max_defect = d;
            report.worst_edge = Some(id);
        }
    }
    report.equivalent = report.max_defect <= tol;
    if report.equivalent {
        let sigma: Vec<f64> =
            (0..mesh.edge_count()).map(|e| (b.edge_vector(e).norm() / a.edge_vector(e).norm()).ln()).collect();
        let (u, spread) = reconstruct_vertex_values(mesh, &sigma, |x, y| (x - y).abs(), |x| x);
        report.vertex_values = Some(u);
        report.spread = spread;
    }
    Ok(report)
}

/// Same pattern structure: `arg(cr_a) = arg(cr_b)` on every interior edge,
/// with angular offsets `α` such that edges rotate by `(α_i + α_j)/2`.
pub fn check_pattern(a: &Realization, b: &Realization, tol: f64) -> Result<EquivalenceReport> {
    let mesh = same_mesh(a, b)?;
    mesh.require_disk()?;
    let (ca, cb) = (cross_ratios(a)?, cross_ratios(b)?);
    let mut report =
        EquivalenceReport { equivalent: true, max_defect: 0.0, worst_edge: None, vertex_values: None, spread: 0.0 };
    for &id in mesh.interior_edges() {
        let d = (ca[id] / cb[id]).arg().abs();
        if d > report.max_defect {
            report.max_defect = d;
            report.worst_edge = Some(id);
        }
    }
    report.equivalent = report.max_defect <= tol;
    if report.equivalent {
        let omega: Vec<f64> = (0..mesh.edge_count()).map(|e| (b.edge_vector(e) / a.edge_vector(e)).arg()).collect();
        let (alpha, spread) = reconstruct_vertex_values(mesh, &omega, |x, y| wrap_pi(x - y).abs(), wrap_2pi);
        report.vertex_values = Some(alpha);
        report.spread = spread;
    }
    Ok(report)
}

// value_i = s_ki + s_ij - s_jk from every triangle {ijk} at i; the first
// (lowest face id) is reported, the spread over the others is measured.
fn reconstruct_vertex_values(
    mesh: &TriMesh,
    edge_value: &[f64],
    distance: impl Fn(f64, f64) -> f64,
    normalize: impl Fn(f64) -> f64,
) -> (Vec<f64>, f64) {
    let mut first: Vec<Option<f64>> = vec![None; mesh.vertex_count()];
    let mut spread: f64 = 0.0;
    for (f, t) in mesh.faces().iter().enumerate() {
        let fe = mesh.face_edges(f);
        // fe[c] joins t[c] and t[c+1].
        for c in 0..3 {
            let (ij, jk, ki) = (fe[c], fe[(c + 1) % 3], fe[(c + 2) % 3]);
            let value = normalize(edge_value[ki] + edge_value[ij] - edge_value[jk]);
            let v = t[c];
            match first[v] {
                None => first[v] = Some(value),
                Some(x) => spread = spread.max(distance(x, value)),
            }
        }
    }
    (first.into_iter().map(|x| x.unwrap_or(0.0)).collect(), spread)
}

fn same_mesh<'m>(a: &Realization<'m>, b: &Realization<'m>) -> Result<&'m TriMesh> {
    let (ma, mb) = (a.mesh(), b.mesh());
    if core::ptr::eq(ma, mb) || ma.faces() == mb.faces() {
        Ok(ma)
    } else {
        Err(Error::MeshMismatch)
    }
}
