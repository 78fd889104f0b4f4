//! The `CP¹` picture: Möbius maps as `SL(2, C)` matrices, the `sl(2, C)`-valued
//! dual 1-form of an infinitesimal deformation and transition matrices
//! between two realizations.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::check_len;
use crate::mesh::{EdgeId, FaceId, VertexId};
use crate::realization::{cross_ratios, Realization};
use crate::vector::C3;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Mat2 {
        let m = &self.0;
        let d = self.det();
        Mat2::new(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Rescales to determinant 1, choosing the sign with `Re tr >= 0`
    /// (ties broken by `Im tr >= 0`).
    pub fn to_sl2(&self) -> Mat2 {
        let s = self.det().sqrt();
        let mut m = self.scale(ONE / s);
        let t = m.trace();
        if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) {
            m = -m;
        }
        m
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// `ψ = (z, 1)`.
pub fn lift(z: Complex64) -> [Complex64; 2] {
    [z, ONE]
}

/// A Möbius map `z ↦ (az + b)/(cz + d)` stored with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius(pub Mat2);

impl Mobius {
    /// `None` when `ad - bc = 0`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<Self> {
        let m = Mat2::new(a, b, c, d);
        let det = m.det();
        if det.norm() == 0.0 || !(det.re.is_finite() && det.im.is_finite()) {
            return None;
        }
        Some(Mobius(m.to_sl2()))
    }

    pub fn identity() -> Self {
        Mobius(Mat2::IDENTITY)
    }

    /// The unique Möbius map sending `src[k]` to `dst[k]`; `None` if either
    /// triple has coincident points.
    pub fn from_triples(src: [Complex64; 3], dst: [Complex64; 3]) -> Option<Self> {
        let (na, nb) = (normal_form(src), normal_form(dst));
        if na.det().norm() == 0.0 || nb.det().norm() == 0.0 {
            return None;
        }
        Some(Mobius((nb.inverse() * na).to_sl2()))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `None` when `z` is sent to infinity.
    pub fn apply(&self, z: Complex64) -> Option<Complex64> {
        let [w, s] = self.0.apply(lift(z));
        let tiny = 1e-300_f64.max(f64::EPSILON * f64::EPSILON * w.norm());
        if s.norm() <= tiny {
            None
        } else {
            Some(w / s)
        }
    }

    pub fn compose(&self, inner: &Mobius) -> Mobius {
        Mobius((self.0 * inner.0).to_sl2())
    }

    pub fn inverse(&self) -> Mobius {
        Mobius(self.0.inverse().to_sl2())
    }

    /// `Φ ∘ z`, failing with `VertexAtInfinity` if a vertex has no finite image.
    pub fn push<'m>(&self, r: &Realization<'m>) -> Result<Realization<'m>> {
        let mut w = Vec::with_capacity(r.z().len());
        for (v, &z) in r.z().iter().enumerate() {
            w.push(self.apply(z).ok_or(Error::VertexAtInfinity { vertex: v })?);
        }
        Realization::new(r.mesh(), w)
    }
}

// Sends z1, z2, z3 to 0, 1, ∞.
fn normal_form(z: [Complex64; 3]) -> Mat2 {
    let (a, b) = (z[1] - z[2], z[1] - z[0]);
    Mat2::new(a, -z[0] * a, b, -z[2] * b)
}

/// `M = a σ₁ + b σ₂ + c σ₃` written as `[[c, a + ib], [a - ib, -c]]`.
pub fn pauli_to_matrix(v: C3) -> Mat2 {
    let [a, b, cc] = v.0;
    let i = Complex64::i();
    Mat2::new(cc, a + i * b, a - i * b, -cc)
}

/// Inverse of [`pauli_to_matrix`] on traceless matrices.
pub fn matrix_to_pauli(m: &Mat2) -> C3 {
    let (m12, m21) = (m.0[0][1], m.0[1][0]);
    C3([(m12 + m21) / 2.0, (m12 - m21) / (2.0 * Complex64::i()), m.0[0][0]])
}

/// An `sl(2, C)`-valued dual 1-form per edge id (value on `e*` of the
/// canonically oriented edge), with its Pauli coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SlForm {
    pub matrices: Vec<Mat2>,
    pub vectors: Vec<C3>,
}

/// `η(e*_ij) = μ_ij/(z_j - z_i) [[z_i + z_j, -2 z_i z_j], [2, -z_i - z_j]]`.
pub fn eta_edge(zi: Complex64, zj: Complex64, mu: Complex64) -> Mat2 {
    let s = mu / (zj - zi);
    Mat2::new((zi + zj) * s, -2.0 * zi * zj * s, 2.0 * s, -(zi + zj) * s)
}

/// The same form in Pauli coordinates, `μ/(z_j - z_i) (1 - z_i z_j, i(1 + z_i z_j), z_i + z_j)`.
pub fn eta_edge_vector(zi: Complex64, zj: Complex64, mu: Complex64) -> C3 {
    let s = mu / (zj - zi);
    C3([(ONE - zi * zj) * s, Complex64::i() * (ONE + zi * zj) * s, (zi + zj) * s])
}

/// Builds `η` from `μ` given per edge id (boundary entries ignored).
pub fn eta_from_mu(r: &Realization, mu: &[Complex64]) -> Result<SlForm> {
    let mesh = r.mesh();
    check_len(mesh.edge_count(), mu.len())?;
    let z = r.z();
    let mut out = SlForm { matrices: vec![Mat2::ZERO; mesh.edge_count()], vectors: vec![C3::ZERO; mesh.edge_count()] };
    for &id in mesh.interior_edges() {
        let [i, j] = mesh.edge(id).v;
        if z[i] == z[j] {
            return Err(Error::CoincidentVertices { a: i, b: j });
        }
        out.matrices[id] = eta_edge(z[i], z[j], mu[id]);
        out.vectors[id] = eta_edge_vector(z[i], z[j], mu[id]);
    }
    Ok(out)
}

/// Largest `|η ψ_i + μ ψ_i|`, `|η ψ_j - μ ψ_j|` relative to `|μ|`, and the
/// largest mismatch between the matrix and its Pauli coordinates.
pub fn eta_defects(r: &Realization, mu: &[Complex64], eta: &SlForm) -> (f64, f64) {
    let z = r.z();
    let (mut eigen, mut pauli) = (0.0_f64, 0.0_f64);
    for &id in r.mesh().interior_edges() {
        let [i, j] = r.mesh().edge(id).v;
        let m = &eta.matrices[id];
        let scale = mu[id].norm() * (1.0 + z[i].norm().max(z[j].norm()));
        for (v, sign) in [(i, -1.0), (j, 1.0)] {
            let p = lift(z[v]);
            let e = m.apply(p);
            let d = (e[0] - sign * mu[id] * p[0]).norm().max((e[1] - sign * mu[id] * p[1]).norm());
            eigen = eigen.max(if scale > 0.0 { d / scale } else { d });
        }
        let back = pauli_to_matrix(eta.vectors[id]);
        pauli = pauli.max((back - *m).max_abs() / m.max_abs().max(f64::MIN_POSITIVE));
    }
    (eigen, pauli)
}

/// `μ = -½ ċr/cr` per edge id for an arbitrary deformation `ż`.
pub fn mu_from_deformation(r: &Realization, zdot: &[Complex64]) -> Result<Vec<Complex64>> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), zdot.len())?;
    Ok(log_cr_rates(r, zdot).into_iter().map(|x| -x / 2.0).collect())
}

/// `ċr/cr = ρ_jk + ρ_il - ρ_ki - ρ_lj` with `ρ_ab = (ż_b - ż_a)/(z_b - z_a)`;
/// zero on boundary edges.
pub fn log_cr_rates(r: &Realization, zdot: &[Complex64]) -> Vec<Complex64> {
    let mesh = r.mesh();
    let z = r.z();
    let rho = |a: VertexId, b: VertexId| (zdot[b] - zdot[a]) / (z[b] - z[a]);
    let mut out = vec![ZERO; mesh.edge_count()];
    for &id in mesh.interior_edges() {
        let e = mesh.edge(id);
        let [i, j] = e.v;
        let (k, l) = (e.left_apex.unwrap(), e.right_apex.unwrap());
        out[id] = rho(j, k) + rho(i, l) - rho(k, i) - rho(l, j);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexClosure {
    pub vertex: VertexId,
    /// `‖Σ_j η(e*_ij)‖` (largest entry).
    pub matrix_sum: f64,
    /// `Σ_j μ_ij` and `Σ_j μ_ij/(z_j - z_i)` with `μ` read back from `η`.
    pub mu_sum: Complex64,
    pub mu_dz_sum: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaClosedReport {
    pub vertices: Vec<VertexClosure>,
    pub max_matrix_sum: f64,
    pub max_scalar_sum: f64,
    pub worst_vertex: Option<VertexId>,
    /// Closedness judged from the matrix sums alone.
    pub matrix_closed: bool,
    /// Closedness judged from the two scalar sums alone.
    pub scalar_closed: bool,
}

impl EtaClosedReport {
    pub fn closed(&self) -> bool {
        self.matrix_closed && self.scalar_closed
    }
}

/// Closedness of `η` around interior vertices, from the matrices and
/// independently from the scalar `μ` sums. Both are judged relative to the
/// largest entry of `η` (resp. `μ`, `μ/dz`).
pub fn verify_eta_closed(r: &Realization, eta: &SlForm, tol: f64) -> Result<EtaClosedReport> {
    let mesh = r.mesh();
    check_len(mesh.edge_count(), eta.matrices.len())?;
    let z = r.z();
    // μ_ij = second component of η(e*_ij) ψ_j.
    let mu: Vec<Complex64> = (0..mesh.edge_count())
        .map(|id| {
            let [_, j] = mesh.edge(id).v;
            eta.matrices[id].apply(lift(z[j]))[1]
        })
        .collect();
    let eta_scale = eta.matrices.iter().fold(0.0, |m: f64, x| m.max(x.max_abs()));
    let mu_scale = mu.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let mu_dz_scale = (0..mesh.edge_count()).fold(0.0, |m: f64, id| m.max((mu[id] / r.edge_vector(id)).norm()));

    let mut report = EtaClosedReport {
        vertices: Vec::new(),
        max_matrix_sum: 0.0,
        max_scalar_sum: 0.0,
        worst_vertex: None,
        matrix_closed: true,
        scalar_closed: true,
    };
    let mut worst = 0.0;
    for &i in mesh.interior_vertices() {
        let (mut m, mut s0, mut s1) = (Mat2::ZERO, ZERO, ZERO);
        for oe in mesh.dual_cycle(i).unwrap() {
            let sign = oe.sign();
            m = m + eta.matrices[oe.edge].scale(c(sign, 0.0));
            s0 += mu[oe.edge];
            s1 += mu[oe.edge] / (z[oe.head] - z[i]);
        }
        let vc = VertexClosure { vertex: i, matrix_sum: m.max_abs(), mu_sum: s0, mu_dz_sum: s1 };
        let rel_m = rel(vc.matrix_sum, eta_scale);
        let rel_s = rel(s0.norm(), mu_scale).max(rel(s1.norm(), mu_dz_scale));
        report.max_matrix_sum = report.max_matrix_sum.max(vc.matrix_sum);
        report.max_scalar_sum = report.max_scalar_sum.max(s0.norm().max(s1.norm()));
        report.matrix_closed &= rel_m <= tol;
        report.scalar_closed &= rel_s <= tol;
        if rel_m.max(rel_s) > worst || report.worst_vertex.is_none() {
            worst = rel_m.max(rel_s);
            report.worst_vertex = Some(i);
        }
        report.vertices.push(vc);
    }
    Ok(report)
}

fn rel(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    /// `A_f ∈ SL(2, C)` with `[A_f ψ_v^a] = [ψ_v^b]` on each face.
    pub faces: Vec<Mat2>,
    /// `G(e*) = A_right^{-1} A_left` per edge id (identity on boundary edges).
    pub g: Vec<Mat2>,
    /// `G ψ_j = λ ψ_j` for the canonical orientation `i < j`.
    pub lambda: Vec<Complex64>,
    /// Largest relative failure of `G ψ_i = λ^{-1} ψ_i`, `G ψ_j = λ ψ_j`.
    pub eigen_defect: f64,
    /// Largest `|det G - 1|`.
    pub det_defect: f64,
    /// Largest `‖Π_j G(e*_ij) - I‖` over interior vertices.
    pub product_defect: f64,
    pub worst_vertex: Option<VertexId>,
    /// Largest `|c̃r - cr/λ²| / |c̃r|`.
    pub cross_ratio_defect: f64,
    pub worst_edge: Option<EdgeId>,
}

/// Per-face Möbius maps from `a` to `b` and the multiplicative dual 1-form they induce.
pub fn transition_matrices(a: &Realization, b: &Realization) -> Result<TransitionReport> {
    let mesh = a.mesh();
    if mesh.faces() != b.mesh().faces() {
        return Err(Error::MeshMismatch);
    }
    let faces: Vec<Mat2> = (0..mesh.face_count())
        .map(|f: FaceId| {
            Mobius::from_triples(a.face_points(f), b.face_points(f))
                .map(|m| m.0)
                .ok_or(Error::DegenerateFace { face: f })
        })
        .collect::<Result<_>>()?;
    let (cra, crb) = (cross_ratios(a)?, cross_ratios(b)?);
    let za = a.z();
    let mut report = TransitionReport {
        faces,
        g: vec![Mat2::IDENTITY; mesh.edge_count()],
        lambda: vec![ONE; mesh.edge_count()],
        eigen_defect: 0.0,
        det_defect: 0.0,
        product_defect: 0.0,
        worst_vertex: None,
        cross_ratio_defect: 0.0,
        worst_edge: None,
    };
    for &id in mesh.interior_edges() {
        let e = mesh.edge(id);
        let [i, j] = e.v;
        let g = report.faces[e.right.unwrap()].inverse() * report.faces[e.left.unwrap()];
        let (pi, pj) = (lift(za[i]), lift(za[j]));
        let gj = g.apply(pj);
        let lambda = gj[1];
        let gi = g.apply(pi);
        let scale = g.max_abs() * (1.0 + za[i].norm().max(za[j].norm()));
        let d =
            (gj[0] - lambda * pj[0]).norm().max((gi[0] - pi[0] / lambda).norm()).max((gi[1] - pi[1] / lambda).norm());
        report.eigen_defect = report.eigen_defect.max(d / scale);
        report.det_defect = report.det_defect.max((g.det() - ONE).norm());
        let cd = (crb[id] - cra[id] / (lambda * lambda)).norm() / crb[id].norm();
        if cd > report.cross_ratio_defect || report.worst_edge.is_none() {
            report.cross_ratio_defect = report.cross_ratio_defect.max(cd);
            report.worst_edge = Some(id);
        }
        report.g[id] = g;
        report.lambda[id] = lambda;
    }
    for &v in mesh.interior_vertices() {
        let mut p = Mat2::IDENTITY;
        for oe in mesh.dual_cycle(v).unwrap() {
            let g = report.g[oe.edge];
            p = p * if oe.is_canonical() { g } else { g.inverse() };
        }
        let d = (p - Mat2::IDENTITY).max_abs();
        if d > report.product_defect || report.worst_vertex.is_none() {
            report.product_defect = report.product_defect.max(d);
            report.worst_vertex = Some(v);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;
    use crate::shapes;

    #[test]
    fn eta_of_unit_edge() {
        let m = eta_edge(c(0., 0.), c(1., 0.), ONE);
        assert_eq!(m, Mat2::new(ONE, ZERO, c(2., 0.), -ONE));
        let v = eta_edge_vector(c(0., 0.), c(1., 0.), ONE);
        assert_eq!(v, C3([ONE, Complex64::i(), ONE]));
        assert!((pauli_to_matrix(v) - m).max_abs() < 1e-15);
        assert!((pauli_to_matrix(matrix_to_pauli(&m)) - m).max_abs() < 1e-15);
        assert_eq!(eta_edge(c(0.3, 1.), c(1., -2.), ZERO), Mat2::ZERO);
    }

    #[test]
    fn unit_eta_eigenvectors() {
        let (zi, zj) = (c(0.4, -1.2), c(-0.7, 0.5));
        let m = eta_edge(zi, zj, ONE);
        let (ei, ej) = (m.apply(lift(zi)), m.apply(lift(zj)));
        assert!((ei[0] + zi).norm() < 1e-14 && (ei[1] + ONE).norm() < 1e-14);
        assert!((ej[0] - zj).norm() < 1e-14 && (ej[1] - ONE).norm() < 1e-14);
    }

    #[test]
    fn mobius_from_triples_hits_targets() {
        let src = [c(0., 0.), c(1., 0.), c(0., 1.)];
        let dst = [c(2., 1.), c(-1., 3.), c(0.5, -0.5)];
        let phi = Mobius::from_triples(src, dst).unwrap();
        for k in 0..3 {
            assert!((phi.apply(src[k]).unwrap() - dst[k]).norm() < 1e-13);
        }
        assert!((phi.0.det() - ONE).norm() < 1e-13);
        assert!(Mobius::from_triples([ONE, ONE, ZERO], dst).is_none());
        let inv = Mobius::new(ZERO, ONE, ONE, -c(3., 0.)).unwrap();
        assert_eq!(inv.apply(c(3., 0.)), None);
    }

    #[test]
    fn quadratic_flow_has_no_cross_ratio_change() {
        let (m, z) = shapes::wheel(6);
        let r = Realization::new(&m, z.clone()).unwrap();
        let (a, b, cc) = (c(0.3, -1.1), c(2., 0.5), c(-1., 4.));
        let zd: Vec<Complex64> = z.iter().map(|p| a * p * p + b * p + cc).collect();
        let mu = mu_from_deformation(&r, &zd).unwrap();
        assert!(mu.iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn identical_realizations_have_trivial_transitions() {
        let (m, z) = shapes::grid(4, 4);
        let r = Realization::new(&m, z).unwrap();
        let rep = transition_matrices(&r, &r).unwrap();
        for &id in m.interior_edges() {
            assert!((rep.g[id] - Mat2::IDENTITY).max_abs() < 1e-13);
            assert!((rep.lambda[id] - ONE).norm() < 1e-13);
        }
        let phi = Mobius::new(c(1., 0.5), c(0.2, 0.), c(0.1, -0.3), ONE).unwrap();
        let w = phi.push(&r).unwrap();
        let rep = transition_matrices(&r, &w).unwrap();
        for &id in m.interior_edges() {
            assert!((rep.lambda[id] - ONE).norm() < 1e-12);
        }
        assert!(rep.product_defect < 1e-12);
    }

    #[test]
    fn moved_square_vertex() {
        let m = TriMesh::build(&[[0, 1, 2], [0, 2, 3]]).unwrap();
        let a = Realization::new(&m, vec![c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).unwrap();
        let b = Realization::new(&m, vec![c(0., 0.), c(1., 0.), c(1., 2.), c(0., 1.)]).unwrap();
        let rep = transition_matrices(&a, &b).unwrap();
        let e = m.edge_id(0, 2).unwrap();
        let (ca, cb) = (cross_ratios(&a).unwrap()[e], cross_ratios(&b).unwrap()[e]);
        assert!((rep.lambda[e] * rep.lambda[e] - ca / cb).norm() < 1e-13);
        assert!(rep.cross_ratio_defect < 1e-13 && rep.eigen_defect < 1e-13);
    }
}
