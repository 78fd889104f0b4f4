//! Discrete minimal surfaces from a realization and a holomorphic quadratic
//! differential.
//!
//! The surface lives on faces. Its edges are dual to the mesh edges and
//! parallel to the corresponding edges of the Gauß map, the inverse
//! stereographic image of `z`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
// Float math for no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forms::{check_len, dual_differential, integrate_dual, Gauge};
use crate::hqd::{verify_qdiff, QuadDiff};
use crate::mesh::{EdgeId, FaceId, TriMesh, VertexId};
use crate::moebius::eta_edge_vector;
use crate::realization::Realization;
use crate::vector::{self, Vec3, C3};

/// Inverse stereographic projection `(2 Re z, 2 Im z, |z|² - 1)/(|z|² + 1)`.
pub fn gauss_point(z: Complex64) -> Vec3 {
    let s = z.norm_sqr();
    let d = s + 1.0;
    [2.0 * z.re / d, 2.0 * z.im / d, (s - 1.0) / d]
}

pub fn gauss_map(r: &Realization) -> Vec<Vec3> {
    r.z().iter().map(|&z| gauss_point(z)).collect()
}

/// `1 + |z|²` recovered from a point of the sphere other than the north pole.
fn conformal_factor(n: Vec3) -> f64 {
    2.0 / (1.0 - n[2])
}

/// The C³-valued dual 1-form `(q/(i dz))(1 - z_i z_j, i(1 + z_i z_j), z_i + z_j)`
/// per edge id; zero on boundary edges.
pub fn integrand(r: &Realization, q: &QuadDiff) -> Result<Vec<C3>> {
    let mesh = r.mesh();
    check_len(mesh.edge_count(), q.im().len())?;
    let z = r.z();
    let mut out = vec![C3::ZERO; mesh.edge_count()];
    for &id in mesh.interior_edges() {
        let [i, j] = mesh.edge(id).v;
        // q / i = Im q.
        out[id] = eta_edge_vector(z[i], z[j], Complex64::new(q.im()[id], 0.0));
    }
    Ok(out)
}

/// Closure of the integrand around each interior vertex, `‖Σ_j η(e*_ij)‖`.
pub fn integrand_vertex_sums(mesh: &TriMesh, eta: &[C3]) -> Vec<(VertexId, f64)> {
    crate::forms::vertex_sums(mesh, eta).into_iter().map(|(v, s)| (v, s.norm())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalSurface {
    /// Complex potential `𝔉` per face, zero on the anchor face.
    pub potential: Vec<C3>,
    pub gauss: Vec<Vec3>,
    /// `k_ij = -i q_ij / |z_j - z_i|²` per edge id (zero on boundary edges).
    pub k: Vec<f64>,
    /// Largest failure of the integrated potential to reproduce the integrand.
    pub closure_defect: f64,
    pub worst_edge: Option<EdgeId>,
    /// `‖η‖∞`, the scale of the closure defect.
    pub scale: f64,
}

/// Resolution of associate-family angles, in turns (about 5.7e-12 rad).
pub const ANGLE_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

/// `α` as a fraction of a turn in `[0, 1)`, resolved to `ANGLE_RESOLUTION`.
///
/// `α` and `α + 2π` map to the same value unless the rounded sum crosses a
/// bin edge. Multiples of π/4 sit at bin centres.
pub fn family_turns(alpha: f64) -> f64 {
    let turns = alpha / TAU;
    let frac = ((turns - turns.floor()) / ANGLE_RESOLUTION).round() * ANGLE_RESOLUTION;
    if frac >= 1.0 {
        0.0
    } else {
        frac
    }
}

impl MinimalSurface {
    /// Member `f^α = Re(e^{iα} 𝔉)` of the associate family, at the angle
    /// `family_turns(α)`.
    pub fn at(&self, alpha: f64) -> Vec<Vec3> {
        let rot = Complex64::from_polar(1.0, family_turns(alpha) * TAU);
        self.potential.iter().map(|p| (*p * rot).re()).collect()
    }
}

/// Relative closure tolerance for the integrated potential.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Integrates the Weierstrass data over the dual graph, starting at `gauge.face`.
pub fn weierstrass_integrate(r: &Realization, q: &QuadDiff, gauge: Gauge, holo_tol: f64) -> Result<MinimalSurface> {
    let mesh = r.mesh();
    mesh.require_disk()?;
    if gauge.face >= mesh.face_count() {
        return Err(Error::InvalidAnchor { index: gauge.face });
    }
    verify_qdiff(r, q, holo_tol)?.ensure()?;
    let eta = integrand(r, q)?;
    let scale = eta.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let p = integrate_dual(mesh, &eta, gauge.face)?;
    if p.closure_defect > CLOSURE_TOL * scale {
        return Err(Error::IntegrationDefect { edge: p.worst_edge.unwrap_or(0), defect: p.closure_defect });
    }
    let k = (0..mesh.edge_count()).map(|e| q.im()[e] / r.edge_vector(e).norm_sqr()).collect();
    Ok(MinimalSurface {
        potential: p.values,
        gauss: gauss_map(r),
        k,
        closure_defect: p.closure_defect,
        worst_edge: p.worst_edge,
        scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalReport {
    /// `‖Δn × df(e*)‖ / (‖Δn‖ max ‖df‖)` per edge id.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    pub worst_edge: Option<EdgeId>,
    /// Least-squares `k` with `df ≈ k (1 + |z_i|²)(1 + |z_j|²)/2 Δn`.
    pub k: Vec<f64>,
    /// Largest component of `df` orthogonal to `Δn`, relative to `max ‖df‖`.
    pub max_orthogonal: f64,
    pub tol: f64,
}

impl MinimalReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

/// Checks that every dual edge `f_left - f_right` is parallel to `n_j - n_i`.
pub fn verify_minimal(mesh: &TriMesh, n: &[Vec3], f: &[Vec3], tol: f64) -> Result<MinimalReport> {
    if n.len() != mesh.vertex_count() || f.len() != mesh.face_count() {
        return Err(Error::MeshMismatch);
    }
    let df = dual_differential(mesh, &f.iter().map(|p| Wrap(*p)).collect::<Vec<_>>());
    // The residual is normalized by the largest dual edge, not the edge's own length:
    // rounding in `f` makes the direction of a nearly vanishing df(e*) meaningless.
    let df_scale = mesh.interior_edges().iter().fold(0.0, |m: f64, &e| m.max(vector::norm(df[e].0)));
    let mut report = MinimalReport {
        residual: vec![0.0; mesh.edge_count()],
        max_residual: 0.0,
        worst_edge: None,
        k: vec![0.0; mesh.edge_count()],
        max_orthogonal: 0.0,
        tol,
    };
    for &id in mesh.interior_edges() {
        let [i, j] = mesh.edge(id).v;
        let dn = vector::sub(n[j], n[i]);
        let d = df[id].0;
        let ln = vector::norm(dn);
        let c = conformal_factor(n[i]) * conformal_factor(n[j]) / 2.0;
        let t = vector::dot(d, dn) / (ln * ln);
        report.k[id] = t / c;
        let orth = vector::norm(vector::sub(d, vector::scale(dn, t)));
        if df_scale > 0.0 {
            report.max_orthogonal = report.max_orthogonal.max(orth / df_scale);
        }
        let res = if df_scale > 0.0 { vector::norm(vector::cross(dn, d)) / (ln * df_scale) } else { 0.0 };
        report.residual[id] = res;
        if res > report.max_residual || report.worst_edge.is_none() {
            report.max_residual = report.max_residual.max(res);
            report.worst_edge = Some(id);
        }
    }
    Ok(report)
}

/// Recovers `q_ij = i k_ij |z_j - z_i|²` from a minimal surface over `z`.
pub fn qdiff_from_minimal(r: &Realization, f: &[Vec3], tol: f64) -> Result<QuadDiff> {
    let mesh = r.mesh();
    let report = verify_minimal(mesh, &gauss_map(r), f, tol)?;
    if !report.passed() {
        return Err(Error::NotMinimal { edge: report.worst_edge.unwrap_or(0), residual: report.max_residual });
    }
    QuadDiff::new(mesh, (0..mesh.edge_count()).map(|e| report.k[e] * r.edge_vector(e).norm_sqr()).collect())
}

/// Largest `‖df - k (1 + |z_i|²)(1 + |z_j|²)/2 Δn‖ / ‖df‖∞` with the given `k`.
pub fn k_scaling_defect(r: &Realization, f: &[Vec3], k: &[f64]) -> f64 {
    let mesh = r.mesh();
    let z = r.z();
    let n = gauss_map(r);
    let df = dual_differential(mesh, &f.iter().map(|p| Wrap(*p)).collect::<Vec<_>>());
    let scale = mesh.interior_edges().iter().fold(0.0, |m: f64, &e| m.max(vector::norm(df[e].0)));
    let mut worst: f64 = 0.0;
    for &id in mesh.interior_edges() {
        let [i, j] = mesh.edge(id).v;
        let c = k[id] * (1.0 + z[i].norm_sqr()) * (1.0 + z[j].norm_sqr()) / 2.0;
        let d = vector::sub(df[id].0, vector::scale(vector::sub(n[j], n[i]), c));
        worst = worst.max(vector::norm(d));
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Faces around each interior vertex in counterclockwise order: the polygons of the dual mesh.
pub fn dual_polygons(mesh: &TriMesh) -> Vec<(VertexId, Vec<FaceId>)> {
    mesh.interior_vertices().iter().map(|&v| (v, mesh.star_faces(v).to_vec())).collect()
}

/// Largest distance of a dual polygon's vertices from their best-fit plane,
/// relative to the polygon's diameter. A diagnostic only.
pub fn dual_planarity(mesh: &TriMesh, f: &[Vec3]) -> f64 {
    let mut worst: f64 = 0.0;
    for (_, poly) in dual_polygons(mesh) {
        let pts: Vec<Vec3> = poly.iter().map(|&p| f[p]).collect();
        let m = pts.len() as f64;
        let c = pts.iter().fold([0.0; 3], |a, p| vector::add(a, vector::scale(*p, 1.0 / m)));
        // Newell normal of the polygon.
        let mut nrm = [0.0; 3];
        for k in 0..pts.len() {
            nrm = vector::add(nrm, vector::cross(pts[k], pts[(k + 1) % pts.len()]));
        }
        let (ln, diam) = (
            vector::norm(nrm),
            pts.iter().flat_map(|a| pts.iter().map(move |b| vector::norm(vector::sub(*a, *b)))).fold(0.0, f64::max),
        );
        if ln == 0.0 || diam == 0.0 {
            continue;
        }
        for p in &pts {
            let d = vector::dot(vector::sub(*p, c), nrm).abs() / ln;
            worst = worst.max(d / diam);
        }
    }
    worst
}

// Lets 3-vectors flow through the generic form helpers.
#[derive(Debug, Clone, Copy)]
struct Wrap(Vec3);

impl core::ops::Add for Wrap {
    type Output = Wrap;
    fn add(self, o: Wrap) -> Wrap {
        Wrap(vector::add(self.0, o.0))
    }
}

impl core::ops::Sub for Wrap {
    type Output = Wrap;
    fn sub(self, o: Wrap) -> Wrap {
        Wrap(vector::sub(self.0, o.0))
    }
}

impl crate::forms::FormValue for Wrap {
    fn zero() -> Self {
        Wrap([0.0; 3])
    }
    fn magnitude(&self) -> f64 {
        vector::norm(self.0)
    }
}
