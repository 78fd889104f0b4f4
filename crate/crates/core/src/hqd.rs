//! Discrete holomorphic quadratic differentials.
//!
//! A quadratic differential is an imaginary number `q_ij` per interior edge;
//! it is holomorphic when `Σ_j q_ij = 0` and `Σ_j q_ij / (z_j - z_i) = 0`
//! around every interior vertex. Harmonic functions `u` produce them through
//! `q = du_z(e*) dz(e)`, and every holomorphic `q` on a disk arises this way.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::forms::{check_len, integrate_dual, integrate_primal, Gauge};
use crate::laplace::{check_harmonic, HARMONIC_TOL};
use crate::mesh::{EdgeId, TriMesh, VertexId};
use crate::moebius::{log_cr_rates, Mobius};
use crate::realization::{intersection_angles, wrap_pi, Realization};

/// Imaginary parts of `q` per edge id; boundary entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadDiff {
    im: Vec<f64>,
}

impl QuadDiff {
    /// Boundary entries are cleared.
    pub fn new(mesh: &TriMesh, im: Vec<f64>) -> Result<Self> {
        check_len(mesh.edge_count(), im.len())?;
        let mut im = im;
        for (id, e) in mesh.edges().iter().enumerate() {
            if !e.is_interior() {
                im[id] = 0.0;
            }
        }
        Ok(QuadDiff { im })
    }

    pub fn zero(mesh: &TriMesh) -> Self {
        QuadDiff { im: vec![0.0; mesh.edge_count()] }
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn value(&self, e: EdgeId) -> Complex64 {
        Complex64::new(0.0, self.im[e])
    }

    pub fn max_abs(&self) -> f64 {
        self.im.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> QuadDiff {
        QuadDiff { im: self.im.iter().map(|x| x * s).collect() }
    }
}

/// `grad_z u` and `u_z = ½ conj(grad_z u)` per face.
#[derive(Debug, Clone, PartialEq)]
pub struct GradField {
    pub grad: Vec<Complex64>,
    pub uz: Vec<Complex64>,
}

/// The gradient of the piecewise linear interpolant, `⟨grad, z_j - z_i⟩ = u_j - u_i` on each face.
pub fn gradient(r: &Realization, u: &[f64]) -> Result<GradField> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), u.len())?;
    let z = r.z();
    let i = Complex64::i();
    let grad: Vec<Complex64> = mesh
        .faces()
        .iter()
        .enumerate()
        .map(|(f, &[a, b, c])| i * (u[a] * (z[c] - z[b]) + u[b] * (z[a] - z[c]) + u[c] * (z[b] - z[a])) / r.area2(f))
        .collect();
    let uz = grad.iter().map(|g| g.conj() / 2.0).collect();
    Ok(GradField { grad, uz })
}

/// `du_z(e*_ij) dz(e_ij)` per edge id for any vertex function; zero on boundary edges.
pub fn hopf_form(r: &Realization, u: &[f64]) -> Result<Vec<Complex64>> {
    let g = gradient(r, u)?;
    let mesh = r.mesh();
    Ok(mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| match (e.left, e.right) {
            (Some(l), Some(rt)) => (g.uz[l] - g.uz[rt]) * r.edge_vector(id),
            _ => Complex64::new(0.0, 0.0),
        })
        .collect())
}

/// The same quantity from corner cotangents:
/// `q_ij = -(i/2)(cot β_i^k (u_k - u_j) + cot β_j^k (u_k - u_i) + cot β_j^l (u_l - u_i) + cot β_i^l (u_l - u_j))`.
pub fn hopf_form_cotan(r: &Realization, u: &[f64]) -> Result<Vec<Complex64>> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), u.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); mesh.edge_count()];
    for &id in mesh.interior_edges() {
        let e = mesh.edge(id);
        let [i, j] = e.v;
        let (fl, fr) = (e.left.unwrap(), e.right.unwrap());
        let (k, l) = (e.left_apex.unwrap(), e.right_apex.unwrap());
        let s = r.cot_at(fl, i) * (u[k] - u[j])
            + r.cot_at(fl, j) * (u[k] - u[i])
            + r.cot_at(fr, j) * (u[l] - u[i])
            + r.cot_at(fr, i) * (u[l] - u[j]);
        out[id] = Complex64::new(0.0, -s / 2.0);
    }
    Ok(out)
}

/// `q = du_z dz` for a harmonic `u`.
pub fn qdiff_from_harmonic(r: &Realization, u: &[f64]) -> Result<QuadDiff> {
    check_harmonic(r, u, HARMONIC_TOL)?;
    let q = hopf_form(r, u)?;
    QuadDiff::new(r.mesh(), q.iter().map(|x| x.im).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexDefect {
    pub vertex: VertexId,
    /// `Σ_j q_ij`.
    pub sum: Complex64,
    /// `Σ_j q_ij / (z_j - z_i)`.
    pub sum_dz: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QdiffReport {
    pub vertices: Vec<VertexDefect>,
    pub max_sum: f64,
    pub max_sum_dz: f64,
    /// Largest `|Re q|`; zero for stored differentials, kept for reports on raw data.
    pub max_real: f64,
    /// `‖q‖∞` and `‖q/dz‖∞`, the scales the sums are judged against.
    pub q_scale: f64,
    pub q_dz_scale: f64,
    pub worst_vertex: Option<VertexId>,
    pub tol: f64,
}

impl QdiffReport {
    /// Largest sum relative to its scale.
    pub fn max_defect(&self) -> f64 {
        rel(self.max_sum, self.q_scale).max(rel(self.max_sum_dz, self.q_dz_scale))
    }

    pub fn holomorphic(&self) -> bool {
        self.max_defect() <= self.tol && self.max_real <= self.tol * self.q_scale
    }

    pub fn ensure(&self) -> Result<()> {
        if self.holomorphic() {
            Ok(())
        } else {
            Err(Error::NotHolomorphic { vertex: self.worst_vertex.unwrap_or(0), defect: self.max_defect() })
        }
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

/// Both vertex sums at every interior vertex.
pub fn verify_qdiff(r: &Realization, q: &QuadDiff, tol: f64) -> Result<QdiffReport> {
    let values: Vec<Complex64> = (0..q.im.len()).map(|e| q.value(e)).collect();
    verify_complex(r, &values, tol)
}

/// As [`verify_qdiff`] for arbitrary complex edge values.
pub fn verify_complex(r: &Realization, q: &[Complex64], tol: f64) -> Result<QdiffReport> {
    let mesh = r.mesh();
    check_len(mesh.edge_count(), q.len())?;
    let z = r.z();
    let mut report = QdiffReport {
        vertices: Vec::with_capacity(mesh.interior_vertices().len()),
        max_sum: 0.0,
        max_sum_dz: 0.0,
        max_real: 0.0,
        q_scale: 0.0,
        q_dz_scale: 0.0,
        worst_vertex: None,
        tol,
    };
    for &id in mesh.interior_edges() {
        report.q_scale = report.q_scale.max(q[id].norm());
        report.q_dz_scale = report.q_dz_scale.max((q[id] / r.edge_vector(id)).norm());
        report.max_real = report.max_real.max(q[id].re.abs());
    }
    let mut worst = -1.0;
    for &i in mesh.interior_vertices() {
        let (mut s, mut sd) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &j in mesh.neighbors(i) {
            let e = mesh.edge_id(i, j).unwrap();
            s += q[e];
            sd += q[e] / (z[j] - z[i]);
        }
        report.max_sum = report.max_sum.max(s.norm());
        report.max_sum_dz = report.max_sum_dz.max(sd.norm());
        let d = rel(s.norm(), report.q_scale).max(rel(sd.norm(), report.q_dz_scale));
        if d > worst {
            worst = d;
            report.worst_vertex = Some(i);
        }
        report.vertices.push(VertexDefect { vertex: i, sum: s, sum_dz: sd });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFromQ {
    pub u: Vec<f64>,
    /// The face function `h = u_z`, zero on the anchor face.
    pub uz: Vec<Complex64>,
    /// Closure failure of `τ = q/dz` around interior vertices.
    pub tau_defect: f64,
    /// Largest disagreement of `Re(2 h dz)` evaluated from the two faces of an edge.
    pub side_defect: f64,
    /// Closure failure of `du` around faces.
    pub omega_defect: f64,
}

/// Relative tolerance used by [`harmonic_from_qdiff`].
pub const INTEGRATION_TOL: f64 = 1e-9;

/// Integrates `τ(e*_ij) = q_ij/dz(e_ij)` to a face function `h`, then
/// `du(e_ij) = Re(2 h dz(e_ij))` to a vertex function `u` with `u = 0` at the
/// anchor vertex. Only the second vertex sum of `q` is needed.
pub fn harmonic_from_qdiff(r: &Realization, q: &QuadDiff, gauge: Gauge) -> Result<HarmonicFromQ> {
    let mesh = r.mesh();
    mesh.require_disk()?;
    check_len(mesh.edge_count(), q.im.len())?;
    if gauge.vertex >= mesh.vertex_count() {
        return Err(Error::InvalidAnchor { index: gauge.vertex });
    }
    if gauge.face >= mesh.face_count() {
        return Err(Error::InvalidAnchor { index: gauge.face });
    }
    let tau: Vec<Complex64> = (0..mesh.edge_count()).map(|e| q.value(e) / r.edge_vector(e)).collect();
    let tau_scale = tau.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let h = integrate_dual(mesh, &tau, gauge.face)?;
    if h.closure_defect > INTEGRATION_TOL * tau_scale {
        return Err(Error::ClosureDefect { edge: h.worst_edge.unwrap_or(0), defect: h.closure_defect });
    }

    let mut side_defect: f64 = 0.0;
    let mut worst = None;
    let mut omega = vec![0.0; mesh.edge_count()];
    let mut omega_scale: f64 = 0.0;
    for (id, e) in mesh.edges().iter().enumerate() {
        let dz = r.edge_vector(id);
        let sides: Vec<f64> = [e.left, e.right].iter().flatten().map(|&f| (2.0 * h.values[f] * dz).re).collect();
        omega[id] = sides[0];
        omega_scale = omega_scale.max(sides[0].abs());
        if sides.len() == 2 {
            let d = (sides[0] - sides[1]).abs();
            if d > side_defect {
                side_defect = d;
                worst = Some(id);
            }
        }
    }
    if side_defect > INTEGRATION_TOL * omega_scale.max(tau_scale * r.scale()) {
        return Err(Error::NotRealizable { edge: worst.unwrap_or(0), defect: side_defect });
    }
    let u = integrate_primal(mesh, &omega, gauge.vertex)?;
    if u.closure_defect > INTEGRATION_TOL * omega_scale {
        return Err(Error::ClosureDefect { edge: u.worst_edge.unwrap_or(0), defect: u.closure_defect });
    }
    Ok(HarmonicFromQ {
        u: u.values,
        uz: h.values,
        tau_defect: h.closure_defect,
        side_defect,
        omega_defect: u.closure_defect,
    })
}

/// Removes the least-squares fit by `span{1, Re z, Im z}`.
pub fn modulo_linear(r: &Realization, u: &[f64]) -> Result<Vec<f64>> {
    check_len(r.mesh().vertex_count(), u.len())?;
    let z = r.z();
    let mut basis: Vec<Vec<f64>> =
        vec![vec![1.0; z.len()], z.iter().map(|p| p.re).collect(), z.iter().map(|p| p.im).collect()];
    // Modified Gram-Schmidt; dependent directions are dropped.
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for b in basis.iter_mut() {
        let n0 = dot(b, b).sqrt();
        for o in &ortho {
            let c = dot(b, o);
            for (x, y) in b.iter_mut().zip(o) {
                *x -= c * y;
            }
        }
        let n = dot(b, b).sqrt();
        if n > 1e-12 * n0 {
            ortho.push(b.iter().map(|x| x / n).collect());
        }
    }
    let mut out = u.to_vec();
    for o in &ortho {
        let c = dot(&out, o);
        for (x, y) in out.iter_mut().zip(o) {
            *x -= c * y;
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Re-verifies `q` on `Φ ∘ z`.
pub fn qdiff_moebius_pushforward_check(r: &Realization, q: &QuadDiff, phi: &Mobius, tol: f64) -> Result<QdiffReport> {
    let w = phi.push(r)?;
    verify_qdiff(&w, q, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `q = du_z dz` per edge id.
    pub q: Vec<Complex64>,
    /// `d/dt log cr` by central differences.
    pub log_cr_rate_fd: Vec<Complex64>,
    /// `d/dt log cr` from the edge rates of `ż`.
    pub log_cr_rate: Vec<Complex64>,
    /// `φ̇` by central differences of intersection angles.
    pub phi_rate_fd: Vec<f64>,
    /// Step used for the central differences.
    pub step: f64,
    /// Scale the defects are divided by.
    pub scale: f64,
    /// Largest `|q - ċr/cr (fd)| / scale`.
    pub fd_defect: f64,
    /// Largest `|q - ċr/cr| / scale` with the analytic rates.
    pub analytic_defect: f64,
    /// Largest `|Im q - φ̇ (fd)| / scale`.
    pub phi_defect: f64,
    pub worst_edge: Option<EdgeId>,
}

/// Relative tolerance for finite-difference comparisons.
pub const FD_TOL: f64 = 1e-5;

/// Compares `q = du_z dz` of the harmonic `u` with the logarithmic rate of
/// change of the cross ratios under the conformal deformation `ż` built from
/// `u`. The identity checked is `du_z dz = ċr/cr = iφ̇`.
///
/// Defects are relative to `max(‖q‖∞, 1e-6 ‖ρ‖∞)` where `ρ` are the edge rates
/// of `ż`, so that a vanishing `q` is compared against the finite-difference
/// noise floor instead of zero.
pub fn cross_ratio_rate_check(r: &Realization, u: &[f64], zdot: &[Complex64]) -> Result<RateReport> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), zdot.len())?;
    let q = hopf_form(r, u)?;
    let analytic = log_cr_rates(r, zdot);
    let speed = zdot.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let step = 1e-6 * r.scale() / speed.max(f64::MIN_POSITIVE);
    let shifted = |t: f64| -> Result<Realization> {
        Realization::new(mesh, r.z().iter().zip(zdot).map(|(z, d)| z + d * t).collect())
    };
    let (plus, minus) = (shifted(step)?, shifted(-step)?);
    let (cp, cm) = (crate::realization::cross_ratios(&plus)?, crate::realization::cross_ratios(&minus)?);
    let (ap, am) = (intersection_angles(&plus)?, intersection_angles(&minus)?);
    let rho_scale = mesh
        .edges()
        .iter()
        .enumerate()
        .fold(0.0, |m: f64, (id, e)| m.max(((zdot[e.v[1]] - zdot[e.v[0]]) / r.edge_vector(id)).norm()));
    let q_scale = mesh.interior_edges().iter().fold(0.0, |m: f64, &id| m.max(q[id].norm()));
    let scale = q_scale.max(1e-6 * rho_scale).max(f64::MIN_POSITIVE);

    let mut report = RateReport {
        q: q.clone(),
        log_cr_rate_fd: vec![Complex64::new(0.0, 0.0); mesh.edge_count()],
        log_cr_rate: analytic,
        phi_rate_fd: vec![0.0; mesh.edge_count()],
        step,
        scale,
        fd_defect: 0.0,
        analytic_defect: 0.0,
        phi_defect: 0.0,
        worst_edge: None,
    };
    let mut worst = -1.0;
    for &id in mesh.interior_edges() {
        let fd = (cp[id] / cm[id]).ln() / (2.0 * step);
        let phi = wrap_pi(ap[id] - am[id]) / (2.0 * step);
        report.log_cr_rate_fd[id] = fd;
        report.phi_rate_fd[id] = phi;
        let d_fd = (q[id] - fd).norm() / scale;
        let d_an = (q[id] - report.log_cr_rate[id]).norm() / scale;
        let d_phi = (q[id].im - phi).abs() / scale;
        report.fd_defect = report.fd_defect.max(d_fd);
        report.analytic_defect = report.analytic_defect.max(d_an);
        report.phi_defect = report.phi_defect.max(d_phi);
        if d_fd.max(d_an).max(d_phi) > worst {
            worst = d_fd.max(d_an).max(d_phi);
            report.worst_edge = Some(id);
        }
    }
    Ok(report)
}
