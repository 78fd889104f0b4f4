//! Infinitesimal deformations `ż` of a realization: per-edge rates, triangle
//! compatibility and the constructions from harmonic functions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{check_len, integrate_primal, Gauge};
use crate::laplace::conjugate_harmonic;
use crate::mesh::{EdgeId, FaceId};
use crate::realization::{circumradius, Realization};

/// `ż_j - ż_i = (σ_ij + iω_ij)(z_j - z_i)` per edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRates {
    pub sigma: Vec<f64>,
    pub omega: Vec<f64>,
}

impl EdgeRates {
    pub fn rate(&self, e: EdgeId) -> Complex64 {
        Complex64::new(self.sigma[e], self.omega[e])
    }
}

pub fn edge_rates(r: &Realization, zdot: &[Complex64]) -> Result<EdgeRates> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), zdot.len())?;
    let (mut sigma, mut omega) = (Vec::with_capacity(mesh.edge_count()), Vec::with_capacity(mesh.edge_count()));
    for (id, e) in mesh.edges().iter().enumerate() {
        let rho = (zdot[e.v[1]] - zdot[e.v[0]]) / r.edge_vector(id);
        sigma.push(rho.re);
        omega.push(rho.im);
    }
    Ok(EdgeRates { sigma, omega })
}

/// Per-face average rates.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRates {
    pub omega: Vec<f64>,
    /// Equals `Ṙ/R` for the circumradius `R`.
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    /// `Σ (σ + iω) dz` around each face, divided by the face's rate scale.
    pub closure: Vec<Complex64>,
    pub max_closure: f64,
    pub worst_face: Option<FaceId>,
    /// Largest disagreement among the three expressions for `ω_face` and `σ_face`.
    pub omega_spread: f64,
    pub sigma_spread: f64,
    pub face_rates: FaceRates,
    /// Largest relative difference between `σ_face` and a finite-difference `Ṙ/R`.
    pub circumradius_defect: f64,
    pub tol: f64,
}

/// Relative tolerance of the finite-difference circumradius check.
pub const CIRCUMRADIUS_TOL: f64 = 1e-5;

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.max_closure <= self.tol
    }

    pub fn ensure(&self) -> Result<()> {
        match self.worst_face {
            Some(face) if !self.passed() => Err(Error::IncompatibleRates { face, defect: self.closure[face] }),
            _ => Ok(()),
        }
    }
}

/// Checks that the rates close up around every face and evaluates the
/// average face rates from each of the three corners.
pub fn check_triangle_compat(r: &Realization, rates: &EdgeRates, tol: f64) -> Result<CompatReport> {
    let mesh = r.mesh();
    check_len(mesh.edge_count(), rates.sigma.len())?;
    check_len(mesh.edge_count(), rates.omega.len())?;
    let nf = mesh.face_count();
    let mut report = CompatReport {
        closure: vec![Complex64::new(0.0, 0.0); nf],
        max_closure: 0.0,
        worst_face: None,
        omega_spread: 0.0,
        sigma_spread: 0.0,
        face_rates: FaceRates { omega: vec![0.0; nf], sigma: vec![0.0; nf] },
        circumradius_defect: 0.0,
        tol,
    };
    for f in 0..nf {
        let t = mesh.faces()[f];
        let fe = mesh.face_edges(f);
        let p = r.face_points(f);
        // Rates of the edge opposite corner c, and of the two edges at c.
        let rate = |c: usize| rates.rate(fe[(c + 1) % 3]);
        let scale = fe.iter().map(|&e| rates.rate(e).norm() * r.edge_vector(e).norm()).fold(0.0, f64::max);
        let defect: Complex64 = (0..3).map(|c| rates.rate(fe[c]) * (p[(c + 1) % 3] - p[c])).sum();
        let rel = if scale > 0.0 { defect / scale } else { defect };
        report.closure[f] = rel;
        if rel.norm() > report.max_closure || report.worst_face.is_none() {
            report.max_closure = rel.norm();
            report.worst_face = Some(f);
        }

        let (mut om, mut sg) = ([0.0; 3], [0.0; 3]);
        for c in 0..3 {
            let cot = r.cot_at(f, t[c]);
            let (opp, next, prev) = (rate(c), rates.rate(fe[c]), rates.rate(fe[(c + 2) % 3]));
            // ω = ω_23 + cot β_1 (σ_31 - σ_12),  σ = σ_23 - cot β_1 (ω_31 - ω_12).
            om[c] = opp.im + cot * (prev.re - next.re);
            sg[c] = opp.re - cot * (prev.im - next.im);
        }
        let rate_scale = fe.iter().map(|&e| rates.rate(e).norm()).fold(0.0, f64::max);
        let spread = |v: [f64; 3]| {
            let (lo, hi) = (v[0].min(v[1]).min(v[2]), v[0].max(v[1]).max(v[2]));
            if rate_scale > 0.0 {
                (hi - lo) / rate_scale
            } else {
                hi - lo
            }
        };
        report.omega_spread = report.omega_spread.max(spread(om));
        report.sigma_spread = report.sigma_spread.max(spread(sg));
        report.face_rates.omega[f] = om[0];
        report.face_rates.sigma[f] = sg[0];

        if rate_scale > 0.0 {
            // Reconstruct ż on the face up to translation and difference R.
            let zd = [Complex64::new(0.0, 0.0), rates.rate(fe[0]) * (p[1] - p[0]), -rates.rate(fe[2]) * (p[0] - p[2])];
            let diam = (0..3).map(|c| (p[(c + 1) % 3] - p[c]).norm()).fold(0.0, f64::max);
            let speed = zd.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let h = 1e-6 * diam / speed.max(f64::MIN_POSITIVE);
            let at = |s: f64| circumradius([p[0] + zd[0] * s, p[1] + zd[1] * s, p[2] + zd[2] * s]);
            let rdot_over_r = (at(h) - at(-h)) / (2.0 * h) / circumradius(p);
            let d = (rdot_over_r - sg[0]).abs() / sg[0].abs().max(rate_scale);
            report.circumradius_defect = report.circumradius_defect.max(d);
        }
    }
    Ok(report)
}

/// A deformation together with its integration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Deformation {
    pub zdot: Vec<Complex64>,
    /// Largest closure failure over edges outside the spanning tree.
    pub closure_defect: f64,
    pub worst_edge: Option<EdgeId>,
}

/// Relative closure tolerance for deformation integration.
pub const INTEGRATION_TOL: f64 = 1e-10;

/// The conformal deformation with scale factors `u`: `ż_j - ż_i = ((u_i + u_j)/2 + iω_ij)(z_j - z_i)`.
pub fn conformal_deformation(r: &Realization, u: &[f64], gauge: Gauge) -> Result<Deformation> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), u.len())?;
    if gauge.vertex >= mesh.vertex_count() {
        return Err(Error::InvalidAnchor { index: gauge.vertex });
    }
    let half: Vec<f64> = u.iter().map(|x| x / 2.0).collect();
    let conj = conjugate_harmonic(r, &half, gauge)?;
    let form: Vec<Complex64> = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| Complex64::new((u[e.v[0]] + u[e.v[1]]) / 2.0, conj.edge[id]) * r.edge_vector(id))
        .collect();
    let scale = form.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let p = integrate_primal(mesh, &form, gauge.vertex)?;
    if p.closure_defect > INTEGRATION_TOL * scale {
        return Err(Error::IntegrationDefect { edge: p.worst_edge.unwrap_or(0), defect: p.closure_defect });
    }
    Ok(Deformation { zdot: p.values, closure_defect: p.closure_defect, worst_edge: p.worst_edge })
}

/// The pattern deformation with angular velocities `α`, `i` times the conformal one.
pub fn pattern_deformation(r: &Realization, alpha: &[f64], gauge: Gauge) -> Result<Deformation> {
    let mut d = conformal_deformation(r, alpha, gauge)?;
    for z in &mut d.zdot {
        *z *= Complex64::i();
    }
    Ok(d)
}
