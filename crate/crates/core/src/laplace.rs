//! The cotangent Laplacian: weights, harmonicity, Dirichlet problems and
//! conjugate harmonic functions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forms::{check_len, dual_differential, integrate_dual, Gauge};
use crate::linalg::{self, SparseMatrix};
use crate::mesh::{EdgeId, TriMesh, VertexId};
use crate::realization::Realization;

/// Relative harmonicity tolerance for functions handed to downstream operations.
pub const HARMONIC_TOL: f64 = 1e-8;

/// `cot β^k + cot β^l` per edge id, from signed corner angles. Boundary edges
/// carry their single cotangent.
pub fn cotan_weights(r: &Realization) -> Vec<f64> {
    r.mesh()
        .edges()
        .iter()
        .map(|e| {
            let side = |face: Option<usize>, apex: Option<usize>| match (face, apex) {
                (Some(f), Some(a)) => r.cot_at(f, a),
                _ => 0.0,
            };
            side(e.left, e.left_apex) + side(e.right, e.right_apex)
        })
        .collect()
}

/// `(Lh)_i = Σ_j w_ij (h_j - h_i)` at interior vertices; boundary entries are zero.
pub fn laplacian(r: &Realization, h: &[f64]) -> Result<Vec<f64>> {
    check_len(r.mesh().vertex_count(), h.len())?;
    Ok(apply(r.mesh(), &cotan_weights(r), h))
}

fn apply(mesh: &TriMesh, w: &[f64], h: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.vertex_count()];
    for &i in mesh.interior_vertices() {
        out[i] = mesh
            .vertex_edges(i)
            .iter()
            .map(|&e| {
                let [a, b] = mesh.edge(e).v;
                let j = if a == i { b } else { a };
                w[e] * (h[j] - h[i])
            })
            .sum();
    }
    out
}

/// Largest `|h_j - h_i|` over all edges.
pub fn gradient_scale(mesh: &TriMesh, h: &[f64]) -> f64 {
    mesh.edges().iter().fold(0.0, |m, e| m.max((h[e.v[1]] - h[e.v[0]]).abs()))
}

/// Fails with `NotHarmonic` unless `‖Lh‖∞ <= rel_tol · ‖dh‖∞`.
pub fn check_harmonic(r: &Realization, h: &[f64], rel_tol: f64) -> Result<()> {
    let lh = laplacian(r, h)?;
    let bound = rel_tol * gradient_scale(r.mesh(), h);
    let (vertex, residual) =
        lh.iter().enumerate().fold((0, 0.0), |(bv, bm), (v, x)| if x.abs() > bm { (v, x.abs()) } else { (bv, bm) });
    if residual > bound {
        Err(Error::NotHarmonic { vertex, residual })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution {
    pub h: Vec<f64>,
    /// `‖Lh‖∞` over the free vertices.
    pub residual: f64,
    pub refinement_steps: usize,
    pub bandwidth: usize,
}

/// Solves `Lh = 0` at every vertex without a prescribed value.
///
/// All boundary vertices need a value; prescribed interior values are kept as
/// additional constraints.
pub fn solve_dirichlet(r: &Realization, boundary: &[Option<f64>]) -> Result<DirichletSolution> {
    let mesh = r.mesh();
    check_len(mesh.vertex_count(), boundary.len())?;
    if let Some(v) = mesh.boundary_vertices().into_iter().find(|&v| boundary[v].is_none()) {
        return Err(Error::MissingBoundaryData { vertex: v });
    }
    let w = cotan_weights(r);
    let mut h: Vec<f64> = boundary.iter().map(|b| b.unwrap_or(0.0)).collect();
    let free: Vec<VertexId> = (0..mesh.vertex_count()).filter(|&v| boundary[v].is_none()).collect();
    let mut slot = vec![usize::MAX; mesh.vertex_count()];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }

    let mut a = SparseMatrix::new(free.len());
    let mut rhs = vec![0.0; free.len()];
    for (k, &i) in free.iter().enumerate() {
        for &e in mesh.vertex_edges(i) {
            let [p, q] = mesh.edge(e).v;
            let j = if p == i { q } else { p };
            a.add(k, k, -w[e]);
            match boundary[j] {
                Some(value) => rhs[k] -= w[e] * value,
                None => a.add(k, slot[j], w[e]),
            }
        }
    }
    let (mut steps, mut bandwidth) = (0, 0);
    if !free.is_empty() {
        let lu = linalg::BandLu::factor(&a)?;
        bandwidth = lu.bandwidth();
        let sol = linalg::refine(&a, &lu, &rhs, 4);
        steps = sol.refinement_steps;
        for (k, &v) in free.iter().enumerate() {
            h[v] = sol.x[k];
        }
    }
    let lh = apply(mesh, &w, &h);
    let residual = free.iter().fold(0.0, |m: f64, &v| m.max(lh[v].abs()));
    Ok(DirichletSolution { h, residual, refinement_steps: steps, bandwidth })
}

/// Conjugate harmonic function of `h`: a face function `ω̃` and an edge function `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugate {
    /// `ω̃` per face, zero on the anchor face.
    pub face: Vec<f64>,
    /// `ω` per edge id.
    pub edge: Vec<f64>,
    /// Largest failure of `ω̃` to close around a vertex.
    pub closure_defect: f64,
    pub worst_edge: Option<EdgeId>,
}

/// Builds `ω̃` from `ω̃_ijk - ω̃_jil = w_ij (h_j - h_i)` and
/// `ω_ij = ω̃_ijk - cot β_ij^k (h_j - h_i)`.
pub fn conjugate_harmonic(r: &Realization, h: &[f64], gauge: Gauge) -> Result<Conjugate> {
    let mesh = r.mesh();
    mesh.require_disk()?;
    check_len(mesh.vertex_count(), h.len())?;
    if gauge.face >= mesh.face_count() {
        return Err(Error::InvalidAnchor { index: gauge.face });
    }
    check_harmonic(r, h, HARMONIC_TOL)?;
    let w = cotan_weights(r);
    let dh: Vec<f64> = mesh.edges().iter().map(|e| h[e.v[1]] - h[e.v[0]]).collect();
    let jump: Vec<f64> =
        mesh.edges().iter().enumerate().map(|(id, e)| if e.is_interior() { w[id] * dh[id] } else { 0.0 }).collect();
    let potential = integrate_dual(mesh, &jump, gauge.face)?;
    let face = potential.values;
    let edge = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| match (e.left, e.right) {
            (Some(f), _) => face[f] - r.cot_at(f, e.left_apex.unwrap()) * dh[id],
            (None, Some(f)) => face[f] + r.cot_at(f, e.right_apex.unwrap()) * dh[id],
            (None, None) => unreachable!("every edge bounds a face"),
        })
        .collect();
    Ok(Conjugate { face, edge, closure_defect: potential.closure_defect, worst_edge: potential.worst_edge })
}

/// `Σ_j (ω̃_ijk - ω̃_jil)` around each interior vertex; reproduces `Lh` when
/// `ω̃` is a conjugate of `h`.
pub fn laplacian_from_conjugate(mesh: &TriMesh, face: &[f64]) -> Vec<f64> {
    let d = dual_differential(mesh, face);
    let mut out = vec![0.0; mesh.vertex_count()];
    for (v, s) in crate::forms::vertex_sums(mesh, &d) {
        out[v] = s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use num_complex::Complex64;

    #[test]
    fn wheel_weights_and_laplacian() {
        let (m, z) = shapes::wheel(6);
        let r = Realization::new(&m, z.clone()).unwrap();
        let w = cotan_weights(&r);
        let spoke = 2.0 / 3f64.sqrt();
        for j in 1..=6 {
            assert!((w[m.edge_id(0, j).unwrap()] - spoke).abs() < 1e-14);
        }
        let h: Vec<f64> = z.iter().map(|p| p.norm_sqr()).collect();
        assert!((laplacian(&r, &h).unwrap()[0] - 4.0 * 3f64.sqrt()).abs() < 1e-13);
        let mut spike = vec![0.0; 7];
        spike[1] = 1.0;
        assert!((laplacian(&r, &spike).unwrap()[0] - spoke).abs() < 1e-14);
    }

    #[test]
    fn square_diagonal_weight_vanishes() {
        let m = TriMesh::build(&[[0, 1, 2], [0, 2, 3]]).unwrap();
        let c = |a, b| Complex64::new(a, b);
        let r = Realization::new(&m, vec![c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).unwrap();
        // Both corners opposite the diagonal are right angles.
        assert!(cotan_weights(&r)[m.edge_id(0, 2).unwrap()].abs() < 1e-15);
        // Boundary edge {0,1} sees only the 45° corner at vertex 2.
        assert!((cotan_weights(&r)[m.edge_id(0, 1).unwrap()] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_wheel_spike_is_mean() {
        let (m, _) = shapes::wheel(6);
        let r = Realization::new(&m, shapes::wheel(6).1).unwrap();
        let mut b = vec![Some(0.0); 7];
        b[0] = None;
        b[1] = Some(1.0);
        let s = solve_dirichlet(&r, &b).unwrap();
        assert!((s.h[0] - 1.0 / 6.0).abs() < 1e-15);
        b[3] = None;
        assert_eq!(solve_dirichlet(&r, &b).unwrap_err(), Error::MissingBoundaryData { vertex: 3 });
    }

    #[test]
    fn linear_functions_are_harmonic_on_grid() {
        let (m, z) = shapes::grid(6, 5);
        let r = Realization::new(&m, z.clone()).unwrap();
        let h: Vec<f64> = z.iter().map(|p| 0.3 * p.re - 1.7 * p.im + 2.0).collect();
        let lh = laplacian(&r, &h).unwrap();
        assert!(lh.iter().all(|x| x.abs() < 1e-13));
        let b: Vec<Option<f64>> =
            (0..m.vertex_count()).map(|v| if m.is_boundary_vertex(v) { Some(h[v]) } else { None }).collect();
        let s = solve_dirichlet(&r, &b).unwrap();
        for (a, b) in s.h.iter().zip(&h) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn conjugate_of_constant_vanishes() {
        let (m, z) = shapes::wheel(6);
        let r = Realization::new(&m, z).unwrap();
        let c = conjugate_harmonic(&r, &[2.5; 7], Gauge::default()).unwrap();
        assert!(c.face.iter().chain(&c.edge).all(|&x| x == 0.0));
    }

    #[test]
    fn conjugate_reproduces_laplacian_and_rejects_non_harmonic() {
        let (m, z) = shapes::grid(5, 5);
        let r = Realization::new(&m, z.clone()).unwrap();
        let h: Vec<f64> = z.iter().map(|p| p.re * p.re - p.im * p.im + p.re).collect();
        let lh = laplacian(&r, &h).unwrap();
        // x² - y² is harmonic for this regular grid's cotan weights.
        assert!(lh.iter().all(|x| x.abs() < 1e-12));
        let c = conjugate_harmonic(&r, &h, Gauge::default()).unwrap();
        assert_eq!(c.face[0], 0.0);
        let back = laplacian_from_conjugate(&m, &c.face);
        assert!(back.iter().all(|x| x.abs() < 1e-12));
        let bad: Vec<f64> = z.iter().map(|p| p.norm_sqr()).collect();
        assert!(matches!(conjugate_harmonic(&r, &bad, Gauge::default()), Err(Error::NotHarmonic { .. })));
    }
}
