//! Integration of closed discrete 1-forms on a simply connected mesh.
//!
//! Primal forms live on oriented edges, dual forms on oriented dual edges
//! `e*` (right face to left face of `e`). Both are stored per edge id with
//! the value of the canonical orientation (lower vertex id to higher); for
//! dual forms the entries of boundary edges are ignored.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{EdgeId, FaceId, TriMesh, VertexId};
use crate::vector::C3;

/// Values a 1-form can take.
pub trait FormValue: Copy + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl FormValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FormValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl FormValue for C3 {
    fn zero() -> Self {
        C3::ZERO
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Anchors fixing the additive freedom of integrated potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Gauge {
    /// Vertex where vertex potentials vanish.
    pub vertex: VertexId,
    /// Face where face potentials vanish.
    pub face: FaceId,
}

/// A potential obtained by integrating a 1-form along a spanning tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    pub values: Vec<T>,
    /// Largest `|d(potential) - form|` over all edges, attained at `worst_edge`.
    pub closure_defect: f64,
    pub worst_edge: Option<EdgeId>,
}

/// Integrates a dual 1-form to a function on faces, zero on `root`.
pub fn integrate_dual<T: FormValue>(mesh: &TriMesh, form: &[T], root: FaceId) -> Result<Potential<T>> {
    check_len(mesh.edge_count(), form.len())?;
    let mut values = vec![T::zero(); mesh.face_count()];
    for step in mesh.dual_tree(root)? {
        let e = mesh.edge(step.edge);
        values[step.to] = if e.right == Some(step.from) {
            values[step.from] + form[step.edge]
        } else {
            values[step.from] - form[step.edge]
        };
    }
    let mut out = Potential { values, closure_defect: 0.0, worst_edge: None };
    for &id in mesh.interior_edges() {
        let e = mesh.edge(id);
        let (l, r) = (e.left.unwrap(), e.right.unwrap());
        let d = (out.values[l] - out.values[r] - form[id]).magnitude();
        out.record(id, d);
    }
    Ok(out)
}

/// Integrates a primal 1-form to a function on vertices, zero on `root`.
pub fn integrate_primal<T: FormValue>(mesh: &TriMesh, form: &[T], root: VertexId) -> Result<Potential<T>> {
    check_len(mesh.edge_count(), form.len())?;
    let mut values = vec![T::zero(); mesh.vertex_count()];
    for oe in mesh.vertex_tree(root)? {
        values[oe.head] =
            if oe.is_canonical() { values[oe.tail] + form[oe.edge] } else { values[oe.tail] - form[oe.edge] };
    }
    let mut out = Potential { values, closure_defect: 0.0, worst_edge: None };
    for (id, e) in mesh.edges().iter().enumerate() {
        let d = (out.values[e.v[1]] - out.values[e.v[0]] - form[id]).magnitude();
        out.record(id, d);
    }
    Ok(out)
}

/// `d` of a face function: `g(left) - g(right)` on interior edges, zero on boundary edges.
pub fn dual_differential<T: FormValue>(mesh: &TriMesh, g: &[T]) -> Vec<T> {
    mesh.edges()
        .iter()
        .map(|e| match (e.left, e.right) {
            (Some(l), Some(r)) => g[l] - g[r],
            _ => T::zero(),
        })
        .collect()
}

/// `d` of a vertex function on canonically oriented edges.
pub fn primal_differential<T: FormValue>(mesh: &TriMesh, u: &[T]) -> Vec<T> {
    mesh.edges().iter().map(|e| u[e.v[1]] - u[e.v[0]]).collect()
}

/// Sum of a dual form around each interior vertex, `Σ_j form(e*_ij)`.
pub fn vertex_sums<T: FormValue>(mesh: &TriMesh, form: &[T]) -> Vec<(VertexId, T)> {
    mesh.interior_vertices()
        .iter()
        .map(|&v| {
            let mut s = T::zero();
            for oe in mesh.dual_cycle(v).unwrap() {
                s = if oe.is_canonical() { s + form[oe.edge] } else { s - form[oe.edge] };
            }
            (v, s)
        })
        .collect()
}

impl<T> Potential<T> {
    fn record(&mut self, edge: EdgeId, defect: f64) {
        if defect > self.closure_defect || (self.worst_edge.is_none() && defect.is_nan()) {
            self.closure_defect = defect;
            self.worst_edge = Some(edge);
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel6() -> TriMesh {
        TriMesh::build(&[[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 6], [0, 6, 1]]).unwrap()
    }

    #[test]
    fn exact_dual_form_integrates_back() {
        let m = wheel6();
        let g: Vec<f64> = (0..6).map(|f| (f * f) as f64 - 3.0).collect();
        let form = dual_differential(&m, &g);
        let p = integrate_dual(&m, &form, 2).unwrap();
        for f in 0..6 {
            assert!((p.values[f] - (g[f] - g[2])).abs() < 1e-14);
        }
        assert!(p.closure_defect < 1e-14);
        assert!(vertex_sums(&m, &form).iter().all(|(_, s)| s.abs() < 1e-14));
    }

    #[test]
    fn non_closed_dual_form_reports_defect() {
        let m = wheel6();
        let mut form = vec![0.0; m.edge_count()];
        form[m.interior_edges()[0]] = 1.0;
        let p = integrate_dual(&m, &form, 0).unwrap();
        assert!((p.closure_defect - 1.0).abs() < 1e-15);
        assert_eq!(vertex_sums(&m, &form)[0].1.abs(), 1.0);
    }

    #[test]
    fn primal_round_trip() {
        let m = wheel6();
        let u: Vec<Complex64> = (0..7).map(|v| Complex64::new(v as f64, -(v as f64) * 0.5)).collect();
        let p = integrate_primal(&m, &primal_differential(&m, &u), 4).unwrap();
        for v in 0..7 {
            assert!((p.values[v] - (u[v] - u[4])).norm() < 1e-14);
        }
    }

    #[test]
    fn length_is_checked() {
        let m = wheel6();
        assert!(matches!(integrate_primal(&m, &[0.0; 3], 0), Err(Error::LengthMismatch { .. })));
    }
}
