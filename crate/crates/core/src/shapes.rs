//! Small reference meshes.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::mesh::TriMesh;

/// A fan of `n >= 3` triangles around vertex 0 at the origin, rim vertex `j`
/// at `e^{2πi(j-1)/n}`.
pub fn wheel(n: usize) -> (TriMesh, Vec<Complex64>) {
    assert!(n >= 3, "a wheel needs at least three spokes");
    let faces: Vec<[usize; 3]> = (1..=n).map(|j| [0, j, j % n + 1]).collect();
    let mut z = Vec::with_capacity(n + 1);
    z.push(Complex64::new(0.0, 0.0));
    z.extend((0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)));
    (TriMesh::build(&faces).expect("wheel is a valid disk"), z)
}

/// A regular `nx × ny` vertex grid on `[0, 1]²`, each cell split along the
/// same diagonal.
pub fn grid(nx: usize, ny: usize) -> (TriMesh, Vec<Complex64>) {
    assert!(nx >= 2 && ny >= 2, "a grid needs at least 2×2 vertices");
    let id = |i: usize, j: usize| j * nx + i;
    let mut faces = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    let z = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| Complex64::new(i as f64 / (nx - 1) as f64, j as f64 / (ny - 1) as f64)))
        .collect();
    (TriMesh::build(&faces).expect("grid is a valid disk"), z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wheel_counts() {
        let (m, z) = wheel(6);
        assert_eq!((m.vertex_count(), m.face_count(), m.edge_count()), (7, 6, 12));
        assert_eq!(m.interior_vertices(), &[0]);
        assert_eq!(m.interior_edges().len(), 6);
        assert!((z[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn three_by_three_grid_has_one_degree_six_vertex() {
        let (m, _) = grid(3, 3);
        assert_eq!(m.face_count(), 8);
        assert_eq!(m.interior_vertices(), &[4]);
        assert_eq!(m.dual_cycles()[&4].len(), 6);
        assert!(m.is_disk());
    }
}
