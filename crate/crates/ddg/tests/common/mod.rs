//! Fixtures shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use ddg_core::hqd::{qdiff_from_harmonic, QuadDiff};
use ddg_core::laplace::solve_dirichlet;
use ddg_core::moebius::Mobius;
use ddg_core::{shapes, Complex64, Realization, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn in_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let p = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p.norm_sqr() < 1.0 {
            return p;
        }
    }
}

pub fn wheel6() -> (TriMesh, Vec<Complex64>) {
    shapes::wheel(6)
}

/// `q_0j = i Re(ω^{2(j-1)})` on the spokes of the regular hexagonal wheel.
pub fn root_of_unity_q(m: &TriMesh) -> QuadDiff {
    let mut im = vec![0.0; m.edge_count()];
    for j in 1..=6 {
        im[m.edge_id(0, j).unwrap()] = (2.0 * PI * 2.0 * (j - 1) as f64 / 6.0).cos();
    }
    QuadDiff::new(m, im).unwrap()
}

/// Twice the signed area of `abc`.
fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    ((b - a).conj() * (c - a)).im
}

/// Positive when `d` lies inside the circumcircle of the counterclockwise triangle `abc`.
fn incircle(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let (a, b, c) = (a - d, b - d, c - d);
    let det = |p: Complex64, q: Complex64| p.re * q.im - p.im * q.re;
    a.norm_sqr() * det(b, c) - b.norm_sqr() * det(a, c) + c.norm_sqr() * det(a, b)
}

/// Delaunay triangulation of jittered triangular-lattice points in the unit
/// disk with roughly `n` vertices: lattice triangles inside the disk are
/// flipped (Lawson) until every interior edge is locally Delaunay.
pub fn random_disk(n: usize, seed: u64) -> (TriMesh, Vec<Complex64>) {
    let mut rng = rng(seed);
    let h = (2.0 * PI / (3f64.sqrt() * n as f64)).sqrt();
    let k = (1.0 / h).ceil() as i64 + 1;
    let mut index = HashMap::new();
    let mut pts = Vec::new();
    for row in -k..=k {
        for col in -2 * k..=2 * k {
            let p = c(h * (col as f64 + 0.5 * row as f64), h * 3f64.sqrt() / 2.0 * row as f64);
            if p.norm() <= 1.0 - 0.25 * h {
                let j = 0.3 * h * in_disk(&mut rng);
                index.insert((row, col), pts.len());
                pts.push(p + j);
            }
        }
    }
    let mut faces = Vec::new();
    for (&(row, col), &a) in &index {
        if let (Some(&b), Some(&d)) = (index.get(&(row, col + 1)), index.get(&(row + 1, col))) {
            faces.push([a, b, d]);
        }
        if let (Some(&b), Some(&d)) = (index.get(&(row + 1, col)), index.get(&(row + 1, col - 1))) {
            faces.push([a, b, d]);
        }
    }
    faces.sort_unstable();
    lawson(&pts, &mut faces);

    // Drop lattice points not covered by any triangle and renumber.
    let mut used = vec![usize::MAX; pts.len()];
    let mut z = Vec::new();
    for f in &mut faces {
        for v in f.iter_mut() {
            if used[*v] == usize::MAX {
                used[*v] = z.len();
                z.push(pts[*v]);
            }
            *v = used[*v];
        }
    }
    let mesh = TriMesh::build(&faces).expect("lattice disk is a valid mesh");
    assert!(mesh.is_disk(), "lattice region is not a disk");
    assert!(faces.iter().all(|f| orient(z[f[0]], z[f[1]], z[f[2]]) > 0.0));
    (mesh, z)
}

fn lawson(p: &[Complex64], faces: &mut [[usize; 3]]) {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut adj: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (f, t) in faces.iter().enumerate() {
        for i in 0..3 {
            adj.entry(key(t[i], t[(i + 1) % 3])).or_default().push(f);
        }
    }
    let mut stack: Vec<(usize, usize)> = adj.iter().filter(|(_, fs)| fs.len() == 2).map(|(&e, _)| e).collect();
    stack.sort_unstable();
    while let Some(e) = stack.pop() {
        let Some(fs) = adj.get(&e).filter(|fs| fs.len() == 2).cloned() else { continue };
        // Orient so that f1 = (a, b, c) and f2 = (b, a, d).
        let (f1, f2) = (fs[0], fs[1]);
        let t1 = faces[f1];
        let i = (0..3).find(|&i| key(t1[i], t1[(i + 1) % 3]) == e).unwrap();
        let (a, b, cc) = (t1[i], t1[(i + 1) % 3], t1[(i + 2) % 3]);
        let d = faces[f2].iter().copied().find(|&v| v != a && v != b).unwrap();
        let scale = (p[a] - p[b]).norm_sqr().powi(2);
        if incircle(p[a], p[b], p[cc], p[d]) <= 1e-12 * scale {
            continue;
        }
        faces[f1] = [a, d, cc];
        faces[f2] = [d, b, cc];
        adj.remove(&e);
        adj.insert(key(cc, d), vec![f1, f2]);
        for (edge, from, to) in [(key(a, d), f2, f1), (key(b, cc), f1, f2)] {
            for f in adj.get_mut(&edge).unwrap().iter_mut() {
                if *f == from {
                    *f = to;
                }
            }
        }
        stack.extend([key(a, d), key(d, b), key(b, cc), key(cc, a)]);
    }
}

/// Harmonic function with uniform random boundary values in `[-1, 1]`.
pub fn random_harmonic(r: &Realization, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = r.mesh();
    let b: Vec<Option<f64>> =
        (0..m.vertex_count()).map(|v| m.is_boundary_vertex(v).then(|| rng.random_range(-1.0..1.0))).collect();
    solve_dirichlet(r, &b).unwrap().h
}

/// Holomorphic quadratic differential from a random harmonic function.
pub fn random_qdiff(r: &Realization, rng: &mut ChaCha8Rng) -> QuadDiff {
    let u = random_harmonic(r, rng);
    qdiff_from_harmonic(r, &u).unwrap()
}

/// Möbius map with coefficients in the unit disk whose pole keeps a
/// relative distance of at least `1e-3` from every vertex.
pub fn random_moebius(r: &Realization, rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let Some(phi) = Mobius::new(in_disk(rng), in_disk(rng), in_disk(rng), in_disk(rng)) else { continue };
        let m = phi.matrix();
        if r.z().iter().all(|&z| (m.0[1][0] * z + m.0[1][1]).norm() > 1e-3 * m.max_abs()) {
            return phi;
        }
    }
}

pub fn max_abs(x: impl IntoIterator<Item = f64>) -> f64 {
    x.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
