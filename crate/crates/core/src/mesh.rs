//! Combinatorics of oriented triangle meshes.
//!
//! A [`TriMesh`] is immutable after [`TriMesh::build`]. Edges are keyed by the
//! sorted vertex pair; "left" and "right" faces of an [`Edge`] always refer to
//! the edge oriented from its lower to its higher vertex id. The left face of
//! an oriented edge `i -> j` is the face `{ijk}` whose boundary traverses
//! `i -> j`; the right face is `{jil}`.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type FaceId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints, lower id first.
    pub v: [VertexId; 2],
    pub left: Option<FaceId>,
    pub right: Option<FaceId>,
    /// Vertex of the left face opposite the edge.
    pub left_apex: Option<VertexId>,
    /// Vertex of the right face opposite the edge.
    pub right_apex: Option<VertexId>,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }
}

/// An edge together with a direction `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub edge: EdgeId,
    pub left_face: Option<FaceId>,
    pub right_face: Option<FaceId>,
    pub left_apex: Option<VertexId>,
    pub right_apex: Option<VertexId>,
}

impl OrientedEdge {
    /// True when `tail < head`, i.e. the orientation the edge tables use.
    pub fn is_canonical(&self) -> bool {
        self.tail < self.head
    }

    /// `+1.0` for the canonical orientation, `-1.0` otherwise.
    pub fn sign(&self) -> f64 {
        if self.is_canonical() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn reversed(self) -> Self {
        OrientedEdge {
            tail: self.head,
            head: self.tail,
            edge: self.edge,
            left_face: self.right_face,
            right_face: self.left_face,
            left_apex: self.right_apex,
            right_apex: self.left_apex,
        }
    }
}

/// A step of a dual spanning tree: crossing interior edge `edge` from face
/// `from` into the newly reached face `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualStep {
    pub edge: EdgeId,
    pub from: FaceId,
    pub to: FaceId,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertex_count: usize,
    faces: Vec<[VertexId; 3]>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<(VertexId, VertexId), EdgeId>,
    face_edges: Vec<[EdgeId; 3]>,
    vertex_edges: Vec<Vec<EdgeId>>,
    boundary_vertex: Vec<bool>,
    neighbors: Vec<Vec<VertexId>>,
    star_faces: Vec<Vec<FaceId>>,
    interior_vertices: Vec<VertexId>,
    interior_edges: Vec<EdgeId>,
}

impl TriMesh {
    /// Builds a mesh whose vertex count is one more than the largest index used.
    pub fn build(faces: &[[VertexId; 3]]) -> Result<Self> {
        let n = faces.iter().flatten().copied().max().map_or(0, |m| m + 1);
        Self::with_vertex_count(n, faces)
    }

    pub fn with_vertex_count(vertex_count: usize, faces: &[[VertexId; 3]]) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        for (f, t) in faces.iter().enumerate() {
            if t.iter().any(|&v| v >= vertex_count) {
                return Err(Error::InvalidFace { face: f, reason: "vertex index out of range" });
            }
            if t[0] == t[1] || t[1] == t[2] || t[2] == t[0] {
                return Err(Error::InvalidFace { face: f, reason: "repeated vertex" });
            }
        }

        // (lo, hi) -> [(face, traverses lo->hi, apex)]
        type Incidence = (FaceId, bool, VertexId);
        let mut incidences: BTreeMap<(VertexId, VertexId), Vec<Incidence>> = BTreeMap::new();
        for (f, t) in faces.iter().enumerate() {
            for c in 0..3 {
                let (a, b, apex) = (t[c], t[(c + 1) % 3], t[(c + 2) % 3]);
                let key = (a.min(b), a.max(b));
                incidences.entry(key).or_default().push((f, a < b, apex));
            }
        }

        let mut edges = Vec::with_capacity(incidences.len());
        let mut edge_index = BTreeMap::new();
        for (&(lo, hi), inc) in &incidences {
            if inc.len() > 2 {
                return Err(Error::NonManifold { edge: [lo, hi] });
            }
            if inc.len() == 2 && inc[0].1 == inc[1].1 {
                return Err(Error::InconsistentOrientation { edge: [lo, hi] });
            }
            let mut e = Edge { v: [lo, hi], left: None, right: None, left_apex: None, right_apex: None };
            for &(f, forward, apex) in inc {
                if forward {
                    e.left = Some(f);
                    e.left_apex = Some(apex);
                } else {
                    e.right = Some(f);
                    e.right_apex = Some(apex);
                }
            }
            edge_index.insert((lo, hi), edges.len());
            edges.push(e);
        }

        let face_edges: Vec<[EdgeId; 3]> = faces
            .iter()
            .map(|t| {
                let id = |a: VertexId, b: VertexId| edge_index[&(a.min(b), a.max(b))];
                [id(t[0], t[1]), id(t[1], t[2]), id(t[2], t[0])]
            })
            .collect();

        let mut vertex_edges = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            vertex_edges[e.v[0]].push(id);
            vertex_edges[e.v[1]].push(id);
        }

        // Wedges of each vertex star: (from neighbor, to neighbor, face), counterclockwise.
        let mut wedges: Vec<Vec<(VertexId, VertexId, FaceId)>> = vec![Vec::new(); vertex_count];
        for (f, t) in faces.iter().enumerate() {
            for c in 0..3 {
                wedges[t[c]].push((t[(c + 1) % 3], t[(c + 2) % 3], f));
            }
        }

        let mut boundary_vertex = vec![false; vertex_count];
        let mut neighbors = vec![Vec::new(); vertex_count];
        let mut star_faces = vec![Vec::new(); vertex_count];
        for v in 0..vertex_count {
            let ws = &wedges[v];
            if ws.is_empty() {
                return Err(Error::Disconnected);
            }
            let next: BTreeMap<VertexId, (VertexId, FaceId)> = ws.iter().map(|&(a, b, f)| (a, (b, f))).collect();
            let ends: BTreeMap<VertexId, ()> = ws.iter().map(|&(_, b, _)| (b, ())).collect();
            let starts: Vec<VertexId> = ws.iter().map(|w| w.0).filter(|a| !ends.contains_key(a)).collect();
            let start = match starts.len() {
                0 => ws[0].0,
                1 => {
                    boundary_vertex[v] = true;
                    starts[0]
                }
                _ => return Err(Error::NonManifoldVertex { vertex: v }),
            };
            let mut ring = vec![start];
            let mut fan = Vec::with_capacity(ws.len());
            let mut cur = start;
            while let Some(&(to, f)) = next.get(&cur) {
                fan.push(f);
                if to == start || fan.len() > ws.len() {
                    break;
                }
                ring.push(to);
                cur = to;
            }
            if fan.len() != ws.len() {
                return Err(Error::NonManifoldVertex { vertex: v });
            }
            neighbors[v] = ring;
            star_faces[v] = fan;
        }

        // Faces connected across shared edges.
        let mut seen = vec![false; faces.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(f) = queue.pop_front() {
            for &e in &face_edges[f] {
                for g in [edges[e].left, edges[e].right].into_iter().flatten() {
                    if !seen[g] {
                        seen[g] = true;
                        reached += 1;
                        queue.push_back(g);
                    }
                }
            }
        }
        if reached != faces.len() {
            return Err(Error::Disconnected);
        }

        let interior_vertices = (0..vertex_count).filter(|&v| !boundary_vertex[v]).collect();
        let interior_edges = (0..edges.len()).filter(|&e| edges[e].is_interior()).collect();

        Ok(TriMesh {
            vertex_count,
            faces: faces.to_vec(),
            edges,
            edge_index,
            face_edges,
            vertex_edges,
            boundary_vertex,
            neighbors,
            star_faces,
            interior_vertices,
            interior_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_id(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Edge ids of `v0v1`, `v1v2`, `v2v0` for face `[v0, v1, v2]`.
    pub fn face_edges(&self, face: FaceId) -> [EdgeId; 3] {
        self.face_edges[face]
    }

    /// Edges incident to a vertex, in increasing id order.
    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v]
    }

    pub fn oriented(&self, tail: VertexId, head: VertexId) -> Option<OrientedEdge> {
        let id = self.edge_id(tail, head)?;
        let canonical = self.oriented_canonical(id);
        Some(if tail < head { canonical } else { canonical.reversed() })
    }

    pub fn oriented_canonical(&self, id: EdgeId) -> OrientedEdge {
        let e = &self.edges[id];
        OrientedEdge {
            tail: e.v[0],
            head: e.v[1],
            edge: id,
            left_face: e.left,
            right_face: e.right,
            left_apex: e.left_apex,
            right_apex: e.right_apex,
        }
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertex[v]
    }

    pub fn interior_vertices(&self) -> &[VertexId] {
        &self.interior_vertices
    }

    pub fn interior_edges(&self) -> &[EdgeId] {
        &self.interior_edges
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count).filter(|&v| self.boundary_vertex[v]).collect()
    }

    /// Neighbors of `v` in counterclockwise order. For a boundary vertex the
    /// first and last entries are its boundary neighbors.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v]
    }

    /// Faces around `v` counterclockwise; face `m` spans the wedge from
    /// `neighbors(v)[m]` to the following neighbor.
    pub fn star_faces(&self, v: VertexId) -> &[FaceId] {
        &self.star_faces[v]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn is_disk(&self) -> bool {
        self.euler_characteristic() == 1
    }

    pub fn require_disk(&self) -> Result<()> {
        if self.is_disk() {
            Ok(())
        } else {
            Err(Error::NotSimplyConnected { euler: self.euler_characteristic() })
        }
    }

    /// The oriented edges `e_ij` around interior vertex `i`, counterclockwise.
    /// Consecutive dual edges `e*_ij` (right face to left face) form a closed
    /// loop around `i`. Returns `None` for boundary vertices.
    pub fn dual_cycle(&self, i: VertexId) -> Option<Vec<OrientedEdge>> {
        if self.boundary_vertex[i] {
            return None;
        }
        Some(self.neighbors[i].iter().map(|&j| self.oriented(i, j).expect("star neighbor shares an edge")).collect())
    }

    pub fn dual_cycles(&self) -> BTreeMap<VertexId, Vec<OrientedEdge>> {
        self.interior_vertices.iter().map(|&v| (v, self.dual_cycle(v).unwrap_or_default())).collect()
    }

    /// Breadth-first spanning tree over all edges, as oriented edges
    /// `parent -> child` in visiting order.
    pub fn vertex_tree(&self, root: VertexId) -> Result<Vec<OrientedEdge>> {
        if root >= self.vertex_count {
            return Err(Error::InvalidAnchor { index: root });
        }
        let mut seen = vec![false; self.vertex_count];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut tree = Vec::with_capacity(self.vertex_count.saturating_sub(1));
        while let Some(v) = queue.pop_front() {
            for &e in &self.vertex_edges[v] {
                let [a, b] = self.edges[e].v;
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    tree.push(self.oriented(v, w).expect("incident edge"));
                    queue.push_back(w);
                }
            }
        }
        Ok(tree)
    }

    /// Breadth-first spanning tree of the dual graph (faces linked across
    /// interior edges).
    pub fn dual_tree(&self, root: FaceId) -> Result<Vec<DualStep>> {
        if root >= self.faces.len() {
            return Err(Error::InvalidAnchor { index: root });
        }
        let mut seen = vec![false; self.faces.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut tree = Vec::with_capacity(self.faces.len() - 1);
        while let Some(f) = queue.pop_front() {
            for &e in &self.face_edges[f] {
                let edge = &self.edges[e];
                let (Some(l), Some(r)) = (edge.left, edge.right) else { continue };
                let g = if l == f { r } else { l };
                if !seen[g] {
                    seen[g] = true;
                    tree.push(DualStep { edge: e, from: f, to: g });
                    queue.push_back(g);
                }
            }
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel6() -> TriMesh {
        TriMesh::build(&[[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 6], [0, 6, 1]]).unwrap()
    }

    #[test]
    fn single_triangle() {
        let m = TriMesh::build(&[[0, 1, 2]]).unwrap();
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.edge_count(), 3);
        assert!(m.interior_edges().is_empty());
        assert!(m.interior_vertices().is_empty());
        assert!(m.is_disk());
    }

    #[test]
    fn square2_left_and_right_faces() {
        let m = TriMesh::build(&[[0, 1, 2], [0, 2, 3]]).unwrap();
        assert_eq!(m.interior_edges().len(), 1);
        let e = m.oriented(0, 2).unwrap();
        assert_eq!(e.left_face, Some(1));
        assert_eq!(e.right_face, Some(0));
        assert_eq!(e.left_apex, Some(3));
        assert_eq!(e.right_apex, Some(1));
        let r = m.oriented(2, 0).unwrap();
        assert_eq!(r.left_face, Some(0));
        assert_eq!(r.right_face, Some(1));
        assert!(m.dual_cycles().is_empty());
    }

    #[test]
    fn wheel6_counts() {
        let m = wheel6();
        assert_eq!(m.interior_vertices(), &[0]);
        assert_eq!(m.interior_edges().len(), 6);
        assert_eq!(m.edge_count() - m.interior_edges().len(), 6);
        assert_eq!(m.euler_characteristic(), 1);
        let cycle = m.dual_cycle(0).unwrap();
        assert_eq!(cycle.len(), 6);
        assert_eq!(m.neighbors(0), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn dual_cycle_is_a_closed_face_loop() {
        let m = wheel6();
        let cycle = m.dual_cycle(0).unwrap();
        for w in 0..cycle.len() {
            let a = cycle[w];
            let b = cycle[(w + 1) % cycle.len()];
            assert_eq!(a.tail, 0);
            // e*_ij ends where the next dual edge starts.
            assert_eq!(a.left_face, b.right_face);
        }
    }

    #[test]
    fn grid_3x3_center_has_six_cycle() {
        // 3x3 vertices, every cell split along the same diagonal.
        let mut faces = Vec::new();
        for y in 0..2 {
            for x in 0..2 {
                let a = y * 3 + x;
                faces.push([a, a + 1, a + 4]);
                faces.push([a, a + 4, a + 3]);
            }
        }
        let m = TriMesh::build(&faces).unwrap();
        assert_eq!(m.face_count(), 8);
        let cycles = m.dual_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[&4].len(), 6);
        for (v, c) in &cycles {
            assert_eq!(c.len(), m.star_faces(*v).len());
        }
    }

    #[test]
    fn boundary_fan_order() {
        let m = TriMesh::build(&[[0, 1, 2], [0, 2, 3]]).unwrap();
        assert_eq!(m.neighbors(0), &[1, 2, 3]);
        assert_eq!(m.star_faces(0), &[0, 1]);
        assert!(m.is_boundary_vertex(0));
    }

    #[test]
    fn rejects_non_manifold_edge() {
        let err = TriMesh::build(&[[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap_err();
        assert!(matches!(err, Error::NonManifold { edge: [0, 1] }));
    }

    #[test]
    fn rejects_inconsistent_orientation() {
        let err = TriMesh::build(&[[0, 1, 2], [0, 1, 3]]).unwrap_err();
        assert!(matches!(err, Error::InconsistentOrientation { edge: [0, 1] }));
    }

    #[test]
    fn rejects_disconnected() {
        assert_eq!(TriMesh::build(&[[0, 1, 2], [3, 4, 5]]).unwrap_err(), Error::Disconnected);
        assert_eq!(TriMesh::with_vertex_count(4, &[[0, 1, 2]]).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn rejects_bowtie_vertex() {
        let err = TriMesh::build(&[[0, 1, 2], [0, 3, 4]]).unwrap_err();
        assert!(matches!(err, Error::NonManifoldVertex { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_faces() {
        assert!(matches!(TriMesh::build(&[[0, 0, 1]]), Err(Error::InvalidFace { .. })));
        assert!(matches!(TriMesh::with_vertex_count(2, &[[0, 1, 2]]), Err(Error::InvalidFace { .. })));
        assert_eq!(TriMesh::build(&[]).unwrap_err(), Error::EmptyMesh);
    }

    #[test]
    fn annulus_is_not_a_disk() {
        // Ring of 8 triangles around a square hole.
        let outer = [0, 1, 2, 3];
        let inner = [4, 5, 6, 7];
        let mut faces = Vec::new();
        for s in 0..4 {
            let (o0, o1) = (outer[s], outer[(s + 1) % 4]);
            let (i0, i1) = (inner[s], inner[(s + 1) % 4]);
            faces.push([o0, o1, i1]);
            faces.push([o0, i1, i0]);
        }
        let m = TriMesh::build(&faces).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(matches!(m.require_disk(), Err(Error::NotSimplyConnected { euler: 0 })));
    }

    #[test]
    fn spanning_trees_cover_everything() {
        let m = wheel6();
        assert_eq!(m.vertex_tree(3).unwrap().len(), 6);
        let dual = m.dual_tree(0).unwrap();
        assert_eq!(dual.len(), 5);
        assert!(dual.iter().all(|s| m.edge(s.edge).is_interior()));
        assert!(m.dual_tree(6).is_err());
    }
}
