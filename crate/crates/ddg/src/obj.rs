//! The subset of Wavefront OBJ used for meshes: `v x y z` records and
//! polygonal `f` records with 1-based (or negative, relative) indices.
//!
//! Texture and normal references inside face records (`f 1/2/3 ...`) are
//! accepted and dropped; all other record types are ignored.

use std::fmt::Write as _;

use ddg_core::mesh::VertexId;
use ddg_core::vector::Vec3;
use ddg_core::{Complex64, TriMesh};

use crate::fmt::sig17;

/// Largest `|z|` accepted for a vertex of a planar mesh.
pub const PLANAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex index {index} is out of range")]
    IndexOutOfRange { line: usize, index: i64 },
    #[error("vertex {vertex} has z = {z:e}; planar meshes need z = 0")]
    NotPlanar { vertex: VertexId, z: f64 },
    #[error("face {face} has {corners} corners; only triangles are supported here")]
    NotTriangle { face: usize, corners: usize },
    #[error(transparent)]
    Mesh(#[from] ddg_core::Error),
}

/// Raw OBJ content with 0-based face indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Obj {
    pub positions: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

impl Obj {
    pub fn parse(text: &str) -> Result<Obj, ObjError> {
        let mut obj = Obj::default();
        // Positive indices may refer forward, so they are range-checked at the end.
        let mut pending: Vec<(usize, i64)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("");
            let mut tok = body.split_whitespace();
            match tok.next() {
                Some("v") => {
                    let mut p = [0.0_f64; 3];
                    for slot in &mut p {
                        let t = tok.next().ok_or_else(|| syntax(line, "vertex needs three coordinates"))?;
                        *slot = t.parse().map_err(|_| syntax(line, &format!("bad coordinate `{t}`")))?;
                        if !slot.is_finite() {
                            return Err(syntax(line, "non-finite coordinate"));
                        }
                    }
                    obj.positions.push(p);
                }
                Some("f") => {
                    let mut face = Vec::new();
                    for t in tok {
                        let head = t.split('/').next().unwrap_or("");
                        let k: i64 = head.parse().map_err(|_| syntax(line, &format!("bad face index `{t}`")))?;
                        let idx = match k {
                            0 => return Err(ObjError::IndexOutOfRange { line, index: 0 }),
                            k if k > 0 => {
                                pending.push((line, k));
                                (k - 1) as usize
                            }
                            k => {
                                let back = k.unsigned_abs() as usize;
                                if back > obj.positions.len() {
                                    return Err(ObjError::IndexOutOfRange { line, index: k });
                                }
                                obj.positions.len() - back
                            }
                        };
                        face.push(idx);
                    }
                    if face.len() < 3 {
                        return Err(syntax(line, "face needs at least three vertices"));
                    }
                    obj.faces.push(face);
                }
                _ => {}
            }
        }
        if let Some(&(line, index)) = pending.iter().find(|(_, k)| *k as usize > obj.positions.len()) {
            return Err(ObjError::IndexOutOfRange { line, index });
        }
        Ok(obj)
    }

    /// Faces as triangles, failing on any other polygon.
    pub fn triangles(&self) -> Result<Vec<[usize; 3]>, ObjError> {
        self.faces
            .iter()
            .enumerate()
            .map(|(f, p)| match p[..] {
                [a, b, c] => Ok([a, b, c]),
                _ => Err(ObjError::NotTriangle { face: f, corners: p.len() }),
            })
            .collect()
    }

    /// The triangle mesh on all declared vertices.
    pub fn tri_mesh(&self) -> Result<TriMesh, ObjError> {
        Ok(TriMesh::with_vertex_count(self.positions.len(), &self.triangles()?)?)
    }

    /// Mesh and planar positions `z = x + iy`, requiring `|z| <= PLANAR_TOL`.
    pub fn planar(&self) -> Result<(TriMesh, Vec<Complex64>), ObjError> {
        if let Some((v, p)) = self.positions.iter().enumerate().find(|(_, p)| p[2].abs() > PLANAR_TOL) {
            return Err(ObjError::NotPlanar { vertex: v, z: p[2] });
        }
        let z = self.positions.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Ok((self.tri_mesh()?, z))
    }

    pub fn to_obj_string(&self) -> String {
        let mut s = String::new();
        for p in &self.positions {
            let _ = writeln!(s, "v {} {} {}", sig17(p[0]), sig17(p[1]), sig17(p[2]));
        }
        for f in &self.faces {
            s.push('f');
            for &v in f {
                let _ = write!(s, " {}", v + 1);
            }
            s.push('\n');
        }
        s
    }
}

fn syntax(line: usize, msg: &str) -> ObjError {
    ObjError::Syntax { line, msg: msg.to_string() }
}

/// OBJ text of a planar realization.
pub fn planar_obj(mesh: &TriMesh, z: &[Complex64]) -> String {
    Obj {
        positions: z.iter().map(|p| [p.re, p.im, 0.0]).collect(),
        faces: mesh.faces().iter().map(|f| f.to_vec()).collect(),
    }
    .to_obj_string()
}

/// OBJ text of a spatial triangle mesh sharing the combinatorics of `mesh`.
pub fn spatial_obj(mesh: &TriMesh, p: &[Vec3]) -> String {
    Obj { positions: p.to_vec(), faces: mesh.faces().iter().map(|f| f.to_vec()).collect() }.to_obj_string()
}
