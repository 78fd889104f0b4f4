use num_complex::Complex64;

use crate::mesh::{EdgeId, FaceId, VertexId};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("face {face} is invalid: {reason}")]
    InvalidFace { face: FaceId, reason: &'static str },
    #[error("edge {}-{} is shared by more than two faces", edge[0], edge[1])]
    NonManifold { edge: [VertexId; 2] },
    #[error("the star of vertex {vertex} is not a single fan")]
    NonManifoldVertex { vertex: VertexId },
    #[error("faces adjacent to edge {}-{} have inconsistent orientation", edge[0], edge[1])]
    InconsistentOrientation { edge: [VertexId; 2] },
    #[error("mesh is not connected")]
    Disconnected,
    #[error("mesh is not a topological disk (Euler characteristic {euler})")]
    NotSimplyConnected { euler: i64 },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("realizations belong to different meshes")]
    MeshMismatch,
    #[error("anchor {index} is out of range")]
    InvalidAnchor { index: usize },
    #[error("non-finite coordinate at vertex {vertex}")]
    NonFinite { vertex: VertexId },
    #[error("face {face} is degenerate (collinear or coincident vertices)")]
    DegenerateFace { face: FaceId },
    #[error("vertices {a} and {b} coincide")]
    CoincidentVertices { a: VertexId, b: VertexId },
    #[error("vertex {vertex} is mapped to infinity")]
    VertexAtInfinity { vertex: VertexId },
    #[error("linear system is singular (pivot {pivot})")]
    SingularSystem { pivot: usize },
    #[error("no boundary value given for vertex {vertex}")]
    MissingBoundaryData { vertex: VertexId },
    #[error("function is not harmonic at vertex {vertex} (residual {residual:e})")]
    NotHarmonic { vertex: VertexId, residual: f64 },
    #[error("integration does not close across edge {edge} (defect {defect:e})")]
    IntegrationDefect { edge: EdgeId, defect: f64 },
    #[error("1-form is not closed across edge {edge} (defect {defect:e})")]
    ClosureDefect { edge: EdgeId, defect: f64 },
    #[error("face evaluations of the edge form disagree on edge {edge} (defect {defect:e})")]
    NotRealizable { edge: EdgeId, defect: f64 },
    #[error("edge rates are incompatible on face {face} (defect {defect})")]
    IncompatibleRates { face: FaceId, defect: Complex64 },
    #[error("quadratic differential is not holomorphic at vertex {vertex} (defect {defect:e})")]
    NotHolomorphic { vertex: VertexId, defect: f64 },
    #[error("surface is not minimal at edge {edge} (residual {residual:e})")]
    NotMinimal { edge: EdgeId, residual: f64 },
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyMesh => "EmptyMesh",
            Error::InvalidFace { .. } => "InvalidFace",
            Error::NonManifold { .. } => "NonManifold",
            Error::NonManifoldVertex { .. } => "NonManifoldVertex",
            Error::InconsistentOrientation { .. } => "InconsistentOrientation",
            Error::Disconnected => "Disconnected",
            Error::NotSimplyConnected { .. } => "NotSimplyConnected",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::MeshMismatch => "MeshMismatch",
            Error::InvalidAnchor { .. } => "InvalidAnchor",
            Error::NonFinite { .. } => "NonFinite",
            Error::DegenerateFace { .. } => "DegenerateFace",
            Error::CoincidentVertices { .. } => "CoincidentVertices",
            Error::VertexAtInfinity { .. } => "VertexAtInfinity",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::MissingBoundaryData { .. } => "MissingBoundaryData",
            Error::NotHarmonic { .. } => "NotHarmonic",
            Error::IntegrationDefect { .. } => "IntegrationDefect",
            Error::ClosureDefect { .. } => "ClosureDefect",
            Error::NotRealizable { .. } => "NotRealizable",
            Error::IncompatibleRates { .. } => "IncompatibleRates",
            Error::NotHolomorphic { .. } => "NotHolomorphic",
            Error::NotMinimal { .. } => "NotMinimal",
        }
    }
}
