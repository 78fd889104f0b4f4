use std::io;
use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::json::FormatError;
use crate::obj::ObjError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Obj { path: PathBuf, source: ObjError },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    /// A core error, with the offending edge named by its `"i-j"` key when known.
    #[error("{source}")]
    Core { source: ddg_core::Error, edge_key: Option<String> },
    #[error("{0}")]
    Usage(String),
}

impl From<ddg_core::Error> for CliError {
    fn from(source: ddg_core::Error) -> Self {
        CliError::Core { source, edge_key: None }
    }
}

impl CliError {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Obj { source: ObjError::Mesh(e), .. } => e.code(),
            CliError::Obj { .. } => "Obj",
            CliError::Format { .. } => "Format",
            CliError::Core { source, .. } => source.code(),
            CliError::Usage(_) => "Usage",
        }
    }

    /// Whether this is a failed check on well-formed input (exit 2) rather
    /// than bad input (exit 1).
    pub fn is_verification(&self) -> bool {
        use ddg_core::Error::*;
        matches!(
            self,
            CliError::Core {
                source: NotHarmonic { .. }
                    | IntegrationDefect { .. }
                    | ClosureDefect { .. }
                    | NotRealizable { .. }
                    | IncompatibleRates { .. }
                    | NotHolomorphic { .. }
                    | NotMinimal { .. },
                ..
            }
        )
    }

    pub fn to_json(&self) -> Value {
        use ddg_core::Error::*;
        let mut m = Map::new();
        m.insert("code".into(), self.code().into());
        m.insert("message".into(), self.to_string().into());
        if let CliError::Core { source, edge_key } = self {
            let (vertex, edge, face) = match *source {
                NotHarmonic { vertex, .. }
                | NotHolomorphic { vertex, .. }
                | VertexAtInfinity { vertex }
                | NonFinite { vertex }
                | MissingBoundaryData { vertex }
                | NonManifoldVertex { vertex } => (Some(vertex), None, None),
                IntegrationDefect { edge, .. }
                | ClosureDefect { edge, .. }
                | NotRealizable { edge, .. }
                | NotMinimal { edge, .. } => (None, Some(edge), None),
                IncompatibleRates { face, .. } | DegenerateFace { face } | InvalidFace { face, .. } => {
                    (None, None, Some(face))
                }
                _ => (None, None, None),
            };
            if let Some(v) = vertex {
                m.insert("vertex".into(), v.into());
            }
            if let Some(e) = edge {
                m.insert("edge".into(), edge_key.clone().map_or(Value::from(e), Value::from));
            }
            if let Some(f) = face {
                m.insert("face".into(), f.into());
            }
        }
        Value::Object(m)
    }
}
