use thiserror::Error;

/// Errors produced while building meshes, assembling operators or solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dangling index: {0}")]
    DanglingIndex(String),

    #[error("non-manifold face {face}: listed by {count} cells")]
    NonManifoldFace { face: usize, count: usize },

    #[error("empty cell {0}")]
    EmptyCell(usize),

    #[error("inverted cell {cell} (signed volume {volume:e})")]
    InvertedCell { cell: usize, volume: f64 },

    #[error("degenerate cell {0}")]
    DegenerateCell(usize),

    #[error("node {node} is not on face {face}")]
    NodeNotOnFace { node: usize, face: usize },

    #[error("GRDECL: {0}")]
    Grdecl(String),

    #[error("tensor is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("material is not elliptic: {0}")]
    NonElliptic(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cell {cell}: {source}")]
    Element {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("conflicting constraints on dof {0}")]
    ConflictingConstraint(usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags an error with the cell that produced it.
    pub fn in_cell(self, cell: usize) -> Error {
        match self {
            e @ Error::Element { .. } => e,
            e => Error::Element {
                cell,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
