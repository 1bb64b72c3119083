use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    #[error("state is not PPT: partial transpose over {parties} parties has min eigenvalue {min_eig:.3e}")]
    NotPpt { parties: usize, min_eig: f64 },

    #[error("operator has support outside the symmetric subspace (residual {residual:.3e})")]
    SupportOutsideSymmetric { residual: f64 },

    #[error("invalid party index {party} for {num_qubits} qubits")]
    InvalidParty { party: usize, num_qubits: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("boundary parameter: {0}")]
    Boundary(String),

    #[error("filter is rank deficient (rank {rank}, expected {expected})")]
    RankDeficientFilter { rank: usize, expected: usize },

    #[error("convention error: filtered operator leaves the symmetric subspace (residual {residual:.3e})")]
    Convention { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("product vector is outside a range (residual {residual:.3e})")]
    InvalidAlpha { residual: f64 },

    #[error("no edge-test solver for kernel dimensions {0:?}")]
    Dispatch([usize; 3]),

    #[error("kernel vector violates the AB<->CD conjugation symmetry (residual {residual:.3e})")]
    SymmetryViolation { residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature with {nodes} nodes is too coarse (need at least {required})")]
    QuadratureTooCoarse { nodes: usize, required: usize },

    #[error("walk exceeded {0} steps without reaching an extremal state")]
    MaxSteps(usize),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
