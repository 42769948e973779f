use thiserror::Error;

/// Errors reported by constructions and loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{u}, {v}}} has weight {w}; weights must be finite and positive")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("edge {{{0}, {1}}} is not an edge of the host graph")]
    NotSubgraph(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("measure must be at least 1 on every vertex (vertex {vertex} has {value})")]
    MeasureBelowOne { vertex: usize, value: f64 },
    #[error("label {label} is smaller than child label {child}")]
    LabelOrder { label: f64, child: f64 },
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
    #[error("terminal set is empty")]
    EmptyTerminals,
    #[error("Steiner point removal stretch {0} exceeds 8")]
    StretchExceeded(f64),
    #[error("subgraph is not h-respecting")]
    NotRespecting,
    #[error("subgraph is not connected")]
    Disconnected,
    #[error("labels belong to different trees ({0} vs {1})")]
    LabelMismatch(u32, u32),
    #[error("scale {scale} outside configured range 0..={max}")]
    ScaleOutOfRange { scale: i32, max: i32 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
