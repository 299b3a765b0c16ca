use thiserror::Error;

use crate::graph_core::{Colour, EdgeId, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {{{0},{1}}} already present")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge {{{0},{1}}} absent")]
    MissingEdge(Vertex, Vertex),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("colour {colour} outside palette 1..={palette}")]
    ColourOutOfRange { colour: Colour, palette: Colour },
    #[error("colour {colour} on edge {edge} clashes with edge {conflict}")]
    Conflict {
        edge: EdgeId,
        colour: Colour,
        conflict: EdgeId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edges {0} and {1} are not adjacent")]
    NotAdjacent(EdgeId, EdgeId),
    #[error("shift pattern violated at ({0},{1}): expected blank then coloured")]
    BlankPattern(EdgeId, EdgeId),
    #[error("shift failed at step {step}: {source}")]
    ShiftFailed { step: usize, source: GraphError },
    #[error("edge {0} is not blank")]
    NotBlank(EdgeId),
    #[error("fan precondition violated: {0}")]
    FanPrecondition(&'static str),
    #[error("chain is already augmenting and cannot be extended")]
    AlreadyAugmenting,
    #[error("prefix is not a shiftable consistent chain")]
    BadPrefix,
    #[error("no augmenting chain within budget")]
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitterError {
    #[error("degree cap {cap} exceeded at vertex {vertex}")]
    DegreeCap { vertex: Vertex, cap: u64 },
    #[error("edge {{{0},{1}}} already present")]
    Duplicate(Vertex, Vertex),
    #[error("edge {{{0},{1}}} absent")]
    Missing(Vertex, Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HierarchyError {
    #[error("splitter at level {level}: {source}")]
    Splitter { level: usize, source: SplitterError },
    #[error("edge {{{0},{1}}} already present")]
    Duplicate(Vertex, Vertex),
    #[error("edge {{{0},{1}}} absent")]
    Missing(Vertex, Vertex),
    #[error("profile of edge {edge:?} at level {level}: stored {stored}, splitter reports {reported}")]
    ProfileMismatch {
        edge: (Vertex, Vertex),
        level: usize,
        stored: Colour,
        reported: Colour,
    },
    #[error("degree cap breach at level {level}: vertex {vertex} has degree {degree} > {cap}")]
    CapBreach {
        level: usize,
        vertex: Vertex,
        degree: usize,
        cap: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Splitter(#[from] SplitterError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("degree {degree} at vertex {vertex} exceeds the configured maximum {cap}")]
    DegreeCap { vertex: Vertex, degree: usize, cap: usize },
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("vertex {vertex} is not an endpoint in colour pair {pair:?}")]
    NotEndpoint { vertex: Vertex, pair: (Colour, Colour) },
    #[error("edge {{{0},{1}}} is not in any component of its colour pairs")]
    MissingEdge(Vertex, Vertex),
}
