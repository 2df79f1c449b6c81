use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed PD code: {0}")]
    MalformedSyntax(String),
    #[error("arc {0} is not used exactly twice")]
    ArcUsedNotTwice(u64),
    #[error("diagram is disconnected (split diagrams are not accepted)")]
    DisconnectedDiagram,
    #[error("PD code does not describe a planar diagram ({faces} faces, expected {expected})")]
    NotPlanar { faces: usize, expected: usize },
    #[error("crossing {0} does not exist")]
    NoSuchCrossing(usize),
    #[error("arc {0} does not exist")]
    NoSuchArc(usize),
    #[error("diagram has crossingless components and cannot be written as a PD code")]
    NotRepresentable,
    #[error("invalid move {0}")]
    InvalidMove(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaitError {
    #[error("spanning tree count {count} exceeds budget {budget}")]
    TooManyTrees { count: String, budget: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateSumError {
    #[error("{crossings} crossings exceeds the state-sum budget of {budget}")]
    BudgetExceeded { crossings: usize, budget: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangleError {
    #[error("tangle coefficient {index} violates the extension condition")]
    ExtensionViolated { index: usize },
    #[error("malformed tangle literal: {0}")]
    Malformed(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QaError {
    #[error("input certificate does not verify")]
    InvalidInputCertificate,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("missing data file {0}")]
    MissingDataFile(String),
    #[error("bad table data: {0}")]
    BadData(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Tangle(#[from] TangleError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("malformed pretzel spec: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}
