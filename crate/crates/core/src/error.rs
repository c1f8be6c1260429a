//! Error type shared across the library.
//!
//! Every fallible operation returns [`Error`]. Variants are split by the
//! contract they report on: construction of values (finite endpoints,
//! ordering, dimensions), evaluation domains (strip membership), resource
//! budgets, and the preconditions of the certification routines. Checks that
//! can legitimately come out "don't know" do not use errors for that; they
//! return a status enum instead. Errors mean the question itself was
//! malformed or a hard precondition failed.

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An endpoint or coefficient was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Interval constructed with lo > hi.
    #[error("inverted interval: lo > hi")]
    Inverted,

    /// Dimension of an argument does not match what the operation needs.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// A box axis had zero width where a positive-width axis is required.
    #[error("degenerate box: axis {axis} has zero width")]
    DegenerateBox { axis: usize },

    /// Point evaluation outside every branch domain under strict handling.
    #[error("point lies outside every strip domain")]
    DomainError,

    /// Box evaluation straddles two or more strips under strict handling.
    #[error("box straddles strip domains: not contained in any single strip")]
    StripStraddle,

    /// Box evaluation found no domain overlap at all.
    #[error("box lies outside the map domain")]
    OutsideDomain,

    /// A search or enumeration exceeded its configured budget.
    #[error("budget exceeded: {context} (limit {limit})")]
    BudgetExceeded { context: &'static str, limit: usize },

    /// A theorem hypothesis that the caller asked to verify is false.
    #[error("hypothesis failed: {reason}")]
    HypothesisFailed { reason: String },

    /// A rectangle passed where a slab of the reference rectangle is required.
    #[error("rectangle is not a {kind} slab of the reference rectangle")]
    NotASlab { kind: &'static str },

    /// Map component does not have the phase form the criterion needs.
    #[error("component {component} is not of phase form")]
    NotPhaseForm { component: usize },

    /// Two sets that must be disjoint intersect.
    #[error("sets must be disjoint but share cell {cell}")]
    SetsIntersect { cell: usize },

    /// A set that must be nonempty is empty.
    #[error("empty set: {context}")]
    EmptySet { context: &'static str },

    /// A routine was called before its prerequisite certificates were obtained.
    #[error("prerequisite failed: {reason}")]
    PreconditionFailed { reason: String },

    /// Word letters do not fit the alphabet, or alphabets of two words differ.
    #[error("alphabet mismatch: letter {letter} outside alphabet of size {alphabet}")]
    AlphabetMismatch { letter: usize, alphabet: usize },

    /// A symbol word must contain at least one letter.
    #[error("empty symbol word")]
    EmptyWord,

    /// Compact sets handed to the chaos machinery overlap.
    #[error("sets {i} and {j} are not disjoint")]
    NotDisjoint { i: usize, j: usize },

    /// The scalar type has no rigorous trig enclosures (exact rational lane).
    #[error("trigonometric enclosures unsupported for this scalar type")]
    TrigUnsupported,

    /// Map construction rejected its parameters.
    #[error("invalid map: {reason}")]
    InvalidMap { reason: String },

    /// Expression text failed to parse.
    #[error("parse error at byte {pos}: {msg}")]
    ExprParse { pos: usize, msg: String },

    /// Grid space whose active region is not connected.
    #[error("grid space is not connected")]
    Disconnected,

    /// Grid fixture or grid set is malformed.
    #[error("invalid grid data: {reason}")]
    InvalidGrid { reason: String },
}
