use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants are grouped by the layer that raises them; the CLI maps the
/// input-shaped ones to exit code 2 and computation-level failures to 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // algebra
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("grading mismatch in d({generator}): word `{word}` has the wrong parity")]
    GradingMismatch { generator: String, word: String },
    #[error("generator `{0}` has nonpositive action")]
    NonpositiveAction(String),
    #[error("bad rational `{0}`")]
    BadRational(String),

    // diagram
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("diagram is not planar: {0}")]
    NonPlanar(String),
    #[error("bad valence: {0}")]
    BadValence(String),
    #[error("disc search budget of {0} states exceeded")]
    SearchBudgetExceeded(u64),
    #[error("unknown crossing `{0}`")]
    UnknownCrossing(String),
    #[error("crossing `{0}` is not flagged contractible")]
    NotContractible(String),

    // augmentations
    #[error("enumeration needs 2^{needed} candidates, cap is 2^{cap}")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("c-chords `{0}` and `{1}` have equal action")]
    DistinctActionsRequired(String, String),
    #[error("differential does not match the triangle structure: {0}")]
    ShapeViolation(String),
    #[error("inconsistent constraint: {0}")]
    Inconsistent(String),
    #[error("augmentation does not send `{0}` to 1")]
    NotUnitValued(String),
    #[error("surgery chord `{0}` is not of degree 0")]
    DegreeObstruction(String),
    #[error("differential does not vanish in the quotient: {0}")]
    QuotientNotClosed(String),

    // complexes
    #[error("word `{word}` in d({generator}) has {count} mixed chords")]
    MixedWordViolation { generator: String, word: String, count: usize },
    #[error("not an augmentation: fails at `{0}`")]
    NotAnAugmentation(String),
    #[error("not a complex: d^2 != 0 at `{0}`")]
    NotAComplex(String),

    // twisted complexes
    #[error("directedness violated by word `{word}` in d({generator})")]
    DirectednessViolation { generator: String, word: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("augmentation is nonzero on order-reversing chord `{0}`")]
    OrderReversingNonzero(String),
    #[error("Maurer-Cartan equation fails")]
    MaurerCartanViolated,
    #[error("twisted hom complex is not acyclic (total rank {0})")]
    NotAcyclic(usize),
    #[error("no action-triangular isomorphism onto the smoothed DGA: fails at `{0}`")]
    NotTriangular(String),

    // plumbing
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Whether the failure comes from the input rather than the computation.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::UnknownGenerator(_)
                | Error::UnknownComponent(_)
                | Error::DuplicateName(_)
                | Error::GradingMismatch { .. }
                | Error::NonpositiveAction(_)
                | Error::BadRational(_)
                | Error::Malformed(_)
                | Error::NonPlanar(_)
                | Error::BadValence(_)
                | Error::UnknownCrossing(_)
                | Error::NotContractible(_)
                | Error::DistinctActionsRequired(..)
                | Error::ShapeViolation(_)
                | Error::ShapeMismatch(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
