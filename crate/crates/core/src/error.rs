use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("group is not closed: composing elements {0} and {1} leaves the set")]
    NotClosed(usize, usize),

    #[error("assumption (A) violated: matrix of element {0} appears with two distinct phases")]
    AssumptionAViolated(usize),

    #[error("group does not contain the identity element")]
    MissingIdentity,

    #[error("element {0} has no inverse in the set")]
    MissingInverse(usize),

    #[error("matrix is not orthogonal (max deviation {0:e})")]
    NotOrthogonal(f64),

    #[error("matrix is not a signed permutation and cannot act exactly on the grid")]
    NonGridCompatibleMatrix,

    #[error("candidate subgroup is not a subgroup of the parent group")]
    NotASubgroup,

    #[error("group of order {0} is too large for exhaustive subgroup enumeration (max 16)")]
    GroupTooLarge(usize),

    #[error("empty element set")]
    EmptyGroup,

    #[error("translation {0:?} is not a lattice vector of the grid")]
    OffLatticeTranslation(Vec<f64>),

    #[error("frequency {0:?} is not on the reciprocal lattice 2pi/L * Z")]
    OffLatticeFrequency(Vec<f64>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("field contains non-finite samples")]
    NonFinite,

    #[error("field is not decayed at the box boundary (boundary/max = {0:e})")]
    NotDecayedAtBoundary(f64),

    #[error("field is zero")]
    ZeroField,

    #[error("field has vanishing potential term ||f||_(p+1)")]
    ZeroPotentialTerm,

    #[error("field has zero mass")]
    ZeroMass,

    #[error("dilated field is not resolved on the grid (ratio {0:e})")]
    UnresolvedAfterScaling(f64),

    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: String, found: usize },

    #[error("no shooting bracket found on the initial-value interval [{0}, {1}]")]
    BracketNotFound(f64, f64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("descent collapsed to the zero field")]
    CollapseToZero,

    #[error("action failed to decrease at iteration {0} after repeated step halving")]
    NoDescent(usize),

    #[error("threshold ledger has no entry for group {0}")]
    MissingThreshold(String),

    #[error("group {0} has no subgroup satisfying (*) and no l-value in the ledger")]
    NoStarSubgroup(String),

    #[error("field is not invariant under the group (symmetrization residual {0:e})")]
    NotGroupInvariant(f64),

    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error("invalid initial-data recipe: {0}")]
    RecipeInvalid(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad snapshot: {0}")]
    BadSnapshot(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
