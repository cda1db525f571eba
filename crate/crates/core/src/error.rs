use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("too many points: {0} (capacity is {cap})", cap = crate::bits::CAPACITY)]
    TooManyPoints(usize),

    #[error("open family too large to enumerate (more than {0} opens)")]
    TooManyOpens(usize),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("unknown id `{0}`")]
    UnknownId(String),

    #[error("not a topology: {0}")]
    NotATopology(String),

    #[error("map is not total: no image for `{0}`")]
    NotTotal(String),

    #[error("maps have different codomains")]
    CodomainMismatch,

    #[error("map is not continuous: {0}")]
    NotContinuous(String),

    #[error("not a residuated lattice: {0}")]
    InvalidLattice(String),

    #[error("order plus product is not residuated: {x}*{z} <= {y} disagrees with {z} <= {x}->{y}")]
    NotResiduated { x: String, y: String, z: String },

    #[error("not a filter: {0}")]
    NotAFilter(String),

    #[error("not a morphism of residuated lattices: {0}")]
    NotAMorphism(String),

    #[error("not an etale space: {0}")]
    NotEtale(String),

    #[error("not a section: {0}")]
    NotASection(String),

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("pointwise {op} of {left} and {right} is not a section")]
    NotClosed {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),
}
