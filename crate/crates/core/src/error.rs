use thiserror::Error;

/// Failure modes of the library. Validation failures that are reported
/// inside certificates never show up here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structure constants are not associative (residual {residual:.3e})")]
    NotAssociative { residual: f64 },
    #[error("algebra has no unit (residual {residual:.3e})")]
    NoUnit { residual: f64 },
    #[error("idempotent splitting failed after {attempts} attempts (best residual {residual:.3e})")]
    SplitFailed { attempts: usize, residual: f64 },
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("global dimension vanishes (|dim| = {0:.3e})")]
    ZeroDimension(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("word of length {len} exceeds the supported maximum {max}")]
    WordTooLong { len: usize, max: usize },
    #[error("singular F-block at (a,b,c;d) = {0:?}")]
    SingularF([usize; 4]),
    #[error("basis is linearly dependent")]
    DegenerateBasis,
    #[error("tube element has a component outside the diagonal subspace at {0:?}")]
    NotInXi0((usize, usize, usize)),
    #[error("no branch of sqrt(phi(z)) gives integer multiplicities for simple {index}")]
    BranchAmbiguous { index: usize },
    #[error("idempotent vanishes")]
    ZeroIdempotent,
    #[error("product is not proportional to the idempotent (residual {residual:.3e})")]
    NotProportional { residual: f64 },
    #[error("conjugate of simple {index} could not be identified")]
    ConjugationUnresolved { index: usize },
    #[error("fusion coefficients are not integral (residual {residual:.3e})")]
    NonIntegerFusion { residual: f64 },
    #[error("element is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },
    #[error("hexagon equations fail (residual {residual:.3e})")]
    HexagonFailed { residual: f64 },
    #[error("no matching: {0}")]
    NoMatching(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
