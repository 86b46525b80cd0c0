use thiserror::Error;

/// Errors raised by the toolkit. Soft conditions (solver oscillation,
/// non-convex Young functions, unreachable ξ) are reported as flags on the
/// returned values instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential is not integrable: {0}")]
    NonIntegrablePotential(String),
    #[error("invalid potential specification: {0}")]
    InvalidSpec(String),
    #[error("grid mismatch: expected {expected} values, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("not a probability density: {0}")]
    NotADensity(String),
    #[error("inadmissible eta profile: {0}")]
    InadmissibleEta(String),
    #[error("splice point a={a} must exceed max(2, b)={bound}")]
    BadSplice { a: f64, bound: f64 },
    #[error("psi does not admit a Pinsker constant: {0}")]
    NotPinskerAdmissible(String),
    #[error("gauge of the zero function is undefined")]
    ZeroFunction,
    #[error("H is bounded (H(inf) = {0}); the F-bar calculus needs H(+inf) = +inf")]
    HCollapse(f64),
    #[error("1/tau reaches zero at u={0} before the end of the domain")]
    NonPositiveTau(f64),
    #[error("density vanishes in the bulk at x={0}")]
    VanishingDensity(f64),
    #[error("tail formula requires a symmetric density: {0}")]
    AsymmetricInput(String),
    #[error("supremum diverges along the grid ({0})")]
    DivergentSup(String),
    #[error("bad exponent: {0}")]
    BadExponent(String),
    #[error("capacity constant diverges ({0})")]
    DivergentCcap(String),
    #[error("a Poincaré constant is required but could not be estimated: {0}")]
    MissingPoincare(String),
    #[error("gamma = beta(u)/u is not strictly decreasing: {0}")]
    GammaNotInvertible(String),
    #[error("moment is missing or not finite: {0}")]
    MomentMissing(String),
    #[error("operation requires the Gaussian measure V(x)=x^2/2: {0}")]
    WrongMeasure(String),
    #[error("lower bound h >= 1/2 violated: min h = {0}")]
    LowerBoundViolated(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
