use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("evaluation point {w} is within {dist:.3e} of the pole {pole}")]
    PoleProximity { w: C64, pole: C64, dist: f64 },
    #[error("denominator roots {0} and {1} are closer than the clustering tolerance")]
    ClusteredPoles(C64, C64),
    #[error("{0} did not converge")]
    NonConvergence(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("point {w} is {dist:.3e} from the boundary (minimum {min:.3e}); refine n")]
    NearBoundary { w: C64, dist: f64, min: f64 },
    #[error("cutoff radius {r} is not below dist(0, boundary) = {dist}")]
    CutoffViolation { r: f64, dist: f64 },
    #[error("pole {0} lies on the unit circle")]
    PoleOnCircle(C64),
    #[error("pole {0} lies on the wrong side of the unit circle for this transform")]
    PoleOutsideDomain(C64),
    #[error("polynomial part not allowed for the interior transform")]
    OutsideTransformDomain,
    #[error("inverse map failed to converge for w = {0}")]
    InversionFailure(C64),
    #[error("Laurent data of order {have} is insufficient for degree {need}")]
    InsufficientLaurentOrder { have: usize, need: usize },
    #[error("map has a zero within tolerance of the unit circle")]
    ZeroOnBoundary,
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("map is not univalent: {0}")]
    NotUnivalent(String),
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("logarithm branch crossing on the extraction circle")]
    BranchAmbiguity,
    #[error("preimage under the power map is not simply connected: {0}")]
    DisconnectedPreimage(String),
    #[error("exponential is not injective on a disk of radius {0}")]
    NotInjective(f64),
    #[error("inadmissible test function: {0}")]
    InadmissibleTestFunction(String),
    #[error("univalence check inconclusive near parameters ({0}, {1})")]
    Inconclusive(f64, f64),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

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
