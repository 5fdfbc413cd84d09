use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("system is not strongly elliptic: {0}")]
    NotElliptic(String),
    #[error("invalid Lamé moduli: mu = {mu}, lambda = {lambda}")]
    BadModuli { mu: f64, lambda: f64 },
    #[error("symbol is singular at xi = {0:?}")]
    SingularSymbol(Vec<f64>),
    #[error("evaluation at the origin")]
    OriginSingularity,
    #[error("conormal residual {residual:e} exceeds gate {gate:e}")]
    ConormalViolated { residual: f64, gate: f64 },
    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),
    #[error("route not supported: {0}")]
    UnsupportedRoute(String),
    #[error("grid too coarse: t = {t} < 4h = {min}")]
    GridTooCoarse { t: f64, min: f64 },
    #[error("spectral mass near Nyquist: {0:e}")]
    AliasingRisk(f64),
    #[error("field is not negligible at the box boundary: {0:e}")]
    BoundaryLeak(f64),
    #[error("kernel is not odd: defect {0:e}")]
    KernelNotOdd(f64),
    #[error("kernel is not homogeneous of degree -{degree}: defect {defect:e}")]
    KernelNotHomogeneous { degree: usize, defect: f64 },
    #[error("system not supported by this route: {0}")]
    UnsupportedSystem(String),
    #[error("square-root branch is ambiguous: Re b = {0:e}")]
    BranchAmbiguity(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
