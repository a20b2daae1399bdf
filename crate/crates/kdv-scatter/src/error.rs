use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch point at {0}")]
    Singular(Complex64),
    #[error("pole at {0}")]
    Pole(Complex64),
    #[error("{lambda} is within {dist:e} of an excluded point")]
    Proximity { lambda: Complex64, dist: f64 },
    #[error("step size underflow at x = {x} (h = {h:e}, lambda = {lambda})")]
    Stiff { x: f64, h: f64, lambda: Complex64 },
    #[error("branch tracking failed near {0}")]
    Branch(Complex64),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("insufficient table resolution: {0}")]
    Resolution(String),
    #[error("region mismatch: {0}")]
    Region(String),
    #[error("scenario invalid at {path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("solitonless assumption violated: winding number {0}")]
    Solitons(i64),
    #[error("degenerate factorization: 1 + r1 r2 = 0 near {0}")]
    Degenerate(Complex64),
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("extrapolation did not converge: {0}")]
    Asymptotics(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Invalid { .. } | Error::Domain(_) | Error::Region(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
