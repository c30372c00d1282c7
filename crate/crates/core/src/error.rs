use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("monodromy integration did not reach tolerance {tol:e} within {max_steps} steps (k = {k})")]
    NonConvergence { k: Complex64, tol: f64, max_steps: usize },

    #[error("sample k = {k} lies within {guard:e} of a zero of sin(2k^2 tau)")]
    SampleTooClose { k: Complex64, guard: f64 },

    #[error("degenerate denominator at k = {k}")]
    DegenerateDenominator { k: Complex64 },

    #[error("maximum of |Q^b| landed inside the lattice guard at k = {k}")]
    GuardCollision { k: Complex64 },

    #[error("residue contour around {center} intersects the guard zone of another lattice point")]
    ContourCrossesSingularity { center: Complex64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("admissibility gate not passed: {0}")]
    GateNotPassed(String),

    #[error("evaluation point k = {k} is within {delta:e} of the real line")]
    TooCloseToContour { k: Complex64, delta: f64 },

    #[error("a(k) vanishes (|a| = {modulus:e}) at pole {k}")]
    PoleOfA { k: Complex64, modulus: f64 },

    #[error("poles {0} and {1} coincide")]
    CoincidentPoles(Complex64, Complex64),

    #[error("dressing system is singular at (x, t) = ({x}, {t})")]
    SingularSystem { x: f64, t: f64 },

    #[error("M-hat evaluated at the pole k = {0}")]
    EvalAtPole(Complex64),

    #[error("k = {0} lies on a branch cut of Omega")]
    OnBranchCut(Complex64),

    #[error("closed form is singular at (x, t) = ({x}, {t})")]
    SingularPoint { x: f64, t: f64 },
}
