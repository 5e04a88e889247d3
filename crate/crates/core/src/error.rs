//! Error type shared by all solver modules.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shift must be positive (the line may not touch the cut), got {value}")]
    NonpositiveShift { value: f64 },

    #[error("coupling must be positive, got {value}")]
    NonpositiveCoupling { value: f64 },

    #[error("grid needs an odd point count >= 3, got {n_points}")]
    BadGrid { n_points: usize },

    #[error("half-width must be positive, got {value}")]
    BadHalfWidth { value: f64 },

    #[error("potential is singular at the origin x = 0")]
    SingularOrigin,

    #[error("series truncation k_max must be >= {min}, got {k_max}")]
    BadTruncation { k_max: usize, min: usize },

    #[error("basis dimension {dim} too small for level {n} at k_max {k_max} (need >= {need})")]
    BasisTooSmall {
        dim: usize,
        n: usize,
        k_max: usize,
        need: usize,
    },

    #[error("integration produced a non-finite state at s = {s}")]
    IntegrationBlowup { s: f64 },

    #[error("wave function has a node at the matching point s = {s}")]
    NodeAtMatchingPoint { s: f64 },

    #[error(
        "eigenvalue search did not converge after {iterations} iterations \
         (best E = {best}, |mismatch| = {residual:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        best: Complex64,
        residual: f64,
    },

    #[error("eigenvalue search failed for level {n}: {source}")]
    LevelFailed {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("levels {a} and {b} converged to the same energy {energy}")]
    DuplicateLevel { a: usize, b: usize, energy: Complex64 },

    #[error("levels {a} and {b} are out of order (Re E must increase with n)")]
    UnorderedLevels { a: usize, b: usize },

    #[error("tridiagonal factorization broke down at row {row}")]
    LuBreakdown { row: usize },

    #[error("inverse iteration did not settle after {iterations} iterations")]
    InverseIterationStalled { iterations: usize },

    #[error("contour pair must share the half-width and halve the spacing")]
    MismatchedContourPair,

    #[error("degenerate abscissa: need at least {need} distinct ascending couplings, got {got}")]
    DegenerateAbscissa { need: usize, got: usize },

    #[error("epsilon fraction must lie in (0, 1], got {value}")]
    BadEpsilonFraction { value: f64 },
}
