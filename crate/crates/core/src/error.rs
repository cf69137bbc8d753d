use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A potential failed validation (wrong degree parity, sign of the
    /// leading coefficient, zero matrix size, ...).
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A caller-supplied parameter is outside its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An integrand evaluated to a non-finite value at a quadrature node.
    #[error("integrand is not finite at node {index} (x = {abscissa})")]
    NonFiniteIntegrand { index: usize, abscissa: f64 },

    /// The quadrature rule cannot support the requested polynomial degree.
    #[error("quadrature insufficient for requested degree {degree}")]
    QuadratureInsufficient { degree: usize },

    /// A polynomial degree beyond what the basis stores.
    #[error("degree {degree} exceeds basis maximum {max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    /// An evaluation point sits on or too close to the real axis.
    #[error("Im(epsilon) must be nonzero and |Im| >= {threshold:.3e} (got {im:.3e})")]
    NearRealAxis { im: f64, threshold: f64 },

    /// Two arguments of one family coincide (or nearly so).
    #[error("coincident {family} arguments at indices {i} and {j}")]
    DegenerateArguments {
        family: &'static str,
        i: usize,
        j: usize,
    },

    /// Successive refinements stopped improving before reaching the target.
    #[error(
        "refinement failed to converge: successive estimates \
         {previous_re}+{previous_im}i and {current_re}+{current_im}i"
    )]
    AccuracyNotReached {
        previous_re: f64,
        previous_im: f64,
        current_re: f64,
        current_im: f64,
    },

    /// The request is outside what this implementation can do at all.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A series comparison was requested where the series diverges.
    #[error("series diverges: |x[{i}] * y[{j}]| >= 1")]
    DivergentSeries { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
