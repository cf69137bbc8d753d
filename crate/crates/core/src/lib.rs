//! Correlation functions of products and ratios of characteristic polynomials
//! of random Hermitian matrices in the unitary symmetry class, for a general
//! confining potential.
//!
//! Everything is built from three ingredients:
//!
//! * a composite Gauss–Legendre rule with the ensemble weight `exp(-N V(x))`
//!   absorbed into the node weights ([`quadrature`]),
//! * the monic polynomials orthogonal under that weight, obtained by the
//!   discretized Stieltjes procedure or, for the Gaussian potential, in closed
//!   form ([`orthopoly`]),
//! * their Cauchy transforms evaluated off the real axis ([`cauchy`]).
//!
//! The averages themselves are ratios of determinants assembled from those
//! pieces ([`correlators`]). All determinant work is carried out in log-scaled
//! arithmetic ([`logdet`]) so that large matrix dimensions cannot overflow.
//!
//! Independent cross-checks live in [`oracles`]: a direct N-fold eigenvalue
//! integral for small N, a seeded Monte-Carlo sampler over the Gaussian
//! unitary ensemble, exact algebraic identities, and eigenvalue-integral
//! duality representations. [`rh`] verifies the Riemann–Hilbert
//! characterization (jump and normalization conditions) of the computed
//! polynomials and transforms.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); the type aliases at the crate root pin the common
//! double-precision instantiations.

pub mod cauchy;
pub mod correlators;
mod error;
pub mod logdet;
pub mod oracles;
pub mod orthopoly;
pub mod potential;
pub mod quadrature;
pub mod rh;
pub mod scalar;

pub use cauchy::{cauchy_profile, cauchy_transform, tilde_pi, CauchyQuery, CauchyValue};
pub use correlators::{
    avg_inverse, avg_product, correlation_general, CorrelationRecord, CorrelationValue,
    SpectralArguments,
};
pub use error::{Error, Result};

pub use orthopoly::OrthoBasis;
pub use potential::{Potential, PotentialKind};
pub use quadrature::{build_quadrature, QuadratureRule};
pub use scalar::Real;

/// Double-precision complex number.
pub type Complex64 = num_complex::Complex<f64>;
/// Double-precision confining potential.
pub type Potential64 = potential::Potential<f64>;
/// Double-precision weighted quadrature rule.
pub type QuadratureRule64 = quadrature::QuadratureRule<f64>;
/// Double-precision orthogonal basis.
pub type OrthoBasis64 = orthopoly::OrthoBasis<f64>;
/// Double-precision argument sets.
pub type SpectralArguments64 = correlators::SpectralArguments<f64>;
/// Double-precision average in log form.
pub type CorrelationValue64 = correlators::CorrelationValue<f64>;

