//! Independent cross-checks for the determinantal evaluation route.
//!
//! Nothing in this module goes through [`crate::correlators`]' determinant
//! assembly (except where a check explicitly pits the two routes against
//! each other):
//!
//! * [`brute_force`] — the N-fold eigenvalue integral, evaluated by direct
//!   summation over quadrature grids; exponential in N, so capped at small
//!   matrix sizes.
//! * [`mc`] — seeded Monte-Carlo sampling of Gaussian Hermitian matrices,
//!   with batch-based error bars.
//! * [`identities`] — exact algebraic identities (a subset expansion of
//!   inverse products, and the Cauchy–Littlewood / Schur expansion) that the
//!   numerics must reproduce to near machine precision.
//! * [`duality`] — dual matrix-integral representations for the Gaussian
//!   potential, where an N-fold average equals a low-dimensional integral;
//!   checked as ratio constancy across argument sets, which pins every
//!   argument-dependent factor while leaving one overall normalization free.

pub mod brute_force;
pub mod duality;
pub mod identities;
pub mod mc;

pub use brute_force::{brute_force_average, BruteForceValue};
pub use duality::{duality_check_general, duality_check_products, DualityCheck};
pub use identities::{cauchy_littlewood_check, permutation_identity_check, IdentityCheck};
pub use mc::{mc_average, McConfig, McEstimate, McRecord};
