//! Executable checks for circle-contained Julia sets and real-line value
//! distribution of meromorphic functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`], [`roots`], [`rational`], [`mobius`]: exact-degree rational maps
//!   on the extended plane and simultaneous-iteration root finding.
//! - [`expsum`], [`contour`], [`exceptional`]: exponential sums with real
//!   frequencies, argument-principle zero location, and the two-exponential
//!   family `L((1 - e^{i(c1 z - b1)}) / (1 - e^{i(c2 z - b2)}))`.
//! - [`sphere`]: stereographic projection and circline fitting.
//! - [`dynamics`]: Julia sampling, Poincaré functions and the interval criteria.
//! - [`nevanlinna`]: Ahlfors–Shimizu characteristic and order of growth.

pub mod complex;
pub mod contour;
pub mod dynamics;
pub mod error;
pub mod exceptional;
pub mod expsum;
pub mod meromorphic;
pub mod mobius;
pub mod nevanlinna;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod roots;
pub mod sphere;

pub use complex::{chordal_distance, Complex, ExtendedComplex};
pub use error::{Error, Result};
pub use meromorphic::Meromorphic;
pub use mobius::Mobius;
pub use poly::Polynomial;
pub use rational::RationalMap;

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
