//! Resolvent kernel of the discrete Laplacian on the square lattice Z^d.
//!
//! The central object is the kernel G(z, n) of (H₀ − z)⁻¹ where H₀ is the
//! (positive-sign) discrete Laplacian, evaluated through several series
//! representations with complementary domains of validity, together with
//! exact closed-form fundamental solutions at distinguished spectral points
//! and slow-but-sure verification oracles (torus quadrature, a Bessel
//! integral, and killed random-walk sums).

pub mod error;
pub mod fundsol;
pub mod hyper;
pub mod identities;
pub mod oracles;
pub mod resolvent;
pub mod special;

pub use error::{Error, Result};
