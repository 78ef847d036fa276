//! Multivalued geometrical-optics (WKB) solutions of linear dispersive
//! equations.
//!
//! Rays are traced through the Hamiltonian flow of a symbol H(x, ξ); the
//! multivalued limit at a point (x, t) is rebuilt from the zeros of
//! f_{x,t}(ξ) = ξ̃(−t, x, ξ) − ∇S_I(x̃(−t, x, ξ)), each of which carries a
//! phase, a density and a functional determinant. Caustics are located where
//! that determinant vanishes and classified as hot or cool by the mass
//! concentrated there. A finite-ε spectral solver with discrete Wigner and
//! Husimi transforms serves as an independent oracle for the ε → 0 limit.

pub mod branches;
pub mod cli;
pub mod error;
pub mod expr;
pub mod flow;
pub mod fluid;
pub mod quad;
pub mod symbols;
pub mod wigner;

pub use error::{Error, Result};
