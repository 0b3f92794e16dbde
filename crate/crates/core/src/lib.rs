//! Desk-scale numerical verification of a family of sharp Sobolev and
//! Hardy-Littlewood-Sobolev inequalities tied to the Grushin operator and
//! the geometry of the upper half-plane.
//!
//! The crate is organized around the chain of reductions that connects the
//! planar Grushin embedding to hyperbolic and spherical Sobolev inequalities:
//!
//! * [`geometry`] - the half-plane model, its distance and group action;
//! * [`quadrature`] - adaptive double-exponential integration and numeric
//!   differentiation, the foundation for every functional here;
//! * [`profiles`] - closed-form test families (power laws, Grushin
//!   extremals, bumps) carrying analytic derivatives and decay hints;
//! * [`functionals`] - norms, Dirichlet forms and inequality quotients on
//!   all four geometries;
//! * [`reductions`] - the change-of-variables steps, each verified by
//!   residuals between independently computed sides;
//! * [`specialfn`] - gamma, beta, the diagonal Gauss hypergeometric
//!   function, and the fundamental solution psi_s in two representations;
//! * [`potential`] - the operator L_s, the fractional integral I_s as a
//!   half-plane convolution, and the sharp HLS quotient;
//! * [`variational`] - Euler-Lagrange residuals, epsilon-family limit scans
//!   and derivative-free quotient maximization;
//! * [`rearrange`] - discrete decreasing and symmetric-decreasing
//!   rearrangements with the properties the proofs invoke.

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod interp;
pub mod potential;
pub mod profiles;
pub mod quadrature;
pub mod rearrange;
pub mod reductions;
pub mod specialfn;
pub mod variational;

pub use error::{Error, Result};
pub use functionals::{CheckReport, QuotientReport, SpectralParams};
pub use geometry::{GroupElement, HalfPlanePoint};
pub use profiles::{GrushinProfile, HalfPlaneProfile, RadialProfile};
pub use quadrature::{DecayHint, QuadratureResult, Singularity};
