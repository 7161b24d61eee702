//! Joint Wigner distributions for tuples of hermitian operators.
//!
//! Given hermitian matrices `A_1, ..., A_n` and a density matrix `rho`, there
//! is a unique tempered distribution on R^n whose marginal along every
//! direction `xi` reproduces the spectral distribution of `xi . A` in the
//! state `rho`. Its Fourier transform is the characteristic function
//! `phi(xi) = tr(rho exp(i xi . A))`, which is what this crate computes and
//! inverts.
//!
//! The crate covers:
//!
//! - [`operators`]: operator tuples, states, spin and Pauli families,
//!   seeded random instances, eigendecomposition.
//! - [`charfn`]: characteristic-function evaluation at points and on
//!   centered lattices, plus the qubit closed form.
//! - [`wigner`]: Gaussian-regularized distributions on grids by damped
//!   inverse FFT, exact and transform-based marginals.
//! - [`geometry`]: joint numerical range sampling, singular sets and
//!   Kippenhahn curves, commuting-case point masses, near-commuting
//!   ellipse predictions.
//! - [`moments`]: Weyl-ordered operator moments and their transform and
//!   grid counterparts.
//! - [`analysis`]: symmetry covariance checks, block reduction,
//!   informational-completeness rank reports, qubit shell diagnostics.
//! - [`io`] / [`render`] / [`cli`]: file formats, heatmap rendering, and
//!   the command-line front end.
//!
//! See the crate examples for runnable walkthroughs of each capability.

pub mod analysis;
pub mod charfn;
pub mod cli;
pub mod error;
mod fft;
pub mod geometry;
pub mod io;
pub mod moments;
pub mod operators;
pub mod render;
pub mod wigner;

pub use error::{Error, Result};
