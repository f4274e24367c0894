//! Planewave (Fourier-Galerkin) methods for 2π-periodic Schrödinger problems
//! with analytic potentials.
//!
//! The crate is organised bottom-up:
//!
//! * [`fourier`]: truncated Fourier series, analyticity-strip norms, exact
//!   products and strip-width estimation from coefficient decay.
//! * [`linear`]: the linear source problem `−Δu + Vu = f`.
//! * [`eigen`]: the Galerkin eigenproblem for `−Δ + V` and convergence studies.
//! * [`nonlinear`]: the cubic problem `−εΔu + u + u³ = μ sin x` and its
//!   closed-form `ε = 0` limit.
//! * [`blowup`]: imaginary-axis ODE analysis and comparison bounds.
//! * [`bloch`]: lattices, Bloch fibers and band structures in `d ≤ 3`.
//!
//! Sweeps over cutoffs, quasimomenta and parameters go through
//! [`exec::Execution`], which runs on rayon when the `parallel` feature is on.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod blowup;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod fit;
pub mod format;
pub mod fourier;
pub mod linalg;
pub mod linear;
pub mod nonlinear;
pub mod ode;
pub mod potential;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fourier::FourierSeries1D;
