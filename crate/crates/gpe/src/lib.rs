//! Ground and excited states of Bose-Einstein condensates.
//!
//! This crate minimizes discretized Gross-Pitaevskii energy functionals
//! over the unit sphere. It provides:
//!
//! - uniform tensor-product grids with Dirichlet or periodic boundaries
//!   ([`grid`]),
//! - finite difference, sine pseudospectral and Fourier pseudospectral
//!   energy evaluators, including rotation ([`problem`]),
//! - a feasible gradient method with Barzilai-Borwein steps and a
//!   nonmonotone curvilinear line search ([`gradient`]),
//! - a regularized Newton method with trust-region safeguards and a
//!   cascadic multigrid driver ([`newton`]),
//! - initial data (Thomas-Fermi, Gaussian and vortex ansatzes) and
//!   physical observables ([`init`], [`observables`]),
//! - a small binary grid-data format for states ([`io`]).
//!
//! A quick 1D ground state:
//!
//! ```
//! use gpe::{BoundaryKind, DiscreteProblem, Domain, Grid, Potential};
//! use gpe::gradient::{gradient_descent, GradParams};
//! use gpe::init::{initial_state, InitKind};
//!
//! let domain = Domain::new(&[(-16.0, 16.0)], BoundaryKind::Dirichlet)?;
//! let grid = Grid::build(domain, &[128])?;
//! let problem = DiscreteProblem::sine_spectral(
//!     grid,
//!     Potential::Harmonic { gammas: vec![1.0] },
//!     400.0,
//! )?;
//! let x0 = initial_state(&InitKind::ThomasFermi, &problem)?;
//! let (state, report) = gradient_descent(&problem, &x0, &GradParams::default())?;
//! assert!(report.converged);
//! assert!((report.energy - 21.36).abs() < 0.01);
//! assert!(state.norm_error() < 1e-13);
//! # Ok::<(), gpe::Error>(())
//! ```
//!
//! The `book/` directory of the repository walks through the method; its
//! code listings compile as doc-tests of this crate.

pub mod error;
pub mod field;
pub mod gradient;
pub mod grid;
pub mod init;
pub mod io;
pub mod newton;
pub mod observables;
pub mod potential;
pub mod problem;
pub mod report;
pub mod transforms;

pub use error::{Error, Result};
pub use field::Field;
pub use gradient::{gradient_descent, GradParams};
pub use grid::{BoundaryKind, Domain, Grid};
pub use init::{initial_state, InitKind};
pub use newton::{cascadic_solve, newton_solve, NewtonParams};
pub use potential::Potential;
pub use problem::{DiscreteProblem, Flavor, Objective, StateVector};
pub use report::{SolveReport, StopReason, TraceRecord};

// The book chapters double as doc-tests so their listings stay honest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/discretization.md")]
    mod discretization {}
    #[doc = include_str!("../../../book/src/gradient-method.md")]
    mod gradient_method {}
    #[doc = include_str!("../../../book/src/regularized-newton.md")]
    mod regularized_newton {}
    #[doc = include_str!("../../../book/src/initial-data.md")]
    mod initial_data {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
