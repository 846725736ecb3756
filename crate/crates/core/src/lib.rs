//! Core model of report design and belief impact in an information
//! dissemination network with a truth-distance authentication filter.
//!
//! The pieces, bottom to top:
//!
//! - [`linalg`]: small dense vectors/matrices and SPD Cholesky solves.
//! - [`belief`]: Gaussian viewers, posterior gains, linear belief updates,
//!   and conveyance distances.
//! - [`reporter`]: population belief moments and the optimal (possibly
//!   exaggerated) report under the filter constraint.
//! - [`policy`]: the admission predicate, separation/permissiveness
//!   utilities, and filter-radius optimization.
//! - [`simulation`]: scenario samplers, audience conditioning, and seeded
//!   epsilon-sweep experiments.
//! - [`oracle`]: brute-force solvers that independently validate the
//!   closed-form optimizer.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the command
//! line live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod belief;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod policy;
pub mod reporter;
pub mod simulation;

pub use error::Error;
