//! Dynamical elliptic R-matrix on `C^3 (x) C^3`, its q-difference Lax algebra,
//! the algebraic Bethe ansatz for the associated spin chain, and residual
//! checks for every identity the construction relies on.
//!
//! The guide in `book/` walks through the layers; its snippets run as doctests.

pub mod bethe;
pub mod cli;
pub mod error;
pub mod laxrep;
pub mod linalg;
pub mod rmatrix;
pub mod sampling;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use theta::C64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/rmatrix.md")]
    mod rmatrix {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/bethe.md")]
    mod bethe {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
