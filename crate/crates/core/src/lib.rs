//! Preorders on finitely supported lotteries over a metric space.

pub mod choice;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod parallel;
pub mod portfolio;
pub mod preorder;
pub mod random;
pub mod selftest;
pub mod separation;
pub mod solver;
pub mod space;
pub mod stochastic;
pub mod tolerance;
pub mod uncertainty;
pub mod transport;

pub use error::{Error, Result};

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/index.md")]
    mod index {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/preorders.md")]
    mod preorders {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/stochastic.md")]
    mod stochastic {}
    #[doc = include_str!("../../../book/src/choice.md")]
    mod choice {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/portfolio.md")]
    mod portfolio {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
