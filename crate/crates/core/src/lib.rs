//! Random walks on hyperbolic groups.
//!
//! Two concrete geometries (the Cayley tree of a free group and the
//! hyperbolic half-plane with a Fuchsian group) sit behind one set of
//! types. On top of them the crate samples random-walk trajectories and
//! approximate harmonic-measure samples, and estimates the rate of escape,
//! the asymptotic entropy and the dimension of the harmonic measure.

pub mod boundary_lab;
pub mod error;
pub mod estimators;
pub mod measure;
pub mod rng;
pub mod space;
pub mod stats;
pub mod walker;

/// Version of this crate, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use measure::{FiniteMeasure, MuKFamily};
pub use space::{BoundaryPoint, GroupElement, SpaceModel, SpacePoint};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/dimension.md")]
    mod dimension {}
    #[doc = include_str!("../../../book/src/mu_k.md")]
    mod mu_k {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
