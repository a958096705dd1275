//! Exact counting of submodules of `R^n` over finite chain rings, the
//! densities of free submodules, Andrews-Gordon type limit series, and
//! random-code experiments over `Z/p^s`.
//!
//! Every finite count or probability is an exact big integer or big
//! rational. Infinite products and series are returned as [`ApproxReal`]
//! values that carry a certified absolute error bound.

pub mod cli;
pub mod coding;
pub mod density;
pub mod error;
pub mod modcount;
pub mod qseries;
pub mod render;
pub mod sim;

pub use error::{Error, Result};
pub use modcount::{ChainRingSpec, ModuleTypeCounts, Shape};
pub use qseries::{ApproxReal, ExactCount, ExactRatio, TruncationPolicy};
pub use sim::{ConcreteRing, RingMatrix, TypeCensus};
