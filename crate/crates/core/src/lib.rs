//! Relational static analysis with the octagon abstract domain.
//!
//! The crate is layered bottom-up: exact [`numeric`] bounds, plain
//! difference-bound matrices in [`dbm`], the [`octagon`] domain with its
//! closure and transfer functions, a small imperative language in [`lang`],
//! and the forward [`analyzer`] with its [`report`] rendering.

pub mod analyzer;
pub mod dbm;
pub mod lang;
pub mod numeric;
pub mod octagon;
pub mod report;
