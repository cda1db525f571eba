//! Finite residuated lattices, finite topological spaces, and bundles and
//! étalé spaces of residuated lattices over them.

#![allow(clippy::needless_range_loop)]

pub mod adjunction;
pub mod basechange;
pub mod bits;
pub mod bundle;
pub mod error;
pub mod fintop;
pub mod fixtures;
pub mod random;
pub mod rlcore;
pub mod sheafify;
pub mod spectra;

pub use bits::BitSet;
pub use error::{Error, Result};
