//! Filtered Khovanov homology over rational Frobenius algebras.

pub mod algebra;
pub mod canonical;
pub mod cli;
pub mod cobordism;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod exactla;
pub mod homology;
pub mod spectral;

pub use error::{Error, Result};

/// Cube edge signs used by every differential and cobordism map.
pub const SIGN_CONVENTION: &str = "alternating: (-1)^(1-bits before the changed crossing)";

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
