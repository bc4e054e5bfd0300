//! Sparse Fourier transforms driven by number-theoretic aliasing.
//!
//! A periodic signal is sampled on a handful of equispaced grids whose
//! lengths are pairwise coprime. Each grid DFT folds the spectrum onto a
//! residue class, and the folded values are combined by medians (to estimate
//! coefficients) and by the Chinese remainder theorem (to locate
//! frequencies). The crate is `no_std` with `alloc`; the `std` feature is
//! only needed for the optional `parallel` backend.
//!
//! Module map:
//! - [`primes`]: modulus selection and row-count bounds
//! - [`crt`]: residue arithmetic and band-aware reconstruction
//! - [`measurement`]: implicit measurement plans (flat, randomized, tensor)
//! - [`sampling`]: signal oracles, arbitrary-length DFT, aliased spectra
//! - [`recovery`]: median estimation and the two approximation algorithms
//! - [`multidim`]: reduction of `D`-variate signals to one dimension
//! - [`oracle`]: dense reference transforms and error-bound checks
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;

pub mod band;
pub mod crt;
pub mod dft;
pub mod measurement;
pub mod multidim;
pub mod oracle;
pub mod primes;
pub mod recovery;
pub mod sampling;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;
