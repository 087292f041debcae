//! Cayley graphs over the additive group of Galois rings GR(p^e, p^(er)).
//!
//! The connection set is the Teichmüller group G₁ (for odd p) or G₁ ∪ −G₁
//! (for p = 2), optionally twisted by a unit γ. Spectra are computed exactly
//! from additive character sums and cross-checked against a dense
//! eigensolver; [`analysis`] checks the known spectral, girth, connectivity
//! and energy statements instance by instance.

pub mod analysis;
pub mod cayley;
pub mod error;
pub mod fp_poly;
pub mod gaussian;
pub mod modular;
pub mod report;
pub mod ring;
pub mod spectrum;

pub use error::{Error, Result};
