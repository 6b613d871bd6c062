//! Bidirectional macro schemes for Thue–Morse words.
//!
//! The crate covers the whole pipeline around `t_n = μⁿ(a)`:
//!
//! - [`words`]: Thue–Morse words, the morphism and structural checks;
//! - [`schemes`]: the scheme model, its source function, validation and the
//!   text file format;
//! - [`construct`]: valid schemes of size `n + 2`;
//! - [`reduce`]: turning a scheme for `t_n` into one for `t_(n-1)`;
//! - [`solve`]: exact smallest schemes and attractors for short words;
//! - [`measures`]: δ, LZ77, BWT runs and the combined report.

pub mod construct;
pub mod error;
pub mod fuzz;
pub mod measures;
pub mod reduce;
pub mod schemes;
pub mod solve;
pub mod words;

mod sam;
mod suffix_array;

pub use error::{Error, Result};
pub use schemes::{MacroScheme, Phrase, ValidityVerdict};
pub use words::{thue_morse, Word};
