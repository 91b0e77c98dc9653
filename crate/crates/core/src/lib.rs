//! Montgomery multiplication for the BLS12-381 base field together with
//! cycle-accurate behavioral models of DSP-based hardware multipliers.
//!
//! The crate is split into a functional golden model ([`field`]), the DSP
//! slice and word arithmetic units ([`dsp`]), the full multiplier designs
//! ([`designs`]) and the Karatsuba word multipliers ([`karatsuba`]). Every
//! simulated design is checked bit-for-bit against [`field::cios_montmul`],
//! which in turn is checked against the arbitrary-precision [`oracle`].

pub mod designs;
pub mod dsp;
pub mod error;
pub mod field;
pub mod karatsuba;
pub mod oracle;
pub mod trace;

pub use error::{DesignError, DspError, FieldError};
pub use field::{FieldElement, MontgomeryParams, WordSize};
