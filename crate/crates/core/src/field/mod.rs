//! Functional CIOS Montgomery arithmetic for the BLS12-381 base field.
//!
//! Values live in `[0, 2p)` between operations; the final conditional
//! subtraction is left to [`canonicalize`].

mod arith;
mod element;
mod params;

pub use arith::{
    add_limbs, canonicalize, cios_inner_loop, cios_montmul, from_montgomery, mont_add, mont_sub, sub_limbs,
    to_montgomery,
};
pub use element::{
    join_words, split_words, FieldElement, WordSize, MAX_LIMBS, OPERAND_BITS, OPERAND_BYTES, OPERAND_HEX_DIGITS,
};
pub use params::{
    bls12_381, bls12_381_modulus, compute_params, neg_inverse_pow2, MontgomeryParams, BLS12_381_MODULUS_HEX,
};
