use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::element::{split_words, FieldElement, WordSize, OPERAND_BITS};
use crate::error::FieldError;

/// Base field modulus of BLS12-381 (381 bits).
pub const BLS12_381_MODULUS_HEX: &str =
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab";

/// Precomputed constants for Montgomery arithmetic with radix `R = 2^384`.
#[derive(Clone, Debug)]
pub struct MontgomeryParams {
    word: WordSize,
    modulus: FieldElement,
    two_modulus: FieldElement,
    modulus_big: BigUint,
    p_prime: u64,
    r_mod_p: FieldElement,
    r2_mod_p: FieldElement,
    r_inv: FieldElement,
    one: FieldElement,
}

/// Returns `-p^{-1} mod 2^bits` for odd `p`, using Newton iteration on the
/// 2-adic inverse. `bits` must be in `1..=64`.
pub fn neg_inverse_pow2(p: u64, bits: u32) -> u64 {
    assert!(p & 1 == 1, "p must be odd");
    assert!((1..=64).contains(&bits), "bits must be in 1..=64");
    // p * p == 1 mod 8, so p is its own inverse to 3 bits; each step doubles.
    let mut inv = p;
    for _ in 0..5 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
    }
    debug_assert_eq!(p.wrapping_mul(inv), 1);
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    inv.wrapping_neg() & mask
}

pub fn compute_params(p: &BigUint, word: WordSize) -> Result<MontgomeryParams, FieldError> {
    if p <= &BigUint::from(2u32) {
        return Err(FieldError::ModulusTooSmall);
    }
    if p.bits() > OPERAND_BITS as u64 {
        return Err(FieldError::ModulusTooLarge);
    }
    if !p.bit(0) {
        return Err(FieldError::EvenModulus);
    }
    let r = BigUint::one() << OPERAND_BITS;
    let low = p.iter_u64_digits().next().unwrap_or(0);
    let p_prime = neg_inverse_pow2(low, word.bits());
    let r_mod_p = &r % p;
    let r2_mod_p = (&r_mod_p * &r_mod_p) % p;
    let r_inv = r_mod_p.modinv(p).expect("odd modulus is coprime with a power of two");
    let two_p = p << 1u32;
    let two_modulus = if two_p.bits() > OPERAND_BITS as u64 {
        // 2p does not fit; use R - 1 as the saturated bound.
        split_words(&(&r - 1u32), word)?
    } else {
        split_words(&two_p, word)?
    };

    let params = MontgomeryParams {
        word,
        modulus: split_words(p, word)?,
        two_modulus,
        modulus_big: p.clone(),
        p_prime,
        r_mod_p: split_words(&r_mod_p, word)?,
        r2_mod_p: split_words(&r2_mod_p, word)?,
        r_inv: split_words(&r_inv, word)?,
        one: split_words(&BigUint::one(), word)?,
    };
    debug_assert!(params.self_check().is_ok());
    Ok(params)
}

/// BLS12-381 parameters for one word size, built once and self-checked.
pub fn bls12_381(word: WordSize) -> &'static MontgomeryParams {
    static CACHE: [OnceLock<MontgomeryParams>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let idx = match word {
        WordSize::W24 => 0,
        WordSize::W32 => 1,
        WordSize::W64 => 2,
    };
    CACHE[idx].get_or_init(|| {
        let p = bls12_381_modulus();
        assert_eq!(p.bits(), 381, "BLS12-381 modulus is 381 bits");
        let params = compute_params(&p, word).expect("BLS12-381 parameters are valid");
        params
            .self_check()
            .expect("BLS12-381 parameters satisfy the Montgomery invariants");
        assert!(
            params.radix_exceeds_four_p(),
            "R > 4p is required to skip the final subtraction"
        );
        params
    })
}

pub fn bls12_381_modulus() -> BigUint {
    BigUint::parse_bytes(BLS12_381_MODULUS_HEX.as_bytes(), 16).expect("valid hex constant")
}

impl MontgomeryParams {
    pub fn word(&self) -> WordSize {
        self.word
    }

    pub fn limbs(&self) -> usize {
        self.word.limbs()
    }

    pub fn modulus(&self) -> &FieldElement {
        &self.modulus
    }

    pub fn modulus_big(&self) -> &BigUint {
        &self.modulus_big
    }

    /// `2p`, the bound of the non-canonical result range.
    pub fn two_modulus(&self) -> &FieldElement {
        &self.two_modulus
    }

    /// `p'` with `p * p' == -1 mod 2^w`.
    pub fn p_prime(&self) -> u64 {
        self.p_prime
    }

    /// Montgomery form of 1.
    pub fn r_mod_p(&self) -> &FieldElement {
        &self.r_mod_p
    }

    pub fn r2_mod_p(&self) -> &FieldElement {
        &self.r2_mod_p
    }

    pub fn r_inv(&self) -> &FieldElement {
        &self.r_inv
    }

    /// Plain integer 1 (not in Montgomery form).
    pub fn one(&self) -> &FieldElement {
        &self.one
    }

    pub fn radix_exceeds_four_p(&self) -> bool {
        (&self.modulus_big << 2u32).bits() <= OPERAND_BITS as u64
    }

    /// Re-verifies every invariant of the parameter set.
    pub fn self_check(&self) -> Result<(), String> {
        let p = &self.modulus_big;
        let r = BigUint::one() << OPERAND_BITS;
        if !p.bit(0) {
            return Err("modulus is even".into());
        }
        if p >= &r {
            return Err("modulus is not below R".into());
        }
        let w_mod = BigUint::one() << self.word.bits();
        if !((p * BigUint::from(self.p_prime) + 1u32) % &w_mod).is_zero() {
            return Err("p * p' + 1 is not divisible by 2^w".into());
        }
        if (&r * self.r_inv.to_biguint()) % p != BigUint::one() {
            return Err("R * R^-1 is not 1 mod p".into());
        }
        if self.r_mod_p.to_biguint() != &r % p {
            return Err("R mod p mismatch".into());
        }
        if self.r2_mod_p.to_biguint() != (&r * &r) % p {
            return Err("R^2 mod p mismatch".into());
        }
        Ok(())
    }
}
