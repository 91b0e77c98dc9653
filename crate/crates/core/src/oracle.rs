//! Arbitrary-precision reference arithmetic, independent of the limb code.

use num_bigint::BigUint;
use num_traits::One;

use crate::field::OPERAND_BITS;

/// Reference Montgomery arithmetic over plain big integers.
#[derive(Clone, Debug)]
pub struct Oracle {
    p: BigUint,
    r_mod_p: BigUint,
    r_inv: BigUint,
}

impl Oracle {
    pub fn new(p: &BigUint) -> Self {
        let r = BigUint::one() << OPERAND_BITS;
        let r_mod_p = &r % p;
        let r_inv = r_mod_p.modinv(p).expect("modulus coprime with R");
        Oracle {
            p: p.clone(),
            r_mod_p,
            r_inv,
        }
    }

    pub fn bls12_381() -> Self {
        Self::new(&crate::field::bls12_381_modulus())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    /// `a * b * R^-1 mod p`, canonical.
    pub fn montmul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b % &self.p) * &self.r_inv % &self.p
    }

    pub fn to_montgomery(&self, a: &BigUint) -> BigUint {
        a * &self.r_mod_p % &self.p
    }

    pub fn from_montgomery(&self, a: &BigUint) -> BigUint {
        a * &self.r_inv % &self.p
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.p
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let a = a % &self.p;
        let b = b % &self.p;
        (a + &self.p - b) % &self.p
    }
}
