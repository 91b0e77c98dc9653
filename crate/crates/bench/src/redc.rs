//! Radix-2 bit-serial Montgomery reduction, a second reference used to
//! spot-check generated vectors. Shares nothing with the word-level code
//! or with the modular-inverse oracle.

use montsim::field::{bls12_381_modulus, OPERAND_BITS};
use num_bigint::BigUint;
use num_traits::Zero;

use crate::vectors::TestVector;

/// `a * b * 2^-384 mod p` for `a, b < p`, canonical.
pub fn montmul(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    let mut t = BigUint::zero();
    for i in 0..OPERAND_BITS as u64 {
        if a.bit(i) {
            t += b;
        }
        if t.bit(0) {
            t += p;
        }
        t >>= 1u32;
    }
    if &t >= p {
        t -= p;
    }
    t
}

pub fn from_montgomery(x: &BigUint, p: &BigUint) -> BigUint {
    montmul(x, &BigUint::from(1u32), p)
}

/// Indices among the first `n` vectors whose expected values disagree
/// with this reduction.
pub fn spot_check(vectors: &[TestVector], n: usize) -> Vec<usize> {
    let p = bls12_381_modulus();
    vectors
        .iter()
        .take(n)
        .enumerate()
        .filter(|(_, v)| {
            let mont = montmul(&v.a, &v.b, &p);
            mont != v.expected_mont || from_montgomery(&mont, &p) != v.expected_field || v.expected_field >= p
        })
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::generate;

    #[test]
    fn one_in_montgomery_form_round_trips() {
        let p = bls12_381_modulus();
        let r_mod_p = (BigUint::from(1u32) << OPERAND_BITS) % &p;
        assert_eq!(from_montgomery(&r_mod_p, &p), BigUint::from(1u32));
        assert_eq!(montmul(&r_mod_p, &r_mod_p, &p), r_mod_p);
    }

    #[test]
    fn small_modulus_by_hand() {
        // 2^-384 mod 13: 2^12 = 1 mod 13, so 2^-384 = 1 and the result is a*b mod 13.
        let p = BigUint::from(13u32);
        for a in 0..13u32 {
            for b in 0..13u32 {
                let got = montmul(&BigUint::from(a), &BigUint::from(b), &p);
                assert_eq!(got, BigUint::from(a * b % 13));
            }
        }
    }

    #[test]
    fn agrees_with_generated_vectors() {
        let mut vectors = generate(11, 100);
        assert!(spot_check(&vectors, 100).is_empty());
        vectors[7].expected_mont += 1u32;
        assert_eq!(spot_check(&vectors, 100), [7]);
    }
}
