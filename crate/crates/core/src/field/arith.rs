use super::element::{FieldElement, WordSize, MAX_LIMBS};
use super::params::MontgomeryParams;
use crate::error::FieldError;

/// One CIOS inner loop over the live window `t[i..=i+s]`:
///
/// ```text
/// for j in 0..s: (carry, t[i+j]) = a[j] * b + t[i+j] + carry
/// t[i+s] = t[i+s] + carry
/// ```
///
/// `window` holds `s + 1` limbs. The final add keeps only the low `w` bits,
/// exactly like the hardware word register.
pub fn cios_inner_loop(a: &[u64], b: u64, window: &mut [u64], word: WordSize) {
    let s = a.len();
    debug_assert_eq!(window.len(), s + 1);
    let bits = word.bits();
    let mask = word.mask() as u128;
    let mut carry: u128 = 0;
    for (t, &aj) in window[..s].iter_mut().zip(a) {
        let v = aj as u128 * b as u128 + *t as u128 + carry;
        *t = (v & mask) as u64;
        carry = v >> bits;
    }
    window[s] = ((window[s] as u128 + carry) & mask) as u64;
}

/// Coarsely integrated operand scanning Montgomery product `a * b * R^-1`.
///
/// No final conditional subtraction is performed: for inputs below `2p`
/// the result is below `2p` (because `R > 4p`) and congruent to
/// `a * b * R^-1 mod p`. Use [`canonicalize`] to map into `[0, p)`.
pub fn cios_montmul(a: &FieldElement, b: &FieldElement, params: &MontgomeryParams) -> FieldElement {
    let word = params.word();
    let s = word.limbs();
    debug_assert_eq!(a.word(), word);
    debug_assert_eq!(b.word(), word);
    let mut t = [0u64; 2 * MAX_LIMBS];
    let p = params.modulus().limbs();
    let a = a.limbs();
    for (i, &bi) in b.limbs().iter().enumerate() {
        cios_inner_loop(a, bi, &mut t[i..=i + s], word);
        let m = t[i].wrapping_mul(params.p_prime()) & word.mask();
        cios_inner_loop(p, m, &mut t[i..=i + s], word);
        debug_assert_eq!(t[i], 0, "reduction must clear t[i]");
    }
    FieldElement::from_limbs_unchecked(word, &t[s..2 * s])
}

pub fn to_montgomery(a: &FieldElement, params: &MontgomeryParams) -> FieldElement {
    cios_montmul(a, params.r2_mod_p(), params)
}

/// Leaves the Montgomery domain; the result is canonical (`< p`).
pub fn from_montgomery(a_bar: &FieldElement, params: &MontgomeryParams) -> FieldElement {
    let u = cios_montmul(a_bar, params.one(), params);
    // a_bar < R and 1 give u <= (R - 1 + (R - 1) p) / R < p + 1.
    canonicalize(&u, params).expect("product with 1 is below 2p")
}

/// Maps `u < 2p` into `[0, p)` with at most one subtraction.
pub fn canonicalize(u: &FieldElement, params: &MontgomeryParams) -> Result<FieldElement, FieldError> {
    if u >= params.two_modulus() {
        return Err(FieldError::BoundViolation);
    }
    if u >= params.modulus() {
        let (d, borrow) = sub_limbs(u, params.modulus());
        debug_assert!(!borrow);
        Ok(d)
    } else {
        Ok(*u)
    }
}

/// `a + b`, reduced by `2p` when the sum reaches `2p`. Inputs below `2p`
/// give an output below `2p`.
pub fn mont_add(a: &FieldElement, b: &FieldElement, params: &MontgomeryParams) -> FieldElement {
    let (sum, carry) = add_limbs(a, b);
    if carry || &sum >= params.two_modulus() {
        sub_limbs(&sum, params.two_modulus()).0
    } else {
        sum
    }
}

/// `a - b`, adding `2p` back when the difference is negative.
pub fn mont_sub(a: &FieldElement, b: &FieldElement, params: &MontgomeryParams) -> FieldElement {
    let (diff, borrow) = sub_limbs(a, b);
    if borrow {
        add_limbs(&diff, params.two_modulus()).0
    } else {
        diff
    }
}

/// Limb-wise addition modulo `2^384`, returning the carry out.
pub fn add_limbs(a: &FieldElement, b: &FieldElement) -> (FieldElement, bool) {
    let word = a.word();
    debug_assert_eq!(word, b.word());
    let bits = word.bits();
    let mask = word.mask() as u128;
    let mut out = [0u64; MAX_LIMBS];
    let mut carry = 0u128;
    for (o, (&x, &y)) in out.iter_mut().zip(a.limbs().iter().zip(b.limbs())) {
        let v = x as u128 + y as u128 + carry;
        *o = (v & mask) as u64;
        carry = v >> bits;
    }
    (
        FieldElement::from_limbs_unchecked(word, &out[..word.limbs()]),
        carry != 0,
    )
}

/// Limb-wise subtraction modulo `2^384`, returning the borrow out.
pub fn sub_limbs(a: &FieldElement, b: &FieldElement) -> (FieldElement, bool) {
    let word = a.word();
    debug_assert_eq!(word, b.word());
    let bits = word.bits();
    let mask = word.mask() as u128;
    let mut out = [0u64; MAX_LIMBS];
    let mut borrow = 0u128;
    for (o, (&x, &y)) in out.iter_mut().zip(a.limbs().iter().zip(b.limbs())) {
        let v = (x as u128 | (1u128 << bits)) - y as u128 - borrow;
        *o = (v & mask) as u64;
        borrow = if v >> bits == 0 { 1 } else { 0 };
    }
    (
        FieldElement::from_limbs_unchecked(word, &out[..word.limbs()]),
        borrow != 0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::params::bls12_381;
    use crate::field::split_words;
    use num_bigint::BigUint;

    fn fe(x: u64, w: WordSize) -> FieldElement {
        split_words(&BigUint::from(x), w).unwrap()
    }

    #[test]
    fn zero_annihilates() {
        for w in WordSize::ALL {
            let params = bls12_381(w);
            let x = params.r2_mod_p();
            assert!(cios_montmul(&FieldElement::zero(w), x, params).is_zero());
            assert!(cios_montmul(x, &FieldElement::zero(w), params).is_zero());
        }
    }

    #[test]
    fn montgomery_one_is_identity() {
        for w in WordSize::ALL {
            let params = bls12_381(w);
            let x = fe(0xdead_beef_1234, w);
            let y = cios_montmul(params.r_mod_p(), &x, params);
            assert_eq!(canonicalize(&y, params).unwrap(), x);
        }
    }

    #[test]
    fn conversions_of_small_values() {
        for w in WordSize::ALL {
            let params = bls12_381(w);
            assert!(to_montgomery(&FieldElement::zero(w), params).is_zero());
            let one_bar = to_montgomery(params.one(), params);
            assert_eq!(canonicalize(&one_bar, params).unwrap(), *params.r_mod_p());
            assert!(from_montgomery(&FieldElement::zero(w), params).is_zero());
            assert_eq!(from_montgomery(params.r_mod_p(), params), *params.one());
        }
    }

    #[test]
    fn canonicalize_edges() {
        let params = bls12_381(WordSize::W32);
        let p = *params.modulus();
        let five = fe(5, WordSize::W32);
        assert_eq!(canonicalize(&five, params).unwrap(), five);
        assert!(canonicalize(&p, params).unwrap().is_zero());
        let p5 = add_limbs(&p, &five).0;
        assert_eq!(canonicalize(&p5, params).unwrap(), five);
        assert_eq!(
            canonicalize(params.two_modulus(), params),
            Err(FieldError::BoundViolation)
        );
    }

    #[test]
    fn add_sub_identities() {
        for w in WordSize::ALL {
            let params = bls12_381(w);
            let x = sub_limbs(params.two_modulus(), &fe(1, w)).0;
            assert_eq!(mont_add(&x, &FieldElement::zero(w), params), x);
            let d = mont_sub(&x, &x, params);
            assert!(canonicalize(&d, params).unwrap().is_zero());
            // 2p - 1 + 2p - 1 wraps back under 2p
            let s = mont_add(&x, &x, params);
            assert!(&s < params.two_modulus());
        }
    }

    #[test]
    fn inner_loop_zero_multiplier_is_identity() {
        let w = WordSize::W32;
        let a = [0xffff_ffffu64; 12];
        let mut window = [7u64; 13];
        cios_inner_loop(&a, 0, &mut window, w);
        assert_eq!(window, [7u64; 13]);
    }
}
