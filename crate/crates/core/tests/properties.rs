use num_bigint::BigUint;
use proptest::prelude::*;

use montsim::dsp::{ChainPlan, ClockedUnit, Madd384Input, Madd384Output, Madd384Unit};
use montsim::field::{bls12_381, cios_inner_loop, cios_montmul, mont_add, mont_sub, MAX_LIMBS};
use montsim::karatsuba::karatsuba;
use montsim::oracle::Oracle;
use montsim::{FieldElement, WordSize};

fn word() -> impl Strategy<Value = WordSize> {
    prop_oneof![Just(WordSize::W24), Just(WordSize::W32), Just(WordSize::W64)]
}

/// Values below 2p, drawn as raw 384-bit words and reduced.
fn below_two_p() -> impl Strategy<Value = BigUint> {
    proptest::array::uniform6(any::<u64>()).prop_map(|words| {
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        let two_p = bls12_381(WordSize::W64).modulus_big() * 2u32;
        BigUint::from_bytes_le(&bytes) % two_p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn montmul_congruent_and_bounded(w in word(), a in below_two_p(), b in below_two_p()) {
        let params = bls12_381(w);
        let oracle = Oracle::bls12_381();
        let r = cios_montmul(
            &FieldElement::from_biguint(&a, w).unwrap(),
            &FieldElement::from_biguint(&b, w).unwrap(),
            params,
        );
        let big = r.to_biguint();
        prop_assert!(big < params.modulus_big() * 2u32);
        prop_assert_eq!(big % params.modulus_big(), oracle.montmul(&a, &b));
    }

    #[test]
    fn add_sub_stay_below_two_p(w in word(), a in below_two_p(), b in below_two_p()) {
        let params = bls12_381(w);
        let p = params.modulus_big();
        let fa = FieldElement::from_biguint(&a, w).unwrap();
        let fb = FieldElement::from_biguint(&b, w).unwrap();
        let sum = mont_add(&fa, &fb, params).to_biguint();
        let diff = mont_sub(&fa, &fb, params).to_biguint();
        prop_assert!(sum < p * 2u32 && diff < p * 2u32);
        prop_assert_eq!(&sum % p, (&a + &b) % p);
        prop_assert_eq!((&diff + &b) % p, &a % p);
    }

    #[test]
    fn cascade_equals_multiply_add(w in word(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let m = w.mask();
        let (a, b, c) = (a & m, b & m, c & m);
        let (v, _) = ChainPlan::new(w, true).evaluate(a, b, c);
        prop_assert_eq!(v, a as u128 * b as u128 + c as u128);
        let (v, _) = ChainPlan::new(w, false).evaluate(a, b, 0);
        prop_assert_eq!(v, a as u128 * b as u128);
    }

    #[test]
    fn madd64_partials_sum_to_result(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        // Each emitting cell contributes 17 bits at its column offset.
        let plan = ChainPlan::new(WordSize::W64, true);
        let (v, partials) = plan.evaluate(a, b, c);
        let mut acc = 0u128;
        for (cell, p) in plan.cells().iter().zip(&partials) {
            if let Some((lo, width)) = cell.emits {
                let bits = if width == 0 { *p as u128 } else { (*p as u128) & ((1 << width) - 1) };
                acc |= bits << lo;
            }
        }
        prop_assert_eq!(acc, v);
        prop_assert_eq!(v, a as u128 * b as u128 + c as u128);
    }

    #[test]
    fn karatsuba_is_schoolbook(a in any::<u64>(), b in any::<u64>()) {
        prop_assert_eq!(karatsuba(a as u128, b as u128, 64, 2), a as u128 * b as u128);
        let (a, b) = (a as u32 as u128, b as u32 as u128);
        prop_assert_eq!(karatsuba(a, b, 32, 1), a * b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn madd384_is_one_inner_loop(w in word(), seed in proptest::collection::vec(any::<u64>(), 34)) {
        let s = w.limbs();
        let mut input = Madd384Input { a: [0; MAX_LIMBS], b: seed[0] & w.mask(), window: [0; MAX_LIMBS + 1] };
        for j in 0..s {
            input.a[j] = seed[1 + j] & w.mask();
        }
        for j in 0..=s {
            input.window[j] = seed[17 + j] & w.mask();
        }
        let mut expect = input.window;
        cios_inner_loop(&input.a[..s], input.b, &mut expect[..=s], w);
        let mut unit = Madd384Unit::new(w);
        let mut out = unit.tick(Some(input)).output;
        let got = loop {
            if let Some(Madd384Output::Window(win)) = out {
                break win;
            }
            out = unit.tick(None).output;
        };
        prop_assert_eq!(got, expect);
    }
}
