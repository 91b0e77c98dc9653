use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::FieldError;

/// Width of every operand handled by the multipliers.
pub const OPERAND_BITS: u32 = 384;
/// Number of bytes in the little-endian byte encoding.
pub const OPERAND_BYTES: usize = 48;
/// Number of hex digits in the text encoding.
pub const OPERAND_HEX_DIGITS: usize = 96;
/// Largest limb count over all supported word sizes (384 / 24).
pub const MAX_LIMBS: usize = 16;

/// Digit width used to scan the operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordSize {
    W24,
    W32,
    W64,
}

impl WordSize {
    pub const ALL: [WordSize; 3] = [WordSize::W24, WordSize::W32, WordSize::W64];

    pub const fn bits(self) -> u32 {
        match self {
            WordSize::W24 => 24,
            WordSize::W32 => 32,
            WordSize::W64 => 64,
        }
    }

    /// Limb count `s = 384 / w`.
    pub const fn limbs(self) -> usize {
        (OPERAND_BITS / self.bits()) as usize
    }

    pub const fn mask(self) -> u64 {
        match self {
            WordSize::W64 => u64::MAX,
            w => (1u64 << w.bits()) - 1,
        }
    }

    pub fn from_bits(bits: u32) -> Result<Self, FieldError> {
        match bits {
            24 => Ok(WordSize::W24),
            32 => Ok(WordSize::W32),
            64 => Ok(WordSize::W64),
            other => Err(FieldError::UnsupportedWordSize(other)),
        }
    }
}

impl fmt::Display for WordSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl FromStr for WordSize {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .trim()
            .parse::<u32>()
            .map_err(|_| FieldError::UnsupportedWordSize(0))?;
        WordSize::from_bits(bits)
    }
}

/// A 384-bit unsigned integer stored as `s` little-endian `w`-bit limbs.
///
/// Limbs past `s` are always zero so that derived equality and hashing
/// only see the live digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    word: WordSize,
    limbs: [u64; MAX_LIMBS],
}

impl FieldElement {
    pub const fn zero(word: WordSize) -> Self {
        FieldElement {
            word,
            limbs: [0; MAX_LIMBS],
        }
    }

    pub fn from_limbs(word: WordSize, limbs: &[u64]) -> Result<Self, FieldError> {
        let s = word.limbs();
        if limbs.len() != s {
            return Err(FieldError::LimbCount {
                expected: s,
                got: limbs.len(),
            });
        }
        let mut out = [0u64; MAX_LIMBS];
        for (index, (&value, slot)) in limbs.iter().zip(out.iter_mut()).enumerate() {
            if value & !word.mask() != 0 {
                return Err(FieldError::LimbOutOfRange {
                    index,
                    value,
                    bits: word.bits(),
                });
            }
            *slot = value;
        }
        Ok(FieldElement { word, limbs: out })
    }

    /// Builds an element from limbs that are already known to be in range.
    pub(crate) fn from_limbs_unchecked(word: WordSize, limbs: &[u64]) -> Self {
        debug_assert_eq!(limbs.len(), word.limbs());
        let mut out = [0u64; MAX_LIMBS];
        out[..limbs.len()].copy_from_slice(limbs);
        debug_assert!(limbs.iter().all(|l| l & !word.mask() == 0));
        FieldElement { word, limbs: out }
    }

    pub fn word(&self) -> WordSize {
        self.word
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs[..self.word.limbs()]
    }

    pub fn limb(&self, index: usize) -> u64 {
        self.limbs()[index]
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Packs the value into six little-endian 64-bit words.
    pub fn to_u64_words(&self) -> [u64; 6] {
        let bits = self.word.bits();
        let mut out = [0u64; 6];
        let mut acc: u128 = 0;
        let mut acc_bits = 0u32;
        let mut k = 0;
        for &limb in self.limbs() {
            acc |= (limb as u128) << acc_bits;
            acc_bits += bits;
            while acc_bits >= 64 {
                out[k] = acc as u64;
                k += 1;
                acc >>= 64;
                acc_bits -= 64;
            }
        }
        debug_assert_eq!(acc_bits, 0);
        out
    }

    pub fn from_u64_words(words: &[u64; 6], word: WordSize) -> Self {
        let bits = word.bits();
        let mask = word.mask() as u128;
        let mut limbs = [0u64; MAX_LIMBS];
        let mut acc: u128 = 0;
        let mut acc_bits = 0u32;
        let mut next = words.iter();
        for limb in limbs.iter_mut().take(word.limbs()) {
            if acc_bits < bits {
                acc |= (*next.next().expect("384 bits cover all limbs") as u128) << acc_bits;
                acc_bits += 64;
            }
            *limb = (acc & mask) as u64;
            acc >>= bits;
            acc_bits -= bits;
        }
        FieldElement { word, limbs }
    }

    /// Re-splits the same integer into limbs of another width.
    pub fn with_word(&self, word: WordSize) -> Self {
        if word == self.word {
            *self
        } else {
            Self::from_u64_words(&self.to_u64_words(), word)
        }
    }

    pub fn to_bytes_le(&self) -> [u8; OPERAND_BYTES] {
        let mut out = [0u8; OPERAND_BYTES];
        for (chunk, w) in out.chunks_exact_mut(8).zip(self.to_u64_words()) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes_le(bytes: &[u8; OPERAND_BYTES], word: WordSize) -> Self {
        let mut words = [0u64; 6];
        for (w, chunk) in words.iter_mut().zip(bytes.chunks_exact(8)) {
            *w = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        Self::from_u64_words(&words, word)
    }

    /// Fixed-width (96 digit) lowercase hex, most significant digit first.
    pub fn to_hex(&self) -> String {
        self.to_u64_words().iter().rev().map(|w| format!("{w:016x}")).collect()
    }

    pub fn from_hex(hex: &str, word: WordSize) -> Result<Self, FieldError> {
        if hex.len() != OPERAND_HEX_DIGITS {
            return Err(FieldError::Hex(format!(
                "expected {OPERAND_HEX_DIGITS} digits, got {}",
                hex.len()
            )));
        }
        let mut words = [0u64; 6];
        for (k, w) in words.iter_mut().enumerate() {
            let end = OPERAND_HEX_DIGITS - 16 * k;
            let digits = &hex[end - 16..end];
            *w = u64::from_str_radix(digits, 16).map_err(|_| FieldError::Hex(format!("bad digits {digits:?}")))?;
        }
        Ok(Self::from_u64_words(&words, word))
    }

    pub fn to_biguint(&self) -> BigUint {
        join_words(self)
    }

    pub fn from_biguint(x: &BigUint, word: WordSize) -> Result<Self, FieldError> {
        split_words(x, word)
    }
}

/// Splits a 384-bit integer into little-endian `w`-bit limbs.
pub fn split_words(x: &BigUint, word: WordSize) -> Result<FieldElement, FieldError> {
    if x.bits() > OPERAND_BITS as u64 {
        return Err(FieldError::ValueTooLarge);
    }
    let mut words = [0u64; 6];
    for (slot, digit) in words.iter_mut().zip(x.iter_u64_digits()) {
        *slot = digit;
    }
    Ok(FieldElement::from_u64_words(&words, word))
}

pub fn join_words(x: &FieldElement) -> BigUint {
    let words = x.to_u64_words();
    let mut bytes = Vec::with_capacity(OPERAND_BYTES);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

impl Ord for FieldElement {
    /// Compares integer values; elements of different widths are
    /// compared after re-splitting.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.word == other.word {
            self.limbs().iter().rev().cmp(other.limbs().iter().rev())
        } else {
            let a = self.to_u64_words();
            let b = other.to_u64_words();
            a.iter().rev().cmp(b.iter().rev())
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement(w{}, 0x{})", self.word, self.to_hex())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
