//! Karatsuba word multipliers and the Row-Serial Montgomery multiplier
//! built on them.
//!
//! One recursion level splits `x = x1 * 2^h + x0` and forms
//!
//! ```text
//! U = x0 * y0,  Z = x1 * y1,  Y = (x0 + x1) * (y0 + y1)
//! x * y = U + (Y - U - Z) * 2^h + Z * 2^2h
//! ```
//!
//! The 32-bit unit uses one level, the 64-bit unit two.

use std::fmt;
use std::str::FromStr;

use crate::designs::{calibration, RowSerial};
use crate::dsp::{ClockedUnit, DelayLine, Tick, WordMac};
use crate::error::DesignError;
use crate::field::{MontgomeryParams, WordSize};

/// How the synthesizer was allowed to map multipliers onto DSP slices.
/// Only affects resource accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DspMode {
    #[default]
    Forced,
    Auto,
}

impl DspMode {
    pub const ALL: [DspMode; 2] = [DspMode::Forced, DspMode::Auto];

    pub fn as_str(self) -> &'static str {
        match self {
            DspMode::Forced => "forced",
            DspMode::Auto => "auto",
        }
    }
}

impl fmt::Display for DspMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DspMode {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forced" => Ok(DspMode::Forced),
            "auto" => Ok(DspMode::Auto),
            other => Err(DesignError::UnknownDspMode(other.to_string())),
        }
    }
}

fn check_word(word: WordSize) -> Result<(), DesignError> {
    match word {
        WordSize::W32 | WordSize::W64 => Ok(()),
        WordSize::W24 => Err(DesignError::UnsupportedWord {
            design: "karatsuba",
            word: 24,
        }),
    }
}

/// Recursion depth used for a word size.
pub fn recursion_depth(word: WordSize) -> u32 {
    match word {
        WordSize::W64 => 2,
        _ => 1,
    }
}

/// `x * y` for `n`-bit operands through `depth` levels of Karatsuba.
///
/// Panics if the middle term leaves `[0, 2^(n+2))`, which would point at a
/// wrong subtraction order.
pub fn karatsuba(x: u128, y: u128, n: u32, depth: u32) -> u128 {
    debug_assert!(n <= 64 && x >> n == 0 && y >> n == 0);
    if depth == 0 {
        return x * y;
    }
    let half = n / 2;
    let lo = (1u128 << half) - 1;
    let (x0, x1) = (x & lo, x >> half);
    let (y0, y1) = (y & lo, y >> half);
    let u = karatsuba(x0, y0, half, depth - 1);
    let z = karatsuba(x1, y1, n - half, depth - 1);
    let sum_bits = (n - half) + 1;
    let big_y = karatsuba(x0 + x1, y0 + y1, sum_bits, depth - 1);
    let mid = big_y.checked_sub(u + z).expect("Karatsuba middle term is non-negative");
    assert!(mid >> (n + 2) == 0, "Karatsuba middle term exceeds 2^(n+2)");
    u + (mid << half) + (z << (2 * half))
}

/// Pipelined Karatsuba multiplier, interval 1.
#[derive(Clone, Debug)]
pub struct KaratsubaUnit {
    word: WordSize,
    mode: DspMode,
    line: DelayLine<u128>,
}

impl KaratsubaUnit {
    pub fn new(word: WordSize, mode: DspMode) -> Result<Self, DesignError> {
        check_word(word)?;
        let latency = match word {
            WordSize::W32 => 6,
            _ => 11,
        };
        Ok(KaratsubaUnit {
            word,
            mode,
            line: DelayLine::new(latency),
        })
    }

    pub fn mode(&self) -> DspMode {
        self.mode
    }

    pub fn word(&self) -> WordSize {
        self.word
    }
}

impl ClockedUnit for KaratsubaUnit {
    type Input = (u64, u64);
    type Output = u128;

    fn tick(&mut self, input: Option<(u64, u64)>) -> Tick<u128> {
        let bits = self.word.bits();
        let depth = recursion_depth(self.word);
        let value = input.map(|(a, b)| karatsuba(a as u128, b as u128, bits, depth));
        Tick::emit(self.line.shift(value))
    }

    fn latency(&self) -> usize {
        self.line.depth()
    }

    /// Tool-reported slice count for the chosen mode.
    fn dsp_count(&self) -> usize {
        match (self.word, self.mode) {
            (WordSize::W32, DspMode::Forced) => 8,
            (WordSize::W32, DspMode::Auto) => 4,
            (_, DspMode::Forced) => 35,
            (_, DspMode::Auto) => 12,
        }
    }

    fn pipelined(&self) -> bool {
        true
    }
}

/// Karatsuba product followed by a one-cycle three-input add
/// `product + t + carry` with the carry kept in a register.
#[derive(Clone, Debug)]
pub struct KaratsubaMac {
    unit: KaratsubaUnit,
    addend: DelayLine<u64>,
    sum: DelayLine<u128>,
    carry: u64,
}

impl KaratsubaMac {
    pub fn new(word: WordSize, mode: DspMode) -> Result<Self, DesignError> {
        let unit = KaratsubaUnit::new(word, mode)?;
        let addend = DelayLine::new(unit.latency());
        Ok(KaratsubaMac {
            unit,
            addend,
            sum: DelayLine::new(1),
            carry: 0,
        })
    }

    pub fn unit(&self) -> &KaratsubaUnit {
        &self.unit
    }
}

impl ClockedUnit for KaratsubaMac {
    type Input = (u64, u64, u64);
    type Output = u64;

    fn tick(&mut self, input: Option<(u64, u64, u64)>) -> Tick<u64> {
        let product = self.unit.tick(input.map(|(a, b, _)| (a, b))).output;
        let c = self.addend.shift(input.map(|(_, _, c)| c));
        let partial = product.map(|p| p + c.expect("addend travels with the product") as u128);
        let Some(v) = self.sum.shift(partial) else {
            return Tick::idle();
        };
        let total = v + self.carry as u128;
        let w = self.unit.word();
        self.carry = (total >> w.bits()) as u64;
        Tick::emit(Some(total as u64 & w.mask()))
    }

    fn latency(&self) -> usize {
        self.unit.latency() + self.sum.depth()
    }

    /// The multiplier plus the slices the chained additions map to when
    /// DSP use is forced.
    fn dsp_count(&self) -> usize {
        let adders = match (self.unit.word(), self.unit.mode()) {
            (_, DspMode::Auto) => 0,
            (WordSize::W32, DspMode::Forced) => 1,
            (_, DspMode::Forced) => 2,
        };
        self.unit.dsp_count() + adders
    }

    fn pipelined(&self) -> bool {
        true
    }
}

impl WordMac for KaratsubaMac {
    fn word(&self) -> WordSize {
        self.unit.word()
    }

    fn held_carry(&self) -> u64 {
        self.carry
    }

    fn reset(&mut self) {
        self.unit.line.clear();
        self.addend.clear();
        self.sum.clear();
        self.carry = 0;
    }
}

/// The Row-Serial design with its word unit replaced by [`KaratsubaMac`].
pub type KaratsubaCios = RowSerial<KaratsubaMac>;

pub fn karatsuba_cios(params: &MontgomeryParams, mode: DspMode) -> Result<KaratsubaCios, DesignError> {
    let word = params.word();
    let overheads = calibration::karatsuba(word).ok_or(DesignError::UnsupportedWord {
        design: "karatsuba",
        word: word.bits(),
    })?;
    Ok(RowSerial::with_unit(KaratsubaMac::new(word, mode)?, params, overheads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::BlockingDesign;
    use crate::field::{bls12_381, cios_montmul};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exhaustive_8_bit_grid() {
        for depth in 1..=2 {
            for x in 0..256u128 {
                for y in 0..256u128 {
                    assert_eq!(karatsuba(x, y, 8, depth), x * y);
                }
            }
        }
    }

    #[test]
    fn random_full_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10_000 {
            let (a, b) = (rng.gen::<u64>(), rng.gen::<u64>());
            let a32 = a & 0xffff_ffff;
            let b32 = b & 0xffff_ffff;
            assert_eq!(karatsuba(a32 as u128, b32 as u128, 32, 1), a32 as u128 * b32 as u128);
            assert_eq!(karatsuba(a as u128, b as u128, 64, 2), a as u128 * b as u128);
        }
        let m = u64::MAX as u128;
        assert_eq!(karatsuba(m, m, 64, 2), m * m);
        assert_eq!(karatsuba(0, m, 64, 2), 0);
    }

    #[test]
    fn unit_latency_and_resources() {
        let lat: Vec<_> = [WordSize::W32, WordSize::W64]
            .iter()
            .map(|&w| KaratsubaUnit::new(w, DspMode::Forced).unwrap().latency())
            .collect();
        assert_eq!(lat, [6, 11]);
        let dsps = |mode| {
            [WordSize::W32, WordSize::W64].map(|w| {
                (
                    KaratsubaUnit::new(w, mode).unwrap().dsp_count(),
                    KaratsubaMac::new(w, mode).unwrap().dsp_count(),
                )
            })
        };
        assert_eq!(dsps(DspMode::Forced), [(8, 9), (35, 37)]);
        assert_eq!(dsps(DspMode::Auto), [(4, 4), (12, 12)]);
        assert!(KaratsubaUnit::new(WordSize::W24, DspMode::Auto).is_err());
    }

    #[test]
    fn unit_streams_one_per_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut unit = KaratsubaUnit::new(WordSize::W64, DspMode::Auto).unwrap();
        let pairs: Vec<(u64, u64)> = (0..100).map(|_| rng.gen()).collect();
        let mut outs = Vec::new();
        for t in 0..111 {
            if let Some(p) = unit.tick(pairs.get(t).copied()).output {
                outs.push((t, p));
            }
        }
        assert_eq!(outs.len(), 100);
        for (n, ((t, p), (a, b))) in outs.iter().zip(&pairs).enumerate() {
            assert_eq!(*t, n + 11);
            assert_eq!(*p, *a as u128 * *b as u128);
        }
    }

    #[test]
    fn modes_produce_identical_traces() {
        let params = bls12_381(WordSize::W32);
        let a = *params.r2_mod_p();
        let b = *params.r_mod_p();
        let mut forced = karatsuba_cios(params, DspMode::Forced).unwrap().with_trace();
        let mut auto = karatsuba_cios(params, DspMode::Auto).unwrap().with_trace();
        let (rf, cf) = forced.run(&a, &b);
        let (ra, ca) = auto.run(&a, &b);
        assert_eq!((rf, cf), (ra, ca));
        assert_eq!(forced.trace().events(), auto.trace().events());
        assert_eq!(rf, cios_montmul(&a, &b, params));
    }

    #[test]
    fn rejects_24_bit() {
        assert!(karatsuba_cios(bls12_381(WordSize::W24), DspMode::Forced).is_err());
        assert_eq!("auto".parse::<DspMode>().unwrap(), DspMode::Auto);
        assert!("maybe".parse::<DspMode>().is_err());
    }
}
