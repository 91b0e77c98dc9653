//! Word arithmetic units: MUL, MADD, MADDCARRY, ADD384 and MADD384.

use super::chain::ChainPlan;
use super::slice::{evaluate, DspInputs, Opmode, P_BITS};
use super::{ClockedUnit, DelayLine, Tick};
use crate::field::{FieldElement, WordSize, MAX_LIMBS};

/// A 384-bit value as six little-endian 64-bit words.
pub type U384 = [u64; 6];

const ADD384_CHUNKS: usize = 8;
const ADD384_LATENCY: usize = 9;

fn bits(x: u128, lo: u32, width: u32) -> u64 {
    if lo >= 128 {
        return 0;
    }
    ((x >> lo) & ((1u128 << width) - 1)) as u64
}

fn check_operand(word: WordSize, name: &str, x: u64) {
    assert!(x <= word.mask(), "{name} operand {x:#x} exceeds {word}");
}

/// `P = A * B`, fully pipelined.
#[derive(Clone, Debug)]
pub struct MulUnit {
    plan: ChainPlan,
    line: DelayLine<u128>,
}

impl MulUnit {
    pub fn new(word: WordSize) -> Self {
        let plan = ChainPlan::new(word, false);
        let line = DelayLine::new(plan.latency());
        MulUnit { plan, line }
    }

    pub fn plan(&self) -> &ChainPlan {
        &self.plan
    }
}

impl ClockedUnit for MulUnit {
    type Input = (u64, u64);
    type Output = u128;

    fn tick(&mut self, input: Option<(u64, u64)>) -> Tick<u128> {
        let value = input.map(|(a, b)| {
            check_operand(self.plan.word(), "A", a);
            check_operand(self.plan.word(), "B", b);
            self.plan.evaluate(a, b, 0).0
        });
        Tick::emit(self.line.shift(value))
    }

    fn latency(&self) -> usize {
        self.plan.latency()
    }

    fn dsp_count(&self) -> usize {
        self.plan.dsp_count()
    }

    fn pipelined(&self) -> bool {
        true
    }
}

/// `P = A * B + C`, fully pipelined. The addend enters through the `C`
/// port of the head slice (and of an extra add-only slice at w=64).
#[derive(Clone, Debug)]
pub struct MaddUnit {
    plan: ChainPlan,
    line: DelayLine<u128>,
}

impl MaddUnit {
    pub fn new(word: WordSize) -> Self {
        let plan = ChainPlan::new(word, true);
        let line = DelayLine::new(plan.latency());
        MaddUnit { plan, line }
    }

    pub fn plan(&self) -> &ChainPlan {
        &self.plan
    }

    pub fn word(&self) -> WordSize {
        self.plan.word()
    }
}

impl ClockedUnit for MaddUnit {
    type Input = (u64, u64, u64);
    type Output = u128;

    fn tick(&mut self, input: Option<(u64, u64, u64)>) -> Tick<u128> {
        let value = input.map(|(a, b, c)| {
            let w = self.plan.word();
            check_operand(w, "A", a);
            check_operand(w, "B", b);
            check_operand(w, "C", c);
            self.plan.evaluate(a, b, c).0
        });
        Tick::emit(self.line.shift(value))
    }

    fn latency(&self) -> usize {
        self.plan.latency()
    }

    fn dsp_count(&self) -> usize {
        self.plan.dsp_count()
    }

    fn pipelined(&self) -> bool {
        true
    }
}

/// A pipelined multiply-accumulate word unit with an internal carry:
/// `(carry, P) = A * B + C + carry`, emitting the low word.
pub trait WordMac: ClockedUnit<Input = (u64, u64, u64), Output = u64> {
    fn word(&self) -> WordSize;

    fn held_carry(&self) -> u64;

    /// Drops all in-flight values and the carry.
    fn reset(&mut self);
}

/// MADD followed by a carry register stage built from add-only slices.
/// Bubbles leave the carry untouched; an all-zero input emits the held
/// carry and clears it.
#[derive(Clone, Debug)]
pub struct MaddCarryUnit {
    madd: MaddUnit,
    carry_line: DelayLine<u128>,
    carry_dsps: usize,
    carry: u64,
}

impl MaddCarryUnit {
    pub fn new(word: WordSize) -> Self {
        // Enough 48-bit add-only slices to cover the carry word; the few
        // bits above them go through fabric.
        let carry_dsps = (word.bits() as usize).div_ceil(P_BITS as usize);
        MaddCarryUnit {
            madd: MaddUnit::new(word),
            carry_line: DelayLine::new(carry_dsps + 1),
            carry_dsps,
            carry: 0,
        }
    }

    fn carry_add(&self, v: u128, carry: u64) -> u128 {
        let mut out = 0u128;
        let mut carry_in = false;
        for k in 0..self.carry_dsps as u32 {
            let lo = k * P_BITS;
            let inputs = DspInputs {
                c: bits(v, lo, P_BITS),
                pcin: bits(carry as u128, lo, P_BITS),
                carry_in,
                ..Default::default()
            };
            let o = evaluate(Opmode::AddOnly, &inputs).expect("48-bit chunks fit the ports");
            out |= (o.p as u128) << lo;
            carry_in = o.carry_out;
        }
        let top = self.carry_dsps as u32 * P_BITS;
        let fabric = (v >> top) + ((carry as u128) >> top) + carry_in as u128;
        out | fabric << top
    }
}

impl ClockedUnit for MaddCarryUnit {
    type Input = (u64, u64, u64);
    type Output = u64;

    fn tick(&mut self, input: Option<(u64, u64, u64)>) -> Tick<u64> {
        let product = self.madd.tick(input).output;
        let Some(v) = self.carry_line.shift(product) else {
            return Tick::idle();
        };
        let w = self.madd.word();
        let total = self.carry_add(v, self.carry);
        debug_assert!(
            total.checked_shr(2 * w.bits()).unwrap_or(0) == 0,
            "A*B + C + carry fits 2w bits"
        );
        self.carry = (total >> w.bits()) as u64;
        Tick::emit(Some(total as u64 & w.mask()))
    }

    fn latency(&self) -> usize {
        self.madd.latency() + self.carry_line.depth()
    }

    fn dsp_count(&self) -> usize {
        self.madd.dsp_count() + self.carry_dsps
    }

    fn pipelined(&self) -> bool {
        true
    }
}

impl WordMac for MaddCarryUnit {
    fn word(&self) -> WordSize {
        self.madd.word()
    }

    fn held_carry(&self) -> u64 {
        self.carry
    }

    fn reset(&mut self) {
        self.madd.line.clear();
        self.carry_line.clear();
        self.carry = 0;
    }
}

/// 384-bit adder over eight 48-bit slices: one input register stage, a
/// parallel add, then seven carry-ripple stages. Not pipelined.
#[derive(Clone, Debug)]
pub struct Add384Unit {
    line: DelayLine<(U384, bool)>,
    remaining: usize,
}

impl Default for Add384Unit {
    fn default() -> Self {
        Self::new()
    }
}

impl Add384Unit {
    pub fn new() -> Self {
        Add384Unit {
            line: DelayLine::new(ADD384_LATENCY),
            remaining: 0,
        }
    }

    fn chunk(x: &U384, k: usize) -> u64 {
        let lo = k * 48;
        let (w, off) = (lo / 64, lo % 64);
        let mut v = x[w] >> off;
        if off > 16 && w + 1 < 6 {
            v |= x[w + 1] << (64 - off);
        }
        v & ((1 << 48) - 1)
    }

    fn put_chunk(x: &mut U384, k: usize, v: u64) {
        let lo = k * 48;
        let (w, off) = (lo / 64, lo % 64);
        x[w] |= v << off;
        if off > 16 {
            x[w + 1] |= v >> (64 - off);
        }
    }

    /// Combinational view of the adder: `(A + B) mod 2^384` and carry out.
    pub fn add(a: &U384, b: &U384) -> (U384, bool) {
        let mut sums = [0u64; ADD384_CHUNKS];
        let mut carries = [false; ADD384_CHUNKS];
        for k in 0..ADD384_CHUNKS {
            let inputs = DspInputs {
                c: Self::chunk(a, k),
                pcin: Self::chunk(b, k),
                ..Default::default()
            };
            let o = evaluate(Opmode::AddOnly, &inputs).expect("48-bit chunks fit the ports");
            sums[k] = o.p;
            carries[k] = o.carry_out;
        }
        for k in 1..ADD384_CHUNKS {
            if carries[k - 1] {
                let inputs = DspInputs {
                    c: sums[k],
                    carry_in: true,
                    ..Default::default()
                };
                let o = evaluate(Opmode::AddOnly, &inputs).expect("48-bit chunks fit the ports");
                sums[k] = o.p;
                carries[k] |= o.carry_out;
            }
        }
        let mut out = [0u64; 6];
        for (k, &v) in sums.iter().enumerate() {
            Self::put_chunk(&mut out, k, v);
        }
        (out, carries[ADD384_CHUNKS - 1])
    }
}

impl ClockedUnit for Add384Unit {
    type Input = (U384, U384);
    type Output = (U384, bool);

    fn tick(&mut self, input: Option<(U384, U384)>) -> Tick<(U384, bool)> {
        let busy = self.remaining > 0;
        if busy {
            self.remaining -= 1;
        }
        let rejected = busy && input.is_some();
        let accepted = if busy {
            None
        } else {
            input.map(|(a, b)| {
                self.remaining = ADD384_LATENCY;
                Self::add(&a, &b)
            })
        };
        Tick {
            output: self.line.shift(accepted),
            rejected,
        }
    }

    fn latency(&self) -> usize {
        ADD384_LATENCY
    }

    fn dsp_count(&self) -> usize {
        ADD384_CHUNKS
    }

    fn pipelined(&self) -> bool {
        false
    }

    fn busy(&self) -> bool {
        self.remaining > 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Madd384Input {
    pub a: [u64; MAX_LIMBS],
    pub b: u64,
    /// `t[i..=i+s]`; only the first `s + 1` entries are used.
    pub window: [u64; MAX_LIMBS + 1],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Madd384Output {
    /// The new `t[i]`, forwarded as soon as the first MADD finishes.
    LowWord(u64),
    /// The whole updated window `t[i..=i+s]`.
    Window([u64; MAX_LIMBS + 1]),
}

/// One full CIOS inner loop: `s` parallel MADD units whose high halves
/// are aligned one word to the right and summed by ADD384.
#[derive(Clone, Debug)]
pub struct Madd384Unit {
    word: WordSize,
    madds: Vec<MaddUnit>,
    adder: Add384Unit,
    top: DelayLine<u64>,
    low: u64,
    remaining: usize,
}

impl Madd384Unit {
    pub fn new(word: WordSize) -> Self {
        let madds: Vec<_> = (0..word.limbs()).map(|_| MaddUnit::new(word)).collect();
        let top = DelayLine::new(madds[0].latency());
        Madd384Unit {
            word,
            madds,
            adder: Add384Unit::new(),
            top,
            low: 0,
            remaining: 0,
        }
    }

    pub fn word(&self) -> WordSize {
        self.word
    }

    fn pack(&self, limbs: &[u64]) -> U384 {
        FieldElement::from_limbs_unchecked(self.word, limbs).to_u64_words()
    }
}

impl ClockedUnit for Madd384Unit {
    type Input = Madd384Input;
    type Output = Madd384Output;

    fn tick(&mut self, input: Option<Madd384Input>) -> Tick<Madd384Output> {
        let s = self.word.limbs();
        let busy = self.remaining > 0;
        if busy {
            self.remaining -= 1;
        }
        let rejected = busy && input.is_some();
        let accepted = if busy { None } else { input };
        if accepted.is_some() {
            self.remaining = self.latency();
        }

        let mut lo = [0u64; MAX_LIMBS];
        let mut hi = [0u64; MAX_LIMBS];
        let mut ready = false;
        for (j, madd) in self.madds.iter_mut().enumerate() {
            let x = accepted.map(|inp| (inp.a[j], inp.b, inp.window[j]));
            if let Some(v) = madd.tick(x).output {
                lo[j] = v as u64 & self.word.mask();
                hi[j] = (v >> self.word.bits()) as u64;
                ready = true;
            }
        }
        let top = self.top.shift(accepted.map(|inp| inp.window[s]));

        // MADD results feed ADD384's input register directly.
        let mut early = None;
        let add_input = if ready {
            self.low = lo[0];
            early = Some(Madd384Output::LowWord(lo[0]));
            let mut port_b = [0u64; MAX_LIMBS];
            port_b[..s - 1].copy_from_slice(&lo[1..s]);
            port_b[s - 1] = top.expect("window top travels with the MADD results");
            Some((self.pack(&hi[..s]), self.pack(&port_b[..s])))
        } else {
            None
        };
        let sum = self.adder.tick(add_input);
        debug_assert!(!sum.rejected);
        let output = match sum.output {
            Some((words, _carry)) => {
                let limbs = FieldElement::from_u64_words(&words, self.word);
                let mut window = [0u64; MAX_LIMBS + 1];
                window[0] = self.low;
                window[1..=s].copy_from_slice(limbs.limbs());
                Some(Madd384Output::Window(window))
            }
            None => early,
        };
        Tick { output, rejected }
    }

    fn latency(&self) -> usize {
        self.madds[0].latency() + ADD384_LATENCY
    }

    fn dsp_count(&self) -> usize {
        self.madds.iter().map(|m| m.dsp_count()).sum::<usize>() + self.adder.dsp_count()
    }

    fn pipelined(&self) -> bool {
        false
    }

    fn busy(&self) -> bool {
        self.remaining > 0
    }
}
