//! Row-Parallel multiplier: a MADD384 unit executes a whole inner loop per
//! invocation and is shared by both loops; a dedicated MUL unit computes
//! the quotient from the early low word of LOOP_1.

use super::calibration::{self, Overheads};
use super::BlockingDesign;
use crate::dsp::{ClockedUnit, Madd384Input, Madd384Output, Madd384Unit, MulUnit};
use crate::field::{FieldElement, MontgomeryParams, WordSize, MAX_LIMBS};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Idle,
    Iterate,
    Next(usize),
    Done(usize),
}

/// Per-iteration progress of the shared MADD384.
#[derive(Clone, Copy, Debug, Default)]
struct Iteration {
    r: usize,
    low: Option<u64>,
    m: Option<u64>,
    window_ready: bool,
    loop2_issued: bool,
}

#[derive(Clone, Debug)]
pub struct RowParallel {
    word: WordSize,
    p: [u64; MAX_LIMBS],
    p_prime: u64,
    madd384: Madd384Unit,
    mul: MulUnit,
    overheads: Overheads,
    state: State,
    iter: Iteration,
    i: usize,
    a: [u64; MAX_LIMBS],
    b: [u64; MAX_LIMBS],
    t: [u64; 2 * MAX_LIMBS + 1],
    clock: u64,
    trace: Trace,
}

impl RowParallel {
    pub fn new(params: &MontgomeryParams) -> Self {
        let word = params.word();
        let s = word.limbs();
        let mut p = [0u64; MAX_LIMBS];
        p[..s].copy_from_slice(params.modulus().limbs());
        RowParallel {
            word,
            p,
            p_prime: params.p_prime(),
            madd384: Madd384Unit::new(word),
            mul: MulUnit::new(word),
            overheads: calibration::row_parallel(word),
            state: State::Idle,
            iter: Iteration::default(),
            i: 0,
            a: [0; MAX_LIMBS],
            b: [0; MAX_LIMBS],
            t: [0; 2 * MAX_LIMBS + 1],
            clock: 0,
            trace: Trace::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Trace::enabled();
        self
    }

    pub fn overheads(&self) -> Overheads {
        self.overheads
    }

    fn madd_input(&self, a: &[u64; MAX_LIMBS], b: u64) -> Madd384Input {
        let s = self.word.limbs();
        let mut window = [0u64; MAX_LIMBS + 1];
        window[..=s].copy_from_slice(&self.t[self.i..=self.i + s]);
        Madd384Input { a: *a, b, window }
    }

    fn record(&mut self, state: &'static str, event: String) {
        let (cycle, i) = (self.clock, self.i);
        self.trace.record(cycle, state, i, 0, || event);
    }

    /// One tick of the current outer iteration; `true` when it completes.
    fn iterate(&mut self) -> bool {
        let s = self.word.limbs();
        self.iter.r += 1;
        let madd_in = if self.iter.r == 1 {
            self.record("LOOP_1", "issue".into());
            Some(self.madd_input(&self.a, self.b[self.i]))
        } else if !self.iter.loop2_issued && self.iter.window_ready && self.iter.m.is_some() {
            self.iter.loop2_issued = true;
            let m = self.iter.m.unwrap_or_default();
            self.record("LOOP_2", format!("issue m={m:x}"));
            Some(self.madd_input(&self.p, m))
        } else {
            None
        };
        let mul_in = self.iter.low.take().map(|low| {
            self.record("QUOTIENT", format!("t[i]={low:x}"));
            (low, self.p_prime)
        });

        let out = self.madd384.tick(madd_in);
        assert!(!out.rejected, "MADD384 issued while busy");
        let mut finished = false;
        match out.output {
            Some(Madd384Output::LowWord(low)) if !self.iter.loop2_issued => self.iter.low = Some(low),
            Some(Madd384Output::LowWord(_)) => {}
            Some(Madd384Output::Window(window)) => {
                let i = self.i;
                self.t[i..=i + s].copy_from_slice(&window[..=s]);
                if self.iter.loop2_issued {
                    assert_eq!(self.t[i], 0, "reduction must clear t[i]");
                    finished = true;
                } else {
                    self.iter.window_ready = true;
                }
            }
            None => {}
        }
        if let Some(q) = self.mul.tick(mul_in).output {
            self.iter.m = Some(q as u64 & self.word.mask());
        }
        finished
    }

    fn next_iteration(&mut self) {
        self.i += 1;
        self.iter = Iteration::default();
        if self.i < self.word.limbs() {
            self.state = State::Iterate;
        } else {
            self.state = State::Done(self.overheads.done);
        }
    }
}

impl BlockingDesign for RowParallel {
    fn word(&self) -> WordSize {
        self.word
    }

    fn ready(&self) -> bool {
        self.state == State::Idle
    }

    fn start(&mut self, a: &FieldElement, b: &FieldElement) -> bool {
        if !self.ready() {
            return false;
        }
        let s = self.word.limbs();
        self.a[..s].copy_from_slice(a.with_word(self.word).limbs());
        self.b[..s].copy_from_slice(b.with_word(self.word).limbs());
        self.t = [0; 2 * MAX_LIMBS + 1];
        self.i = 0;
        self.iter = Iteration::default();
        // The operand registers are the MADD384 inputs, so there is no
        // separate load state.
        debug_assert_eq!(self.overheads.load, 0);
        self.state = State::Iterate;
        true
    }

    fn tick(&mut self) -> Option<FieldElement> {
        self.clock += 1;
        match self.state {
            State::Idle => None,
            State::Iterate => {
                if self.iterate() {
                    if self.overheads.per_iteration > 0 {
                        self.state = State::Next(self.overheads.per_iteration);
                    } else {
                        self.next_iteration();
                    }
                }
                None
            }
            State::Next(n) => {
                self.madd384.tick(None);
                self.mul.tick(None);
                if n == 1 {
                    self.next_iteration();
                } else {
                    self.state = State::Next(n - 1);
                }
                None
            }
            State::Done(n) => {
                if n > 1 {
                    self.state = State::Done(n - 1);
                    return None;
                }
                let s = self.word.limbs();
                let result = FieldElement::from_limbs_unchecked(self.word, &self.t[s..2 * s]);
                self.record("DONE", format!("result={}", result.to_hex()));
                self.state = State::Idle;
                Some(result)
            }
        }
    }

    fn dsp_count(&self) -> usize {
        self.madd384.dsp_count() + self.mul.dsp_count()
    }

    fn trace(&self) -> &Trace {
        &self.trace
    }
}
