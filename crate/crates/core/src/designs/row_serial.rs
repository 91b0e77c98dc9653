//! Row-Serial multiplier: one multiply-accumulate word unit, one word per
//! cycle, `t` kept in LUTRAM or (with a two-cycle read path) in BRAM.

use super::calibration::{self, Overheads};
use super::engine::{EnginePhase, RowEngine};
use super::BlockingDesign;
use crate::dsp::{MaddCarryUnit, WordMac};
use crate::field::{FieldElement, MontgomeryParams, WordSize, MAX_LIMBS};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Idle,
    Load(usize),
    Read(usize),
    Loop,
    Next(usize),
    Unload(usize),
    Done(usize),
}

impl State {
    fn label(self) -> &'static str {
        match self {
            State::Idle => "IDLE",
            State::Load(_) => "LOAD",
            State::Read(_) => "READ",
            State::Loop => "LOOP_1",
            State::Next(_) => "NEXT",
            State::Unload(_) => "UNLOAD",
            State::Done(_) => "DONE",
        }
    }
}

/// Blocking FSM around a [`RowEngine`]; generic over the word unit so the
/// Karatsuba variant can reuse it.
#[derive(Clone, Debug)]
pub struct RowSerial<U> {
    word: WordSize,
    engine: RowEngine<U>,
    overheads: Overheads,
    state: State,
    i: usize,
    a: [u64; MAX_LIMBS],
    b: [u64; MAX_LIMBS],
    t: [u64; 2 * MAX_LIMBS + 1],
    clock: u64,
    trace: Trace,
}

impl RowSerial<MaddCarryUnit> {
    /// LUTRAM variant.
    pub fn new(params: &MontgomeryParams) -> Self {
        let word = params.word();
        Self::with_unit(MaddCarryUnit::new(word), params, calibration::row_serial(word))
    }

    pub fn bram(params: &MontgomeryParams) -> Self {
        let word = params.word();
        Self::with_unit(MaddCarryUnit::new(word), params, calibration::row_serial_bram(word))
    }
}

impl<U: WordMac> RowSerial<U> {
    pub fn with_unit(unit: U, params: &MontgomeryParams, overheads: Overheads) -> Self {
        assert!(overheads.done >= 1, "the result needs a handshake tick");
        RowSerial {
            word: params.word(),
            engine: RowEngine::new(unit, params),
            overheads,
            state: State::Idle,
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

    pub fn unit(&self) -> &U {
        self.engine.unit()
    }

    pub fn overheads(&self) -> Overheads {
        self.overheads
    }

    /// Datapath ticks of one outer iteration, excluding FSM overhead.
    pub fn iteration_cycles(&self) -> usize {
        self.engine.iteration_cycles()
    }

    fn enter(&mut self, state: State) {
        self.state = state;
        let (i, cycle) = (self.i, self.clock + 1);
        self.trace
            .record(cycle, state.label(), i, 0, || format!("enter {}", state.label()));
    }

    fn enter_iteration(&mut self) {
        if self.overheads.read_stall > 0 {
            self.enter(State::Read(self.overheads.read_stall));
        } else {
            self.begin_loop();
        }
    }

    fn begin_loop(&mut self) {
        let s = self.word.limbs();
        let i = self.i;
        self.engine.begin(&self.a[..s], self.b[i], &self.t[i..=i + s]);
        self.enter(State::Loop);
    }

    fn finish_iteration(&mut self) {
        self.i += 1;
        if self.i < self.word.limbs() {
            self.enter_iteration();
        } else if self.overheads.unload > 0 {
            self.enter(State::Unload(self.overheads.unload));
        } else {
            self.enter(State::Done(self.overheads.done));
        }
    }

    fn result(&self) -> FieldElement {
        let s = self.word.limbs();
        FieldElement::from_limbs_unchecked(self.word, &self.t[s..2 * s])
    }
}

impl<U: WordMac> BlockingDesign for RowSerial<U> {
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
        self.engine.reset();
        if self.overheads.load > 0 {
            self.enter(State::Load(self.overheads.load));
        } else {
            self.enter_iteration();
        }
        true
    }

    fn tick(&mut self) -> Option<FieldElement> {
        self.clock += 1;
        match self.state {
            State::Idle => None,
            State::Load(n) => {
                self.engine.idle_tick();
                if n == 1 {
                    self.enter_iteration();
                } else {
                    self.state = State::Load(n - 1);
                }
                None
            }
            State::Read(n) => {
                self.engine.idle_tick();
                if n == 1 {
                    self.begin_loop();
                } else {
                    self.state = State::Read(n - 1);
                }
                None
            }
            State::Loop => {
                let before = self.engine.phase();
                let finished = self.engine.tick();
                if before == EnginePhase::Loop1 && self.engine.phase() == EnginePhase::Loop2 {
                    let (cycle, i) = (self.clock + 1, self.i);
                    let m = self.engine.quotient();
                    self.trace
                        .record(cycle, "LOOP_2", i, 0, || format!("m={:x}", m.unwrap_or(0)));
                }
                if finished {
                    let (i, s) = (self.i, self.word.limbs());
                    self.t[i..=i + s].copy_from_slice(self.engine.window());
                    if self.overheads.per_iteration > 0 {
                        self.enter(State::Next(self.overheads.per_iteration));
                    } else {
                        self.finish_iteration();
                    }
                }
                None
            }
            State::Next(n) => {
                self.engine.idle_tick();
                if n == 1 {
                    self.finish_iteration();
                } else {
                    self.state = State::Next(n - 1);
                }
                None
            }
            State::Unload(n) => {
                self.engine.idle_tick();
                if n == 1 {
                    self.enter(State::Done(self.overheads.done));
                } else {
                    self.state = State::Unload(n - 1);
                }
                None
            }
            State::Done(n) => {
                self.engine.idle_tick();
                if n == 1 {
                    let result = self.result();
                    let (cycle, i) = (self.clock, self.i);
                    self.trace
                        .record(cycle, "DONE", i, 0, || format!("result={}", result.to_hex()));
                    self.state = State::Idle;
                    Some(result)
                } else {
                    self.state = State::Done(n - 1);
                    None
                }
            }
        }
    }

    fn dsp_count(&self) -> usize {
        self.engine.unit().dsp_count()
    }

    fn trace(&self) -> &Trace {
        &self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{bls12_381, cios_montmul};
    use crate::trace::TRACE_HEADER;

    #[test]
    fn zero_and_one_operands() {
        for w in WordSize::ALL {
            let params = bls12_381(w);
            let mut rs = RowSerial::new(params);
            let zero = FieldElement::zero(w);
            assert_eq!(rs.run(&zero, params.r2_mod_p()).0, zero);
            let (r, _) = rs.run(params.r_mod_p(), params.r_mod_p());
            assert_eq!(r, cios_montmul(params.r_mod_p(), params.r_mod_p(), params));
        }
    }

    #[test]
    fn start_while_busy_is_refused() {
        let params = bls12_381(WordSize::W32);
        let mut rs = RowSerial::new(params);
        let x = *params.r_mod_p();
        assert!(rs.start(&x, &x));
        rs.tick();
        assert!(!rs.ready());
        assert!(!rs.start(&x, &x));
        while rs.tick().is_none() {}
        assert!(rs.ready());
    }

    #[test]
    fn trace_lines_follow_fsm() {
        let params = bls12_381(WordSize::W64);
        let mut rs = RowSerial::new(params).with_trace();
        let x = *params.r2_mod_p();
        rs.run(&x, &x);
        let text = rs.trace().render();
        assert!(text.starts_with(TRACE_HEADER));
        assert!(text.contains(",LOAD,0,0,"));
        assert!(text.contains(",LOOP_2,5,0,m="));
        assert!(text.lines().last().unwrap().contains(",DONE,"));
        let states: Vec<_> = rs.trace().events().iter().map(|e| e.state).collect();
        assert_eq!(states.iter().filter(|&&s| s == "LOOP_1").count(), 6);
    }
}
