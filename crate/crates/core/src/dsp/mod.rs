//! DSP48E2 slice model and the word arithmetic units built from it.
//!
//! Every unit implements [`ClockedUnit`]: an input presented at tick `t`
//! appears on the output at tick `t + latency`, and an output seen at tick
//! `t` may be fed back as an input at tick `t + 1`.

mod chain;
mod slice;
mod units;

use std::collections::VecDeque;

pub use chain::{Cell, CellOp, ChainPlan, Partials};
pub use slice::{
    check_ports, evaluate, DspConfig, DspInputs, DspOutputs, DspSlice, Opmode, A_PORT_BITS, B_PORT_BITS, CASCADE_SHIFT,
    C_PORT_BITS, P_BITS,
};
pub use units::{
    Add384Unit, Madd384Input, Madd384Output, Madd384Unit, MaddCarryUnit, MaddUnit, MulUnit, WordMac, U384,
};

/// What a unit produced during one tick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tick<T> {
    pub output: Option<T>,
    /// The input offered this tick was refused because the unit was busy.
    pub rejected: bool,
}

impl<T> Tick<T> {
    pub fn idle() -> Self {
        Tick {
            output: None,
            rejected: false,
        }
    }

    pub fn emit(output: Option<T>) -> Self {
        Tick {
            output,
            rejected: false,
        }
    }
}

pub trait ClockedUnit {
    type Input;
    type Output;

    /// Advances one clock edge, optionally presenting a new input.
    fn tick(&mut self, input: Option<Self::Input>) -> Tick<Self::Output>;

    fn latency(&self) -> usize;

    fn dsp_count(&self) -> usize;

    /// Whether a new input can be accepted every tick.
    fn pipelined(&self) -> bool;

    fn busy(&self) -> bool {
        false
    }
}

/// Shift register of optional values standing in for FDRE/SRL chains.
#[derive(Clone, Debug)]
pub struct DelayLine<T> {
    stages: VecDeque<Option<T>>,
}

impl<T> DelayLine<T> {
    pub fn new(depth: usize) -> Self {
        DelayLine {
            stages: std::iter::repeat_with(|| None).take(depth).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    /// Clocks `input` in and returns what was pushed `depth` shifts ago.
    pub fn shift(&mut self, input: Option<T>) -> Option<T> {
        if self.stages.is_empty() {
            return input;
        }
        self.stages.push_back(input);
        self.stages.pop_front().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.iter().all(Option::is_none)
    }

    pub fn clear(&mut self) {
        for s in &mut self.stages {
            *s = None;
        }
    }
}
