//! Control overheads of each design that the datapath schedule does not
//! determine: state-entry cycles, BRAM read stalls and result unload.
//!
//! The structural iteration costs come from the engines themselves; these
//! constants only cover the FSM around them.

use crate::field::WordSize;

/// Ticks spent outside the inner-loop datapath.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overheads {
    /// Operand load before the first iteration.
    pub load: usize,
    /// Wait for the `t` window to be read before each iteration.
    pub read_stall: usize,
    /// Counter update and state transition after each iteration.
    pub per_iteration: usize,
    /// Word-serial result unload after the last iteration.
    pub unload: usize,
    /// Result handshake.
    pub done: usize,
}

impl Overheads {
    const fn new(load: usize, per_iteration: usize, done: usize) -> Self {
        Overheads {
            load,
            read_stall: 0,
            per_iteration,
            unload: 0,
            done,
        }
    }
}

pub fn row_serial(word: WordSize) -> Overheads {
    match word {
        WordSize::W24 => Overheads::new(1, 3, 1),
        WordSize::W32 => Overheads::new(1, 3, 1),
        WordSize::W64 => Overheads::new(1, 4, 1),
    }
}

/// Same FSM as [`row_serial`], plus the two-cycle BRAM read path: a read
/// stall per iteration and an `s`-word serial unload (s reads, two cycles
/// of read latency, one capture).
pub fn row_serial_bram(word: WordSize) -> Overheads {
    let read_stall = match word {
        WordSize::W24 | WordSize::W32 => 6,
        WordSize::W64 => 9,
    };
    Overheads {
        read_stall,
        unload: word.limbs() + 3,
        ..row_serial(word)
    }
}

pub fn row_parallel(word: WordSize) -> Overheads {
    match word {
        WordSize::W24 => Overheads::new(0, 3, 1),
        WordSize::W32 => Overheads::new(0, 3, 1),
        WordSize::W64 => Overheads::new(0, 1, 1),
    }
}

/// Karatsuba Row-Serial: `None` for widths without a Karatsuba unit.
pub fn karatsuba(word: WordSize) -> Option<Overheads> {
    match word {
        WordSize::W24 => None,
        WordSize::W32 => Some(Overheads::new(0, 0, 1)),
        WordSize::W64 => Some(Overheads::new(1, 3, 1)),
    }
}

/// Pipeline stage: one load tick, the Row-Serial iteration with its
/// per-iteration overhead, and one hand-off tick.
pub fn oup_stage(word: WordSize) -> Overheads {
    Overheads {
        load: 1,
        done: 1,
        ..row_serial(word)
    }
}

/// Register stages between the last pipeline stage and the output port.
pub fn oup_output_delay(word: WordSize) -> usize {
    match word {
        WordSize::W24 => 12,
        WordSize::W32 | WordSize::W64 => 0,
    }
}
