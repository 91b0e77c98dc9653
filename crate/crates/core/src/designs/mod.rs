//! Cycle-accurate models of the complete Montgomery multipliers.
//!
//! | id        | design                                   |
//! |-----------|------------------------------------------|
//! | `rs`      | Row-Serial, `t` in LUTRAM                |
//! | `rs-bram` | Row-Serial, `t` in BRAM                  |
//! | `rp`      | Row-Parallel (MADD384 + quotient MUL)    |
//! | `oup`     | Outer Unrolled Pipeline                  |
//! | `kara32`  | Row-Serial on a 32-bit Karatsuba unit    |
//! | `kara64`  | Row-Serial on a 64-bit Karatsuba unit    |

pub mod calibration;
mod engine;
mod oup;
mod row_parallel;
mod row_serial;

use std::fmt;
use std::str::FromStr;

pub use engine::{EnginePhase, RowEngine};
pub use oup::OuterUnrolledPipeline;
pub use row_parallel::RowParallel;
pub use row_serial::RowSerial;

use crate::dsp::MaddCarryUnit;
use crate::error::DesignError;
use crate::field::{bls12_381, FieldElement, MontgomeryParams, WordSize};
use crate::karatsuba::{karatsuba_cios, DspMode, KaratsubaCios};
use crate::trace::Trace;

/// A multiplier that accepts one operand pair and is busy until its
/// result is returned.
pub trait BlockingDesign {
    fn word(&self) -> WordSize;

    /// Latches operands (`ap_start`). Returns `false` and ignores them
    /// while a multiplication is in progress.
    fn start(&mut self, a: &FieldElement, b: &FieldElement) -> bool;

    /// One clock edge; returns the result on the `ap_done` tick.
    fn tick(&mut self) -> Option<FieldElement>;

    /// `ap_ready`.
    fn ready(&self) -> bool;

    fn dsp_count(&self) -> usize;

    fn trace(&self) -> &Trace;

    /// Runs one multiplication to completion, returning the result and the
    /// number of ticks from the first tick after `start` to `ap_done`.
    fn run(&mut self, a: &FieldElement, b: &FieldElement) -> (FieldElement, u64) {
        assert!(self.start(a, b), "design busy");
        let mut cycles = 0;
        loop {
            cycles += 1;
            if let Some(r) = self.tick() {
                return (r, cycles);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DesignId {
    RowSerial,
    RowSerialBram,
    RowParallel,
    Oup,
    Kara32,
    Kara64,
}

impl DesignId {
    pub const ALL: [DesignId; 6] = [
        DesignId::RowSerial,
        DesignId::RowSerialBram,
        DesignId::RowParallel,
        DesignId::Oup,
        DesignId::Kara32,
        DesignId::Kara64,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DesignId::RowSerial => "rs",
            DesignId::RowSerialBram => "rs-bram",
            DesignId::RowParallel => "rp",
            DesignId::Oup => "oup",
            DesignId::Kara32 => "kara32",
            DesignId::Kara64 => "kara64",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            DesignId::RowSerial => "Row-Serial",
            DesignId::RowSerialBram => "Row-Serial (BRAM)",
            DesignId::RowParallel => "Row-Parallel",
            DesignId::Oup => "Outer Unrolled Pipeline",
            DesignId::Kara32 | DesignId::Kara64 => "Karatsuba Row-Serial",
        }
    }

    /// The only word size a Karatsuba design runs at.
    pub fn fixed_word(self) -> Option<WordSize> {
        match self {
            DesignId::Kara32 => Some(WordSize::W32),
            DesignId::Kara64 => Some(WordSize::W64),
            _ => None,
        }
    }

    pub fn is_karatsuba(self) -> bool {
        self.fixed_word().is_some()
    }

    pub fn pipelined(self) -> bool {
        self == DesignId::Oup
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DesignId {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DesignId::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| DesignError::UnknownDesign(s.to_string()))
    }
}

/// One simulated configuration: design, word size and (for Karatsuba)
/// the DSP accounting mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DesignConfig {
    pub id: DesignId,
    pub word: WordSize,
    pub dsp_mode: DspMode,
}

impl DesignConfig {
    /// Checks that `word` is valid for `id`. Karatsuba designs accept
    /// `None` and use their own width.
    pub fn new(id: DesignId, word: Option<WordSize>, dsp_mode: DspMode) -> Result<Self, DesignError> {
        let word = match (id.fixed_word(), word) {
            (Some(fixed), Some(w)) if fixed != w => {
                return Err(DesignError::UnsupportedWord {
                    design: id.as_str(),
                    word: w.bits(),
                })
            }
            (Some(fixed), _) => fixed,
            (None, Some(w)) => w,
            (None, None) => WordSize::W32,
        };
        let dsp_mode = if id.is_karatsuba() { dsp_mode } else { DspMode::Forced };
        Ok(DesignConfig { id, word, dsp_mode })
    }

    /// Every configuration: four designs at three widths, and both
    /// Karatsuba widths in both DSP modes.
    pub fn all() -> Vec<DesignConfig> {
        let mut out = Vec::new();
        for id in [
            DesignId::RowSerial,
            DesignId::RowSerialBram,
            DesignId::RowParallel,
            DesignId::Oup,
        ] {
            for word in WordSize::ALL {
                out.push(DesignConfig {
                    id,
                    word,
                    dsp_mode: DspMode::Forced,
                });
            }
        }
        for id in [DesignId::Kara32, DesignId::Kara64] {
            for dsp_mode in DspMode::ALL {
                out.push(DesignConfig::new(id, None, dsp_mode).expect("fixed width"));
            }
        }
        out
    }

    /// One configuration per distinct datapath (Karatsuba modes share one).
    pub fn functional() -> Vec<DesignConfig> {
        Self::all()
            .into_iter()
            .filter(|c| c.dsp_mode == DspMode::Forced)
            .collect()
    }

    pub fn label(&self) -> String {
        if self.id.is_karatsuba() {
            format!("{}-{}", self.id, self.dsp_mode)
        } else {
            format!("{}-{}", self.id, self.word.bits())
        }
    }
}

impl fmt::Display for DesignConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A live simulator for any configuration.
#[derive(Clone, Debug)]
pub enum Simulator {
    RowSerial(RowSerial<MaddCarryUnit>),
    RowParallel(RowParallel),
    Oup(OuterUnrolledPipeline),
    Karatsuba(KaratsubaCios),
}

/// Results of a batch in input order, with total ticks from the first
/// operand load to the last result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchRun {
    pub results: Vec<FieldElement>,
    pub cycles: u64,
}

impl Simulator {
    pub fn new(config: DesignConfig) -> Self {
        Self::with_params(config, bls12_381(config.word))
    }

    pub fn with_params(config: DesignConfig, params: &MontgomeryParams) -> Self {
        assert_eq!(config.word, params.word());
        match config.id {
            DesignId::RowSerial => Simulator::RowSerial(RowSerial::new(params)),
            DesignId::RowSerialBram => Simulator::RowSerial(RowSerial::bram(params)),
            DesignId::RowParallel => Simulator::RowParallel(RowParallel::new(params)),
            DesignId::Oup => Simulator::Oup(OuterUnrolledPipeline::new(params)),
            DesignId::Kara32 | DesignId::Kara64 => {
                Simulator::Karatsuba(karatsuba_cios(params, config.dsp_mode).expect("configuration validated"))
            }
        }
    }

    pub fn with_trace(self) -> Self {
        match self {
            Simulator::RowSerial(d) => Simulator::RowSerial(d.with_trace()),
            Simulator::RowParallel(d) => Simulator::RowParallel(d.with_trace()),
            Simulator::Oup(d) => Simulator::Oup(d.with_trace()),
            Simulator::Karatsuba(d) => Simulator::Karatsuba(d.with_trace()),
        }
    }

    pub fn trace(&self) -> &Trace {
        match self {
            Simulator::RowSerial(d) => d.trace(),
            Simulator::RowParallel(d) => d.trace(),
            Simulator::Oup(d) => d.trace(),
            Simulator::Karatsuba(d) => d.trace(),
        }
    }

    pub fn dsp_count(&self) -> usize {
        match self {
            Simulator::RowSerial(d) => d.dsp_count(),
            Simulator::RowParallel(d) => d.dsp_count(),
            Simulator::Oup(d) => d.dsp_count(),
            Simulator::Karatsuba(d) => d.dsp_count(),
        }
    }

    fn blocking(&mut self) -> Option<&mut dyn BlockingDesign> {
        match self {
            Simulator::RowSerial(d) => Some(d),
            Simulator::RowParallel(d) => Some(d),
            Simulator::Karatsuba(d) => Some(d),
            Simulator::Oup(_) => None,
        }
    }

    /// Multiplies every pair. Blocking designs run one pair after another;
    /// the pipeline is fed back to back.
    pub fn run_batch(&mut self, pairs: &[(FieldElement, FieldElement)]) -> BatchRun {
        if let Some(design) = self.blocking() {
            let mut results = Vec::with_capacity(pairs.len());
            let mut cycles = 0;
            for (a, b) in pairs {
                let (r, c) = design.run(a, b);
                results.push(r);
                cycles += c;
            }
            return BatchRun { results, cycles };
        }
        let Simulator::Oup(oup) = self else { unreachable!() };
        stream(oup, pairs, |_| false)
    }

    pub fn run_one(&mut self, a: &FieldElement, b: &FieldElement) -> (FieldElement, u64) {
        let run = self.run_batch(&[(*a, *b)]);
        (run.results[0], run.cycles)
    }
}

/// Feeds `pairs` into the pipeline as fast as it accepts them. `stall`
/// is consulted before every tick with the tick number.
pub fn stream<F>(oup: &mut OuterUnrolledPipeline, pairs: &[(FieldElement, FieldElement)], mut stall: F) -> BatchRun
where
    F: FnMut(u64) -> bool,
{
    let mut results = Vec::with_capacity(pairs.len());
    let mut next = 0;
    let mut cycles = 0u64;
    while results.len() < pairs.len() {
        cycles += 1;
        oup.set_stall(stall(cycles));
        if let Some((a, b)) = pairs.get(next) {
            if oup.feed(a, b) {
                next += 1;
            }
        }
        if let Some(r) = oup.tick() {
            results.push(r);
        }
    }
    oup.set_stall(false);
    BatchRun { results, cycles }
}

/// Latency, resources and ideal throughput of one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    pub config: DesignConfig,
    /// Ticks until the first result.
    pub first_result_latency: u64,
    /// Ticks between consecutive results; equals the latency for
    /// blocking designs.
    pub pipeline_interval: u64,
    pub dsp_count: usize,
    /// Whether `dsp_count` is a synthesis-reported figure rather than a
    /// structural sum.
    pub dsp_tool_attributed: bool,
    pub assumed_frequency_hz: f64,
    pub ideal_throughput: f64,
}

/// Measures latency and interval by simulation and collects resources.
pub fn resource_report(config: DesignConfig, frequency_hz: f64) -> DesignReport {
    let params = bls12_381(config.word);
    let mut sim = Simulator::with_params(config, params);
    let x = *params.r2_mod_p();
    let (first, interval) = match &mut sim {
        Simulator::Oup(oup) => {
            let mut seen = Vec::new();
            let mut t = 0u64;
            while seen.len() < 2 {
                t += 1;
                oup.feed(&x, &x);
                if oup.tick().is_some() {
                    seen.push(t);
                }
            }
            (seen[0], seen[1] - seen[0])
        }
        other => {
            let (_, cycles) = other.run_one(&x, &x);
            (cycles, cycles)
        }
    };
    DesignReport {
        config,
        first_result_latency: first,
        pipeline_interval: interval,
        dsp_count: sim.dsp_count(),
        dsp_tool_attributed: config.id.is_karatsuba(),
        assumed_frequency_hz: frequency_hz,
        ideal_throughput: frequency_hz / interval as f64,
    }
}
