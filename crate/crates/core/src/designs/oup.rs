//! Outer Unrolled Pipeline: `s` Row-Serial stages, stage `k` running outer
//! iteration `k` on its own `s + 1` word slice of `t`.
//!
//! Each stage is blocking (load, compute, hand-off) and passes a 384-bit
//! job to the next stage in one cycle. A single stall flag freezes every
//! stage and the output registers at once.

use super::calibration::{self, Overheads};
use super::engine::RowEngine;
use crate::dsp::{ClockedUnit, DelayLine, MaddCarryUnit};
use crate::field::{FieldElement, MontgomeryParams, WordSize, MAX_LIMBS};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Job {
    seq: u64,
    a: [u64; MAX_LIMBS],
    /// Multiplier operand shifted so the current stage always uses word 0.
    b: [u64; MAX_LIMBS],
    /// Live slice `t[k..=k+s]` of the partial result.
    r: [u64; MAX_LIMBS + 1],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StageState {
    Idle,
    Load,
    Compute(usize),
    Overhead(usize),
    Done,
}

#[derive(Clone, Debug)]
struct Stage {
    engine: RowEngine<MaddCarryUnit>,
    state: StageState,
    job: Option<Job>,
}

#[derive(Clone, Debug)]
pub struct OuterUnrolledPipeline {
    word: WordSize,
    stages: Vec<Stage>,
    /// `links[k]` is the input register of stage `k`; `links[0]` is the
    /// pending-input register filled by [`OuterUnrolledPipeline::feed`].
    links: Vec<Option<Job>>,
    output: DelayLine<FieldElement>,
    overheads: Overheads,
    stall: bool,
    next_seq: u64,
    clock: u64,
    trace: Trace,
}

impl OuterUnrolledPipeline {
    pub fn new(params: &MontgomeryParams) -> Self {
        let word = params.word();
        let s = word.limbs();
        let stages = (0..s)
            .map(|_| Stage {
                engine: RowEngine::new(MaddCarryUnit::new(word), params),
                state: StageState::Idle,
                job: None,
            })
            .collect();
        OuterUnrolledPipeline {
            word,
            stages,
            links: vec![None; s],
            output: DelayLine::new(calibration::oup_output_delay(word)),
            overheads: calibration::oup_stage(word),
            stall: false,
            next_seq: 0,
            clock: 0,
            trace: Trace::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Trace::enabled();
        self
    }

    pub fn word(&self) -> WordSize {
        self.word
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Ticks a stage holds one job: load, iteration, overhead, hand-off.
    pub fn stage_cycles(&self) -> usize {
        let o = self.overheads;
        o.load + self.stages[0].engine.iteration_cycles() + o.per_iteration + o.done
    }

    pub fn dsp_count(&self) -> usize {
        self.stages.iter().map(|st| st.engine.unit().dsp_count()).sum()
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn set_stall(&mut self, stall: bool) {
        self.stall = stall;
    }

    pub fn stalled(&self) -> bool {
        self.stall
    }

    /// Offers a new operand pair; refused while stalled or while the
    /// pending-input register is still occupied.
    pub fn feed(&mut self, a: &FieldElement, b: &FieldElement) -> bool {
        if self.stall || self.links[0].is_some() {
            return false;
        }
        let s = self.word.limbs();
        let mut job = Job {
            seq: self.next_seq,
            a: [0; MAX_LIMBS],
            b: [0; MAX_LIMBS],
            r: [0; MAX_LIMBS + 1],
        };
        job.a[..s].copy_from_slice(a.with_word(self.word).limbs());
        job.b[..s].copy_from_slice(b.with_word(self.word).limbs());
        self.next_seq += 1;
        self.links[0] = Some(job);
        true
    }

    /// True when no job is pending, in flight, or in the output registers.
    pub fn is_empty(&self) -> bool {
        self.links.iter().all(Option::is_none)
            && self.stages.iter().all(|st| st.state == StageState::Idle)
            && self.output.is_empty()
    }

    fn hand_off(&self, job: &Job, window: &[u64]) -> Job {
        let s = self.word.limbs();
        let mut next = *job;
        next.b.copy_within(1..s, 0);
        next.b[s - 1] = 0;
        next.r = [0; MAX_LIMBS + 1];
        next.r[..s].copy_from_slice(&window[1..=s]);
        next
    }

    /// One clock edge; returns the result leaving the pipeline, if any.
    pub fn tick(&mut self) -> Option<FieldElement> {
        self.clock += 1;
        if self.stall {
            return None;
        }
        let s = self.word.limbs();
        let per_iteration = self.overheads.per_iteration;
        let mut finished = None;
        // Later stages first, so a hand-off lands in an input register
        // that the receiving stage reads on the next tick.
        for k in (0..s).rev() {
            let stage = &mut self.stages[k];
            match stage.state {
                StageState::Idle => {
                    if let Some(job) = self.links[k].take() {
                        stage.job = Some(job);
                        stage.state = StageState::Load;
                        let cycle = self.clock;
                        self.trace.record(cycle, "LOAD", k, 0, || format!("job {}", job.seq));
                    }
                    stage.engine.idle_tick();
                }
                StageState::Load => {
                    let job = stage.job.expect("loaded stage holds a job");
                    stage.engine.begin(&job.a[..s], job.b[0], &job.r[..=s]);
                    stage.state = StageState::Compute(stage.engine.iteration_cycles());
                    stage.engine.tick();
                    Self::count_down(stage, per_iteration);
                }
                StageState::Compute(_) => {
                    stage.engine.tick();
                    Self::count_down(stage, per_iteration);
                }
                StageState::Overhead(n) => {
                    stage.engine.idle_tick();
                    stage.state = if n == 1 {
                        StageState::Done
                    } else {
                        StageState::Overhead(n - 1)
                    };
                }
                StageState::Done => {
                    stage.engine.idle_tick();
                    let job = stage.job.expect("finished stage holds a job");
                    let next = self.hand_off(&job, self.stages[k].engine.window());
                    let stage = &mut self.stages[k];
                    if k + 1 == s {
                        let result = FieldElement::from_limbs_unchecked(self.word, &next.r[..s]);
                        finished = Some(result);
                        stage.state = StageState::Idle;
                        stage.job = None;
                        let cycle = self.clock;
                        self.trace.record(cycle, "DONE", k, 0, || format!("job {}", job.seq));
                    } else if self.links[k + 1].is_none() {
                        self.links[k + 1] = Some(next);
                        stage.state = StageState::Idle;
                        stage.job = None;
                    }
                }
            }
        }
        self.output.shift(finished)
    }

    fn count_down(stage: &mut Stage, per_iteration: usize) {
        let StageState::Compute(n) = stage.state else {
            unreachable!()
        };
        stage.state = match (n, per_iteration) {
            (1, 0) => StageState::Done,
            (1, x) => StageState::Overhead(x),
            (n, _) => StageState::Compute(n - 1),
        };
    }
}
