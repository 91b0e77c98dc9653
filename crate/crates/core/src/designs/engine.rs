//! The word-serial inner-loop engine shared by the Row-Serial designs, the
//! pipeline stages and the Karatsuba multiplier.
//!
//! One outer iteration `i` over the window `t[i..=i+s]` runs in two
//! phases on a single multiply-accumulate word unit of latency `D`:
//!
//! ```text
//! LOOP_1   r = 1..=S     (a[j], b[i], t[i+j])
//!          r = S+1       (0, 0, t[i+s])          t[i+s] += carry
//!          r = q         (t[i], p', 0)           q = max(S+2, D+2)
//!          r = q+1       zeros                   carry reset
//!          ends when m emerges at r = q+D
//! LOOP_2   r = 1..=S     (p[j], m, t[i+j])
//!          r = S+1       (0, 0, t[i+s])
//!          r = S+2       zeros
//!          ends when t[i+s] is written at r = S+1+D
//! ```
//!
//! When the unit is deeper than the row (`D > S`) an extra zero push at
//! `S+2` clears the carry before the quotient word is issued.

use std::collections::VecDeque;

use crate::dsp::WordMac;
use crate::field::{MontgomeryParams, MAX_LIMBS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dest {
    Window(usize),
    Quotient,
    Discard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnginePhase {
    Idle,
    Loop1,
    Loop2,
    Finished,
}

impl EnginePhase {
    pub fn label(self) -> &'static str {
        match self {
            EnginePhase::Idle => "IDLE",
            EnginePhase::Loop1 => "LOOP_1",
            EnginePhase::Loop2 => "LOOP_2",
            EnginePhase::Finished => "NEXT",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RowEngine<U> {
    unit: U,
    s: usize,
    depth: usize,
    quotient_at: usize,
    p_prime: u64,
    p: [u64; MAX_LIMBS],
    a: [u64; MAX_LIMBS],
    b_i: u64,
    win: [u64; MAX_LIMBS + 1],
    m: Option<u64>,
    fifo: VecDeque<Dest>,
    phase: EnginePhase,
    r: usize,
}

impl<U: WordMac> RowEngine<U> {
    pub fn new(unit: U, params: &MontgomeryParams) -> Self {
        assert_eq!(unit.word(), params.word());
        let s = params.limbs();
        let depth = unit.latency();
        let mut p = [0u64; MAX_LIMBS];
        p[..s].copy_from_slice(params.modulus().limbs());
        RowEngine {
            unit,
            s,
            depth,
            quotient_at: (s + 2).max(depth + 2),
            p_prime: params.p_prime(),
            p,
            a: [0; MAX_LIMBS],
            b_i: 0,
            win: [0; MAX_LIMBS + 1],
            m: None,
            fifo: VecDeque::new(),
            phase: EnginePhase::Idle,
            r: 0,
        }
    }

    pub fn unit(&self) -> &U {
        &self.unit
    }

    pub fn phase(&self) -> EnginePhase {
        self.phase
    }

    /// Ticks one full iteration takes, from the first push to the final
    /// write of `t[i+s]`.
    pub fn iteration_cycles(&self) -> usize {
        self.loop1_len() + self.loop2_len()
    }

    fn loop1_len(&self) -> usize {
        self.quotient_at + self.depth
    }

    fn loop2_len(&self) -> usize {
        self.s + 1 + self.depth
    }

    pub fn quotient(&self) -> Option<u64> {
        self.m
    }

    pub fn window(&self) -> &[u64] {
        &self.win[..=self.s]
    }

    /// Loads operands for one outer iteration; `window` is `t[i..=i+s]`.
    pub fn begin(&mut self, a: &[u64], b_i: u64, window: &[u64]) {
        assert!(
            matches!(self.phase, EnginePhase::Idle | EnginePhase::Finished),
            "engine restarted mid-iteration"
        );
        let s = self.s;
        self.a[..s].copy_from_slice(&a[..s]);
        self.b_i = b_i;
        self.win[..=s].copy_from_slice(&window[..=s]);
        self.m = None;
        self.phase = EnginePhase::Loop1;
        self.r = 0;
    }

    fn push(&mut self, input: Option<((u64, u64, u64), Dest)>) {
        let unit_in = input.map(|(x, dest)| {
            self.fifo.push_back(dest);
            x
        });
        if let Some(out) = self.unit.tick(unit_in).output {
            match self.fifo.pop_front().expect("every output has a destination") {
                Dest::Window(j) => self.win[j] = out,
                Dest::Quotient => self.m = Some(out),
                Dest::Discard => {}
            }
        }
    }

    /// Clocks the unit without issuing anything, draining in-flight values.
    pub fn idle_tick(&mut self) {
        self.push(None);
    }

    /// Advances one tick of the running iteration. Returns `true` on the
    /// tick that completes it.
    pub fn tick(&mut self) -> bool {
        let s = self.s;
        self.r += 1;
        let r = self.r;
        match self.phase {
            EnginePhase::Loop1 => {
                let input = if r <= s {
                    Some(((self.a[r - 1], self.b_i, self.win[r - 1]), Dest::Window(r - 1)))
                } else if r == s + 1 {
                    Some(((0, 0, self.win[s]), Dest::Window(s)))
                } else if r == self.quotient_at {
                    Some(((self.win[0], self.p_prime, 0), Dest::Quotient))
                } else if r == self.quotient_at + 1 || r == s + 2 {
                    Some(((0, 0, 0), Dest::Discard))
                } else {
                    None
                };
                self.push(input);
                if r == self.loop1_len() {
                    assert!(self.m.is_some(), "quotient must be ready at the end of LOOP_1");
                    self.phase = EnginePhase::Loop2;
                    self.r = 0;
                }
                false
            }
            EnginePhase::Loop2 => {
                let m = self.m.expect("quotient set in LOOP_1");
                let input = if r <= s {
                    Some(((self.p[r - 1], m, self.win[r - 1]), Dest::Window(r - 1)))
                } else if r == s + 1 {
                    Some(((0, 0, self.win[s]), Dest::Window(s)))
                } else if r == s + 2 {
                    Some(((0, 0, 0), Dest::Discard))
                } else {
                    None
                };
                self.push(input);
                if r == self.loop2_len() {
                    assert_eq!(self.win[0], 0, "reduction must clear t[i]");
                    self.phase = EnginePhase::Finished;
                    return true;
                }
                false
            }
            EnginePhase::Idle | EnginePhase::Finished => panic!("engine ticked without an iteration"),
        }
    }

    /// Drops in-flight values; used when a design is restarted.
    pub fn reset(&mut self) {
        self.unit.reset();
        self.fifo.clear();
        self.phase = EnginePhase::Idle;
        self.r = 0;
        self.m = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::MaddCarryUnit;
    use crate::field::{bls12_381, cios_inner_loop, WordSize};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_limbs(rng: &mut ChaCha8Rng, word: WordSize, n: usize) -> Vec<u64> {
        (0..n).map(|_| rng.gen::<u64>() & word.mask()).collect()
    }

    #[test]
    fn structural_iteration_cost() {
        let costs: Vec<_> = WordSize::ALL
            .iter()
            .map(|&w| RowEngine::new(MaddCarryUnit::new(w), bls12_381(w)).iteration_cycles())
            .collect();
        assert_eq!(costs, [47, 43, 78]);
    }

    #[test]
    fn quotient_issue_points() {
        let e32 = RowEngine::new(MaddCarryUnit::new(WordSize::W32), bls12_381(WordSize::W32));
        assert_eq!(e32.quotient_at, 14);
        let e64 = RowEngine::new(MaddCarryUnit::new(WordSize::W64), bls12_381(WordSize::W64));
        // t[i] leaves the unit at tick 1 + 23; m emerges 23 ticks after issue.
        assert_eq!(e64.quotient_at, 25);
        assert_eq!(e64.loop1_len(), 48);
    }

    #[test]
    fn iteration_matches_two_inner_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for w in WordSize::ALL {
            let params = bls12_381(w);
            let s = w.limbs();
            let mut engine = RowEngine::new(MaddCarryUnit::new(w), params);
            for _ in 0..50 {
                // A zero top limb in `a` and the window keeps t[i+s] from
                // overflowing, as it never does for operands below 2p.
                let mut a = random_limbs(&mut rng, w, s);
                a[s - 1] = 0;
                let b_i = rng.gen::<u64>() & w.mask();
                let mut window = random_limbs(&mut rng, w, s + 1);
                window[s] = 0;
                engine.begin(&a, b_i, &window);
                let mut ticks = 1;
                while !engine.tick() {
                    ticks += 1;
                }
                assert_eq!(ticks, engine.iteration_cycles());

                cios_inner_loop(&a, b_i, &mut window, w);
                let m = window[0].wrapping_mul(params.p_prime()) & w.mask();
                cios_inner_loop(params.modulus().limbs(), m, &mut window, w);
                assert_eq!(engine.quotient(), Some(m));
                assert_eq!(engine.window(), &window[..]);
            }
        }
    }
}
