//! Cascaded DSP multiplier chains.
//!
//! Operands are cut into limbs of at most 17 bits (the unsigned headroom of
//! the 18-bit signed `B` port) and the partial products are accumulated
//! column by column through `PCIN`. The first slice of each column takes
//! the previous column shifted right by 17; the last slice of each column
//! releases 17 result bits. Columns are walked in a snake order so that
//! neighbouring slices share an operand limb.

use super::slice::{evaluate, DspInputs, Opmode, CASCADE_SHIFT, P_MASK};
use crate::field::WordSize;

/// What a slice in the chain computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellOp {
    /// `A[a_limb] * B[b_limb] + PCIN (>> 17 when `shift`)`, plus the
    /// addend bits `c` on the `C` port when present.
    Multiply { a_limb: usize, b_limb: usize, shift: bool },
    /// `PCIN + C[lo .. lo + width]`, fed from fabric through the `C` port.
    AddAddend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub op: CellOp,
    /// Slice of the addend routed to this cell's `C` port, as `(lo, width)`.
    pub addend: Option<(u32, u32)>,
    /// Result bits released by this cell, as `(lo, width)`; `width == 0`
    /// means "everything that is left" (the last cell).
    pub emits: Option<(u32, u32)>,
}

impl Cell {
    /// Pipeline cycles this cell adds to the chain. The head multiplier
    /// registers its inputs, the product and `P`; later multipliers only
    /// add their `P` register because their operands are pre-delayed.
    /// An add-only cell fed through `C` registers `C` and `P`.
    fn stage_cost(&self, head: bool) -> usize {
        match self.op {
            CellOp::Multiply { .. } if head => 3,
            CellOp::Multiply { .. } => 1,
            CellOp::AddAddend => 2,
        }
    }
}

/// Limb widths and slice layout for one word size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPlan {
    word: WordSize,
    a_split: Vec<u32>,
    b_split: Vec<u32>,
    cells: Vec<Cell>,
}

/// Per-cell `P` values from one evaluation, for inspection in tests.
pub type Partials = Vec<u64>;

fn limb_split(bits: u32, fits_a_port: bool) -> Vec<u32> {
    if fits_a_port {
        // The 27-bit signed A port holds up to 26 unsigned bits.
        vec![bits]
    } else {
        let mut out = Vec::new();
        let mut left = bits;
        while left > 0 {
            let take = left.min(CASCADE_SHIFT);
            out.push(take);
            left -= take;
        }
        out
    }
}

fn extract(x: u128, lo: u32, width: u32) -> u64 {
    ((x >> lo) & ((1u128 << width) - 1)) as u64
}

impl ChainPlan {
    /// `P = A * B` (or `A * B + C` with `with_addend`) for the given width.
    ///
    /// Limb layouts: w=24 keeps A whole and cuts B into 17+7; w=32 cuts
    /// both into 17+15; w=64 cuts both into 17+17+17+13.
    pub fn new(word: WordSize, with_addend: bool) -> Self {
        let bits = word.bits();
        let a_split = limb_split(bits, bits <= 26);
        let b_split = limb_split(bits, false);
        let na = a_split.len();
        let nb = b_split.len();
        let columns = na + nb - 1;
        // Addends wider than a 17-bit column are split between the head
        // cell and an add-only cell after the second column.
        let wide_addend = with_addend && bits > 32;

        let mut cells = Vec::new();
        for k in 0..columns {
            let mut pairs: Vec<(usize, usize)> =
                (0..na).filter(|&i| k >= i && k - i < nb).map(|i| (i, k - i)).collect();
            if k % 2 == 0 {
                pairs.reverse();
            }
            let last = pairs.len() - 1;
            for (n, &(i, j)) in pairs.iter().enumerate() {
                let addend = if k == 0 && with_addend {
                    Some((0, if wide_addend { CASCADE_SHIFT } else { bits }))
                } else {
                    None
                };
                let emits = if n == last && !(wide_addend && k == 1) {
                    if k + 1 == columns {
                        Some((CASCADE_SHIFT * k as u32, 0))
                    } else {
                        Some((CASCADE_SHIFT * k as u32, CASCADE_SHIFT))
                    }
                } else {
                    None
                };
                cells.push(Cell {
                    op: CellOp::Multiply {
                        a_limb: i,
                        b_limb: j,
                        shift: k > 0 && n == 0,
                    },
                    addend,
                    emits,
                });
            }
            if wide_addend && k == 1 {
                cells.push(Cell {
                    op: CellOp::AddAddend,
                    addend: Some((CASCADE_SHIFT, bits - CASCADE_SHIFT)),
                    emits: Some((CASCADE_SHIFT, CASCADE_SHIFT)),
                });
            }
        }
        ChainPlan {
            word,
            a_split,
            b_split,
            cells,
        }
    }

    pub fn word(&self) -> WordSize {
        self.word
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn dsp_count(&self) -> usize {
        self.cells.len()
    }

    pub fn latency(&self) -> usize {
        self.cells.iter().enumerate().map(|(n, c)| c.stage_cost(n == 0)).sum()
    }

    fn limb(split: &[u32], x: u64, index: usize) -> i64 {
        let lo: u32 = split[..index].iter().sum();
        extract(x as u128, lo, split[index]) as i64
    }

    /// Runs the cascade combinationally, returning the full product (plus
    /// addend) and every slice's `P` value.
    pub fn evaluate(&self, a: u64, b: u64, addend: u64) -> (u128, Partials) {
        let mut partials = Vec::with_capacity(self.cells.len());
        let mut pcin = 0u64;
        let mut result: u128 = 0;
        for cell in &self.cells {
            let c = cell
                .addend
                .map(|(lo, width)| extract(addend as u128, lo, width))
                .unwrap_or(0);
            let out = match cell.op {
                CellOp::Multiply { a_limb, b_limb, shift } => {
                    let inputs = DspInputs {
                        a: Self::limb(&self.a_split, a, a_limb),
                        b: Self::limb(&self.b_split, b, b_limb),
                        c,
                        pcin,
                        carry_in: false,
                    };
                    evaluate(Opmode::MultiplyAdd { shift_cascade: shift }, &inputs)
                }
                CellOp::AddAddend => {
                    let inputs = DspInputs {
                        c,
                        pcin,
                        ..Default::default()
                    };
                    evaluate(Opmode::AddOnly, &inputs)
                }
            }
            .expect("limb layout keeps every port in range");
            debug_assert!(!out.carry_out, "cascade never overflows 48 bits");
            if let Some((lo, width)) = cell.emits {
                let bits = if width == 0 {
                    out.p as u128
                } else {
                    extract(out.p as u128, 0, width) as u128
                };
                result |= bits << lo;
            }
            partials.push(out.p & P_MASK);
            pcin = out.pcout;
        }
        (result, partials)
    }
}
