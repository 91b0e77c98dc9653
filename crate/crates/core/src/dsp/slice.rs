//! Behavioral model of a single DSP48E2 slice.
//!
//! Only the parts the multipliers use are modeled: the signed 27x18
//! multiplier, the 48-bit adder with the `C` port, the `PCIN` cascade
//! (optionally shifted right by 17) and the carry cascade. Pipeline
//! registers A1/A2, B1/B2, C, M and P can each be enabled.

use std::collections::VecDeque;

use crate::error::DspError;

pub const A_PORT_BITS: u32 = 27;
pub const B_PORT_BITS: u32 = 18;
pub const C_PORT_BITS: u32 = 48;
pub const P_BITS: u32 = 48;
pub const CASCADE_SHIFT: u32 = 17;

const P_MOD: i128 = 1 << P_BITS;
pub(crate) const P_MASK: u64 = (1 << P_BITS) - 1;

/// Adder input selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opmode {
    /// `P = A*B + C + Z + CARRYIN`, with `Z = PCIN >> 17` when `shift_cascade`.
    MultiplyAdd { shift_cascade: bool },
    /// `P = C + PCIN + CARRYIN`; the multiplier is idle.
    AddOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DspConfig {
    /// Number of A input registers (0..=2).
    pub a_regs: u8,
    /// Number of B input registers (0..=2).
    pub b_regs: u8,
    pub c_reg: bool,
    pub m_reg: bool,
    pub p_reg: bool,
    pub opmode: Opmode,
}

impl DspConfig {
    /// One input register per operand plus M and P.
    pub fn pipelined(opmode: Opmode) -> Self {
        DspConfig {
            a_regs: 1,
            b_regs: 1,
            c_reg: true,
            m_reg: true,
            p_reg: true,
            opmode,
        }
    }

    /// Cycles from presenting inputs to seeing them reflected on `P`.
    pub fn latency(&self) -> usize {
        let p = self.p_reg as usize;
        match self.opmode {
            Opmode::MultiplyAdd { .. } => self.a_regs.max(self.b_regs) as usize + self.m_reg as usize + p,
            Opmode::AddOnly => self.c_reg as usize + p,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DspInputs {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub pcin: u64,
    pub carry_in: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DspOutputs {
    pub p: u64,
    pub pcout: u64,
    pub carry_out: bool,
}

fn check_signed(port: &'static str, value: i64, bits: u32) -> Result<(), DspError> {
    let lo = -(1i64 << (bits - 1));
    let hi = (1i64 << (bits - 1)) - 1;
    if value < lo || value > hi {
        return Err(DspError::PortOverflow {
            port,
            value: value as i128,
            bits,
        });
    }
    Ok(())
}

fn check_unsigned(port: &'static str, value: u64, bits: u32) -> Result<(), DspError> {
    if value >> bits != 0 {
        return Err(DspError::PortOverflow {
            port,
            value: value as i128,
            bits,
        });
    }
    Ok(())
}

pub fn check_ports(inputs: &DspInputs) -> Result<(), DspError> {
    check_signed("A", inputs.a, A_PORT_BITS)?;
    check_signed("B", inputs.b, B_PORT_BITS)?;
    check_unsigned("C", inputs.c, C_PORT_BITS)?;
    check_unsigned("PCIN", inputs.pcin, P_BITS)?;
    Ok(())
}

/// Post-adder stage: wraps to 48 bits and reports bit 48 as carry out.
fn adder(opmode: Opmode, product: i128, c: u64, pcin: u64, carry_in: bool) -> DspOutputs {
    let (product, z) = match opmode {
        Opmode::MultiplyAdd { shift_cascade } => {
            let z = if shift_cascade { pcin >> CASCADE_SHIFT } else { pcin };
            (product, z)
        }
        Opmode::AddOnly => (0, pcin),
    };
    let sum = product + c as i128 + z as i128 + carry_in as i128;
    let p = sum.rem_euclid(P_MOD) as u64;
    DspOutputs {
        p,
        pcout: p,
        carry_out: (sum >> P_BITS) & 1 == 1,
    }
}

/// Evaluates the slice as if every register were bypassed.
pub fn evaluate(opmode: Opmode, inputs: &DspInputs) -> Result<DspOutputs, DspError> {
    check_ports(inputs)?;
    let product = inputs.a as i128 * inputs.b as i128;
    Ok(adder(opmode, product, inputs.c, inputs.pcin, inputs.carry_in))
}

/// Fixed-depth register chain; depth 0 is a wire.
#[derive(Clone, Debug)]
struct Regs<T> {
    stages: VecDeque<T>,
}

impl<T: Copy + Default> Regs<T> {
    fn new(depth: usize) -> Self {
        Regs {
            stages: std::iter::repeat_n(T::default(), depth).collect(),
        }
    }

    /// Clocks `input` in and returns the value leaving the last register.
    fn shift(&mut self, input: T) -> T {
        if self.stages.is_empty() {
            return input;
        }
        self.stages.push_back(input);
        self.stages.pop_front().expect("non-empty")
    }
}

/// Clocked DSP slice. [`DspSlice::tick`] returns the `P` output that is
/// visible during the cycle, then advances every enabled register.
#[derive(Clone, Debug)]
pub struct DspSlice {
    config: DspConfig,
    a: Regs<i64>,
    b: Regs<i64>,
    c: Regs<u64>,
    m: Regs<i128>,
    p: Regs<DspOutputs>,
}

impl DspSlice {
    pub fn new(config: DspConfig) -> Self {
        assert!(
            config.a_regs <= 2 && config.b_regs <= 2,
            "A/B have at most two registers"
        );
        let ab_depth = config.a_regs.max(config.b_regs) as usize;
        DspSlice {
            config,
            a: Regs::new(ab_depth),
            b: Regs::new(ab_depth),
            c: Regs::new(config.c_reg as usize),
            m: Regs::new(config.m_reg as usize),
            p: Regs::new(config.p_reg as usize),
        }
    }

    pub fn config(&self) -> &DspConfig {
        &self.config
    }

    pub fn latency(&self) -> usize {
        self.config.latency()
    }

    /// One clock edge. `pcin` and `carry_in` feed the adder directly.
    pub fn tick(&mut self, inputs: DspInputs) -> Result<DspOutputs, DspError> {
        check_ports(&inputs)?;
        // A and B share the deeper of the two register depths.
        let a = self.a.shift(inputs.a);
        let b = self.b.shift(inputs.b);
        let product = self.m.shift(a as i128 * b as i128);
        let c = self.c.shift(inputs.c);
        let sum = adder(self.config.opmode, product, c, inputs.pcin, inputs.carry_in);
        Ok(self.p.shift(sum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_until(slice: &mut DspSlice, first: DspInputs, hold: DspInputs, ticks: usize) -> Vec<DspOutputs> {
        let mut out = vec![slice.tick(first).unwrap()];
        for _ in 1..ticks {
            out.push(slice.tick(hold).unwrap());
        }
        out
    }

    #[test]
    fn multiply_path_latency_three() {
        let mut slice = DspSlice::new(DspConfig::pipelined(Opmode::MultiplyAdd { shift_cascade: false }));
        assert_eq!(slice.latency(), 3);
        let one = DspInputs {
            a: 1,
            b: 1,
            ..Default::default()
        };
        let out = run_until(&mut slice, one, DspInputs::default(), 5);
        assert_eq!(out[0].p, 0);
        assert_eq!(out[1].p, 0);
        assert_eq!(out[2].p, 0);
        assert_eq!(out[3].p, 1);
        assert_eq!(out[4].p, 0);
    }

    #[test]
    fn max_unsigned_operands_multiply_exactly() {
        let a = (1i64 << 26) - 1;
        let b = (1i64 << 17) - 1;
        let mut slice = DspSlice::new(DspConfig::pipelined(Opmode::MultiplyAdd { shift_cascade: false }));
        let out = run_until(
            &mut slice,
            DspInputs {
                a,
                b,
                ..Default::default()
            },
            DspInputs::default(),
            4,
        );
        assert_eq!(out[3].p as i128, a as i128 * b as i128);
        assert!(!out[3].carry_out);
    }

    #[test]
    fn add_only_wraps_with_carry() {
        let mut slice = DspSlice::new(DspConfig::pipelined(Opmode::AddOnly));
        assert_eq!(slice.latency(), 2);
        let input = DspInputs {
            c: (1 << 48) - 1,
            pcin: 1,
            ..Default::default()
        };
        let out = run_until(
            &mut slice,
            input,
            DspInputs {
                pcin: 1,
                ..Default::default()
            },
            3,
        );
        assert_eq!(out[2].p, 0);
        assert!(out[2].carry_out);
    }

    #[test]
    fn cascade_shift_drops_17_bits() {
        let inputs = DspInputs {
            a: 3,
            b: 5,
            c: 0,
            pcin: 7 << 17 | 0x1ffff,
            carry_in: false,
        };
        let out = evaluate(Opmode::MultiplyAdd { shift_cascade: true }, &inputs).unwrap();
        assert_eq!(out.p, 15 + 7);
    }

    #[test]
    fn port_overflow_rejected() {
        let mut slice = DspSlice::new(DspConfig::pipelined(Opmode::AddOnly));
        let err = slice
            .tick(DspInputs {
                a: 1 << 26,
                ..Default::default()
            })
            .unwrap_err();
        assert!(matches!(err, DspError::PortOverflow { port: "A", .. }));
        let err = evaluate(
            Opmode::AddOnly,
            &DspInputs {
                c: 1 << 48,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, DspError::PortOverflow { port: "C", .. }));
        let err = evaluate(
            Opmode::AddOnly,
            &DspInputs {
                b: -(1 << 17) - 1,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, DspError::PortOverflow { port: "B", .. }));
    }

    #[test]
    fn bypassed_registers_are_combinational() {
        let cfg = DspConfig {
            a_regs: 0,
            b_regs: 0,
            c_reg: false,
            m_reg: false,
            p_reg: false,
            opmode: Opmode::MultiplyAdd { shift_cascade: false },
        };
        let mut slice = DspSlice::new(cfg);
        assert_eq!(slice.latency(), 0);
        let out = slice
            .tick(DspInputs {
                a: 6,
                b: 7,
                c: 1,
                ..Default::default()
            })
            .unwrap();
        assert_eq!(out.p, 43);
    }
}
