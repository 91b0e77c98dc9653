//! Published figures the simulator is compared against.

use montsim::designs::DesignId;
use montsim::karatsuba::DspMode;

use DesignId::{Kara32, Kara64, Oup, RowSerial, RowSerialBram};
use DspMode::{Auto, Forced};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitRef {
    pub unit: &'static str,
    /// Operand width; 384 for the wide adder.
    pub bits: u32,
    pub dsps: usize,
    pub latency: u64,
    pub pipelined: bool,
}

const fn unit(unit: &'static str, bits: u32, dsps: usize, latency: u64, pipelined: bool) -> UnitRef {
    UnitRef {
        unit,
        bits,
        dsps,
        latency,
        pipelined,
    }
}

pub const UNITS: [UnitRef; 17] = [
    unit("MUL", 24, 2, 4, true),
    unit("MUL", 32, 4, 6, true),
    unit("MUL", 64, 16, 18, true),
    unit("MADD", 24, 2, 4, true),
    unit("MADD", 32, 4, 6, true),
    unit("MADD", 64, 17, 20, true),
    unit("MADD384", 24, 40, 13, false),
    unit("MADD384", 32, 56, 15, false),
    unit("MADD384", 64, 110, 29, false),
    unit("MADDCARRY", 24, 3, 6, true),
    unit("MADDCARRY", 32, 5, 8, true),
    unit("MADDCARRY", 64, 19, 23, true),
    unit("ADD384", 384, 8, 9, false),
    unit("KARATSUBA-forced", 32, 8, 6, true),
    unit("KARATSUBA-forced", 64, 35, 11, true),
    unit("KARATSUBA-auto", 32, 4, 6, true),
    unit("KARATSUBA-auto", 64, 12, 11, true),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignRef {
    pub id: DesignId,
    pub bits: u32,
    pub dsp_mode: DspMode,
    pub dsps: usize,
    pub first_latency: u64,
    pub interval: u64,
    /// Sustained throughput measured on the board, in ops/s.
    pub measured_ops: Option<f64>,
    pub freq_mhz: Option<f64>,
    /// Why a DSP count is expected to differ from the reference.
    pub dsp_note: Option<&'static str>,
}

#[allow(clippy::too_many_arguments)]
const fn design(
    id: DesignId,
    bits: u32,
    dsp_mode: DspMode,
    dsps: usize,
    first_latency: u64,
    interval: u64,
    mops: f64,
    freq_mhz: f64,
) -> DesignRef {
    DesignRef {
        id,
        bits,
        dsp_mode,
        dsps,
        first_latency,
        interval,
        measured_ops: Some(mops * 1e6),
        freq_mhz: Some(freq_mhz),
        dsp_note: None,
    }
}

const RP_NOTE: &str = "structural MADD384 + MUL sum; synthesis merged slices";

const fn rp(bits: u32, dsps: usize, latency: u64, mops: f64, freq: f64, note: Option<&'static str>) -> DesignRef {
    let mut d = design(
        DesignId::RowParallel,
        bits,
        DspMode::Forced,
        dsps,
        latency,
        latency,
        mops,
        freq,
    );
    d.dsp_note = note;
    d
}

pub const DESIGNS: [DesignRef; 16] = [
    design(RowSerial, 24, Forced, 3, 802, 802, 0.66702, 548.0),
    design(RowSerial, 32, Forced, 5, 554, 554, 0.95838, 545.0),
    design(RowSerial, 64, Forced, 19, 494, 494, 1.00634, 516.0),
    design(RowSerialBram, 24, Forced, 3, 917, 917, 0.56229, 526.0),
    design(RowSerialBram, 32, Forced, 5, 641, 641, 0.78013, 516.0),
    design(RowSerialBram, 64, Forced, 19, 557, 557, 0.90251, 523.0),
    rp(24, 42, 497, 1.07218, 553.0, None),
    rp(32, 59, 421, 1.21388, 530.0, Some(RP_NOTE)),
    rp(64, 120, 427, 1.17854, 526.0, Some(RP_NOTE)),
    design(Oup, 24, Forced, 48, 844, 52, 7.11826, 448.0),
    design(Oup, 32, Forced, 60, 576, 48, 7.96803, 467.0),
    design(Oup, 64, Forced, 114, 504, 84, 5.07897, 486.0),
    design(Kara32, 32, Forced, 9, 493, 493, 0.57552, 290.0),
    design(Kara32, 32, Auto, 4, 493, 493, 0.64422, 328.0),
    design(Kara64, 64, Forced, 37, 290, 290, 1.01629, 305.0),
    design(Kara64, 64, Auto, 12, 290, 290, 1.21230, 368.0),
];

pub fn design_ref(id: DesignId, bits: u32, dsp_mode: DspMode) -> Option<&'static DesignRef> {
    DESIGNS
        .iter()
        .find(|d| d.id == id && d.bits == bits && d.dsp_mode == dsp_mode)
}

/// Largest relative latency deviation accepted for a cell with a
/// documented cause.
pub const LATENCY_TOLERANCE: f64 = 0.03;

/// Latency cells whose deviation has a documented cause, keyed by
/// (design, width). Empty while every cell matches exactly.
pub const LATENCY_NOTES: &[(DesignId, u32, &str)] = &[];

pub fn latency_note(id: DesignId, bits: u32) -> Option<&'static str> {
    LATENCY_NOTES
        .iter()
        .find(|(d, b, _)| *d == id && *b == bits)
        .map(|(_, _, note)| *note)
}

/// Measured throughput must sit in this band of the ideal bound.
pub const THROUGHPUT_BAND: (f64, f64) = (0.70, 1.00);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_configuration_has_one_reference() {
        for c in montsim::designs::DesignConfig::all() {
            assert!(design_ref(c.id, c.word.bits(), c.dsp_mode).is_some(), "{c}");
        }
        assert_eq!(DESIGNS.len(), montsim::designs::DesignConfig::all().len());
    }
}
