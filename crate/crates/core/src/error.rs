use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus must be odd")]
    EvenModulus,
    #[error("modulus must be greater than 2")]
    ModulusTooSmall,
    #[error("modulus does not fit in 384 bits")]
    ModulusTooLarge,
    #[error("unsupported word size {0} (expected 24, 32 or 64)")]
    UnsupportedWordSize(u32),
    #[error("expected {expected} limbs, got {got}")]
    LimbCount { expected: usize, got: usize },
    #[error("limb {index} = {value:#x} does not fit in {bits} bits")]
    LimbOutOfRange { index: usize, value: u64, bits: u32 },
    #[error("value does not fit in 384 bits")]
    ValueTooLarge,
    #[error("value is not below 2p; an upstream bound was breached")]
    BoundViolation,
    #[error("operands use different word sizes")]
    WordMismatch,
    #[error("malformed hex: {0}")]
    Hex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DspError {
    #[error("port {port} value {value} does not fit the {bits}-bit port")]
    PortOverflow { port: &'static str, value: i128, bits: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("unknown design `{0}` (expected rs, rs-bram, rp, oup, kara32 or kara64)")]
    UnknownDesign(String),
    #[error("design {design} does not support {word}-bit words")]
    UnsupportedWord { design: &'static str, word: u32 },
    #[error("unknown DSP mode `{0}` (expected forced or auto)")]
    UnknownDspMode(String),
}
