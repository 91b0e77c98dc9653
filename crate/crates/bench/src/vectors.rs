//! Golden vector files.
//!
//! ```text
//! # montsim vectors
//! # seed=1
//! # n=3
//! # modulus_sha256=<hex digest of the 48 big-endian modulus bytes>
//! a,b,expected_mont,expected_field
//! ```
//!
//! Each value is 96 lowercase hex digits, most significant first.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use montsim::field::{bls12_381_modulus, OPERAND_BYTES, OPERAND_HEX_DIGITS};
use montsim::oracle::Oracle;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const MAGIC: &str = "# montsim vectors";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestVector {
    pub a: BigUint,
    pub b: BigUint,
    pub expected_mont: BigUint,
    pub expected_field: BigUint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VectorHeader {
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub modulus_sha256: Option<String>,
}

/// A record that could not be read; `line` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct VectorFile {
    pub header: VectorHeader,
    /// Records with their 1-based line numbers.
    pub vectors: Vec<(usize, TestVector)>,
    pub malformed: Vec<LineError>,
}

#[derive(Debug, Error)]
pub enum VectorError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("vector file was generated for a different modulus")]
    ModulusMismatch,
}

pub fn modulus_digest(p: &BigUint) -> String {
    let mut bytes = p.to_bytes_be();
    let mut padded = vec![0u8; OPERAND_BYTES.saturating_sub(bytes.len())];
    padded.append(&mut bytes);
    Sha256::digest(&padded).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn to_hex96(x: &BigUint) -> String {
    format!("{x:0>width$x}", width = OPERAND_HEX_DIGITS)
}

/// Uniform in `[0, p)` by rejection on the top 381 bits.
pub fn sample_below(rng: &mut ChaCha20Rng, p: &BigUint) -> BigUint {
    let bits = p.bits();
    let excess = (8 * OPERAND_BYTES as u64 - bits) as u32;
    loop {
        let mut bytes = [0u8; OPERAND_BYTES];
        rng.fill(&mut bytes[..]);
        bytes[0] &= 0xffu8 >> excess;
        let x = BigUint::from_bytes_be(&bytes);
        if &x < p {
            return x;
        }
    }
}

/// `n` operand pairs drawn from `seed`.
pub fn operand_pairs(seed: u64, n: usize) -> Vec<(BigUint, BigUint)> {
    let p = bls12_381_modulus();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = sample_below(&mut rng, &p);
            let b = sample_below(&mut rng, &p);
            (a, b)
        })
        .collect()
}

/// Operands come from one sequential stream so the file depends only on
/// `seed`; expected values are computed in parallel by the oracle.
pub fn generate(seed: u64, n: usize) -> Vec<TestVector> {
    let oracle = Oracle::bls12_381();
    operand_pairs(seed, n)
        .into_par_iter()
        .map(|(a, b)| {
            let expected_mont = oracle.montmul(&a, &b);
            let expected_field = oracle.from_montgomery(&expected_mont);
            TestVector {
                a,
                b,
                expected_mont,
                expected_field,
            }
        })
        .collect()
}

pub fn render(seed: u64, vectors: &[TestVector]) -> String {
    let mut out = String::with_capacity(vectors.len() * (4 * OPERAND_HEX_DIGITS + 4) + 256);
    let digest = modulus_digest(&bls12_381_modulus());
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "# seed={seed}").unwrap();
    writeln!(out, "# n={}", vectors.len()).unwrap();
    writeln!(out, "# modulus_sha256={digest}").unwrap();
    for v in vectors {
        writeln!(
            out,
            "{},{},{},{}",
            to_hex96(&v.a),
            to_hex96(&v.b),
            to_hex96(&v.expected_mont),
            to_hex96(&v.expected_field)
        )
        .unwrap();
    }
    out
}

pub fn write_file(path: &Path, seed: u64, vectors: &[TestVector]) -> Result<(), VectorError> {
    fs::write(path, render(seed, vectors)).map_err(|source| VectorError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_hex96(field: &str) -> Result<BigUint, String> {
    if field.len() != OPERAND_HEX_DIGITS {
        return Err(format!("expected {OPERAND_HEX_DIGITS} hex digits, got {}", field.len()));
    }
    if !field.bytes().all(|c| c.is_ascii_digit() || (b'a'..=b'f').contains(&c)) {
        return Err(format!("not lowercase hex: {field:?}"));
    }
    BigUint::parse_bytes(field.as_bytes(), 16).ok_or_else(|| "unparseable hex".to_string())
}

fn parse_record(line: &str) -> Result<TestVector, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 comma-separated fields, got {}", fields.len()));
    }
    let mut values = Vec::with_capacity(4);
    for (name, f) in ["a", "b", "expected_mont", "expected_field"].iter().zip(&fields) {
        values.push(parse_hex96(f).map_err(|e| format!("{name}: {e}"))?);
    }
    let expected_field = values.pop().unwrap();
    let expected_mont = values.pop().unwrap();
    let b = values.pop().unwrap();
    let a = values.pop().unwrap();
    Ok(TestVector {
        a,
        b,
        expected_mont,
        expected_field,
    })
}

fn parse_header(line: &str, header: &mut VectorHeader) {
    let Some((key, value)) = line.trim_start_matches('#').trim().split_once('=') else {
        return;
    };
    match key.trim() {
        "seed" => header.seed = value.trim().parse().ok(),
        "n" => header.count = value.trim().parse().ok(),
        "modulus_sha256" => header.modulus_sha256 = Some(value.trim().to_string()),
        _ => {}
    }
}

/// Parses a vector file. Bad records are collected in
/// [`VectorFile::malformed`] and skipped.
pub fn parse(text: &str) -> VectorFile {
    let mut file = VectorFile::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') {
            parse_header(line, &mut file.header);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(v) => file.vectors.push((idx + 1, v)),
            Err(reason) => file.malformed.push(LineError { line: idx + 1, reason }),
        }
    }
    file
}

/// Reads and parses `path`, rejecting files made for another modulus.
pub fn read_file(path: &Path) -> Result<VectorFile, VectorError> {
    let text = fs::read_to_string(path).map_err(|source| VectorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file = parse(&text);
    if let Some(digest) = &file.header.modulus_sha256 {
        if *digest != modulus_digest(&bls12_381_modulus()) {
            return Err(VectorError::ModulusMismatch);
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let vectors = generate(9, 5);
        let file = parse(&render(9, &vectors));
        assert!(file.malformed.is_empty());
        assert_eq!(file.header.seed, Some(9));
        assert_eq!(file.header.count, Some(5));
        let back: Vec<_> = file.vectors.into_iter().map(|(_, v)| v).collect();
        assert_eq!(back, vectors);
    }

    #[test]
    fn malformed_lines_are_numbered() {
        let good = render(1, &generate(1, 2));
        let mut lines: Vec<String> = good.lines().map(str::to_string).collect();
        lines.insert(5, "zz,1,2".to_string());
        lines.push(lines[4].to_uppercase());
        let file = parse(&lines.join("\n"));
        assert_eq!(file.vectors.len(), 2);
        let bad: Vec<_> = file.malformed.iter().map(|e| e.line).collect();
        assert_eq!(bad, [6, 8]);
    }

    #[test]
    fn sampling_stays_below_modulus() {
        let p = bls12_381_modulus();
        for (a, b) in operand_pairs(3, 2000) {
            assert!(a < p && b < p);
        }
    }
}
