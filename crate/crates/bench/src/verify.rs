//! Double verification of simulated designs against golden vectors.

use montsim::designs::{DesignConfig, Simulator};
use montsim::oracle::Oracle;
use montsim::FieldElement;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::vectors::{LineError, TestVector};

/// Vectors handed to one simulator instance.
const CHUNK: usize = 250;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Match,
    /// Differs in the Montgomery domain only, e.g. by `p`.
    MontOnly,
    Field,
}

/// Compares a design output against a vector: first as is, then after
/// leaving the Montgomery domain.
pub fn check(result: &BigUint, v: &TestVector, oracle: &Oracle) -> Outcome {
    if *result == v.expected_mont {
        return Outcome::Match;
    }
    let ours = oracle.from_montgomery(&(result % oracle.modulus()));
    let theirs = oracle.from_montgomery(&v.expected_mont);
    if ours == v.expected_field && theirs == v.expected_field {
        Outcome::MontOnly
    } else {
        Outcome::Field
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Mismatch {
    pub line: usize,
    pub field: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: String,
    pub total: usize,
    pub mont_mismatches: usize,
    pub field_mismatches: usize,
    /// Lines of the first mismatches, capped.
    pub mismatches: Vec<Mismatch>,
    #[serde(serialize_with = "serialize_errors")]
    pub malformed: Vec<LineError>,
    pub cycles: u64,
}

fn serialize_errors<S: serde::Serializer>(errs: &[LineError], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(errs.iter().map(|e| e.to_string()))
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.total > 0 && self.field_mismatches == 0
    }
}

const MAX_LISTED: usize = 20;

/// Runs every vector through a fresh simulator per chunk. `vectors`
/// carries the source line of each record.
pub fn verify(config: DesignConfig, vectors: &[(usize, TestVector)], malformed: Vec<LineError>) -> VerifyReport {
    let oracle = Oracle::bls12_381();
    let word = config.word;
    let chunks: Vec<(u64, Vec<(usize, Outcome)>)> = vectors
        .par_chunks(CHUNK)
        .map(|chunk| {
            let pairs: Vec<(FieldElement, FieldElement)> = chunk
                .iter()
                .map(|(_, v)| {
                    (
                        FieldElement::from_biguint(&v.a, word).expect("parsed operands fit 384 bits"),
                        FieldElement::from_biguint(&v.b, word).expect("parsed operands fit 384 bits"),
                    )
                })
                .collect();
            let run = Simulator::new(config).run_batch(&pairs);
            let outcomes = chunk
                .iter()
                .zip(&run.results)
                .map(|((line, v), r)| (*line, check(&r.to_biguint(), v, &oracle)))
                .collect();
            (run.cycles, outcomes)
        })
        .collect();

    let mut report = VerifyReport {
        config: config.label(),
        total: vectors.len(),
        mont_mismatches: 0,
        field_mismatches: 0,
        mismatches: Vec::new(),
        malformed,
        cycles: 0,
    };
    for (cycles, outcomes) in chunks {
        report.cycles += cycles;
        for (line, outcome) in outcomes {
            if outcome == Outcome::Match {
                continue;
            }
            report.mont_mismatches += 1;
            let field = outcome == Outcome::Field;
            report.field_mismatches += field as usize;
            if report.mismatches.len() < MAX_LISTED {
                report.mismatches.push(Mismatch { line, field });
            }
        }
    }
    report
}
