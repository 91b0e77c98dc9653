//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use montsim::designs::{resource_report, stream, DesignConfig, DesignId, Simulator};
use montsim::dsp::{ClockedUnit, MaddCarryUnit};
use montsim::field::{bls12_381, cios_montmul, from_montgomery, mont_add, mont_sub, to_montgomery};
use montsim::karatsuba::{DspMode, KaratsubaMac};
use montsim::oracle::Oracle;
use montsim::{FieldElement, WordSize};
use montsim_bench::bench::{self, BenchConfig, Warmup};
use montsim_bench::report::{design_row, unit_rows, Verdict};
use montsim_bench::vectors::{generate, operand_pairs};
use montsim_bench::verify::verify;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config(id: DesignId, word: WordSize) -> DesignConfig {
    DesignConfig::new(id, Some(word), DspMode::Forced).unwrap()
}

fn functional_oracle() -> Outcome {
    const N: usize = 10_000;
    let budget = Duration::from_secs(300);
    let start = Instant::now();
    let vectors: Vec<_> = generate(2024, N).into_iter().enumerate().collect();
    let configs = DesignConfig::functional();
    let mut mont = 0;
    for &c in &configs {
        let report = verify(c, &vectors, Vec::new());
        ensure(report.total == N && report.field_mismatches == 0, || {
            format!("{}: {} field mismatches", report.config, report.field_mismatches)
        })?;
        mont += report.mont_mismatches;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "{} configurations x {N} vectors, 0 field mismatches ({mont} in [p, 2p)), {elapsed:.1?}",
        configs.len()
    ))
}

fn unit_table() -> Outcome {
    let rows = unit_rows();
    for r in &rows {
        ensure(r.verdict == Verdict::Pass, || {
            format!(
                "{}-{}: latency {} vs {}, dsps {} vs {}",
                r.unit, r.bits, r.latency, r.ref_latency, r.dsps, r.ref_dsps
            )
        })?;
    }
    Ok(format!("{} unit cells exact", rows.len()))
}

fn design_latency() -> Outcome {
    let mut cells = Vec::new();
    for id in [
        DesignId::RowSerial,
        DesignId::RowSerialBram,
        DesignId::RowParallel,
        DesignId::Oup,
    ] {
        for w in WordSize::ALL {
            let row = design_row(config(id, w));
            ensure(row.latency_verdict == Verdict::Pass, || {
                format!(
                    "{}: {} ({:+.2}%) / {} vs {} / {}",
                    row.config,
                    row.first_latency,
                    row.first_delta_pct,
                    row.interval,
                    row.ref_first_latency,
                    row.ref_interval
                )
            })?;
            cells.push(if id == DesignId::Oup {
                format!("{}={}({})", row.config, row.first_latency, row.interval)
            } else {
                format!("{}={}", row.config, row.first_latency)
            });
        }
    }
    Ok(cells.join(" "))
}

fn karatsuba() -> Outcome {
    let units = unit_rows();
    let kara: Vec<_> = units.iter().filter(|u| u.unit.starts_with("KARATSUBA")).collect();
    ensure(kara.iter().all(|u| u.verdict == Verdict::Pass), || {
        "unit cells differ".into()
    })?;
    let lat: Vec<u64> = kara.iter().take(2).map(|u| u.latency).collect();
    ensure(lat == [6, 11], || format!("unit latency {lat:?}"))?;
    let mut out = Vec::new();
    for (id, w, cycles, forced, auto) in [
        (DesignId::Kara32, WordSize::W32, 493, 9, 4),
        (DesignId::Kara64, WordSize::W64, 290, 37, 12),
    ] {
        for (mode, dsps) in [(DspMode::Forced, forced), (DspMode::Auto, auto)] {
            let r = resource_report(DesignConfig::new(id, None, mode).unwrap(), 300e6);
            ensure(
                r.first_result_latency == cycles && r.dsp_count == dsps && r.dsp_tool_attributed,
                || format!("{id}-{mode}: {} cycles, {} dsps", r.first_result_latency, r.dsp_count),
            )?;
            let mac = KaratsubaMac::new(w, mode).unwrap();
            ensure(mac.dsp_count() == dsps, || {
                format!("{id}-{mode}: mac {}", mac.dsp_count())
            })?;
        }
        out.push(format!("{id}={cycles}"));
    }
    Ok(format!(
        "units 6/11, {}, dsps 8/35 9/37 forced, 4/12 auto",
        out.join(" ")
    ))
}

fn dsp_composition() -> Outcome {
    let mut oup = Vec::new();
    let mut rp = Vec::new();
    for w in WordSize::ALL {
        let o = resource_report(config(DesignId::Oup, w), 1.0).dsp_count;
        let expect = w.limbs() * MaddCarryUnit::new(w).dsp_count();
        ensure(o == expect, || format!("oup-{}: {o} vs {expect}", w.bits()))?;
        oup.push(o);
        let row = design_row(config(DesignId::RowParallel, w));
        ensure(row.dsp_verdict != Verdict::Fail, || {
            format!("{}: {}", row.config, row.dsps)
        })?;
        rp.push(format!("{}({:+} vs {})", row.dsps, row.dsp_delta, row.ref_dsps));
    }
    ensure(oup == [48, 60, 114], || format!("oup {oup:?}"))?;
    ensure(
        rp[0].starts_with("42(") && rp[1].starts_with("60(") && rp[2].starts_with("126("),
        || format!("rp {rp:?}"),
    )?;
    Ok(format!("OUP {oup:?}; RP {}", rp.join(" ")))
}

fn throughput_bound() -> Outcome {
    let mut spots = Vec::new();
    for c in DesignConfig::all() {
        let row = design_row(c);
        ensure(row.throughput_verdict == Verdict::Pass, || {
            format!("{}: ratio {:.4}", row.config, row.throughput_ratio)
        })?;
        if let Some(expect) = match row.config.as_str() {
            "oup-32" => Some(0.819),
            "rs-24" => Some(0.976),
            "rp-32" => Some(0.964),
            _ => None,
        } {
            ensure((row.throughput_ratio - expect).abs() < 5e-4, || {
                format!("{}: ratio {:.4} vs {expect}", row.config, row.throughput_ratio)
            })?;
            spots.push(format!("{}={:.3}", row.config, row.throughput_ratio));
        }
    }
    // The batch protocol never beats the ideal bound.
    let oup = config(DesignId::Oup, WordSize::W32);
    let mut b = BenchConfig::new(oup, 467e6);
    b.batch_sizes = vec![500, 1000];
    b.iterations = 2;
    b.warmup = Warmup { batches: 1, size: 100 };
    let report = bench::run(&b, &bench::pairs_from_seed(5, 1000, oup)).map_err(|e| e.to_string())?;
    ensure(report.mean_sim_ops_per_s <= report.ideal_ops_per_s, || {
        "bench exceeds ideal".into()
    })?;
    Ok(format!("16 configurations in [0.70, 1.00]; {}", spots.join(" ")))
}

fn chain_bound() -> Outcome {
    const OPS: usize = 100_000;
    let oracle = Oracle::bls12_381();
    let p = oracle.modulus().clone();
    let two_p = &p * 2u32;
    for w in WordSize::ALL {
        let params = bls12_381(w);
        let mut rng = ChaCha20Rng::seed_from_u64(w.bits() as u64);
        let fresh = operand_pairs(w.bits() as u64 + 100, OPS / 2 + 1);
        let mut xs = fresh.iter().flat_map(|(a, b)| [a, b]);
        let start = xs.next().unwrap();
        let mut acc = to_montgomery(&FieldElement::from_biguint(start, w).unwrap(), params);
        let mut expect = oracle.to_montgomery(start);
        for step in 0..OPS {
            let x = xs.next().unwrap();
            let xm = to_montgomery(&FieldElement::from_biguint(x, w).unwrap(), params);
            let xo = oracle.to_montgomery(x);
            match rng.gen_range(0..3) {
                0 => {
                    acc = cios_montmul(&acc, &xm, params);
                    expect = oracle.montmul(&expect, &xo);
                }
                1 => {
                    acc = mont_add(&acc, &xm, params);
                    expect = oracle.add(&expect, &xo);
                }
                _ => {
                    acc = mont_sub(&acc, &xm, params);
                    expect = oracle.sub(&expect, &xo);
                }
            }
            ensure(acc.to_biguint() < two_p, || {
                format!("w={}: step {step} reached 2p", w.bits())
            })?;
        }
        let got = from_montgomery(&acc, params).to_biguint();
        ensure(got == oracle.from_montgomery(&expect), || {
            format!("w={}: final value differs", w.bits())
        })?;
    }
    Ok(format!(
        "{OPS}-op chains at w=24/32/64 stay below 2p and match the replay"
    ))
}

fn pipeline() -> Outcome {
    let mut out = Vec::new();
    for w in WordSize::ALL {
        let c = config(DesignId::Oup, w);
        let steady = resource_report(c, 1.0);
        let pairs = bench::pairs_from_seed(w.bits() as u64, 1000, c);
        let expected: Vec<BigUint> = pairs
            .iter()
            .map(|(a, b)| cios_montmul(a, b, bls12_381(w)).to_biguint())
            .collect();

        let Simulator::Oup(mut oup) = Simulator::new(c) else {
            unreachable!()
        };
        let run = stream(&mut oup, &pairs, |_| false);
        let want = steady.first_result_latency + 999 * steady.pipeline_interval;
        ensure(run.cycles == want, || {
            format!("oup-{}: {} cycles, want {want}", w.bits(), run.cycles)
        })?;

        let mut rng = ChaCha20Rng::seed_from_u64(77 + w.bits() as u64);
        let Simulator::Oup(mut oup) = Simulator::new(c) else {
            unreachable!()
        };
        let stalled = stream(&mut oup, &pairs, |_| rng.gen_bool(0.3));
        let got: Vec<BigUint> = stalled.results.iter().map(FieldElement::to_biguint).collect();
        ensure(got == expected, || {
            format!("oup-{}: stalled stream reordered or lost results", w.bits())
        })?;
        ensure(stalled.cycles > run.cycles && oup.is_empty(), || {
            "stalls had no effect".into()
        })?;
        out.push(format!("oup-{}={}", w.bits(), run.cycles));
    }
    Ok(format!(
        "1000 pairs in first + 999 x interval ({}); 30% random stalls in order and lossless",
        out.join(" ")
    ))
}

fn cross_width() -> Outcome {
    const N: usize = 10_000;
    let oracle = Oracle::bls12_381();
    for (k, (a, b)) in operand_pairs(99, N).iter().enumerate() {
        let results: Vec<BigUint> = WordSize::ALL
            .iter()
            .map(|&w| {
                let params = bls12_381(w);
                let r = cios_montmul(
                    &FieldElement::from_biguint(a, w).unwrap(),
                    &FieldElement::from_biguint(b, w).unwrap(),
                    params,
                );
                r.to_biguint() % oracle.modulus()
            })
            .collect();
        ensure(results[0] == results[1] && results[1] == results[2], || {
            format!("vector {k} disagrees")
        })?;
        ensure(results[0] == oracle.montmul(a, b), || {
            format!("vector {k} differs from the oracle")
        })?;
    }
    Ok(format!("{N} shared vectors agree mod p at w=24/32/64"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("functional oracle equivalence", functional_oracle),
        ("unit latency and DSP table", unit_table),
        ("design latency", design_latency),
        ("karatsuba latency and resources", karatsuba),
        ("DSP composition", dsp_composition),
        ("ideal-throughput bound", throughput_bound),
        ("no final subtraction chain", chain_bound),
        ("pipeline streaming and stalls", pipeline),
        ("cross-width agreement", cross_width),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({why})", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
