use montsim::designs::{resource_report, DesignConfig, DesignId};
use montsim::karatsuba::DspMode;
use montsim::WordSize;

fn report(id: DesignId, word: WordSize) -> (u64, u64, usize) {
    let config = DesignConfig::new(id, Some(word), DspMode::Forced).unwrap();
    let r = resource_report(config, 500e6);
    (r.first_result_latency, r.pipeline_interval, r.dsp_count)
}

fn per_width(id: DesignId) -> Vec<(u64, u64, usize)> {
    WordSize::ALL.iter().map(|&w| report(id, w)).collect()
}

#[test]
fn row_serial() {
    assert_eq!(
        per_width(DesignId::RowSerial),
        [(802, 802, 3), (554, 554, 5), (494, 494, 19)]
    );
}

#[test]
fn row_serial_bram() {
    assert_eq!(
        per_width(DesignId::RowSerialBram),
        [(917, 917, 3), (641, 641, 5), (557, 557, 19)]
    );
}

#[test]
fn row_parallel() {
    // Structural DSP sums; synthesis reported 42 / 59 / 120.
    assert_eq!(
        per_width(DesignId::RowParallel),
        [(497, 497, 42), (421, 421, 60), (427, 427, 126)]
    );
}

#[test]
fn outer_unrolled_pipeline() {
    assert_eq!(per_width(DesignId::Oup), [(844, 52, 48), (576, 48, 60), (504, 84, 114)]);
}

#[test]
fn karatsuba_row_serial() {
    for (id, cycles, forced, auto) in [(DesignId::Kara32, 493, 9, 4), (DesignId::Kara64, 290, 37, 12)] {
        for (mode, dsps) in [(DspMode::Forced, forced), (DspMode::Auto, auto)] {
            let r = resource_report(DesignConfig::new(id, None, mode).unwrap(), 300e6);
            assert_eq!(
                (r.first_result_latency, r.pipeline_interval, r.dsp_count),
                (cycles, cycles, dsps)
            );
            assert!(r.dsp_tool_attributed);
        }
    }
}

#[test]
fn karatsuba_64_is_fastest_blocking_design() {
    let kara = report(DesignId::Kara64, WordSize::W64).0;
    for id in [DesignId::RowSerial, DesignId::RowSerialBram, DesignId::RowParallel] {
        for (first, _, _) in per_width(id) {
            assert!(kara < first);
        }
    }
}
