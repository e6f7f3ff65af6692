mod common;

use common::Rng;
use ptpmdl_core::codec::{decode_bytes, encode, partition, Container, EncodeConfig, Mode, Sequential};
use ptpmdl_core::{Error, TreeSource};

fn round_trip(x: &[u8], cfg: EncodeConfig) -> Vec<u8> {
    let enc = encode(x, cfg, &Sequential).unwrap();
    let bytes = enc.to_bytes();
    assert_eq!(decode_bytes(&bytes, &Sequential).unwrap(), x, "{cfg:?}");
    bytes
}

#[test]
fn degenerate_inputs_round_trip_in_every_mode() {
    let n = 1000;
    let inputs: Vec<Vec<u8>> = vec![
        vec![0; n],
        vec![1; n],
        (0..n).map(|i| (i % 2) as u8).collect(),
        (0..n + 5).map(|i| ((i / 3) % 2) as u8).collect(),
    ];
    for x in &inputs {
        for mode in Mode::ALL {
            for blocks in [1, 2, 3, 7] {
                round_trip(x, EncodeConfig::new(blocks, 3, mode));
            }
        }
    }
}

#[test]
fn random_inputs_round_trip() {
    let mut rng = Rng(17);
    let src = TreeSource::example_four_state();
    for trial in 0..120 {
        let blocks = [1u32, 2, 3, 7, 16][rng.below(5) as usize];
        let depth = rng.below(5) as u32;
        let min = blocks as u64 * (1 << depth);
        let n = (min + rng.below(4000)) as usize;
        let x = if trial % 2 == 0 {
            let p = rng.unit();
            rng.bits(n, p)
        } else {
            src.generate_default(n, trial)
        };
        let mode = Mode::ALL[rng.below(4) as usize];
        round_trip(&x, EncodeConfig::new(blocks, depth, mode));
    }
}

#[test]
fn all_zeros_compress_well() {
    let x = vec![0u8; 10_000];
    let bytes = round_trip(&x, EncodeConfig::new(4, 5, Mode::PtpMdl));
    assert!(bytes.len() * 8 < 1000, "{} bytes", bytes.len());
}

#[test]
fn single_block_ptp_and_naive_coincide() {
    let x = TreeSource::example_four_state().generate_default(5000, 1);
    let ptp = encode(&x, EncodeConfig::new(1, 5, Mode::PtpMdl), &Sequential).unwrap();
    let naive = encode(&x, EncodeConfig::new(1, 5, Mode::Naive), &Sequential).unwrap();
    assert_eq!(ptp.container.coded_bits(), naive.container.coded_bits());
    assert_eq!(ptp.container.blocks, naive.container.blocks);
}

#[test]
fn closed_form_data_length_matches_per_symbol_sum() {
    let src = TreeSource::example_four_state();
    for (seed, blocks) in [(1u64, 1u32), (2, 3), (3, 8)] {
        let x = src.generate_default(20_000, seed);
        let depth = 5;
        let enc = encode(&x, EncodeConfig::new(blocks, depth, Mode::PtpMdl), &Sequential).unwrap();
        let model = &enc.estimate.models[0];
        let mut per_symbol = 0.0;
        for r in partition(x.len(), blocks as usize) {
            for i in r.start + depth as usize..r.end {
                let s = model.structure.lookup_state(&x[i - depth as usize..i]);
                let rs = model.params[model.structure.leaf_index(&s).unwrap()].r;
                per_symbol -= if x[i] == 1 { rs.log2() } else { (1.0 - rs).log2() };
            }
        }
        let closed = enc.report.data_bits;
        assert!(
            (per_symbol - closed).abs() <= 1e-9 * closed.max(1.0),
            "{per_symbol} vs {closed}"
        );
    }
}

#[test]
fn actual_length_tracks_analytic_length() {
    let src = TreeSource::example_four_state();
    for blocks in [1u32, 2, 4, 8, 16] {
        let x = src.generate_default(10_000, u64::from(blocks));
        for mode in Mode::ALL {
            let enc = encode(&x, EncodeConfig::new(blocks, 5, mode), &Sequential).unwrap();
            let r = enc.report;
            let actual = enc.container.coded_bits() as f64;
            let models = enc.estimate.models.len() as f64;
            assert!(
                actual >= r.l_phase1 + r.l_phase2 - 2.0 * blocks as f64 - 1e-6,
                "{mode} B={blocks}"
            );
            // Analytic Phase II already budgets 2 coder bits per block; the
            // parameter payloads add at most 2 flush bits each.
            assert!(
                actual <= r.l_phase1 + r.l_phase2 + 3.0 * models + 1.0,
                "{mode} B={blocks}: {actual} vs {}",
                r.l_phase1 + r.l_phase2
            );
        }
    }
}

#[test]
fn work_counters_equal_block_length_minus_depth() {
    let x = TreeSource::example_four_state().generate_default(10_007, 4);
    for blocks in [1u32, 3, 16] {
        let enc = encode(&x, EncodeConfig::new(blocks, 5, Mode::PtpMdl), &Sequential).unwrap();
        let expect: Vec<u64> = partition(x.len(), blocks as usize)
            .iter()
            .map(|r| r.len() as u64 - 5)
            .collect();
        assert_eq!(enc.work.phase1, expect);
        assert_eq!(enc.work.phase2, expect);
    }
}

#[test]
fn config_violations_are_rejected() {
    let x = vec![0u8; 100];
    assert!(matches!(
        encode(&x, EncodeConfig::new(4, 5, Mode::PtpMdl), &Sequential),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        encode(&x, EncodeConfig::new(0, 0, Mode::PtpMdl), &Sequential),
        Err(Error::Config(_))
    ));
    assert!(encode(&x, EncodeConfig::new(4, 4, Mode::PtpMdl), &Sequential).is_ok());
}

#[test]
fn single_bit_flips_never_decode_to_wrong_output() {
    let x = TreeSource::example_four_state().generate_default(600, 8);
    for mode in Mode::ALL {
        let bytes = encode(&x, EncodeConfig::new(3, 3, mode), &Sequential)
            .unwrap()
            .to_bytes();
        for bit in 0..bytes.len() * 8 {
            let mut corrupt = bytes.clone();
            corrupt[bit / 8] ^= 0x80 >> (bit % 8);
            match decode_bytes(&corrupt, &Sequential) {
                Err(_) => {}
                Ok(y) => assert_eq!(y, x, "{mode}: flip of bit {bit} decoded to different data"),
            }
        }
    }
}

#[test]
fn truncated_containers_are_rejected() {
    let x = TreeSource::example_four_state().generate_default(2000, 8);
    let bytes = encode(&x, EncodeConfig::new(2, 4, Mode::PtpMdl), &Sequential)
        .unwrap()
        .to_bytes();
    for cut in [1, 2, 5, bytes.len() / 2, bytes.len() - 1] {
        assert!(Container::parse(&bytes[..bytes.len() - cut]).is_err());
    }
    let mut extended = bytes.clone();
    extended.push(0);
    assert!(Container::parse(&extended).is_err());
}

/// Pins the container layout. Input: 64 symbols of the example source
/// (seed 7), B = 2, D = 2, ptp-mdl.
#[test]
fn golden_container() {
    let x = TreeSource::example_four_state().generate_default(64, 7);
    let bytes = encode(&x, EncodeConfig::new(2, 2, Mode::PtpMdl), &Sequential)
        .unwrap()
        .to_bytes();
    assert_eq!(&bytes[..4], b"PTPM");
    assert_eq!(bytes[4], 1);
    assert_eq!(bytes[5], 0);
    assert_eq!(bytes[6], 2);
    assert_eq!(bytes[7], 0);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 64);
    assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 2);
    assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 32);
    assert_eq!(u64::from_le_bytes(bytes[28..36].try_into().unwrap()), 32);
    let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, GOLDEN_HEX);
}

const GOLDEN_HEX: &str = "5054504d01000200400000000000000002000000200000000000000020000000000000000c000000000000008650006ad730aa07000000000000003cc0cc9f3162020000000000000040";
