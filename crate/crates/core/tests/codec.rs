use proptest::prelude::*;
use sfqrm::{
    encode_xor_oracle, error_pattern_census, BitBlock, BitRole, DecodeMode, DecodeStatus, RmCode, WeightCounts,
};

fn msg(v: u64, k: usize) -> BitBlock {
    BitBlock::from_u64(v, k, BitRole::Message)
}

#[test]
fn generator_rows_match_the_textbook_layout() {
    let code = RmCode::rm13();
    assert_eq!(code.generator_rows(), ["11111111", "11110000", "11001100", "10101010"]);
    assert_eq!((code.n(), code.k(), code.d_min()), (8, 4, 4));
    assert_eq!(code.brute_force_min_distance().unwrap(), 4);
}

#[test]
fn canonical_message_and_single_flip() {
    let code = RmCode::rm13();
    let cw = code.encode(&"1010".parse().unwrap()).unwrap();
    assert_eq!(cw.to_string(), "00110011");
    let out = code
        .decode(
            &BitBlock::parse("10110011", BitRole::Codeword).unwrap(),
            DecodeMode::Correct,
        )
        .unwrap();
    assert_eq!(out.status, DecodeStatus::Corrected);
    assert_eq!(out.corrected_positions, vec![1]);
    assert_eq!(out.decoded.unwrap().to_string(), "1010");
}

#[test]
fn xor_oracle_agrees_on_all_messages() {
    let code = RmCode::rm13();
    for v in 0..16 {
        let m = msg(v, 4);
        assert_eq!(code.encode(&m).unwrap(), encode_xor_oracle(&m).unwrap(), "message {m}");
    }
}

/// Independent generator-matrix multiply for RM(1,4): row 0 is all ones,
/// row i is the indicator of "bit (4-i) of the column index is 0".
#[test]
fn rm14_matches_direct_multiply() {
    let code = RmCode::new(1, 4).unwrap();
    for v in 0..32u64 {
        let m = msg(v, 5);
        let expect: Vec<u8> = (0..16usize)
            .map(|j| {
                let mut bit = m.bit(1);
                for i in 1..=4 {
                    let row = u8::from((j >> (4 - i)) & 1 == 0);
                    bit ^= m.bit(i + 1) & row;
                }
                bit
            })
            .collect();
        assert_eq!(code.encode(&m).unwrap().bits(), expect.as_slice());
    }
}

#[test]
fn frozen_error_pattern_census() {
    let table = error_pattern_census(&RmCode::rm13(), 8).unwrap();
    let row = |c, m, d| WeightCounts {
        corrected_ok: c,
        miscorrected: m,
        detected: d,
    };
    let expect = [
        row(16, 0, 0),
        row(128, 0, 0),
        row(0, 0, 448),
        row(0, 896, 0),
        row(0, 224, 896),
        row(0, 896, 0),
        row(0, 0, 448),
        row(0, 128, 0),
        row(0, 16, 0),
    ];
    for (w, e) in expect.iter().enumerate() {
        assert_eq!(table[&w], *e, "weight {w}");
    }
}

#[test]
fn detect_only_flags_weights_one_to_three() {
    let code = RmCode::rm13();
    for v in 0..16 {
        let cw = code.encode(&msg(v, 4)).unwrap();
        for pattern in 1u64..256 {
            let e = BitBlock::from_u64(pattern, 8, BitRole::Codeword);
            if e.weight() > 3 {
                continue;
            }
            let rx = cw.xor(&e).unwrap();
            let out = code.decode(&rx, DecodeMode::DetectOnly).unwrap();
            assert_eq!(out.status, DecodeStatus::DetectedUncorrectable);
            assert!(out.decoded.is_none());
        }
    }
}

#[test]
fn bad_parameters() {
    assert!(RmCode::new(4, 3).is_err());
    assert!(RmCode::new(1, 0).is_err());
    assert!(RmCode::new(1, 17).is_err());
    let code = RmCode::rm13();
    assert!(code.encode(&msg(1, 5)).is_err());
    assert!(code
        .decode(&BitBlock::zeros(7, BitRole::Codeword), DecodeMode::Correct)
        .is_err());
    assert!(BitBlock::parse("10a1", BitRole::Message).is_err());
}

fn small_code() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|m| (0..=m, Just(m)))
}

proptest! {
    #[test]
    fn encoding_is_linear(a in 0u64..16, b in 0u64..16) {
        let code = RmCode::rm13();
        let (ma, mb) = (msg(a, 4), msg(b, 4));
        let sum = code.encode(&ma.xor(&mb).unwrap()).unwrap();
        let parts = code.encode(&ma).unwrap().xor(&code.encode(&mb).unwrap()).unwrap();
        prop_assert_eq!(sum.bits(), parts.bits());
    }

    #[test]
    fn round_trip_within_radius((r, m) in small_code(), seed in any::<u64>(), flips in prop::collection::vec(any::<usize>(), 0..8)) {
        let code = RmCode::new(r, m).unwrap();
        let k = code.k();
        let v = if k >= 64 { seed } else { seed & ((1u64 << k) - 1) };
        let message = msg(v, k);
        let mut rx = code.encode(&message).unwrap();
        let mut positions: Vec<usize> = flips.iter().map(|f| f % code.n() + 1).collect();
        positions.sort();
        positions.dedup();
        positions.truncate(code.correction_radius());
        for &p in &positions {
            rx.flip(p);
        }
        let out = code.decode(&rx, DecodeMode::Correct).unwrap();
        prop_assert_eq!(out.decoded.as_ref(), Some(&message));
        prop_assert_eq!(out.corrected_positions, positions);
    }

    #[test]
    fn codewords_decode_clean_in_both_modes(v in 0u64..16) {
        let code = RmCode::rm13();
        let cw = code.encode(&msg(v, 4)).unwrap();
        for mode in [DecodeMode::Correct, DecodeMode::DetectOnly] {
            let out = code.decode(&cw, mode).unwrap();
            prop_assert_eq!(out.status, DecodeStatus::Clean);
            prop_assert_eq!(out.decoded.unwrap(), msg(v, 4));
        }
    }
}
