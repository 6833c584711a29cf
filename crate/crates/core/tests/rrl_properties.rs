mod common;

use proptest::prelude::*;
use revmark::codec::{bits_to_bytes, frame_decode, frame_encode};
use revmark::rrl::{
    gamma_ratio, rrl_capacity, rrl_embed, rrl_extract, RestoreMode, RrlError, BLOCK_SIZE,
};
use revmark::{bitplane_diff, GrayImage};

fn block_of(img: &GrayImage, pos: usize) -> Option<(usize, usize)> {
    let (r, c) = (pos / img.width(), pos % img.width());
    let cols = img.width() / 8;
    if r >= (img.height() / 8) * 8 || c >= cols * 8 {
        return None;
    }
    Some(((r / 8) * cols + c / 8, r % 8))
}

#[test]
fn capacity_matches_block_count() {
    for (w, h) in [
        (8, 8),
        (7, 64),
        (64, 7),
        (17, 9),
        (100, 37),
        (512, 512),
        (1, 1),
    ] {
        let img = GrayImage::filled(w, h, 0);
        let brute = (0..h)
            .step_by(8)
            .filter(|r| r + 8 <= h)
            .map(|_| (0..w).step_by(8).filter(|c| c + 8 <= w).count())
            .sum::<usize>();
        assert_eq!(rrl_capacity(&img), 8 * brute, "{w}x{h}");
    }
}

#[test]
fn only_lsbs_of_used_blocks_change() {
    let img = common::noise_image(77, 45, 3);
    let frame = frame_encode(&common::random_bits(&mut common::rng(9), 100)).unwrap();
    let used = frame.len().div_ceil(8);
    let (marked, _) = rrl_embed(&img, &frame).unwrap();
    let diff = bitplane_diff(&img, &marked).unwrap();
    assert!(diff.lsb_only());
    for &pos in &diff.positions {
        let (block, _) = block_of(&img, pos).expect("change outside the block grid");
        assert!(block < used, "block {block} >= {used}");
    }
}

#[test]
fn rows_shift_down_by_one() {
    let img = common::noise_image(64, 32, 12);
    let frame = frame_encode(&common::random_bits(&mut common::rng(4), 77)).unwrap();
    let bytes = bits_to_bytes(&frame);
    let (marked, record) = rrl_embed(&img, &frame).unwrap();
    for (block, &byte) in bytes.iter().enumerate() {
        let before = common::block_lsb_rows(&img, block);
        let after = common::block_lsb_rows(&marked, block);
        assert_eq!(after[0], byte);
        assert_eq!(after[1..], before[..7]);
        assert_eq!(record.displaced[block], (block as u32, before[7]));
    }
    for block in bytes.len()..rrl_capacity(&img) / 8 {
        assert_eq!(
            common::block_lsb_rows(&img, block),
            common::block_lsb_rows(&marked, block)
        );
    }
}

#[test]
fn exact_mode_restores_bit_exact() {
    for seed in 0..20 {
        let img = common::noise_image(40 + seed as usize, 33, seed);
        let cap = rrl_capacity(&img);
        let frame = frame_encode(&common::random_bits(&mut common::rng(seed), cap - 88)).unwrap();
        let (marked, record) = rrl_embed(&img, &frame).unwrap();
        let out = rrl_extract(&marked, Some(&record)).unwrap();
        assert_eq!(out.mode, RestoreMode::Exact);
        assert_eq!(out.payload, frame);
        assert_eq!(out.restored, img);
    }
}

#[test]
fn literal_mode_damage_is_bounded() {
    for seed in 0..20 {
        let img = common::noise_image(64, 48, 100 + seed);
        let frame = frame_encode(&common::random_bits(
            &mut common::rng(seed),
            8 * seed as usize,
        ))
        .unwrap();
        let used = frame.len().div_ceil(8);
        let (marked, _) = rrl_embed(&img, &frame).unwrap();
        let out = rrl_extract(&marked, None).unwrap();
        assert_eq!(out.mode, RestoreMode::Literal);
        assert_eq!(out.payload, frame);
        let diff = bitplane_diff(&img, &out.restored).unwrap();
        assert!(diff.lsb_only());
        for &pos in &diff.positions {
            let (block, row) = block_of(&img, pos).unwrap();
            assert!(block < used);
            assert_eq!(row, 7);
        }
        for block in 0..used {
            assert_eq!(
                common::block_lsb_rows(&out.restored, block)[7],
                common::block_lsb_rows(&img, block)[6]
            );
        }
    }
}

#[test]
fn capacity_errors() {
    let img = GrayImage::filled(16, 16, 7);
    assert!(matches!(
        rrl_embed(&img, &[false; 33]),
        Err(RrlError::CapacityExceeded {
            requested: 33,
            capacity: 32
        })
    ));
    assert!(rrl_embed(&img, &[true; 32]).is_ok());
}

#[test]
fn unmarked_image_is_rejected() {
    let img = GrayImage::filled(64, 64, 200);
    assert!(matches!(
        rrl_extract(&img, None),
        Err(RrlError::MalformedStream(_))
    ));
    assert!(rrl_extract(&GrayImage::filled(16, 16, 1), None).is_err());
}

#[test]
fn record_must_match_frame() {
    let img = common::noise_image(64, 64, 1);
    let (marked, _) = rrl_embed(&img, &frame_encode(&[true; 40]).unwrap()).unwrap();
    let (_, other) = rrl_embed(&img, &frame_encode(&[true; 8]).unwrap()).unwrap();
    assert!(matches!(
        rrl_extract(&marked, Some(&other)),
        Err(RrlError::RecordMismatch(_))
    ));
}

#[test]
fn gamma_gates() {
    assert!(gamma_ratio((512, 512), (64, 64)).fits_8x8_blocks());
    assert!(gamma_ratio((512, 512), (128, 256)).permits_embedding());
    assert!(!gamma_ratio((512, 512), (128, 256)).fits_8x8_blocks());
    assert!(!gamma_ratio((64, 64), (32, 32)).permits_embedding());
    assert_eq!(BLOCK_SIZE * BLOCK_SIZE, 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn framed_round_trip(w in 56usize..120, h in 8usize..80, seed: u64, frac in 0.0f64..=1.0) {
        let img = common::noise_image(w, h, seed);
        let cap = rrl_capacity(&img);
        prop_assume!(cap >= 88);
        let data = common::random_bits(&mut common::rng(seed ^ 7), ((cap - 88) as f64 * frac) as usize);
        let frame = frame_encode(&data).unwrap();
        let (marked, record) = rrl_embed(&img, &frame).unwrap();
        let exact = rrl_extract(&marked, Some(&record)).unwrap();
        prop_assert_eq!(&exact.restored, &img);
        prop_assert_eq!(frame_decode(&exact.payload).unwrap(), data.clone());
        let literal = rrl_extract(&marked, None).unwrap();
        prop_assert_eq!(frame_decode(&literal.payload).unwrap(), data);
    }
}
