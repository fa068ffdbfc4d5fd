mod common;

use proptest::prelude::*;
use qcldpc::chansim::{noisy_frame, ChannelConfig};
use qcldpc::decoder::{quantize_llr, syndrome_check, tier_update, DecoderState};
use qcldpc::pool::decode_block;
use qcldpc::*;

use common::reference_decode;

fn codec(std: Standard, n: usize, rate: Rate) -> Codec {
    Codec::new(std, n, rate, EncoderVariant::Array).unwrap()
}

fn frames(codec: &Codec, ebn0: f64, seed: u64, count: u64) -> Vec<chansim::NoisyFrame> {
    let ch = ChannelConfig::new(ebn0, codec.rate(), seed).unwrap();
    let mut enc = codec.encoder();
    (0..count).map(|i| noisy_frame(&mut enc, &ch, i).unwrap()).collect()
}

#[test]
fn matches_reference_on_several_codes() {
    for (std, n, rate, ebn0) in [
        (Standard::Wifi, 648, Rate::R12, 1.5),
        (Standard::Wifi, 1296, Rate::R34A, 2.8),
        (Standard::Wimax, 2304, Rate::R56, 3.5),
        (Standard::Wimax, 960, Rate::R23B, 2.0),
    ] {
        let c = codec(std, n, rate);
        for f in frames(&c, ebn0, 21, 30) {
            let cfg = DecoderConfig::default();
            let got = c.decoder(cfg).unwrap().decode(&LlrBlock::Float32(f.llr.clone())).unwrap();
            let want = reference_decode(c.h(), &f.llr, 10, true);
            assert_eq!((got.hard_bits, got.iterations, got.converged), (want.hard, want.iterations, want.converged));

            let q = quantize_llr(&f.llr, 10, 24.0);
            let got = c.decoder(DecoderConfig::fixed()).unwrap().decode(&LlrBlock::Fixed16(q.clone())).unwrap();
            let want = reference_decode(c.h(), &q, 10, true);
            assert_eq!((got.hard_bits, got.iterations), (want.hard, want.iterations));
        }
    }
}

#[test]
fn posteriors_match_reference() {
    let c = codec(Standard::Wimax, 576, Rate::R12);
    for f in frames(&c, 1.5, 8, 20) {
        for iters in [1, 3, 7] {
            let mut state = DecoderState::<f32>::new(c.graph());
            state.init(&f.llr);
            for _ in 0..iters {
                for t in 0..c.graph().tiers() {
                    tier_update(&mut state, c.graph(), t);
                }
            }
            let want = reference_decode(c.h(), &f.llr, iters, false);
            for (a, b) in state.posterior().iter().zip(&want.posterior) {
                assert!((a - b).abs() <= 1e-4 * b.abs().max(1.0), "{a} vs {b}");
            }

            let q = quantize_llr(&f.llr, 10, 24.0);
            let mut state = DecoderState::<i16>::new(c.graph());
            state.init(&q);
            for _ in 0..iters {
                for t in 0..c.graph().tiers() {
                    tier_update(&mut state, c.graph(), t);
                }
            }
            assert_eq!(state.posterior(), &reference_decode(c.h(), &q, iters, false).posterior[..]);
        }
    }
}

#[test]
fn check_records_hold_invariants() {
    let c = codec(Standard::Wifi, 1944, Rate::R56);
    let f = &frames(&c, 3.0, 2, 1)[0];
    let q = quantize_llr(&f.llr, 10, 24.0);
    let mut state = DecoderState::<i16>::new(c.graph());
    state.init(&q);
    for t in 0..c.graph().tiers() {
        tier_update(&mut state, c.graph(), t);
    }
    for m in 0..c.h().m() {
        let node = state.check(m);
        let d = c.h().row_degree(m);
        assert!(0 <= node.min1 && node.min1 <= node.min2);
        assert!((node.argmin as usize) < d);
        assert_eq!(node.signs >> d, 0);
        assert_eq!(node.negative_product, node.signs.count_ones() % 2 == 1);
    }
}

#[test]
fn converged_results_satisfy_checks() {
    let c = codec(Standard::Wifi, 1944, Rate::R23A);
    let mut dec = c.decoder(DecoderConfig::default()).unwrap();
    let mut seen = [0; 2];
    for f in frames(&c, 2.0, 5, 60) {
        let r = dec.decode(&LlrBlock::Float32(f.llr)).unwrap();
        assert_eq!(r.converged, syndrome_check(c.h(), &r.hard_bits).unwrap());
        seen[r.converged as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn block_decoding_is_order_preserving() {
    let c = codec(Standard::Wimax, 1152, Rate::R34B);
    let cfg = DecoderConfig::fixed();
    let llrs: Vec<LlrBlock> = frames(&c, 2.5, 9, 37).into_iter().map(|f| cfg.llr_block(f.llr)).collect();
    let mut dec = c.decoder(cfg).unwrap();
    let sequential: Vec<DecodeResult> = llrs.iter().map(|l| dec.decode(l).unwrap()).collect();
    for workers in [1, 2, 5, 16, 64] {
        assert_eq!(decode_block(c.h(), &llrs, &cfg, workers).unwrap(), sequential, "workers={workers}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Flipping the LLR signs on the support of a codeword flips the same bits of the
    /// output and nothing else: every check sees an even number of sign flips.
    #[test]
    fn codeword_sign_symmetry(seed in any::<u64>(), ebn0 in 0.5f64..3.0) {
        let c = codec(Standard::Wimax, 576, Rate::R12);
        let fs = frames(&c, ebn0, seed, 2);
        let (noise, word) = (&fs[0], &fs[1]);
        // LLRs as if the all-zero word had been sent.
        let base: Vec<f32> = noise.llr.iter().zip(&noise.codeword)
            .map(|(&l, &b)| if b == 1 { -l } else { l }).collect();
        let flipped: Vec<f32> = base.iter().zip(&word.codeword)
            .map(|(&l, &b)| if b == 1 { -l } else { l }).collect();
        let mut dec = c.decoder(DecoderConfig::default()).unwrap();
        let a = dec.decode(&LlrBlock::Float32(base)).unwrap();
        let b = dec.decode(&LlrBlock::Float32(flipped)).unwrap();
        let expect: Vec<u8> = a.hard_bits.iter().zip(&word.codeword).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(b.hard_bits, expect);
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.converged, b.converged);
    }

    #[test]
    fn power_of_two_scaling_is_invisible(seed in any::<u64>(), ebn0 in 0.5f64..3.0, e in -4i32..=4) {
        let c = codec(Standard::Wifi, 648, Rate::R23A);
        let f = &frames(&c, ebn0, seed, 1)[0];
        let lambda = 2f32.powi(e);
        let mut dec = c.decoder(DecoderConfig::default()).unwrap();
        let a = dec.decode(&LlrBlock::Float32(f.llr.clone())).unwrap();
        let b = dec.decode(&LlrBlock::Float32(f.llr.iter().map(|&v| v * lambda).collect())).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fixed_iterations_without_early_stop(seed in any::<u64>(), iters in 1u32..=20) {
        let c = codec(Standard::Wimax, 576, Rate::R56);
        let f = &frames(&c, 4.0, seed, 1)[0];
        let cfg = DecoderConfig { max_iterations: iters, early_termination: false, ..DecoderConfig::fixed() };
        let r = c.decoder(cfg).unwrap().decode(&cfg.llr_block(f.llr.clone())).unwrap();
        prop_assert_eq!(r.iterations, iters);
        prop_assert_eq!(r.converged, syndrome_check(c.h(), &r.hard_bits).unwrap());
    }

    #[test]
    fn quantizer_is_monotone_and_bounded(a in -100f32..100.0, b in -100f32..100.0, q_b in 1u32..=14) {
        let q = quantize_llr(&[a, b], q_b, 24.0);
        let top = (1i32 << q_b) - 1;
        prop_assert!(q.iter().all(|&v| (v as i32).abs() <= top));
        if a <= b {
            prop_assert!(q[0] <= q[1]);
        }
    }
}

#[test]
fn general_scaling_keeps_decisions() {
    // Non-power-of-two factors round differently, so frames that never settle can wander
    // apart; frames that converge must still agree.
    let c = codec(Standard::Wifi, 648, Rate::R12);
    let mut dec = c.decoder(DecoderConfig::default()).unwrap();
    let mut compared = 0;
    for f in frames(&c, 1.8, 77, 100) {
        let a = dec.decode(&LlrBlock::Float32(f.llr.clone())).unwrap();
        if !a.converged {
            continue;
        }
        compared += 1;
        for lambda in [0.37f32, 3.1] {
            let b = dec.decode(&LlrBlock::Float32(f.llr.iter().map(|&v| v * lambda).collect())).unwrap();
            assert_eq!((&a.hard_bits, a.iterations), (&b.hard_bits, b.iterations));
        }
    }
    assert!(compared >= 50, "{compared}");
}
