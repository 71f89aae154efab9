//! Property suites over randomly generated descriptors and block prefixes.
//!
//! The two load-bearing invariants: window bits and pointwise membership are
//! two views of one set and must agree everywhere, and block decode -> encode
//! is the identity on arbitrary pair prefixes.

use proptest::prelude::*;
use syndetic::blocks::{blocks_to_window, encode_blocks, BlockStream, FinitePairs, TailPolicy};
use syndetic::{Error, Limits, MinusSpec, SetDescriptor, StreamSpec};

fn leaf() -> impl Strategy<Value = SetDescriptor> {
    prop_oneof![
        (1u64..=9, prop::collection::vec(0u64..9, 1..=4)).prop_map(|(period, rs)| {
            let residues: Vec<u64> = rs.into_iter().map(|r| r % period).collect();
            SetDescriptor::Periodic { period, residues }
        }),
        (
            prop::collection::vec(1u64..=6, 1..=5),
            prop::collection::vec(1u64..=6, 1..=5),
        )
            .prop_map(|(alpha, beta)| SetDescriptor::Blocks {
                plus: StreamSpec::repeat_last(alpha, beta),
                minus: MinusSpec::all(),
            }),
        (1u64..=3, 2u64..=3)
            .prop_map(|(k, m)| SetDescriptor::Construction42 { k, m }),
        Just(SetDescriptor::CorollaryB),
        Just(SetDescriptor::Naturals),
    ]
}

fn descriptor() -> impl Strategy<Value = SetDescriptor> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..=2)
                .prop_map(|children| SetDescriptor::Union { children }),
            prop::collection::vec(inner.clone(), 1..=2)
                .prop_map(|children| SetDescriptor::Intersection { children }),
            inner.clone().prop_map(SetDescriptor::complement),
            (inner.clone(), -20i64..=20)
                .prop_map(|(child, by)| SetDescriptor::translate(child, by)),
            inner.clone().prop_map(SetDescriptor::reflect),
            (inner, 1u64..=4).prop_map(|(child, k)| SetDescriptor::IndexLift {
                k,
                child: Box::new(child),
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// decode -> encode is the identity on arbitrary pair prefixes once the
    /// window closes flush with the final gap.
    #[test]
    fn block_round_trip(pairs in prop::collection::vec((1u64..=20, 1u64..=20), 1..=50)) {
        let (alpha, beta): (Vec<u64>, Vec<u64>) = pairs.iter().copied().unzip();
        let span: u64 = alpha.iter().sum::<u64>() + beta.iter().sum::<u64>();
        let stream = BlockStream::new(
            FinitePairs::new(alpha, beta, TailPolicy::RepeatLast).unwrap(),
        );
        let w = blocks_to_window(&stream, span as i64 - 1).unwrap();
        prop_assert_eq!(encode_blocks(&w, true).unwrap(), pairs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Window bits agree with pointwise membership for every descriptor shape.
    #[test]
    fn member_window_coherence(desc in descriptor(), lo in -60i64..=60, len in 1i64..=80) {
        let limits = Limits::default();
        let eval = desc.compile(&limits).unwrap();
        let hi = lo + len - 1;
        let w = eval.window(lo, hi).unwrap();
        for z in lo..=hi {
            prop_assert_eq!(w.get(z), eval.member(z as i128).unwrap(), "at z = {}", z);
        }
    }

    /// The algebra nodes are exactly their pointwise boolean meanings.
    #[test]
    fn algebra_is_pointwise(a in leaf(), b in leaf(), lo in -40i64..=40, len in 1i64..=60, by in -15i64..=15) {
        let limits = Limits::default();
        let hi = lo + len - 1;
        let wa = a.compile(&limits).unwrap().window(lo, hi).unwrap();
        let wb = b.compile(&limits).unwrap().window(lo, hi).unwrap();

        let union = SetDescriptor::union(vec![a.clone(), b.clone()])
            .compile(&limits).unwrap().window(lo, hi).unwrap();
        let inter = SetDescriptor::intersection(vec![a.clone(), b.clone()])
            .compile(&limits).unwrap().window(lo, hi).unwrap();
        let comp = SetDescriptor::complement(a.clone())
            .compile(&limits).unwrap().window(lo, hi).unwrap();
        let trans = SetDescriptor::translate(a.clone(), by)
            .compile(&limits).unwrap().window(lo, hi).unwrap();
        let refl = SetDescriptor::reflect(a.clone())
            .compile(&limits).unwrap().window(lo, hi).unwrap();
        let a_eval = a.compile(&limits).unwrap();

        for z in lo..=hi {
            prop_assert_eq!(union.get(z), wa.get(z) || wb.get(z));
            prop_assert_eq!(inter.get(z), wa.get(z) && wb.get(z));
            prop_assert_eq!(comp.get(z), !wa.get(z));
            prop_assert_eq!(trans.get(z), a_eval.member((z - by) as i128).unwrap());
            prop_assert_eq!(refl.get(z), a_eval.member(-(z as i128)).unwrap());
        }
    }

    /// Sets not containing 0 have no plus-side block code.
    #[test]
    fn omega_gate(period in 1u64..=9, shift in 1i64..=8) {
        let limits = Limits::default();
        let desc = SetDescriptor::translate(
            SetDescriptor::Periodic { period, residues: vec![0] },
            shift % period as i64,
        );
        let eval = desc.compile(&limits).unwrap();
        let has_zero = eval.member(0).unwrap();
        let stream = eval.plus_pair_stream();
        if has_zero {
            prop_assert!(stream.is_ok());
        } else {
            prop_assert!(matches!(stream, Err(Error::OmegaViolation)));
        }
    }
}
