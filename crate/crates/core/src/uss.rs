//! Bounded-difference progression structure.
//!
//! A set is "uniformly rich at difference `D`" when it contains arbitrarily
//! long chains whose consecutive differences stay ≤ `D`. Complete syndeticity
//! of `A ⊆ ℤ` is equivalent to the *absence* of that structure in ℤ∖A for
//! every `D`, which in block coordinates becomes a pair of stream conditions:
//! gaps bounded (`β_n ≤ b`) and long blocks everywhere (`every index window
//! of length L(D) contains some α ≥ D`). This module provides the chain
//! scanner, the empirical and analytic `L` functions, the stream checker, and
//! the certificate object the witness synthesizer consumes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::blocks::BlockStream;
use crate::construction::{self, ConstructionParams};
use crate::descriptor::{Limits, SetEval};
use crate::error::{Error, Result};
use crate::window::Window;

/// A chain of members with consecutive differences in `[1, d]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubApChain {
    pub d: u64,
    pub elements: Vec<i64>,
}

impl SubApChain {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Re-verify every element and every gap against an evaluator.
    pub fn verify(&self, eval: &SetEval) -> Result<bool> {
        for pair in self.elements.windows(2) {
            let diff = pair[1] - pair[0];
            if diff < 1 || diff > self.d as i64 {
                return Ok(false);
            }
        }
        for &z in &self.elements {
            if !eval.member(z as i128)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Longest chain of members of `w` with consecutive differences ≤ `d`.
/// Ties resolve to the leftmost chain.
pub fn longest_sub_ap(w: &Window, d: u64) -> SubApChain {
    assert!(d >= 1, "difference bound must be >= 1");
    let mut best: Option<(i64, i64, usize)> = None; // (start, end, len)
    let mut run_start: Option<i64> = None;
    let mut prev = 0i64;
    let mut run_len = 0usize;
    let flush = |start: Option<i64>, prev: i64, len: usize, best: &mut Option<(i64, i64, usize)>| {
        if let Some(s) = start {
            if best.is_none_or(|(_, _, bl)| len > bl) {
                *best = Some((s, prev, len));
            }
        }
    };
    for z in w.members() {
        match run_start {
            Some(_) if z - prev <= d as i64 => {
                run_len += 1;
            }
            _ => {
                flush(run_start, prev, run_len, &mut best);
                run_start = Some(z);
                run_len = 1;
            }
        }
        prev = z;
    }
    flush(run_start, prev, run_len, &mut best);
    match best {
        None => SubApChain { d, elements: Vec::new() },
        Some((start, end, _)) => SubApChain {
            d,
            elements: w.members().filter(|&z| z >= start && z <= end).collect(),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSample {
    pub horizon: i64,
    pub plus_len: usize,
    pub minus_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UssProfile {
    pub d: u64,
    pub samples: Vec<ProfileSample>,
}

/// Longest-chain lengths of both sides at each horizon: plus side scans
/// `[0, h]`, minus side scans `[-h, 0]` (chain length is reflection
/// invariant, so this is the chain length of `(−A) ∩ ℕ`).
pub fn uss_profile(eval: &SetEval, d: u64, horizons: &[i64]) -> Result<UssProfile> {
    let mut samples = Vec::with_capacity(horizons.len());
    for (i, &h) in horizons.iter().enumerate() {
        if h < 0 {
            return Err(Error::Invalid("horizons must be nonnegative".into()));
        }
        if i > 0 && h < horizons[i - 1] {
            return Err(Error::Invalid("horizons must be given in ascending order".into()));
        }
        let plus = longest_sub_ap(&eval.window(0, h)?, d).len();
        let minus = longest_sub_ap(&eval.window(-h, 0)?, d).len();
        samples.push(ProfileSample { horizon: h, plus_len: plus, minus_len: minus });
    }
    Ok(UssProfile { d, samples })
}

/// Smallest `L` such that *every* index window `[m, m+L-1]` inside the
/// 1-based prefix `[1, prefix_len]` contains some `α ≥ d` — including the
/// initial window at `m = 1` and the trailing windows after the last hit.
/// `None` when no prefix window length works (no hit at all).
pub fn empirical_l(stream: &BlockStream, d: u64, prefix_len: u64) -> Result<Option<u64>> {
    if prefix_len == 0 {
        return Err(Error::Invalid("prefix must be non-empty".into()));
    }
    let mut last_hit: u64 = 0;
    let mut max_stretch: u64 = 0; // longest hit-free stretch a window must bridge
    let mut any = false;
    for i in 1..=prefix_len {
        let (alpha, _) = stream.pair(i as usize)?;
        if alpha >= d {
            max_stretch = max_stretch.max(i - last_hit);
            last_hit = i;
            any = true;
        }
    }
    if !any {
        return Ok(None);
    }
    // Trailing: a window of length L starting after the last hit must not fit.
    Ok(Some(max_stretch.max(prefix_len - last_hit + 1)))
}

/// Analytic window length for the triangular-array stream:
/// `L(D) = R_D + r_{D+1} + 1`. The bound holding for all start indices comes
/// from two facts: past `R_D` every stretch of `r_{D+1}` indices meets an
/// entry ≥ D, and the initial segment is absorbed by the `R_D` term.
/// Independent of the gap parameter.
pub fn construction42_l(m: u64, d: u64) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::Invalid("D must be >= 1".into()));
    }
    Ok(construction::rows_total(d, m)? + construction::row_len(d + 1, m)? + 1)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Some gap exceeds the certified bound.
    GapBound { index: u64, beta: u64, bound: u64 },
    /// A full window `[start, start+l-1]` has no block of length ≥ d.
    AlphaWindow { start: u64, l: u64, d: u64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum UssCheckOutcome {
    Pass { prefix_len: u64, l: u64, d: u64, gap_bound: u64 },
    Violation {
        #[serde(flatten)]
        violation: Violation,
    },
}

impl UssCheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, UssCheckOutcome::Pass { .. })
    }
}

/// Check the two stream conditions over the 1-based prefix `[1, prefix_len]`:
/// every `β_i ≤ gap_bound`, and every full window of length `l` contains some
/// `α ≥ d`. Reports the first violation encountered in index order.
pub fn check_not_uss(
    stream: &BlockStream,
    gap_bound: u64,
    l: u64,
    d: u64,
    prefix_len: u64,
) -> Result<UssCheckOutcome> {
    if l == 0 {
        return Err(Error::Invalid("window length L must be >= 1".into()));
    }
    if prefix_len < l {
        return Err(Error::Invalid(format!(
            "prefix length {prefix_len} is shorter than the window length {l}"
        )));
    }
    let mut last_hit: u64 = 0;
    for i in 1..=prefix_len {
        let (alpha, beta) = stream.pair(i as usize)?;
        if beta > gap_bound {
            return Ok(UssCheckOutcome::Violation {
                violation: Violation::GapBound { index: i, beta, bound: gap_bound },
            });
        }
        if alpha >= d {
            last_hit = i;
        }
        if i >= l && last_hit + l <= i {
            // Window [i-l+1, i] is fully scanned and hit-free.
            return Ok(UssCheckOutcome::Violation {
                violation: Violation::AlphaWindow { start: i - l + 1, l, d },
            });
        }
    }
    Ok(UssCheckOutcome::Pass { prefix_len, l, d, gap_bound })
}

/// How a certificate's `L` function is known.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// Closed form, no scan involved.
    Analytic,
    /// Scanned from a stream prefix; defined only where the scan saw hits.
    Empirical { prefix_len: u64 },
    /// Closed form cross-checked against prefix scans up to `max_d`.
    AnalyticValidated { max_d: u64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum LFunction {
    Constant { value: u64 },
    /// `R_D + r_{D+1} + 1` for row multiplier `m`.
    Construction42 { m: u64 },
    Table { entries: BTreeMap<u64, u64> },
}

/// The object that certifies "complement carries no uniform progression
/// structure": a gap bound `b` and a window-length function `D ↦ L(D)`.
/// Witness synthesis consumes exactly this.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub gap_bound: u64,
    pub l: LFunction,
    pub provenance: Provenance,
}

impl Certificate {
    pub fn constant(gap_bound: u64, l: u64) -> Self {
        Certificate { gap_bound, l: LFunction::Constant { value: l }, provenance: Provenance::Analytic }
    }

    /// Certificate for the triangular-array set: `b = K`, analytic `L`,
    /// cross-validated against empirical scans for `D ≤ validate_max_d` over
    /// prefixes of length `2·R_{D+2}` each.
    pub fn for_construction42(k: u64, m: u64, validate_max_d: u64) -> Result<Certificate> {
        let params = ConstructionParams::new(k, m)?;
        for d in 1..=validate_max_d {
            let prefix = (2u64).checked_mul(
                construction::rows_total(d + 2, m)?
                    .to_u64()
                    .ok_or_else(|| Error::OutOfRange("validation prefix too long".into()))?,
            )
            .ok_or_else(|| Error::OutOfRange("validation prefix too long".into()))?;
            let stream = BlockStream::with_budget(
                construction::alpha_source(params),
                prefix.max(crate::blocks::DEFAULT_STREAM_BUDGET),
            );
            let analytic = construction42_l(m, d)?;
            match empirical_l(&stream, d, prefix)? {
                Some(e) if BigInt::from(e) <= analytic => {}
                Some(e) => {
                    return Err(Error::Invalid(format!(
                        "analytic L({d}) = {analytic} fails empirical validation (scan gives {e})"
                    )))
                }
                None => {
                    return Err(Error::Invalid(format!(
                        "no block of length >= {d} in the first {prefix} pairs"
                    )))
                }
            }
        }
        Ok(Certificate {
            gap_bound: k,
            l: LFunction::Construction42 { m },
            provenance: Provenance::AnalyticValidated { max_d: validate_max_d },
        })
    }

    /// Purely empirical certificate: scan a prefix, record the observed gap
    /// bound and a table of `L` values at the requested `D`s (undefined
    /// entries are omitted and later error as certificate-domain misses).
    pub fn empirical_from_stream(
        stream: &BlockStream,
        prefix_len: u64,
        ds: &[u64],
    ) -> Result<Certificate> {
        let mut b = 0u64;
        for i in 1..=prefix_len {
            b = b.max(stream.pair(i as usize)?.1);
        }
        let mut entries = BTreeMap::new();
        for &d in ds {
            if let Some(l) = empirical_l(stream, d, prefix_len)? {
                entries.insert(d, l);
            }
        }
        Ok(Certificate {
            gap_bound: b,
            l: LFunction::Table { entries },
            provenance: Provenance::Empirical { prefix_len },
        })
    }

    /// Evaluate `L(D)`.
    pub fn l_at(&self, d: u64) -> Result<BigInt> {
        match &self.l {
            LFunction::Constant { value } => Ok(BigInt::from(*value)),
            LFunction::Construction42 { m } => construction42_l(*m, d),
            LFunction::Table { entries } => entries
                .get(&d)
                .map(|&v| BigInt::from(v))
                .ok_or(Error::CertificateDomain { d }),
        }
    }
}

/// Drive [`check_not_uss`] for the plus-side stream of a compiled descriptor
/// using a certificate's parameters at a given `D`.
pub fn certify_descriptor(
    eval: &SetEval,
    cert: &Certificate,
    d: u64,
    prefix_len: u64,
    _limits: &Limits,
) -> Result<UssCheckOutcome> {
    let stream = eval.plus_pair_stream()?;
    let l = cert
        .l_at(d)?
        .to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("L(D={d}) exceeds the scannable range")))?;
    check_not_uss(&stream, cert.gap_bound, l, d, prefix_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{FinitePairs, TailPolicy};
    use crate::descriptor::SetDescriptor;

    fn c42_stream(k: u64, m: u64) -> BlockStream {
        BlockStream::new(construction::alpha_source(ConstructionParams::new(k, m).unwrap()))
    }

    fn finite(alpha: &[u64], beta: &[u64], tail: TailPolicy) -> BlockStream {
        BlockStream::new(FinitePairs::new(alpha.to_vec(), beta.to_vec(), tail).unwrap())
    }

    #[test]
    fn chains_in_even_window() {
        let e = SetDescriptor::evens().compile(&Limits::default()).unwrap();
        let w = e.window(0, 20).unwrap();
        let c = longest_sub_ap(&w, 2);
        assert_eq!(c.len(), 11);
        assert_eq!(c.elements, (0..=10).map(|i| 2 * i).collect::<Vec<_>>());
        // With d = 1 no two members are adjacent: chains are singletons.
        assert_eq!(longest_sub_ap(&w, 1).len(), 1);
        assert!(c.verify(&e).unwrap());
    }

    #[test]
    fn chain_brute_force_agreement() {
        // Oracle: maximal run growth by direct quadratic scan.
        fn brute(members: &[i64], d: i64) -> usize {
            let mut best = 0;
            for i in 0..members.len() {
                let mut len = 1;
                let mut prev = members[i];
                for &z in &members[i + 1..] {
                    if z - prev <= d {
                        len += 1;
                        prev = z;
                    } else {
                        break;
                    }
                }
                best = best.max(len);
            }
            best
        }
        let e = SetDescriptor::CorollaryB.compile(&Limits::default()).unwrap();
        for d in 1..=4u64 {
            let w = e.window(-40, 90).unwrap();
            let members: Vec<i64> = w.members().collect();
            assert_eq!(longest_sub_ap(&w, d).len(), brute(&members, d as i64), "d={d}");
        }
    }

    #[test]
    fn empirical_l_values() {
        // Shown prefix of the M=2 array: first window [1,3] has no α ≥ 2, so
        // L = 4 (not 3: the initial segment counts).
        let s = c42_stream(1, 2);
        assert_eq!(empirical_l(&s, 2, 11).unwrap(), Some(4));
        assert_eq!(empirical_l(&s, 1, 11).unwrap(), Some(1));
        assert_eq!(empirical_l(&s, 3, 200).unwrap(), Some(11));
        // Constant α = 1: any d ≥ 2 has no hits.
        let ones = finite(&[1], &[1], TailPolicy::RepeatLast);
        assert_eq!(empirical_l(&ones, 2, 50).unwrap(), None);
        assert_eq!(empirical_l(&ones, 1, 50).unwrap(), Some(1));
    }

    #[test]
    fn analytic_l_values() {
        assert_eq!(construction42_l(2, 1).unwrap(), BigInt::from(5)); // R_1 + r_2 + 1
        assert_eq!(construction42_l(2, 2).unwrap(), BigInt::from(12)); // R_2 + r_3 + 1
    }

    #[test]
    fn empirical_below_analytic() {
        for d in 1..=6u64 {
            let prefix = 2 * construction::rows_total(d + 2, 2).unwrap().to_u64().unwrap();
            let s = c42_stream(1, 2);
            let e = empirical_l(&s, d, prefix).unwrap().expect("finite");
            assert!(
                BigInt::from(e) <= construction42_l(2, d).unwrap(),
                "d={d}: empirical {e} exceeds analytic"
            );
        }
    }

    #[test]
    fn not_uss_check_passes_for_array_stream() {
        let s = c42_stream(1, 2);
        let l = construction42_l(2, 2).unwrap().to_u64().unwrap();
        let out = check_not_uss(&s, 1, l, 2, 500).unwrap();
        assert!(out.passed(), "{out:?}");
    }

    #[test]
    fn not_uss_check_detects_violations() {
        // Gap 3 at pair 4 violates bound 2.
        let s = finite(&[1, 1, 1, 1], &[2, 2, 2, 3], TailPolicy::RepeatLast);
        match check_not_uss(&s, 2, 2, 1, 10).unwrap() {
            UssCheckOutcome::Violation { violation: Violation::GapBound { index, beta, .. } } => {
                assert_eq!((index, beta), (4, 3));
            }
            other => panic!("expected gap violation, got {other:?}"),
        }
        // Constant α = 1 never shows a block ≥ 2: first full window fails.
        let ones = finite(&[1], &[1], TailPolicy::RepeatLast);
        match check_not_uss(&ones, 1, 4, 2, 10).unwrap() {
            UssCheckOutcome::Violation { violation: Violation::AlphaWindow { start, .. } } => {
                assert_eq!(start, 1);
            }
            other => panic!("expected alpha violation, got {other:?}"),
        }
    }

    #[test]
    fn profile_monotone_in_horizon() {
        let e = SetDescriptor::CorollaryB.compile(&Limits::default()).unwrap();
        let p = uss_profile(&e, 2, &[50, 200, 1000, 5000]).unwrap();
        for pair in p.samples.windows(2) {
            assert!(pair[1].plus_len >= pair[0].plus_len);
            assert!(pair[1].minus_len >= pair[0].minus_len);
        }
    }

    #[test]
    fn certificates() {
        let c = Certificate::for_construction42(1, 2, 6).unwrap();
        assert_eq!(c.gap_bound, 1);
        assert_eq!(c.l_at(3).unwrap(), BigInt::from(27)); // R_3 + r_4 + 1
        assert!(matches!(c.provenance, Provenance::AnalyticValidated { max_d: 6 }));

        let s = c42_stream(1, 2);
        let emp = Certificate::empirical_from_stream(&s, 200, &[1, 2, 3, 40]).unwrap();
        assert_eq!(emp.gap_bound, 1);
        assert_eq!(emp.l_at(3).unwrap(), BigInt::from(11));
        assert!(matches!(emp.l_at(40), Err(Error::CertificateDomain { d: 40 })));
    }
}
