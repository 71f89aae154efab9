//! n-syndetic witnesses: checking, searching, synthesis, refutation.
//!
//! A translate family `F` verifies at level `n` over a window `W` when every
//! subset `S ⊆ W` with `|S| ≤ n` has some `f ∈ F` with `S − f ⊆ A`. Failure
//! is witnessed by a hitting set of the bad-set family `B_f = W ∖ (f + A)`,
//! found by the signature solver in [`crate::hitting`].
//!
//! Synthesized families can be astronomically large (their radii come from a
//! certificate recursion that compounds `L` values), so a family is either an
//! explicit list or a symmetric interval given by its radius; interval
//! families are enumerated lazily in `(|f|, nonnegative first)` order with a
//! sound early exit — a subfamily that already verifies settles the whole
//! family, while refutation requires exhausting it.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::descriptor::{SetDescriptor, SetEval};
use crate::error::{Error, Result};
use crate::hitting::SignatureAccum;
use crate::uss::Certificate;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TranslateFamily {
    List { translates: Vec<i64> },
    Interval {
        #[serde(with = "crate::bigser::big")]
        radius: BigInt,
    },
}

impl TranslateFamily {
    /// Explicit family; deduplicated and stored sorted by `(|f|, f)`.
    pub fn list(translates: &[i64]) -> Result<Self> {
        if translates.is_empty() {
            return Err(Error::Invalid("translate list must be nonempty".into()));
        }
        let mut v = translates.to_vec();
        v.sort_by_key(|&f| (f.unsigned_abs(), f));
        v.dedup();
        Ok(TranslateFamily::List { translates: v })
    }

    /// All integers with `|f| ≤ radius`.
    pub fn interval(radius: BigInt) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::Invalid("interval radius must be nonnegative".into()));
        }
        Ok(TranslateFamily::Interval { radius })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub f: i64,
    pub s: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CheckOutcome {
    /// No size-≤n subset of the window escapes the family. When
    /// `family_exhausted` is false, a prefix of an interval family already
    /// sufficed (sound: supersets of a verifying family verify).
    Verified { family_exhausted: bool },
    /// `counterexample` escapes every translate; `evidence` pins, for each
    /// examined `f`, one `s` with `s − f ∉ A`.
    Refuted { counterexample: Vec<i64>, evidence: Vec<Evidence> },
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub n: u32,
    pub lo: i64,
    pub hi: i64,
    pub translates_examined: u64,
    pub solver_nodes: u64,
    #[serde(flatten)]
    pub outcome: CheckOutcome,
}

impl CheckReport {
    pub fn verified(&self) -> bool {
        matches!(self.outcome, CheckOutcome::Verified { .. })
    }
}

/// Window positions in scan order: `(|z|, nonnegative first)`.
fn ranked_positions(lo: i64, hi: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (lo..=hi).collect();
    v.sort_by_key(|&z| (z.unsigned_abs(), z < 0));
    v
}

struct CoverageBuilder<'a> {
    eval: &'a SetEval,
    lo: i64,
    hi: i64,
    ranks: &'a [i64],
}

impl CoverageBuilder<'_> {
    /// Per-rank coverage words for ≤ 64 translates: bit `j` of word `r` says
    /// rank `r`'s position lies in `fs[j] + A`.
    fn chunk(&self, fs: &[i64]) -> Result<Vec<u64>> {
        let mut words = vec![0u64; self.ranks.len()];
        for (j, &f) in fs.iter().enumerate() {
            let lo = self
                .lo
                .checked_sub(f)
                .ok_or_else(|| Error::OutOfRange("translate overflows the window".into()))?;
            let hi = self
                .hi
                .checked_sub(f)
                .ok_or_else(|| Error::OutOfRange("translate overflows the window".into()))?;
            let w = self.eval.window(lo, hi)?;
            for (r, &p) in self.ranks.iter().enumerate() {
                if w.get_idx((p - self.lo) as usize) {
                    words[r] |= 1 << j;
                }
            }
        }
        Ok(words)
    }
}

fn validate_check_args(n: u32, lo: i64, hi: i64) -> Result<()> {
    if n == 0 || n > 64 {
        return Err(Error::Invalid("n must be between 1 and 64".into()));
    }
    if lo > hi {
        return Err(Error::Invalid("window is empty".into()));
    }
    Ok(())
}

fn refutation_outcome(
    eval: &SetEval,
    ranks: &[i64],
    counter_ranks: &[usize],
    examined: &[i64],
) -> Result<CheckOutcome> {
    let mut s: Vec<i64> = counter_ranks.iter().map(|&r| ranks[r]).collect();
    s.sort_unstable();
    s.dedup();
    let mut fs = examined.to_vec();
    fs.sort_unstable();
    let mut evidence = Vec::with_capacity(fs.len());
    for f in fs {
        let mut hit = None;
        for &z in &s {
            if !eval.member(z as i128 - f as i128)? {
                hit = Some(z);
                break;
            }
        }
        match hit {
            Some(z) => evidence.push(Evidence { f, s: z }),
            None => {
                return Err(Error::Invalid(format!(
                    "counterexample failed re-verification at translate {f}"
                )))
            }
        }
    }
    Ok(CheckOutcome::Refuted { counterexample: s, evidence })
}

/// Does any `S ⊆ [lo, hi]` with `|S| ≤ n` escape every translate of the
/// family? List families are solved whole; interval families are enumerated
/// in scan order with doubling checkpoints and exit as soon as a prefix
/// verifies.
pub fn check_witness(
    eval: &SetEval,
    n: u32,
    family: &TranslateFamily,
    lo: i64,
    hi: i64,
) -> Result<CheckReport> {
    validate_check_args(n, lo, hi)?;
    let limits = *eval.limits();
    let ranks = ranked_positions(lo, hi);
    let builder = CoverageBuilder { eval, lo, hi, ranks: &ranks };
    let mut acc = SignatureAccum::new(ranks.len());
    let mut nodes = 0u64;

    let report = |outcome: CheckOutcome, examined: u64, nodes: u64| CheckReport {
        n,
        lo,
        hi,
        translates_examined: examined,
        solver_nodes: nodes,
        outcome,
    };

    match family {
        TranslateFamily::List { translates } => {
            for fs in translates.chunks(64) {
                acc.push_chunk(&builder.chunk(fs)?, fs.len());
            }
            match acc.solve(n, limits.solver_nodes, &mut nodes)? {
                None => Ok(report(
                    CheckOutcome::Verified { family_exhausted: true },
                    translates.len() as u64,
                    nodes,
                )),
                Some(cr) => Ok(report(
                    refutation_outcome(eval, &ranks, &cr, translates)?,
                    translates.len() as u64,
                    nodes,
                )),
            }
        }
        TranslateFamily::Interval { radius } => {
            let mut examined: Vec<i64> = Vec::new();
            let mut pending: Vec<i64> = Vec::new();
            let mut scan = 0i64;
            let mut negative_next = false;
            let mut exhausted = BigInt::from(0) > *radius; // radius ≥ 0: false
            // The last counterexample found; the solver only re-runs once
            // some new translate covers all of it (or the family runs out).
            let mut live: Option<Vec<usize>> = None;
            loop {
                // Next translates in (|f|, nonnegative first) order.
                while !exhausted && pending.len() < 64 {
                    let f = if negative_next { -scan } else { scan };
                    pending.push(f);
                    if scan == 0 || negative_next {
                        scan += 1;
                        negative_next = false;
                        if BigInt::from(scan) > *radius {
                            exhausted = true;
                        }
                    } else {
                        negative_next = true;
                    }
                }
                if !pending.is_empty() {
                    let words = builder.chunk(&pending)?;
                    if let Some(cr) = &live {
                        let mut joint = !0u64;
                        for &r in cr {
                            joint &= words[r];
                        }
                        if joint != 0 {
                            live = None;
                        }
                    }
                    acc.push_chunk(&words, pending.len());
                    examined.append(&mut pending);
                }
                if live.is_none() || exhausted {
                    match acc.solve(n, limits.solver_nodes, &mut nodes)? {
                        None => {
                            return Ok(report(
                                CheckOutcome::Verified { family_exhausted: exhausted },
                                examined.len() as u64,
                                nodes,
                            ))
                        }
                        Some(cr) if exhausted => {
                            return Ok(report(
                                refutation_outcome(eval, &ranks, &cr, &examined)?,
                                examined.len() as u64,
                                nodes,
                            ))
                        }
                        Some(cr) => live = Some(cr),
                    }
                }
                if examined.len() as u64 >= limits.max_translates {
                    return Err(Error::budget(limits.max_translates, "translate enumeration"));
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum WitnessStatus {
    VerifiedUpTo { horizon: i64 },
}

/// A concrete verified witness: `translates` sorted by `(|f|, f)`.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub n: u32,
    pub translates: Vec<i64>,
    #[serde(flatten)]
    pub status: WitnessStatus,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FindOutcome {
    Found {
        #[serde(flatten)]
        witness: Witness,
        solver_nodes: u64,
    },
    Failed { reason: String },
}

/// Search `[−search_radius, search_radius]` for a verifying family: greedy
/// maximum coverage for the level-1 core, then counterexample-driven growth
/// for higher levels. Deterministic; not minimal.
pub fn find_witness(
    eval: &SetEval,
    n: u32,
    lo: i64,
    hi: i64,
    search_radius: i64,
) -> Result<FindOutcome> {
    validate_check_args(n, lo, hi)?;
    if search_radius < 0 {
        return Err(Error::Invalid("search radius must be nonnegative".into()));
    }
    let limits = *eval.limits();
    let n_pos = (hi - lo + 1) as usize;
    let words = n_pos.div_ceil(64);
    let candidates = ranked_positions(-search_radius, search_radius);
    if candidates.len() as u64 > limits.max_translates {
        return Err(Error::budget(limits.max_translates, "candidate translates"));
    }
    if candidates.len().saturating_mul(words) > (1 << 23) {
        return Err(Error::OutOfRange(
            "candidate coverage table too large; shrink the window or radius".into(),
        ));
    }
    // Coverage bitsets in raw window order (rank order only matters for
    // scanning candidates, which `candidates` already fixes).
    let mut coverage: Vec<Vec<u64>> = Vec::with_capacity(candidates.len());
    for &f in &candidates {
        let w = eval.window(
            lo.checked_sub(f).ok_or_else(|| Error::OutOfRange("translate overflow".into()))?,
            hi.checked_sub(f).ok_or_else(|| Error::OutOfRange("translate overflow".into()))?,
        )?;
        let mut bits = vec![0u64; words];
        for i in 0..n_pos {
            if w.get_idx(i) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        coverage.push(bits);
    }

    // Greedy cover: always take the candidate covering the most yet-uncovered
    // positions; ties go to the earlier candidate in scan order.
    let mut uncovered = vec![!0u64; words];
    if !n_pos.is_multiple_of(64) {
        uncovered[words - 1] = (1u64 << (n_pos % 64)) - 1;
    }
    let mut left = n_pos as u64;
    let mut chosen: Vec<i64> = Vec::new();
    let mut in_family = vec![false; candidates.len()];
    while left > 0 {
        let mut best: Option<(u64, usize)> = None;
        for (ci, bits) in coverage.iter().enumerate() {
            if in_family[ci] {
                continue;
            }
            let gain: u64 =
                bits.iter().zip(&uncovered).map(|(&c, &u)| (c & u).count_ones() as u64).sum();
            if best.is_none_or(|(bg, _)| gain > bg) {
                best = Some((gain, ci));
            }
        }
        match best {
            Some((gain, ci)) if gain > 0 => {
                in_family[ci] = true;
                chosen.push(candidates[ci]);
                for (u, &c) in uncovered.iter_mut().zip(&coverage[ci]) {
                    *u &= !c;
                }
                left -= gain;
            }
            _ => {
                let stuck = (0..n_pos)
                    .find(|&i| uncovered[i / 64] >> (i % 64) & 1 == 1)
                    .map(|i| lo + i as i64);
                return Ok(FindOutcome::Failed {
                    reason: format!(
                        "position {} is not covered by any translate within radius {search_radius}",
                        stuck.expect("some position uncovered")
                    ),
                });
            }
        }
    }

    // Higher levels: grow the family until the refuter finds no escape.
    let mut nodes_total = 0u64;
    loop {
        let family = TranslateFamily::list(&chosen)?;
        let translates = match &family {
            TranslateFamily::List { translates } => translates.clone(),
            _ => unreachable!(),
        };
        let rep = check_witness(eval, n, &family, lo, hi)?;
        nodes_total += rep.solver_nodes;
        match rep.outcome {
            CheckOutcome::Verified { .. } => {
                return Ok(FindOutcome::Found {
                    witness: Witness {
                        n,
                        translates,
                        status: WitnessStatus::VerifiedUpTo {
                            horizon: lo.unsigned_abs().max(hi.unsigned_abs()) as i64,
                        },
                    },
                    solver_nodes: nodes_total,
                });
            }
            CheckOutcome::Refuted { counterexample, .. } => {
                let fix = candidates.iter().enumerate().find(|&(ci, _)| {
                    !in_family[ci]
                        && counterexample.iter().all(|&s| {
                            let i = (s - lo) as usize;
                            coverage[ci][i / 64] >> (i % 64) & 1 == 1
                        })
                });
                match fix {
                    Some((ci, &f)) => {
                        in_family[ci] = true;
                        chosen.push(f);
                    }
                    None => {
                        return Ok(FindOutcome::Failed {
                            reason: format!(
                                "no translate within radius {search_radius} covers {counterexample:?}"
                            ),
                        })
                    }
                }
            }
        }
    }
}

/// One level of the certified family tower: all integers with
/// `|f| ≤ radius`.
#[derive(Clone, Debug, Serialize)]
pub struct SynthesizedWitness {
    pub n: u32,
    #[serde(with = "crate::bigser::big")]
    pub radius: BigInt,
    /// The `D = 2M+1` this level consumed, absent for the base level.
    pub d: Option<u64>,
    #[serde(with = "crate::bigser::bigopt")]
    pub l: Option<BigInt>,
}

impl SynthesizedWitness {
    pub fn family(&self) -> Result<TranslateFamily> {
        TranslateFamily::interval(self.radius.clone())
    }
}

/// The certificate-driven tower: `F_1 = {−b..b}`, and with `M_n` the radius
/// of `F_n`, `F_{n+1}` is the interval of radius `(b + 2M_n)(L(2M_n+1) + 3)`.
/// Radii are nondecreasing and grow roughly like iterated `L`.
pub fn synthesize_witnesses(cert: &Certificate, n_max: u32) -> Result<Vec<SynthesizedWitness>> {
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be >= 1".into()));
    }
    let b = BigInt::from(cert.gap_bound);
    let mut out = vec![SynthesizedWitness { n: 1, radius: b.clone(), d: None, l: None }];
    let mut m = b.clone();
    for n in 2..=n_max {
        let d_big: BigInt = 2 * &m + 1;
        let d = d_big.to_u64().ok_or_else(|| {
            Error::OutOfRange(format!("L argument 2M+1 for level {n} exceeds u64"))
        })?;
        let l = cert.l_at(d)?;
        let radius: BigInt = (&b + 2 * &m) * (&l + 3);
        out.push(SynthesizedWitness { n, radius: radius.clone(), d: Some(d), l: Some(l) });
        m = radius;
    }
    Ok(out)
}

/// Longest run of consecutive non-members lying strictly inside
/// `[−horizon, horizon]` (both neighbors must be members, so truncated
/// boundary runs don't count). `None` when no complete run exists.
pub fn gap_bound(eval: &SetEval, horizon: i64) -> Result<Option<u64>> {
    if horizon < 1 {
        return Err(Error::Invalid("horizon must be >= 1".into()));
    }
    let w = eval.window(-horizon, horizon)?;
    let mut best: Option<u64> = None;
    let mut run: u64 = 0;
    let mut bounded_left = false;
    for i in 0..w.len() {
        if w.get_idx(i) {
            if bounded_left && run > 0 && best.is_none_or(|b| run > b) {
                best = Some(run);
            }
            run = 0;
            bounded_left = true;
        } else {
            run += 1;
        }
    }
    Ok(best)
}

/// Longest run of consecutive members inside `[−horizon, horizon]`;
/// boundary-truncated runs count with their visible length, so the value is
/// monotone in the horizon.
pub fn thickness_runs(eval: &SetEval, horizon: i64) -> Result<u64> {
    if horizon < 1 {
        return Err(Error::Invalid("horizon must be >= 1".into()));
    }
    let w = eval.window(-horizon, horizon)?;
    let mut best = 0u64;
    let mut run = 0u64;
    for i in 0..w.len() {
        if w.get_idx(i) {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct BigEvidence {
    pub f: i64,
    #[serde(with = "crate::bigser::big")]
    pub s: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub n: u32,
    pub radius: u64,
    #[serde(with = "crate::bigser::bigvec")]
    pub counterexample: Vec<BigInt>,
    pub evidence: Vec<BigEvidence>,
}

/// The two-point obstruction for the thick-and-syndetic set: with
/// `b = 2^{2r} + r`, the pair `{b−1, b}` escapes every translate of radius
/// `r` — among any two consecutive integers near `2^{2r}` one is an even
/// point of the excluded family. Every evidence row re-verifies through
/// membership alone.
pub fn refute_two_syndetic(r: u64) -> Result<Refutation> {
    if r < 1 {
        return Err(Error::Invalid("r must be >= 1".into()));
    }
    if r > 1 << 20 {
        return Err(Error::OutOfRange("refutation radius too large".into()));
    }
    let eval = SetDescriptor::CorollaryB.compile(&crate::descriptor::Limits::default())?;
    let b: BigInt = (BigInt::from(1) << (2 * r as usize)) + r;
    let s = [&b - 1, b.clone()];
    let mut evidence = Vec::with_capacity(2 * r as usize + 1);
    for f in -(r as i64)..=(r as i64) {
        let mut hit = None;
        for z in &s {
            if !eval.member_big(&(z - f))? {
                hit = Some(z);
                break;
            }
        }
        match hit {
            Some(z) => evidence.push(BigEvidence { f, s: z.clone() }),
            None => {
                return Err(Error::Invalid(format!(
                    "refutation failed: every point of {{b-1, b}} lands inside at translate {f}"
                )))
            }
        }
    }
    Ok(Refutation { n: 2, radius: r, counterexample: s.to_vec(), evidence })
}
