//! Set descriptors: a small closed algebra of subsets of ℤ with exact
//! membership evaluation.
//!
//! A [`SetDescriptor`] is plain data (serde-friendly, hashable as canonical
//! JSON). Evaluation happens through [`SetEval`], produced by
//! [`SetDescriptor::compile`], which owns the lazily decoded stream caches so
//! that repeated window/membership queries against the same descriptor share
//! work. Two views of the same compiled descriptor always agree; that is the
//! window/member coherence invariant the tests lean on.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::blocks::{BlockStream, FinitePairs, IntervalCache, Pair, PairSource, TailPolicy};
use crate::construction;
use crate::error::{Error, Result};
use crate::window::Window;

/// Resource caps threaded through evaluation. All expansion-shaped work
/// (stream pairs, window bits, translate enumeration, ball growth, search
/// nodes) is bounded by one of these and overruns surface as
/// [`Error::Budget`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Limits {
    /// Pair expansions per lazy stream; also caps how far descriptor scans
    /// may walk when deriving a stream from membership.
    pub stream_budget: u64,
    /// Maximum window length in bits.
    pub max_window_bits: u64,
    /// Maximum translates enumerated from an interval family.
    pub max_translates: u64,
    /// Maximum elements in a word-metric ball.
    pub max_ball: u64,
    /// Maximum branch-and-bound nodes in the hitting-set search.
    pub solver_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            stream_budget: crate::blocks::DEFAULT_STREAM_BUDGET,
            max_window_bits: 1 << 28,
            max_translates: 200_000,
            max_ball: 2_000_000,
            solver_nodes: 1_000_000_000,
        }
    }
}

impl Limits {
    pub fn with_stream_budget(mut self, budget: u64) -> Self {
        self.stream_budget = budget;
        self
    }
}

/// Explicit pair list for one side of a block-encoded set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub tail: TailPolicy,
}

impl StreamSpec {
    pub fn repeat_last(alpha: Vec<u64>, beta: Vec<u64>) -> Self {
        StreamSpec { alpha, beta, tail: TailPolicy::RepeatLast }
    }

    fn to_stream(&self, limits: &Limits) -> Result<BlockStream> {
        Ok(BlockStream::with_budget(
            FinitePairs::new(self.alpha.clone(), self.beta.clone(), self.tail)?,
            limits.stream_budget,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllWord {
    #[serde(rename = "all")]
    All,
}

/// Minus side of a block-encoded set: `A⁻ = (−A) ∩ ℕ`, queried at `−z` for
/// `z < 0`. Either a block stream of its own, all of ℕ (cofinite-left sets),
/// or an explicit finite list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MinusSpec {
    All(AllWord),
    Finite { finite: Vec<u64> },
    Stream(StreamSpec),
}

impl MinusSpec {
    pub fn all() -> Self {
        MinusSpec::All(AllWord::All)
    }
}

/// Descriptor of a subset of ℤ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetDescriptor {
    /// Union of residue classes mod `period`.
    Periodic { period: u64, residues: Vec<u64> },
    /// Block-encoded: plus side decodes from 0 (so 0 is always a member),
    /// minus side describes `(−A) ∩ ℕ`.
    Blocks { plus: StreamSpec, minus: MinusSpec },
    /// The symmetric low-density completely syndetic set generated from the
    /// triangular block-length array with constant gap `K` and row
    /// multiplier `M`.
    #[serde(rename = "construction42")]
    Construction42 {
        #[serde(rename = "K")]
        k: u64,
        #[serde(rename = "M")]
        m: u64,
    },
    /// `ℤ ∖ (B ∪ −B)` for `B = {2^n + 2k : n ≥ 1, 0 ≤ k ≤ n−1}`: thick and
    /// syndetic but not completely syndetic.
    #[serde(rename = "corollaryB")]
    CorollaryB,
    /// The half-line `z ≥ 0`.
    Naturals,
    Union { children: Vec<SetDescriptor> },
    Intersection { children: Vec<SetDescriptor> },
    Complement { child: Box<SetDescriptor> },
    Translate { by: i64, child: Box<SetDescriptor> },
    Reflect { child: Box<SetDescriptor> },
    /// `{z : floor(z / k) ∈ child}` — the index-`k` lift of a set along the
    /// subgroup `kℤ`.
    IndexLift { k: u64, child: Box<SetDescriptor> },
}

impl SetDescriptor {
    pub fn evens() -> Self {
        SetDescriptor::Periodic { period: 2, residues: vec![0] }
    }

    pub fn all_of_z() -> Self {
        SetDescriptor::Periodic { period: 1, residues: vec![0] }
    }

    pub fn union(children: Vec<SetDescriptor>) -> Self {
        SetDescriptor::Union { children }
    }

    pub fn intersection(children: Vec<SetDescriptor>) -> Self {
        SetDescriptor::Intersection { children }
    }

    pub fn complement(child: SetDescriptor) -> Self {
        SetDescriptor::Complement { child: Box::new(child) }
    }

    pub fn translate(child: SetDescriptor, by: i64) -> Self {
        SetDescriptor::Translate { by, child: Box::new(child) }
    }

    pub fn reflect(child: SetDescriptor) -> Self {
        SetDescriptor::Reflect { child: Box::new(child) }
    }

    /// Split into (`A ∩ ℕ`, `(−A) ∩ ℕ`), both as descriptors over ℤ whose
    /// members all lie in ℕ.
    pub fn split(&self) -> (SetDescriptor, SetDescriptor) {
        let plus = SetDescriptor::intersection(vec![self.clone(), SetDescriptor::Naturals]);
        let minus = SetDescriptor::intersection(vec![
            SetDescriptor::reflect(self.clone()),
            SetDescriptor::Naturals,
        ]);
        (plus, minus)
    }

    /// Canonical single-line JSON form; field order is declaration order, so
    /// equal descriptors always produce identical bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }

    /// Find the member `t` minimal in (|t|, nonnegative-first) order within
    /// `[-search_radius, search_radius]` and translate so it lands on 0.
    /// Returns the normalized descriptor together with the translation that
    /// was applied to the original set.
    pub fn normalize_to_omega(
        &self,
        limits: &Limits,
        search_radius: i64,
    ) -> Result<(SetDescriptor, i64)> {
        let eval = self.compile(limits)?;
        let mut c: i64 = 16;
        loop {
            c = c.min(search_radius);
            let w = eval.window(-c, c)?;
            let mut best: Option<i64> = None;
            for z in w.members() {
                let better = match best {
                    None => true,
                    Some(b) => (z.abs(), z < 0) < (b.abs(), b < 0),
                };
                if better {
                    best = Some(z);
                }
            }
            if let Some(t) = best {
                let norm = if t == 0 { self.clone() } else { SetDescriptor::translate(self.clone(), -t) };
                return Ok((norm, -t));
            }
            if c == search_radius {
                return Err(Error::Invalid(format!(
                    "no member found within [-{search_radius}, {search_radius}]"
                )));
            }
            c = c.saturating_mul(2);
        }
    }

    pub fn compile(&self, limits: &Limits) -> Result<SetEval> {
        Ok(SetEval { node: Arc::new(self.build(limits)?), limits: *limits })
    }

    fn build(&self, limits: &Limits) -> Result<EvalNode> {
        Ok(match self {
            SetDescriptor::Periodic { period, residues } => {
                if *period == 0 {
                    return Err(Error::InvalidDescriptor("period must be >= 1".into()));
                }
                if *period > limits.max_window_bits {
                    return Err(Error::OutOfRange(format!(
                        "period {period} exceeds the materialization cap"
                    )));
                }
                if let Some(&r) = residues.iter().find(|&&r| r >= *period) {
                    return Err(Error::InvalidDescriptor(format!(
                        "residue {r} out of range for period {period}"
                    )));
                }
                let mut table = vec![false; *period as usize];
                for &r in residues {
                    table[r as usize] = true;
                }
                EvalNode::Periodic { period: *period, table }
            }
            SetDescriptor::Blocks { plus, minus } => EvalNode::Blocks {
                plus: IntervalCache::new(plus.to_stream(limits)?),
                minus: match minus {
                    MinusSpec::All(_) => MinusEval::All,
                    MinusSpec::Finite { finite } => {
                        let mut v = finite.clone();
                        v.sort_unstable();
                        v.dedup();
                        MinusEval::Finite(v)
                    }
                    MinusSpec::Stream(s) => MinusEval::Stream(IntervalCache::new(s.to_stream(limits)?)),
                },
            },
            SetDescriptor::Construction42 { k, m } => {
                let params = construction::ConstructionParams::new(*k, *m)?;
                EvalNode::Construction42 {
                    cache: IntervalCache::new(BlockStream::with_budget(
                        construction::alpha_source(params),
                        limits.stream_budget,
                    )),
                }
            }
            SetDescriptor::CorollaryB => EvalNode::CorollaryB,
            SetDescriptor::Naturals => EvalNode::Naturals,
            SetDescriptor::Union { children } => {
                if children.is_empty() {
                    return Err(Error::InvalidDescriptor("union needs at least one child".into()));
                }
                EvalNode::Union(children.iter().map(|c| c.build(limits)).collect::<Result<_>>()?)
            }
            SetDescriptor::Intersection { children } => {
                if children.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "intersection needs at least one child".into(),
                    ));
                }
                EvalNode::Intersection(
                    children.iter().map(|c| c.build(limits)).collect::<Result<_>>()?,
                )
            }
            SetDescriptor::Complement { child } => EvalNode::Complement(Box::new(child.build(limits)?)),
            SetDescriptor::Translate { by, child } => {
                EvalNode::Translate { by: *by, child: Box::new(child.build(limits)?) }
            }
            SetDescriptor::Reflect { child } => EvalNode::Reflect(Box::new(child.build(limits)?)),
            SetDescriptor::IndexLift { k, child } => {
                if *k == 0 {
                    return Err(Error::InvalidDescriptor("index lift needs k >= 1".into()));
                }
                EvalNode::IndexLift { k: *k, child: Box::new(child.build(limits)?) }
            }
        })
    }
}

enum MinusEval {
    All,
    Finite(Vec<u64>),
    Stream(IntervalCache),
}

impl MinusEval {
    fn contains(&self, m: i128) -> Result<bool> {
        debug_assert!(m > 0);
        Ok(match self {
            MinusEval::All => true,
            MinusEval::Finite(v) => {
                m <= u64::MAX as i128 && v.binary_search(&(m as u64)).is_ok()
            }
            MinusEval::Stream(c) => c.contains(m)?,
        })
    }
}

enum EvalNode {
    Periodic { period: u64, table: Vec<bool> },
    Blocks { plus: IntervalCache, minus: MinusEval },
    Construction42 { cache: IntervalCache },
    CorollaryB,
    Naturals,
    Union(Vec<EvalNode>),
    Intersection(Vec<EvalNode>),
    Complement(Box<EvalNode>),
    Translate { by: i64, child: Box<EvalNode> },
    Reflect(Box<EvalNode>),
    IndexLift { k: u64, child: Box<EvalNode> },
}

/// Is `u` of the form `2^n + 2k`, `n ≥ 1`, `0 ≤ k ≤ n−1`?
pub(crate) fn b_set_contains_u128(u: u128) -> bool {
    if u < 2 || u % 2 == 1 {
        return false;
    }
    let n = (127 - u.leading_zeros()) as u128; // floor(log2 u), u >= 2
    u - (1u128 << n) <= 2 * n - 2
}

fn b_set_contains_big(z: &BigInt) -> bool {
    if !z.is_positive() {
        return false;
    }
    if let Some(u) = z.to_u128() {
        return b_set_contains_u128(u);
    }
    if z.is_odd() {
        return false;
    }
    let n = z.bits() - 1;
    let offset = z - (BigInt::from(1) << n);
    offset <= BigInt::from(2 * (n as i128) - 2)
}

/// Compiled evaluator for a descriptor. Cheap to clone; clones share decoded
/// stream prefixes.
#[derive(Clone)]
pub struct SetEval {
    node: Arc<EvalNode>,
    limits: Limits,
}

impl SetEval {
    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Point membership at arbitrary precision.
    pub fn member_big(&self, z: &BigInt) -> Result<bool> {
        Self::member_node(&self.node, z)
    }

    pub fn member(&self, z: i128) -> Result<bool> {
        self.member_big(&BigInt::from(z))
    }

    fn member_node(node: &EvalNode, z: &BigInt) -> Result<bool> {
        Ok(match node {
            EvalNode::Periodic { period, table } => {
                let r = z.mod_floor(&BigInt::from(*period));
                table[r.to_u64().unwrap() as usize]
            }
            EvalNode::Blocks { plus, minus } => {
                if z.is_negative() {
                    minus.contains(Self::reachable(&-z, "minus-side stream position")?)?
                } else {
                    plus.contains(Self::reachable(z, "plus-side stream position")?)?
                }
            }
            EvalNode::Construction42 { cache } => {
                cache.contains(Self::reachable(&z.abs(), "stream position")?)?
            }
            EvalNode::CorollaryB => !b_set_contains_big(&z.abs()),
            EvalNode::Naturals => !z.is_negative(),
            EvalNode::Union(cs) => {
                let mut v = false;
                for c in cs {
                    if Self::member_node(c, z)? {
                        v = true;
                        break;
                    }
                }
                v
            }
            EvalNode::Intersection(cs) => {
                let mut v = true;
                for c in cs {
                    if !Self::member_node(c, z)? {
                        v = false;
                        break;
                    }
                }
                v
            }
            EvalNode::Complement(c) => !Self::member_node(c, z)?,
            EvalNode::Translate { by, child } => Self::member_node(child, &(z - *by))?,
            EvalNode::Reflect(c) => Self::member_node(c, &-z)?,
            EvalNode::IndexLift { k, child } => {
                Self::member_node(child, &z.div_floor(&BigInt::from(*k)))?
            }
        })
    }

    fn reachable(z: &BigInt, what: &str) -> Result<i128> {
        z.to_i128().ok_or_else(|| Error::OutOfRange(format!("{what} {z} exceeds 128 bits")))
    }

    /// Materialize membership on `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Window> {
        if hi < lo {
            return Err(Error::Invalid(format!("window bounds out of order: [{lo}, {hi}]")));
        }
        let len = (hi as i128) - (lo as i128) + 1;
        if len > self.limits.max_window_bits as i128 {
            return Err(Error::WindowTooLarge { lo, hi, cap: self.limits.max_window_bits });
        }
        Self::window_node(&self.node, lo, hi)
    }

    fn window_node(node: &EvalNode, lo: i64, hi: i64) -> Result<Window> {
        Ok(match node {
            EvalNode::Periodic { period, table } => Window::from_fn(lo, hi, |z| {
                table[z.rem_euclid(*period as i64) as usize]
            })?,
            EvalNode::Naturals => {
                let mut w = Window::empty(lo, hi)?;
                w.set_range(0.max(lo as i128), hi as i128, true);
                w
            }
            EvalNode::CorollaryB => {
                Window::from_fn(lo, hi, |z| !b_set_contains_u128(z.unsigned_abs() as u128))?
            }
            EvalNode::Blocks { plus, minus } => {
                let mut w = Window::empty(lo, hi)?;
                if hi >= 0 {
                    for (l, r) in plus.blocks_through(hi as i128)? {
                        w.set_range(l, r - 1, true);
                    }
                }
                if lo < 0 {
                    let neg_hi = (-1i64).min(hi) as i128;
                    match minus {
                        MinusEval::All => w.set_range(lo as i128, neg_hi, true),
                        MinusEval::Finite(v) => {
                            for &m in v {
                                let z = -(m as i128);
                                if z >= lo as i128 && z <= neg_hi {
                                    w.set_range(z, z, true);
                                }
                            }
                        }
                        MinusEval::Stream(c) => {
                            for (l, r) in c.blocks_through(-(lo as i128))? {
                                // naturals [l, r) mirror to [-(r-1), -l]
                                w.set_range(-(r - 1), (-l).min(neg_hi), true);
                            }
                        }
                    }
                }
                w
            }
            EvalNode::Construction42 { cache } => {
                let mut w = Window::empty(lo, hi)?;
                if hi >= 0 {
                    for (l, r) in cache.blocks_through(hi as i128)? {
                        w.set_range(l, r - 1, true);
                    }
                }
                if lo < 0 {
                    let neg_hi = (-1i64).min(hi) as i128;
                    for (l, r) in cache.blocks_through(-(lo as i128))? {
                        w.set_range(-(r - 1), (-l).min(neg_hi), true);
                    }
                }
                w
            }
            EvalNode::Union(cs) => {
                let mut w = Self::window_node(&cs[0], lo, hi)?;
                for c in &cs[1..] {
                    w.combine(&Self::window_node(c, lo, hi)?, |a, b| a | b);
                }
                w
            }
            EvalNode::Intersection(cs) => {
                let mut w = Self::window_node(&cs[0], lo, hi)?;
                for c in &cs[1..] {
                    w.combine(&Self::window_node(c, lo, hi)?, |a, b| a & b);
                }
                w
            }
            EvalNode::Complement(c) => {
                let mut w = Self::window_node(c, lo, hi)?;
                w.invert();
                w
            }
            EvalNode::Translate { by, child } => {
                let clo = lo.checked_sub(*by).ok_or_else(|| {
                    Error::OutOfRange(format!("translated window bound overflows: {lo} - {by}"))
                })?;
                let chi = hi.checked_sub(*by).ok_or_else(|| {
                    Error::OutOfRange(format!("translated window bound overflows: {hi} - {by}"))
                })?;
                let cw = Self::window_node(child, clo, chi)?;
                Window::from_fn(lo, hi, |z| cw.get(z - *by))?
            }
            EvalNode::Reflect(c) => {
                let nlo = hi.checked_neg().ok_or_else(|| {
                    Error::OutOfRange("reflected window bound overflows".into())
                })?;
                let nhi = lo.checked_neg().ok_or_else(|| {
                    Error::OutOfRange("reflected window bound overflows".into())
                })?;
                let cw = Self::window_node(c, nlo, nhi)?;
                Window::from_fn(lo, hi, |z| cw.get(-z))?
            }
            EvalNode::IndexLift { k, child } => {
                let k = *k as i64;
                let cw = Self::window_node(child, lo.div_euclid(k), hi.div_euclid(k))?;
                Window::from_fn(lo, hi, |z| cw.get(z.div_euclid(k)))?
            }
        })
    }

    /// The `(α, β)` stream of the plus side. Native for block-backed
    /// descriptors; derived by scanning membership windows otherwise (the
    /// scan honors the stream budget and requires `0 ∈ A`).
    pub fn plus_pair_stream(&self) -> Result<BlockStream> {
        match &*self.node {
            EvalNode::Blocks { plus, .. } => Ok(plus.stream().clone()),
            EvalNode::Construction42 { cache } => Ok(cache.stream().clone()),
            _ => {
                if !self.member(0)? {
                    return Err(Error::OmegaViolation);
                }
                Ok(BlockStream::with_budget(
                    ScanSource { eval: self.clone() },
                    self.limits.stream_budget,
                ))
            }
        }
    }
}

/// Derives block pairs of the plus side of an arbitrary compiled descriptor
/// by scanning geometrically growing `[0, hi]` windows until enough pairs are
/// fully determined.
struct ScanSource {
    eval: SetEval,
}

impl PairSource for ScanSource {
    fn pair(&self, n: usize) -> Result<Pair> {
        // Position reach is capped by the same budget that caps pair counts:
        // a set this sparse is indistinguishable from one with sup A⁺ < ∞.
        let cap = self
            .eval
            .limits
            .stream_budget
            .min(self.eval.limits.max_window_bits.saturating_sub(1))
            .min(i64::MAX as u64 / 4) as i64;
        let mut hi: i64 = 64;
        loop {
            let w = self.eval.window(0, hi)?;
            let pairs = crate::blocks::encode_blocks(&w, false);
            match pairs {
                Ok(ps) if ps.len() >= n => return Ok(ps[n - 1]),
                Ok(_) | Err(Error::InsufficientData) => {}
                Err(e) => return Err(e),
            }
            if hi == cap {
                return Err(Error::budget(
                    self.eval.limits.stream_budget,
                    format!("scanning for pair {n} of a derived stream"),
                ));
            }
            hi = hi.saturating_mul(2).min(cap);
        }
    }
}
