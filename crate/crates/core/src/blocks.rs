//! Block coding of subsets of ℕ.
//!
//! A set `A ⊆ ℕ` with `0 ∈ A` and both `A` and `ℕ∖A` unbounded is determined
//! by its run structure: block lengths `α_k ≥ 1` and gap lengths `β_k ≥ 1`,
//! decoded as `ℓ_1 = 0`, `r_k = ℓ_k + α_k`, `ℓ_{k+1} = r_k + β_k`, with
//! `A = ⊔ [ℓ_k, r_k)`. Pair indices are 1-based throughout the public API.
//!
//! Streams are lazy: a [`PairSource`] produces pair `n` on demand, a
//! [`BlockStream`] memoizes the prefix behind a lock and enforces a step
//! budget so that a query which would never terminate (for example membership
//! of a position the stream can never reach) turns into a reported error.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::window::Window;

pub type Pair = (u64, u64);

/// Default cap on the number of pair expansions per stream.
pub const DEFAULT_STREAM_BUDGET: u64 = 10_000_000;

/// Produces the `n`-th pair, 1-based. Implementations must be pure: the same
/// `n` always yields the same pair.
pub trait PairSource: Send + Sync {
    fn pair(&self, n: usize) -> Result<Pair>;
}

/// What a finite pair list does when asked for a pair past its end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// Repeat the final listed value forever (per component).
    RepeatLast,
    /// Report stream exhaustion.
    Error,
}

/// Explicit pair list with a tail policy. `alpha` and `beta` may have
/// different lengths; under `RepeatLast` each component repeats its own last
/// entry, under `Error` any index past either list is exhaustion.
pub struct FinitePairs {
    alpha: Vec<u64>,
    beta: Vec<u64>,
    tail: TailPolicy,
}

impl FinitePairs {
    pub fn new(alpha: Vec<u64>, beta: Vec<u64>, tail: TailPolicy) -> Result<Self> {
        if alpha.is_empty() || beta.is_empty() {
            return Err(Error::InvalidDescriptor("alpha and beta must be non-empty".into()));
        }
        if alpha.iter().chain(beta.iter()).any(|&v| v == 0) {
            return Err(Error::InvalidDescriptor("pair entries must be >= 1".into()));
        }
        Ok(FinitePairs { alpha, beta, tail })
    }
}

impl PairSource for FinitePairs {
    fn pair(&self, n: usize) -> Result<Pair> {
        debug_assert!(n >= 1);
        let idx = n - 1;
        let get = |v: &Vec<u64>| -> Result<u64> {
            match v.get(idx) {
                Some(&x) => Ok(x),
                None => match self.tail {
                    TailPolicy::RepeatLast => Ok(*v.last().unwrap()),
                    TailPolicy::Error => Err(Error::StreamExhausted { index: n }),
                },
            }
        };
        Ok((get(&self.alpha)?, get(&self.beta)?))
    }
}

struct StreamInner {
    source: Box<dyn PairSource>,
    cache: Mutex<Vec<Pair>>,
    budget: u64,
}

/// Lazy, memoizing, thread-safe pair stream.
#[derive(Clone)]
pub struct BlockStream {
    inner: Arc<StreamInner>,
}

impl BlockStream {
    pub fn new(source: impl PairSource + 'static) -> Self {
        Self::with_budget(source, DEFAULT_STREAM_BUDGET)
    }

    pub fn with_budget(source: impl PairSource + 'static, budget: u64) -> Self {
        BlockStream {
            inner: Arc::new(StreamInner {
                source: Box::new(source),
                cache: Mutex::new(Vec::new()),
                budget,
            }),
        }
    }

    pub fn budget(&self) -> u64 {
        self.inner.budget
    }

    /// Pair `n`, 1-based.
    pub fn pair(&self, n: usize) -> Result<Pair> {
        if n == 0 {
            return Err(Error::Invalid("pair indices are 1-based".into()));
        }
        if n as u64 > self.inner.budget {
            return Err(Error::budget(self.inner.budget, format!("expanding stream to pair {n}")));
        }
        let mut cache = self.inner.cache.lock().unwrap();
        while cache.len() < n {
            let k = cache.len() + 1;
            let p = self.inner.source.pair(k)?;
            if p.0 == 0 || p.1 == 0 {
                return Err(Error::InvalidDescriptor(format!("pair {k} has a zero entry")));
            }
            cache.push(p);
        }
        Ok(cache[n - 1])
    }

    pub fn pairs(&self, count: usize) -> Result<Vec<Pair>> {
        (1..=count).map(|n| self.pair(n)).collect()
    }
}

/// Decode the first `count` blocks as half-open intervals `[ℓ_k, r_k)`.
pub fn decode_blocks(stream: &BlockStream, count: usize) -> Result<Vec<(i128, i128)>> {
    let mut out = Vec::with_capacity(count);
    let mut l: i128 = 0;
    for k in 1..=count {
        let (a, b) = stream.pair(k)?;
        let r = l + a as i128;
        out.push((l, r));
        l = r + b as i128;
    }
    Ok(out)
}

/// Incremental interval walker over a stream; memoizes decoded block
/// boundaries so repeated point/window queries cost amortized O(1) per
/// position reached.
pub struct IntervalCache {
    stream: BlockStream,
    /// Decoded `[ℓ_k, r_k)` prefix.
    blocks: Mutex<Vec<(i128, i128)>>,
}

impl IntervalCache {
    pub fn new(stream: BlockStream) -> Self {
        IntervalCache { stream, blocks: Mutex::new(Vec::new()) }
    }

    pub fn stream(&self) -> &BlockStream {
        &self.stream
    }

    /// Extend the decoded prefix until some block starts past `pos`, then
    /// report whether `pos ≥ 0` lies inside a block.
    pub fn contains(&self, pos: i128) -> Result<bool> {
        if pos < 0 {
            return Ok(false);
        }
        let mut blocks = self.blocks.lock().unwrap();
        self.extend_past(&mut blocks, pos)?;
        // Binary search: last block with ℓ_k <= pos.
        let idx = blocks.partition_point(|&(l, _)| l <= pos);
        Ok(idx > 0 && pos < blocks[idx - 1].1)
    }

    /// All blocks intersecting `[0, hi]`, clipped to decoded form.
    pub fn blocks_through(&self, hi: i128) -> Result<Vec<(i128, i128)>> {
        let mut blocks = self.blocks.lock().unwrap();
        self.extend_past(&mut blocks, hi)?;
        Ok(blocks.iter().copied().take_while(|&(l, _)| l <= hi).collect())
    }

    fn extend_past(&self, blocks: &mut Vec<(i128, i128)>, pos: i128) -> Result<()> {
        loop {
            let next_l = match blocks.last() {
                Some(&(_, r)) => {
                    let k = blocks.len();
                    let (_, b) = self.stream.pair(k)?;
                    r + b as i128
                }
                None => 0,
            };
            if next_l > pos {
                return Ok(());
            }
            let k = blocks.len() + 1;
            let (a, _) = self.stream.pair(k)?;
            blocks.push((next_l, next_l + a as i128));
        }
    }
}

/// Extract the `(α, β)` pairs fully determined by a membership window of the
/// plus side. The window must start at 0 and position 0 must be a member.
///
/// A block length is determined once a gap follows it inside the window; a
/// gap length is determined once the next block starts. With `complete` the
/// window edge itself closes a final gap (the caller asserts the set content
/// ends exactly at the edge), so a window that ends inside a gap contributes
/// that gap as a final `β`. A trailing block never yields a pair: its `β` is
/// unknowable either way.
pub fn encode_blocks(plus_window: &Window, complete: bool) -> Result<Vec<Pair>> {
    if plus_window.lo() != 0 {
        return Err(Error::Invalid(format!(
            "plus-side windows start at 0, got {}",
            plus_window.lo()
        )));
    }
    if !plus_window.get_idx(0) {
        return Err(Error::OmegaViolation);
    }
    let len = plus_window.len();
    let mut pairs = Vec::new();
    let mut i = 0usize;
    loop {
        // Block run starting at i.
        let block_start = i;
        while i < len && plus_window.get_idx(i) {
            i += 1;
        }
        let alpha = (i - block_start) as u64;
        if i == len {
            break; // trailing block, β unknown
        }
        // Gap run.
        let gap_start = i;
        while i < len && !plus_window.get_idx(i) {
            i += 1;
        }
        let beta = (i - gap_start) as u64;
        if i == len && !complete {
            break; // gap still open at the edge
        }
        pairs.push((alpha, beta));
        if i == len {
            break;
        }
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData);
    }
    Ok(pairs)
}

/// Render decoded blocks of a stream into a `[0, hi]` membership window.
pub fn blocks_to_window(stream: &BlockStream, hi: i64) -> Result<Window> {
    let cache = IntervalCache::new(stream.clone());
    let mut w = Window::empty(0, hi)?;
    for (l, r) in cache.blocks_through(hi as i128)? {
        w.set_range(l, r - 1, true);
    }
    Ok(w)
}
