//! Small-hitting-set search over coverage signatures.
//!
//! Verifying an n-witness over a window asks: does some size-≤n subset of the
//! window miss every translate? Equivalently, writing `sig(s)` for the set of
//! translates covering position `s`, we need n positions whose signatures
//! have empty intersection. Distinct positions with equal signatures are
//! interchangeable, so the search runs over signature classes — typically a
//! few hundred of them even when the window holds tens of thousands of
//! positions.
//!
//! Branch and bound: the state is the intersection `R` of the signatures
//! chosen so far. Pick the translate `f* ∈ R` whose uncovered-position count
//! is smallest; any extension must drop `f*`, so the children are exactly the
//! classes missing `f*`, visited in ascending representative rank for
//! determinism.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Coverage signatures accumulated translate-chunk by translate-chunk.
/// Ranks index window positions in the caller's canonical order; signatures
/// are bitsets over translate indices, packed 64 per word.
pub struct SignatureAccum {
    /// Current signature class of each rank.
    ids: Vec<u32>,
    /// Packed signature words per class.
    sigs: Vec<Vec<u64>>,
    /// Minimal rank carrying each class.
    repr: Vec<usize>,
    words: usize,
    n_translates: usize,
    /// Uncovered-position count per translate, for branch ordering.
    bad_sizes: Vec<u64>,
}

impl SignatureAccum {
    pub fn new(n_positions: usize) -> Self {
        SignatureAccum {
            ids: vec![0; n_positions],
            sigs: vec![Vec::new()],
            repr: vec![0],
            words: 0,
            n_translates: 0,
            bad_sizes: Vec::new(),
        }
    }

    pub fn n_translates(&self) -> usize {
        self.n_translates
    }

    pub fn n_classes(&self) -> usize {
        self.sigs.len()
    }

    /// Fold in up to 64 new translates. `chunk_bits[rank]` holds one bit per
    /// new translate (bit j = rank covered by translate j of this chunk);
    /// `count` is the number of translates in the chunk.
    pub fn push_chunk(&mut self, chunk_bits: &[u64], count: usize) {
        assert_eq!(chunk_bits.len(), self.ids.len());
        assert!((1..=64).contains(&count));
        let mask = if count == 64 { !0u64 } else { (1u64 << count) - 1 };
        let mut covered = vec![0u64; count];
        let mut lookup: HashMap<(u32, u64), u32> = HashMap::new();
        let mut sigs: Vec<Vec<u64>> = Vec::new();
        let mut repr: Vec<usize> = Vec::new();
        for (rank, id) in self.ids.iter_mut().enumerate() {
            let word = chunk_bits[rank] & mask;
            for (j, c) in covered.iter_mut().enumerate() {
                *c += (word >> j) & 1;
            }
            let new_id = *lookup.entry((*id, word)).or_insert_with(|| {
                let mut sig = self.sigs[*id as usize].clone();
                sig.push(word);
                sigs.push(sig);
                repr.push(rank);
                (sigs.len() - 1) as u32
            });
            *id = new_id;
        }
        self.sigs = sigs;
        self.repr = repr;
        self.words += 1;
        let total = self.ids.len() as u64;
        self.bad_sizes.extend(covered.iter().map(|&c| total - c));
        self.n_translates += count;
    }

    /// Translate indices (within the accumulated order) covering all the
    /// given ranks simultaneously — nonempty iff the rank set is hit.
    pub fn joint_cover_exists(&self, ranks: &[usize]) -> bool {
        if self.words == 0 {
            return false;
        }
        let mut acc = vec![!0u64; self.words];
        for &r in ranks {
            for (a, &s) in acc.iter_mut().zip(&self.sigs[self.ids[r] as usize]) {
                *a &= s;
            }
        }
        let tail = if self.n_translates.is_multiple_of(64) {
            !0u64
        } else {
            (1u64 << (self.n_translates % 64)) - 1
        };
        acc[self.words - 1] &= tail;
        acc.iter().any(|&w| w != 0)
    }

    /// Translate indices (within the accumulated order) not covering `rank`.
    pub fn missing_at(&self, rank: usize) -> Vec<usize> {
        let sig = &self.sigs[self.ids[rank] as usize];
        let mut out = Vec::new();
        for f in 0..self.n_translates {
            if sig[f / 64] >> (f % 64) & 1 == 0 {
                out.push(f);
            }
        }
        out
    }

    /// Search for ≤ `n` signature classes with empty intersection. Returns
    /// the representative ranks of a minimal-rank counterexample, or `None`
    /// when every size-≤n selection is hit (the witness verifies). `nodes`
    /// is charged per search tree vertex against `node_budget`.
    pub fn solve(&self, n: u32, node_budget: u64, nodes: &mut u64) -> Result<Option<Vec<usize>>> {
        if self.n_translates == 0 {
            // Empty family covers nothing: any single position works.
            return Ok(Some(vec![0]));
        }
        let tail_mask = if self.n_translates.is_multiple_of(64) {
            !0u64
        } else {
            (1u64 << (self.n_translates % 64)) - 1
        };
        let mut full = vec![!0u64; self.words];
        full[self.words - 1] = tail_mask;
        // Classes in ascending representative order; repr ranks are already
        // assigned in first-touch order, so this is the identity, but keep it
        // explicit in case the construction changes.
        let mut order: Vec<u32> = (0..self.sigs.len() as u32).collect();
        order.sort_by_key(|&i| self.repr[i as usize]);
        // Dominance: a class whose signature strictly contains another
        // class's signature never helps — swapping in the smaller signature
        // only shrinks the intersection. Restricting to minimal signatures
        // preserves both existence and absence of counterexamples.
        if self.sigs.len() <= 4096 {
            let dominated: Vec<bool> = (0..self.sigs.len())
                .map(|i| {
                    (0..self.sigs.len()).any(|j| {
                        j != i
                            && self.sigs[j]
                                .iter()
                                .zip(&self.sigs[i])
                                .all(|(&a, &b)| a & !b == 0)
                    })
                })
                .collect();
            order.retain(|&i| !dominated[i as usize]);
        }
        let mut search = Search {
            family: self,
            order,
            chosen: Vec::with_capacity(n as usize),
            failed: HashMap::new(),
            node_budget,
        };
        search.dfs(&full, n, nodes)
    }
}

/// Capped memo of intersection states proven counterexample-free, keyed by
/// the live-translate bitset with the remaining depth it was proven at.
const FAILED_MEMO_CAP: usize = 1 << 21;

struct Search<'a> {
    family: &'a SignatureAccum,
    order: Vec<u32>,
    chosen: Vec<usize>,
    failed: HashMap<Vec<u64>, u32>,
    node_budget: u64,
}

impl Search<'_> {
    fn dfs(&mut self, r: &[u64], depth_left: u32, nodes: &mut u64) -> Result<Option<Vec<usize>>> {
        *nodes += 1;
        if *nodes > self.node_budget {
            return Err(Error::budget(self.node_budget, "hitting-set search nodes"));
        }
        if r.iter().all(|&w| w == 0) {
            return Ok(Some(self.chosen.clone()));
        }
        if depth_left == 0 {
            return Ok(None);
        }
        if self.failed.get(r).is_some_and(|&d| d >= depth_left) {
            return Ok(None);
        }
        // Branch on the live translate with the fewest uncovered positions.
        let mut best: Option<(u64, usize)> = None;
        for (w, &live) in r.iter().enumerate() {
            let mut word = live;
            while word != 0 {
                let f = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                let key = (self.family.bad_sizes[f], f);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, f_star) = best.expect("nonempty intersection");
        let (fw, fb) = (f_star / 64, f_star % 64);
        for i in 0..self.order.len() {
            let cls = self.order[i];
            let sig = &self.family.sigs[cls as usize];
            if sig[fw] >> fb & 1 != 0 {
                continue;
            }
            let next: Vec<u64> = r.iter().zip(sig).map(|(&a, &b)| a & b).collect();
            self.chosen.push(self.family.repr[cls as usize]);
            let found = self.dfs(&next, depth_left - 1, nodes)?;
            self.chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        if self.failed.len() < FAILED_MEMO_CAP {
            match self.failed.entry(r.to_vec()) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let d = e.get_mut();
                    *d = (*d).max(depth_left);
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(depth_left);
                }
            }
        }
        Ok(None)
    }
}
