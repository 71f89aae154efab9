//! The triangular block-length array and the low-density completely syndetic
//! sets built from it.
//!
//! Rows of the array: row 1 is `[1]`; row `n+1` is `M` copies of row `n`
//! followed by the single entry `n+1`. Concatenating the rows gives the block
//! lengths `α_n`; gaps are the constant `K`. Row lengths satisfy
//! `r_{n+1} = M·r_n + 1` and row sums `Γ_{n+1} = M·Γ_n + (n+1)`, both with
//! exact closed forms below.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::blocks::{Pair, PairSource};
use crate::descriptor::{Limits, SetDescriptor, SetEval};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Cap on closed-form exponents; `M^n` at the cap is ~1.3 MB of digits for
/// M = 2, enough for any witness radius this artifact can use downstream.
const MAX_EXPONENT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub k: u64,
    pub m: u64,
}

impl ConstructionParams {
    pub fn new(k: u64, m: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDescriptor("gap parameter K must be >= 1".into()));
        }
        if m < 2 {
            return Err(Error::InvalidDescriptor("row multiplier M must be >= 2".into()));
        }
        Ok(ConstructionParams { k, m })
    }
}

fn check_exponent(n: u64, what: &str) -> Result<u32> {
    if n > MAX_EXPONENT {
        return Err(Error::OutOfRange(format!("{what} index {n} exceeds cap {MAX_EXPONENT}")));
    }
    Ok(n as u32)
}

/// Row length `r_n = (M^n − 1)/(M − 1)`, with `r_0 = 0`.
pub fn row_len(n: u64, m: u64) -> Result<BigInt> {
    let e = check_exponent(n, "row length")?;
    let m_big = BigInt::from(m);
    Ok((m_big.pow(e) - 1) / (BigInt::from(m) - 1))
}

/// Entries in the first `m_rows` rows: `R_m = Σ_{k≤m} r_k`, closed form
/// `M(M^m − 1)/(M−1)² − m/(M−1)` (exact over ℤ).
pub fn rows_total(m_rows: u64, m: u64) -> Result<BigInt> {
    let e = check_exponent(m_rows, "row count")?;
    let mm = BigInt::from(m);
    let d = &mm - 1;
    let num: BigInt = &mm * (mm.pow(e) - 1) - &d * BigInt::from(m_rows);
    let den = &d * &d;
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero(), "rows_total closed form must divide exactly");
    Ok(q)
}

/// Row sum `Γ_n = (M^{n+1} − M − (M−1)n)/(M−1)²`.
pub fn row_sum(n: u64, m: u64) -> Result<BigInt> {
    let e = check_exponent(n.saturating_add(1), "row sum")?;
    let mm = BigInt::from(m);
    let d = &mm - 1;
    let num: BigInt = mm.pow(e) - &mm - &d * BigInt::from(n);
    let den = &d * &d;
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero(), "row_sum closed form must divide exactly");
    Ok(q)
}

/// Exact solution of `x_{n+1} = T·x_n + (n+1) + s`, `x_0 = 0`:
/// `x_n = a(T^n − 1) + b·n` with `a = (s(T−1)+T)/(T−1)²`, `b = −1/(T−1)`.
/// Computed entirely over ℤ; a non-zero remainder means the closed form is
/// wrong and is reported as an error rather than silently rounded.
pub fn recurrence_solution(t: u64, s: i64, n: u64) -> Result<BigInt> {
    if t < 2 {
        return Err(Error::Invalid("recurrence multiplier T must be >= 2".into()));
    }
    let e = check_exponent(n, "recurrence")?;
    let tb = BigInt::from(t);
    let d = &tb - 1;
    // x_n = [ (s(T−1)+T)(T^n − 1) − (T−1)n ] / (T−1)²
    let num: BigInt = (BigInt::from(s) * &d + &tb) * (tb.pow(e) - 1) - &d * BigInt::from(n);
    let den = &d * &d;
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::Invalid(format!(
            "closed form for T={t}, s={s}, n={n} is not integral (remainder {r})"
        )));
    }
    Ok(q)
}

/// Array entry `γ_{n,k}` (row `n ≥ 1`, column `1 ≤ k ≤ r_n`), computed by
/// reducing the column index through successive rows — no row is ever
/// materialized, so deep queries with small `k` stay cheap even when `r_n`
/// overflows fixed-width integers.
pub fn gamma(n: u64, k: i128, m: u64) -> Result<u64> {
    if n == 0 || k <= 0 {
        return Err(Error::Invalid(format!("gamma indices are 1-based (n={n}, k={k})")));
    }
    // r values as i128 with saturation: None marks "exceeds i128", in which
    // case any in-range k is strictly inside the row body.
    let mut row = n;
    let mut col = k;
    loop {
        let r_here = row_len_i128(row, m);
        if let Some(r) = r_here {
            if col > r {
                return Err(Error::Invalid(format!(
                    "column {col} out of range for row {row} (r = {r})"
                )));
            }
            if col == r {
                return Ok(row);
            }
        }
        if row == 1 {
            return Ok(1); // col must be 1 here
        }
        let r_prev = row_len_i128(row - 1, m);
        if let Some(rp) = r_prev {
            col = (col - 1).rem_euclid(rp) + 1;
        }
        // When r_{row-1} already exceeds i128, col < r_{row-1} so the
        // reduction is the identity.
        row -= 1;
    }
}

fn row_len_i128(n: u64, m: u64) -> Option<i128> {
    let mut r: i128 = 0;
    for _ in 0..n {
        r = r.checked_mul(m as i128)?.checked_add(1)?;
    }
    Some(r)
}

/// Materialize row `n` by concatenation semantics; intended for tests and
/// small reports.
pub fn materialize_row(n: u64, m: u64) -> Result<Vec<u64>> {
    let mut row = vec![1u64];
    for i in 1..n {
        let mut next = Vec::with_capacity(row.len() * m as usize + 1);
        for _ in 0..m {
            next.extend_from_slice(&row);
        }
        next.push(i + 1);
        if next.len() > 100_000_000 {
            return Err(Error::OutOfRange("materialized row too large".into()));
        }
        row = next;
    }
    Ok(row)
}

/// Pair source: `α` concatenates the array rows, `β = K`.
pub struct Construction42Source {
    params: ConstructionParams,
    /// Cumulative row boundaries `R_1, R_2, …` grown on demand.
    totals: std::sync::Mutex<Vec<i128>>,
}

pub fn alpha_source(params: ConstructionParams) -> Construction42Source {
    Construction42Source { params, totals: std::sync::Mutex::new(Vec::new()) }
}

impl Construction42Source {
    /// `α_n` by locating the row containing stream index `n` (1-based).
    pub fn alpha(&self, n: u64) -> Result<u64> {
        let m = self.params.m;
        let mut totals = self.totals.lock().unwrap();
        while totals.last().copied().unwrap_or(0) < n as i128 {
            let row = totals.len() as u64 + 1;
            let r = row_len_i128(row, m)
                .and_then(|r| r.checked_add(totals.last().copied().unwrap_or(0)))
                .ok_or_else(|| Error::OutOfRange(format!("stream index {n} too deep")))?;
            totals.push(r);
        }
        // First row with R_row >= n.
        let idx = totals.partition_point(|&t| t < n as i128);
        let total_prev = if idx == 0 { 0 } else { totals[idx - 1] };
        gamma(idx as u64 + 1, n as i128 - total_prev, m)
    }
}

impl PairSource for Construction42Source {
    fn pair(&self, n: usize) -> Result<Pair> {
        Ok((self.alpha(n as u64)?, self.params.k))
    }
}

/// The claimed limiting density `1/(K+1)` of the constructed set.
pub fn density_limit(k: u64) -> Rational {
    Rational::new(1, k as i128 + 1)
}

/// The exact asymptotic density of the stream actually generated with
/// constant gap `K`: block lengths average `M/(M−1)`, so the density is
/// `M / (M + K(M−1))`. Coincides with [`density_limit`] only as `M → ∞`.
pub fn stream_density_limit(k: u64, m: u64) -> Rational {
    Rational::new(m as i128, m as i128 + k as i128 * (m as i128 - 1))
}

/// Position of the end of the final gap of row `m_rows`:
/// `Σ_{k≤m} Γ_k + K·R_m`. Densities are cleanest sampled here.
pub fn row_boundary_radius(params: ConstructionParams, m_rows: u64) -> Result<i128> {
    let mut alpha_total = BigInt::zero();
    for i in 1..=m_rows {
        alpha_total += row_sum(i, params.m)?;
    }
    let total = alpha_total + BigInt::from(params.k) * rows_total(m_rows, params.m)?;
    total
        .to_i128()
        .ok_or_else(|| Error::OutOfRange(format!("row boundary {m_rows} exceeds 128 bits")))
}

/// Exact member count over `[-radius, radius]` divided by window size.
pub fn empirical_density(eval: &SetEval, radius: i64) -> Result<Rational> {
    if radius < 0 {
        return Err(Error::Invalid("radius must be nonnegative".into()));
    }
    let w = eval.window(-radius, radius)?;
    Ok(Rational::new(w.count_members() as i128, 2 * radius as i128 + 1))
}

/// The corollary pair: the obstruction set `B` (as a descriptor over ℤ whose
/// members are the positive values `2^n + 2k`) and `A = ℤ ∖ (B ∪ −B)`.
pub fn corollary_b_descriptors() -> (SetDescriptor, SetDescriptor) {
    let a = SetDescriptor::CorollaryB;
    // B = complement(A) ∩ {z ≥ 1}: complement(A) = B ∪ −B, and B is the
    // positive half.
    let b = SetDescriptor::intersection(vec![
        SetDescriptor::complement(SetDescriptor::CorollaryB),
        SetDescriptor::translate(SetDescriptor::Naturals, 1),
    ]);
    (b, a)
}

/// The product set `A^d ⊆ ℤ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSet {
    pub base: SetDescriptor,
    pub d: u32,
}

pub fn zd_product(base: SetDescriptor, d: u32) -> Result<ProductSet> {
    if d == 0 {
        return Err(Error::Invalid("product dimension must be >= 1".into()));
    }
    Ok(ProductSet { base, d })
}

impl ProductSet {
    pub fn compile(&self, limits: &Limits) -> Result<ProductEval> {
        Ok(ProductEval { base: self.base.compile(limits)?, d: self.d })
    }
}

pub struct ProductEval {
    base: SetEval,
    d: u32,
}

impl ProductEval {
    pub fn member(&self, coords: &[i128]) -> Result<bool> {
        if coords.len() != self.d as usize {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                self.d,
                coords.len()
            )));
        }
        for &c in coords {
            if !self.base.member(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Density over the box `[-radius, radius]^d` = (1-D density)^d, computed
    /// exactly from the 1-D count.
    pub fn box_density(&self, radius: i64) -> Result<Rational> {
        let one = empirical_density(&self.base, radius)?;
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for _ in 0..self.d {
            num = num.checked_mul(one.num).ok_or_else(|| {
                Error::OutOfRange("box density numerator exceeds 128 bits".into())
            })?;
            den = den.checked_mul(one.den).ok_or_else(|| {
                Error::OutOfRange("box density denominator exceeds 128 bits".into())
            })?;
        }
        Ok(Rational::new(num, den))
    }
}
