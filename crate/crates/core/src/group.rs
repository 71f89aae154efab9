//! Lifting integer sets into finitely generated groups.
//!
//! A surjection `φ : G → ℤ` pulls a completely syndetic set back to one in
//! `G`: witnesses lift along any section of `φ`. The two built-in groups are
//! free abelian groups (coordinate vectors) and the discrete Heisenberg group
//! (upper unitriangular 3×3 integer matrices, stored as their three free
//! entries). Balls are word-metric balls for the standard generators, grown
//! by breadth-first search; density is the exact member ratio on a ball.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::descriptor::{Limits, SetDescriptor, SetEval};
use crate::error::{Error, Result};
use crate::hitting::SignatureAccum;
use crate::rational::Rational;

/// Coordinates: one per generator for free abelian groups; `(a, b, c)` for
/// Heisenberg, meaning `x^a y^b z^c` with `z` the central commutator (matrix
/// entries: `a` top-middle, `b` middle-right, `c` top-right).
pub type GroupElement = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Group {
    FreeAbelian { rank: usize },
    Heisenberg,
}

const MAX_RANK: usize = 8;

fn mul_checked(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or_else(|| Error::OutOfRange("group coordinate overflow".into()))
}

fn add_checked(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or_else(|| Error::OutOfRange("group coordinate overflow".into()))
}

impl Group {
    pub fn validate(&self) -> Result<()> {
        match self {
            Group::FreeAbelian { rank } if *rank == 0 || *rank > MAX_RANK => Err(
                Error::Invalid(format!("free abelian rank must be in 1..={MAX_RANK}")),
            ),
            _ => Ok(()),
        }
    }

    /// Coordinates per element.
    pub fn arity(&self) -> usize {
        match self {
            Group::FreeAbelian { rank } => *rank,
            Group::Heisenberg => 3,
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Group::FreeAbelian { rank } => *rank,
            Group::Heisenberg => 2,
        }
    }

    pub fn identity(&self) -> GroupElement {
        vec![0; self.arity()]
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = self.identity();
        e[i] = 1;
        e
    }

    pub fn validate_element(&self, e: &[i64]) -> Result<()> {
        if e.len() != self.arity() {
            return Err(Error::Invalid(format!(
                "element has {} coordinates, group expects {}",
                e.len(),
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn multiply(&self, a: &[i64], b: &[i64]) -> Result<GroupElement> {
        self.validate_element(a)?;
        self.validate_element(b)?;
        match self {
            Group::FreeAbelian { .. } => {
                a.iter().zip(b).map(|(&x, &y)| add_checked(x, y)).collect()
            }
            Group::Heisenberg => Ok(vec![
                add_checked(a[0], b[0])?,
                add_checked(a[1], b[1])?,
                add_checked(add_checked(a[2], b[2])?, mul_checked(a[0], b[1])?)?,
            ]),
        }
    }

    pub fn invert(&self, a: &[i64]) -> Result<GroupElement> {
        self.validate_element(a)?;
        match self {
            Group::FreeAbelian { .. } => Ok(a.iter().map(|&x| -x).collect()),
            // (a,b,c)(−a,−b,−c+ab) = (0, 0, ab − a·b) = identity.
            Group::Heisenberg => Ok(vec![-a[0], -a[1], mul_checked(a[0], a[1])? - a[2]]),
        }
    }

    /// `a^k`, closed form. For Heisenberg, `(a,b,c)^k = (ka, kb, kc +
    /// C(k,2)·ab)`, valid for negative `k` as well.
    pub fn power(&self, a: &[i64], k: i64) -> Result<GroupElement> {
        self.validate_element(a)?;
        match self {
            Group::FreeAbelian { .. } => a.iter().map(|&x| mul_checked(x, k)).collect(),
            Group::Heisenberg => {
                let choose2 = (k as i128 * (k as i128 - 1)) / 2;
                let center = k as i128 * a[2] as i128 + choose2 * a[0] as i128 * a[1] as i128;
                let center = i64::try_from(center)
                    .map_err(|_| Error::OutOfRange("group coordinate overflow".into()))?;
                Ok(vec![mul_checked(a[0], k)?, mul_checked(a[1], k)?, center])
            }
        }
    }
}

/// A word-metric ball, elements sorted by (distance, lexicographic).
#[derive(Debug)]
pub struct Ball {
    pub group: Group,
    pub radius: u32,
    pub elements: Vec<GroupElement>,
    pub dist: Vec<u32>,
    index: HashMap<GroupElement, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains the identity
    }

    pub fn position(&self, e: &[i64]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

pub fn ball(group: &Group, radius: u32, limits: &Limits) -> Result<Ball> {
    group.validate()?;
    let mut seen: HashMap<GroupElement, u32> = HashMap::new();
    seen.insert(group.identity(), 0);
    let mut frontier = vec![group.identity()];
    let steps: Vec<GroupElement> = (0..group.generator_count())
        .flat_map(|i| {
            let g = group.generator(i);
            let inv = group.invert(&g).expect("generator inverts");
            [g, inv]
        })
        .collect();
    for d in 1..=radius {
        let mut next = Vec::new();
        for e in &frontier {
            for s in &steps {
                let m = group.multiply(e, s)?;
                if !seen.contains_key(&m) {
                    if seen.len() as u64 >= limits.max_ball {
                        return Err(Error::budget(limits.max_ball, "ball growth"));
                    }
                    seen.insert(m.clone(), d);
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    let mut pairs: Vec<(u32, GroupElement)> = seen.into_iter().map(|(e, d)| (d, e)).collect();
    pairs.sort();
    let mut index = HashMap::with_capacity(pairs.len());
    let mut elements = Vec::with_capacity(pairs.len());
    let mut dist = Vec::with_capacity(pairs.len());
    for (i, (d, e)) in pairs.into_iter().enumerate() {
        index.insert(e.clone(), i);
        elements.push(e);
        dist.push(d);
    }
    Ok(Ball { group: *group, radius, elements, dist, index })
}

/// A homomorphism to ℤ, given by generator images. Well-defined for both
/// built-in groups (ℤ is abelian, so the Heisenberg commutator must map to 0
/// and does).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub group: Group,
    pub images: Vec<i64>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // Returns (g, x, y) with g = ax + by, g ≥ 0.
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

impl GroupHom {
    pub fn new(group: Group, images: Vec<i64>) -> Result<Self> {
        group.validate()?;
        if images.len() != group.generator_count() {
            return Err(Error::Invalid(format!(
                "homomorphism needs {} generator images, got {}",
                group.generator_count(),
                images.len()
            )));
        }
        Ok(GroupHom { group, images })
    }

    pub fn apply(&self, e: &[i64]) -> Result<i128> {
        self.group.validate_element(e)?;
        // The center contributes nothing: any map to an abelian group kills
        // the commutator coordinate.
        Ok(self
            .images
            .iter()
            .zip(e)
            .map(|(&im, &c)| im as i128 * c as i128)
            .sum())
    }

    pub fn gcd_of_images(&self) -> i64 {
        self.images.iter().fold(0i64, |g, &im| ext_gcd(g, im).0)
    }

    pub fn is_surjective(&self) -> bool {
        self.gcd_of_images() == 1
    }

    /// Bézout exponents `c` with `Σ c_i·images_i = 1`: the first generator
    /// with image ±1 if one exists (then a single ±1 exponent), else a
    /// left-to-right extended-gcd combination. Deterministic, so lifts are
    /// reproducible.
    fn section_exponents(&self) -> Result<Vec<i64>> {
        let mut c = vec![0i64; self.images.len()];
        if let Some(i) = self.images.iter().position(|&im| im.abs() == 1) {
            c[i] = self.images[i]; // im · im = 1 for im = ±1
            return Ok(c);
        }
        let mut g = 0i64;
        for (i, &im) in self.images.iter().enumerate() {
            let (g2, x, y) = ext_gcd(g, im);
            for prev in &mut c[..i] {
                *prev = mul_checked(*prev, x)?;
            }
            c[i] = y;
            g = g2;
        }
        if g != 1 {
            return Err(Error::NotSurjective { gcd: g });
        }
        Ok(c)
    }

    /// The canonical preimage of `f`: with `a = Π g_i^{c_i}` the fixed
    /// section word (ascending generator order), returns `a^f` computed as
    /// `Π g_i^{c_i·f}`.
    pub fn lift(&self, f: i64) -> Result<GroupElement> {
        let c = self.section_exponents()?;
        let mut acc = self.group.identity();
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                let p = self.group.power(&self.group.generator(i), mul_checked(ci, f)?)?;
                acc = self.group.multiply(&acc, &p)?;
            }
        }
        Ok(acc)
    }
}

/// Lift each integer translate through the canonical section.
pub fn lift_witness(hom: &GroupHom, translates: &[i64]) -> Result<Vec<GroupElement>> {
    translates.iter().map(|&f| hom.lift(f)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupSetDescriptor {
    /// `φ^{-1}(inner)` for the homomorphism with the given generator images.
    Preimage { group: Group, images: Vec<i64>, inner: SetDescriptor },
    /// `⋃_{i<k} (k·base + i)` viewed as a set in ℤ = FreeAbelian(1).
    FiniteIndexUnion { base: SetDescriptor, k: u64 },
}

impl GroupSetDescriptor {
    pub fn group(&self) -> Group {
        match self {
            GroupSetDescriptor::Preimage { group, .. } => *group,
            GroupSetDescriptor::FiniteIndexUnion { .. } => Group::FreeAbelian { rank: 1 },
        }
    }

    pub fn compile(&self, limits: &Limits) -> Result<GroupSetEval> {
        match self {
            GroupSetDescriptor::Preimage { group, images, inner } => {
                let hom = GroupHom::new(*group, images.clone())?;
                if !hom.is_surjective() {
                    return Err(Error::NotSurjective { gcd: hom.gcd_of_images() });
                }
                Ok(GroupSetEval {
                    group: *group,
                    kind: GroupEvalKind::Preimage { hom, inner: inner.compile(limits)? },
                })
            }
            GroupSetDescriptor::FiniteIndexUnion { base, k } => {
                let lifted = finite_index_lift(base, *k)?;
                Ok(GroupSetEval {
                    group: Group::FreeAbelian { rank: 1 },
                    kind: GroupEvalKind::Line { eval: lifted.compile(limits)? },
                })
            }
        }
    }
}

enum GroupEvalKind {
    Preimage { hom: GroupHom, inner: SetEval },
    Line { eval: SetEval },
}

pub struct GroupSetEval {
    group: Group,
    kind: GroupEvalKind,
}

impl GroupSetEval {
    pub fn group(&self) -> Group {
        self.group
    }

    pub fn member(&self, e: &[i64]) -> Result<bool> {
        match &self.kind {
            GroupEvalKind::Preimage { hom, inner } => inner.member(hom.apply(e)?),
            GroupEvalKind::Line { eval } => {
                self.group.validate_element(e)?;
                eval.member(e[0] as i128)
            }
        }
    }
}

/// `z ∈ result ⟺ floor(z/k) ∈ base`: the base set placed on `kℤ` and
/// fattened by all residues. `k = 1` is the identity.
pub fn finite_index_lift(base: &SetDescriptor, k: u64) -> Result<SetDescriptor> {
    if k == 0 {
        return Err(Error::Invalid("index must be >= 1".into()));
    }
    Ok(SetDescriptor::IndexLift { k, child: Box::new(base.clone()) })
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupEvidence {
    pub f: GroupElement,
    pub s: GroupElement,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GroupCheckOutcome {
    Verified,
    Refuted { counterexample: Vec<GroupElement>, evidence: Vec<GroupEvidence> },
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupCheckReport {
    pub n: u32,
    pub radius: u32,
    pub ball_size: usize,
    pub translates_examined: u64,
    pub solver_nodes: u64,
    #[serde(flatten)]
    pub outcome: GroupCheckOutcome,
}

impl GroupCheckReport {
    pub fn verified(&self) -> bool {
        matches!(self.outcome, GroupCheckOutcome::Verified)
    }
}

/// Same contract as the integer check with `W = ball(radius)` and left
/// translates: bad sets are `B_f = {w ∈ W : f⁻¹w ∉ A}`.
pub fn check_witness_group(
    gv: &GroupSetEval,
    n: u32,
    translates: &[GroupElement],
    radius: u32,
    limits: &Limits,
) -> Result<GroupCheckReport> {
    if n == 0 || n > 64 {
        return Err(Error::Invalid("n must be between 1 and 64".into()));
    }
    if translates.is_empty() {
        return Err(Error::Invalid("translate list must be nonempty".into()));
    }
    let group = gv.group();
    let b = ball(&group, radius, limits)?;
    let mut acc = SignatureAccum::new(b.len());
    for fs in translates.chunks(64) {
        let mut words = vec![0u64; b.len()];
        for (j, f) in fs.iter().enumerate() {
            let f_inv = group.invert(f)?;
            for (r, w) in b.elements.iter().enumerate() {
                if gv.member(&group.multiply(&f_inv, w)?)? {
                    words[r] |= 1 << j;
                }
            }
        }
        acc.push_chunk(&words, fs.len());
    }
    let mut nodes = 0u64;
    let outcome = match acc.solve(n, limits.solver_nodes, &mut nodes)? {
        None => GroupCheckOutcome::Verified,
        Some(mut ranks) => {
            ranks.sort_unstable();
            ranks.dedup();
            let s: Vec<GroupElement> =
                ranks.iter().map(|&r| b.elements[r].clone()).collect();
            let mut evidence = Vec::with_capacity(translates.len());
            for f in translates {
                let f_inv = group.invert(f)?;
                let mut hit = None;
                for w in &s {
                    if !gv.member(&group.multiply(&f_inv, w)?)? {
                        hit = Some(w.clone());
                        break;
                    }
                }
                match hit {
                    Some(w) => evidence.push(GroupEvidence { f: f.clone(), s: w }),
                    None => {
                        return Err(Error::Invalid(
                            "counterexample failed re-verification".into(),
                        ))
                    }
                }
            }
            GroupCheckOutcome::Refuted { counterexample: s, evidence }
        }
    };
    Ok(GroupCheckReport {
        n,
        radius,
        ball_size: b.len(),
        translates_examined: translates.len() as u64,
        solver_nodes: nodes,
        outcome,
    })
}

/// Exact member ratio over the radius-`r` ball.
pub fn group_density(gv: &GroupSetEval, radius: u32, limits: &Limits) -> Result<Rational> {
    let b = ball(&gv.group(), radius, limits)?;
    let mut count = 0i128;
    for e in &b.elements {
        if gv.member(e)? {
            count += 1;
        }
    }
    Ok(Rational::new(count, b.len() as i128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn limits() -> Limits {
        Limits::default()
    }

    /// Independent model: actual 3×3 upper unitriangular matrices.
    #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
    struct Mat([[i64; 3]; 3]);

    impl Mat {
        fn of(e: &[i64]) -> Mat {
            Mat([[1, e[0], e[2]], [0, 1, e[1]], [0, 0, 1]])
        }
        #[allow(clippy::needless_range_loop)]
        fn mul(self, o: Mat) -> Mat {
            let mut r = [[0i64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    r[i][j] = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
                }
            }
            Mat(r)
        }
        fn coords(self) -> Vec<i64> {
            vec![self.0[0][1], self.0[1][2], self.0[0][2]]
        }
    }

    #[test]
    fn heisenberg_matches_matrix_model() {
        let h = Group::Heisenberg;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a: Vec<i64> = (0..3).map(|_| rng.gen_range(-9..=9)).collect();
            let b: Vec<i64> = (0..3).map(|_| rng.gen_range(-9..=9)).collect();
            assert_eq!(h.multiply(&a, &b).unwrap(), Mat::of(&a).mul(Mat::of(&b)).coords());
            let inv = h.invert(&a).unwrap();
            assert_eq!(h.multiply(&a, &inv).unwrap(), h.identity());
            // Powers against repeated multiplication.
            let k = rng.gen_range(-6..=6i64);
            let mut acc = h.identity();
            for _ in 0..k.unsigned_abs() {
                let step = if k >= 0 { a.clone() } else { inv.clone() };
                acc = h.multiply(&acc, &step).unwrap();
            }
            assert_eq!(h.power(&a, k).unwrap(), acc, "a={a:?} k={k}");
        }
        // The commutator [x, y] is the central generator.
        let x = h.generator(0);
        let y = h.generator(1);
        let c = h
            .multiply(
                &h.multiply(&x, &y).unwrap(),
                &h.multiply(&h.invert(&x).unwrap(), &h.invert(&y).unwrap()).unwrap(),
            )
            .unwrap();
        assert_eq!(c, vec![0, 0, 1]);
    }

    #[test]
    fn ball_sizes() {
        let lim = limits();
        assert_eq!(ball(&Group::FreeAbelian { rank: 1 }, 10, &lim).unwrap().len(), 21);
        assert_eq!(ball(&Group::FreeAbelian { rank: 2 }, 1, &lim).unwrap().len(), 5);
        // ℓ¹ ball in ℤ²: 2r² + 2r + 1.
        assert_eq!(ball(&Group::FreeAbelian { rank: 2 }, 50, &lim).unwrap().len(), 5101);
        assert_eq!(ball(&Group::Heisenberg, 1, &lim).unwrap().len(), 5);
        // Nesting.
        let b3 = ball(&Group::Heisenberg, 3, &lim).unwrap();
        let b4 = ball(&Group::Heisenberg, 4, &lim).unwrap();
        assert!(b3.elements.iter().all(|e| b4.position(e).is_some()));

        // Independent count: BFS over the matrix model.
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![Mat::of(&[0, 0, 0])];
        seen.insert(frontier[0]);
        let steps: Vec<Mat> =
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]].iter().map(|e| Mat::of(e)).collect();
        for _ in 0..3 {
            let mut next = Vec::new();
            for m in &frontier {
                for s in &steps {
                    let p = m.mul(*s);
                    if seen.insert(p) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(b3.len(), seen.len());
    }

    #[test]
    fn ball_budget() {
        let lim = Limits { max_ball: 100, ..Limits::default() };
        match ball(&Group::FreeAbelian { rank: 2 }, 50, &lim) {
            Err(Error::Budget { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn hom_property_and_lipschitz() {
        let lim = limits();
        let hom = GroupHom::new(Group::Heisenberg, vec![3, 5]).unwrap();
        let b = ball(&Group::Heisenberg, 5, &lim).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let g = &b.elements[rng.gen_range(0..b.len())];
            let h = &b.elements[rng.gen_range(0..b.len())];
            let gh = Group::Heisenberg.multiply(g, h).unwrap();
            assert_eq!(hom.apply(&gh).unwrap(), hom.apply(g).unwrap() + hom.apply(h).unwrap());
        }
        // |φ(g)| ≤ max|image| · word length.
        let l = 5i128;
        let b15 = ball(&Group::Heisenberg, 15, &lim).unwrap();
        for (e, &d) in b15.elements.iter().zip(&b15.dist) {
            assert!(hom.apply(e).unwrap().abs() <= l * d as i128);
        }
    }

    #[test]
    fn lifting_canonical_sections() {
        // Sum homomorphism on ℤ²: first generator has image 1.
        let hom = GroupHom::new(Group::FreeAbelian { rank: 2 }, vec![1, 1]).unwrap();
        assert_eq!(lift_witness(&hom, &[0, 1]).unwrap(), vec![vec![0, 0], vec![1, 0]]);
        for f in -20..=20 {
            assert_eq!(hom.apply(&hom.lift(f).unwrap()).unwrap(), f as i128);
        }
        // No ±1 image: Bézout combination. 2·(−1) + 3·1 = 1.
        let hom = GroupHom::new(Group::FreeAbelian { rank: 2 }, vec![2, 3]).unwrap();
        assert_eq!(hom.lift(1).unwrap(), vec![-1, 1]);
        for f in -20..=20 {
            assert_eq!(hom.apply(&hom.lift(f).unwrap()).unwrap(), f as i128);
        }
        // Same through the Heisenberg section (images 1, 0 → x-powers).
        let hom = GroupHom::new(Group::Heisenberg, vec![1, 0]).unwrap();
        assert_eq!(hom.lift(7).unwrap(), vec![7, 0, 0]);
        // Non-surjective.
        let hom = GroupHom::new(Group::FreeAbelian { rank: 2 }, vec![2, 4]).unwrap();
        assert!(!hom.is_surjective());
        assert!(matches!(hom.lift(1), Err(Error::NotSurjective { gcd: 2 })));
    }

    fn checkerboard() -> GroupSetDescriptor {
        GroupSetDescriptor::Preimage {
            group: Group::FreeAbelian { rank: 2 },
            images: vec![1, 1],
            inner: SetDescriptor::evens(),
        }
    }

    #[test]
    fn preimage_membership() {
        let lim = limits();
        let gv = checkerboard().compile(&lim).unwrap();
        let b = ball(&Group::FreeAbelian { rank: 2 }, 20, &lim).unwrap();
        for e in &b.elements {
            assert_eq!(gv.member(e).unwrap(), (e[0] + e[1]).rem_euclid(2) == 0);
        }
        // Rejection of non-surjective preimages.
        let bad = GroupSetDescriptor::Preimage {
            group: Group::FreeAbelian { rank: 2 },
            images: vec![2, 4],
            inner: SetDescriptor::evens(),
        };
        assert!(matches!(bad.compile(&lim), Err(Error::NotSurjective { gcd: 2 })));
    }

    #[test]
    fn checkerboard_witness_and_density() {
        let lim = limits();
        let gv = checkerboard().compile(&lim).unwrap();
        let lifted = vec![vec![0, 0], vec![1, 0]];
        let rep = check_witness_group(&gv, 1, &lifted, 20, &lim).unwrap();
        assert!(rep.verified());

        // A single translate fails already at the singletons it misses.
        let rep = check_witness_group(&gv, 2, &lifted[..1], 5, &lim).unwrap();
        match &rep.outcome {
            GroupCheckOutcome::Refuted { counterexample, evidence } => {
                assert_eq!(counterexample.len(), 1);
                assert_eq!(evidence.len(), 1);
                assert!(!gv.member(&counterexample[0]).unwrap());
            }
            other => panic!("expected refutation, got {other:?}"),
        }

        // With both parities covered, an escaping set needs one point of
        // each parity class.
        let rep = check_witness_group(&gv, 2, &lifted, 5, &lim).unwrap();
        match &rep.outcome {
            GroupCheckOutcome::Refuted { counterexample, .. } => {
                assert_eq!(counterexample.len(), 2);
                let parities: Vec<i64> =
                    counterexample.iter().map(|e| (e[0] + e[1]).rem_euclid(2)).collect();
                assert_ne!(parities[0], parities[1]);
            }
            other => panic!("expected refutation, got {other:?}"),
        }

        let d = group_density(&gv, 20, &lim).unwrap();
        assert_eq!(d, Rational::new(441, 841));
        assert!((d.to_f64() - 0.5).abs() < 0.05);
    }

    #[test]
    fn index_lift_semantics() {
        let lim = limits();
        // floor(z/2) even ⟺ z mod 4 ∈ {0, 1}.
        let lifted = finite_index_lift(&SetDescriptor::evens(), 2).unwrap();
        let e = lifted.compile(&lim).unwrap();
        let quarters = SetDescriptor::Periodic { period: 4, residues: vec![0, 1] }
            .compile(&lim)
            .unwrap();
        for z in -50..=50i128 {
            assert_eq!(e.member(z).unwrap(), quarters.member(z).unwrap(), "z={z}");
        }
        // k = 1 is the identity.
        let same = finite_index_lift(&SetDescriptor::CorollaryB, 1).unwrap();
        let s = same.compile(&lim).unwrap();
        let orig = SetDescriptor::CorollaryB.compile(&lim).unwrap();
        for z in -80..=80i128 {
            assert_eq!(s.member(z).unwrap(), orig.member(z).unwrap());
        }
        // Density matches at matched radii: [−42, 41] is the exact preimage
        // of [−21, 20] under floor-division by 2, so the count doubles.
        let w_lift = e.window(-42, 41).unwrap();
        let w_base = SetDescriptor::evens().compile(&lim).unwrap().window(-21, 20).unwrap();
        assert_eq!(w_lift.count_members(), 2 * w_base.count_members());
    }

    #[test]
    fn finite_index_union_compiles_as_group_set() {
        let lim = limits();
        let g = GroupSetDescriptor::FiniteIndexUnion { base: SetDescriptor::evens(), k: 2 };
        assert_eq!(g.group(), Group::FreeAbelian { rank: 1 });
        let gv = g.compile(&lim).unwrap();
        assert!(gv.member(&[4]).unwrap());
        assert!(gv.member(&[5]).unwrap());
        assert!(!gv.member(&[2]).unwrap());
        let d = group_density(&gv, 20, &lim).unwrap();
        assert_eq!(d, Rational::new(21, 41));
    }
}
