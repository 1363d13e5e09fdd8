//! Exhaustive `R`-rank over tiny shapes and small prime fields.
//!
//! Tensors are packed into a `u128`, one lane of `w + 1` bits per entry where
//! `2^w > 2(q-1)`; the top bit of each lane is a guard used by the lane-wise
//! reduction mod `q`. Rank is found by growing the sets `L_k` of sums of at
//! most `k` rank-one tensors and meeting in the middle: `T ∈ L_{a+b}` iff
//! `T - y ∈ L_a` for some `y ∈ L_b`.
//!
//! Nothing here uses the library's linear algebra; only the input and output
//! types are shared.

use std::collections::HashSet;

use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::exactlin::{Field, FuncTable};
use crate::partitions::PartitionFamily;
use crate::tensor::{Shape, Tensor};

/// Search limits. The defaults are the desk-scale budget; raising them
/// requires `accept_cost`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_entries: usize,
    pub max_k: usize,
    pub accept_cost: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_entries: 16, max_k: 4, accept_cost: false }
    }
}

impl Budget {
    pub fn with_cost(max_entries: usize, max_k: usize) -> Budget {
        Budget { max_entries, max_k, accept_cost: true }
    }
}

const DEFAULT: Budget = Budget { max_entries: 16, max_k: 4, accept_cost: false };

/// `Exceeds(k)`: no decomposition of length at most `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankResult {
    Exact(usize),
    Exceeds(usize),
}

impl RankResult {
    pub fn exact(self) -> Option<usize> {
        match self {
            RankResult::Exact(k) => Some(k),
            RankResult::Exceeds(_) => None,
        }
    }

    /// A lower bound on the true rank.
    pub fn at_least(self) -> usize {
        match self {
            RankResult::Exact(k) => k,
            RankResult::Exceeds(k) => k + 1,
        }
    }
}

impl std::fmt::Display for RankResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankResult::Exact(k) => write!(f, "{k}"),
            RankResult::Exceeds(k) => write!(f, "exceeds {k}"),
        }
    }
}

/// Lane layout for one `(q, N)`.
#[derive(Clone, Copy, Debug)]
struct Packing {
    q: u32,
    entries: usize,
    w: u32,
    lane: u32,
    low: u128,
    guard: u128,
    offset: u128,
    qs: u128,
}

impl Packing {
    fn new(q: u32, entries: usize) -> Result<Packing> {
        let w = 32 - (2 * (q - 1)).leading_zeros();
        let lane = w + 1;
        if entries == 0 || entries * lane as usize > 128 {
            return Err(Error::Budget(format!("{entries} entries over GF({q}) do not fit the packed representation")));
        }
        let mut low = 0u128;
        let mut guard = 0u128;
        let mut offset = 0u128;
        let mut qs = 0u128;
        for e in 0..entries {
            let base = e as u32 * lane;
            low |= ((1u128 << w) - 1) << base;
            guard |= 1u128 << (base + w);
            offset |= ((1u128 << w) - q as u128) << base;
            qs |= (q as u128) << base;
        }
        Ok(Packing { q, entries, w, lane, low, guard, offset, qs })
    }

    /// Lanes in `[0, 2q-2]` reduced mod `q`.
    fn reduce(&self, s: u128) -> u128 {
        let t = s + self.offset;
        let g = t & self.guard;
        let mask = g - (g >> self.w);
        ((t & mask) | (s & !mask)) & self.low
    }

    fn add(&self, a: u128, b: u128) -> u128 {
        self.reduce(a + b)
    }

    fn neg(&self, a: u128) -> u128 {
        self.reduce(self.qs - a)
    }

    fn get(&self, a: u128, e: usize) -> u32 {
        ((a >> (e as u32 * self.lane)) & ((1u128 << self.w) - 1)) as u32
    }

    fn pack(&self, vals: &[u32]) -> u128 {
        vals.iter().enumerate().fold(0u128, |acc, (e, &v)| acc | ((v as u128) << (e as u32 * self.lane)))
    }

    #[cfg(test)]
    fn scale(&self, a: u128, c: u32) -> u128 {
        let vals: Vec<u32> = (0..self.entries).map(|e| self.get(a, e) * c % self.q).collect();
        self.pack(&vals)
    }

    fn index(&self, a: u128) -> usize {
        (0..self.entries).rev().fold(0usize, |acc, e| acc * self.q as usize + self.get(a, e) as usize)
    }

    /// Scalar-multiple representative: first non-zero entry equal to one.
    fn is_normalised(&self, a: u128) -> bool {
        (0..self.entries).map(|e| self.get(a, e)).find(|&v| v != 0) == Some(1)
    }
}

enum Membership {
    Bits(Vec<u64>),
    Hash(HashSet<u128>),
}

/// A set of packed tensors with insertion order kept for iteration.
struct Layer {
    member: Membership,
    items: Vec<u128>,
}

impl Layer {
    fn new(pk: &Packing) -> Layer {
        let space = (pk.q as f64).powi(pk.entries as i32);
        let member = if space <= (1u64 << 26) as f64 {
            Membership::Bits(vec![0u64; (space as usize).div_ceil(64)])
        } else {
            Membership::Hash(HashSet::new())
        };
        Layer { member, items: Vec::new() }
    }

    fn contains(&self, pk: &Packing, a: u128) -> bool {
        match &self.member {
            Membership::Bits(b) => {
                let i = pk.index(a);
                b[i / 64] >> (i % 64) & 1 == 1
            }
            Membership::Hash(h) => h.contains(&a),
        }
    }

    fn insert(&mut self, pk: &Packing, a: u128) -> bool {
        let fresh = match &mut self.member {
            Membership::Bits(b) => {
                let i = pk.index(a);
                let hit = b[i / 64] >> (i % 64) & 1 == 1;
                b[i / 64] |= 1 << (i % 64);
                !hit
            }
            Membership::Hash(h) => h.insert(a),
        };
        if fresh {
            self.items.push(a);
        }
        fresh
    }
}

fn field_order(field: Field, budget: &Budget) -> Result<u32> {
    let q = match field {
        Field::Prime(p) => p,
        Field::Rational => return Err(Error::Budget("the oracle needs a finite field".into())),
    };
    if !budget.accept_cost && q > 3 {
        return Err(Error::Budget(format!("GF({q}) is outside the default budget of GF(2) and GF(3)")));
    }
    Ok(q)
}

fn check_budget(shape: &Shape, field: Field, budget: &Budget) -> Result<Packing> {
    if shape.order() == 0 || shape.size() == 0 {
        return Err(Error::InvalidShape("the oracle needs a non-empty shape".into()));
    }
    if !budget.accept_cost && (budget.max_entries > DEFAULT.max_entries || budget.max_k > DEFAULT.max_k) {
        return Err(Error::Budget("budgets above the defaults need accept_cost".into()));
    }
    if shape.size() > budget.max_entries {
        return Err(Error::Budget(format!("{} entries exceed the budget of {}", shape.size(), budget.max_entries)));
    }
    Packing::new(field_order(field, budget)?, shape.size())
}

fn pack_tensor(pk: &Packing, t: &Tensor) -> u128 {
    let vals: Vec<u32> = t.values().iter().map(|v| v.residue().expect("prime field")).collect();
    pk.pack(&vals)
}

fn unpack(pk: &Packing, shape: &Shape, field: Field, a: u128) -> Tensor {
    let vals: Vec<i64> = (0..pk.entries).map(|e| pk.get(a, e) as i64).collect();
    Tensor::new(shape.clone(), FuncTable::from_i64(field, &vals)).expect("shape matches")
}

/// Every non-zero table over `q` on `len` points.
fn nonzero_tables(q: u32, len: usize) -> Vec<Vec<u32>> {
    let total = (q as usize).pow(len as u32);
    (1..total)
        .map(|mut x| {
            (0..len)
                .map(|_| {
                    let v = (x % q as usize) as u32;
                    x /= q as usize;
                    v
                })
                .collect()
        })
        .collect()
}

fn advance(pick: &mut [usize], tables: &[Vec<Vec<u32>>]) -> bool {
    for k in (0..pick.len()).rev() {
        pick[k] += 1;
        if pick[k] < tables[k].len() {
            return true;
        }
        pick[k] = 0;
    }
    false
}

/// All non-zero rank-one tensors, closed under scaling.
fn rank1_packed(r: &PartitionFamily, shape: &Shape, pk: &Packing) -> Result<Vec<u128>> {
    let mut seen = Layer::new(pk);
    let mut coords = vec![0usize; 32];
    for p in r.members() {
        let parts = p.parts();
        let subs: Vec<Shape> = parts.iter().map(|&j| shape.restrict(j)).collect::<Result<_>>()?;
        // per entry, its linear position inside each part
        let pos: Vec<Vec<usize>> = (0..pk.entries)
            .map(|lin| {
                shape.unravel_into(lin, &mut coords);
                subs.iter().map(|s| s.linear(&coords)).collect()
            })
            .collect();
        let tables: Vec<Vec<Vec<u32>>> = subs.iter().map(|s| nonzero_tables(pk.q, s.size())).collect();
        let mut pick = vec![0usize; parts.len()];
        loop {
            let vals: Vec<u32> = pos
                .iter()
                .map(|ps| {
                    ps.iter()
                        .enumerate()
                        .fold(1u32, |acc, (k, &i)| acc * tables[k][pick[k]][i] % pk.q)
                })
                .collect();
            seen.insert(pk, pk.pack(&vals));
            if !advance(&mut pick, &tables) {
                break;
            }
        }
    }
    Ok(seen.items)
}

/// All distinct non-zero tensors of `R`-rank one, one per scalar multiple.
pub fn enumerate_rank1(r: &PartitionFamily, shape: &Shape, field: Field, budget: &Budget) -> Result<Vec<Tensor>> {
    if r.ground() != shape.axes() {
        return Err(Error::GroundMismatch(r.ground(), shape.axes()));
    }
    let pk = check_budget(shape, field, budget)?;
    let all = rank1_packed(r, shape, &pk)?;
    let mut reps: Vec<u128> = all.into_iter().filter(|&a| pk.is_normalised(a)).collect();
    reps.sort_unstable();
    Ok(reps.into_iter().map(|a| unpack(&pk, shape, field, a)).collect())
}

/// Minimum number of `R`-rank-one summands of `t`, searched up to `max_k`.
pub fn exact_rank(t: &Tensor, r: &PartitionFamily, max_k: usize, budget: &Budget) -> Result<RankResult> {
    if r.ground() != t.axes() {
        return Err(Error::GroundMismatch(r.ground(), t.axes()));
    }
    if max_k > budget.max_k {
        return Err(Error::Budget(format!("max_k = {max_k} exceeds the budget of {}", budget.max_k)));
    }
    let pk = check_budget(t.shape(), t.field(), budget)?;
    let target = pack_tensor(&pk, t);
    if target == 0 {
        return Ok(RankResult::Exact(0));
    }
    if max_k == 0 {
        return Ok(RankResult::Exceeds(0));
    }
    if r.contains_trivial() {
        return Ok(RankResult::Exact(1));
    }
    let gens = rank1_packed(r, t.shape(), &pk)?;
    // layers[k] = sums of at most k generators
    let mut layers: Vec<Layer> = Vec::new();
    let mut zero = Layer::new(&pk);
    zero.insert(&pk, 0);
    layers.push(zero);
    let mut frontier = vec![0u128];
    for k in 1..=max_k {
        let a = k.div_ceil(2);
        while layers.len() <= a {
            let mut next = Layer::new(&pk);
            for &x in &layers.last().unwrap().items {
                next.insert(&pk, x);
            }
            let mut fresh = Vec::new();
            for &f in &frontier {
                for &g in &gens {
                    let s = pk.add(f, g);
                    if next.insert(&pk, s) {
                        fresh.push(s);
                    }
                }
            }
            frontier = fresh;
            layers.push(next);
        }
        let (la, lb) = (&layers[a], &layers[k - a]);
        if lb.items.iter().any(|&y| la.contains(&pk, pk.add(target, pk.neg(y)))) {
            return Ok(RankResult::Exact(k));
        }
    }
    Ok(RankResult::Exceeds(max_k))
}

/// Outcome of [`cross_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub verified: bool,
    /// `None` when the instance is outside the budget.
    pub rank: Option<RankResult>,
    pub consistent: bool,
}

/// Verifies `dec` against `t` and, when the budget allows, confirms the
/// oracle rank does not exceed its length.
pub fn cross_check(dec: &Decomposition, t: &Tensor, budget: &Budget) -> Result<CrossCheck> {
    let verified = dec.verify(t);
    let k = dec.len().min(budget.max_k);
    let rank = match exact_rank(t, dec.family(), k, budget) {
        Ok(r) => Some(r),
        Err(Error::Budget(_)) => None,
        Err(e) => return Err(e),
    };
    let consistent = verified
        && match rank {
            Some(RankResult::Exact(r)) => r <= dec.len(),
            Some(RankResult::Exceeds(_)) => dec.len() > k,
            None => true,
        };
    Ok(CrossCheck { verified, rank, consistent })
}
