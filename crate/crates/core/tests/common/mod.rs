//! Reference implementations kept independent of the library internals.
#![allow(dead_code)]

use rrank::{Decomposition, Field, Partition, PartitionFamily, Scalar, Tensor};

/// Block label of every coordinate of the ground set, `usize::MAX` outside.
pub fn labels(p: &Partition) -> Vec<usize> {
    let mut out = vec![usize::MAX; 32];
    for (b, part) in p.to_one_based().iter().enumerate() {
        for &i in part {
            out[i - 1] = b;
        }
    }
    out
}

/// `p ≺ q` iff equal labels under `p` imply equal labels under `q`.
pub fn finer(p: &Partition, q: &Partition) -> bool {
    let (lp, lq) = (labels(p), labels(q));
    let ground = p.ground().to_vec();
    ground.iter().all(|&i| ground.iter().all(|&j| lp[i] != lp[j] || lq[i] == lq[j]))
}

/// Coordinates share a block of `p ∧ q` iff they share one in both.
pub fn meet(p: &Partition, q: &Partition) -> Vec<Vec<usize>> {
    let (lp, lq) = (labels(p), labels(q));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in p.ground().to_vec() {
        match blocks.iter_mut().find(|b| lp[b[0] - 1] == lp[i] && lq[b[0] - 1] == lq[i]) {
            Some(b) => b.push(i + 1),
            None => blocks.push(vec![i + 1]),
        }
    }
    blocks.sort();
    blocks
}

/// Parts sorted lexicographically, as [`meet`] returns them.
pub fn canon(p: &Partition) -> Vec<Vec<usize>> {
    let mut v = p.to_one_based();
    v.sort();
    v
}

pub fn canon_family(r: &PartitionFamily) -> Vec<Vec<Vec<usize>>> {
    let mut v: Vec<_> = r.members().iter().map(canon).collect();
    v.sort();
    v
}

pub fn meet_family(r1: &PartitionFamily, r2: &PartitionFamily) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> =
        r1.members().iter().flat_map(|p| r2.members().iter().map(move |q| meet(p, q))).collect();
    out.sort();
    out.dedup();
    out
}

pub fn family_finer(r1: &PartitionFamily, r2: &PartitionFamily) -> bool {
    r1.members().iter().all(|p| r2.members().iter().any(|q| finer(p, q)))
}

fn row_major(coords: &[usize], dims: &[usize], axes: &[usize]) -> usize {
    axes.iter().fold(0, |acc, &a| acc * dims[a] + coords[a])
}

/// Entry-by-entry sum of products of factor entries.
pub fn evaluate(dec: &Decomposition) -> Vec<Scalar> {
    let dims = dec.shape().dims().to_vec();
    let d = dims.len();
    let size: usize = dims.iter().product();
    let field = dec.field();
    (0..size)
        .map(|lin| {
            let mut coords = vec![0; d];
            let mut x = lin;
            for a in (0..d).rev() {
                coords[a] = x % dims[a];
                x /= dims[a];
            }
            let mut total = field.zero();
            for term in dec.terms() {
                let mut prod = field.one();
                for (part, f) in term.partition().to_one_based().iter().zip(term.factors()) {
                    let axes: Vec<usize> = part.iter().map(|i| i - 1).collect();
                    prod = &prod * &f.values()[row_major(&coords, &dims, &axes)];
                }
                total = &total + &prod;
            }
            total
        })
        .collect()
}

pub fn verifies(dec: &Decomposition, t: &Tensor) -> bool {
    dec.shape() == t.shape() && evaluate(dec) == t.values()
}

pub fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

/// `⌈x^{1/k}⌉` by counting up.
pub fn ceil_root(x: u128, k: u32) -> u128 {
    let mut r = 0u128;
    while r.pow(k) < x {
        r += 1;
    }
    r
}
