//! Seeded random instances: partitions, families, planted decompositions and
//! split-form pairs for the fragmentation step.
//!
//! Everything draws from a caller-supplied `ChaCha8Rng`, so a seed fixes the
//! output on every platform.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::{Decomposition, Rank1Term, SplitForm};
use crate::error::Result;
use crate::exactlin::{independent, Field, FuncTable, Scalar};
use crate::partitions::{Partition, PartitionFamily, Subset};
use crate::tensor::{Shape, Tensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform over `GF(p)`; integers in `[-3, 3]` over `Q`.
pub fn random_scalar(field: Field, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p as i64)),
        Field::Rational => field.from_i64(rng.gen_range(-3..=3)),
    }
}

pub fn random_tensor(shape: Shape, field: Field, rng: &mut ChaCha8Rng) -> Tensor {
    let values = (0..shape.size()).map(|_| random_scalar(field, rng)).collect();
    Tensor::new(shape, FuncTable::raw(field, values)).expect("table matches shape")
}

/// Each element joins an existing block or opens a new one with equal odds.
pub fn random_partition(ground: Subset, rng: &mut ChaCha8Rng) -> Partition {
    let mut parts: Vec<Subset> = Vec::new();
    for i in ground.iter() {
        let k = rng.gen_range(0..=parts.len());
        if k == parts.len() {
            parts.push(Subset::singleton(i));
        } else {
            parts[k] = parts[k].union(Subset::singleton(i));
        }
    }
    Partition::new(ground, parts).expect("blocks cover the ground set")
}

/// Between one and `max_members` random partitions, optionally avoiding the
/// trivial one.
pub fn random_family(ground: Subset, max_members: usize, allow_trivial: bool, rng: &mut ChaCha8Rng) -> PartitionFamily {
    loop {
        let m = rng.gen_range(1..=max_members.max(1));
        let members: Vec<Partition> = (0..m)
            .map(|_| random_partition(ground, rng))
            .filter(|p| allow_trivial || !p.is_trivial() || ground.len() <= 1)
            .collect();
        if let Ok(f) = PartitionFamily::new(members) {
            return f;
        }
    }
}

/// Random factors on each part; factors are redrawn until non-zero.
pub fn random_term(partition: &Partition, shape: &Shape, field: Field, rng: &mut ChaCha8Rng) -> Rank1Term {
    let factors = partition
        .parts()
        .iter()
        .map(|&part| {
            let sub = shape.restrict(part).expect("part inside the shape");
            loop {
                let t = random_tensor(sub.clone(), field, rng);
                if !t.is_zero() {
                    break t;
                }
            }
        })
        .collect();
    Rank1Term::new(partition.clone(), factors).expect("factors match parts")
}

pub fn planted_decomposition(
    family: &PartitionFamily,
    shape: &Shape,
    field: Field,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Decomposition {
    let terms = (0..len)
        .map(|_| {
            let p = family.members().choose(rng).expect("families are non-empty");
            random_term(p, shape, field, rng)
        })
        .collect();
    Decomposition::new(family.clone(), shape.clone(), field, terms).expect("planted terms are family members")
}

/// A tensor with an `R1`- and an `R2`-decomposition: each planted term lives
/// on `P1 ∧ P2` for random members and is regrouped both ways.
pub fn planted_pair(
    r1: &PartitionFamily,
    r2: &PartitionFamily,
    shape: &Shape,
    field: Field,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> (Tensor, Decomposition, Decomposition) {
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for _ in 0..len {
        let p1 = r1.members().choose(rng).expect("non-empty");
        let p2 = r2.members().choose(rng).expect("non-empty");
        let x = random_term(&p1.meet(p2).expect("same ground"), shape, field, rng);
        t1.push(x.regroup(p1).expect("meet refines p1"));
        t2.push(x.regroup(p2).expect("meet refines p2"));
    }
    let d1 = Decomposition::new(r1.clone(), shape.clone(), field, t1).expect("members");
    let d2 = Decomposition::new(r2.clone(), shape.clone(), field, t2).expect("members");
    (d1.evaluate(), d1, d2)
}

/// Adds `x` regrouped to one member and `-x` regrouped to another, so the
/// evaluation is unchanged but the split forms pick up dependences.
pub fn add_null_pair(dec: &Decomposition, rng: &mut ChaCha8Rng) -> Decomposition {
    let fam = dec.family();
    let a = fam.members().choose(rng).expect("non-empty");
    let b = fam.members().choose(rng).expect("non-empty");
    let x = random_term(&a.meet(b).expect("same ground"), dec.shape(), dec.field(), rng);
    let mut terms = dec.terms().to_vec();
    terms.push(x.regroup(a).expect("refines"));
    terms.push(x.regroup(b).expect("refines").scaled(&-dec.field().one()));
    Decomposition::new(fam.clone(), dec.shape().clone(), dec.field(), terms).expect("members")
}

/// Input to the fragmentation step: split forms at `J = J_max(R1 ∪ R2)` with
/// jointly independent `A`-families.
#[derive(Clone, Debug)]
pub struct FragmentInstance {
    pub r1: PartitionFamily,
    pub r2: PartitionFamily,
    pub tensor: Tensor,
    pub sf1: SplitForm,
    pub sf2: SplitForm,
}

/// Terms on `P1 ∧ P2` become a pair on side `i` exactly when `J ∈ Pi`, so
/// pairs on one side are `F`-terms on the other. Returns `None` if no valid
/// instance turned up within `attempts` draws.
pub fn fragment_instance(
    order: usize,
    n: usize,
    field: Field,
    max_terms: usize,
    attempts: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<FragmentInstance>> {
    let ground = Subset::full(order);
    let shape = Shape::uniform(ground, n)?;
    for _ in 0..attempts {
        let r1 = random_family(ground, 3, false, rng);
        let r2 = random_family(ground, 3, false, rng);
        let union = r1.union(&r2)?;
        if union.is_tensor_rank() {
            continue;
        }
        let j = union.j_max();
        if j == ground {
            continue;
        }
        let mut combos = Vec::new();
        for p1 in r1.members() {
            for p2 in r2.members() {
                if p1.contains_part(j) && p2.contains_part(j) {
                    continue;
                }
                combos.push((p1, p2));
            }
        }
        if !combos.iter().any(|(p1, p2)| p1.contains_part(j) || p2.contains_part(j)) {
            continue;
        }
        let len = rng.gen_range(1..=max_terms.max(1));
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        for _ in 0..len {
            let (p1, p2) = *combos.choose(rng).expect("non-empty");
            let x = random_term(&p1.meet(p2)?, &shape, field, rng);
            t1.push(x.regroup(p1)?);
            t2.push(x.regroup(p2)?);
        }
        let d1 = Decomposition::new(r1.clone(), shape.clone(), field, t1)?;
        let d2 = Decomposition::new(r2.clone(), shape.clone(), field, t2)?;
        let sf1 = d1.split_at(j)?;
        let sf2 = d2.split_at(j)?;
        if sf1.r() + sf2.r() == 0 {
            continue;
        }
        let tables = [sf1.a_tables(), sf2.a_tables()].concat();
        if !independent(&tables)? {
            continue;
        }
        return Ok(Some(FragmentInstance { r1, r2, tensor: d1.evaluate(), sf1, sf2 }));
    }
    Ok(None)
}
