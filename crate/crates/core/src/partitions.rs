//! Set partitions of subsets of `[d]`, the refinement order, least common
//! refinements and the auxiliary families attached to a distinguished part.
//!
//! Coordinates are 0-based internally and printed 1-based. Subsets are bit
//! masks; their total order (size first, then colexicographic) coincides with
//! comparing `(popcount, mask)`, which is what the derived `Ord` does.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: usize = 32;

/// Largest ground set for which whole-lattice enumeration is allowed.
pub const MAX_ENUMERATION_ORDER: usize = 8;

/// A subset of `{0, .., 31}` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Subset {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Subset {
        assert!(i < MAX_ORDER);
        Subset(1 << i)
    }

    /// `{0, .., d-1}`
    pub fn full(d: usize) -> Subset {
        assert!(d <= MAX_ORDER);
        if d == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << d) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Result<Subset> {
        let mut bits = 0u32;
        for i in it {
            if i >= MAX_ORDER {
                return Err(Error::InvalidSubset(format!("index {i} out of range")));
            }
            if bits >> i & 1 == 1 {
                return Err(Error::InvalidSubset(format!("duplicate index {}", i + 1)));
            }
            bits |= 1 << i;
        }
        Ok(Subset(bits))
    }

    /// Builds a subset from 1-based indices, as used in JSON and in the docs.
    pub fn from_one_based(items: &[usize]) -> Result<Subset> {
        if items.contains(&0) {
            return Err(Error::InvalidSubset("indices are 1-based".into()));
        }
        Subset::from_indices(items.iter().map(|i| i - 1))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ORDER && self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset_of(self, other: Subset) -> bool {
        self.is_subset_of(other) && self != other
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_ORDER).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Position of `i` among the members (its rank), if present.
    pub fn position(self, i: usize) -> Option<usize> {
        self.contains(i)
            .then(|| (self.0 & ((1u32 << i) - 1)).count_ones() as usize)
    }

    /// All non-empty proper subsets `A` with `min(self) ∈ A`, i.e. one
    /// representative `{A, self \ A}` of every bipartition.
    pub fn bipartitions(self) -> Vec<(Subset, Subset)> {
        let members = self.to_vec();
        if members.len() < 2 {
            return Vec::new();
        }
        let rest = &members[1..];
        let mut out = Vec::new();
        for mask in 0u32..(1 << rest.len()) - 1 {
            let mut a = Subset::singleton(members[0]);
            for (k, &m) in rest.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    a = a.union(Subset::singleton(m));
                }
            }
            out.push((a, self.difference(a)));
        }
        out
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Strict total order on subsets: smaller size first, ties broken
/// colexicographically (compare the largest differing element).
pub fn subset_less(a: Subset, b: Subset) -> bool {
    a < b
}

/// A set partition of an explicit ground set. Parts are kept sorted
/// increasingly under the subset order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: Subset,
    parts: Vec<Subset>,
}

impl Partition {
    pub fn new(ground: Subset, mut parts: Vec<Subset>) -> Result<Partition> {
        let mut seen = Subset::EMPTY;
        for p in &parts {
            if p.is_empty() {
                return Err(Error::InvalidPartition("empty part".into()));
            }
            if p.intersects(seen) {
                return Err(Error::InvalidPartition(format!("part {p} overlaps another part")));
            }
            seen = seen.union(*p);
        }
        if seen != ground {
            return Err(Error::InvalidPartition(format!(
                "parts cover {seen}, expected {ground}"
            )));
        }
        parts.sort_unstable();
        Ok(Partition { ground, parts })
    }

    /// Partition whose ground set is the union of the given parts.
    pub fn from_parts(parts: Vec<Subset>) -> Result<Partition> {
        let ground = parts.iter().fold(Subset::EMPTY, |a, p| a.union(*p));
        Partition::new(ground, parts)
    }

    /// Parses 1-based part lists such as `[[1, 4], [2, 3]]`.
    pub fn from_one_based(parts: &[Vec<usize>]) -> Result<Partition> {
        let parts = parts
            .iter()
            .map(|p| Subset::from_one_based(p))
            .collect::<Result<Vec<_>>>()?;
        Partition::from_parts(parts)
    }

    /// `{ground}`
    pub fn trivial(ground: Subset) -> Partition {
        assert!(!ground.is_empty());
        Partition {
            ground,
            parts: vec![ground],
        }
    }

    /// All singletons of `ground`.
    pub fn discrete(ground: Subset) -> Partition {
        Partition {
            ground,
            parts: ground.iter().map(Subset::singleton).collect(),
        }
    }

    pub fn ground(&self) -> Subset {
        self.ground
    }

    pub fn parts(&self) -> &[Subset] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.parts.len() == self.ground.len()
    }

    pub fn contains_part(&self, j: Subset) -> bool {
        self.parts.binary_search(&j).is_ok()
    }

    pub fn part_index(&self, j: Subset) -> Option<usize> {
        self.parts.binary_search(&j).ok()
    }

    /// The part containing coordinate `i`.
    pub fn part_of(&self, i: usize) -> Option<Subset> {
        self.parts.iter().copied().find(|p| p.contains(i))
    }

    /// `self \ {j}` as a partition of `ground \ j`.
    pub fn without_part(&self, j: Subset) -> Result<Partition> {
        if !self.contains_part(j) {
            return Err(Error::InvalidPartition(format!("{j} is not a part of {self}")));
        }
        if self.parts.len() == 1 {
            return Err(Error::InvalidPartition("cannot remove the only part".into()));
        }
        Ok(Partition {
            ground: self.ground.difference(j),
            parts: self.parts.iter().copied().filter(|p| *p != j).collect(),
        })
    }

    /// Adds parts disjoint from the current ground set.
    pub fn with_parts(&self, extra: &[Subset]) -> Result<Partition> {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(extra);
        let ground = extra.iter().fold(self.ground, |g, p| g.union(*p));
        Partition::new(ground, parts)
    }

    /// `self ≺ other`: every part of `self` lies inside a part of `other`.
    pub fn is_finer_than(&self, other: &Partition) -> Result<bool> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground, other.ground));
        }
        Ok(self.is_finer_unchecked(other))
    }

    fn is_finer_unchecked(&self, other: &Partition) -> bool {
        self.parts
            .iter()
            .all(|p| other.parts.iter().any(|q| p.is_subset_of(*q)))
    }

    /// Least common refinement `self ∧ other`.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground, other.ground));
        }
        let mut parts = Vec::new();
        for p in &self.parts {
            for q in &other.parts {
                let i = p.intersection(*q);
                if !i.is_empty() {
                    parts.push(i);
                }
            }
        }
        parts.sort_unstable();
        Ok(Partition {
            ground: self.ground,
            parts,
        })
    }

    /// Relabels the ground set onto `{0, .., |ground|-1}` preserving order.
    pub fn relabel_to_dense(&self) -> Partition {
        let g = self.ground;
        let parts = self
            .parts
            .iter()
            .map(|p| {
                Subset::from_indices(p.iter().map(|i| g.position(i).unwrap())).unwrap()
            })
            .collect();
        Partition::new(Subset::full(g.len()), parts).unwrap()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.parts.iter().map(|p| p.to_one_based()).collect()
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts
            .cmp(&other.parts)
            .then(self.ground.cmp(&other.ground))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Checks `p2 ≺ p1`.
pub fn is_finer(p2: &Partition, p1: &Partition) -> Result<bool> {
    p2.is_finer_than(p1)
}

/// Least common refinement of a non-empty list of partitions.
pub fn meet_partitions(ps: &[Partition]) -> Result<Partition> {
    let (first, rest) = ps
        .split_first()
        .ok_or_else(|| Error::InvalidPartition("meet of an empty list".into()))?;
    rest.iter().try_fold(first.clone(), |acc, p| acc.meet(p))
}

/// A non-empty, deduplicated, sorted family of partitions of one ground set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionFamily {
    ground: Subset,
    members: Vec<Partition>,
}

impl PartitionFamily {
    pub fn new(members: Vec<Partition>) -> Result<PartitionFamily> {
        let ground = members.first().ok_or(Error::EmptyFamily)?.ground;
        if let Some(bad) = members.iter().find(|p| p.ground != ground) {
            return Err(Error::GroundMismatch(ground, bad.ground));
        }
        let members: BTreeSet<Partition> = members.into_iter().collect();
        Ok(PartitionFamily {
            ground,
            members: members.into_iter().collect(),
        })
    }

    pub fn single(p: Partition) -> PartitionFamily {
        PartitionFamily {
            ground: p.ground,
            members: vec![p],
        }
    }

    pub fn from_one_based(family: &[Vec<Vec<usize>>]) -> Result<PartitionFamily> {
        PartitionFamily::new(
            family
                .iter()
                .map(|p| Partition::from_one_based(p))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `R_tr`: the discrete partition only (tensor rank).
    pub fn tensor_rank(ground: Subset) -> PartitionFamily {
        PartitionFamily::single(Partition::discrete(ground))
    }

    /// `{ {ground} }`
    pub fn trivial(ground: Subset) -> PartitionFamily {
        PartitionFamily::single(Partition::trivial(ground))
    }

    /// Slice rank: `{ {{j}, {j}^c} : j ∈ ground }`.
    pub fn slice_rank(ground: Subset) -> Result<PartitionFamily> {
        if ground.len() < 2 {
            return Err(Error::InvalidPartition("slice rank needs order >= 2".into()));
        }
        PartitionFamily::new(
            ground
                .iter()
                .map(|j| {
                    let s = Subset::singleton(j);
                    Partition::new(ground, vec![s, ground.difference(s)]).unwrap()
                })
                .collect(),
        )
    }

    /// Partition rank: every bipartition of the ground set.
    pub fn partition_rank(ground: Subset) -> Result<PartitionFamily> {
        if ground.len() < 2 {
            return Err(Error::InvalidPartition("partition rank needs order >= 2".into()));
        }
        if ground.len() > MAX_ENUMERATION_ORDER {
            return Err(Error::EnumerationLimit(ground.len()));
        }
        PartitionFamily::new(
            ground
                .bipartitions()
                .into_iter()
                .map(|(a, b)| Partition::new(ground, vec![a, b]).unwrap())
                .collect(),
        )
    }

    /// `j`-flattening rank: `{ {{j}, {j}^c} }`.
    pub fn flattening(ground: Subset, j: usize) -> Result<PartitionFamily> {
        if !ground.contains(j) || ground.len() < 2 {
            return Err(Error::InvalidPartition(format!("no flattening at {}", j + 1)));
        }
        let s = Subset::singleton(j);
        Ok(PartitionFamily::single(Partition::new(
            ground,
            vec![s, ground.difference(s)],
        )?))
    }

    pub fn ground(&self) -> Subset {
        self.ground
    }

    pub fn members(&self) -> &[Partition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.members.binary_search(p).is_ok()
    }

    pub fn contains_trivial(&self) -> bool {
        self.members.iter().any(Partition::is_trivial)
    }

    pub fn is_tensor_rank(&self) -> bool {
        self.members.len() == 1 && self.members[0].is_discrete()
    }

    pub fn union(&self, other: &PartitionFamily) -> Result<PartitionFamily> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground, other.ground));
        }
        let mut m = self.members.clone();
        m.extend(other.members.iter().cloned());
        PartitionFamily::new(m)
    }

    /// `self ≺ other`: each member of `self` is finer than some member of `other`.
    pub fn is_finer_than(&self, other: &PartitionFamily) -> Result<bool> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground, other.ground));
        }
        Ok(self
            .members
            .iter()
            .all(|p| other.members.iter().any(|q| p.is_finer_unchecked(q))))
    }

    /// The least member of `self` that `p` refines, if any.
    pub fn least_coarsening(&self, p: &Partition) -> Option<&Partition> {
        self.members.iter().find(|q| p.is_finer_unchecked(q))
    }

    /// Cartesian least common refinement `self ∧ other`.
    pub fn meet(&self, other: &PartitionFamily) -> Result<PartitionFamily> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch(self.ground, other.ground));
        }
        let mut m = Vec::with_capacity(self.len() * other.len());
        for p in &self.members {
            for q in &other.members {
                m.push(p.meet(q)?);
            }
        }
        PartitionFamily::new(m)
    }

    /// Maximum part, under the subset order, over all members.
    pub fn j_max(&self) -> Subset {
        self.members
            .iter()
            .map(|p| *p.parts.last().expect("partitions are non-empty"))
            .max()
            .expect("families are non-empty")
    }

    /// The five auxiliary families attached to `j`.
    pub fn derived(&self, j: Subset) -> Result<DerivedFamilies> {
        if j.is_empty() || !j.is_strict_subset_of(self.ground) {
            return Err(Error::Precondition(format!(
                "derived families need a non-empty strict subset of {}, got {j}",
                self.ground
            )));
        }
        let (plus, minus): (Vec<Partition>, Vec<Partition>) =
            self.members.iter().cloned().partition(|q| q.contains_part(j));
        let comp: Vec<Partition> = dedup(plus.iter().map(|q| q.without_part(j).unwrap()).collect());
        let mut new = Vec::new();
        for q in &comp {
            for (a, b) in j.bipartitions() {
                new.push(q.with_parts(&[a, b]).unwrap());
            }
        }
        let new = dedup(new);
        let mut prime = minus.clone();
        prime.extend(new.iter().cloned());
        Ok(DerivedFamilies {
            j,
            plus,
            minus,
            comp,
            new,
            prime: dedup(prime),
        })
    }

    pub fn relabel_to_dense(&self) -> PartitionFamily {
        PartitionFamily::new(self.members.iter().map(|p| p.relabel_to_dense()).collect()).unwrap()
    }

    pub fn to_one_based(&self) -> Vec<Vec<Vec<usize>>> {
        self.members.iter().map(|p| p.to_one_based()).collect()
    }
}

fn dedup(v: Vec<Partition>) -> Vec<Partition> {
    v.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

impl fmt::Display for PartitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", m.join(", "))
    }
}

impl fmt::Debug for PartitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `R_+`, `R_-`, `R_comp`, `R_new` and `R'` for a part `J`. Any of them except
/// `prime` may be empty, and `prime` is empty only when `|J| = 1` and every
/// member contains `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedFamilies {
    pub j: Subset,
    /// Members having `J` as a part.
    pub plus: Vec<Partition>,
    /// Members not having `J` as a part.
    pub minus: Vec<Partition>,
    /// `Q \ {J}` for `Q` in `plus`, on the ground set `J^c`.
    pub comp: Vec<Partition>,
    /// `Q ∪ {J1, J2}` for `Q` in `comp` and every bipartition of `J`.
    pub new: Vec<Partition>,
    /// `minus ∪ new`
    pub prime: Vec<Partition>,
}

impl DerivedFamilies {
    pub fn comp_family(&self) -> Option<PartitionFamily> {
        (!self.comp.is_empty()).then(|| PartitionFamily::new(self.comp.clone()).unwrap())
    }

    pub fn prime_family(&self) -> Option<PartitionFamily> {
        (!self.prime.is_empty()).then(|| PartitionFamily::new(self.prime.clone()).unwrap())
    }
}

pub fn is_finer_family(r2: &PartitionFamily, r1: &PartitionFamily) -> Result<bool> {
    r2.is_finer_than(r1)
}

pub fn meet_families(rs: &[PartitionFamily]) -> Result<PartitionFamily> {
    let (first, rest) = rs.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, r| acc.meet(r))
}

/// Every set partition of `ground` (refuses ground sets above 8 elements).
pub fn all_partitions(ground: Subset) -> Result<Vec<Partition>> {
    let elems = ground.to_vec();
    if elems.len() > MAX_ENUMERATION_ORDER {
        return Err(Error::EnumerationLimit(elems.len()));
    }
    if elems.is_empty() {
        return Ok(Vec::new());
    }
    // restricted growth strings
    let n = elems.len();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        let mut parts = vec![Subset::EMPTY; blocks];
        for (k, &b) in rgs.iter().enumerate() {
            parts[b] = parts[b].union(Subset::singleton(elems[k]));
        }
        out.push(Partition::new(ground, parts).unwrap());
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for x in rgs.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(items: &[usize]) -> Subset {
        Subset::from_one_based(items).unwrap()
    }

    fn p(parts: &[&[usize]]) -> Partition {
        Partition::from_one_based(&parts.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn fam(ps: &[&[&[usize]]]) -> PartitionFamily {
        PartitionFamily::new(ps.iter().map(|x| p(x)).collect()).unwrap()
    }

    #[test]
    fn is_finer_examples() {
        assert!(p(&[&[1], &[2, 3]]).is_finer_than(&p(&[&[1, 2, 3]])).unwrap());
        assert!(!p(&[&[1, 2], &[3, 4]]).is_finer_than(&p(&[&[1, 3], &[2, 4]])).unwrap());
        let q = p(&[&[1, 3], &[2], &[4]]);
        assert!(q.is_finer_than(&q).unwrap());
        assert!(matches!(
            p(&[&[1], &[2]]).is_finer_than(&p(&[&[1, 2, 3]])),
            Err(Error::GroundMismatch(..))
        ));
    }

    #[test]
    fn family_refinement_is_not_antisymmetric() {
        let r = fam(&[&[&[1, 2], &[3]]]);
        let r_prime = fam(&[&[&[1], &[2], &[3]]]);
        assert!(r_prime.is_finer_than(&r).unwrap());
        let u = r.union(&r_prime).unwrap();
        assert!(r.is_finer_than(&u).unwrap());
        assert!(u.is_finer_than(&r).unwrap());
        assert_ne!(r, u);
    }

    #[test]
    fn tensor_rank_family_is_below_everything() {
        let g = Subset::full(4);
        let rtr = PartitionFamily::tensor_rank(g);
        for q in all_partitions(g).unwrap() {
            assert!(rtr.is_finer_than(&PartitionFamily::single(q)).unwrap());
        }
        assert!(!fam(&[&[&[1, 2], &[3, 4]]])
            .is_finer_than(&fam(&[&[&[1, 3], &[2, 4]]]))
            .unwrap());
    }

    #[test]
    fn meet_examples() {
        let a = p(&[&[1, 2], &[3, 4]]);
        let b = p(&[&[1, 3], &[2, 4]]);
        assert_eq!(a.meet(&b).unwrap(), Partition::discrete(Subset::full(4)));
        assert_eq!(a.meet(&a).unwrap(), a);
        assert_eq!(a.meet(&Partition::trivial(Subset::full(4))).unwrap(), a);

        let fa = PartitionFamily::single(a.clone());
        let fb = PartitionFamily::single(b);
        assert_eq!(
            fa.meet(&fb).unwrap(),
            PartitionFamily::tensor_rank(Subset::full(4))
        );
        assert_eq!(fa.meet(&PartitionFamily::trivial(Subset::full(4))).unwrap(), fa);
    }

    #[test]
    fn fold_identity_for_families() {
        let g = Subset::full(4);
        let r1 = fam(&[&[&[1, 2], &[3, 4]], &[&[1, 2, 3], &[4]]]);
        let r2 = fam(&[&[&[1, 3], &[2, 4]]]);
        let r3 = PartitionFamily::slice_rank(g).unwrap();
        let left = r3.meet(&r1.meet(&r2).unwrap()).unwrap();
        assert_eq!(left, meet_families(&[r1, r2, r3]).unwrap());
    }

    #[test]
    fn subset_order_examples() {
        assert!(subset_less(s(&[1]), s(&[2, 3])));
        assert!(subset_less(s(&[1, 2]), s(&[2, 3])));
        assert!(!subset_less(s(&[2, 3]), s(&[2, 3])));
        // colex: {1,3} < {2,3} < {1,4}
        assert!(subset_less(s(&[1, 3]), s(&[2, 3])));
        assert!(subset_less(s(&[2, 3]), s(&[1, 4])));
    }

    #[test]
    fn j_max_examples() {
        assert_eq!(fam(&[&[&[1], &[2, 3]], &[&[1, 2], &[3]]]).j_max(), s(&[2, 3]));
        assert_eq!(PartitionFamily::tensor_rank(Subset::full(5)).j_max(), s(&[5]));
        assert_eq!(
            fam(&[&[&[1], &[2, 3, 4]], &[&[1, 2, 3], &[4]]]).j_max(),
            s(&[2, 3, 4])
        );
    }

    #[test]
    fn derived_families_slice_rank_d3() {
        let g = Subset::full(3);
        let r = PartitionFamily::slice_rank(g).unwrap();
        let d = r.derived(s(&[2, 3])).unwrap();
        assert_eq!(d.plus, vec![p(&[&[1], &[2, 3]])]);
        assert_eq!(d.comp, vec![p(&[&[1]])]);
        assert_eq!(d.new, vec![Partition::discrete(g)]);
        let mut minus = vec![p(&[&[2], &[1, 3]]), p(&[&[3], &[1, 2]])];
        minus.sort();
        assert_eq!(d.minus, minus);
        let mut prime = minus.clone();
        prime.push(Partition::discrete(g));
        prime.sort();
        assert_eq!(d.prime, prime);
    }

    #[test]
    fn derived_families_absent_part_and_three_sets() {
        let r = fam(&[&[&[1, 2], &[3, 4]]]);
        let d = r.derived(s(&[1, 3])).unwrap();
        assert!(d.plus.is_empty());
        assert_eq!(d.prime_family().unwrap(), r);

        let r = fam(&[&[&[1], &[2, 3, 4]]]);
        let d = r.derived(s(&[2, 3, 4])).unwrap();
        assert_eq!(d.new.len(), 3);
        assert!(d.new.iter().all(|q| q.num_parts() == 3 && q.contains_part(s(&[1]))));
    }

    #[test]
    fn derived_families_rejects_bad_sets() {
        let r = PartitionFamily::slice_rank(Subset::full(3)).unwrap();
        assert!(r.derived(Subset::EMPTY).is_err());
        assert!(r.derived(Subset::full(3)).is_err());
    }

    #[test]
    fn enumeration_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (d, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(all_partitions(Subset::full(d)).unwrap().len(), b);
        }
        assert_eq!(
            all_partitions(Subset::full(9)),
            Err(Error::EnumerationLimit(9))
        );
    }

    #[test]
    fn relabel_preserves_structure() {
        let q = Partition::new(s(&[2, 4, 5]), vec![s(&[2, 5]), s(&[4])]).unwrap();
        assert_eq!(q.relabel_to_dense(), p(&[&[1, 3], &[2]]));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::from_parts(vec![s(&[1, 2]), s(&[2, 3])]).is_err());
        assert!(Partition::new(Subset::full(3), vec![s(&[1, 2])]).is_err());
    }

    fn arb_partition(d: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0..d, d).prop_map(move |labels| {
            let mut parts = vec![Subset::EMPTY; d];
            for (i, l) in labels.into_iter().enumerate() {
                parts[l] = parts[l].union(Subset::singleton(i));
            }
            Partition::new(
                Subset::full(d),
                parts.into_iter().filter(|x| !x.is_empty()).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn refinement_is_a_partial_order(
            (a, b, c) in (2usize..=6).prop_flat_map(|d| (arb_partition(d), arb_partition(d), arb_partition(d)))
        ) {
            prop_assert!(a.is_finer_than(&a).unwrap());
            if a.is_finer_than(&b).unwrap() && b.is_finer_than(&a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if a.is_finer_than(&b).unwrap() && b.is_finer_than(&c).unwrap() {
                prop_assert!(a.is_finer_than(&c).unwrap());
            }
        }

        #[test]
        fn meet_is_greatest_lower_bound(
            (a, b, c) in (2usize..=6).prop_flat_map(|d| (arb_partition(d), arb_partition(d), arb_partition(d)))
        ) {
            let m = a.meet(&b).unwrap();
            prop_assert!(m.is_finer_than(&a).unwrap());
            prop_assert!(m.is_finer_than(&b).unwrap());
            if c.is_finer_than(&a).unwrap() && c.is_finer_than(&b).unwrap() {
                prop_assert!(c.is_finer_than(&m).unwrap());
            }
        }

        #[test]
        fn fragmenting_j_max_strictly_decreases_it(
            parts in (3usize..=6).prop_flat_map(|d| proptest::collection::vec(arb_partition(d), 1..4))
        ) {
            let r = PartitionFamily::new(parts).unwrap();
            let j = r.j_max();
            prop_assume!(j != r.ground());
            let d = r.derived(j).unwrap();
            prop_assert!(!d.plus.is_empty());
            if let Some(rp) = d.prime_family() {
                prop_assert!(rp.j_max() < j);
                prop_assert!(rp.is_finer_than(&r).unwrap());
            }
        }
    }
}
