//! R-rank decompositions, their split form at a distinguished part `J`, and
//! conversions along the refinement order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactlin::{EchelonBasis, Field, FuncTable, Scalar};
use crate::partitions::{Partition, PartitionFamily, Subset};
use crate::tensor::{delta_partition, Shape, Tensor};

/// A product of one factor per part of a partition.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rank1Term {
    partition: Partition,
    /// Aligned with `partition.parts()`.
    factors: Vec<Tensor>,
}

impl Rank1Term {
    pub fn new(partition: Partition, factors: Vec<Tensor>) -> Result<Rank1Term> {
        if factors.len() != partition.num_parts() {
            return Err(Error::ShapeMismatch(format!(
                "{} factors for the {} parts of {partition}",
                factors.len(),
                partition.num_parts()
            )));
        }
        for (part, f) in partition.parts().iter().zip(&factors) {
            if f.axes() != *part {
                return Err(Error::ShapeMismatch(format!(
                    "factor on {} attached to part {part}",
                    f.axes()
                )));
            }
        }
        if let Some(f) = factors.iter().find(|f| f.field() != factors[0].field()) {
            return Err(Error::FieldMismatch(factors[0].field().to_string(), f.field().to_string()));
        }
        Ok(Rank1Term { partition, factors })
    }

    /// Builds a term from `(part, factor)` pairs in any order.
    pub fn from_factors(mut pairs: Vec<Tensor>) -> Result<Rank1Term> {
        pairs.sort_by_key(|t| t.axes());
        let partition = Partition::from_parts(pairs.iter().map(Tensor::axes).collect())?;
        Rank1Term::new(partition, pairs)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn factors(&self) -> &[Tensor] {
        &self.factors
    }

    pub fn factor(&self, part: Subset) -> Option<&Tensor> {
        self.partition.part_index(part).map(|k| &self.factors[k])
    }

    pub fn field(&self) -> Field {
        self.factors[0].field()
    }

    pub fn ground(&self) -> Subset {
        self.partition.ground()
    }

    pub fn shape(&self) -> Shape {
        self.factors
            .iter()
            .skip(1)
            .fold(self.factors[0].shape().clone(), |s, f| s.merge(f.shape()).unwrap())
    }

    /// True when some factor vanishes, so the product does too.
    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(Tensor::is_zero)
    }

    pub fn evaluate(&self) -> Tensor {
        product(&self.factors, self.field())
    }

    /// Product of all factors except the `k`-th (a scalar 1 if there are none).
    pub fn rest(&self, k: usize) -> Tensor {
        let others: Vec<Tensor> = self
            .factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, f)| f.clone())
            .collect();
        product(&others, self.field())
    }

    /// Multiplies the term by `c`, absorbed into the first factor.
    pub fn scaled(&self, c: &Scalar) -> Rank1Term {
        let mut out = self.clone();
        out.factors[0] = out.factors[0].scale(c);
        out
    }

    /// Regroups the factors along a coarser partition of the same ground set.
    pub fn regroup(&self, coarser: &Partition) -> Result<Rank1Term> {
        if !self.partition.is_finer_than(coarser)? {
            return Err(Error::NotFiner);
        }
        let field = self.field();
        let factors = coarser
            .parts()
            .iter()
            .map(|k| {
                let inside: Vec<Tensor> = self
                    .partition
                    .parts()
                    .iter()
                    .zip(&self.factors)
                    .filter(|(p, _)| p.is_subset_of(*k))
                    .map(|(_, f)| f.clone())
                    .collect();
                product(&inside, field)
            })
            .collect();
        Rank1Term::new(coarser.clone(), factors)
    }

    /// This term with extra factors on disjoint parts.
    pub fn extended(&self, extra: Vec<Tensor>) -> Result<Rank1Term> {
        let mut all = self.factors.clone();
        all.extend(extra);
        Rank1Term::from_factors(all)
    }

    pub(crate) fn factors_mut(&mut self) -> &mut [Tensor] {
        &mut self.factors
    }
}

/// Outer product of tensors on pairwise disjoint axes.
pub(crate) fn product(factors: &[Tensor], field: Field) -> Tensor {
    factors
        .iter()
        .fold(Tensor::scalar(field.one()), |acc, f| acc.outer(f).expect("disjoint factor axes"))
}

/// A list of rank-one terms over a family, certifying an R-rank bound equal
/// to its length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    family: PartitionFamily,
    shape: Shape,
    field: Field,
    terms: Vec<Rank1Term>,
}

impl Decomposition {
    pub fn new(
        family: PartitionFamily,
        shape: Shape,
        field: Field,
        terms: Vec<Rank1Term>,
    ) -> Result<Decomposition> {
        if shape.axes() != family.ground() {
            return Err(Error::GroundMismatch(shape.axes(), family.ground()));
        }
        for t in &terms {
            if !family.contains(t.partition()) {
                return Err(Error::TermNotInFamily(format!(
                    "{} is not a member of {family}",
                    t.partition()
                )));
            }
            if t.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), t.field().to_string()));
            }
            for f in t.factors() {
                if shape.restrict(f.axes())? != *f.shape() {
                    return Err(Error::ShapeMismatch(format!(
                        "factor {:?} does not fit {:?}",
                        f.shape(),
                        shape
                    )));
                }
            }
        }
        Ok(Decomposition {
            family,
            shape,
            field,
            terms,
        })
    }

    pub fn empty(family: PartitionFamily, shape: Shape, field: Field) -> Result<Decomposition> {
        Decomposition::new(family, shape, field, Vec::new())
    }

    pub fn family(&self) -> &PartitionFamily {
        &self.family
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ground(&self) -> Subset {
        self.family.ground()
    }

    pub fn terms(&self) -> &[Rank1Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Rank1Term> {
        self.terms
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self) -> Tensor {
        let mut out = Tensor::zeros(self.shape.clone(), self.field);
        let one = self.field.one();
        for t in &self.terms {
            out.add_scaled(&one, &t.evaluate()).expect("terms fit the shape");
        }
        out
    }

    /// Errors unless every term lies in the family and the sum equals `t`.
    pub fn check(&self, t: &Tensor) -> Result<()> {
        if self.terms.iter().any(|x| !self.family.contains(x.partition())) {
            return Err(Error::TermNotInFamily("term outside the family".into()));
        }
        if t.shape() != &self.shape || t.field() != self.field || self.evaluate() != *t {
            return Err(Error::EvaluationMismatch);
        }
        Ok(())
    }

    pub fn verify(&self, t: &Tensor) -> bool {
        self.check(t).is_ok()
    }

    /// The same decomposition read over a larger or different family that
    /// still contains every term's partition.
    pub fn with_family(&self, family: PartitionFamily) -> Result<Decomposition> {
        Decomposition::new(family, self.shape.clone(), self.field, self.terms.clone())
    }

    /// Regroups every term along the least member of `target` it refines.
    pub fn convert_finer(&self, target: &PartitionFamily) -> Result<Decomposition> {
        if !self.family.is_finer_than(target)? {
            return Err(Error::NotFiner);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let p1 = target
                    .least_coarsening(t.partition())
                    .expect("family refinement gives a coarser member");
                t.regroup(p1)
            })
            .collect::<Result<Vec<_>>>()?;
        Decomposition::new(target.clone(), self.shape.clone(), self.field, terms)
    }

    /// Writes the decomposition as `Σ A_i B_i + Σ F_i` at `j`.
    pub fn split_at(&self, j: Subset) -> Result<SplitForm> {
        let g = self.ground();
        if j.is_empty() || !j.is_strict_subset_of(g) {
            return Err(Error::Precondition(format!(
                "split set must be a non-empty strict subset of {g}, got {j}"
            )));
        }
        let mut pairs = Vec::new();
        let mut f_terms = Vec::new();
        for t in &self.terms {
            match t.partition().part_index(j) {
                Some(k) => {
                    let rest_partition = t.partition().without_part(j)?;
                    let rest_factors = t
                        .factors()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != k)
                        .map(|(_, f)| f.clone())
                        .collect();
                    let a = Rank1Term::new(rest_partition, rest_factors)?;
                    pairs.push(SplitPair::new(a, t.factors()[k].clone())?);
                }
                None => f_terms.push(t.clone()),
            }
        }
        SplitForm::new(j, self.shape.clone(), self.field, pairs, f_terms)
    }

    /// Shortens the decomposition without changing its value: zero terms are
    /// dropped and, within each partition class, a term whose co-factor at
    /// some part is spanned by earlier co-factors is absorbed into them.
    pub fn compress(&self) -> Decomposition {
        Decomposition {
            terms: compress_terms(self.terms.clone()),
            ..self.clone()
        }
    }
}

/// See [`Decomposition::compress`]. Terms keep their relative order.
pub fn compress_terms(mut terms: Vec<Rank1Term>) -> Vec<Rank1Term> {
    loop {
        terms.retain(|t| !t.is_zero());
        let mut changed = false;
        let mut classes: BTreeMap<Partition, Vec<usize>> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            classes.entry(t.partition().clone()).or_default().push(i);
        }
        let mut removed = vec![false; terms.len()];
        for (partition, idxs) in classes {
            if idxs.len() < 2 {
                continue;
            }
            for k in 0..partition.num_parts() {
                let live: Vec<usize> = idxs.iter().copied().filter(|&i| !removed[i]).collect();
                if live.len() < 2 {
                    break;
                }
                let field = terms[live[0]].field();
                let rests: Vec<Tensor> = live.iter().map(|&i| terms[i].rest(k)).collect();
                let mut basis = EchelonBasis::new(field, rests[0].values().len());
                let mut kept: Vec<usize> = Vec::new();
                for (pos, &i) in live.iter().enumerate() {
                    match basis.insert(rests[pos].values()) {
                        Ok(()) => kept.push(i),
                        Err(coeffs) => {
                            let src = terms[i].factors()[k].clone();
                            for (c, &target) in coeffs.iter().zip(&kept) {
                                if !c.is_zero() {
                                    terms[target].factors_mut()[k]
                                        .add_scaled(c, &src)
                                        .expect("same part, same shape");
                                }
                            }
                            removed[i] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return terms;
        }
        let mut keep = removed.into_iter().map(|r| !r);
        terms.retain(|_| keep.next().unwrap());
    }
}

/// `A_i ⊗ B_i` with `A_i` a rank-one term on `J^c`, cached flattened.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitPair {
    pub a: Rank1Term,
    pub a_flat: Tensor,
    pub b: Tensor,
}

impl SplitPair {
    pub fn new(a: Rank1Term, b: Tensor) -> Result<SplitPair> {
        if a.ground().intersects(b.axes()) {
            return Err(Error::ShapeMismatch("A and B share coordinates".into()));
        }
        let a_flat = a.evaluate();
        Ok(SplitPair { a, a_flat, b })
    }

    /// The full term `A ⊗ B`.
    pub fn term(&self) -> Rank1Term {
        self.a.extended(vec![self.b.clone()]).expect("disjoint grounds")
    }
}

/// `T = Σ A_i(x(J^c)) B_i(x(J)) + Σ F_i(x)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitForm {
    j: Subset,
    shape: Shape,
    field: Field,
    pairs: Vec<SplitPair>,
    f_terms: Vec<Rank1Term>,
}

impl SplitForm {
    pub fn new(
        j: Subset,
        shape: Shape,
        field: Field,
        pairs: Vec<SplitPair>,
        f_terms: Vec<Rank1Term>,
    ) -> Result<SplitForm> {
        let jc = shape.axes().difference(j);
        for p in &pairs {
            if p.a.ground() != jc || p.b.axes() != j {
                return Err(Error::ShapeMismatch(format!(
                    "pair on {} ⊗ {} does not match the split at {j}",
                    p.a.ground(),
                    p.b.axes()
                )));
            }
        }
        for f in &f_terms {
            if f.ground() != shape.axes() {
                return Err(Error::GroundMismatch(f.ground(), shape.axes()));
            }
            if f.partition().contains_part(j) {
                return Err(Error::Precondition(format!(
                    "F-term {} has {j} as a part",
                    f.partition()
                )));
            }
        }
        Ok(SplitForm {
            j,
            shape,
            field,
            pairs,
            f_terms,
        })
    }

    pub fn j(&self) -> Subset {
        self.j
    }

    pub fn complement(&self) -> Subset {
        self.shape.axes().difference(self.j)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn pairs(&self) -> &[SplitPair] {
        &self.pairs
    }

    pub fn f_terms(&self) -> &[Rank1Term] {
        &self.f_terms
    }

    /// Number of `(A, B)` pairs.
    pub fn r(&self) -> usize {
        self.pairs.len()
    }

    /// Number of `F` terms.
    pub fn s(&self) -> usize {
        self.f_terms.len()
    }

    pub fn len(&self) -> usize {
        self.r() + self.s()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn a_tables(&self) -> Vec<&FuncTable> {
        self.pairs.iter().map(|p| p.a_flat.table()).collect()
    }

    pub fn evaluate(&self) -> Tensor {
        let mut out = Tensor::zeros(self.shape.clone(), self.field);
        let one = self.field.one();
        for p in &self.pairs {
            out.add_scaled(&one, &p.a_flat.outer(&p.b).unwrap()).unwrap();
        }
        for f in &self.f_terms {
            out.add_scaled(&one, &f.evaluate()).unwrap();
        }
        out
    }

    /// Makes the `A_i` linearly independent by repeatedly removing the
    /// highest-index `A_m` in the span of the others and absorbing `B_m`.
    pub fn reduce_independent(&self) -> Result<SplitForm> {
        let mut pairs = self.pairs.clone();
        'outer: loop {
            for m in (0..pairs.len()).rev() {
                let others: Vec<&FuncTable> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != m)
                    .map(|(_, p)| p.a_flat.table())
                    .collect();
                if others.is_empty() && !pairs[m].a_flat.is_zero() {
                    continue;
                }
                let coeffs = if others.is_empty() {
                    Some(Vec::new())
                } else {
                    crate::exactlin::express_in_span(&others, pairs[m].a_flat.table())?
                };
                if let Some(c) = coeffs {
                    let bm = pairs.remove(m).b;
                    for (p, ci) in pairs.iter_mut().zip(&c) {
                        p.b.add_scaled(ci, &bm)?;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        SplitForm::new(self.j, self.shape.clone(), self.field, pairs, self.f_terms.clone())
    }

    /// Reassembles the terms `A_i ⊗ B_i` followed by the `F_i`.
    pub fn terms(&self) -> Vec<Rank1Term> {
        self.pairs
            .iter()
            .map(SplitPair::term)
            .chain(self.f_terms.iter().cloned())
            .collect()
    }

    pub fn to_decomposition(&self, family: &PartitionFamily) -> Result<Decomposition> {
        Decomposition::new(family.clone(), self.shape.clone(), self.field, self.terms())
    }
}

/// A length-one decomposition of `Δ_P` over `R` when `P` refines a member of `R`.
pub fn rank1_witness_for_finer(
    p: &Partition,
    r: &PartitionFamily,
    n: usize,
    field: Field,
) -> Result<Decomposition> {
    if p.ground() != r.ground() {
        return Err(Error::GroundMismatch(p.ground(), r.ground()));
    }
    let p0 = r.least_coarsening(p).ok_or(Error::NotFiner)?;
    let factors = p0
        .parts()
        .iter()
        .map(|k| {
            let inner: Vec<Subset> = p.parts().iter().copied().filter(|j| j.is_subset_of(*k)).collect();
            delta_partition(&Partition::new(*k, inner)?, n, field)
        })
        .collect::<Result<Vec<_>>>()?;
    let term = Rank1Term::new(p0.clone(), factors)?;
    Decomposition::new(r.clone(), Shape::uniform(p.ground(), n)?, field, vec![term])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::delta_subset;

    fn s(items: &[usize]) -> Subset {
        Subset::from_one_based(items).unwrap()
    }

    fn p(parts: &[&[usize]]) -> Partition {
        Partition::from_one_based(&parts.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn on(axes: Subset, dims: &[usize], vals: &[i64], f: Field) -> Tensor {
        Tensor::new(Shape::on(axes, dims.to_vec()).unwrap(), FuncTable::from_i64(f, vals)).unwrap()
    }

    const Q: Field = Field::Rational;

    /// a(x1) b(x2,x3) + c(x2) d(x1,x3)
    fn two_term() -> Decomposition {
        let a = on(s(&[1]), &[2], &[1, 2], Q);
        let b = on(s(&[2, 3]), &[2, 2], &[1, 0, 3, -1], Q);
        let c = on(s(&[2]), &[2], &[0, 5], Q);
        let d = on(s(&[1, 3]), &[2, 2], &[2, 1, 1, 7], Q);
        let fam = PartitionFamily::new(vec![p(&[&[1], &[2, 3]]), p(&[&[2], &[1, 3]])]).unwrap();
        Decomposition::new(
            fam,
            Shape::new(&[2, 2, 2]).unwrap(),
            Q,
            vec![
                Rank1Term::from_factors(vec![a, b]).unwrap(),
                Rank1Term::from_factors(vec![c, d]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_two_term_example_against_direct_formula() {
        let dec = two_term();
        let t = dec.evaluate();
        let (a, b, c, d) = ([1i64, 2], [1i64, 0, 3, -1], [0i64, 5], [2i64, 1, 1, 7]);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let direct = a[x] * b[2 * y + z] + c[y] * d[2 * x + z];
                    assert_eq!(*t.get(&[x, y, z]).unwrap(), Q.from_i64(direct));
                }
            }
        }
        assert_eq!(dec.len(), 2);
        assert!(dec.verify(&t));
    }

    #[test]
    fn empty_and_zero_factor_evaluate_to_zero() {
        let g = Subset::full(2);
        let fam = PartitionFamily::tensor_rank(g);
        let shape = Shape::new(&[2, 2]).unwrap();
        let empty = Decomposition::empty(fam.clone(), shape.clone(), Q).unwrap();
        assert!(empty.evaluate().is_zero());
        let t = Rank1Term::from_factors(vec![on(s(&[1]), &[2], &[0, 0], Q), on(s(&[2]), &[2], &[1, 1], Q)])
            .unwrap();
        let dec = Decomposition::new(fam, shape, Q, vec![t]).unwrap();
        assert!(dec.evaluate().is_zero());
    }

    #[test]
    fn verify_rejects_foreign_partitions_and_wrong_tensors() {
        let dec = two_term();
        let mut t = dec.evaluate();
        t.add_scaled(&Q.one(), &Tensor::ones(t.shape().clone(), Q)).unwrap();
        assert!(!dec.verify(&t));
        let other = PartitionFamily::slice_rank(Subset::full(3)).unwrap();
        let narrowed = PartitionFamily::single(p(&[&[1], &[2, 3]]));
        assert!(dec.with_family(narrowed).is_err());
        assert!(dec.with_family(other).is_ok());
    }

    #[test]
    fn rank1_witness_examples() {
        let g = Subset::full(3);
        let w = rank1_witness_for_finer(&Partition::discrete(g), &PartitionFamily::tensor_rank(g), 2, Q).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.evaluate().values().iter().all(Scalar::is_one));

        let r = PartitionFamily::single(p(&[&[1, 2], &[3]]));
        let w = rank1_witness_for_finer(&Partition::discrete(g), &r, 2, Q).unwrap();
        assert_eq!(w.terms()[0].partition(), &p(&[&[1, 2], &[3]]));
        assert!(w.terms()[0].factors().iter().all(|f| f.values().iter().all(Scalar::is_one)));

        let pp = p(&[&[1, 2], &[3]]);
        let w = rank1_witness_for_finer(&pp, &PartitionFamily::trivial(g), 3, Q).unwrap();
        assert!(w.verify(&delta_partition(&pp, 3, Q).unwrap()));
        assert_eq!(
            w.terms()[0].factors()[0],
            delta_subset(s(&[1, 2]), 3, Q).unwrap().outer(&Tensor::ones(Shape::uniform(s(&[3]), 3).unwrap(), Q)).unwrap()
        );

        let bad = rank1_witness_for_finer(&p(&[&[1, 2], &[3]]), &PartitionFamily::single(p(&[&[1, 3], &[2]])), 2, Q);
        assert_eq!(bad, Err(Error::NotFiner));
    }

    #[test]
    fn convert_finer_regroups() {
        let g = Subset::full(3);
        let a = on(s(&[1]), &[2], &[1, 2], Q);
        let b = on(s(&[2]), &[2], &[3, 4], Q);
        let c = on(s(&[3]), &[2], &[5, 6], Q);
        let term = Rank1Term::from_factors(vec![a.clone(), b.clone(), c.clone()]).unwrap();
        let dec = Decomposition::new(PartitionFamily::tensor_rank(g), Shape::new(&[2, 2, 2]).unwrap(), Q, vec![term])
            .unwrap();
        assert_eq!(dec.convert_finer(dec.family()).unwrap(), dec);
        let sr = PartitionFamily::slice_rank(g).unwrap();
        let conv = dec.convert_finer(&sr).unwrap();
        // least slice partition is {{1},{2,3}}
        assert_eq!(conv.terms()[0].partition(), &p(&[&[1], &[2, 3]]));
        assert_eq!(conv.terms()[0].factors()[1], b.outer(&c).unwrap());
        assert_eq!(conv.evaluate(), dec.evaluate());
        assert_eq!(conv.len(), 1);
        assert_eq!(two_term().convert_finer(&PartitionFamily::tensor_rank(g)), Err(Error::NotFiner));
    }

    #[test]
    fn split_at_examples() {
        let dec = two_term();
        let sf = dec.split_at(s(&[3])).unwrap();
        assert_eq!((sf.r(), sf.s()), (0, 2));
        let sf = dec.split_at(s(&[2, 3])).unwrap();
        assert_eq!((sf.r(), sf.s()), (1, 1));
        assert_eq!(sf.evaluate(), dec.evaluate());
        assert_eq!(sf.to_decomposition(dec.family()).unwrap().evaluate(), dec.evaluate());
        assert!(dec.split_at(Subset::full(3)).is_err());
    }

    fn pair(a: &[i64], b: &[i64], f: Field) -> SplitPair {
        let at = Rank1Term::from_factors(vec![on(s(&[1]), &[3], a, f)]).unwrap();
        SplitPair::new(at, on(s(&[2]), &[2], b, f)).unwrap()
    }

    #[test]
    fn reduce_duplicate_a() {
        let shape = Shape::new(&[3, 2]).unwrap();
        let sf = SplitForm::new(
            s(&[2]),
            shape,
            Q,
            vec![pair(&[1, 2, 0], &[1, 1], Q), pair(&[1, 2, 0], &[2, 5], Q)],
            vec![],
        )
        .unwrap();
        let red = sf.reduce_independent().unwrap();
        assert_eq!(red.r(), 1);
        assert_eq!(red.pairs()[0].b, on(s(&[2]), &[2], &[3, 6], Q));
        assert_eq!(red.evaluate(), sf.evaluate());
        assert_eq!(red.reduce_independent().unwrap(), red);
    }

    #[test]
    fn reduce_sum_over_gf2_is_exhaustively_sound() {
        let f = Field::prime(2).unwrap();
        let shape = Shape::new(&[3, 2]).unwrap();
        // every choice of B's
        for bits in 0..64u32 {
            let b = |k: u32| [(bits >> (2 * k) & 1) as i64, (bits >> (2 * k + 1) & 1) as i64];
            let sf = SplitForm::new(
                s(&[2]),
                shape.clone(),
                f,
                vec![pair(&[1, 0, 1], &b(0), f), pair(&[0, 1, 1], &b(1), f), pair(&[1, 1, 0], &b(2), f)],
                vec![],
            )
            .unwrap();
            let red = sf.reduce_independent().unwrap();
            assert_eq!(red.r(), 2);
            assert_eq!(red.evaluate(), sf.evaluate());
            let b0: Vec<i64> = b(0).iter().zip(b(2)).map(|(x, y)| (x + y) % 2).collect();
            assert_eq!(red.pairs()[0].b, on(s(&[2]), &[2], &b0, f));
        }
    }

    #[test]
    fn compress_merges_parallel_terms() {
        let g = Subset::full(2);
        let u = on(s(&[1]), &[2], &[1, 2], Q);
        let t1 = Rank1Term::from_factors(vec![u.clone(), on(s(&[2]), &[2], &[1, 0], Q)]).unwrap();
        let t2 = Rank1Term::from_factors(vec![u.scale(&Q.from_i64(3)), on(s(&[2]), &[2], &[0, 1], Q)]).unwrap();
        let dec = Decomposition::new(PartitionFamily::tensor_rank(g), Shape::new(&[2, 2]).unwrap(), Q, vec![t1, t2])
            .unwrap();
        let c = dec.compress();
        assert_eq!(c.len(), 1);
        assert_eq!(c.evaluate(), dec.evaluate());
    }
}
