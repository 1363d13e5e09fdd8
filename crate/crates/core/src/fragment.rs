//! Fragmentation: from an equality between an `R1`- and an `R2`-split form at
//! `J = J_max(R1 ∪ R2)`, an explicit `R1'(J)`-decomposition of the common
//! tensor with at most `k1((k1+k2)^2+1)` terms.

use crate::decomp::{Decomposition, Rank1Term, SplitForm};
use crate::error::{Error, Result};
use crate::exactlin::{dual_family, dual_family_with_support, independent, FuncTable, Scalar};
use crate::partitions::{PartitionFamily, Subset};
use crate::tensor::{Shape, Tensor};

/// `k1((k1+k2)^2+1)`, saturating.
pub fn fragment_bound(k1: usize, k2: usize) -> u128 {
    let (k1, k2) = (k1 as u128, k2 as u128);
    let s = k1.saturating_add(k2);
    k1.saturating_mul(s.saturating_mul(s).saturating_add(1))
}

fn check_side(sf: &SplitForm, r: &PartitionFamily) -> Result<()> {
    if sf.shape().axes() != r.ground() {
        return Err(Error::GroundMismatch(sf.shape().axes(), r.ground()));
    }
    for t in sf.terms() {
        if !r.contains(t.partition()) {
            return Err(Error::TermNotInFamily(format!("{} is not a member of {r}", t.partition())));
        }
    }
    Ok(())
}

/// The slice `F_u` of a rank-one term at the point `u` of `J^c`, regrouped
/// as two factors on a bipartition `{J1, J2}` of `J` with the scalar `c`
/// folded into the first. `J1` is `J` meet the least part of `F` meeting `J`.
fn slice_bipartite(f: &Rank1Term, j: Subset, coords: &[usize], c: &Scalar) -> Result<(Tensor, Tensor)> {
    let mut scale = c.clone();
    let mut meeting = Vec::new();
    for (part, factor) in f.partition().parts().iter().zip(f.factors()) {
        let inside = part.intersection(j);
        if inside.is_empty() {
            scale = &scale * factor.at(coords);
        } else {
            meeting.push(factor.slice_coords(inside, coords)?);
        }
    }
    if meeting.len() < 2 {
        return Err(Error::InvariantBreach(format!(
            "F-term {} meets {j} in a single part",
            f.partition()
        )));
    }
    let first = meeting.remove(0).scale(&scale);
    let field = c.field();
    let second = crate::decomp::product(&meeting, field);
    Ok((first, second))
}

/// Fragments `sf1` against `sf2` and returns an `R1'(J)`-decomposition of the
/// common tensor. Terms are emitted as `A¹_i·(F¹_{i'})_u`, then
/// `A¹_i·(F²_{i'})_u`, each by `(i, i', u)` ascending, then the `F¹_i`; zero
/// terms are dropped.
pub fn fragment(
    sf1: &SplitForm,
    sf2: &SplitForm,
    r1: &PartitionFamily,
    r2: &PartitionFamily,
) -> Result<Decomposition> {
    check_side(sf1, r1)?;
    check_side(sf2, r2)?;
    if sf1.shape() != sf2.shape() || sf1.field() != sf2.field() {
        return Err(Error::ShapeMismatch("the two split forms differ in shape or field".into()));
    }
    let union = r1.union(r2)?;
    if union.is_tensor_rank() {
        return Err(Error::Precondition("R1 ∪ R2 is the tensor-rank family".into()));
    }
    let j = union.j_max();
    if j == union.ground() {
        return Err(Error::Precondition("J_max is the whole ground set".into()));
    }
    for sf in [sf1, sf2] {
        if sf.j() != j {
            return Err(Error::NotMaximal { given: sf.j(), expected: j });
        }
    }
    let mut all_a = sf1.a_tables();
    all_a.extend(sf2.a_tables());
    if !independent(&all_a)? {
        return Err(Error::Dependent);
    }
    let total = sf1.evaluate();
    if total != sf2.evaluate() {
        return Err(Error::EvaluationMismatch);
    }

    let target = r1
        .derived(j)?
        .prime_family()
        .ok_or_else(|| Error::InvariantBreach("R1'(J) is empty".into()))?;
    let field = sf1.field();
    let jc_shape = sf1.shape().restrict(sf1.complement())?;
    let (duals, support) = dual_family_with_support(&all_a)?;

    let mut terms = Vec::new();
    let mut coords = vec![0usize; crate::partitions::MAX_ORDER];
    for (source, negate) in [(sf1.f_terms(), true), (sf2.f_terms(), false)] {
        for (i, pair) in sf1.pairs().iter().enumerate() {
            for f in source {
                for &u in &support {
                    let mut c = duals[i].values()[u].clone();
                    if c.is_zero() {
                        continue;
                    }
                    if negate {
                        c = -c;
                    }
                    jc_shape.unravel_into(u, &mut coords);
                    let (b1, b2) = slice_bipartite(f, j, &coords, &c)?;
                    let term = pair.a.extended(vec![b1, b2])?;
                    if !term.is_zero() {
                        terms.push(term);
                    }
                }
            }
        }
    }
    terms.extend(sf1.f_terms().iter().filter(|t| !t.is_zero()).cloned());

    let dec = Decomposition::new(target, sf1.shape().clone(), field, terms)?;
    if !dec.verify(&total) {
        return Err(Error::InvariantBreach("fragment output does not evaluate to the input".into()));
    }
    Ok(dec)
}

/// Tensor-rank decomposition of length at most `k_1 ⋯ k_{d-1}` from `d-1`
/// flattening split forms. Each form splits off one coordinate `c_j`
/// (`J = ground \ {c_j}`) and has no `F`-terms; the remaining coordinate
/// plays the role of the last one.
pub fn flattening_meet(decs: &[SplitForm], t: &Tensor) -> Result<Decomposition> {
    let ground = t.axes();
    let d = ground.len();
    if d < 2 || decs.len() != d - 1 {
        return Err(Error::Precondition(format!(
            "order {d} needs {} flattening decompositions, got {}",
            d.saturating_sub(1),
            decs.len()
        )));
    }
    let mut coords_used = Subset::EMPTY;
    let mut order = Vec::new();
    for sf in decs {
        let c = sf.complement();
        if sf.shape() != t.shape() || c.len() != 1 || coords_used.intersects(c) || sf.s() != 0 {
            return Err(Error::Precondition(
                "each input must be a flattening split form at a distinct coordinate".into(),
            ));
        }
        coords_used = coords_used.union(c);
        order.push(c);
    }
    for sf in decs {
        if !independent(&sf.a_tables())? {
            return Err(Error::Dependent);
        }
        if sf.evaluate() != *t {
            return Err(Error::EvaluationMismatch);
        }
    }
    let field = t.field();
    let last = ground.difference(coords_used);
    let duals: Vec<Vec<Tensor>> = decs[..d - 2]
        .iter()
        .zip(&order)
        .map(|(sf, &c)| {
            let shape = Shape::on(c, vec![t.shape().dim(c.iter().next().unwrap()).unwrap()])?;
            dual_family(&sf.a_tables())?
                .into_iter()
                .map(|table: FuncTable| Tensor::new(shape.clone(), table))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut terms = Vec::new();
    for pair in decs[d - 2].pairs() {
        // depth-first over (i_1, .., i_{d-2}), contracting b one coordinate at a time
        let mut stack: Vec<(usize, Tensor, Vec<usize>)> = vec![(0, pair.b.clone(), Vec::new())];
        let mut leaves = Vec::new();
        while let Some((level, cur, idx)) = stack.pop() {
            if level == d - 2 {
                leaves.push((idx, cur));
                continue;
            }
            for (i, dual) in duals[level].iter().enumerate().rev() {
                let mut next = idx.clone();
                next.push(i);
                stack.push((level + 1, dual.contract(&cur)?, next));
            }
        }
        for (idx, last_factor) in leaves {
            debug_assert_eq!(last_factor.axes(), last);
            let mut factors: Vec<Tensor> = idx
                .iter()
                .zip(decs)
                .map(|(&i, sf)| sf.pairs()[i].a_flat.clone())
                .collect();
            factors.push(pair.a_flat.clone());
            factors.push(last_factor);
            let term = Rank1Term::from_factors(factors)?;
            if !term.is_zero() {
                terms.push(term);
            }
        }
    }
    let dec = Decomposition::new(PartitionFamily::tensor_rank(ground), t.shape().clone(), field, terms)?;
    if !dec.verify(t) {
        return Err(Error::InvariantBreach("flattening meet does not evaluate to the input".into()));
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::SplitPair;
    use crate::exactlin::Field;
    use crate::partitions::Partition;

    fn s(items: &[usize]) -> Subset {
        Subset::from_one_based(items).unwrap()
    }

    fn p(parts: &[&[usize]]) -> Partition {
        Partition::from_one_based(&parts.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn on(axes: Subset, n: usize, vals: &[i64], f: Field) -> Tensor {
        Tensor::new(Shape::uniform(axes, n).unwrap(), FuncTable::from_i64(f, vals)).unwrap()
    }

    #[test]
    fn bound_formula() {
        assert_eq!(fragment_bound(1, 1), 5);
        assert_eq!(fragment_bound(3, 3), 111);
        assert_eq!(fragment_bound(0, 7), 0);
    }

    /// a(x) b(y,z) = c(y) d(x,z) with T = u(x) v(y) w(z).
    #[test]
    fn order_three_single_terms() {
        let q = Field::Rational;
        let (u, v, w) = (on(s(&[1]), 2, &[1, 2], q), on(s(&[2]), 2, &[3, -1], q), on(s(&[3]), 2, &[1, 4], q));
        let t = u.outer(&v).unwrap().outer(&w).unwrap();
        let r1 = PartitionFamily::single(p(&[&[1], &[2, 3]]));
        let r2 = PartitionFamily::single(p(&[&[2], &[1, 3]]));
        let shape = t.shape().clone();
        let d1 = Decomposition::new(r1.clone(), shape.clone(), q, vec![Rank1Term::from_factors(vec![u.clone(), v.outer(&w).unwrap()]).unwrap()]).unwrap();
        let d2 = Decomposition::new(r2.clone(), shape, q, vec![Rank1Term::from_factors(vec![v.clone(), u.outer(&w).unwrap()]).unwrap()]).unwrap();
        assert_eq!(r1.union(&r2).unwrap().j_max(), s(&[2, 3]));
        let sf1 = d1.split_at(s(&[2, 3])).unwrap();
        let sf2 = d2.split_at(s(&[2, 3])).unwrap();
        assert_eq!((sf1.r(), sf1.s(), sf2.r(), sf2.s()), (1, 0, 0, 1));
        let out = fragment(&sf1, &sf2, &r1, &r2).unwrap();
        assert!(out.verify(&t));
        assert_eq!(out.len(), 1);
        assert_eq!(out.terms()[0].partition(), &Partition::discrete(Subset::full(3)));
        assert!(out.len() as u128 <= fragment_bound(1, 1));
    }

    #[test]
    fn no_f_terms_gives_empty_output() {
        let q = Field::Rational;
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let r1 = PartitionFamily::single(p(&[&[1], &[2, 3]]));
        let r2 = PartitionFamily::single(p(&[&[1], &[2, 3]]));
        let a = Rank1Term::from_factors(vec![on(s(&[1]), 2, &[1, 0], q)]).unwrap();
        let sf = SplitForm::new(s(&[2, 3]), shape, q, vec![SplitPair::new(a, Tensor::zeros(Shape::uniform(s(&[2, 3]), 2).unwrap(), q)).unwrap()], vec![]).unwrap();
        let empty = SplitForm::new(s(&[2, 3]), sf.shape().clone(), q, vec![], vec![]).unwrap();
        let out = fragment(&sf, &empty, &r1, &r2).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn refuses_non_maximal_split() {
        // a(x,y) b(z,w) = c(x) d(y,z,w) style: J = {3,4} is not J_max = {2,3,4}
        let q = Field::Rational;
        let shape = Shape::new(&[2, 2, 2, 2]).unwrap();
        let b = on(s(&[3, 4]), 2, &[1, 0, 0, 1], q);
        let c1 = Tensor::ones(Shape::uniform(s(&[1, 2]), 2).unwrap(), q);
        let r1 = PartitionFamily::single(p(&[&[1, 2], &[3, 4]]));
        let r2 = PartitionFamily::single(p(&[&[1], &[2, 3, 4]]));
        let d1 = Decomposition::new(r1.clone(), shape.clone(), q, vec![Rank1Term::from_factors(vec![c1, b.clone()]).unwrap()]).unwrap();
        let one1 = Tensor::ones(Shape::uniform(s(&[1]), 2).unwrap(), q);
        let rest = Tensor::ones(Shape::uniform(s(&[2]), 2).unwrap(), q).outer(&b).unwrap();
        let d2 = Decomposition::new(r2.clone(), shape, q, vec![Rank1Term::from_factors(vec![one1, rest]).unwrap()]).unwrap();
        assert_eq!(d1.evaluate(), d2.evaluate());
        let err = fragment(&d1.split_at(s(&[3, 4])).unwrap(), &d2.split_at(s(&[3, 4])).unwrap(), &r1, &r2).unwrap_err();
        assert_eq!(err, Error::NotMaximal { given: s(&[3, 4]), expected: s(&[2, 3, 4]) });
    }

    #[test]
    fn flattening_meet_rank_one_and_zero() {
        let f = Field::prime(5).unwrap();
        let (u, v, w) = (on(s(&[1]), 2, &[1, 2], f), on(s(&[2]), 2, &[3, 1], f), on(s(&[3]), 2, &[1, 4], f));
        let t = u.outer(&v).unwrap().outer(&w).unwrap();
        let flat = |c: &Tensor, rest: Tensor, j: usize| {
            let fam = PartitionFamily::flattening(Subset::full(3), j).unwrap();
            Decomposition::new(fam, t.shape().clone(), f, vec![Rank1Term::from_factors(vec![c.clone(), rest]).unwrap()])
                .unwrap()
                .split_at(Subset::full(3).difference(Subset::singleton(j)))
                .unwrap()
        };
        let d1 = flat(&u, v.outer(&w).unwrap(), 0);
        let d2 = flat(&v, u.outer(&w).unwrap(), 1);
        let out = flattening_meet(&[d1, d2], &t).unwrap();
        assert_eq!(out.len(), 1);

        let zero = Tensor::zeros(t.shape().clone(), f);
        let e = |j: usize| SplitForm::new(Subset::full(3).difference(Subset::singleton(j)), t.shape().clone(), f, vec![], vec![]).unwrap();
        assert!(flattening_meet(&[e(0), e(1)], &zero).unwrap().is_empty());
    }
}
