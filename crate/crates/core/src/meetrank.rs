//! Combining an `R1`- and an `R2`-decomposition of one tensor into an
//! `R1 ∧ R2`-decomposition.
//!
//! [`meet_decompose`] follows the induction on `(|ground|, J_max(R1 ∪ R2))`:
//! trivial families and the tensor-rank base case return directly; otherwise
//! both sides are split at `J = J_max`, linear dependences between the two
//! `A`-families are eliminated one at a time (each costs a recursive meet on
//! `J^c`), both sides are fragmented and the result recurses on
//! `R1'(J), R2'(J)`. Sub-problems keep their original coordinate labels.

use std::collections::HashMap;

use crate::decomp::{compress_terms, Decomposition, Rank1Term, SplitForm, SplitPair};
use crate::error::{Error, Result};
use crate::exactlin::{dual_family_with_support, first_dependence, EchelonBasis, FuncTable, Scalar};
use crate::fragment::{fragment, fragment_bound};
use crate::partitions::{PartitionFamily, Subset, MAX_ORDER};
use crate::tensor::Tensor;

/// Which branch of the recursion produced a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeetCase {
    /// One family contains the trivial partition.
    TrivialFamily,
    /// Both families are the tensor-rank family.
    BaseDiscrete,
    /// The two `A`-families were independent from the start.
    IndependentFastPath,
    /// At least one dependence was eliminated first.
    InnerInduction,
}

impl MeetCase {
    pub fn name(self) -> &'static str {
        match self {
            MeetCase::TrivialFamily => "trivial-family",
            MeetCase::BaseDiscrete => "base-discrete",
            MeetCase::IndependentFastPath => "independent-fast-path",
            MeetCase::InnerInduction => "inner-induction",
        }
    }
}

/// One call of the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetStep {
    pub depth: usize,
    pub parent: Option<usize>,
    pub ground: Subset,
    /// `J_max(R1 ∪ R2)` for this call.
    pub j_max: Subset,
    pub case: MeetCase,
    /// Input lengths.
    pub k1: usize,
    pub k2: usize,
    /// Number of `(A, B)` pairs on each side after the independence reduction.
    pub r1: usize,
    pub r2: usize,
    /// Inner-induction iterations.
    pub tau: usize,
    /// Size of the shared family of meet-rank-one tensors on `J^c`.
    pub t: usize,
    /// `k((k1+t+k2)^2+1)`-style bounds and the lengths the fragments achieved.
    pub fragment_bounds: Option<(u128, u128)>,
    pub fragment_lengths: Option<(usize, usize)>,
    /// Bound certified by this run: the input length in the leaf cases,
    /// otherwise `t` plus the child's certified bound.
    pub claimed_bound: u128,
    pub output_len: usize,
}

/// Steps in call order; `parent` indexes into `steps`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeetTrace {
    pub steps: Vec<MeetStep>,
}

impl MeetTrace {
    /// `(|ground|, J_max)` strictly decreases from every step to its children.
    pub fn measure_decreases(&self) -> bool {
        self.steps.iter().all(|s| match s.parent {
            None => true,
            Some(p) => {
                let parent = &self.steps[p];
                (s.ground.len(), s.j_max) < (parent.ground.len(), parent.j_max)
            }
        })
    }

    /// `τ ≤ r1 + r2` everywhere.
    pub fn tau_within_bounds(&self) -> bool {
        self.steps.iter().all(|s| s.tau <= s.r1 + s.r2)
    }

    /// Every step's output is no longer than the bound it certified.
    pub fn lengths_within_claims(&self) -> bool {
        self.steps.iter().all(|s| (s.output_len as u128) <= s.claimed_bound)
    }

    pub fn max_depth(&self) -> usize {
        self.steps.iter().map(|s| s.depth).max().unwrap_or(0)
    }
}

fn placeholder(depth: usize, parent: Option<usize>, ground: Subset, j_max: Subset, k1: usize, k2: usize) -> MeetStep {
    MeetStep {
        depth,
        parent,
        ground,
        j_max,
        case: MeetCase::TrivialFamily,
        k1,
        k2,
        r1: 0,
        r2: 0,
        tau: 0,
        t: 0,
        fragment_bounds: None,
        fragment_lengths: None,
        claimed_bound: 0,
        output_len: 0,
    }
}

fn check_input(t: &Tensor, dec: &Decomposition) -> Result<()> {
    if dec.ground() != t.axes() {
        return Err(Error::GroundMismatch(dec.ground(), t.axes()));
    }
    dec.check(t)
}

/// Meet of a `{P}`- and a `{Q}`-decomposition of the same tensor: a
/// `{P ∧ Q}`-decomposition with at most `(rs)^{|P|}` terms, where `r` and `s`
/// are the input lengths.
pub fn single_partition_meet(dec1: &Decomposition, dec2: &Decomposition) -> Result<Decomposition> {
    if dec1.family().len() != 1 || dec2.family().len() != 1 {
        return Err(Error::Precondition("both families must consist of one partition".into()));
    }
    if dec1.ground() != dec2.ground() {
        return Err(Error::GroundMismatch(dec1.ground(), dec2.ground()));
    }
    let t = dec1.evaluate();
    if dec2.evaluate() != t {
        return Err(Error::EvaluationMismatch);
    }
    let p = dec1.family().members()[0].clone();
    let q = dec2.family().members()[0].clone();
    let target = PartitionFamily::single(p.meet(&q)?);
    let field = dec1.field();
    let shape = dec1.shape().clone();
    // per-part co-factor families become independent once compressed
    let terms1 = compress_terms(dec1.terms().to_vec());
    let s = dec2.len();
    if terms1.is_empty() || s == 0 {
        return Decomposition::empty(target, shape, field);
    }
    let parts = p.parts();

    // duals[k][i] is A*_{i,J_k} restricted to its support; supports[k] lists
    // the points of J_k^c as coordinate arrays
    let mut duals: Vec<Vec<Vec<Scalar>>> = Vec::new();
    let mut supports: Vec<Vec<Vec<usize>>> = Vec::new();
    for (k, &part) in parts.iter().enumerate() {
        let rests: Vec<Tensor> = terms1.iter().map(|x| x.rest(k)).collect();
        let tables: Vec<&FuncTable> = rests.iter().map(Tensor::table).collect();
        let (d, support) = dual_family_with_support(&tables).map_err(|e| match e {
            Error::Dependent => Error::InvariantBreach("compressed co-factors are dependent".into()),
            other => other,
        })?;
        let rest_shape = shape.restrict(shape.axes().difference(part))?;
        supports.push(
            support
                .iter()
                .map(|&u| {
                    let mut c = vec![0usize; MAX_ORDER];
                    rest_shape.unravel_into(u, &mut c);
                    c
                })
                .collect(),
        );
        duals.push(d.iter().map(|f| support.iter().map(|&u| f.values()[u].clone()).collect()).collect());
    }

    let r = terms1.len();
    let nparts = parts.len();
    let mut out = Vec::new();
    // odometer over j ∈ [s]^P and (u_{J_1}) ∈ ∏ U_{J_1}
    let mut js = vec![0usize; nparts];
    loop {
        let mut us = vec![0usize; nparts];
        loop {
            let mut coeff = field.zero();
            for i in 0..r {
                let mut prod = field.one();
                for (dk, &u) in duals.iter().zip(&us) {
                    prod = &prod * &dk[i][u];
                }
                coeff += &prod;
            }
            if !coeff.is_zero() {
                let mut factors = Vec::new();
                for (k, &j1) in parts.iter().enumerate() {
                    let b = &dec2.terms()[js[k]];
                    let coords = &supports[k][us[k]];
                    for (&j2, f) in q.parts().iter().zip(b.factors()) {
                        let inside = j1.intersection(j2);
                        if inside.is_empty() {
                            coeff = &coeff * f.at(coords);
                        } else {
                            factors.push(f.slice_coords(inside, coords)?);
                        }
                    }
                }
                if !coeff.is_zero() {
                    factors[0] = factors[0].scale(&coeff);
                    let term = Rank1Term::from_factors(factors)?;
                    if !term.is_zero() {
                        out.push(term);
                    }
                }
            }
            if !advance(&mut us, &supports.iter().map(Vec::len).collect::<Vec<_>>()) {
                break;
            }
        }
        if !advance(&mut js, &vec![s; nparts]) {
            break;
        }
    }
    let dec = Decomposition::new(target, shape, field, out)?;
    if !dec.verify(&t) {
        return Err(Error::InvariantBreach("single-partition meet does not evaluate to the input".into()));
    }
    Ok(dec)
}

/// Lexicographic odometer; false once it wraps.
fn advance(idx: &mut [usize], limits: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < limits[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// `R1 ∧ R2`-decomposition of `t` from an `R1`- and an `R2`-decomposition.
/// Both inputs and the output are verified against `t`.
pub fn meet_decompose(
    t: &Tensor,
    dec1: &Decomposition,
    dec2: &Decomposition,
) -> Result<(Decomposition, MeetTrace)> {
    check_input(t, dec1)?;
    check_input(t, dec2)?;
    let mut trace = MeetTrace::default();
    let out = meet_rec(t, dec1, dec2, 0, None, &mut trace)?;
    let target = dec1.family().meet(dec2.family())?;
    if out.family() != &target || !out.verify(t) {
        return Err(Error::InvariantBreach("meet output does not verify".into()));
    }
    Ok((out, trace))
}

fn meet_rec(
    t: &Tensor,
    dec1: &Decomposition,
    dec2: &Decomposition,
    depth: usize,
    parent: Option<usize>,
    trace: &mut MeetTrace,
) -> Result<Decomposition> {
    let (r1, r2) = (dec1.family(), dec2.family());
    let ground = r1.ground();
    let target = r1.meet(r2)?;
    let union = r1.union(r2)?;
    let j = union.j_max();
    let me = trace.steps.len();
    trace.steps.push(placeholder(depth, parent, ground, j, dec1.len(), dec2.len()));

    if r1.contains_trivial() || r2.contains_trivial() {
        let src = if r1.contains_trivial() { dec2 } else { dec1 };
        let out = src.convert_finer(&target)?;
        let step = &mut trace.steps[me];
        step.case = MeetCase::TrivialFamily;
        step.claimed_bound = src.len() as u128;
        step.output_len = out.len();
        return Ok(out);
    }
    if r1.is_tensor_rank() && r2.is_tensor_rank() {
        let out = dec1.with_family(target)?;
        let step = &mut trace.steps[me];
        step.case = MeetCase::BaseDiscrete;
        step.claimed_bound = dec1.len() as u128;
        step.output_len = out.len();
        return Ok(out);
    }

    let field = t.field();
    let jc = ground.difference(j);
    let jc_shape = t.shape().restrict(jc)?;
    let j_shape = t.shape().restrict(j)?;
    let sf1 = dec1.split_at(j)?.reduce_independent()?;
    let sf2 = dec2.split_at(j)?.reduce_independent()?;
    let (k1, k2) = (sf1.len(), sf2.len());
    let (n1, n2) = (sf1.r(), sf2.r());
    let rc1 = r1.derived(j)?.comp_family();
    let rc2 = r2.derived(j)?.comp_family();

    let mut a1: Vec<SplitPair> = sf1.pairs().to_vec();
    let mut a2: Vec<SplitPair> = sf2.pairs().to_vec();
    // the shared family 𝒯 on J^c, kept independent
    let mut shared: Vec<Rank1Term> = Vec::new();
    let mut shared_flat: Vec<Tensor> = Vec::new();
    let mut shared_basis = EchelonBasis::new(field, jc_shape.size());
    let mut b1k: Vec<Tensor> = Vec::new();
    let mut b2k: Vec<Tensor> = Vec::new();
    let mut tau = 0usize;

    loop {
        let list: Vec<&FuncTable> = a1
            .iter()
            .chain(a2.iter())
            .map(|p| p.a_flat.table())
            .chain(shared_flat.iter().map(Tensor::table))
            .collect();
        let Some((_, c)) = first_dependence(&list)? else {
            break;
        };
        tau += 1;
        if tau > n1 + n2 {
            return Err(Error::InvariantBreach(format!("inner induction ran {tau} > r1 + r2 = {} times", n1 + n2)));
        }
        // Σ coef_i list_i = 0
        let mut coef = c;
        coef.push(-field.one());
        coef.resize(list.len(), field.zero());
        let (na1, na2) = (a1.len(), a2.len());
        let alpha: Vec<Scalar> = coef[..na1].to_vec();
        let beta: Vec<Scalar> = coef[na1..na1 + na2].iter().map(|x| -x).collect();
        let gamma: Vec<Scalar> = coef[na1 + na2..].iter().map(|x| -x).collect();
        // Σ α A¹ = Σ β A² + Σ γ 𝒯

        if let Some(jdx) = alpha.iter().rposition(|x| !x.is_zero()) {
            let (Some(rc1), Some(rc2)) = (&rc1, &rc2) else {
                return Err(Error::InvariantBreach("dependence without both compatible families".into()));
            };
            let mut s = Tensor::zeros(jc_shape.clone(), field);
            let mut side1 = Vec::new();
            for (al, p) in alpha.iter().zip(&a1) {
                if !al.is_zero() {
                    s.add_scaled(al, &p.a_flat)?;
                    side1.push(p.a.scaled(al));
                }
            }
            let mut side2 = Vec::new();
            for (be, p) in beta.iter().zip(&a2) {
                if !be.is_zero() {
                    side2.push(p.a.scaled(be));
                }
            }
            for (ga, x) in gamma.iter().zip(&shared) {
                if !ga.is_zero() {
                    let coarse = rc2
                        .least_coarsening(x.partition())
                        .ok_or_else(|| Error::InvariantBreach("𝒯 member not below R2comp".into()))?;
                    side2.push(x.regroup(coarse)?.scaled(ga));
                }
            }
            let ds1 = Decomposition::new(rc1.clone(), jc_shape.clone(), field, side1)?;
            let ds2 = Decomposition::new(rc2.clone(), jc_shape.clone(), field, side2)?;
            let sub = meet_rec(&s, &ds1, &ds2, depth + 1, Some(me), trace)?;
            for x in sub.terms() {
                let flat = x.evaluate();
                if shared_basis.insert(flat.values()).is_ok() {
                    shared.push(x.clone());
                    shared_flat.push(flat);
                    b1k.push(Tensor::zeros(j_shape.clone(), field));
                    b2k.push(Tensor::zeros(j_shape.clone(), field));
                }
            }
            let sigma = shared_basis
                .express(s.values())
                .ok_or_else(|| Error::InvariantBreach("common tensor outside the span of 𝒯".into()))?;
            let inv = alpha[jdx].inv()?;
            let bj = a1[jdx].b.clone();
            for (k, sk) in sigma.iter().enumerate() {
                b1k[k].add_scaled(&(sk * &inv), &bj)?;
            }
            for (i, p) in a1.iter_mut().enumerate() {
                if i != jdx && !alpha[i].is_zero() {
                    p.b.add_scaled(&-(&alpha[i] * &inv), &bj)?;
                }
            }
            a1.remove(jdx);
        } else {
            let jdx = beta
                .iter()
                .rposition(|x| !x.is_zero())
                .ok_or_else(|| Error::InvariantBreach("dependence inside the independent family 𝒯".into()))?;
            let inv = beta[jdx].inv()?;
            let bj = a2[jdx].b.clone();
            for (k, gk) in gamma.iter().enumerate() {
                if !gk.is_zero() {
                    b2k[k].add_scaled(&-(gk * &inv), &bj)?;
                }
            }
            for (i, p) in a2.iter_mut().enumerate() {
                if i != jdx && !beta[i].is_zero() {
                    p.b.add_scaled(&-(&beta[i] * &inv), &bj)?;
                }
            }
            a2.remove(jdx);
        }
    }

    let nt = shared.len();
    // T' = T - Σ A_k ⊗ B^2_k
    let mut t_prime = t.clone();
    let mut extra = Vec::new();
    for (x, b) in shared.iter().zip(&b2k) {
        let term = x.extended(vec![b.clone()])?;
        t_prime.add_scaled(&-field.one(), &term.evaluate())?;
        if !term.is_zero() {
            extra.push(term);
        }
    }
    let mut pairs1 = a1;
    if nt > 0 {
        let rc1 = rc1.as_ref().expect("𝒯 is only built when R1comp exists");
        for ((x, b1), b2) in shared.iter().zip(&b1k).zip(&b2k) {
            let coarse = rc1
                .least_coarsening(x.partition())
                .ok_or_else(|| Error::InvariantBreach("𝒯 member not below R1comp".into()))?;
            pairs1.push(SplitPair::new(x.regroup(coarse)?, b1.sub(b2)?)?);
        }
    }
    let sf1p = SplitForm::new(j, t.shape().clone(), field, pairs1, sf1.f_terms().to_vec())?;
    let sf2p = SplitForm::new(j, t.shape().clone(), field, a2, sf2.f_terms().to_vec())?;
    let (rr1, rr2) = (sf1p.r(), sf2p.r());
    let kk1 = sf1p.len();
    let kk2 = sf2p.len();
    let frag1 = fragment(&sf1p, &sf2p, r1, r2)?.compress();
    let frag2 = fragment(&sf2p, &sf1p, r2, r1)?.compress();
    let bounds = (fragment_bound(kk1, kk2), fragment_bound(kk2, kk1));
    if frag1.len() as u128 > bounds.0 || frag2.len() as u128 > bounds.1 {
        return Err(Error::InvariantBreach("fragment exceeded its length bound".into()));
    }
    let child_index = trace.steps.len();
    let rec = meet_rec(&t_prime, &frag1, &frag2, depth + 1, Some(me), trace)?;
    let child_bound = trace.steps[child_index].claimed_bound;
    let mut terms = rec.convert_finer(&target)?.into_terms();
    terms.extend(extra);
    let out = Decomposition::new(target, t.shape().clone(), field, compress_terms(terms))?;
    if !out.verify(t) {
        return Err(Error::InvariantBreach(format!("meet step at {j} does not verify")));
    }
    let step = &mut trace.steps[me];
    step.case = if tau == 0 { MeetCase::IndependentFastPath } else { MeetCase::InnerInduction };
    step.k1 = k1;
    step.k2 = k2;
    step.r1 = n1;
    step.r2 = n2;
    step.tau = tau;
    step.t = nt;
    step.fragment_bounds = Some(bounds);
    step.fragment_lengths = Some((frag1.len(), frag2.len()));
    step.claimed_bound = (nt as u128).saturating_add(child_bound);
    step.output_len = out.len();
    debug_assert!(rr1 + rr2 <= jc_shape.size());
    Ok(out)
}

/// Left fold of [`meet_decompose`] over `decs`, all of which must verify
/// against `t`.
pub fn multi_meet(t: &Tensor, decs: &[Decomposition]) -> Result<(Decomposition, Vec<MeetTrace>)> {
    let (first, rest) = decs
        .split_first()
        .ok_or_else(|| Error::Precondition("multi_meet needs at least one decomposition".into()))?;
    for d in decs {
        check_input(t, d)?;
    }
    let mut acc = first.clone();
    let mut traces = Vec::new();
    for d in rest {
        let (next, tr) = meet_decompose(t, &acc, d)?;
        acc = next;
        traces.push(tr);
    }
    Ok((acc, traces))
}

/// Iteration cap for the inner recurrence; reaching it saturates.
const INNER_CAP: u128 = 4096;

/// The a-priori length bound `C(R1, R2, k1, k2)` from the recursion,
/// saturating at `u128::MAX`. It is only a comparison figure and grows very
/// fast.
pub fn a_priori_bound(r1: &PartitionFamily, r2: &PartitionFamily, k1: u128, k2: u128) -> Result<u128> {
    if r1.ground() != r2.ground() {
        return Err(Error::GroundMismatch(r1.ground(), r2.ground()));
    }
    let mut memo = HashMap::new();
    Ok(apriori(r1, r2, k1, k2, &mut memo))
}

type Memo = HashMap<(PartitionFamily, PartitionFamily, u128, u128), u128>;

fn apriori(r1: &PartitionFamily, r2: &PartitionFamily, k1: u128, k2: u128, memo: &mut Memo) -> u128 {
    if r1.contains_trivial() {
        return k2;
    }
    if r2.contains_trivial() {
        return k1;
    }
    if r1.is_tensor_rank() && r2.is_tensor_rank() {
        return k1;
    }
    let key = (r1.clone(), r2.clone(), k1, k2);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let j = r1.union(r2).unwrap().j_max();
    let d1 = r1.derived(j).unwrap();
    let d2 = r2.derived(j).unwrap();
    let mut t: u128 = 0;
    if let (Some(c1), Some(c2)) = (d1.comp_family(), d2.comp_family()) {
        let steps = k1.saturating_add(k2);
        let mut tau = 0u128;
        while tau < steps {
            if tau == INNER_CAP {
                t = u128::MAX;
                break;
            }
            let inc = apriori(&c1, &c2, k1, k2.saturating_add(t), memo);
            let next = t.saturating_add(inc);
            if next == t {
                break;
            }
            t = next;
            tau += 1;
        }
    }
    let s = k1.saturating_add(t).saturating_add(k2);
    let sq = s.saturating_mul(s).saturating_add(1);
    let f1 = k1.saturating_add(t).saturating_mul(sq);
    let f2 = k2.saturating_mul(sq);
    let p1 = d1.prime_family().expect("R1'(J) is non-empty here");
    let p2 = d2.prime_family().expect("R2'(J) is non-empty here");
    let v = t.saturating_add(apriori(&p1, &p2, f1, f2, memo));
    memo.insert(key, v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Field;
    use crate::partitions::Partition;
    use crate::tensor::Shape;

    fn p(parts: &[&[usize]]) -> Partition {
        Partition::from_one_based(&parts.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn vecs(f: Field, vals: &[&[i64]]) -> Vec<Tensor> {
        vals.iter()
            .enumerate()
            .map(|(j, v)| {
                Tensor::new(Shape::on(Subset::singleton(j), vec![v.len()]).unwrap(), FuncTable::from_i64(f, v)).unwrap()
            })
            .collect()
    }

    fn rank_one(f: Field, vals: &[&[i64]], partition: &Partition) -> Rank1Term {
        Rank1Term::from_factors(vecs(f, vals)).unwrap().regroup(partition).unwrap()
    }

    #[test]
    fn single_partition_same_partition_and_fully_decomposable() {
        let q = Field::Rational;
        let pp = p(&[&[1, 2], &[3, 4]]);
        let qq = p(&[&[1, 3], &[2, 4]]);
        let v: &[&[i64]] = &[&[1, 2], &[3, 1], &[0, 1], &[2, 5]];
        let shape = Shape::new(&[2, 2, 2, 2]).unwrap();
        let d1 = Decomposition::new(PartitionFamily::single(pp.clone()), shape.clone(), q, vec![rank_one(q, v, &pp)]).unwrap();
        let d2 = Decomposition::new(PartitionFamily::single(qq.clone()), shape.clone(), q, vec![rank_one(q, v, &qq)]).unwrap();
        let out = single_partition_meet(&d1, &d2).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.family().is_tensor_rank());
        assert!(out.verify(&d1.evaluate()));

        let same = single_partition_meet(&d1, &d1).unwrap();
        assert_eq!(same.family(), d1.family());
        assert!(same.verify(&d1.evaluate()));
    }

    #[test]
    fn trivial_family_returns_other_side() {
        let q = Field::Rational;
        let g = Subset::full(3);
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let v: &[&[i64]] = &[&[1, 2], &[3, 1], &[0, 1]];
        let t = rank_one(q, v, &Partition::trivial(g)).evaluate();
        let d1 = Decomposition::new(PartitionFamily::trivial(g), shape.clone(), q, vec![rank_one(q, v, &Partition::trivial(g))]).unwrap();
        let sr = PartitionFamily::slice_rank(g).unwrap();
        let d2 = Decomposition::new(sr.clone(), shape, q, vec![rank_one(q, v, &p(&[&[2], &[1, 3]]))]).unwrap();
        let (out, trace) = meet_decompose(&t, &d1, &d2).unwrap();
        assert_eq!(out.terms(), d2.terms());
        assert_eq!(out.family(), &sr);
        assert_eq!(trace.steps[0].case, MeetCase::TrivialFamily);
    }

    #[test]
    fn tensor_rank_base_case_is_identity() {
        let q = Field::Rational;
        let g = Subset::full(3);
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let rtr = PartitionFamily::tensor_rank(g);
        let terms = vec![
            rank_one(q, &[&[1, 2], &[3, 1], &[0, 1]], &Partition::discrete(g)),
            rank_one(q, &[&[1, 0], &[1, 1], &[2, 1]], &Partition::discrete(g)),
        ];
        let d = Decomposition::new(rtr, shape, q, terms).unwrap();
        let (out, trace) = meet_decompose(&d.evaluate(), &d, &d).unwrap();
        assert_eq!(out, d);
        assert_eq!(trace.steps[0].case, MeetCase::BaseDiscrete);
    }

    #[test]
    fn order_three_single_terms_meet_to_length_one() {
        let q = Field::Rational;
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let v: &[&[i64]] = &[&[1, 2], &[3, 1], &[1, 4]];
        let pa = p(&[&[1], &[2, 3]]);
        let pb = p(&[&[2], &[1, 3]]);
        let d1 = Decomposition::new(PartitionFamily::single(pa.clone()), shape.clone(), q, vec![rank_one(q, v, &pa)]).unwrap();
        let d2 = Decomposition::new(PartitionFamily::single(pb.clone()), shape, q, vec![rank_one(q, v, &pb)]).unwrap();
        let t = d1.evaluate();
        let (out, trace) = meet_decompose(&t, &d1, &d2).unwrap();
        assert!(out.verify(&t));
        assert!(out.len() <= 1);
        assert!(trace.measure_decreases());
        assert!(trace.tau_within_bounds());
        assert!(trace.lengths_within_claims());
    }

    #[test]
    fn inner_induction_runs_on_shared_factor() {
        // A¹ = A² (both x1-vectors) forces one elimination
        let q = Field::Rational;
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let v: &[&[i64]] = &[&[1, 2], &[3, 1], &[1, 4]];
        let w: &[&[i64]] = &[&[0, 1], &[1, 1], &[2, 1]];
        let pa = p(&[&[1], &[2, 3]]);
        let pb = p(&[&[1, 2], &[3]]);
        let r1 = PartitionFamily::new(vec![pa.clone(), p(&[&[3], &[1, 2]])]).unwrap();
        let r2 = PartitionFamily::new(vec![pa.clone(), pb.clone()]).unwrap();
        let d1 = Decomposition::new(r1, shape.clone(), q, vec![rank_one(q, v, &pa), rank_one(q, w, &pa)]).unwrap();
        let d2 = Decomposition::new(r2, shape, q, vec![rank_one(q, v, &pa), rank_one(q, w, &pb)]).unwrap();
        let t = d1.evaluate();
        let (out, trace) = meet_decompose(&t, &d1, &d2).unwrap();
        assert!(out.verify(&t));
        assert!(trace.steps.iter().any(|st| st.case == MeetCase::InnerInduction));
        assert!(trace.measure_decreases());
        assert!(trace.tau_within_bounds());
        assert!(trace.lengths_within_claims());
    }

    #[test]
    fn swapped_inputs_share_the_family() {
        let f = Field::prime(5).unwrap();
        let shape = Shape::new(&[2, 2, 2]).unwrap();
        let v: &[&[i64]] = &[&[1, 2], &[3, 1], &[1, 4]];
        let pa = p(&[&[1], &[2, 3]]);
        let pb = p(&[&[2], &[1, 3]]);
        let d1 = Decomposition::new(PartitionFamily::single(pa.clone()), shape.clone(), f, vec![rank_one(f, v, &pa)]).unwrap();
        let d2 = Decomposition::new(PartitionFamily::single(pb.clone()), shape, f, vec![rank_one(f, v, &pb)]).unwrap();
        let t = d1.evaluate();
        let (x, _) = meet_decompose(&t, &d1, &d2).unwrap();
        let (y, _) = meet_decompose(&t, &d2, &d1).unwrap();
        assert_eq!(x.family(), y.family());
        assert!(x.verify(&t) && y.verify(&t));
    }

    #[test]
    fn multi_meet_single_input_is_unchanged() {
        let q = Field::Rational;
        let g = Subset::full(3);
        let d = Decomposition::new(
            PartitionFamily::tensor_rank(g),
            Shape::new(&[2, 2, 2]).unwrap(),
            q,
            vec![rank_one(q, &[&[1, 2], &[3, 1], &[0, 1]], &Partition::discrete(g))],
        )
        .unwrap();
        let (out, traces) = multi_meet(&d.evaluate(), std::slice::from_ref(&d)).unwrap();
        assert_eq!(out, d);
        assert!(traces.is_empty());
    }

    #[test]
    fn rejects_inputs_that_do_not_verify() {
        let q = Field::Rational;
        let g = Subset::full(2);
        let d = Decomposition::new(
            PartitionFamily::tensor_rank(g),
            Shape::new(&[2, 2]).unwrap(),
            q,
            vec![rank_one(q, &[&[1, 2], &[3, 1]], &Partition::discrete(g))],
        )
        .unwrap();
        let zero = Tensor::zeros(d.shape().clone(), q);
        assert_eq!(meet_decompose(&zero, &d, &d).unwrap_err(), Error::EvaluationMismatch);
    }

    #[test]
    fn a_priori_bound_shortcuts() {
        let g = Subset::full(3);
        let triv = PartitionFamily::trivial(g);
        let sr = PartitionFamily::slice_rank(g).unwrap();
        assert_eq!(a_priori_bound(&triv, &sr, 4, 7).unwrap(), 7);
        let rtr = PartitionFamily::tensor_rank(g);
        assert_eq!(a_priori_bound(&rtr, &rtr, 4, 7).unwrap(), 4);
        let v = a_priori_bound(&sr, &sr, 1, 1).unwrap();
        assert!(v >= 1);
    }
}
