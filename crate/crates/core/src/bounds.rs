//! Lower-bound certificates for `R`-ranks of diagonal tensors `Δ_P`.
//!
//! A certificate is an exact integer expression in `n` together with the
//! trail of rules that produced it. Rules, in the order they are tried:
//!
//! * `P` trivial: the partition rank of `Δ_d` is `n`.
//! * uncovered part: some part of `P` lies in no part of any member, so the
//!   rank is at least `n`.
//! * common part: a part shared by `P` and every member is stripped.
//! * case 1: a part of `P` is a part of some members but strictly inside none;
//!   `min(rec, ⌈√n⌉)`.
//! * case 2: otherwise refine `R` at `J_max(R)`; `⌈rec^{1/3}⌉ - 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{Partition, PartitionFamily, Subset};

/// Integer-valued expression in `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BoundExpr {
    Const { value: u64 },
    VarN,
    /// Partition rank of the diagonal tensor, which is `n`.
    PrDelta,
    Min { left: Box<BoundExpr>, right: Box<BoundExpr> },
    CeilSqrt { arg: Box<BoundExpr> },
    CuberootMinusOne { arg: Box<BoundExpr> },
}

impl BoundExpr {
    pub fn eval(&self, n: u128) -> u128 {
        match self {
            BoundExpr::Const { value } => *value as u128,
            BoundExpr::VarN | BoundExpr::PrDelta => n,
            BoundExpr::Min { left, right } => left.eval(n).min(right.eval(n)),
            BoundExpr::CeilSqrt { arg } => ceil_root(arg.eval(n), 2),
            BoundExpr::CuberootMinusOne { arg } => ceil_root(arg.eval(n), 3).saturating_sub(1),
        }
    }

    fn ceil_sqrt(arg: BoundExpr) -> BoundExpr {
        BoundExpr::CeilSqrt { arg: Box::new(arg) }
    }

    /// `min(rec, ⌈√n⌉)`; collapses to `⌈√n⌉` when `rec` is `n` itself.
    fn case_one(rec: BoundExpr) -> BoundExpr {
        let root = BoundExpr::ceil_sqrt(BoundExpr::VarN);
        match rec {
            BoundExpr::VarN | BoundExpr::PrDelta => root,
            other => BoundExpr::Min { left: Box::new(other), right: Box::new(root) },
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::Const { value } => write!(f, "{value}"),
            BoundExpr::VarN => write!(f, "n"),
            BoundExpr::PrDelta => write!(f, "pr_delta(n)"),
            BoundExpr::Min { left, right } => write!(f, "min({left}, {right})"),
            BoundExpr::CeilSqrt { arg } => write!(f, "ceil_sqrt({arg})"),
            BoundExpr::CuberootMinusOne { arg } => write!(f, "cuberoot_minus_one({arg})"),
        }
    }
}

/// `⌈x^{1/k}⌉` by exact integer root.
pub fn ceil_root(x: u128, k: u32) -> u128 {
    let r = x.nth_root(k);
    if r.pow(k) < x {
        r + 1
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    PrDelta,
    UncoveredPart,
    CommonPart,
    CaseOne,
    CaseTwo,
    /// Single-partition bound against one `Q`.
    SinglePartition,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::PrDelta => "P is trivial: the partition rank of the diagonal tensor is n",
            Rule::UncoveredPart => "J lies in no part of any member: specialising outside J leaves a diagonal of partition rank n",
            Rule::CommonPart => "J is a part of P and of every member: restrict to slices on the complement of J",
            Rule::CaseOne => "J is a part of some members and strictly inside no part: either the complement bound holds or k^2 >= n",
            Rule::CaseTwo => "every part of P is strictly inside some part: refine R at J and use k((k+1)^2+1) <= (k+1)^3",
            Rule::SinglePartition => "J meets two parts of Q: specialising outside J leaves a diagonal of partition rank n",
        }
    }
}

/// One node of the certificate recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailStep {
    pub depth: usize,
    pub rule: Rule,
    pub partition: Vec<Vec<usize>>,
    pub family: Vec<Vec<Vec<usize>>>,
    pub j: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFunction {
    pub expr: BoundExpr,
    pub trail: Vec<TrailStep>,
}

impl BoundFunction {
    pub fn eval(&self, n: u128) -> u128 {
        self.expr.eval(n)
    }

    /// Human-readable proof sketch, one line per trail step.
    pub fn sketch(&self) -> String {
        let mut out = String::new();
        for s in &self.trail {
            let pad = "  ".repeat(s.depth);
            let j = s.j.as_ref().map(|j| format!(" at J={}", fmt_set(j))).unwrap_or_default();
            out.push_str(&format!(
                "{pad}{:?}{j}: P={} R={}\n{pad}  {}\n",
                s.rule,
                fmt_partition(&s.partition),
                fmt_family(&s.family),
                s.rule.describe()
            ));
        }
        out.push_str(&format!("bound: Rrk(Delta_P) >= {}\n", self.expr));
        out
    }
}

fn fmt_set(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_partition(p: &[Vec<usize>]) -> String {
    format!("{{{}}}", p.iter().map(|s| fmt_set(s)).collect::<Vec<_>>().join(","))
}

fn fmt_family(r: &[Vec<Vec<usize>>]) -> String {
    format!("{{{}}}", r.iter().map(|p| fmt_partition(p)).collect::<Vec<_>>().join(","))
}

fn step(depth: usize, rule: Rule, p: &Partition, r: Option<&PartitionFamily>, j: Option<Subset>) -> TrailStep {
    TrailStep {
        depth,
        rule,
        partition: p.to_one_based(),
        family: r.map(PartitionFamily::to_one_based).unwrap_or_default(),
        j: j.map(Subset::to_one_based),
    }
}

fn meets_two_parts(j: Subset, q: &Partition) -> bool {
    q.parts().iter().filter(|x| x.intersects(j)).count() >= 2
}

/// `Rrk_{{Q}}(Δ_P) ≥ n` when `P ⊀ Q`.
pub fn lb_single_partition(p: &Partition, q: &Partition) -> Result<BoundFunction> {
    if p.is_finer_than(q)? {
        return Err(Error::Precondition(format!("{p} is finer than {q}; the rank is 1")));
    }
    let j0 = p
        .parts()
        .iter()
        .copied()
        .rev()
        .find(|&j| meets_two_parts(j, q))
        .ok_or_else(|| Error::InvariantBreach("no part of P meets two parts of Q".into()))?;
    let fam = PartitionFamily::single(q.clone());
    Ok(BoundFunction {
        expr: BoundExpr::PrDelta,
        trail: vec![step(0, Rule::SinglePartition, p, Some(&fam), Some(j0))],
    })
}

fn uncovered_part(p: &Partition, r: &PartitionFamily) -> Option<Subset> {
    p.parts()
        .iter()
        .copied()
        .rev()
        .find(|&j| r.members().iter().all(|q| q.parts().iter().all(|x| !j.is_subset_of(*x))))
}

/// The greatest part of `P` contained in no part of any member of `R`.
pub fn lb_family_uncovered(p: &Partition, r: &PartitionFamily) -> Result<Option<BoundFunction>> {
    check_ground(p, r)?;
    Ok(uncovered_part(p, r).map(|j| BoundFunction {
        expr: BoundExpr::PrDelta,
        trail: vec![step(0, Rule::UncoveredPart, p, Some(r), Some(j))],
    }))
}

fn common_part(p: &Partition, r: &PartitionFamily) -> Option<Subset> {
    if p.is_trivial() {
        return None;
    }
    p.parts()
        .iter()
        .copied()
        .rev()
        .find(|&j| r.members().iter().all(|q| q.contains_part(j) && !q.is_trivial()))
}

/// Strips the greatest part shared by `P` and every member of `R`.
pub fn common_part_reduce(p: &Partition, r: &PartitionFamily) -> Result<Option<(Partition, PartitionFamily, Subset)>> {
    check_ground(p, r)?;
    let Some(j) = common_part(p, r) else {
        return Ok(None);
    };
    let rc = r
        .derived(j)?
        .comp_family()
        .ok_or_else(|| Error::InvariantBreach("common part with empty complement family".into()))?;
    Ok(Some((p.without_part(j)?, rc, j)))
}

fn check_ground(p: &Partition, r: &PartitionFamily) -> Result<()> {
    if p.ground() != r.ground() {
        return Err(Error::GroundMismatch(p.ground(), r.ground()));
    }
    Ok(())
}

fn check_certifiable(p: &Partition, r: &PartitionFamily) -> Result<()> {
    check_ground(p, r)?;
    if r.contains_trivial() {
        return Err(Error::Precondition("R contains the trivial partition; every rank is at most 1".into()));
    }
    if let Some(q) = r.members().iter().find(|q| p.is_finer_than(q).unwrap_or(false)) {
        return Err(Error::Precondition(format!("{p} is finer than {q}; the rank is 1")));
    }
    Ok(())
}

/// Result of the recursion: the expression, its exponent and the trail.
struct Node {
    expr: BoundExpr,
    exponent: BigRational,
}

struct Walker {
    trail: Vec<TrailStep>,
    case_two_steps: usize,
    cap: usize,
}

impl Walker {
    fn walk(&mut self, p: &Partition, r: &PartitionFamily, depth: usize) -> Result<Node> {
        check_certifiable(p, r).map_err(|e| match e {
            Error::Precondition(m) => Error::InvariantBreach(format!("recursion lost its precondition: {m}")),
            other => other,
        })?;
        let one = BigRational::one();
        if p.is_trivial() {
            self.trail.push(step(depth, Rule::PrDelta, p, Some(r), None));
            return Ok(Node { expr: BoundExpr::PrDelta, exponent: one });
        }
        if let Some(j) = uncovered_part(p, r) {
            self.trail.push(step(depth, Rule::UncoveredPart, p, Some(r), Some(j)));
            return Ok(Node { expr: BoundExpr::PrDelta, exponent: one });
        }
        if let Some((p2, r2, j)) = common_part_reduce(p, r)? {
            self.trail.push(step(depth, Rule::CommonPart, p, Some(r), Some(j)));
            return self.walk(&p2, &r2, depth + 1);
        }
        // uncovered parts are excluded, so "not strictly inside" means "equal to a part"
        let case_one = p.parts().iter().copied().rev().find(|&j| {
            r.members()
                .iter()
                .all(|q| q.parts().iter().all(|x| !j.is_strict_subset_of(*x)))
        });
        if let Some(j) = case_one {
            self.trail.push(step(depth, Rule::CaseOne, p, Some(r), Some(j)));
            let rc = r
                .derived(j)?
                .comp_family()
                .ok_or_else(|| Error::InvariantBreach(format!("case 1 at {j} with no member containing it")))?;
            let rec = self.walk(&p.without_part(j)?, &rc, depth + 1)?;
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            return Ok(Node {
                expr: BoundExpr::case_one(rec.expr),
                exponent: rec.exponent.min(half),
            });
        }
        self.case_two_steps += 1;
        if self.case_two_steps > self.cap {
            return Err(Error::InvariantBreach(format!("more than {} case-2 refinements", self.cap)));
        }
        let j = r.j_max();
        self.trail.push(step(depth, Rule::CaseTwo, p, Some(r), Some(j)));
        let refined = r
            .derived(j)?
            .prime_family()
            .ok_or_else(|| Error::InvariantBreach(format!("empty refinement at {j}")))?;
        let rec = self.walk(p, &refined, depth + 1)?;
        Ok(Node {
            expr: BoundExpr::CuberootMinusOne { arg: Box::new(rec.expr) },
            exponent: rec.exponent / BigRational::from_integer(BigInt::from(3)),
        })
    }
}

fn run(p: &Partition, r: &PartitionFamily) -> Result<(BoundFunction, BigRational)> {
    check_certifiable(p, r)?;
    let d = p.ground().len();
    let mut w = Walker { trail: Vec::new(), case_two_steps: 0, cap: 1usize << d };
    let node = w.walk(p, r, 0)?;
    Ok((BoundFunction { expr: node.expr, trail: w.trail }, node.exponent))
}

/// Certificate `f` with `Rrk(Δ_P) ≥ f(n)` for every `n`.
pub fn lb_certificate(p: &Partition, r: &PartitionFamily) -> Result<BoundFunction> {
    run(p, r).map(|x| x.0)
}

/// Exponent achieved by the certificate trace next to the floor
/// `3^{-2^{d+1}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentReport {
    pub achieved: BigRational,
    pub floor: BigRational,
}

pub fn exponent_floor(d: usize) -> BigRational {
    let denom: BigInt = BigInt::from(3).pow(1u64 << (d + 1));
    BigRational::new(BigInt::one(), denom)
}

pub fn guaranteed_exponent(p: &Partition, r: &PartitionFamily) -> Result<ExponentReport> {
    let (_, achieved) = run(p, r)?;
    let floor = exponent_floor(p.ground().len());
    if achieved < floor {
        return Err(Error::InvariantBreach(format!("exponent {achieved} below the floor")));
    }
    Ok(ExponentReport { achieved, floor })
}
