//! JSON file formats. Coordinates are 1-based; scalars are canonical strings
//! (`"3"`, `"-2/7"`) so rationals stay exact; tables are row-major.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decomp::{Decomposition, Rank1Term};
use crate::error::{Error, Result};
use crate::exactlin::{Field, FuncTable};
use crate::meetrank::MeetTrace;
use crate::partitions::{Partition, PartitionFamily, Subset};
use crate::tensor::{Shape, Tensor};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldJson {
    Prime { p: u64 },
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub field: FieldJson,
    pub shape: Vec<usize>,
    pub entries: Vec<String>,
}

/// A factor table; the field is the decomposition's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub shape: Vec<usize>,
    pub entries: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub partition: Vec<Vec<usize>>,
    /// Keyed by the part, e.g. `"1,4"`.
    pub factors: BTreeMap<String, TableJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub field: FieldJson,
    pub shape: Vec<usize>,
    pub family: Vec<Vec<Vec<usize>>>,
    pub terms: Vec<TermJson>,
}

pub fn field_to_json(f: Field) -> FieldJson {
    match f {
        Field::Prime(p) => FieldJson::Prime { p: p as u64 },
        Field::Rational => FieldJson::Rational,
    }
}

pub fn field_from_json(f: &FieldJson) -> Result<Field> {
    match f {
        FieldJson::Prime { p } => Field::prime(*p),
        FieldJson::Rational => Ok(Field::Rational),
    }
}

/// `"p"` for a prime, `"Q"` for the rationals.
pub fn parse_field_arg(s: &str) -> Result<Field> {
    match s {
        "Q" | "q" | "rational" => Ok(Field::Rational),
        _ => {
            let p: u64 = s.parse().map_err(|_| Error::Malformed(format!("field must be a prime or Q, got {s:?}")))?;
            Field::prime(p)
        }
    }
}

fn part_key(part: Subset) -> String {
    part.to_one_based().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_key(key: &str) -> Result<Subset> {
    let items: Vec<usize> = key
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Malformed(format!("bad factor key {key:?}")))?;
    Subset::from_one_based(&items)
}

fn entries(t: &Tensor) -> Vec<String> {
    t.values().iter().map(|v| v.to_string()).collect()
}

fn parse_entries(field: Field, entries: &[String]) -> Result<FuncTable> {
    let vals = entries.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
    FuncTable::new(field, vals)
}

/// Tensors in files live on coordinates `1..=d`.
pub fn tensor_to_json(t: &Tensor) -> Result<TensorJson> {
    if t.axes() != Subset::full(t.shape().order()) {
        return Err(Error::Malformed("only tensors on 1..=d have a file format".into()));
    }
    Ok(TensorJson { field: field_to_json(t.field()), shape: t.shape().dims().to_vec(), entries: entries(t) })
}

pub fn tensor_from_json(j: &TensorJson) -> Result<Tensor> {
    let field = field_from_json(&j.field)?;
    let shape = Shape::new(&j.shape)?;
    if j.entries.len() != shape.size() {
        return Err(Error::Malformed(format!("{} entries for shape {:?}", j.entries.len(), j.shape)));
    }
    Tensor::new(shape, parse_entries(field, &j.entries)?)
}

pub fn partition_to_json(p: &Partition) -> Vec<Vec<usize>> {
    p.to_one_based()
}

/// A partition of `{1..=d}` where `d` is the largest listed coordinate.
pub fn partition_from_json(v: &[Vec<usize>]) -> Result<Partition> {
    Partition::from_one_based(v)
}

pub fn family_to_json(r: &PartitionFamily) -> Vec<Vec<Vec<usize>>> {
    r.to_one_based()
}

pub fn family_from_json(v: &[Vec<Vec<usize>>]) -> Result<PartitionFamily> {
    PartitionFamily::from_one_based(v)
}

pub fn decomposition_to_json(d: &Decomposition) -> Result<DecompositionJson> {
    if d.ground() != Subset::full(d.shape().order()) {
        return Err(Error::Malformed("only decompositions on 1..=d have a file format".into()));
    }
    let terms = d
        .terms()
        .iter()
        .map(|t| TermJson {
            partition: t.partition().to_one_based(),
            factors: t
                .partition()
                .parts()
                .iter()
                .zip(t.factors())
                .map(|(&part, f)| (part_key(part), TableJson { shape: f.shape().dims().to_vec(), entries: entries(f) }))
                .collect(),
        })
        .collect();
    Ok(DecompositionJson {
        field: field_to_json(d.field()),
        shape: d.shape().dims().to_vec(),
        family: d.family().to_one_based(),
        terms,
    })
}

pub fn decomposition_from_json(j: &DecompositionJson) -> Result<Decomposition> {
    let field = field_from_json(&j.field)?;
    let shape = Shape::new(&j.shape)?;
    let family = family_from_json(&j.family)?;
    let mut terms = Vec::new();
    for t in &j.terms {
        let partition = partition_from_json(&t.partition)?;
        if t.factors.len() != partition.num_parts() {
            return Err(Error::Malformed(format!("term on {partition} has {} factors", t.factors.len())));
        }
        let mut factors = Vec::new();
        for &part in partition.parts() {
            let table = t
                .factors
                .get(&part_key(part))
                .or_else(|| t.factors.iter().find(|(k, _)| parse_key(k).ok() == Some(part)).map(|x| x.1))
                .ok_or_else(|| Error::Malformed(format!("missing factor for part {part}")))?;
            let sub = shape.restrict(part)?;
            if table.shape != sub.dims() {
                return Err(Error::Malformed(format!("factor on {part} has shape {:?}", table.shape)));
            }
            factors.push(Tensor::new(sub, parse_entries(field, &table.entries)?)?);
        }
        terms.push(Rank1Term::new(partition, factors)?);
    }
    Decomposition::new(family, shape, field, terms)
}

pub fn trace_to_json(trace: &MeetTrace) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "depth": s.depth,
                "parent": s.parent,
                "ground": s.ground.to_one_based(),
                "j_max": s.j_max.to_one_based(),
                "case": s.case.name(),
                "k1": s.k1,
                "k2": s.k2,
                "r1": s.r1,
                "r2": s.r2,
                "tau": s.tau,
                "t": s.t,
                "fragment_bounds": s.fragment_bounds.map(|(a, b)| vec![a.to_string(), b.to_string()]),
                "fragment_lengths": s.fragment_lengths.map(|(a, b)| vec![a, b]),
                "claimed_bound": s.claimed_bound.to_string(),
                "output_len": s.output_len,
            })
        })
        .collect();
    json!({ "max_depth": trace.max_depth(), "steps": steps })
}

/// Parses `text` as `T`, reporting failures as malformed input.
pub fn from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data always serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{planted_decomposition, random_family, rng};

    #[test]
    fn field_format() {
        assert_eq!(to_string(&field_to_json(Field::prime(5).unwrap())).replace([' ', '\n'], ""), r#"{"kind":"prime","p":5}"#);
        assert_eq!(from_str::<FieldJson>(r#"{"kind":"rational"}"#).unwrap(), FieldJson::Rational);
        assert!(field_from_json(&FieldJson::Prime { p: 6 }).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let mut r = rng(2);
        for field in [Field::Rational, Field::prime(5).unwrap()] {
            let g = Subset::full(4);
            let shape = Shape::new(&[2, 3, 2, 2]).unwrap();
            let fam = random_family(g, 3, true, &mut r);
            let d = planted_decomposition(&fam, &shape, field, 3, &mut r);
            let j = decomposition_to_json(&d).unwrap();
            let text = to_string(&j);
            let back = decomposition_from_json(&from_str(&text).unwrap()).unwrap();
            assert_eq!(back, d);
            assert_eq!(to_string(&decomposition_to_json(&back).unwrap()), text);
        }
    }

    #[test]
    fn tensor_round_trip_and_errors() {
        let t = Tensor::new(Shape::new(&[2, 2]).unwrap(), FuncTable::from_i64(Field::Rational, &[1, -2, 0, 3])).unwrap();
        let j = tensor_to_json(&t).unwrap();
        assert_eq!(j.entries, vec!["1", "-2", "0", "3"]);
        assert_eq!(tensor_from_json(&j).unwrap(), t);
        let bad = TensorJson { entries: vec!["1".into()], ..j.clone() };
        assert!(matches!(tensor_from_json(&bad), Err(Error::Malformed(_))));
        assert!(from_str::<TensorJson>("{").is_err());
    }
}
