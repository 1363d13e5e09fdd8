//! Exact scalars and the small dense linear algebra used by every other
//! module: independence tests, dependence extraction, annihilators and dual
//! families with controlled support.
//!
//! Elimination always scans domain points in increasing linear index, so the
//! support of a dual family is the lexicographically first set of pivot
//! positions and results are reproducible bit for bit.

mod scalar;

pub use scalar::{Field, Scalar};

use crate::error::{Error, Result};

/// A function from a finite (flattened) domain to the field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncTable {
    field: Field,
    values: Vec<Scalar>,
}

impl FuncTable {
    pub fn new(field: Field, values: Vec<Scalar>) -> Result<FuncTable> {
        if let Some(bad) = values.iter().find(|v| v.field() != field) {
            return Err(Error::FieldMismatch(field.to_string(), bad.field().to_string()));
        }
        Ok(FuncTable { field, values })
    }

    /// Caller guarantees every value lies in `field`.
    pub(crate) fn raw(field: Field, values: Vec<Scalar>) -> FuncTable {
        FuncTable { field, values }
    }

    pub fn zeros(field: Field, len: usize) -> FuncTable {
        FuncTable {
            field,
            values: vec![field.zero(); len],
        }
    }

    pub fn from_i64(field: Field, values: &[i64]) -> FuncTable {
        FuncTable {
            field,
            values: values.iter().map(|&v| field.from_i64(v)).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Scalar] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    /// Number of non-zero entries.
    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    /// The contraction `sum_x self(x) other(x)`.
    pub fn dot(&self, other: &FuncTable) -> Result<Scalar> {
        if self.len() != other.len() {
            return Err(Error::DomainMismatch(self.len(), other.len()));
        }
        let mut acc = self.field.zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        Ok(acc)
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &FuncTable) {
        debug_assert_eq!(self.len(), other.len());
        if c.is_zero() {
            return;
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            if !b.is_zero() {
                *a += &(c * b);
            }
        }
    }

    pub fn scale(&mut self, c: &Scalar) {
        for a in &mut self.values {
            *a = &*a * c;
        }
    }
}

fn check_domains(fams: &[&FuncTable]) -> Result<Option<(Field, usize)>> {
    let Some(first) = fams.first() else {
        return Ok(None);
    };
    for f in fams {
        if f.len() != first.len() {
            return Err(Error::DomainMismatch(first.len(), f.len()));
        }
        if f.field != first.field {
            return Err(Error::FieldMismatch(first.field.to_string(), f.field.to_string()));
        }
    }
    Ok(Some((first.field, first.len())))
}

struct EchelonRow {
    pivot: usize,
    row: Vec<Scalar>,
    /// `row = sum_i combo[i] * original_i`
    combo: Vec<Scalar>,
}

/// Incrementally built row echelon basis that remembers how each of its rows
/// is combined from the inserted vectors.
pub struct EchelonBasis {
    field: Field,
    len: usize,
    inserted: usize,
    rows: Vec<EchelonRow>,
}

impl EchelonBasis {
    pub fn new(field: Field, len: usize) -> EchelonBasis {
        EchelonBasis {
            field,
            len,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot positions in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }

    fn reduce(&self, v: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut row = v.to_vec();
        let mut combo = vec![self.field.zero(); self.inserted];
        for r in &self.rows {
            let c = row[r.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&r.row).skip(r.pivot) {
                if !y.is_zero() {
                    *x -= &(&c * y);
                }
            }
            for (x, y) in combo.iter_mut().zip(&r.combo) {
                if !y.is_zero() {
                    *x -= &(&c * y);
                }
            }
        }
        (row, combo)
    }

    /// Coefficients `c` with `v = sum_i c[i] * inserted_i`, or `None` when `v`
    /// is outside the span.
    pub fn express(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.len, "vector length differs from basis domain");
        let (row, combo) = self.reduce(v);
        if row.iter().all(Scalar::is_zero) {
            // v - sum combo_i orig_i == 0 (combo accumulated with sign flipped)
            Some(combo.into_iter().map(|c| -c).collect())
        } else {
            None
        }
    }

    /// Inserts `v`. Returns `Err(coeffs)` expressing `v` over the previously
    /// inserted vectors when it is dependent; the vector is then not added.
    pub fn insert(&mut self, v: &[Scalar]) -> std::result::Result<(), Vec<Scalar>> {
        assert_eq!(v.len(), self.len, "vector length differs from basis domain");
        let (mut row, mut combo) = self.reduce(v);
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            return Err(combo.into_iter().map(|c| -c).collect());
        };
        let inv = row[pivot].inv().expect("pivot is non-zero");
        for x in row.iter_mut() {
            *x = &*x * &inv;
        }
        combo.push(self.field.one());
        for x in combo.iter_mut() {
            *x = &*x * &inv;
        }
        for r in &mut self.rows {
            r.combo.push(self.field.zero());
        }
        self.inserted += 1;
        self.rows.push(EchelonRow { pivot, row, combo });
        Ok(())
    }
}

/// True iff no non-trivial linear combination of `fams` vanishes.
pub fn independent(fams: &[&FuncTable]) -> Result<bool> {
    let Some((field, len)) = check_domains(fams)? else {
        return Ok(true);
    };
    let mut basis = EchelonBasis::new(field, len);
    for f in fams {
        if basis.insert(f.values()).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First index `m` such that `fams[m]` lies in the span of `fams[..m]`,
/// together with coefficients `c` (length `m`) satisfying
/// `fams[m] = sum_i c[i] fams[i]`.
pub fn first_dependence(fams: &[&FuncTable]) -> Result<Option<(usize, Vec<Scalar>)>> {
    let Some((field, len)) = check_domains(fams)? else {
        return Ok(None);
    };
    let mut basis = EchelonBasis::new(field, len);
    // Basis columns are indexed by insertion order, which differs from the
    // index in `fams` once something is skipped; there is nothing to skip
    // before the first dependence so they coincide.
    for (m, f) in fams.iter().enumerate() {
        if let Err(c) = basis.insert(f.values()) {
            return Ok(Some((m, c)));
        }
    }
    Ok(None)
}

/// Solves `v = sum_i c[i] basis[i]`; `basis` may be dependent, in which case
/// the coefficients of vectors dependent on earlier ones are zero.
pub fn express_in_span(basis: &[&FuncTable], v: &FuncTable) -> Result<Option<Vec<Scalar>>> {
    let mut all: Vec<&FuncTable> = basis.to_vec();
    all.push(v);
    let (field, len) = check_domains(&all)?.expect("non-empty");
    let mut eb = EchelonBasis::new(field, len);
    let mut kept = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        if eb.insert(b.values()).is_ok() {
            kept.push(i);
        }
    }
    Ok(eb.express(v.values()).map(|c| {
        let mut out = vec![field.zero(); basis.len()];
        for (k, ci) in kept.into_iter().zip(c) {
            out[k] = ci;
        }
        out
    }))
}

/// Inverts a square matrix given row-major; `None` if singular.
pub fn invert(field: Field, m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv().ok()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let c = a[r][col].clone();
                let (pivot_row, row) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x -= &(&c * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Dual functions `A_i^*` with `A_i^* . A_j = [i == j]`, all supported inside
/// the common set of `r` pivot positions (returned alongside).
pub fn dual_family_with_support(fams: &[&FuncTable]) -> Result<(Vec<FuncTable>, Vec<usize>)> {
    let Some((field, len)) = check_domains(fams)? else {
        return Ok((Vec::new(), Vec::new()));
    };
    let mut basis = EchelonBasis::new(field, len);
    for f in fams {
        basis.insert(f.values()).map_err(|_| Error::Dependent)?;
    }
    let mut support = basis.pivots();
    support.sort_unstable();
    let r = fams.len();
    // a[j][k] = fams[j](support[k]); duals restricted to the support form the
    // inverse transpose.
    let a: Vec<Vec<Scalar>> = fams
        .iter()
        .map(|f| support.iter().map(|&u| f.values[u].clone()).collect())
        .collect();
    let inv = invert(field, &a).ok_or(Error::Dependent)?;
    let duals = (0..r)
        .map(|i| {
            let mut t = FuncTable::zeros(field, len);
            for (k, &u) in support.iter().enumerate() {
                t.values[u] = inv[k][i].clone();
            }
            t
        })
        .collect();
    Ok((duals, support))
}

pub fn dual_family(fams: &[&FuncTable]) -> Result<Vec<FuncTable>> {
    dual_family_with_support(fams).map(|(d, _)| d)
}

/// A function `u` with `u . fams[i] = 0`, `u . target = 1` and support size at
/// most `fams.len() + 1`.
pub fn annihilator(fams: &[&FuncTable], target: &FuncTable) -> Result<FuncTable> {
    let mut all = fams.to_vec();
    all.push(target);
    let mut duals = dual_family(&all)?;
    Ok(duals.pop().expect("at least the target"))
}
