//! Dense tensors over an explicit set of coordinates.
//!
//! A tensor on axes `J ⊆ [d]` stores one value per point of `∏_{j∈J} [n_j]`,
//! flattened row-major with the smallest coordinate varying slowest.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactlin::{Field, FuncTable, Scalar};
use crate::partitions::{Partition, Subset, MAX_ORDER};

/// Default cap on the number of entries of any single tensor.
pub const DEFAULT_ENTRY_LIMIT: usize = 1 << 24;

/// Extents of a tensor, one per axis. The axis set may be empty (a scalar).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    axes: Subset,
    dims: Vec<usize>,
}

impl Shape {
    /// Shape on axes `0..dims.len()`.
    pub fn new(dims: &[usize]) -> Result<Shape> {
        if dims.is_empty() || dims.len() > MAX_ORDER {
            return Err(Error::InvalidShape(format!("order {} unsupported", dims.len())));
        }
        Shape::on(Subset::full(dims.len()), dims.to_vec())
    }

    /// Shape on an explicit axis set; `dims` is aligned with the axes in increasing order.
    pub fn on(axes: Subset, dims: Vec<usize>) -> Result<Shape> {
        Shape::on_with_limit(axes, dims, DEFAULT_ENTRY_LIMIT)
    }

    pub fn on_with_limit(axes: Subset, dims: Vec<usize>, limit: usize) -> Result<Shape> {
        if axes.len() != dims.len() {
            return Err(Error::InvalidShape(format!(
                "{} extents for {} axes",
                dims.len(),
                axes.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape("extents must be at least 1".into()));
        }
        let entries = dims.iter().fold(1u128, |a, &n| a.saturating_mul(n as u128));
        if entries > limit as u128 {
            return Err(Error::EntryLimit { entries, limit });
        }
        Ok(Shape { axes, dims })
    }

    /// Shape `[n]^axes`.
    pub fn uniform(axes: Subset, n: usize) -> Result<Shape> {
        Shape::on(axes, vec![n; axes.len()])
    }

    pub fn axes(&self) -> Subset {
        self.axes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Extent of coordinate `j`.
    pub fn dim(&self, j: usize) -> Option<usize> {
        self.axes.position(j).map(|k| self.dims[k])
    }

    /// Restriction to a subset of the axes.
    pub fn restrict(&self, sub: Subset) -> Result<Shape> {
        if !sub.is_subset_of(self.axes) {
            return Err(Error::ShapeMismatch(format!("{sub} is not within {}", self.axes)));
        }
        Ok(Shape {
            axes: sub,
            dims: sub.iter().map(|j| self.dim(j).unwrap()).collect(),
        })
    }

    /// Union of two shapes that agree on shared axes.
    pub fn merge(&self, other: &Shape) -> Result<Shape> {
        for j in self.axes.intersection(other.axes).iter() {
            if self.dim(j) != other.dim(j) {
                return Err(Error::ShapeMismatch(format!(
                    "coordinate {} has extents {} and {}",
                    j + 1,
                    self.dim(j).unwrap(),
                    other.dim(j).unwrap()
                )));
            }
        }
        let axes = self.axes.union(other.axes);
        let dims = axes
            .iter()
            .map(|j| self.dim(j).or_else(|| other.dim(j)).unwrap())
            .collect();
        Shape::on(axes, dims)
    }

    /// Linear index of the point whose coordinate `j` is `coords[j]`.
    pub fn linear(&self, coords: &[usize]) -> usize {
        let mut lin = 0;
        for (k, j) in self.axes.iter().enumerate() {
            lin = lin * self.dims[k] + coords[j];
        }
        lin
    }

    /// Writes the point with linear index `lin` into `coords` (indexed by coordinate).
    pub fn unravel_into(&self, mut lin: usize, coords: &mut [usize]) {
        let axes: Vec<usize> = self.axes.to_vec();
        for k in (0..axes.len()).rev() {
            coords[axes[k]] = lin % self.dims[k];
            lin /= self.dims[k];
        }
    }

    /// Multi-index aligned with the axes.
    pub fn unravel(&self, lin: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        let mut lin = lin;
        for k in (0..self.dims.len()).rev() {
            out[k] = lin % self.dims[k];
            lin /= self.dims[k];
        }
        out
    }

    /// Linear index from a multi-index aligned with the axes.
    pub fn ravel(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.dims.len() {
            return Err(Error::OutOfBounds(format!("{} indices for order {}", idx.len(), self.order())));
        }
        let mut lin = 0;
        for (k, (&i, &n)) in idx.iter().zip(&self.dims).enumerate() {
            if i >= n {
                return Err(Error::OutOfBounds(format!("index {i} on axis {k} with extent {n}")));
            }
            lin = lin * n + i;
        }
        Ok(lin)
    }

    fn coordinate_buffer(&self) -> Vec<usize> {
        vec![0; MAX_ORDER]
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.axes, self.dims)
    }
}

/// A dense tensor with exact entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    shape: Shape,
    table: FuncTable,
}

impl Tensor {
    pub fn new(shape: Shape, table: FuncTable) -> Result<Tensor> {
        if table.len() != shape.size() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a shape of size {}",
                table.len(),
                shape.size()
            )));
        }
        Ok(Tensor { shape, table })
    }

    pub fn zeros(shape: Shape, field: Field) -> Tensor {
        let table = FuncTable::zeros(field, shape.size());
        Tensor { shape, table }
    }

    pub fn ones(shape: Shape, field: Field) -> Tensor {
        Tensor::from_fn(shape, field, |_| field.one())
    }

    /// The scalar `c` as an order-0 tensor.
    pub fn scalar(c: Scalar) -> Tensor {
        let field = c.field();
        Tensor {
            shape: Shape { axes: Subset::EMPTY, dims: Vec::new() },
            table: FuncTable::raw(field, vec![c]),
        }
    }

    /// Builds a tensor from a function of the coordinate array (indexed by coordinate).
    pub fn from_fn(shape: Shape, field: Field, mut f: impl FnMut(&[usize]) -> Scalar) -> Tensor {
        let mut coords = shape.coordinate_buffer();
        let values = (0..shape.size())
            .map(|lin| {
                shape.unravel_into(lin, &mut coords);
                f(&coords)
            })
            .collect();
        Tensor {
            table: FuncTable::raw(field, values),
            shape,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn axes(&self) -> Subset {
        self.shape.axes
    }

    pub fn field(&self) -> Field {
        self.table.field()
    }

    pub fn table(&self) -> &FuncTable {
        &self.table
    }

    pub fn into_table(self) -> FuncTable {
        self.table
    }

    pub fn values(&self) -> &[Scalar] {
        self.table.values()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }

    /// Entry at a multi-index aligned with the axes.
    pub fn get(&self, idx: &[usize]) -> Result<&Scalar> {
        Ok(&self.table.values()[self.shape.ravel(idx)?])
    }

    /// Entry at a coordinate array indexed by coordinate.
    pub fn at(&self, coords: &[usize]) -> &Scalar {
        &self.table.values()[self.shape.linear(coords)]
    }

    fn same_shape(&self, other: &Tensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().to_string(), other.field().to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        let mut out = self.clone();
        out.add_scaled(&self.field().one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        let mut out = self.clone();
        out.add_scaled(&-self.field().one(), other)?;
        Ok(out)
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &Tensor) -> Result<()> {
        self.same_shape(other)?;
        self.table.add_scaled(c, &other.table);
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut out = self.clone();
        out.table.scale(c);
        out
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        Ok(Tensor {
            shape: self.shape.clone(),
            table: FuncTable::raw(self.field(), values),
        })
    }

    /// Outer product of tensors on disjoint axes.
    pub fn outer(&self, other: &Tensor) -> Result<Tensor> {
        if self.axes().intersects(other.axes()) {
            return Err(Error::ShapeMismatch(format!(
                "outer product of overlapping axes {} and {}",
                self.axes(),
                other.axes()
            )));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().to_string(), other.field().to_string()));
        }
        let shape = self.shape.merge(&other.shape)?;
        Ok(Tensor::from_fn(shape, self.field(), |c| self.at(c) * other.at(c)))
    }

    /// Contraction over the shared axes; the result lives on the symmetric difference.
    pub fn contract(&self, other: &Tensor) -> Result<Tensor> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().to_string(), other.field().to_string()));
        }
        let union = self.shape.merge(&other.shape)?;
        let shared = union.restrict(self.axes().intersection(other.axes()))?;
        let out_axes = self.axes().union(other.axes()).difference(shared.axes);
        let out_shape = union.restrict(out_axes)?;
        let field = self.field();
        let mut coords = union.coordinate_buffer();
        let mut values = Vec::with_capacity(out_shape.size());
        for lin in 0..out_shape.size() {
            out_shape.unravel_into(lin, &mut coords);
            let mut acc = field.zero();
            for s in 0..shared.size() {
                shared.unravel_into(s, &mut coords);
                let a = self.at(&coords);
                if a.is_zero() {
                    continue;
                }
                acc += &(a * other.at(&coords));
            }
            values.push(acc);
        }
        Ok(Tensor {
            shape: out_shape,
            table: FuncTable::raw(field, values),
        })
    }

    /// The slice keeping the axes `keep`, with the other axes fixed to `fixed`
    /// (aligned with `axes \ keep` in increasing order).
    pub fn slice(&self, keep: Subset, fixed: &[usize]) -> Result<Tensor> {
        let rest = self.shape.restrict(self.axes().difference(keep))?;
        let out_shape = self.shape.restrict(keep)?;
        let lin = rest.ravel(fixed)?;
        let mut coords = self.shape.coordinate_buffer();
        rest.unravel_into(lin, &mut coords);
        self.slice_at(&out_shape, &mut coords)
    }

    /// Slice keeping `keep`, with the other coordinates read from a coordinate array.
    pub fn slice_coords(&self, keep: Subset, coords: &[usize]) -> Result<Tensor> {
        let out_shape = self.shape.restrict(keep)?;
        let mut buf = coords.to_vec();
        buf.resize(MAX_ORDER, 0);
        self.slice_at(&out_shape, &mut buf)
    }

    fn slice_at(&self, out_shape: &Shape, coords: &mut [usize]) -> Result<Tensor> {
        let values = (0..out_shape.size())
            .map(|lin| {
                out_shape.unravel_into(lin, coords);
                self.at(coords).clone()
            })
            .collect();
        Ok(Tensor {
            shape: out_shape.clone(),
            table: FuncTable::raw(self.field(), values),
        })
    }

    /// Moves the tensor onto another axis set of the same size, preserving order.
    pub fn relabel(&self, axes: Subset) -> Result<Tensor> {
        if axes.len() != self.axes().len() {
            return Err(Error::ShapeMismatch("relabel changes the order".into()));
        }
        Ok(Tensor {
            shape: Shape::on(axes, self.shape.dims.clone())?,
            table: self.table.clone(),
        })
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values().iter().map(|v| v.to_string()).collect();
        write!(f, "Tensor({:?}, [{}])", self.shape, vals.join(","))
    }
}

/// `Δ_J` on `[n]^J`: 1 on constant tuples, 0 elsewhere.
pub fn delta_subset(j: Subset, n: usize, field: Field) -> Result<Tensor> {
    if n < 1 {
        return Err(Error::InvalidShape("n must be at least 1".into()));
    }
    if j.is_empty() {
        return Err(Error::InvalidSubset("Δ needs a non-empty subset".into()));
    }
    let shape = Shape::uniform(j, n)?;
    let first = j.iter().next().unwrap();
    Ok(Tensor::from_fn(shape, field, |c| {
        let v = c[first];
        if j.iter().all(|k| c[k] == v) {
            field.one()
        } else {
            field.zero()
        }
    }))
}

/// `Δ_P = ∏_{J∈P} Δ_J`.
pub fn delta_partition(p: &Partition, n: usize, field: Field) -> Result<Tensor> {
    if n < 1 {
        return Err(Error::InvalidShape("n must be at least 1".into()));
    }
    let shape = Shape::uniform(p.ground(), n)?;
    Ok(Tensor::from_fn(shape, field, |c| {
        let ok = p.parts().iter().all(|part| {
            let first = part.iter().next().unwrap();
            part.iter().all(|k| c[k] == c[first])
        });
        if ok {
            field.one()
        } else {
            field.zero()
        }
    }))
}
