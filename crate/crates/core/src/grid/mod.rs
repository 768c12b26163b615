//! n-D grid containers (2 or 3 axes, row-major, last axis fastest) and the
//! differential, morphological and distance operators built on them.

pub(crate) mod components;
mod diff;
pub(crate) mod edt;
mod median;
pub(crate) mod morph;
mod skeleton;

pub use components::{connected_components, Connectivity};
pub use diff::{divergence, gradient, inner, operator_norm_sq};
pub use edt::distance_map;
pub use median::median_subtract;
pub use morph::{ball_offsets, morph, MorphOp};
pub use skeleton::skeletonize;

use crate::error::{Error, Result};

/// Extent and physical spacing of a 2D or 3D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    dims: Vec<usize>,
    spacing: Vec<f64>,
}

impl Shape {
    /// Unit-spacing shape.
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::with_spacing(dims, &vec![1.0; dims.len()])
    }

    pub fn with_spacing(dims: &[usize], spacing: &[f64]) -> Result<Self> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(Error::invalid(format!(
                "grids must have 2 or 3 axes, got {}",
                dims.len()
            )));
        }
        if spacing.len() != dims.len() {
            return Err(Error::invalid("spacing arity differs from dims"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::invalid("grid extents must be positive"));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid("spacing components must be strictly positive"));
        }
        Ok(Self {
            dims: dims.to_vec(),
            spacing: spacing.to_vec(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.ndim()];
        for a in (0..self.ndim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.ndim());
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c)
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            out[a] = index % self.dims[a];
            index /= self.dims[a];
        }
        out
    }

    /// Linear index of a signed coordinate, or `None` when it falls outside the grid.
    pub fn checked_index(&self, coords: &[isize]) -> Option<usize> {
        let mut idx = 0usize;
        for (&c, &d) in coords.iter().zip(&self.dims) {
            if c < 0 || c as usize >= d {
                return None;
            }
            idx = idx * d + c as usize;
        }
        Some(idx)
    }

    pub fn same_dims(&self, other: &Shape) -> bool {
        self.dims == other.dims
    }

    pub(crate) fn ensure_same_dims(&self, other: &Shape) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimsMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            })
        }
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Real-valued field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    shape: Shape,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(shape: Shape) -> Self {
        Self::filled(shape, 0.0)
    }

    pub fn filled(shape: Shape, value: f64) -> Self {
        let values = vec![value; shape.len()];
        Self { shape, values }
    }

    pub fn from_vec(shape: Shape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} cells",
                values.len(),
                shape.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let values = (0..shape.len()).map(|i| f(&shape.coords(i))).collect();
        Self { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        self.values[self.shape.index(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: f64) {
        let i = self.shape.index(coords);
        self.values[i] = value;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Min-max rescale to [0, 1]; a constant field maps to zeros.
    pub fn normalized(&self) -> Self {
        let (lo, hi) = (self.min(), self.max());
        if !(hi > lo) {
            return Self::zeros(self.shape.clone());
        }
        self.map(|v| (v - lo) / (hi - lo))
    }

    /// Cells with value `>= level`.
    pub fn threshold(&self, level: f64) -> BinaryMask {
        BinaryMask {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| v >= level).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute cell-wise difference.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Boolean field on a grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    shape: Shape,
    values: Vec<bool>,
}

impl Eq for Shape {}

impl BinaryMask {
    pub fn empty(shape: Shape) -> Self {
        let values = vec![false; shape.len()];
        Self { shape, values }
    }

    pub fn full(shape: Shape) -> Self {
        let values = vec![true; shape.len()];
        Self { shape, values }
    }

    pub fn from_vec(shape: Shape, values: Vec<bool>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} cells",
                values.len(),
                shape.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> bool) -> Self {
        let values = (0..shape.len()).map(|i| f(&shape.coords(i))).collect();
        Self { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [bool] {
        &mut self.values
    }

    pub fn get(&self, coords: &[usize]) -> bool {
        self.values[self.shape.index(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: bool) {
        let i = self.shape.index(coords);
        self.values[i] = value;
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.values.iter().any(|&v| v)
    }

    /// Indices of foreground cells in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| v.then_some(i))
    }

    pub fn complement(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| !v).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        debug_assert!(self.shape.same_dims(&other.shape));
        Self {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    /// Cells in `self` but not in `other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| !(a && b))
    }

    /// {0, 1}-valued field.
    pub fn to_field(&self) -> ScalarField {
        ScalarField {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// One n-vector per cell, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    shape: Shape,
    values: Vec<f64>,
}

impl VectorField {
    pub fn zeros(shape: Shape) -> Self {
        let values = vec![0.0; shape.len() * shape.ndim()];
        Self { shape, values }
    }

    /// Builds a field from one slice per axis.
    pub fn from_components(shape: Shape, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != shape.ndim() || components.iter().any(|c| c.len() != shape.len()) {
            return Err(Error::invalid("vector field components do not match the grid"));
        }
        Ok(Self {
            shape,
            values: components.concat(),
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.ndim()
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        let n = self.shape.len();
        &self.values[axis * n..(axis + 1) * n]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut [f64] {
        let n = self.shape.len();
        &mut self.values[axis * n..(axis + 1) * n]
    }

    /// The vector at linear cell index `cell`.
    pub fn at(&self, cell: usize) -> Vec<f64> {
        (0..self.ndim()).map(|a| self.component(a)[cell]).collect()
    }

    pub fn set_at(&mut self, cell: usize, vector: &[f64]) {
        for (a, &x) in vector.iter().enumerate() {
            self.component_mut(a)[cell] = x;
        }
    }

    /// All components, component-major.
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Connected-component labels: 0 is background, components are 1..=K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelField {
    shape: Shape,
    labels: Vec<u32>,
    count: u32,
}

impl LabelField {
    pub(crate) fn new(shape: Shape, labels: Vec<u32>, count: u32) -> Self {
        Self {
            shape,
            labels,
            count,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Number of positive labels, K.
    pub fn count(&self) -> usize {
        self.count as usize
    }

    /// Cell count for each label; index 0 is the background.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count as usize + 1];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    pub fn mask_of(&self, label: u32) -> BinaryMask {
        BinaryMask {
            shape: self.shape.clone(),
            values: self.labels.iter().map(|&l| l == label).collect(),
        }
    }
}

/// Neighbour offsets of the unit cube around a cell, excluding the centre.
pub(crate) fn neighbour_offsets(ndim: usize, connectivity: Connectivity) -> Vec<Vec<isize>> {
    let mut out = Vec::new();
    let total = 3usize.pow(ndim as u32);
    for k in 0..total {
        let mut off = Vec::with_capacity(ndim);
        let mut r = k;
        for _ in 0..ndim {
            off.push((r % 3) as isize - 1);
            r /= 3;
        }
        off.reverse();
        let nonzero = off.iter().filter(|&&o| o != 0).count();
        let keep = match connectivity {
            Connectivity::Face => nonzero == 1,
            Connectivity::Full => nonzero >= 1,
        };
        if keep {
            out.push(off);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rejects_bad_arity_and_spacing() {
        assert!(Shape::new(&[4]).is_err());
        assert!(Shape::new(&[2, 2, 2, 2]).is_err());
        assert!(Shape::with_spacing(&[4, 4], &[1.0, 0.0]).is_err());
        assert!(Shape::with_spacing(&[4, 4], &[1.0, -2.0]).is_err());
        assert!(Shape::new(&[0, 4]).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let s = Shape::new(&[3, 4, 5]).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.index(&s.coords(i)), i);
        }
        assert_eq!(s.strides(), vec![20, 5, 1]);
        assert_eq!(s.checked_index(&[-1, 0, 0]), None);
        assert_eq!(s.checked_index(&[2, 3, 4]), Some(59));
    }

    #[test]
    fn field_length_checked() {
        let s = Shape::new(&[2, 2]).unwrap();
        assert!(ScalarField::from_vec(s.clone(), vec![0.0; 3]).is_err());
        assert!(BinaryMask::from_vec(s, vec![true; 5]).is_err());
    }

    #[test]
    fn neighbourhood_sizes() {
        assert_eq!(neighbour_offsets(2, Connectivity::Face).len(), 4);
        assert_eq!(neighbour_offsets(2, Connectivity::Full).len(), 8);
        assert_eq!(neighbour_offsets(3, Connectivity::Face).len(), 6);
        assert_eq!(neighbour_offsets(3, Connectivity::Full).len(), 26);
    }
}
