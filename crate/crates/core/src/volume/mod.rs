//! Dense 3D scalar grids and the operations used on them before any topology
//! is computed: file I/O, resampling, Otsu thresholding and difference norms.

mod io;
mod otsu;
mod resample;

pub use io::{load_volume, save_volume, VolumeFormat};
pub use otsu::{otsu_threshold, OTSU_BINS};
pub use resample::{downsample_trilinear, upsample_repeat, TrilinearMap};

use crate::error::{Error, Result};

/// Grid extents `(n1, n2, n3)`; the last axis varies fastest in memory.
pub type Dims = [usize; 3];

pub(crate) fn voxel_count(dims: Dims) -> usize {
    dims[0] * dims[1] * dims[2]
}

/// A likelihood function sampled on a voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: Dims,
    data: Vec<f64>,
    value_range: Option<(f64, f64)>,
}

impl Volume {
    /// Builds a volume from row-major data (z fastest).
    pub fn new(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "volume extents must be positive, got {dims:?}"
            )));
        }
        let expected = voxel_count(dims);
        if data.len() != expected {
            return Err(Error::size_mismatch(expected, data.len()));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "non-finite value {} at flat index {pos}",
                data[pos]
            )));
        }
        Ok(Self {
            dims,
            data,
            value_range: None,
        })
    }

    pub fn filled(dims: Dims, value: f64) -> Result<Self> {
        Self::new(dims, vec![value; voxel_count(dims)])
    }

    pub fn zeros(dims: Dims) -> Result<Self> {
        Self::filled(dims, 0.0)
    }

    /// Samples `f(i, j, k)` at every voxel.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(voxel_count(dims));
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(dims, data)
    }

    /// Declares the range the values are meant to live in, checking every
    /// voxel against it.
    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi}]")));
        }
        if let Some(v) = self.data.iter().find(|&&v| v < lo || v > hi) {
            return Err(Error::InvalidValue(format!(
                "value {v} outside declared range [{lo}, {hi}]"
            )));
        }
        self.value_range = Some((lo, hi));
        Ok(self)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Declared value range, `[0, 1]` when none was declared.
    pub fn value_range(&self) -> (f64, f64) {
        self.value_range.unwrap_or((0.0, 1.0))
    }

    pub fn declared_range(&self) -> Option<(f64, f64)> {
        self.value_range
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, flat: usize) -> [usize; 3] {
        let k = flat % self.dims[2];
        let rest = flat / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], k]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.index(i, j, k)]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `f` voxelwise. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dims, self.data.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn from_parts_unchecked(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), voxel_count(dims));
        Self {
            dims,
            data,
            value_range: None,
        }
    }

    pub(crate) fn ensure_same_dims(&self, other: &Volume) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::size_mismatch(
                format!("{:?}", self.dims),
                format!("{:?}", other.dims),
            ));
        }
        Ok(())
    }
}

/// A segmentation mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryVolume {
    dims: Dims,
    data: Vec<bool>,
}

impl BinaryVolume {
    pub fn new(dims: Dims, data: Vec<bool>) -> Result<Self> {
        let expected = voxel_count(dims);
        if data.len() != expected {
            return Err(Error::size_mismatch(expected, data.len()));
        }
        Ok(Self { dims, data })
    }

    /// Interprets a volume whose values are exactly 0 or 1 as a mask.
    pub fn from_volume(v: &Volume) -> Result<Self> {
        let data = v
            .data()
            .iter()
            .map(|&x| {
                if x == 1.0 {
                    Ok(true)
                } else if x == 0.0 {
                    Ok(false)
                } else {
                    Err(Error::InvalidValue(format!(
                        "binary volume may only contain 0 and 1, found {x}"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dims: v.dims(), data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(voxel_count(dims));
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.data[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn to_volume(&self) -> Volume {
        Volume::from_parts_unchecked(
            self.dims,
            self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }
}

/// `(Σ|f−g|^p)^(1/p)`, or `max|f−g|` when `p` is infinite.
pub fn p_norm_diff(f: &Volume, g: &Volume, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    f.ensure_same_dims(g)?;
    let diffs = f.data().iter().zip(g.data()).map(|(a, b)| (a - b).abs());
    if p.is_infinite() {
        return Ok(diffs.fold(0.0, f64::max));
    }
    // Scale by the largest entry so high powers of small numbers do not underflow.
    let scale = f
        .data()
        .iter()
        .zip(g.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = diffs.map(|d| (d / scale).powf(p)).sum();
    Ok(scale * sum.powf(1.0 / p))
}
