//! Shape errors between a thresholded prediction and a binary ground truth:
//! IoU error and relative volume, surface-area and surface-roughness errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::volume::{otsu_threshold, voxel_count, BinaryVolume, Dims, Volume};

/// Parameters of the smoothing step behind the roughness measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    /// Gaussian standard deviation in voxels.
    pub sigma: f64,
    /// Kernel half-width in multiples of `sigma`.
    pub truncate: f64,
    /// The smoothed mask is re-binarised with `value >= threshold`.
    pub threshold: f64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            truncate: 4.0,
            threshold: 0.5,
        }
    }
}

impl SmoothingParams {
    /// Rejects non-finite or out-of-range parameters.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) || !(self.truncate >= 0.0 && self.truncate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and truncate non-negative, got {} and {}",
                self.sigma, self.truncate
            )));
        }
        Ok(())
    }
}

/// Raw measurements of one binary shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCounts {
    pub volume: usize,
    pub surface: usize,
    pub roughness: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub iou_error: f64,
    pub volume_error: f64,
    pub surface_area_error: f64,
    pub roughness_error: f64,
    /// Otsu threshold applied to the prediction.
    pub threshold: f64,
    pub pred: ShapeCounts,
    pub truth: ShapeCounts,
}

/// Thresholds `pred` with Otsu's method and compares it to `truth`.
pub fn evaluate_pair(pred: &Volume, truth: &BinaryVolume) -> Result<MetricsReport> {
    evaluate_pair_with(pred, truth, &SmoothingParams::default())
}

pub fn evaluate_pair_with(pred: &Volume, truth: &BinaryVolume, params: &SmoothingParams) -> Result<MetricsReport> {
    if pred.dims() != truth.dims() {
        return Err(Error::SizeMismatch {
            expected: format!("{:?}", truth.dims()),
            found: format!("{:?}", pred.dims()),
        });
    }
    if truth.count() == 0 {
        return Err(Error::DegenerateInput("ground-truth mask is empty".into()));
    }
    let (threshold, mask) = otsu_threshold(pred)?;
    let mut report = evaluate_masks(&mask, truth, params)?;
    report.threshold = threshold;
    Ok(report)
}

/// Compares two masks directly. The reported threshold is NaN.
pub fn evaluate_masks(pred: &BinaryVolume, truth: &BinaryVolume, params: &SmoothingParams) -> Result<MetricsReport> {
    params.validate()?;
    if pred.dims() != truth.dims() {
        return Err(Error::SizeMismatch {
            expected: format!("{:?}", truth.dims()),
            found: format!("{:?}", pred.dims()),
        });
    }
    if truth.count() == 0 {
        return Err(Error::DegenerateInput("ground-truth mask is empty".into()));
    }
    let (p, t) = par::join(|| measure(pred, params), || measure(truth, params));
    let (mut inter, mut union) = (0usize, 0usize);
    for (&a, &b) in pred.data().iter().zip(truth.data()) {
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    // Shapes with no roughness at all would otherwise divide by zero.
    let rel = |pq: usize, tq: usize| pq.abs_diff(tq) as f64 / tq.max(1) as f64;
    Ok(MetricsReport {
        iou_error: 1.0 - inter as f64 / union as f64,
        volume_error: rel(p.volume, t.volume),
        surface_area_error: rel(p.surface, t.surface),
        roughness_error: rel(p.roughness, t.roughness),
        threshold: f64::NAN,
        pred: p,
        truth: t,
    })
}

/// Evaluates many pairs in parallel, in input order.
pub fn evaluate_batch(pairs: &[(Volume, BinaryVolume)], params: &SmoothingParams) -> Vec<Result<MetricsReport>> {
    par::map(pairs, |(p, t)| evaluate_pair_with(p, t, params))
}

pub fn measure(x: &BinaryVolume, params: &SmoothingParams) -> ShapeCounts {
    let surface = surface_voxels(x);
    ShapeCounts {
        volume: x.count(),
        surface,
        roughness: surface.abs_diff(surface_voxels(&smooth(x, params))),
    }
}

/// Foreground voxels with at least one background face neighbour; the
/// outside of the grid counts as background.
pub fn surface_voxels(x: &BinaryVolume) -> usize {
    let [n1, n2, n3] = x.dims();
    let mut count = 0;
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                if !x.get(i, j, k) {
                    continue;
                }
                let interior = i > 0
                    && i + 1 < n1
                    && j > 0
                    && j + 1 < n2
                    && k > 0
                    && k + 1 < n3
                    && x.get(i - 1, j, k)
                    && x.get(i + 1, j, k)
                    && x.get(i, j - 1, k)
                    && x.get(i, j + 1, k)
                    && x.get(i, j, k - 1)
                    && x.get(i, j, k + 1);
                count += !interior as usize;
            }
        }
    }
    count
}

fn gaussian_kernel(sigma: f64, truncate: f64) -> Vec<f64> {
    let radius = (truncate * sigma + 0.5) as usize;
    let raw: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let x = i as f64 - radius as f64;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Separable Gaussian blur with zero padding.
pub fn gaussian_blur(data: &[f64], dims: Dims, sigma: f64, truncate: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma, truncate);
    let radius = kernel.len() / 2;
    let strides = [dims[1] * dims[2], dims[2], 1];
    let mut cur = data.to_vec();
    for axis in 0..3 {
        let (n, stride) = (dims[axis], strides[axis]);
        let src = cur;
        cur = (0..voxel_count(dims))
            .map(|flat| {
                let pos = (flat / stride) % n;
                let mut acc = 0.0;
                for (t, &w) in kernel.iter().enumerate() {
                    let q = pos as isize + t as isize - radius as isize;
                    if q >= 0 && (q as usize) < n {
                        acc += w * src[flat - pos * stride + q as usize * stride];
                    }
                }
                acc
            })
            .collect();
    }
    cur
}

pub fn smooth(x: &BinaryVolume, params: &SmoothingParams) -> BinaryVolume {
    let data: Vec<f64> = x.data().iter().map(|&b| b as u8 as f64).collect();
    let blurred = gaussian_blur(&data, x.dims(), params.sigma, params.truncate);
    BinaryVolume::new(x.dims(), blurred.iter().map(|&v| v >= params.threshold).collect()).expect("same dims")
}
