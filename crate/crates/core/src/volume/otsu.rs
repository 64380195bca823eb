use super::{BinaryVolume, Volume};
use crate::error::{Error, Result};

/// Histogram resolution used for Otsu's method.
pub const OTSU_BINS: usize = 256;

pub(crate) fn bin_of(x: f64, lo: f64, width: f64) -> usize {
    (((x - lo) / width) as usize).min(OTSU_BINS - 1)
}

/// Otsu's threshold over a histogram spanning `[min(v), max(v)]`.
///
/// The split after bin `k` maximising the between-class variance gives the
/// threshold `min + (k + 1)·width`; the first maximiser wins ties. The mask
/// marks voxels with `v >= threshold`.
pub fn otsu_threshold(v: &Volume) -> Result<(f64, BinaryVolume)> {
    let (lo, hi) = (v.min(), v.max());
    if !(hi > lo) {
        return Err(Error::DegenerateInput(
            "Otsu thresholding needs at least two distinct values".into(),
        ));
    }
    let width = (hi - lo) / OTSU_BINS as f64;
    let mut hist = [0u64; OTSU_BINS];
    for &x in v.data() {
        hist[bin_of(x, lo, width)] += 1;
    }

    let total = v.len() as f64;
    let center = |b: usize| lo + (b as f64 + 0.5) * width;
    let sum_all: f64 = hist.iter().enumerate().map(|(b, &c)| c as f64 * center(b)).sum();

    let mut best: Option<(usize, f64)> = None;
    let (mut count_below, mut sum_below) = (0.0, 0.0);
    for (k, &c) in hist.iter().enumerate().take(OTSU_BINS - 1) {
        count_below += c as f64;
        sum_below += c as f64 * center(k);
        let count_above = total - count_below;
        if count_below == 0.0 || count_above == 0.0 {
            continue;
        }
        let mean_below = sum_below / count_below;
        let mean_above = (sum_all - sum_below) / count_above;
        let (w0, w1) = (count_below / total, count_above / total);
        let between = w0 * w1 * (mean_below - mean_above).powi(2);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((k, between));
        }
    }
    let (k, _) = best.expect("two distinct values always admit a split");
    let threshold = lo + (k + 1) as f64 * width;
    let mask = BinaryVolume::new(v.dims(), v.data().iter().map(|&x| x >= threshold).collect())?;
    Ok((threshold, mask))
}
