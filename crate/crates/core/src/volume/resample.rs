use super::{voxel_count, Dims, Volume};
use crate::error::{Error, Result};
use crate::par;

/// Interpolation stencil along one axis: output sample `o` reads
/// `lerp(src[lo], src[lo + 1], t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tap {
    lo: usize,
    t: f64,
}

fn axis_taps(src: usize, out: usize) -> Vec<Tap> {
    // Align-corners: output index o sits at source coordinate o·(src−1)/(out−1).
    (0..out)
        .map(|o| {
            let num = o * (src - 1);
            let den = out - 1;
            let mut lo = num / den;
            let mut t = (num % den) as f64 / den as f64;
            if lo == src - 1 {
                lo = src - 2;
                t = 1.0;
            }
            Tap { lo, t }
        })
        .collect()
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    let v = a + t * (b - a);
    v.clamp(a.min(b), a.max(b))
}

/// The fixed linear map performing trilinear resampling between two grids,
/// kept around so gradients can be pulled back through it.
#[derive(Debug, Clone)]
pub struct TrilinearMap {
    src: Dims,
    out: Dims,
    taps: [Vec<Tap>; 3],
}

impl TrilinearMap {
    pub fn new(src: Dims, out: Dims) -> Result<Self> {
        if let Some(&m) = out.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidParameter(format!(
                "output side length must be at least 2, got {m}"
            )));
        }
        if let Some(&n) = src.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParameter(format!(
                "trilinear resampling needs every input extent >= 2, got {n}"
            )));
        }
        let taps = [
            axis_taps(src[0], out[0]),
            axis_taps(src[1], out[1]),
            axis_taps(src[2], out[2]),
        ];
        Ok(Self { src, out, taps })
    }

    pub fn source_dims(&self) -> Dims {
        self.src
    }

    pub fn output_dims(&self) -> Dims {
        self.out
    }

    pub fn apply(&self, v: &Volume) -> Result<Volume> {
        if v.dims() != self.src {
            return Err(Error::size_mismatch(
                format!("{:?}", self.src),
                format!("{:?}", v.dims()),
            ));
        }
        let [_, s1, s2] = self.src;
        let [_, o1, o2] = self.out;
        let data = v.data();
        let at = |i: usize, j: usize, k: usize| data[(i * s1 + j) * s2 + k];
        let slabs = par::map_range(self.out[0], |a| {
            let ta = self.taps[0][a];
            let mut slab = Vec::with_capacity(o1 * o2);
            for tb in &self.taps[1] {
                for tc in &self.taps[2] {
                    let plane = |i: usize| {
                        let row = |j: usize| lerp(at(i, j, tc.lo), at(i, j, tc.lo + 1), tc.t);
                        lerp(row(tb.lo), row(tb.lo + 1), tb.t)
                    };
                    slab.push(lerp(plane(ta.lo), plane(ta.lo + 1), ta.t));
                }
            }
            slab
        });
        Ok(Volume::from_parts_unchecked(self.out, slabs.concat()))
    }

    /// Pulls a gradient on the output grid back to the source grid
    /// (multiplication by the transposed weight matrix).
    pub fn transpose(&self, grad: &[f64]) -> Result<Vec<f64>> {
        if grad.len() != voxel_count(self.out) {
            return Err(Error::size_mismatch(voxel_count(self.out), grad.len()));
        }
        let [_, s1, s2] = self.src;
        let [_, o1, o2] = self.out;
        let mut back = vec![0.0; voxel_count(self.src)];
        for (a, ta) in self.taps[0].iter().enumerate() {
            for (b, tb) in self.taps[1].iter().enumerate() {
                for (c, tc) in self.taps[2].iter().enumerate() {
                    let g = grad[(a * o1 + b) * o2 + c];
                    if g == 0.0 {
                        continue;
                    }
                    for (di, wi) in [(0, 1.0 - ta.t), (1, ta.t)] {
                        for (dj, wj) in [(0, 1.0 - tb.t), (1, tb.t)] {
                            for (dk, wk) in [(0, 1.0 - tc.t), (1, tc.t)] {
                                let w = wi * wj * wk;
                                if w != 0.0 {
                                    let idx = ((ta.lo + di) * s1 + tb.lo + dj) * s2 + tc.lo + dk;
                                    back[idx] += w * g;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(back)
    }
}

/// Resamples `v` onto an `m × m × m` grid with trilinear interpolation
/// (align-corners convention).
pub fn downsample_trilinear(v: &Volume, m: usize) -> Result<Volume> {
    TrilinearMap::new(v.dims(), [m, m, m])?.apply(v)
}

/// Replicates each voxel into an `a × a × a` block.
pub fn upsample_repeat(v: &Volume, a: usize) -> Result<Volume> {
    if a == 0 {
        return Err(Error::InvalidParameter("repeat factor must be >= 1".into()));
    }
    let [n1, n2, n3] = v.dims();
    let out = [n1 * a, n2 * a, n3 * a];
    Volume::from_fn(out, |i, j, k| v.get(i / a, j / a, k / a))
}
