//! Seeded synthetic volumes for tests, benchmarks and the interpolation study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::volume::{voxel_count, Dims, Volume};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform values in `[0, 1)`.
pub fn uniform_noise(dims: Dims, seed: u64) -> Volume {
    let mut r = rng(seed);
    let data = (0..voxel_count(dims)).map(|_| r.gen::<f64>()).collect();
    Volume::new(dims, data).expect("finite by construction")
}

/// A random permutation of the evenly spaced levels `i / n`, plus uniform
/// jitter in `[0, jitter]`. Neighbouring levels stay `1/n − jitter` apart.
pub fn jittered_levels(dims: Dims, jitter: f64, seed: u64) -> Volume {
    let mut r = rng(seed);
    let n = voxel_count(dims);
    let mut levels: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    for i in (1..n).rev() {
        levels.swap(i, r.gen_range(0..=i));
    }
    for x in &mut levels {
        *x += r.gen_range(0.0..=jitter);
    }
    Volume::new(dims, levels).expect("finite by construction")
}

/// Adds uniform noise in `[0, amount]` to every voxel.
pub fn jitter(v: &Volume, amount: f64, seed: u64) -> Volume {
    let mut r = rng(seed);
    let data = v.data().iter().map(|&x| x + r.gen_range(0.0..=amount)).collect();
    Volume::new(v.dims(), data).expect("finite by construction")
}

/// Soft union of `count` Gaussian bumps on a `side³` grid, values in `[0, 1)`.
pub fn smooth_blobs(side: usize, count: usize, seed: u64) -> Volume {
    let mut r = rng(seed);
    let s = side as f64;
    let bumps: Vec<([f64; 3], f64, f64)> = (0..count)
        .map(|_| {
            let center = [
                r.gen_range(0.25..0.75) * s,
                r.gen_range(0.25..0.75) * s,
                r.gen_range(0.25..0.75) * s,
            ];
            let sigma = r.gen_range(0.08..0.16) * s;
            let amplitude = r.gen_range(0.6..0.95);
            (center, sigma, amplitude)
        })
        .collect();
    Volume::from_fn([side, side, side], |i, j, k| {
        let p = [i as f64, j as f64, k as f64];
        let outside: f64 = bumps
            .iter()
            .map(|(c, sigma, amp)| {
                let d2: f64 = (0..3).map(|a| (p[a] - c[a]).powi(2)).sum();
                1.0 - amp * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .product();
        1.0 - outside
    })
    .expect("finite by construction")
}
