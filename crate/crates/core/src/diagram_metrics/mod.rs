//! Distances and summaries of persistence diagrams.
//!
//! Diagrams are compared under the ℓ∞ ground metric on the plane, with every
//! point also allowed to go to its projection onto the diagonal, at cost half
//! its persistence.

mod assignment;
mod bottleneck;
mod wasserstein;

pub use bottleneck::bottleneck;
pub use wasserstein::wasserstein;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

/// An optimal coupling between two diagrams.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    /// `(index in left, index in right)` pairs matched to each other.
    pub pairs_direct: Vec<(usize, usize)>,
    /// Left points sent to the diagonal.
    pub to_diagonal_left: Vec<usize>,
    /// Right points sent to the diagonal.
    pub to_diagonal_right: Vec<usize>,
    /// `Σ cost^p` over the coupling, before the outer root.
    pub total_cost: f64,
}

impl Matching {
    /// Recomputes `Σ cost^p` of this coupling.
    pub fn cost(&self, left: &[(f64, f64)], right: &[(f64, f64)], p: f64) -> f64 {
        let direct: f64 = self
            .pairs_direct
            .iter()
            .map(|&(i, j)| pow(linf(left[i], right[j]), p))
            .sum();
        let left_diag: f64 = self
            .to_diagonal_left
            .iter()
            .map(|&i| pow(to_diagonal(left[i]), p))
            .sum();
        let right_diag: f64 = self
            .to_diagonal_right
            .iter()
            .map(|&j| pow(to_diagonal(right[j]), p))
            .sum();
        direct + left_diag + right_diag
    }
}

/// ℓ∞ distance between two diagram points.
pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// ℓ∞ distance from a point to its diagonal projection `((b+d)/2, (b+d)/2)`.
pub fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.0 - a.1).abs() / 2.0
}

/// Degree-`p` total persistence `Σ |birth − death|^p` (no outer root).
pub fn total_persistence(d: &PersistenceDiagram, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(d.pairs.iter().map(|x| pow(x.persistence(), p)).sum())
}

/// Every `(i, j)` with `linf(left[i], right[j]) < max(reach_left[i], reach_right[j])`,
/// each exactly once. Found by scanning windows of the other diagram sorted by
/// birth, so points close to the diagonal only look at their immediate
/// neighbourhood.
pub(crate) fn candidate_pairs(
    left: &[(f64, f64)],
    right: &[(f64, f64)],
    reach_left: &[f64],
    reach_right: &[f64],
) -> Vec<(usize, usize)> {
    fn scan(from: &[(f64, f64)], reach: &[f64], to: &[(f64, f64)], mut emit: impl FnMut(usize, usize, f64)) {
        let mut order: Vec<usize> = (0..to.len()).collect();
        order.sort_by(|&a, &b| to[a].0.total_cmp(&to[b].0));
        let births: Vec<f64> = order.iter().map(|&j| to[j].0).collect();
        for (i, &x) in from.iter().enumerate() {
            let r = reach[i];
            if !(r > 0.0) {
                continue;
            }
            let start = births.partition_point(|&b| b <= x.0 - r);
            for &j in &order[start..] {
                if to[j].0 >= x.0 + r {
                    break;
                }
                let d = linf(x, to[j]);
                if d < r {
                    emit(i, j, d);
                }
            }
        }
    }
    let mut out = Vec::new();
    scan(left, reach_left, right, |i, j, _| out.push((i, j)));
    // Skip what the first pass already found.
    scan(right, reach_right, left, |j, i, d| {
        if !(d < reach_left[i]) {
            out.push((i, j));
        }
    });
    out
}

/// `x^p`, exact and cheap for the common integer exponents.
pub(crate) fn pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 1.0 {
        x
    } else if p.fract() == 0.0 && p <= i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "p must be a finite number >= 1, got {p}"
        )));
    }
    Ok(())
}

pub(crate) fn check_dims(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive enumeration of every partial injection between two small
    //! diagrams; unmatched points go to the diagonal.

    use super::{linf, to_diagonal};

    fn walk(
        left: &[(f64, f64)],
        right: &[(f64, f64)],
        i: usize,
        used: &mut Vec<bool>,
        costs: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[f64]),
    ) {
        if i == left.len() {
            let mark = costs.len();
            for (j, &u) in used.iter().enumerate() {
                if !u {
                    costs.push(to_diagonal(right[j]));
                }
            }
            visit(costs);
            costs.truncate(mark);
            return;
        }
        costs.push(to_diagonal(left[i]));
        walk(left, right, i + 1, used, costs, visit);
        costs.pop();
        for j in 0..right.len() {
            if !used[j] {
                used[j] = true;
                costs.push(linf(left[i], right[j]));
                walk(left, right, i + 1, used, costs, visit);
                costs.pop();
                used[j] = false;
            }
        }
    }

    fn for_each_coupling(left: &[(f64, f64)], right: &[(f64, f64)], mut visit: impl FnMut(&[f64])) {
        walk(
            left,
            right,
            0,
            &mut vec![false; right.len()],
            &mut Vec::new(),
            &mut visit,
        );
    }

    pub fn wasserstein(left: &[(f64, f64)], right: &[(f64, f64)], p: f64) -> f64 {
        let mut best = f64::INFINITY;
        for_each_coupling(left, right, |costs| {
            best = best.min(costs.iter().map(|c| c.powf(p)).sum());
        });
        best.powf(1.0 / p)
    }

    pub fn bottleneck(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
        let mut best = f64::INFINITY;
        for_each_coupling(left, right, |costs| {
            best = best.min(costs.iter().copied().fold(0.0, f64::max));
        });
        best
    }
}
