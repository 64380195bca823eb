//! How much trilinear downsampling perturbs persistence diagrams.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram_metrics::{check_p, wasserstein};
use crate::error::{Error, Result};
use crate::filtration::build_superlevel_filtration;
use crate::par;
use crate::persistence::{compute_persistence, PersistenceDiagram, PersistenceOptions};
use crate::volume::{downsample_trilinear, Volume};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationRow {
    /// Side length of the downsampled grid.
    pub side: usize,
    /// `W_p` between the diagrams of the original and the downsampled volume.
    pub wasserstein: BTreeMap<usize, f64>,
}

fn diagrams(v: &Volume, opts: &PersistenceOptions) -> [PersistenceDiagram; 3] {
    compute_persistence(&build_superlevel_filtration(v), opts)
}

/// One row per entry of `sides`, in the given order.
pub fn interpolation_errors(
    v: &Volume,
    sides: &[usize],
    p: f64,
    dims: &BTreeSet<usize>,
    opts: &PersistenceOptions,
) -> Result<Vec<InterpolationRow>> {
    check_p(p)?;
    if let Some(&d) = dims.iter().find(|&&d| d > 2) {
        return Err(Error::InvalidParameter(format!(
            "homology dimension {d} is outside 0..=2"
        )));
    }
    let smallest = *v.dims().iter().min().expect("three axes");
    if let Some(&s) = sides.iter().find(|&&s| s < 2 || s > smallest) {
        return Err(Error::InvalidParameter(format!(
            "side {s} must lie between 2 and the smallest volume extent {smallest}"
        )));
    }
    let original = diagrams(v, opts);
    let rows = par::map(sides, |&side| -> Result<InterpolationRow> {
        let small = downsample_trilinear(v, side)?;
        let reduced = diagrams(&small, opts);
        let mut wasserstein_by_dim = BTreeMap::new();
        for &k in dims {
            wasserstein_by_dim.insert(k, wasserstein(&original[k], &reduced[k], p)?.0);
        }
        Ok(InterpolationRow {
            side,
            wasserstein: wasserstein_by_dim,
        })
    });
    rows.into_iter().collect()
}
