//! Persistence diagrams (dimensions 0–2) of a superlevel cubical filtration.
//!
//! [`compute_persistence`] splits the work by dimension:
//! - dimension 0 by a union-find sweep over vertices and edges (elder rule);
//! - dimension 2 by the same sweep run backwards on the dual graph of cubes,
//!   with everything outside the grid collapsed into one node;
//! - dimension 1 by cohomology reduction of the coboundary matrix, restricted
//!   to the edges not consumed by dimension 0 (clearing) and to the squares
//!   not consumed by dimension 2.
//!
//! [`naive_reduce`] is the textbook boundary-matrix reduction and serves as
//! the reference the fast path is tested against.

mod cohomology;
mod json;
mod naive;
mod union_find;

pub use json::{DiagramRecord, PairRecord};
pub use naive::{naive_reduce, NAIVE_CELL_LIMIT};

use serde::{Deserialize, Serialize};

use crate::filtration::Filtration;
use crate::par;

/// How essential classes (alive in the final complex) are given a finite death.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialDeath {
    /// A fixed death value, by default the lower edge of the `[0, 1]`
    /// likelihood range.
    Fixed(f64),
    /// The global minimum of the volume.
    GlobalMin,
}

impl Default for EssentialDeath {
    fn default() -> Self {
        EssentialDeath::Fixed(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceOptions {
    pub essential_death: EssentialDeath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
    /// Filtration position of the creating cell, when known.
    pub birth_cell: Option<usize>,
    /// Filtration position of the destroying cell; `None` for essential pairs
    /// and for diagrams read back from files.
    pub death_cell: Option<usize>,
    /// Voxel whose likelihood equals `birth`.
    pub birth_vertex: [usize; 3],
    /// Voxel whose likelihood equals `death`; the birth voxel for essential
    /// pairs, whose death does not depend on the volume.
    pub death_vertex: [usize; 3],
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        (self.death - self.birth).abs()
    }

    pub fn is_essential(&self) -> bool {
        self.essential
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
    pub essential_death_value: f64,
}

impl PersistenceDiagram {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            pairs: Vec::new(),
            essential_death_value: 0.0,
        }
    }

    /// Builds a diagram from bare `(birth, death)` points without provenance.
    pub fn from_points(dim: usize, points: &[(f64, f64)]) -> Self {
        let pairs = points
            .iter()
            .map(|&(birth, death)| PersistencePair {
                dim,
                birth,
                death,
                essential: false,
                birth_cell: None,
                death_cell: None,
                birth_vertex: [0; 3],
                death_vertex: [0; 3],
            })
            .collect();
        Self {
            dim,
            pairs,
            essential_death_value: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.pairs.iter().map(|p| (p.birth, p.death)).collect()
    }
}

/// Creator/destroyer positions of every pair, before values are attached.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct RawPairs {
    /// `(dim, birth position, death position)`; `None` marks an essential class.
    pub pairs: Vec<(usize, usize, Option<usize>)>,
}

/// Persistence diagrams of dimensions 0, 1 and 2.
///
/// Pairs of zero persistence are omitted; essential pairs are always kept.
pub fn compute_persistence(filt: &Filtration, opts: &PersistenceOptions) -> [PersistenceDiagram; 3] {
    let (components, voids) = par::join(|| union_find::components(filt), || union_find::voids(filt));
    let loops = cohomology::loops(filt, &components.positive_edges, &voids.negative_squares);
    let mut raw = RawPairs::default();
    raw.pairs.extend(components.pairs);
    raw.pairs.extend(loops);
    raw.pairs.extend(voids.pairs);
    assemble(filt, &raw, opts)
}

pub(crate) fn assemble(filt: &Filtration, raw: &RawPairs, opts: &PersistenceOptions) -> [PersistenceDiagram; 3] {
    let essential_death = match opts.essential_death {
        EssentialDeath::Fixed(v) => v,
        EssentialDeath::GlobalMin => filt.cells().last().map_or(0.0, |c| c.value),
    };
    let voxel = |pos: usize| {
        let c = filt.cell(pos);
        let [_, n2, n3] = filt.dims();
        let flat = c.critical_vertex as usize;
        [flat / (n2 * n3), (flat / n3) % n2, flat % n3]
    };

    let mut sorted = raw.pairs.clone();
    sorted.sort_unstable_by_key(|&(dim, b, d)| (dim, b, d));
    let mut diagrams = [0, 1, 2].map(|dim| PersistenceDiagram {
        dim,
        pairs: Vec::new(),
        essential_death_value: essential_death,
    });
    for (dim, b, d) in sorted {
        if dim > 2 {
            continue;
        }
        let birth = filt.cell(b).value;
        let pair = match d {
            Some(d) => {
                let death = filt.cell(d).value;
                if death == birth {
                    continue;
                }
                PersistencePair {
                    dim,
                    birth,
                    death,
                    essential: false,
                    birth_cell: Some(b),
                    death_cell: Some(d),
                    birth_vertex: voxel(b),
                    death_vertex: voxel(d),
                }
            }
            None => PersistencePair {
                dim,
                birth,
                death: essential_death,
                essential: true,
                birth_cell: Some(b),
                death_cell: None,
                birth_vertex: voxel(b),
                death_vertex: voxel(b),
            },
        };
        diagrams[dim].pairs.push(pair);
    }
    diagrams
}
