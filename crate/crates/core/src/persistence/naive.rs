use super::{assemble, PersistenceDiagram, PersistenceOptions, RawPairs};
use crate::error::{Error, Result};
use crate::filtration::Filtration;

/// Largest complex (in cells) [`naive_reduce`] accepts.
pub const NAIVE_CELL_LIMIT: usize = 64_000_000;

/// Left-to-right reduction of the full boundary matrix with no optimisation.
///
/// Quadratic memory and cubic worst-case time; meant as a reference on small
/// inputs.
pub fn naive_reduce(filt: &Filtration, opts: &PersistenceOptions) -> Result<[PersistenceDiagram; 3]> {
    if filt.len() > NAIVE_CELL_LIMIT {
        return Err(Error::TooLarge {
            cells: filt.len(),
            limit: NAIVE_CELL_LIMIT,
        });
    }
    let n = filt.len();
    let mut columns: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let mut faces: Vec<usize> = filt.face_positions(j).collect();
            faces.sort_unstable();
            faces
        })
        .collect();
    let mut low_owner: Vec<Option<usize>> = vec![None; n];
    let mut raw = RawPairs::default();
    let mut destroyed = vec![false; n];

    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match low_owner[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    let col = &mut columns[j];
                    for f in other {
                        match col.binary_search(&f) {
                            Ok(idx) => {
                                col.remove(idx);
                            }
                            Err(idx) => col.insert(idx, f),
                        }
                    }
                }
                None => {
                    low_owner[low] = Some(j);
                    destroyed[low] = true;
                    raw.pairs.push((filt.cell(low).dim as usize, low, Some(j)));
                    break;
                }
            }
        }
    }
    for j in 0..n {
        if columns[j].is_empty() && !destroyed[j] {
            raw.pairs.push((filt.cell(j).dim as usize, j, None));
        }
    }
    Ok(assemble(filt, &raw, opts))
}
