use crate::filtration::Filtration;

const NO_OWNER: u32 = u32::MAX;

/// Symmetric difference of two ascending index lists.
fn add_columns(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Dimension-1 pairs by reducing the coboundary matrix.
///
/// Columns are the loop-creating edges in decreasing filtration order; edges
/// that merged components have zero reduced columns and are skipped. Rows are
/// restricted to `negative_squares`: every pivot of a reduced column lands on
/// such a square, so the remaining rows never change a reduction step.
pub(super) fn loops(
    filt: &Filtration,
    positive_edges: &[usize],
    negative_squares: &[bool],
) -> Vec<(usize, usize, Option<usize>)> {
    let mut owner = vec![NO_OWNER; filt.len()];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut pairs = Vec::with_capacity(positive_edges.len());

    for &edge in positive_edges.iter().rev() {
        let mut column: Vec<u32> = filt
            .coface_positions(edge)
            .filter(|&s| negative_squares[s])
            .map(|s| s as u32)
            .collect();
        column.sort_unstable();
        loop {
            let Some(&pivot) = column.first() else {
                pairs.push((1, edge, None));
                break;
            };
            let o = owner[pivot as usize];
            if o == NO_OWNER {
                owner[pivot as usize] = reduced.len() as u32;
                pairs.push((1, edge, Some(pivot as usize)));
                reduced.push(column);
                break;
            }
            column = add_columns(&column, &reduced[o as usize]);
        }
    }
    pairs
}
