use super::assignment::Assignment;
use super::{candidate_pairs, check_dims, check_p, linf, pow, to_diagonal, Matching};
use crate::error::Result;
use crate::persistence::PersistenceDiagram;

/// Exact `p`-Wasserstein distance between two diagrams of the same dimension,
/// with the optimal coupling.
///
/// Solved as a sparse assignment problem. A direct edge `i → j` is only
/// offered when it is cheaper than sending both points to the diagonal, since
/// otherwise it can never improve the coupling.
pub fn wasserstein(left: &PersistenceDiagram, right: &PersistenceDiagram, p: f64) -> Result<(f64, Matching)> {
    check_dims(left, right)?;
    check_p(p)?;
    let matching = optimal_coupling(&left.points(), &right.points(), p);
    Ok((matching.total_cost.powf(1.0 / p), matching))
}

pub(crate) fn optimal_coupling(left: &[(f64, f64)], right: &[(f64, f64)], p: f64) -> Matching {
    let (n, m) = (left.len(), right.len());
    let a: Vec<f64> = left.iter().map(|&x| pow(to_diagonal(x), p)).collect();
    let b: Vec<f64> = right.iter().map(|&x| pow(to_diagonal(x), p)).collect();

    // Rows: left points, then diagonal copies of right points.
    // Columns: right points, then diagonal copies of left points.
    // A diagonal copy only needs to meet another diagonal copy when the two
    // originals are matched to each other, so those zero-cost edges are only
    // offered alongside direct edges.
    let mut solver = Assignment::new(n + m, n + m);
    // c < a + b implies c < 2·max(a, b); the window search only needs that.
    let reach = |w: &[f64]| -> Vec<f64> { w.iter().map(|&x| (2.0 * x).powf(1.0 / p) * (1.0 + 1e-9)).collect() };
    for (i, j) in candidate_pairs(left, right, &reach(&a), &reach(&b)) {
        let c = pow(linf(left[i], right[j]), p);
        if c < a[i] + b[j] {
            solver.add_edge(i, j, c);
            solver.add_edge(n + j, m + i, 0.0);
        }
    }
    for i in 0..n {
        solver.add_edge(i, m + i, a[i]);
    }
    for j in 0..m {
        solver.add_edge(n + j, j, b[j]);
    }
    solver.solve();
    let col_of = solver.columns();

    let mut matching = Matching::default();
    for (i, &c) in col_of[..n].iter().enumerate() {
        if c < m {
            matching.pairs_direct.push((i, c));
        } else {
            matching.to_diagonal_left.push(i);
        }
    }
    for (j, &c) in col_of[n..].iter().enumerate() {
        if c == j {
            matching.to_diagonal_right.push(j);
        }
    }
    matching.total_cost = matching.cost(left, right, p);
    matching
}
