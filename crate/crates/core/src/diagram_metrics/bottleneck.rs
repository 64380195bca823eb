use std::collections::VecDeque;

use super::{candidate_pairs, check_dims, linf, to_diagonal};
use crate::error::Result;
use crate::persistence::PersistenceDiagram;

/// Exact bottleneck distance between two diagrams of the same dimension.
///
/// The answer is one of the candidate costs, so we binary search over them.
/// A threshold `t` is feasible when the points farther than `t` from the
/// diagonal can all be matched within `t`; by the Mendelsohn–Dulmage theorem
/// it suffices to saturate the far left points and the far right points in two
/// separate maximum matchings.
pub fn bottleneck(left: &PersistenceDiagram, right: &PersistenceDiagram) -> Result<f64> {
    check_dims(left, right)?;
    Ok(bottleneck_points(&left.points(), &right.points()))
}

pub(crate) fn bottleneck_points(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    let a: Vec<f64> = left.iter().map(|&x| to_diagonal(x)).collect();
    let b: Vec<f64> = right.iter().map(|&x| to_diagonal(x)).collect();
    // An edge is never useful when both ends can reach the diagonal cheaper.
    let mut edges: Vec<(f64, usize, usize)> = candidate_pairs(left, right, &a, &b)
        .into_iter()
        .map(|(i, j)| (linf(left[i], right[j]), i, j))
        .collect();
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut candidates: Vec<f64> = edges
        .iter()
        .map(|e| e.0)
        .chain(a.iter().copied())
        .chain(b.iter().copied())
        .collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |t: f64| {
        let usable = edges.partition_point(|e| e.0 <= t);
        let far_left: Vec<bool> = a.iter().map(|&x| x > t).collect();
        let far_right: Vec<bool> = b.iter().map(|&x| x > t).collect();
        let need_left = far_left.iter().filter(|&&f| f).count();
        let need_right = far_right.iter().filter(|&&f| f).count();
        if need_left == 0 && need_right == 0 {
            return true;
        }
        let mut adj_l = vec![Vec::new(); left.len()];
        let mut adj_r = vec![Vec::new(); right.len()];
        for &(_, i, j) in &edges[..usable] {
            if far_left[i] {
                adj_l[i].push(j);
            }
            if far_right[j] {
                adj_r[j].push(i);
            }
        }
        max_matching(&adj_l, right.len()) == need_left && max_matching(&adj_r, left.len()) == need_right
    };

    // The largest candidate is always feasible: everything goes to the diagonal.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Hopcroft–Karp maximum matching size.
fn max_matching(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n = adj.len();
    let mut mate_l = vec![FREE; n];
    let mut mate_r = vec![FREE; right];
    let mut layer = vec![0usize; n];
    let mut size = 0;

    loop {
        let mut queue = VecDeque::new();
        for u in 0..n {
            if mate_l[u] == FREE && !adj[u].is_empty() {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mate_r[v] {
                    FREE => found = true,
                    w if layer[w] == usize::MAX => {
                        layer[w] = layer[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return size;
        }
        let mut next = vec![0usize; n];
        for u in 0..n {
            if mate_l[u] == FREE && layer[u] == 0 && augment(u, adj, &mut mate_l, &mut mate_r, &mut layer, &mut next) {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    layer: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = mate_r[v];
        let ok = w == usize::MAX || (layer[w] == layer[u] + 1 && augment(w, adj, mate_l, mate_r, layer, next));
        if ok {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    layer[u] = usize::MAX;
    false
}
