//! Exact minimum-cost assignment of every row to a distinct column on a
//! sparse bipartite graph with at least as many columns as rows.
//!
//! Rows are inserted one at a time; each insertion runs Dijkstra from the new
//! row over reduced costs until it reaches a free column, then augments and
//! shifts the dual potentials so every matched edge stays tight and every
//! reduced cost stays non-negative. Column potentials start at zero and only
//! move once a column is matched, which is what makes the result optimal when
//! some columns stay free. The search stops at the first free column, so on
//! geometric instances it rarely leaves the neighbourhood of its row.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const NONE: usize = usize::MAX;

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    col: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.col.cmp(&self.col))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Assignment {
    rows: Vec<Vec<(usize, f64)>>,
    u: Vec<f64>,
    v: Vec<f64>,
    row_of: Vec<usize>,
    col_of: Vec<usize>,
}

impl Assignment {
    pub fn new(rows: usize, cols: usize) -> Self {
        debug_assert!(rows <= cols);
        Self {
            rows: vec![Vec::new(); rows],
            u: vec![0.0; rows],
            v: vec![0.0; cols],
            row_of: vec![NONE; cols],
            col_of: vec![NONE; rows],
        }
    }

    pub fn add_edge(&mut self, r: usize, c: usize, w: f64) {
        self.rows[r].push((c, w));
    }

    /// Column assigned to each row after [`Assignment::solve`].
    pub fn columns(&self) -> &[usize] {
        &self.col_of
    }

    fn initialise(&mut self) {
        // Column reduction is only sound when every column ends up matched;
        // otherwise free columns must keep a zero potential.
        if self.rows.len() == self.v.len() {
            self.v.fill(f64::INFINITY);
            for row in &self.rows {
                for &(c, w) in row {
                    self.v[c] = self.v[c].min(w);
                }
            }
        }
        let v = &self.v;
        for (r, row) in self.rows.iter().enumerate() {
            self.u[r] = row.iter().map(|&(c, w)| w - v[c]).fold(f64::INFINITY, f64::min);
        }
        // Greedy pass over the edges that became tight.
        for r in 0..self.rows.len() {
            let (u, v, row_of) = (self.u[r], &self.v, &self.row_of);
            if let Some(&(c, _)) = self.rows[r].iter().find(|&&(c, w)| row_of[c] == NONE && w - v[c] <= u) {
                self.row_of[c] = r;
                self.col_of[r] = c;
            }
        }
    }

    /// Assigns every row. Panics if the offered edges cannot cover all rows;
    /// callers always offer a private column per row.
    pub fn solve(&mut self) {
        self.initialise();
        let n = self.rows.len();
        let cols = self.v.len();
        let mut dist = vec![f64::INFINITY; cols];
        let mut pred = vec![NONE; cols];
        let mut settled = vec![false; cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut popped: Vec<usize> = Vec::new();
        let mut heap = BinaryHeap::new();

        for root in 0..n {
            if self.col_of[root] != NONE {
                continue;
            }
            heap.clear();
            let rows = &self.rows;
            let (u, v, row_of) = (&self.u, &self.v, &self.row_of);
            // Distance to the nearest free column seen so far; nothing at or
            // beyond it can be settled before the search ends.
            let mut bound = f64::INFINITY;
            let mut relax = |r: usize,
                             base: f64,
                             dist: &mut [f64],
                             pred: &mut [usize],
                             settled: &[bool],
                             heap: &mut BinaryHeap<Entry>| {
                for &(c, w) in &rows[r] {
                    if settled[c] {
                        continue;
                    }
                    let nd = base + (w - u[r] - v[c]).max(0.0);
                    if nd < dist[c] && nd < bound {
                        if dist[c].is_infinite() {
                            touched.push(c);
                        }
                        dist[c] = nd;
                        pred[c] = r;
                        heap.push(Entry { dist: nd, col: c });
                        if row_of[c] == NONE {
                            bound = nd;
                        }
                    }
                }
            };
            relax(root, 0.0, &mut dist, &mut pred, &settled, &mut heap);
            let (free, reach) = loop {
                let Entry { dist: d, col: c } = heap.pop().expect("every row has a free column");
                if settled[c] || d > dist[c] {
                    continue;
                }
                settled[c] = true;
                popped.push(c);
                let r = self.row_of[c];
                if r == NONE {
                    break (c, d);
                }
                relax(r, d, &mut dist, &mut pred, &settled, &mut heap);
            };

            // Dual update over the settled columns and their rows.
            self.u[root] += reach;
            for &c in &popped {
                if c != free {
                    let shift = reach - dist[c];
                    self.v[c] -= shift;
                    self.u[self.row_of[c]] += shift;
                }
            }

            let mut c = free;
            loop {
                let r = pred[c];
                let prev = self.col_of[r];
                self.row_of[c] = r;
                self.col_of[r] = c;
                if r == root {
                    break;
                }
                c = prev;
            }

            for &c in &touched {
                dist[c] = f64::INFINITY;
                pred[c] = NONE;
                settled[c] = false;
            }
            touched.clear();
            popped.clear();
        }
    }
}
