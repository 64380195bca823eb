//! Superlevel-set filtration of the cubical complex whose vertices are the
//! voxels of a volume (V-construction).
//!
//! Cells are addressed in doubled coordinates: a cell spanning voxel
//! `(i, j, k)` along the axes in its extent has coordinate `2i + 1` on those
//! axes and `2i` elsewhere, so the complex of an `n1 × n2 × n3` volume lives on
//! a `(2n1 − 1) × (2n2 − 1) × (2n3 − 1)` grid and the number of odd
//! coordinates is the cell dimension.

use crate::par;
use crate::persistence::{compute_persistence, PersistenceOptions};
use crate::volume::{Dims, Volume};

/// Index of a cell in the doubled-coordinate grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub dim: u8,
    /// Minimum of the likelihood over the cell's vertices.
    pub value: f64,
    /// Flat voxel index attaining `value`; the smallest index wins ties.
    pub critical_vertex: u32,
}

/// Geometry of the doubled-coordinate grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicalGrid {
    dims: Dims,
    ext: [usize; 3],
}

impl CubicalGrid {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            ext: dims.map(|n| 2 * n - 1),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn cell_count(&self) -> usize {
        self.ext.iter().product()
    }

    pub fn decode(&self, id: CellId) -> [usize; 3] {
        let id = id.0 as usize;
        let z = id % self.ext[2];
        let rest = id / self.ext[2];
        [rest / self.ext[1], rest % self.ext[1], z]
    }

    pub fn encode(&self, x: [usize; 3]) -> CellId {
        CellId(((x[0] * self.ext[1] + x[1]) * self.ext[2] + x[2]) as u32)
    }

    pub fn dim_of(&self, id: CellId) -> usize {
        self.decode(id).iter().filter(|&&c| c % 2 == 1).count()
    }

    /// Voxel with the smallest index among the cell's vertices.
    pub fn anchor(&self, id: CellId) -> [usize; 3] {
        self.decode(id).map(|c| c / 2)
    }

    /// Axes along which the cell spans an edge.
    pub fn extent(&self, id: CellId) -> [bool; 3] {
        self.decode(id).map(|c| c % 2 == 1)
    }

    fn voxel_index(&self, v: [usize; 3]) -> usize {
        (v[0] * self.dims[1] + v[1]) * self.dims[2] + v[2]
    }

    /// Flat voxel indices of the cell's `2^dim` vertices, ascending.
    pub fn vertices(&self, id: CellId) -> Vec<usize> {
        let x = self.decode(id);
        let mut out = vec![[0usize; 3]];
        for axis in 0..3 {
            let lo = x[axis] / 2;
            if x[axis] % 2 == 1 {
                out = out
                    .into_iter()
                    .flat_map(|v| {
                        let mut a = v;
                        let mut b = v;
                        a[axis] = lo;
                        b[axis] = lo + 1;
                        [a, b]
                    })
                    .collect();
            } else {
                for v in &mut out {
                    v[axis] = lo;
                }
            }
        }
        let mut idx: Vec<usize> = out.into_iter().map(|v| self.voxel_index(v)).collect();
        idx.sort_unstable();
        idx
    }

    /// Codimension-one faces.
    pub fn faces(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        let x = self.decode(id);
        (0..3).filter(move |&a| x[a] % 2 == 1).flat_map(move |a| {
            let mut lo = x;
            let mut hi = x;
            lo[a] -= 1;
            hi[a] += 1;
            [self.encode(lo), self.encode(hi)]
        })
    }

    /// Codimension-one cofaces inside the grid.
    pub fn cofaces(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        let x = self.decode(id);
        (0..3).filter(move |&a| x[a] % 2 == 0).flat_map(move |a| {
            let below = (x[a] > 0).then(|| {
                let mut y = x;
                y[a] -= 1;
                self.encode(y)
            });
            let above = (x[a] + 1 < self.ext[a]).then(|| {
                let mut y = x;
                y[a] += 1;
                self.encode(y)
            });
            below.into_iter().chain(above)
        })
    }
}

/// All cells of the complex, ordered for the superlevel filtration.
#[derive(Debug, Clone)]
pub struct Filtration {
    grid: CubicalGrid,
    cells: Vec<Cell>,
    position: Vec<u32>,
}

fn descending_value_key(x: f64) -> u64 {
    // Adding 0.0 folds -0.0 into 0.0 so equal values compare equal.
    let bits = (x + 0.0).to_bits();
    let ascending = if bits >> 63 == 1 { !bits } else { bits | (1 << 63) };
    !ascending
}

impl Filtration {
    pub fn grid(&self) -> &CubicalGrid {
        &self.grid
    }

    pub fn dims(&self) -> Dims {
        self.grid.dims
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in filtration order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, pos: usize) -> &Cell {
        &self.cells[pos]
    }

    pub fn position_of(&self, id: CellId) -> usize {
        self.position[id.0 as usize] as usize
    }

    pub fn anchor(&self, cell: &Cell) -> [usize; 3] {
        self.grid.anchor(cell.id)
    }

    pub fn extent(&self, cell: &Cell) -> [bool; 3] {
        self.grid.extent(cell.id)
    }

    /// Filtration positions of the faces of the cell at `pos`.
    pub fn face_positions(&self, pos: usize) -> impl Iterator<Item = usize> + '_ {
        self.grid.faces(self.cells[pos].id).map(|f| self.position_of(f))
    }

    /// Filtration positions of the cofaces of the cell at `pos`.
    pub fn coface_positions(&self, pos: usize) -> impl Iterator<Item = usize> + '_ {
        self.grid.cofaces(self.cells[pos].id).map(|f| self.position_of(f))
    }

    /// Number of cells of each dimension with value `>= tau`, i.e. the
    /// complex `C(tau)`.
    pub fn cell_counts_at(&self, tau: f64) -> [usize; 4] {
        let mut counts = [0; 4];
        for c in self.cells.iter().take_while(|c| c.value >= tau) {
            counts[c.dim as usize] += 1;
        }
        counts
    }

    /// Euler characteristic of `C(tau)`.
    pub fn euler_characteristic_at(&self, tau: f64) -> i64 {
        let c = self.cell_counts_at(tau);
        c[0] as i64 - c[1] as i64 + c[2] as i64 - c[3] as i64
    }
}

/// Builds the superlevel filtration: each cell takes the minimum likelihood of
/// its vertices, and cells are sorted by value descending, then dimension
/// ascending, then anchor voxel and extent.
pub fn build_superlevel_filtration(v: &Volume) -> Filtration {
    let grid = CubicalGrid::new(v.dims());
    let data = v.data();
    let n = grid.cell_count();
    assert!(n <= u32::MAX as usize, "volume too large for 32-bit cell ids");

    let [_, d1, d2] = grid.dims;
    let strides = [d1 * d2, d2, 1];
    let mut keyed = par::map_range(n, |raw| {
        let id = CellId(raw as u32);
        let x = grid.decode(id);
        let base: usize = (0..3).map(|a| x[a] / 2 * strides[a]).sum();
        let mut spans = [0usize; 3];
        let mut dim = 0;
        for a in 0..3 {
            if x[a] % 2 == 1 {
                spans[dim] = strides[a];
                dim += 1;
            }
        }
        let mut crit = base;
        for mask in 1..1usize << dim {
            let w = base + (0..dim).filter(|b| mask >> b & 1 == 1).map(|b| spans[b]).sum::<usize>();
            if data[w] < data[crit] || (data[w] == data[crit] && w < crit) {
                crit = w;
            }
        }
        let dim = dim as u8;
        let ext = (0..3).fold(0u64, |e, a| e << 1 | (x[a] % 2) as u64);
        let lo = (dim as u64) << 40 | (base as u64) << 3 | ext;
        let key = ((descending_value_key(data[crit]) as u128) << 64) | lo as u128;
        (
            key,
            Cell {
                id,
                dim,
                value: data[crit],
                critical_vertex: crit as u32,
            },
        )
    });
    par::sort_unstable_by_key(&mut keyed, |c| c.0);
    let cells: Vec<Cell> = keyed.into_iter().map(|(_, c)| c).collect();

    let mut position = vec![0u32; n];
    for (pos, c) in cells.iter().enumerate() {
        position[c.id.0 as usize] = pos as u32;
    }
    Filtration { grid, cells, position }
}

/// Betti numbers `(b0, b1, b2)` of the superlevel set `{f >= tau}`, read off
/// the persistence diagrams.
pub fn betti_numbers(v: &Volume, tau: f64) -> [usize; 3] {
    let diagrams = compute_persistence(&build_superlevel_filtration(v), &PersistenceOptions::default());
    [0, 1, 2].map(|k| {
        diagrams[k]
            .pairs
            .iter()
            .filter(|p| p.birth >= tau && (p.is_essential() || tau > p.death))
            .count()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn single_voxel_complex() {
        let v = Volume::filled([1, 1, 1], 0.7).unwrap();
        let f = build_superlevel_filtration(&v);
        assert_eq!(f.len(), 1);
        assert_eq!(f.cell(0).dim, 0);
        assert_eq!(f.cell(0).value, 0.7);
    }

    #[test]
    fn edge_takes_lower_endpoint() {
        let v = Volume::new([2, 1, 1], vec![0.9, 0.4]).unwrap();
        let f = build_superlevel_filtration(&v);
        let values: Vec<(u8, f64, u32)> = f.cells().iter().map(|c| (c.dim, c.value, c.critical_vertex)).collect();
        assert_eq!(values, vec![(0, 0.9, 0), (0, 0.4, 1), (1, 0.4, 1)]);
    }

    #[test]
    fn values_are_exhaustive_vertex_minima_and_nested() {
        let v = synthetic::uniform_noise([3, 3, 3], 17);
        let f = build_superlevel_filtration(&v);
        let mut incidences = 0;
        for (pos, cell) in f.cells().iter().enumerate() {
            let verts = f.grid().vertices(cell.id);
            assert_eq!(verts.len(), 1 << cell.dim);
            let min = verts.iter().map(|&w| v.data()[w]).fold(f64::INFINITY, f64::min);
            assert_eq!(cell.value, min);
            assert_eq!(v.data()[cell.critical_vertex as usize], min);
            assert!(verts.contains(&(cell.critical_vertex as usize)));
            for face in f.face_positions(pos) {
                incidences += 1;
                assert!(f.cell(face).value >= cell.value);
                assert!(face < pos, "faces precede cofaces");
            }
        }
        // 2·54 edge, 4·36 square and 6·8 cube incidences.
        assert_eq!(incidences, 300);
    }

    #[test]
    fn critical_vertex_ties_pick_smallest_index() {
        let v = Volume::filled([2, 2, 2], 0.5).unwrap();
        let f = build_superlevel_filtration(&v);
        for c in f.cells() {
            assert_eq!(c.critical_vertex as usize, f.grid().vertices(c.id)[0]);
        }
    }

    #[test]
    fn cell_counts_satisfy_euler_relation() {
        for dims in [[1, 1, 1], [4, 1, 1], [3, 4, 1], [2, 3, 4], [5, 5, 5]] {
            let v = synthetic::uniform_noise(dims, 1);
            let f = build_superlevel_filtration(&v);
            let c = f.cell_counts_at(f64::NEG_INFINITY);
            let [a, b, d] = dims;
            assert_eq!(c[0], a * b * d);
            assert_eq!(c[1], (a - 1) * b * d + a * (b - 1) * d + a * b * (d - 1));
            assert_eq!(c[3], (a - 1) * (b - 1) * (d - 1));
            assert_eq!(f.euler_characteristic_at(f64::NEG_INFINITY), 1);
        }
    }

    #[test]
    fn order_breaks_ties_by_dimension_then_anchor() {
        let v = Volume::filled([2, 2, 1], 1.0).unwrap();
        let f = build_superlevel_filtration(&v);
        let dims: Vec<u8> = f.cells().iter().map(|c| c.dim).collect();
        assert_eq!(dims, vec![0, 0, 0, 0, 1, 1, 1, 1, 2]);
        let anchors: Vec<[usize; 3]> = f.cells()[..4].iter().map(|c| f.anchor(c)).collect();
        assert_eq!(anchors, vec![[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]);
    }

    #[test]
    fn grid_faces_and_cofaces_are_dual() {
        let grid = CubicalGrid::new([3, 2, 4]);
        for raw in 0..grid.cell_count() as u32 {
            let id = CellId(raw);
            for face in grid.faces(id) {
                assert_eq!(grid.dim_of(face) + 1, grid.dim_of(id));
                assert!(grid.cofaces(face).any(|c| c == id));
            }
        }
    }

    #[test]
    fn betti_fixtures() {
        let block = Volume::from_fn([5, 5, 5], |i, j, k| {
            ((1..4).contains(&i) && (1..4).contains(&j) && (1..4).contains(&k)) as u8 as f64
        })
        .unwrap();
        assert_eq!(betti_numbers(&block, 0.5), [1, 0, 0]);

        let shell = Volume::from_fn([5, 5, 5], |i, j, k| {
            let inside = (1..4).contains(&i) && (1..4).contains(&j) && (1..4).contains(&k);
            (inside && (i, j, k) != (2, 2, 2)) as u8 as f64
        })
        .unwrap();
        assert_eq!(betti_numbers(&shell, 0.5), [1, 0, 1]);

        let ring = Volume::from_fn([5, 5, 1], |i, j, _| {
            ((1..4).contains(&i) && (1..4).contains(&j) && (i, j) != (2, 2)) as u8 as f64
        })
        .unwrap();
        assert_eq!(betti_numbers(&ring, 0.5), [1, 1, 0]);
    }
}
