use crate::filtration::Filtration;

/// Disjoint sets where each root remembers the filtration key of the oldest
/// member of its class.
struct ElderForest {
    parent: Vec<u32>,
    key: Vec<usize>,
}

impl ElderForest {
    fn new(keys: Vec<usize>) -> Self {
        Self {
            parent: (0..keys.len() as u32).collect(),
            key: keys,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// Links the roots `a` and `b`; `a` survives.
    fn link(&mut self, a: u32, b: u32) {
        self.parent[b as usize] = a;
    }
}

pub(super) struct Components {
    pub pairs: Vec<(usize, usize, Option<usize>)>,
    /// Edges that close a loop instead of merging components, ascending.
    pub positive_edges: Vec<usize>,
}

/// Dimension-0 persistence by a forward sweep over the filtration.
pub(super) fn components(filt: &Filtration) -> Components {
    let grid = filt.grid();
    let [_, n2, n3] = grid.dims();
    let voxel_of = |pos: usize| {
        let a = grid.anchor(filt.cell(pos).id);
        ((a[0] * n2 + a[1]) * n3 + a[2]) as u32
    };

    let n = grid.dims().iter().product();
    let mut forest = ElderForest::new(vec![usize::MAX; n]);
    let mut pairs = Vec::new();
    let mut positive_edges = Vec::new();
    for (pos, cell) in filt.cells().iter().enumerate() {
        match cell.dim {
            0 => forest.key[voxel_of(pos) as usize] = pos,
            1 => {
                let mut ends = filt.face_positions(pos).map(voxel_of);
                let (u, v) = (ends.next().unwrap(), ends.next().unwrap());
                let (ru, rv) = (forest.find(u), forest.find(v));
                if ru == rv {
                    positive_edges.push(pos);
                    continue;
                }
                let (older, younger) = if forest.key[ru as usize] < forest.key[rv as usize] {
                    (ru, rv)
                } else {
                    (rv, ru)
                };
                pairs.push((0, forest.key[younger as usize], Some(pos)));
                forest.link(older, younger);
            }
            _ => {}
        }
    }
    if !filt.is_empty() {
        pairs.push((0, 0, None));
    }
    Components { pairs, positive_edges }
}

pub(super) struct Voids {
    pub pairs: Vec<(usize, usize, Option<usize>)>,
    /// Squares that fill a loop rather than enclosing a void, as a mask over
    /// filtration positions.
    pub negative_squares: Vec<bool>,
}

/// Dimension-2 persistence by a backward sweep over the dual graph, whose
/// nodes are the cubes plus one node for the exterior of the grid and whose
/// edges are the squares.
pub(super) fn voids(filt: &Filtration) -> Voids {
    let grid = filt.grid();
    let [n1, n2, n3] = grid.dims();
    let cube_node = |pos: usize| {
        let a = grid.anchor(filt.cell(pos).id);
        ((a[0] * n2 + a[1]) * n3 + a[2]) as u32
    };
    let outside = (n1 * n2 * n3) as u32;

    // Keys run backwards in time, so the oldest member has the largest position.
    let mut keys = vec![0usize; n1 * n2 * n3 + 1];
    keys[outside as usize] = usize::MAX;
    for (pos, cell) in filt.cells().iter().enumerate() {
        if cell.dim == 3 {
            keys[cube_node(pos) as usize] = pos;
        }
    }
    let mut forest = ElderForest::new(keys);

    let mut pairs = Vec::new();
    let mut negative_squares = vec![false; filt.len()];
    for (pos, cell) in filt.cells().iter().enumerate().rev() {
        if cell.dim != 2 {
            continue;
        }
        let mut cubes = filt.coface_positions(pos).map(cube_node);
        let a = cubes.next().unwrap_or(outside);
        let b = cubes.next().unwrap_or(outside);
        let (ra, rb) = (forest.find(a), forest.find(b));
        if ra == rb {
            negative_squares[pos] = true;
            continue;
        }
        let (older, younger) = if forest.key[ra as usize] > forest.key[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        pairs.push((2, pos, Some(forest.key[younger as usize])));
        forest.link(older, younger);
    }
    Voids {
        pairs,
        negative_squares,
    }
}
