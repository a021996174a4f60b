//! Regular lattices of quadrilateral (2D) or hexahedral (3D) cells.
//!
//! Nodes are stored row-major with the first lattice index varying fastest.
//! A mesh may drop cells of its bounding lattice (to build a container, for
//! instance); nodes touched by no remaining cell are dropped with them and
//! the survivors keep row-major order.

use arrayvec::ArrayVec;

use crate::dim::{Dim, Edge, Lattice, Side, Vector};
use crate::error::{Error, Result};

/// Spatial description of a body's reference lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<const D: usize> {
    /// Nodes per axis (`A+1`, `B+1`, ...).
    pub counts: [usize; D],
    /// Lattice spacing per axis in metres.
    pub spacing: [f64; D],
    /// Reference position of node `(0, .., 0)`.
    pub origin: Vector<D>,
}

impl<const D: usize> GridSpec<D> {
    pub fn new(counts: [usize; D], spacing: [f64; D]) -> Self {
        GridSpec { counts, spacing, origin: Vector::<D>::zeros() }
    }

    pub fn with_origin(mut self, origin: Vector<D>) -> Self {
        self.origin = origin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.counts.iter().position(|&c| c < 2) {
            return Err(Error::InvalidGrid(format!("axis {k} has {} nodes, need at least 2", self.counts[k])));
        }
        if let Some(k) = self.spacing.iter().position(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid(format!("axis {k} spacing {} must be positive", self.spacing[k])));
        }
        if self.origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(())
    }

    /// Largest lattice index per axis (`A`, `B`, ...).
    pub fn max_index(&self) -> [usize; D] {
        self.counts.map(|c| c - 1)
    }
}

/// The edge table of a dimension: per slot, per column, `(tail, tip, axis)`.
pub fn edge_incidence<const D: usize>() -> &'static [[Edge; D]]
where
    Dim<D>: Lattice<D>,
{
    <Dim<D> as Lattice<D>>::EDGES
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell<const D: usize> {
    /// Lattice index of the lowest corner.
    pub lowest: [usize; D],
    /// Node ids in slot order; only the first `CORNERS` entries are used.
    pub corners: [usize; 8],
}

/// A boundary segment (2D, `[tail, tip]`) or face (3D, four corners in
/// cyclic order) with the lattice side it faces.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub nodes: ArrayVec<usize, 4>,
    pub side: Side,
    pub cell: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundarySet {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug)]
pub struct Mesh<const D: usize> {
    spec: GridSpec<D>,
    node_coords: Vec<[usize; D]>,
    lattice_to_node: Vec<usize>,
    cells: Vec<Cell<D>>,
    cell_of_lattice: Vec<usize>,
    boundary: BoundarySet,
}

const MISSING: usize = usize::MAX;

impl<const D: usize> Mesh<D>
where
    Dim<D>: Lattice<D>,
{
    /// Full lattice: every cell of the grid is present.
    pub fn new(spec: GridSpec<D>) -> Result<Self> {
        Self::with_cells(spec, |_| true)
    }

    /// Lattice restricted to the cells whose lowest corner satisfies `keep`.
    pub fn with_cells(spec: GridSpec<D>, keep: impl Fn([usize; D]) -> bool) -> Result<Self> {
        spec.validate()?;
        let cell_counts = spec.counts.map(|c| c - 1);
        let total_cells: usize = cell_counts.iter().product();
        let total_nodes: usize = spec.counts.iter().product();
        let offsets = <Dim<D> as Lattice<D>>::CORNER_OFFSETS;

        let mut kept = vec![false; total_cells];
        let mut used = vec![false; total_nodes];
        for (flat, k) in kept.iter_mut().enumerate() {
            let low = unflatten(flat, &cell_counts);
            if keep(low) {
                *k = true;
                for off in offsets {
                    used[flatten(&add(&low, off), &spec.counts)] = true;
                }
            }
        }
        if !kept.iter().any(|&k| k) {
            return Err(Error::InvalidGrid("no cells left".into()));
        }

        let mut lattice_to_node = vec![MISSING; total_nodes];
        let mut node_coords = Vec::new();
        for (flat, &u) in used.iter().enumerate() {
            if u {
                lattice_to_node[flat] = node_coords.len();
                node_coords.push(unflatten(flat, &spec.counts));
            }
        }

        let mut cell_of_lattice = vec![MISSING; total_cells];
        let mut cells = Vec::new();
        for (flat, &k) in kept.iter().enumerate() {
            if !k {
                continue;
            }
            let low = unflatten(flat, &cell_counts);
            let mut corners = [0usize; 8];
            for (slot, off) in offsets.iter().enumerate() {
                corners[slot] = lattice_to_node[flatten(&add(&low, off), &spec.counts)];
            }
            cell_of_lattice[flat] = cells.len();
            cells.push(Cell { lowest: low, corners });
        }

        let boundary = classify::<D>(&cells, &cell_counts, &cell_of_lattice, node_coords.len());
        Ok(Mesh { spec, node_coords, lattice_to_node, cells, cell_of_lattice, boundary })
    }

    pub fn spec(&self) -> &GridSpec<D> {
        &self.spec
    }

    pub fn counts(&self) -> [usize; D] {
        self.spec.counts
    }

    pub fn spacing(&self) -> [f64; D] {
        self.spec.spacing
    }

    pub fn max_index(&self) -> [usize; D] {
        self.spec.max_index()
    }

    pub fn num_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// True when no cell of the bounding lattice was dropped.
    pub fn is_full(&self) -> bool {
        self.cells.len() == self.spec.counts.iter().map(|c| c - 1).product::<usize>()
    }

    pub fn node_coords(&self, node: usize) -> [usize; D] {
        self.node_coords[node]
    }

    pub fn node_at(&self, coords: [usize; D]) -> Option<usize> {
        if coords.iter().zip(&self.spec.counts).any(|(&i, &n)| i >= n) {
            return None;
        }
        match self.lattice_to_node[flatten(&coords, &self.spec.counts)] {
            MISSING => None,
            n => Some(n),
        }
    }

    /// Cell whose lowest corner has the given lattice coordinates.
    pub fn cell_at(&self, lowest: [usize; D]) -> Option<usize> {
        let cell_counts = self.spec.counts.map(|c| c - 1);
        if lowest.iter().zip(&cell_counts).any(|(&i, &n)| i >= n) {
            return None;
        }
        match self.cell_of_lattice[flatten(&lowest, &cell_counts)] {
            MISSING => None,
            c => Some(c),
        }
    }

    pub fn cells(&self) -> &[Cell<D>] {
        &self.cells
    }

    /// Corner node ids of a cell in slot order.
    pub fn cell_corners(&self, cell: usize) -> &[usize] {
        &self.cells[cell].corners[..<Dim<D> as Lattice<D>>::CORNERS]
    }

    /// Reference area (2D) or volume (3D) of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spec.spacing.iter().product()
    }

    pub fn reference_position(&self, node: usize) -> Vector<D> {
        let c = self.node_coords[node];
        Vector::<D>::from_fn(|k, _| self.spec.origin[k] + c[k] as f64 * self.spec.spacing[k])
    }

    pub fn reference_positions(&self) -> Vec<Vector<D>> {
        (0..self.num_nodes()).map(|n| self.reference_position(n)).collect()
    }

    pub fn boundary(&self) -> &BoundarySet {
        &self.boundary
    }
}

fn add<const D: usize>(a: &[usize; D], b: &[usize; D]) -> [usize; D] {
    std::array::from_fn(|k| a[k] + b[k])
}

fn flatten<const D: usize>(idx: &[usize; D], counts: &[usize; D]) -> usize {
    let mut flat = 0;
    for k in (0..D).rev() {
        flat = flat * counts[k] + idx[k];
    }
    flat
}

fn unflatten<const D: usize>(mut flat: usize, counts: &[usize; D]) -> [usize; D] {
    let mut idx = [0; D];
    for k in 0..D {
        idx[k] = flat % counts[k];
        flat /= counts[k];
    }
    idx
}

// Corner slots of each side, ordered as the facet wants them: 2D segments
// so that the +π/2 rotation of tip − tail points outward, 3D faces cyclic
// with (q1 − q0) × (q3 − q0) outward and q0 the lowest lattice corner.
fn side_slots(dim: usize, side: Side) -> &'static [usize] {
    match (dim, side) {
        (2, Side::YMax) => &[2, 3],
        (2, Side::YMin) => &[1, 0],
        (2, Side::XMax) => &[3, 1],
        (2, Side::XMin) => &[0, 2],
        (3, Side::ZMax) => &[3, 6, 7, 5],
        (3, Side::ZMin) => &[0, 2, 4, 1],
        (3, Side::XMax) => &[1, 4, 7, 6],
        (3, Side::XMin) => &[0, 3, 5, 2],
        (3, Side::YMax) => &[2, 5, 7, 4],
        (3, Side::YMin) => &[0, 1, 6, 3],
        _ => unreachable!("side {side:?} does not exist in {dim}D"),
    }
}

fn classify<const D: usize>(
    cells: &[Cell<D>],
    cell_counts: &[usize; D],
    cell_of_lattice: &[usize],
    num_nodes: usize,
) -> BoundarySet {
    let mut on_boundary = vec![false; num_nodes];
    let mut facets = Vec::new();
    for (id, cell) in cells.iter().enumerate() {
        for axis in 0..D {
            for max in [false, true] {
                let neighbour = if max {
                    (cell.lowest[axis] + 1 < cell_counts[axis]).then(|| {
                        let mut n = cell.lowest;
                        n[axis] += 1;
                        n
                    })
                } else {
                    (cell.lowest[axis] > 0).then(|| {
                        let mut n = cell.lowest;
                        n[axis] -= 1;
                        n
                    })
                };
                let exposed = match neighbour {
                    None => true,
                    Some(n) => cell_of_lattice[flatten(&n, cell_counts)] == MISSING,
                };
                if exposed {
                    let side = Side::from_axis(axis, max);
                    let nodes: ArrayVec<usize, 4> = side_slots(D, side).iter().map(|&s| cell.corners[s]).collect();
                    for &n in &nodes {
                        on_boundary[n] = true;
                    }
                    facets.push(Facet { nodes, side, cell: id });
                }
            }
        }
    }
    let (boundary, interior): (Vec<usize>, Vec<usize>) = (0..num_nodes).partition(|&n| on_boundary[n]);
    BoundarySet { interior, boundary, facets }
}
