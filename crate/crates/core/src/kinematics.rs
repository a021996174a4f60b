//! Per-cell discrete kinematics: deformation gradients, Cauchy-Green
//! tensors, Jacobians, invariants and principal stretches.

use arrayvec::ArrayVec;

use crate::dim::{Dim, Edge, Lattice, Matrix, Vector};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Corner positions of one cell at one time level, in slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct CellJet<const D: usize> {
    pub corners: ArrayVec<Vector<D>, 8>,
}

impl<const D: usize> CellJet<D>
where
    Dim<D>: Lattice<D>,
{
    pub fn gather(mesh: &Mesh<D>, cell: usize, positions: &[Vector<D>]) -> Self {
        CellJet { corners: mesh.cell_corners(cell).iter().map(|&n| positions[n]).collect() }
    }

    /// The undeformed cell with its lowest corner at the origin.
    pub fn reference(spacing: [f64; D]) -> Self {
        let corners = <Dim<D> as Lattice<D>>::CORNER_OFFSETS
            .iter()
            .map(|off| Vector::<D>::from_fn(|k, _| off[k] as f64 * spacing[k]))
            .collect();
        CellJet { corners }
    }

    pub fn map(&self, f: impl Fn(&Vector<D>) -> Vector<D>) -> Self {
        CellJet { corners: self.corners.iter().map(f).collect() }
    }
}

/// One deformation gradient per corner slot.
pub type DefGrad<const D: usize> = ArrayVec<Matrix<D>, 8>;
/// One right Cauchy-Green tensor per corner slot.
pub type CauchyGreen<const D: usize> = ArrayVec<Matrix<D>, 8>;

pub fn edge_vector<const D: usize>(jet: &CellJet<D>, edge: &Edge, spacing: &[f64; D]) -> Vector<D> {
    (jet.corners[edge.tip] - jet.corners[edge.tail]) / spacing[edge.axis]
}

/// Edge vectors of every slot, column by column.
pub fn edge_vectors<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D]) -> ArrayVec<[Vector<D>; D], 8>
where
    Dim<D>: Lattice<D>,
{
    <Dim<D> as Lattice<D>>::EDGES
        .iter()
        .map(|cols| std::array::from_fn(|m| edge_vector(jet, &cols[m], spacing)))
        .collect()
}

pub fn slot_gradient<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D], slot: usize) -> Matrix<D>
where
    Dim<D>: Lattice<D>,
{
    let cols = &<Dim<D> as Lattice<D>>::EDGES[slot];
    let mut f = Matrix::<D>::zeros();
    for (m, edge) in cols.iter().enumerate() {
        f.set_column(m, &edge_vector(jet, edge, spacing));
    }
    f
}

pub fn deformation_gradients<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D]) -> Result<DefGrad<D>>
where
    Dim<D>: Lattice<D>,
{
    let grads: DefGrad<D> = (0..<Dim<D> as Lattice<D>>::CORNERS).map(|s| slot_gradient(jet, spacing, s)).collect();
    if grads.iter().any(|f| f.iter().any(|x| !x.is_finite())) {
        return Err(Error::invalid("positions", "non-finite deformation gradient"));
    }
    Ok(grads)
}

/// `FᵀF` built from column inner products, so it is exactly symmetric.
pub fn right_cauchy_green<const D: usize>(f: &Matrix<D>) -> Matrix<D> {
    let mut c = Matrix::<D>::zeros();
    for i in 0..D {
        for j in i..D {
            let v = f.column(i).dot(&f.column(j));
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    c
}

pub fn cauchy_green<const D: usize>(f: &DefGrad<D>) -> CauchyGreen<D> {
    f.iter().map(right_cauchy_green).collect()
}

/// Signed Jacobian of one slot; nonpositive values are reported as an
/// inverted cell.
pub fn slot_jacobian<const D: usize>(f: &Matrix<D>, slot: usize) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    let j = <Dim<D> as Lattice<D>>::jacobian(f);
    if j > 0.0 {
        Ok(j)
    } else {
        Err(Error::InvertedCell { body: String::new(), cell: None, slot, step: None, jacobian: j })
    }
}

pub fn jacobians<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D]) -> Result<ArrayVec<f64, 8>>
where
    Dim<D>: Lattice<D>,
{
    (0..<Dim<D> as Lattice<D>>::CORNERS).map(|s| slot_jacobian(&slot_gradient(jet, spacing, s), s)).collect()
}

/// Invariants of a symmetric tensor. In 2D only `I₁` and `I₃` are defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Invariants {
    pub i1: f64,
    pub i2: Option<f64>,
    pub i3: f64,
}

pub fn invariants<const D: usize>(c: &Matrix<D>) -> Invariants
where
    Dim<D>: Lattice<D>,
{
    let i1 = c.trace();
    let i3 = <Dim<D> as Lattice<D>>::jacobian(c);
    let i2 = (D == 3).then(|| 0.5 * (i1 * i1 - (c * c).trace()));
    Invariants { i1, i2, i3 }
}

/// Square roots of the eigenvalues of `C`, sorted descending.
pub fn principal_stretches<const D: usize>(c: &Matrix<D>) -> Result<Vector<D>>
where
    Dim<D>: Lattice<D>,
{
    if (c - c.transpose()).amax() > 1e-12 * c.amax() {
        return Err(Error::NotPositiveDefinite);
    }
    let nu = <Dim<D> as Lattice<D>>::sym_eigenvalues(c);
    if nu.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(nu.map(f64::sqrt))
}

/// `∂J_slot/∂φ` for every corner of the cell; corners not touched by the
/// slot's edges get zero.
pub fn jacobian_gradient<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D], slot: usize) -> ArrayVec<Vector<D>, 8>
where
    Dim<D>: Lattice<D>,
{
    let f = slot_gradient(jet, spacing, slot);
    let cof = <Dim<D> as Lattice<D>>::cofactor(&f);
    let mut grad: ArrayVec<Vector<D>, 8> = (0..<Dim<D> as Lattice<D>>::CORNERS).map(|_| Vector::<D>::zeros()).collect();
    scatter_columns::<D>(&cof, slot, spacing, 1.0, &mut grad);
    grad
}

/// Adds `weight · ∂/∂φ` of `Σ_m ⟨G[:,m], F[:,m]⟩` to the corner slots, where
/// the columns of `F` are the slot's edges. This is how any per-slot
/// derivative with respect to `F` reaches the cell's nodes.
pub fn scatter_columns<const D: usize>(
    g: &Matrix<D>,
    slot: usize,
    spacing: &[f64; D],
    weight: f64,
    out: &mut [Vector<D>],
) where
    Dim<D>: Lattice<D>,
{
    for (m, edge) in <Dim<D> as Lattice<D>>::EDGES[slot].iter().enumerate() {
        let col = g.column(m) * (weight / spacing[edge.axis]);
        out[edge.tip] += col;
        out[edge.tail] -= col;
    }
}
