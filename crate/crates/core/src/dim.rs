//! Dimension-specific geometry shared by the 2D and 3D lattices.
//!
//! Everything that differs between the quadrilateral and hexahedral
//! discretizations lives behind [`Lattice`], implemented for [`Dim<2>`] and
//! [`Dim<3>`]. Generic code carries the bound `Dim<D>: Lattice<D>`.

use arrayvec::ArrayVec;
use nalgebra::{Matrix2, Matrix3, SMatrix, SVector, Vector2, Vector3};

pub type Vector<const D: usize> = SVector<f64, D>;
pub type Matrix<const D: usize> = SMatrix<f64, D, D>;

/// One column of a slot's deformation gradient: `(φ[tip] − φ[tail]) / Δs[axis]`.
///
/// `tail` and `tip` are corner slot indices (0-based) inside the cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub tip: usize,
    pub axis: usize,
}

const fn e(tail: usize, tip: usize, axis: usize) -> Edge {
    Edge { tail, tip, axis }
}

/// Which side of the reference lattice a boundary facet lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Side {
    pub fn axis(self) -> usize {
        match self {
            Side::XMin | Side::XMax => 0,
            Side::YMin | Side::YMax => 1,
            Side::ZMin | Side::ZMax => 2,
        }
    }

    pub fn is_max(self) -> bool {
        matches!(self, Side::XMax | Side::YMax | Side::ZMax)
    }

    pub fn from_axis(axis: usize, max: bool) -> Side {
        match (axis, max) {
            (0, false) => Side::XMin,
            (0, true) => Side::XMax,
            (1, false) => Side::YMin,
            (1, true) => Side::YMax,
            (2, false) => Side::ZMin,
            _ => Side::ZMax,
        }
    }
}

/// Solid nodes entering one impenetrability constraint, plus its family tag.
///
/// 2D: `[tail, tip]` of a boundary segment. 3D: `[anchor, n1, n2]`, the
/// corner of a boundary face and its two face neighbours, ordered so that
/// `(n1 − anchor) × (n2 − anchor)` points outward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stencil {
    pub nodes: ArrayVec<usize, 3>,
    pub family: u8,
}

/// Marker type selecting the 2D or 3D lattice.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dim<const D: usize>;

pub trait Lattice<const D: usize>: Send + Sync + 'static {
    /// Corner nodes per cell (4 or 8).
    const CORNERS: usize;
    /// Lattice offset of each corner slot relative to the cell's lowest corner.
    const CORNER_OFFSETS: &'static [[usize; D]];
    /// For each slot, the edges forming the columns of its deformation gradient.
    const EDGES: &'static [[Edge; D]];
    /// Number of angular momentum components (1 or 3).
    const ANGULAR: usize;

    /// Signed area/volume spanned by the columns: cross product in 2D,
    /// triple product in 3D.
    fn jacobian(f: &Matrix<D>) -> f64;
    /// Derivative of [`Lattice::jacobian`] with respect to each entry of `f`.
    fn cofactor(f: &Matrix<D>) -> Matrix<D>;
    /// Inverse through the adjugate; `None` when the determinant vanishes.
    fn inverse(m: &Matrix<D>) -> Option<Matrix<D>>;
    /// Eigenvalues of a symmetric matrix, sorted descending.
    fn sym_eigenvalues(c: &Matrix<D>) -> Vector<D>;
    /// Angular momentum `x × p`; the first `ANGULAR` entries are meaningful.
    fn angular(x: &Vector<D>, p: &Vector<D>) -> [f64; 3];

    /// Impenetrability function of a fluid point against a solid stencil.
    fn gap(solid: &[Vector<D>], fluid: &Vector<D>) -> f64;
    /// Gradient of [`Lattice::gap`]: writes the solid node gradients into
    /// `solid_grad` and returns the fluid node gradient.
    fn gap_gradient(solid: &[Vector<D>], fluid: &Vector<D>, solid_grad: &mut [Vector<D>]) -> Vector<D>;
    /// Euclidean distance from `x` to a boundary facet given by its positions.
    fn facet_distance(facet: &[Vector<D>], x: &Vector<D>) -> f64;
    /// Constraint stencils generated by one boundary facet.
    fn facet_stencils(facet: &[usize], side: Side) -> ArrayVec<Stencil, 4>;
}

// Slot order: 1 ↔ (0,0), 2 ↔ (1,0), 3 ↔ (0,1), 4 ↔ (1,1).
const OFFSETS_2D: [[usize; 2]; 4] = [[0, 0], [1, 0], [0, 1], [1, 1]];

// Each slot's columns walk around the cell counter-clockwise, so every
// slot has det F = +1 on the reference lattice.
const EDGES_2D: [[Edge; 2]; 4] =
    [[e(0, 1, 0), e(0, 2, 1)], [e(1, 3, 1), e(1, 0, 0)], [e(2, 0, 1), e(2, 3, 0)], [e(3, 2, 0), e(3, 1, 1)]];

// Slot order: 1 ↔ 000, 2 ↔ 100, 3 ↔ 010, 4 ↔ 001, 5 ↔ 110, 6 ↔ 011, 7 ↔ 101, 8 ↔ 111
// (offsets listed as abc).
const OFFSETS_3D: [[usize; 3]; 8] =
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]];

const EDGES_3D: [[Edge; 3]; 8] = [
    [e(0, 1, 0), e(0, 2, 1), e(0, 3, 2)],
    [e(1, 4, 1), e(1, 0, 0), e(1, 6, 2)],
    [e(2, 0, 1), e(2, 4, 0), e(2, 5, 2)],
    [e(3, 5, 1), e(3, 6, 0), e(3, 0, 2)],
    [e(4, 2, 0), e(4, 1, 1), e(4, 7, 2)],
    [e(5, 7, 0), e(5, 3, 1), e(5, 2, 2)],
    [e(6, 3, 0), e(6, 7, 1), e(6, 1, 2)],
    [e(7, 6, 1), e(7, 5, 0), e(7, 4, 2)],
];

/// +π/2 rotation in the plane.
pub fn rot90(v: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

impl Lattice<2> for Dim<2> {
    const CORNERS: usize = 4;
    const CORNER_OFFSETS: &'static [[usize; 2]] = &OFFSETS_2D;
    const EDGES: &'static [[Edge; 2]] = &EDGES_2D;
    const ANGULAR: usize = 1;

    fn jacobian(f: &Matrix2<f64>) -> f64 {
        f[(0, 0)] * f[(1, 1)] - f[(1, 0)] * f[(0, 1)]
    }

    fn cofactor(f: &Matrix2<f64>) -> Matrix2<f64> {
        Matrix2::new(f[(1, 1)], -f[(1, 0)], -f[(0, 1)], f[(0, 0)])
    }

    fn inverse(m: &Matrix2<f64>) -> Option<Matrix2<f64>> {
        let det = Self::jacobian(m);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self::cofactor(m).transpose() / det)
    }

    fn sym_eigenvalues(c: &Matrix2<f64>) -> Vector2<f64> {
        let mean = 0.5 * (c[(0, 0)] + c[(1, 1)]);
        let half_diff = 0.5 * (c[(0, 0)] - c[(1, 1)]);
        let off = 0.5 * (c[(0, 1)] + c[(1, 0)]);
        let r = half_diff.hypot(off);
        Vector2::new(mean + r, mean - r)
    }

    fn angular(x: &Vector2<f64>, p: &Vector2<f64>) -> [f64; 3] {
        [x.x * p.y - x.y * p.x, 0.0, 0.0]
    }

    fn gap(solid: &[Vector2<f64>], fluid: &Vector2<f64>) -> f64 {
        let (tail, tip) = (solid[0], solid[1]);
        (fluid - tip).dot(&rot90(&(tip - tail)))
    }

    fn gap_gradient(solid: &[Vector2<f64>], fluid: &Vector2<f64>, solid_grad: &mut [Vector2<f64>]) -> Vector2<f64> {
        let (tail, tip) = (solid[0], solid[1]);
        let d_fluid = rot90(&(tip - tail));
        let d_tail = rot90(&(fluid - tip));
        solid_grad[0] = d_tail;
        solid_grad[1] = -(d_fluid + d_tail);
        d_fluid
    }

    fn facet_distance(facet: &[Vector2<f64>], x: &Vector2<f64>) -> f64 {
        let (p, q) = (facet[0], facet[1]);
        let d = q - p;
        let len2 = d.norm_squared();
        let t = if len2 > 0.0 { ((x - p).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
        (x - (p + d * t)).norm()
    }

    fn facet_stencils(facet: &[usize], side: Side) -> ArrayVec<Stencil, 4> {
        let family = match side {
            Side::YMax => 1,
            Side::XMax => 2,
            Side::XMin => 3,
            _ => 4,
        };
        let mut out = ArrayVec::new();
        out.push(Stencil { nodes: facet.iter().copied().collect(), family });
        out
    }
}

impl Lattice<3> for Dim<3> {
    const CORNERS: usize = 8;
    const CORNER_OFFSETS: &'static [[usize; 3]] = &OFFSETS_3D;
    const EDGES: &'static [[Edge; 3]] = &EDGES_3D;
    const ANGULAR: usize = 3;

    fn jacobian(f: &Matrix3<f64>) -> f64 {
        f.column(0).cross(&f.column(1)).dot(&f.column(2))
    }

    fn cofactor(f: &Matrix3<f64>) -> Matrix3<f64> {
        let (c0, c1, c2) = (f.column(0), f.column(1), f.column(2));
        Matrix3::from_columns(&[c1.cross(&c2), c2.cross(&c0), c0.cross(&c1)])
    }

    fn inverse(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
        let det = Self::jacobian(m);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self::cofactor(m).transpose() / det)
    }

    fn sym_eigenvalues(c: &Matrix3<f64>) -> Vector3<f64> {
        let mut v = jacobi_eigenvalues(c);
        v.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn angular(x: &Vector3<f64>, p: &Vector3<f64>) -> [f64; 3] {
        let l = x.cross(p);
        [l.x, l.y, l.z]
    }

    fn gap(solid: &[Vector3<f64>], fluid: &Vector3<f64>) -> f64 {
        let p = solid[0];
        (fluid - p).dot(&(solid[1] - p).cross(&(solid[2] - p)))
    }

    fn gap_gradient(solid: &[Vector3<f64>], fluid: &Vector3<f64>, solid_grad: &mut [Vector3<f64>]) -> Vector3<f64> {
        let p = solid[0];
        let (u, w, r) = (solid[1] - p, solid[2] - p, fluid - p);
        let d_fluid = u.cross(&w);
        let d_u = w.cross(&r);
        let d_w = r.cross(&u);
        solid_grad[0] = -(d_fluid + d_u + d_w);
        solid_grad[1] = d_u;
        solid_grad[2] = d_w;
        d_fluid
    }

    fn facet_distance(facet: &[Vector3<f64>], x: &Vector3<f64>) -> f64 {
        let d1 = point_triangle_distance(x, &facet[0], &facet[1], &facet[2]);
        let d2 = point_triangle_distance(x, &facet[0], &facet[2], &facet[3]);
        d1.min(d2)
    }

    fn facet_stencils(facet: &[usize], _side: Side) -> ArrayVec<Stencil, 4> {
        // Families are numbered as on a top face whose first corner is the
        // lowest lattice corner: that corner pairs (+x,+y) and is family 4.
        const FAMILY: [u8; 4] = [4, 3, 1, 2];
        (0..4)
            .map(|k| {
                let mut nodes = ArrayVec::new();
                nodes.push(facet[k]);
                nodes.push(facet[(k + 1) % 4]);
                nodes.push(facet[(k + 3) % 4]);
                Stencil { nodes, family: FAMILY[k] }
            })
            .collect()
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass drops below 1e-14
/// relative to the Frobenius norm.
pub fn jacobi_eigenvalues(c: &Matrix3<f64>) -> Vector3<f64> {
    let mut a = (c + c.transpose()) * 0.5;
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..64 {
        let off = (a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2)).sqrt();
        if off <= 1e-14 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let cs = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * cs;
            let mut rot = Matrix3::identity();
            rot[(p, p)] = cs;
            rot[(q, q)] = cs;
            rot[(p, q)] = sn;
            rot[(q, p)] = -sn;
            a = rot.transpose() * a * rot;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
        }
    }
    Vector3::new(a[(0, 0)], a[(1, 1)], a[(2, 2)])
}

fn point_triangle_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}
