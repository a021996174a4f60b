//! Force assembly and the explicit two-level update.
//!
//! The state of a body is the pair `(φ^j, v^j)` with
//! `v^j = (φ^{j+1} − φ^j)/Δt`. One step moves the positions with the stored
//! velocity and then updates the velocity from the forces at the new
//! positions:
//!
//! ```text
//! φ^{j+1} = φ^j + Δt v^j
//! v^{j+1} = v^j + Δt M⁻¹ F(φ^{j+1})
//! ```

pub mod contact;

use crate::dim::{Dim, Lattice, Vector};
use crate::error::{Error, Result};
use crate::kinematics::{jacobian_gradient, scatter_columns, slot_gradient, slot_jacobian, CellJet};
use crate::materials::{Law, Material};
use crate::mesh::Mesh;

pub use contact::{ContactPair, ContactSettings};

/// Node positions `φ^j` and forward velocities `v^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyState<const D: usize> {
    pub positions: Vec<Vector<D>>,
    pub velocities: Vec<Vector<D>>,
}

/// Nodes held at fixed positions with zero velocity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet<const D: usize> {
    pub nodes: Vec<usize>,
    pub pinned: Vec<Vector<D>>,
}

/// Variational lumped mass: every cell gives `ρ₀·vol/corners` to each corner.
pub fn lumped_mass<const D: usize>(mesh: &Mesh<D>, density: f64) -> Vec<f64>
where
    Dim<D>: Lattice<D>,
{
    let share = density * mesh.cell_volume() / <Dim<D> as Lattice<D>>::CORNERS as f64;
    let mut m = vec![0.0; mesh.num_nodes()];
    for c in 0..mesh.num_cells() {
        for &n in mesh.cell_corners(c) {
            m[n] += share;
        }
    }
    m
}

fn zeros<const D: usize>(n: usize) -> Vec<Vector<D>> {
    vec![Vector::<D>::zeros(); n]
}

fn corner_buffer<const D: usize>() -> [Vector<D>; 8] {
    [Vector::<D>::zeros(); 8]
}

/// Adds `−∂/∂φ Σ_cells vol·ρ₀W_d` to `out`.
pub fn internal_force<const D: usize>(
    mesh: &Mesh<D>,
    law: &Law,
    positions: &[Vector<D>],
    out: &mut [Vector<D>],
) -> Result<()>
where
    Dim<D>: Lattice<D>,
{
    let n = <Dim<D> as Lattice<D>>::CORNERS;
    let spacing = mesh.spacing();
    let weight = -mesh.cell_volume() / n as f64;
    for cell in 0..mesh.num_cells() {
        let jet = CellJet::gather(mesh, cell, positions);
        let mut local = corner_buffer::<D>();
        for slot in 0..n {
            let f = slot_gradient(&jet, &spacing, slot);
            let (_, p) = law.slot_response(&f, slot).map_err(|e| e.in_cell(cell))?;
            scatter_columns(&p, slot, &spacing, weight, &mut local);
        }
        for (k, &node) in mesh.cell_corners(cell).iter().enumerate() {
            out[node] += local[k];
        }
    }
    Ok(())
}

/// `Σ_cells vol·ρ₀W_d`, the energy whose negative gradient is [`internal_force`].
pub fn stored_energy<const D: usize>(mesh: &Mesh<D>, law: &Law, positions: &[Vector<D>]) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    let n = <Dim<D> as Lattice<D>>::CORNERS;
    let spacing = mesh.spacing();
    let mut total = 0.0;
    for cell in 0..mesh.num_cells() {
        let jet = CellJet::gather(mesh, cell, positions);
        for slot in 0..n {
            let f = slot_gradient(&jet, &spacing, slot);
            let (w, _) = law.slot_response(&f, slot).map_err(|e| e.in_cell(cell))?;
            total += w;
        }
    }
    Ok(total * mesh.cell_volume() / n as f64)
}

/// Adds `−∂/∂φ Σ_cells vol·¼Σ(r/2)(J−1)²` (⅛ in 3D) to `out`.
pub fn incompressibility_force<const D: usize>(
    mesh: &Mesh<D>,
    r: f64,
    positions: &[Vector<D>],
    out: &mut [Vector<D>],
) -> Result<()>
where
    Dim<D>: Lattice<D>,
{
    if r == 0.0 {
        return Ok(());
    }
    let n = <Dim<D> as Lattice<D>>::CORNERS;
    let spacing = mesh.spacing();
    let weight = -mesh.cell_volume() / n as f64 * r;
    for cell in 0..mesh.num_cells() {
        let jet = CellJet::gather(mesh, cell, positions);
        let corners = mesh.cell_corners(cell);
        for slot in 0..n {
            let j = slot_jacobian(&slot_gradient(&jet, &spacing, slot), slot).map_err(|e| e.in_cell(cell))?;
            let grad = jacobian_gradient(&jet, &spacing, slot);
            for (k, &node) in corners.iter().enumerate() {
                out[node] += grad[k] * (weight * (j - 1.0));
            }
        }
    }
    Ok(())
}

pub fn incompressibility_energy<const D: usize>(mesh: &Mesh<D>, r: f64, positions: &[Vector<D>]) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    if r == 0.0 {
        return Ok(0.0);
    }
    let n = <Dim<D> as Lattice<D>>::CORNERS;
    let spacing = mesh.spacing();
    let mut total = 0.0;
    for cell in 0..mesh.num_cells() {
        let jet = CellJet::gather(mesh, cell, positions);
        for slot in 0..n {
            let j = slot_jacobian(&slot_gradient(&jet, &spacing, slot), slot).map_err(|e| e.in_cell(cell))?;
            total += 0.5 * r * (j - 1.0) * (j - 1.0);
        }
    }
    Ok(total * mesh.cell_volume() / n as f64)
}

/// Adds `−m·g` to every node.
pub fn gravity_force<const D: usize>(mass: &[f64], g: &Vector<D>, out: &mut [Vector<D>]) {
    for (f, &m) in out.iter_mut().zip(mass) {
        *f -= g * m;
    }
}

pub fn gravity_energy<const D: usize>(mass: &[f64], g: &Vector<D>, positions: &[Vector<D>]) -> f64 {
    mass.iter().zip(positions).map(|(&m, x)| m * g.dot(x)).sum()
}

/// A solid or fluid body on its own lattice.
#[derive(Clone, Debug)]
pub struct Body<const D: usize> {
    pub name: String,
    pub mesh: Mesh<D>,
    pub material: Material,
    pub mass: Vec<f64>,
    pub constraints: ConstraintSet<D>,
    pub state: BodyState<D>,
    pinned: Vec<bool>,
}

impl<const D: usize> Body<D>
where
    Dim<D>: Lattice<D>,
{
    /// A body placed on its reference lattice with uniform initial velocity
    /// and the given nodes pinned at their reference positions.
    pub fn new(
        name: impl Into<String>,
        mesh: Mesh<D>,
        material: Material,
        velocity: Vector<D>,
        fixed: &[usize],
    ) -> Result<Self> {
        let name = name.into();
        let positions = mesh.reference_positions();
        let n = positions.len();
        let mut pinned = vec![false; n];
        for &f in fixed {
            if f >= n {
                return Err(Error::invalid(format!("{name}.fixed"), format!("node {f} does not exist")));
            }
            pinned[f] = true;
        }
        let nodes: Vec<usize> = (0..n).filter(|&i| pinned[i]).collect();
        let constraints = ConstraintSet { pinned: nodes.iter().map(|&i| positions[i]).collect(), nodes };
        let velocities = (0..n).map(|i| if pinned[i] { Vector::<D>::zeros() } else { velocity }).collect();
        let mass = lumped_mass(&mesh, material.law.density());
        Ok(Body { name, mesh, material, mass, constraints, state: BodyState { positions, velocities }, pinned })
    }

    pub fn is_fluid(&self) -> bool {
        self.material.law.is_fluid()
    }

    pub fn is_pinned(&self, node: usize) -> bool {
        self.pinned[node]
    }

    /// Replace the state; velocities of pinned nodes are forced to zero and
    /// their positions to the pinned values.
    pub fn set_state(&mut self, mut state: BodyState<D>) -> Result<()> {
        let n = self.mesh.num_nodes();
        if state.positions.len() != n || state.velocities.len() != n {
            return Err(Error::invalid(format!("{}.state", self.name), "length does not match the mesh"));
        }
        for (&node, x) in self.constraints.nodes.iter().zip(&self.constraints.pinned) {
            state.positions[node] = *x;
            state.velocities[node] = Vector::<D>::zeros();
        }
        self.state = state;
        Ok(())
    }

    /// Internal plus incompressibility force at the current positions.
    pub fn elastic_force(&self, out: &mut [Vector<D>]) -> Result<()> {
        internal_force(&self.mesh, &self.material.law, &self.state.positions, out)?;
        incompressibility_force(&self.mesh, self.material.penalty, &self.state.positions, out)
    }
}

/// All bodies plus the shared loads and the current contact pairs.
#[derive(Clone, Debug)]
pub struct System<const D: usize> {
    pub bodies: Vec<Body<D>>,
    pub gravity: Vector<D>,
    pub contact: ContactSettings,
    pub dt: f64,
    pub step: usize,
    pairs: Vec<ContactPair>,
}

impl<const D: usize> System<D>
where
    Dim<D>: Lattice<D>,
{
    /// Sets up step 0 and rejects initial interpenetration.
    pub fn new(bodies: Vec<Body<D>>, gravity: Vector<D>, contact: ContactSettings, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("time.dt", "must be positive"));
        }
        let pairs = contact::detect(&bodies, &contact);
        for pair in &pairs {
            let psi = contact::gap(pair, &bodies);
            if psi < 0.0 {
                return Err(Error::Overlap {
                    fluid: bodies[pair.fluid_body].name.clone(),
                    fluid_node: pair.fluid_node,
                    solid: bodies[pair.solid_body].name.clone(),
                    psi,
                });
            }
        }
        Ok(System { bodies, gravity, contact, dt, step: 0, pairs })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    /// Contact pairs detected at the current positions.
    pub fn pairs(&self) -> &[ContactPair] {
        &self.pairs
    }

    pub fn redetect(&mut self) {
        self.pairs = contact::detect(&self.bodies, &self.contact);
    }

    /// Total force on every node of every body at the current positions.
    pub fn forces(&self) -> Result<Vec<Vec<Vector<D>>>> {
        let mut out: Vec<Vec<Vector<D>>> = self.bodies.iter().map(|b| zeros(b.mesh.num_nodes())).collect();
        for (b, f) in self.bodies.iter().zip(out.iter_mut()) {
            b.elastic_force(f).map_err(|e| e.in_body(&b.name, self.step))?;
            gravity_force(&b.mass, &self.gravity, f);
        }
        contact::contact_force(&self.pairs, &self.bodies, &mut out);
        Ok(out)
    }

    /// Advances one time level.
    pub fn advance(&mut self) -> Result<()> {
        let dt = self.dt;
        let next = self.step + 1;
        for b in &mut self.bodies {
            let BodyState { positions, velocities } = &mut b.state;
            for (i, (x, v)) in positions.iter_mut().zip(velocities.iter()).enumerate() {
                if !b.pinned[i] {
                    *x += v * dt;
                }
            }
            if positions.iter().any(|x| x.iter().any(|c| !c.is_finite())) {
                return Err(Error::NonFinite { body: b.name.clone(), step: next });
            }
        }
        self.step = next;
        self.redetect();
        let forces = self.forces()?;
        for (b, f) in self.bodies.iter_mut().zip(forces) {
            for (i, v) in b.state.velocities.iter_mut().enumerate() {
                if !b.pinned[i] {
                    *v += f[i] * (dt / b.mass[i]);
                }
            }
            for (&node, x) in b.constraints.nodes.iter().zip(&b.constraints.pinned) {
                b.state.positions[node] = *x;
                b.state.velocities[node] = Vector::<D>::zeros();
            }
            if b.state.velocities.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
                return Err(Error::NonFinite { body: b.name.clone(), step: next });
            }
        }
        Ok(())
    }

    /// Potential energy `Σ vol(ρ₀W_d + Φ_in) + Σ ½KΨ²` whose negative
    /// gradient is the non-gravitational part of [`System::forces`].
    pub fn potential_energy(&self) -> Result<f64> {
        let mut e = contact::contact_energy(&self.pairs, &self.bodies);
        for b in &self.bodies {
            e += stored_energy(&b.mesh, &b.material.law, &b.state.positions)?;
            e += incompressibility_energy(&b.mesh, b.material.penalty, &b.state.positions)?;
        }
        Ok(e)
    }
}
