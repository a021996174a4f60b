//! Momentum maps, energy accounting, boundary pressure resultants, L2
//! errors and observed convergence rates.

use nalgebra::Vector2;

use crate::dim::{rot90, Dim, Lattice, Vector};
use crate::error::{Error, Result};
use crate::integrator::{contact, gravity_energy, incompressibility_energy, stored_energy, Body, System};
use crate::kinematics::{slot_gradient, slot_jacobian, CellJet};
use crate::materials::{tait_pressure, TaitParams};
use crate::mesh::Mesh;

/// Discrete classical momentum map: angular components first, then linear.
///
/// In 2D there is one angular component (`J₁`) and two linear ones; in 3D
/// three of each.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSE {
    pub angular: Vec<f64>,
    pub linear: Vec<f64>,
}

impl MomentumSE {
    fn zero<const D: usize>() -> Self
    where
        Dim<D>: Lattice<D>,
    {
        MomentumSE { angular: vec![0.0; <Dim<D> as Lattice<D>>::ANGULAR], linear: vec![0.0; D] }
    }

    fn add<const D: usize>(&mut self, x: &Vector<D>, p: &Vector<D>)
    where
        Dim<D>: Lattice<D>,
    {
        let l = <Dim<D> as Lattice<D>>::angular(x, p);
        for (a, v) in self.angular.iter_mut().zip(l) {
            *a += v;
        }
        for (a, v) in self.linear.iter_mut().zip(p.iter()) {
            *a += v;
        }
    }

    /// `J₁, J₂, …` in order.
    pub fn components(&self) -> Vec<f64> {
        self.angular.iter().chain(&self.linear).copied().collect()
    }

    pub fn angular_norm(&self) -> f64 {
        self.angular.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn linear_norm(&self) -> f64 {
        self.linear.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &MomentumSE) -> f64 {
        self.components().iter().zip(other.components()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Node-lumped form `Σ m (φ × v, v)`.
pub fn momentum_map<const D: usize>(bodies: &[Body<D>]) -> MomentumSE
where
    Dim<D>: Lattice<D>,
{
    let mut j = MomentumSE::zero::<D>();
    for b in bodies {
        for ((x, v), &m) in b.state.positions.iter().zip(&b.state.velocities).zip(&b.mass) {
            j.add(x, &(v * m));
        }
    }
    j
}

/// Cell-sum form: every cell gives `(φ × (M/corners) v, (M/corners) v)` at
/// each of its corners, with `M = ρ₀·vol` the cell mass.
pub fn momentum_map_cells<const D: usize>(bodies: &[Body<D>]) -> MomentumSE
where
    Dim<D>: Lattice<D>,
{
    let corners = <Dim<D> as Lattice<D>>::CORNERS as f64;
    let mut j = MomentumSE::zero::<D>();
    for b in bodies {
        let share = b.material.law.density() * b.mesh.cell_volume() / corners;
        for c in 0..b.mesh.num_cells() {
            for &n in b.mesh.cell_corners(c) {
                j.add(&b.state.positions[n], &(b.state.velocities[n] * share));
            }
        }
    }
    j
}

/// Energy parts of a system at its current time level.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub stored_solid: f64,
    pub stored_fluid: f64,
    pub gravitational: f64,
    pub incompressibility: f64,
    pub contact: f64,
    pub total: f64,
}

/// Kinetic energy from `v^j`, all potentials at `φ^j`.
pub fn total_energy<const D: usize>(system: &System<D>) -> Result<EnergyBreakdown>
where
    Dim<D>: Lattice<D>,
{
    let mut e = EnergyBreakdown::default();
    for b in &system.bodies {
        let x = &b.state.positions;
        e.kinetic += b.state.velocities.iter().zip(&b.mass).map(|(v, &m)| 0.5 * m * v.norm_squared()).sum::<f64>();
        let w = stored_energy(&b.mesh, &b.material.law, x)?;
        if b.is_fluid() {
            e.stored_fluid += w;
        } else {
            e.stored_solid += w;
        }
        e.gravitational += gravity_energy(&b.mass, &system.gravity, x);
        e.incompressibility += incompressibility_energy(&b.mesh, b.material.penalty, x)?;
    }
    e.contact = contact::contact_energy(system.pairs(), &system.bodies);
    e.total = e.kinetic + e.stored_solid + e.stored_fluid + e.gravitational + e.incompressibility + e.contact;
    Ok(e)
}

/// `(E − E₀)/|E₀|`, with the denominator floored at 1e-30.
pub fn relative_energy(initial: f64, current: f64) -> f64 {
    (current - initial) / initial.abs().max(1e-30)
}

/// Which vertical boundary of a 2D fluid block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallSide {
    Left,
    Right,
}

/// Pressure definition used in the boundary resultant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PressureKind {
    /// `Ã J^{−γ}`.
    #[default]
    Stiffness,
    /// `Ã J^{−γ} − B`.
    Tait,
}

fn slot_pressure(
    mesh: &Mesh<2>,
    positions: &[Vector<2>],
    cell: usize,
    slot: usize,
    p: &TaitParams,
    kind: PressureKind,
) -> Result<f64> {
    let jet = CellJet::gather(mesh, cell, positions);
    let j = slot_jacobian::<2>(&slot_gradient(&jet, &mesh.spacing(), slot), slot).map_err(|e| e.in_cell(cell))?;
    Ok(match kind {
        PressureKind::Stiffness => p.a_tilde * j.powf(-p.gamma),
        PressureKind::Tait => tait_pressure(j, p),
    })
}

/// Resultant of the slot pressures acting on the left or right boundary of
/// a full 2D fluid lattice.
///
/// For each boundary node `d = 1..B−1` the two adjacent boundary edges carry
/// `P_ℓ/4` times the edge rotated by +90°, which for the boundary traversal
/// used here is the outward normal scaled by the edge length. On the right
/// the slots are 2 (cell above) and 4 (cell below); on the left 1 and 3.
pub fn boundary_pressure_resultant(
    mesh: &Mesh<2>,
    params: &TaitParams,
    positions: &[Vector<2>],
    side: WallSide,
    kind: PressureKind,
) -> Result<Vector2<f64>> {
    if !mesh.is_full() {
        return Err(Error::invalid("fluid", "boundary resultant needs a full lattice"));
    }
    if positions.len() != mesh.num_nodes() {
        return Err(Error::invalid("positions", "length does not match the mesh"));
    }
    let [a_max, b_max] = mesh.max_index();
    let node = |a: usize, b: usize| positions[mesh.node_at([a, b]).expect("full lattice")];
    let cell = |a: usize, b: usize| mesh.cell_at([a, b]).expect("full lattice");
    let mut total = Vector2::zeros();
    for d in 1..b_max {
        match side {
            WallSide::Right => {
                let c = a_max;
                let p2 = slot_pressure(mesh, positions, cell(c - 1, d), 1, params, kind)?;
                let p4 = slot_pressure(mesh, positions, cell(c - 1, d - 1), 3, params, kind)?;
                total += rot90(&(node(c, d) - node(c, d + 1))) * (p2 / 4.0);
                total += rot90(&(node(c, d - 1) - node(c, d))) * (p4 / 4.0);
            }
            WallSide::Left => {
                let p1 = slot_pressure(mesh, positions, cell(0, d), 0, params, kind)?;
                let p3 = slot_pressure(mesh, positions, cell(0, d - 1), 2, params, kind)?;
                total += rot90(&(node(0, d + 1) - node(0, d))) * (p1 / 4.0);
                total += rot90(&(node(0, d) - node(0, d - 1))) * (p3 / 4.0);
            }
        }
    }
    Ok(total)
}

/// `(Σ |a − b|²)^{1/2}` over matching nodes.
pub fn l2_error<const D: usize>(a: &[Vector<D>], b: &[Vector<D>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("positions", format!("node counts differ ({} vs {})", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum::<f64>().sqrt())
}

/// Index map taking each coarse node to the fine node at the same
/// reference position. Both lattices must be full, share the origin, and
/// have fine spacings that divide the coarse ones by an integer.
pub fn injection_map<const D: usize>(coarse: &Mesh<D>, fine: &Mesh<D>) -> Result<Vec<usize>>
where
    Dim<D>: Lattice<D>,
{
    if !coarse.is_full() || !fine.is_full() {
        return Err(Error::invalid("mesh", "injection needs full lattices"));
    }
    let mut ratio = [0usize; D];
    #[allow(clippy::needless_range_loop)]
    for k in 0..D {
        let r = coarse.spacing()[k] / fine.spacing()[k];
        let n = r.round();
        if n < 1.0 || (r - n).abs() > 1e-9 * r {
            return Err(Error::invalid("mesh", format!("spacing ratio {r} along axis {k} is not an integer")));
        }
        ratio[k] = n as usize;
        if (coarse.counts()[k] - 1) * ratio[k] + 1 != fine.counts()[k] {
            return Err(Error::invalid("mesh", format!("lattices are not nested along axis {k}")));
        }
        let shift = (coarse.spec().origin[k] - fine.spec().origin[k]).abs();
        if shift > 1e-12 * (1.0 + coarse.spacing()[k]) {
            return Err(Error::invalid("mesh", "lattices have different origins"));
        }
    }
    (0..coarse.num_nodes())
        .map(|n| {
            let c = coarse.node_coords(n);
            fine.node_at(std::array::from_fn(|k| c[k] * ratio[k]))
                .ok_or_else(|| Error::invalid("mesh", "coarse node missing from fine lattice"))
        })
        .collect()
}

/// L2 error of a coarse run against a finer reference restricted to the
/// coarse nodes.
pub fn injected_l2_error<const D: usize>(
    coarse: &Mesh<D>,
    coarse_positions: &[Vector<D>],
    fine: &Mesh<D>,
    fine_positions: &[Vector<D>],
) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    if fine_positions.len() != fine.num_nodes() {
        return Err(Error::invalid("positions", "length does not match the fine mesh"));
    }
    let map = injection_map(coarse, fine)?;
    let restricted: Vec<Vector<D>> = map.iter().map(|&i| fine_positions[i]).collect();
    l2_error(coarse_positions, &restricted)
}

/// Errors of a refinement study and the observed orders between rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// `(parameter, error)` from coarsest to finest.
    pub rows: Vec<(f64, f64)>,
    pub rates: Vec<f64>,
}

impl ConvergenceReport {
    pub fn errors_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Observed order `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`, which is
/// `log₂(e_i/e_{i+1})` when the parameter halves.
pub fn convergence_rates(params: &[f64], errors: &[f64]) -> Result<ConvergenceReport> {
    if errors.len() < 2 {
        return Err(Error::invalid("errors", "need at least two entries"));
    }
    if params.len() != errors.len() {
        return Err(Error::invalid("params", "one parameter per error is required"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("errors", format!("error {e} is not positive")));
    }
    if params.iter().any(|p| !(*p > 0.0 && p.is_finite())) || params.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("params", "must be positive and strictly decreasing"));
    }
    let rates = params
        .windows(2)
        .zip(errors.windows(2))
        .map(|(p, e)| {
            let r = p[0] / p[1];
            if r == 2.0 {
                (e[0] / e[1]).log2()
            } else {
                (e[0] / e[1]).ln() / r.ln()
            }
        })
        .collect();
    Ok(ConvergenceReport { rows: params.iter().copied().zip(errors.iter().copied()).collect(), rates })
}
