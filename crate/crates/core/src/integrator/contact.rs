//! Penalty impenetrability between fluid boundary nodes and solid boundaries.
//!
//! Every fluid boundary node is paired with the closest solid boundary facet
//! (segment in 2D, face in 3D). A facet yields one constraint stencil in 2D
//! and four corner stencils in 3D; each enabled stencil becomes a pair with
//! energy `½K₀Ψ²` while `Ψ < 0`.

use arrayvec::ArrayVec;

use crate::dim::{Dim, Lattice, Vector};
use crate::integrator::Body;

#[derive(Clone, Debug, PartialEq)]
pub struct ContactSettings {
    /// Penalty stiffness `K₀`; zero disables contact.
    pub stiffness: f64,
    /// Enabled constraint families.
    pub families: Vec<u8>,
}

impl Default for ContactSettings {
    fn default() -> Self {
        ContactSettings { stiffness: 0.0, families: vec![1, 2, 3, 4] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactPair {
    pub fluid_body: usize,
    pub fluid_node: usize,
    pub solid_body: usize,
    /// Facet index in the solid's boundary set.
    pub facet: usize,
    pub solid_nodes: ArrayVec<usize, 3>,
    pub family: u8,
    /// Nominal stiffness `K₀`; the pair only acts while `Ψ < 0`.
    pub stiffness: f64,
}

impl ContactPair {
    /// Stiffness in effect for a given gap value.
    pub fn active_stiffness(&self, psi: f64) -> f64 {
        if psi < 0.0 {
            self.stiffness
        } else {
            0.0
        }
    }
}

fn solid_positions<const D: usize>(pair: &ContactPair, bodies: &[Body<D>]) -> ArrayVec<Vector<D>, 3> {
    let x = &bodies[pair.solid_body].state.positions;
    pair.solid_nodes.iter().map(|&n| x[n]).collect()
}

/// `Ψ` of a pair at the bodies' current positions.
pub fn gap<const D: usize>(pair: &ContactPair, bodies: &[Body<D>]) -> f64
where
    Dim<D>: Lattice<D>,
{
    let fluid = bodies[pair.fluid_body].state.positions[pair.fluid_node];
    <Dim<D> as Lattice<D>>::gap(&solid_positions(pair, bodies), &fluid)
}

/// Pairs every fluid boundary node with its closest solid facet. Ties go to
/// the lower (body, facet) index.
pub fn detect<const D: usize>(bodies: &[Body<D>], settings: &ContactSettings) -> Vec<ContactPair>
where
    Dim<D>: Lattice<D>,
{
    let mut pairs = Vec::new();
    if settings.stiffness <= 0.0 {
        return pairs;
    }
    let solids: Vec<usize> = (0..bodies.len()).filter(|&i| !bodies[i].is_fluid()).collect();
    if solids.is_empty() {
        return pairs;
    }
    // Facet positions and bounding boxes, gathered once per call.
    let mut facets: Vec<(usize, usize, ArrayVec<Vector<D>, 4>, Vector<D>, Vector<D>)> = Vec::new();
    for &s in &solids {
        let x = &bodies[s].state.positions;
        for (i, f) in bodies[s].mesh.boundary().facets.iter().enumerate() {
            let pts: ArrayVec<Vector<D>, 4> = f.nodes.iter().map(|&n| x[n]).collect();
            let lo = pts.iter().fold(pts[0], |a, p| a.inf(p));
            let hi = pts.iter().fold(pts[0], |a, p| a.sup(p));
            facets.push((s, i, pts, lo, hi));
        }
    }
    for (fb, body) in bodies.iter().enumerate() {
        if !body.is_fluid() {
            continue;
        }
        for &node in &body.mesh.boundary().boundary {
            let x = body.state.positions[node];
            let mut best: Option<(f64, usize)> = None;
            for (k, (_, _, pts, lo, hi)) in facets.iter().enumerate() {
                if let Some((d, _)) = best {
                    let outside = Vector::<D>::from_fn(|i, _| (lo[i] - x[i]).max(x[i] - hi[i]).max(0.0));
                    if outside.norm() > d {
                        continue;
                    }
                }
                let d = <Dim<D> as Lattice<D>>::facet_distance(pts, &x);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, k));
                }
            }
            let Some((_, k)) = best else { continue };
            let (s, i, ..) = facets[k];
            let facet = &bodies[s].mesh.boundary().facets[i];
            for st in <Dim<D> as Lattice<D>>::facet_stencils(&facet.nodes, facet.side) {
                if settings.families.contains(&st.family) {
                    pairs.push(ContactPair {
                        fluid_body: fb,
                        fluid_node: node,
                        solid_body: s,
                        facet: i,
                        solid_nodes: st.nodes,
                        family: st.family,
                        stiffness: settings.stiffness,
                    });
                }
            }
        }
    }
    pairs
}

/// Adds `−KΨ ∂Ψ/∂x` to every node of every active pair.
pub fn contact_force<const D: usize>(pairs: &[ContactPair], bodies: &[Body<D>], out: &mut [Vec<Vector<D>>])
where
    Dim<D>: Lattice<D>,
{
    let mut grad = [Vector::<D>::zeros(); 3];
    for pair in pairs {
        let solid = solid_positions(pair, bodies);
        let fluid = bodies[pair.fluid_body].state.positions[pair.fluid_node];
        let psi = <Dim<D> as Lattice<D>>::gap(&solid, &fluid);
        let k = pair.active_stiffness(psi);
        if k == 0.0 {
            continue;
        }
        let d_fluid = <Dim<D> as Lattice<D>>::gap_gradient(&solid, &fluid, &mut grad);
        out[pair.fluid_body][pair.fluid_node] -= d_fluid * (k * psi);
        for (j, &n) in pair.solid_nodes.iter().enumerate() {
            out[pair.solid_body][n] -= grad[j] * (k * psi);
        }
    }
}

/// `Σ ½KΨ²` over active pairs.
pub fn contact_energy<const D: usize>(pairs: &[ContactPair], bodies: &[Body<D>]) -> f64
where
    Dim<D>: Lattice<D>,
{
    pairs
        .iter()
        .map(|p| {
            let psi = gap(p, bodies);
            0.5 * p.active_stiffness(psi) * psi * psi
        })
        .sum()
}

/// Smallest gap over all pairs, or `None` without pairs.
pub fn min_gap<const D: usize>(pairs: &[ContactPair], bodies: &[Body<D>]) -> Option<f64>
where
    Dim<D>: Lattice<D>,
{
    pairs.iter().map(|p| gap(p, bodies)).reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{BodyState, System};
    use crate::materials::{Law, Material, StVKParams, TaitParams};
    use crate::mesh::{GridSpec, Mesh};
    use nalgebra::{Vector2, Vector3};

    fn solid<const D: usize>(counts: [usize; D], h: f64, origin: Vector<D>) -> Body<D>
    where
        Dim<D>: Lattice<D>,
    {
        let law = Law::StVenantKirchhoff(StVKParams::new(945.0, 4.5e6, 0.4999).unwrap());
        let mesh = Mesh::new(GridSpec::new(counts, [h; D]).with_origin(origin)).unwrap();
        Body::new("solid", mesh, Material::new(law, 1e4).unwrap(), Vector::<D>::zeros(), &[]).unwrap()
    }

    fn fluid<const D: usize>(counts: [usize; D], h: f64, origin: Vector<D>) -> Body<D>
    where
        Dim<D>: Lattice<D>,
    {
        let law = Law::Tait(TaitParams::new(997.0, 6.0, 3.041e4, 3.0397e4).unwrap());
        let mesh = Mesh::new(GridSpec::new(counts, [h; D]).with_origin(origin)).unwrap();
        Body::new("fluid", mesh, Material::new(law, 0.0).unwrap(), Vector::<D>::zeros(), &[]).unwrap()
    }

    fn settings() -> ContactSettings {
        ContactSettings { stiffness: 1e6, families: vec![1, 2, 3, 4] }
    }

    #[test]
    fn node_above_floor_is_inactive_and_below_is_penetrating() {
        let bodies = vec![solid([5, 2], 0.1, Vector2::zeros()), fluid([2, 2], 0.05, Vector2::new(0.15, 0.3))];
        let pairs = detect(&bodies, &settings());
        assert_eq!(pairs.len(), 4);
        for p in &pairs {
            assert_eq!(p.family, 1);
            assert!(gap(p, &bodies) > 0.0);
        }
        let mut bodies = bodies;
        let mut st = bodies[1].state.clone();
        for x in &mut st.positions {
            x.y -= 0.22;
        }
        bodies[1].set_state(st).unwrap();
        let pairs = detect(&bodies, &settings());
        let low: Vec<_> = pairs.iter().filter(|p| bodies[1].mesh.node_coords(p.fluid_node)[1] == 0).collect();
        assert!(low.iter().all(|p| gap(p, &bodies) < 0.0));
    }

    #[test]
    fn equidistant_node_takes_lower_facet() {
        // Directly above the shared node of two top segments.
        let bodies = vec![solid([3, 2], 0.1, Vector2::zeros()), fluid([2, 2], 0.05, Vector2::new(0.1, 0.2))];
        let pairs = detect(&bodies, &settings());
        let p = pairs.iter().find(|p| p.fluid_node == 0).unwrap();
        let facets = &bodies[0].mesh.boundary().facets;
        let candidates: Vec<usize> = (0..facets.len())
            .filter(|&i| {
                let pts: Vec<_> = facets[i].nodes.iter().map(|&n| bodies[0].state.positions[n]).collect();
                (Dim::<2>::facet_distance(&pts, &bodies[1].state.positions[0]) - 0.1).abs() < 1e-12
            })
            .collect();
        assert_eq!(candidates.len(), 2);
        assert_eq!(p.facet, candidates[0]);
    }

    fn penetrating_2d() -> Vec<Body<2>> {
        let mut bodies = vec![solid([3, 2], 0.1, Vector2::zeros()), fluid([2, 2], 0.05, Vector2::new(0.06, 0.12))];
        let mut st = bodies[1].state.clone();
        st.positions[0] = Vector2::new(0.07, 0.095);
        st.positions[1] = Vector2::new(0.12, 0.093);
        bodies[1].set_state(st).unwrap();
        let mut st = bodies[0].state.clone();
        st.positions[4] += Vector2::new(0.003, -0.002);
        bodies[0].set_state(st).unwrap();
        bodies
    }

    #[test]
    fn forces_sum_to_zero_and_match_energy() {
        let bodies = penetrating_2d();
        let pairs = detect(&bodies, &settings());
        assert!(pairs.iter().any(|p| gap(p, &bodies) < 0.0));
        let mut out: Vec<Vec<Vector2<f64>>> =
            bodies.iter().map(|b| vec![Vector2::zeros(); b.mesh.num_nodes()]).collect();
        contact_force(&pairs, &bodies, &mut out);
        let total: Vector2<f64> = out.iter().flatten().sum();
        let scale: f64 = out.iter().flatten().map(|v| v.norm()).sum();
        assert!(total.norm() <= 1e-12 * scale, "{total:?}");

        let h = 1e-8;
        let mut worst: f64 = 0.0;
        for b in 0..2 {
            for n in 0..bodies[b].mesh.num_nodes() {
                for k in 0..2 {
                    let energy_at = |delta: f64| {
                        let mut moved = bodies.clone();
                        moved[b].state.positions[n][k] += delta;
                        contact_energy(&pairs, &moved)
                    };
                    let fd = -(energy_at(h) - energy_at(-h)) / (2.0 * h);
                    worst = worst.max((fd - out[b][n][k]).abs() / scale);
                }
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn three_dimensional_stencils_match_energy() {
        let mut bodies =
            vec![solid([3, 3, 2], 0.1, Vector3::zeros()), fluid([2, 2, 2], 0.05, Vector3::new(0.07, 0.06, 0.11))];
        let mut st = bodies[1].state.clone();
        st.positions[0].z = 0.098;
        st.positions[1].z = 0.097;
        bodies[1].set_state(st).unwrap();
        let pairs = detect(&bodies, &settings());
        assert_eq!(pairs.len(), 8 * 4);
        assert!(pairs.iter().any(|p| gap(p, &bodies) < 0.0));
        let mut out: Vec<Vec<Vector3<f64>>> =
            bodies.iter().map(|b| vec![Vector3::zeros(); b.mesh.num_nodes()]).collect();
        contact_force(&pairs, &bodies, &mut out);
        let total: Vector3<f64> = out.iter().flatten().sum();
        let scale: f64 = out.iter().flatten().map(|v| v.norm()).sum();
        assert!(scale > 0.0 && total.norm() <= 1e-12 * scale);
        let h = 1e-8;
        for b in 0..2 {
            for n in 0..bodies[b].mesh.num_nodes() {
                for k in 0..3 {
                    let energy_at = |delta: f64| {
                        let mut moved = bodies.clone();
                        moved[b].state.positions[n][k] += delta;
                        contact_energy(&pairs, &moved)
                    };
                    let fd = -(energy_at(h) - energy_at(-h)) / (2.0 * h);
                    assert!((fd - out[b][n][k]).abs() < 1e-6 * scale, "body {b} node {n} axis {k}");
                }
            }
        }
    }

    #[test]
    fn disabled_families_produce_no_pairs() {
        let bodies = vec![solid([5, 2], 0.1, Vector2::zeros()), fluid([2, 2], 0.05, Vector2::new(0.15, 0.3))];
        let s = ContactSettings { stiffness: 1e6, families: vec![2, 3] };
        assert!(detect(&bodies, &s).is_empty());
        let s = ContactSettings { stiffness: 0.0, families: vec![1] };
        assert!(detect(&bodies, &s).is_empty());
    }

    #[test]
    fn initial_overlap_is_rejected() {
        let bodies = penetrating_2d();
        let err = System::new(bodies, Vector2::zeros(), settings(), 1e-4).unwrap_err();
        assert!(matches!(err, crate::Error::Overlap { .. }), "{err}");
    }

    #[test]
    fn state_helper_keeps_lengths() {
        let mut b = fluid([2, 2], 0.05, Vector2::zeros());
        let bad = BodyState { positions: vec![Vector2::zeros(); 3], velocities: vec![Vector2::zeros(); 3] };
        assert!(b.set_state(bad).is_err());
    }
}
