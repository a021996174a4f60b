//! Built-in verification suites: kinematic identities, frame indifference,
//! constitutive consistency, force/energy consistency and exact momentum
//! conservation. Each check reports the measured value next to its
//! tolerance.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, Rotation2, Rotation3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::momentum_map;
use crate::dim::{Dim, Lattice, Matrix, Vector};
use crate::error::{Error, Result};
use crate::integrator::contact::{contact_energy, contact_force, detect};
use crate::integrator::{
    incompressibility_energy, incompressibility_force, internal_force, lumped_mass, stored_energy, Body,
    ContactSettings, System,
};
use crate::kinematics::{cauchy_green, deformation_gradients, CellJet};
use crate::materials::{slot_energies, Law, Material, MooneyRivlinParams, StVKParams, TaitParams};
use crate::mesh::{GridSpec, Mesh};

/// One property with its measured deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(suite: &'static str, name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { suite, name: name.into(), measured, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

impl fmt::Display for Check {
    /// `suite,property,PASS|FAIL,measured,tolerance`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{},{},{status},{:e},{:e}", self.suite, self.name, self.measured, self.tolerance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Mesh,
    Kinematics,
    Materials,
    Gradients,
    Noether,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mesh" => Suite::Mesh,
            "kinematics" => Suite::Kinematics,
            "materials" => Suite::Materials,
            "gradients" => Suite::Gradients,
            "noether" => Suite::Noether,
            "all" => Suite::All,
            other => {
                return Err(Error::invalid(
                    "suite",
                    format!("unknown suite '{other}' (mesh, kinematics, materials, gradients, noether, all)"),
                ))
            }
        })
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Mesh | Suite::All) {
        out.extend(mesh_checks()?);
    }
    if matches!(suite, Suite::Kinematics | Suite::All) {
        out.extend(kinematics_checks());
    }
    if matches!(suite, Suite::Materials | Suite::All) {
        out.extend(materials_checks()?);
    }
    if matches!(suite, Suite::Gradients | Suite::All) {
        out.extend(gradient_checks(10, 7)?);
    }
    if matches!(suite, Suite::Noether | Suite::All) {
        out.extend(noether_checks(1000, 1e-4, 11)?);
    }
    Ok(out)
}

fn stvk_law() -> Law {
    Law::StVenantKirchhoff(StVKParams::new(945.0, 4.5e6, 0.4999).expect("valid constants"))
}

fn mooney_law() -> Law {
    Law::MooneyRivlin(MooneyRivlinParams::new(945.0, 1.848, 0.264, 1.0).expect("valid constants"))
}

fn tait_law() -> Law {
    Law::Tait(TaitParams::new(997.0, 6.0, 3.041e4, 3.0397e4).expect("valid constants"))
}

/// Determinant by LU factorisation, independent of the lattice formulas.
pub fn det<const D: usize>(m: &Matrix<D>) -> f64 {
    DMatrix::from_fn(D, D, |i, j| m[(i, j)]).determinant()
}

/// Orientation-preserving affine map near the identity plus independent
/// corner noise, rejected until every slot Jacobian exceeds 0.05.
pub fn random_cell<const D: usize>(rng: &mut ChaCha8Rng) -> (CellJet<D>, [f64; D])
where
    Dim<D>: Lattice<D>,
{
    loop {
        let spacing: [f64; D] = std::array::from_fn(|_| rng.gen_range(0.02..0.2));
        let a = Matrix::<D>::identity() + Matrix::<D>::from_fn(|_, _| rng.gen_range(-0.3..0.3));
        if det(&a) <= 0.2 {
            continue;
        }
        let shift = Vector::<D>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let h = spacing.iter().copied().fold(f64::INFINITY, f64::min);
        let mut jet = CellJet::reference(spacing).map(|x| a * x + shift);
        for c in jet.corners.iter_mut() {
            *c += Vector::<D>::from_fn(|_, _| rng.gen_range(-0.15..0.15) * h);
        }
        let f = deformation_gradients(&jet, &spacing).expect("finite corners");
        if f.iter().all(|f| <Dim<D> as Lattice<D>>::jacobian(f) > 0.05) {
            return (jet, spacing);
        }
    }
}

/// Worst `|det F − J|/|J|` and `|det C − J²|/J²` over random cells.
pub fn kinematic_identities<const D: usize>(samples: usize, seed: u64) -> (f64, f64)
where
    Dim<D>: Lattice<D>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_f, mut worst_c) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let (jet, spacing) = random_cell::<D>(&mut rng);
        let f = deformation_gradients(&jet, &spacing).expect("finite corners");
        let c = cauchy_green(&f);
        for (f, c) in f.iter().zip(&c) {
            let j = <Dim<D> as Lattice<D>>::jacobian(f);
            worst_f = worst_f.max((det(f) - j).abs() / j.abs());
            worst_c = worst_c.max((det(c) - j * j).abs() / (j * j));
        }
    }
    (worst_f, worst_c)
}

/// Random proper rotation in `D` dimensions.
pub fn random_rotation<const D: usize>(rng: &mut ChaCha8Rng) -> Matrix<D> {
    let m: Matrix3<f64> = if D == 2 {
        let r = Rotation2::new(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let mut m = Matrix3::identity();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(r.matrix());
        m
    } else {
        let axis = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let angle = rng.gen_range(0.0..std::f64::consts::PI);
        *Rotation3::from_scaled_axis(axis.normalize() * angle).matrix()
    };
    Matrix::<D>::from_fn(|i, j| m[(i, j)])
}

/// Worst entrywise change of the Cauchy-Green tensors and worst relative
/// change of slot energies (per unit mass, relative to `max(|W|, 1)`) under
/// random rigid motions, for each law that applies in `D` dimensions.
pub fn frame_indifference<const D: usize>(motions: usize, seed: u64) -> (f64, f64)
where
    Dim<D>: Lattice<D>,
{
    let laws = if D == 2 { vec![stvk_law(), tait_law()] } else { vec![mooney_law(), tait_law()] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_c, mut worst_w) = (0.0f64, 0.0f64);
    for _ in 0..motions {
        let (jet, spacing) = random_cell::<D>(&mut rng);
        let q = random_rotation::<D>(&mut rng);
        let u = Vector::<D>::from_fn(|_, _| rng.gen_range(-5.0..5.0));
        let moved = jet.map(|x| q * x + u);
        let c0 = cauchy_green(&deformation_gradients(&jet, &spacing).expect("finite"));
        let c1 = cauchy_green(&deformation_gradients(&moved, &spacing).expect("finite"));
        for (a, b) in c0.iter().zip(&c1) {
            worst_c = worst_c.max((a - b).amax());
        }
        for law in &laws {
            let w0 = slot_energies(&jet, &spacing, law).expect("admissible cell");
            let w1 = slot_energies(&moved, &spacing, law).expect("admissible cell");
            for (a, b) in w0.iter().zip(&w1) {
                worst_w = worst_w.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    (worst_c, worst_w)
}

fn jitter<const D: usize>(x: &[Vector<D>], amp: f64, rng: &mut ChaCha8Rng) -> Vec<Vector<D>> {
    x.iter().map(|p| p + Vector::<D>::from_fn(|_, _| rng.gen_range(-amp..amp))).collect()
}

/// Largest `|f + ∂E/∂x|` over coordinates, relative to the largest force
/// component, with `∂E/∂x` from central differences.
pub fn gradient_error<const D: usize>(
    x: &[Vector<D>],
    energy: impl Fn(&[Vector<D>]) -> f64,
    force: impl Fn(&[Vector<D>]) -> Vec<Vector<D>>,
    h: f64,
) -> f64 {
    let f = force(x);
    let scale = f.iter().map(|v| v.amax()).fold(0.0, f64::max);
    let mut y = x.to_vec();
    let mut worst = 0.0f64;
    for n in 0..x.len() {
        for k in 0..D {
            y[n][k] = x[n][k] + h;
            let ep = energy(&y);
            y[n][k] = x[n][k] - h;
            let em = energy(&y);
            y[n][k] = x[n][k];
            worst = worst.max((-(ep - em) / (2.0 * h) - f[n][k]).abs());
        }
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

fn zeros<const D: usize>(n: usize) -> Vec<Vector<D>> {
    vec![Vector::<D>::zeros(); n]
}

/// Internal-force consistency of `law` on a perturbed lattice.
fn internal_gradient<const D: usize>(mesh: &Mesh<D>, law: &Law, x: &[Vector<D>], h: f64) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    stored_energy(mesh, law, x)?;
    Ok(gradient_error(
        x,
        |y| stored_energy(mesh, law, y).unwrap_or(f64::NAN),
        |y| {
            let mut f = zeros(y.len());
            internal_force(mesh, law, y, &mut f).map(|_| f).unwrap_or_else(|_| zeros(y.len()))
        },
        h,
    ))
}

fn penalty_gradient<const D: usize>(mesh: &Mesh<D>, r: f64, x: &[Vector<D>], h: f64) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    incompressibility_energy(mesh, r, x)?;
    Ok(gradient_error(
        x,
        |y| incompressibility_energy(mesh, r, y).unwrap_or(f64::NAN),
        |y| {
            let mut f = zeros(y.len());
            incompressibility_force(mesh, r, y, &mut f).map(|_| f).unwrap_or_else(|_| zeros(y.len()))
        },
        h,
    ))
}

/// A solid block with a fluid block sunk into its top face by 2 to 8 mm,
/// both slightly jittered, so every pair is clearly active or inactive.
fn contact_config<const D: usize>(rng: &mut ChaCha8Rng) -> Vec<Body<D>>
where
    Dim<D>: Lattice<D>,
{
    let solid_counts: [usize; D] = std::array::from_fn(|k| if k + 1 == D { 3 } else { 4 });
    let solid_mesh = Mesh::new(GridSpec::new(solid_counts, [0.1; D])).expect("valid grid");
    let top = 0.2;
    let depth = rng.gen_range(0.002..0.008);
    let origin = Vector::<D>::from_fn(|k, _| if k + 1 == D { top - depth } else { rng.gen_range(0.06..0.14) });
    let fluid_counts: [usize; D] = std::array::from_fn(|k| if k + 1 == D { 2 } else { 3 });
    let fluid_mesh = Mesh::new(GridSpec::new(fluid_counts, [0.05; D]).with_origin(origin)).expect("valid grid");
    let law = if D == 2 { stvk_law() } else { mooney_law() };
    let mut solid = Body::new("solid", solid_mesh, Material::new(law, 1e4).expect("valid"), Vector::<D>::zeros(), &[])
        .expect("valid body");
    let mut fluid =
        Body::new("fluid", fluid_mesh, Material::new(tait_law(), 0.0).expect("valid"), Vector::<D>::zeros(), &[])
            .expect("valid body");
    solid.state.positions = jitter(&solid.state.positions, 3e-4, rng);
    fluid.state.positions = jitter(&fluid.state.positions, 3e-4, rng);
    vec![solid, fluid]
}

/// Worst relative force/energy mismatch of the contact penalty.
pub fn contact_gradient<const D: usize>(bodies: &[Body<D>], stiffness: f64, h: f64) -> f64
where
    Dim<D>: Lattice<D>,
{
    let settings = ContactSettings { stiffness, families: vec![1, 2, 3, 4] };
    let pairs = detect(bodies, &settings);
    let sizes: Vec<usize> = bodies.iter().map(|b| b.mesh.num_nodes()).collect();
    let flat: Vec<Vector<D>> = bodies.iter().flat_map(|b| b.state.positions.clone()).collect();
    let unflatten = |y: &[Vector<D>]| {
        let mut moved = bodies.to_vec();
        let mut at = 0;
        for (b, &n) in moved.iter_mut().zip(&sizes) {
            b.state.positions = y[at..at + n].to_vec();
            at += n;
        }
        moved
    };
    gradient_error(
        &flat,
        |y| contact_energy(&pairs, &unflatten(y)),
        |y| {
            let moved = unflatten(y);
            let mut out: Vec<Vec<Vector<D>>> = sizes.iter().map(|&n| zeros(n)).collect();
            contact_force(&pairs, &moved, &mut out);
            out.concat()
        },
        h,
    )
}

/// Worst relative gradient errors `(internal, incompressibility, contact)`
/// over `configs` random configurations in 2D and in 3D.
pub fn gradient_consistency(configs: usize, seed: u64) -> Result<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 3];
    let h = 1e-7;
    for _ in 0..configs {
        let mesh2 = Mesh::new(GridSpec::new([4, 3], [0.1, 0.08]))?;
        let x2 = jitter(&mesh2.reference_positions(), 0.01, &mut rng);
        let mesh3 = Mesh::new(GridSpec::new([3, 3, 2], [0.1, 0.1, 0.05]))?;
        let x3 = jitter(&mesh3.reference_positions(), 0.008, &mut rng);
        worst[0] = worst[0]
            .max(internal_gradient(&mesh2, &stvk_law(), &x2, h)?)
            .max(internal_gradient(&mesh2, &tait_law(), &x2, h)?)
            .max(internal_gradient(&mesh3, &mooney_law(), &x3, h)?)
            .max(internal_gradient(&mesh3, &tait_law(), &x3, h)?);
        worst[1] = worst[1].max(penalty_gradient(&mesh2, 1e4, &x2, h)?).max(penalty_gradient(&mesh3, 1e4, &x3, h)?);
        let c2 = contact_config::<2>(&mut rng);
        let c3 = contact_config::<3>(&mut rng);
        worst[2] = worst[2].max(contact_gradient(&c2, 1e6, 1e-8)).max(contact_gradient(&c3, 1e6, 1e-8));
    }
    Ok(worst)
}

/// Relative drift of the linear and angular parts of the momentum map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumDrift {
    pub linear: f64,
    pub angular: f64,
}

/// Runs a free body (no gravity, pins or contact) with a random initial
/// velocity field and measures the worst momentum drift over all steps.
pub fn free_body_drift<const D: usize>(mut body: Body<D>, steps: usize, dt: f64, seed: u64) -> Result<MomentumDrift>
where
    Dim<D>: Lattice<D>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = Vector::<D>::from_fn(|_, _| rng.gen_range(-0.2..0.2));
    let spin = rng.gen_range(-0.5..0.5);
    let centre: Vector<D> = body.state.positions.iter().sum::<Vector<D>>() / body.state.positions.len() as f64;
    for (x, v) in body.state.positions.iter().zip(body.state.velocities.iter_mut()) {
        // Rotation about the last axis plus a small random field.
        let r = x - centre;
        let mut w = Vector::<D>::zeros();
        w[0] = -spin * r[1];
        w[1] = spin * r[0];
        *v = mean + w + Vector::<D>::from_fn(|_, _| rng.gen_range(-0.02..0.02));
    }
    let mut sys = System::new(vec![body], Vector::<D>::zeros(), ContactSettings::default(), dt)?;
    let j0 = momentum_map(&sys.bodies);
    let mut drift = MomentumDrift { linear: 0.0, angular: 0.0 };
    for _ in 0..steps {
        sys.advance()?;
        let j = momentum_map(&sys.bodies);
        let dl = j.linear.iter().zip(&j0.linear).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let da = j.angular.iter().zip(&j0.angular).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        drift.linear = drift.linear.max(dl / j0.linear_norm());
        drift.angular = drift.angular.max(da / j0.angular_norm());
    }
    Ok(drift)
}

/// Free 2D St. Venant-Kirchhoff block.
pub fn free_stvk_block() -> Result<Body<2>> {
    let mesh = Mesh::new(GridSpec::new([7, 5], [0.05, 0.05]).with_origin(Vector2::new(0.3, 0.1)))?;
    Body::new("stvk", mesh, Material::new(stvk_law(), 1e4)?, Vector2::zeros(), &[])
}

/// Free 3D Mooney-Rivlin block.
pub fn free_mooney_block() -> Result<Body<3>> {
    let mesh = Mesh::new(GridSpec::new([5, 5, 3], [0.1, 0.1, 0.1]).with_origin(Vector3::new(0.2, -0.1, 0.4)))?;
    Body::new("mooney", mesh, Material::new(mooney_law(), 1e4)?, Vector3::zeros(), &[])
}

fn mesh_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let m2 = Mesh::new(GridSpec::new([21, 11], [0.025, 0.015]))?;
    let m3 = Mesh::new(GridSpec::new([5, 4, 3], [0.1, 0.1, 0.05]))?;
    let count_err = (m2.num_nodes() as f64 - 231.0).abs()
        + (m2.num_cells() as f64 - 200.0).abs()
        + (m3.num_nodes() as f64 - 60.0).abs()
        + (m3.num_cells() as f64 - 24.0).abs();
    out.push(Check::new("mesh", "node_and_cell_counts", count_err, 0.0));
    let bnd = (m2.boundary().boundary.len() as f64 - 60.0).abs() + (m3.boundary().boundary.len() as f64 - 54.0).abs();
    out.push(Check::new("mesh", "boundary_node_counts", bnd, 0.0));
    let mass_err = (lumped_mass(&m2, 997.0).iter().sum::<f64>() - 997.0 * 0.5 * 0.15).abs() / (997.0 * 0.075);
    out.push(Check::new("mesh", "lumped_mass_total", mass_err, 1e-13));
    out.push(Check::new("mesh", "facets_point_outward_2d", inward_facets(&m2), 0.0));
    out.push(Check::new("mesh", "facets_point_outward_3d", inward_facets(&m3), 0.0));
    Ok(out)
}

/// Number of boundary facets whose stencil normal points into the body.
fn inward_facets<const D: usize>(mesh: &Mesh<D>) -> f64
where
    Dim<D>: Lattice<D>,
{
    let x = mesh.reference_positions();
    let centre: Vector<D> = x.iter().sum::<Vector<D>>() / x.len() as f64;
    let mut bad = 0;
    for f in &mesh.boundary().facets {
        let mid: Vector<D> = f.nodes.iter().map(|&n| x[n]).sum::<Vector<D>>() / f.nodes.len() as f64;
        // A point just outside the facet must give a positive gap.
        let probe = mid + (mid - centre) * 1e-3;
        for st in <Dim<D> as Lattice<D>>::facet_stencils(&f.nodes, f.side) {
            let pts: Vec<Vector<D>> = st.nodes.iter().map(|&n| x[n]).collect();
            if <Dim<D> as Lattice<D>>::gap(&pts, &probe) <= 0.0 {
                bad += 1;
            }
        }
    }
    bad as f64
}

fn kinematics_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (dim, (df, dc)) in [(2, kinematic_identities::<2>(10_000, 1)), (3, kinematic_identities::<3>(10_000, 2))] {
        out.push(Check::new("kinematics", format!("det_F_equals_J_{dim}d"), df, 1e-10));
        out.push(Check::new("kinematics", format!("det_C_equals_J2_{dim}d"), dc, 1e-10));
    }
    for (dim, (dc, dw)) in [(2, frame_indifference::<2>(100, 3)), (3, frame_indifference::<3>(100, 4))] {
        out.push(Check::new("kinematics", format!("frame_indifference_C_{dim}d"), dc, 1e-12));
        out.push(Check::new("kinematics", format!("frame_indifference_energy_{dim}d"), dw, 1e-12));
    }
    // A reflected cell must be reported as inverted.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut missed = 0;
    for _ in 0..100 {
        let (jet, spacing) = random_cell::<2>(&mut rng);
        let mirrored = jet.map(|x| Vector2::new(-x.x, x.y));
        if crate::kinematics::jacobians(&mirrored, &spacing).is_ok() {
            missed += 1;
        }
    }
    out.push(Check::new("kinematics", "reflection_is_inverted", missed as f64, 0.0));
    out
}

/// Worst relative mismatch between `S` and `2ρ₀ ∂W/∂C` by central
/// differences on symmetric perturbations of a random `C`.
pub fn stress_consistency<const D: usize>(law: &Law, seed: u64) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (jet, spacing) = random_cell::<D>(&mut rng);
        let f = crate::kinematics::slot_gradient(&jet, &spacing, 0);
        let c = crate::kinematics::right_cauchy_green(&f);
        let energy = |c: &Matrix<D>| law.energy(c, det(c).sqrt());
        let s = law.stress(&c, det(&c).sqrt())?;
        let h = 1e-6;
        for i in 0..D {
            for j in i..D {
                let mut dc = Matrix::<D>::zeros();
                dc[(i, j)] = h;
                dc[(j, i)] = h;
                let dw = (energy(&(c + dc))? - energy(&(c - dc))?) / (2.0 * h);
                // dW = S:dC/(2ρ₀): one entry on the diagonal, two off it.
                let fd = if i == j { 2.0 * law.density() * dw } else { law.density() * dw };
                worst = worst.max((fd - s[(i, j)]).abs() / s.amax().max(1.0));
            }
        }
    }
    Ok(worst)
}

fn materials_checks() -> Result<Vec<Check>> {
    let consistency = |name: &str, err: f64| Check::new("materials", name, err, 1e-6);
    let mut out = vec![
        consistency("stvk_stress_is_energy_derivative_2d", stress_consistency::<2>(&stvk_law(), 1)?),
        consistency("tait_stress_is_energy_derivative_2d", stress_consistency::<2>(&tait_law(), 2)?),
        consistency("mooney_stress_is_energy_derivative_3d", stress_consistency::<3>(&mooney_law(), 3)?),
        consistency("tait_stress_is_energy_derivative_3d", stress_consistency::<3>(&tait_law(), 4)?),
    ];
    let rest = stvk_law().stress(&Matrix::<2>::identity(), 1.0)?.amax();
    out.push(Check::new("materials", "stvk_rest_state_is_stress_free", rest, 0.0));
    let Law::Tait(t) = tait_law() else { unreachable!() };
    let j0 = t.zero_pressure_jacobian();
    let zero = tait_law().stress(&(Matrix::<2>::identity() * j0), j0)?.amax();
    out.push(Check::new("materials", "tait_zero_pressure_state", zero, 1e-9));
    Ok(out)
}

fn gradient_checks(configs: usize, seed: u64) -> Result<Vec<Check>> {
    let [internal, penalty, contact] = gradient_consistency(configs, seed)?;
    Ok(vec![
        Check::new("gradients", "internal_force", internal, 1e-5),
        Check::new("gradients", "incompressibility_force", penalty, 1e-5),
        Check::new("gradients", "contact_force", contact, 1e-5),
    ])
}

fn noether_checks(steps: usize, dt: f64, seed: u64) -> Result<Vec<Check>> {
    let d2 = free_body_drift(free_stvk_block()?, steps, dt, seed)?;
    let d3 = free_body_drift(free_mooney_block()?, steps, dt, seed + 1)?;
    Ok(vec![
        Check::new("noether", "linear_momentum_2d_stvk", d2.linear, 1e-10),
        Check::new("noether", "angular_momentum_2d_stvk", d2.angular, 1e-8),
        Check::new("noether", "linear_momentum_3d_mooney", d3.linear, 1e-10),
        Check::new("noether", "angular_momentum_3d_mooney", d3.angular, 1e-8),
    ])
}
