//! Scenario driver: steps a built system, samples diagnostics and writes
//! frames every `stride` steps.

use std::any::Any;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;

use crate::diagnostics::{
    boundary_pressure_resultant, momentum_map, relative_energy, total_energy, PressureKind, WallSide,
};
use crate::dim::{Dim, Lattice, Vector};
use crate::error::Result;
use crate::integrator::{contact, System};
use crate::materials::Law;
use crate::output::{body_vtk, frame_csv, write_file, DiagnosticsRow, DiagnosticsWriter};
use crate::scenario::{AnySystem, Format, Scenario};

/// Where and what to write; `None` keeps the run in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputPlan {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

/// Final state and sampled diagnostics of a completed run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub system: AnySystem,
    /// Rows at step 0 and every `stride` steps, plus the last step.
    pub rows: Vec<DiagnosticsRow>,
    /// Smallest contact gap seen at any step.
    pub min_psi: Option<f64>,
}

/// Pressure resultants `[right, left]` of the fluid of a 2D system.
pub fn fluid_resultants<const D: usize>(system: &System<D>) -> Result<Option<[Vector2<f64>; 2]>>
where
    Dim<D>: Lattice<D>,
{
    let Some(sys2) = (system as &dyn Any).downcast_ref::<System<2>>() else {
        return Ok(None);
    };
    let Some(fluid) = sys2.bodies.iter().find(|b| b.is_fluid() && b.mesh.is_full()) else {
        return Ok(None);
    };
    let Law::Tait(params) = fluid.material.law else {
        return Ok(None);
    };
    let x = &fluid.state.positions;
    let right = boundary_pressure_resultant(&fluid.mesh, &params, x, WallSide::Right, PressureKind::Stiffness)?;
    let left = boundary_pressure_resultant(&fluid.mesh, &params, x, WallSide::Left, PressureKind::Stiffness)?;
    Ok(Some([right, left]))
}

/// Diagnostics of the current time level relative to the initial energy.
pub fn diagnostics_row<const D: usize>(system: &System<D>, initial_energy: f64) -> Result<DiagnosticsRow>
where
    Dim<D>: Lattice<D>,
{
    let energy = total_energy(system)?;
    Ok(DiagnosticsRow {
        step: system.step,
        time: system.time(),
        relative_energy: relative_energy(initial_energy, energy.total),
        energy,
        momentum: momentum_map(&system.bodies),
        min_psi: contact::min_gap(system.pairs(), &system.bodies),
        resultants: fluid_resultants(system)?,
    })
}

fn write_frames<const D: usize>(system: &System<D>, plan: &OutputPlan) -> Result<()>
where
    Dim<D>: Lattice<D>,
{
    let frames = plan.dir.join("frames");
    let (step, time) = (system.step, system.time());
    for format in &plan.formats {
        match format {
            Format::Csv => {
                write_file(&frames.join(format!("frame_{step:06}.csv")), &frame_csv(&system.bodies, step, time))?
            }
            Format::Vtk => {
                for b in &system.bodies {
                    write_file(&frames.join(format!("{}_{step:06}.vtk", b.name)), &body_vtk(b, step, time))?;
                }
            }
        }
    }
    Ok(())
}

/// Advances `steps` times, sampling every `stride` steps.
pub fn run_system<const D: usize>(
    system: &mut System<D>,
    steps: usize,
    stride: usize,
    plan: Option<&OutputPlan>,
) -> Result<(Vec<DiagnosticsRow>, Option<f64>)>
where
    Dim<D>: Lattice<D>,
{
    let stride = stride.max(1);
    let e0 = total_energy(system)?.total;
    let mut writer = match plan {
        Some(p) => {
            let resultants = fluid_resultants(system)?.is_some();
            Some(DiagnosticsWriter::create(&p.dir.join("diagnostics.csv"), D, resultants)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut min_psi = contact::min_gap(system.pairs(), &system.bodies);
    let mut sample = |system: &System<D>, rows: &mut Vec<DiagnosticsRow>| -> Result<()> {
        let row = diagnostics_row(system, e0)?;
        if let Some(w) = writer.as_mut() {
            w.write(&row)?;
        }
        if let Some(p) = plan {
            write_frames(system, p)?;
        }
        rows.push(row);
        Ok(())
    };
    sample(system, &mut rows)?;
    let first = system.step;
    for k in 1..=steps {
        system.advance()?;
        if let Some(g) = contact::min_gap(system.pairs(), &system.bodies) {
            min_psi = Some(min_psi.map_or(g, |m: f64| m.min(g)));
        }
        if k % stride == 0 || k == steps {
            sample(system, &mut rows)?;
        }
    }
    debug_assert_eq!(system.step, first + steps);
    if let Some(w) = writer {
        w.finish()?;
    }
    Ok((rows, min_psi))
}

/// Builds and runs a scenario to its horizon.
pub fn run_scenario(scenario: &Scenario, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let plan = out_dir.map(|dir| OutputPlan { dir: dir.to_path_buf(), formats: scenario.output.formats.clone() });
    let (steps, stride) = (scenario.time.steps, scenario.output.stride);
    match scenario.build()? {
        AnySystem::Two(mut s) => {
            let (rows, min_psi) = run_system(&mut s, steps, stride, plan.as_ref())?;
            Ok(RunOutcome { system: AnySystem::Two(s), rows, min_psi })
        }
        AnySystem::Three(mut s) => {
            let (rows, min_psi) = run_system(&mut s, steps, stride, plan.as_ref())?;
            Ok(RunOutcome { system: AnySystem::Three(s), rows, min_psi })
        }
    }
}

/// Sum of the contact forces on fluid nodes and on solid nodes.
pub fn contact_resultants<const D: usize>(system: &System<D>) -> (Vector<D>, Vector<D>)
where
    Dim<D>: Lattice<D>,
{
    let mut out: Vec<Vec<Vector<D>>> =
        system.bodies.iter().map(|b| vec![Vector::<D>::zeros(); b.mesh.num_nodes()]).collect();
    contact::contact_force(system.pairs(), &system.bodies, &mut out);
    let mut fluid = Vector::<D>::zeros();
    let mut solid = Vector::<D>::zeros();
    for (b, f) in system.bodies.iter().zip(&out) {
        let sum: Vector<D> = f.iter().sum();
        if b.is_fluid() {
            fluid += sum;
        } else {
            solid += sum;
        }
    }
    (fluid, solid)
}
