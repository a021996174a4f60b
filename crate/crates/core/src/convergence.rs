//! Time and space refinement studies.
//!
//! Every run of a study is independent, so runs execute in parallel; each
//! run is itself deterministic. Errors are L2 norms of the final positions
//! against a reference run. Spatial studies evaluate every run at the nodes
//! of the coarsest lattice, so each row sums over the same node set.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::diagnostics::{convergence_rates, injection_map, l2_error, ConvergenceReport};
use crate::dim::{Dim, Lattice};
use crate::error::{Error, Result};
use crate::integrator::System;
use crate::run::run_scenario;
use crate::scenario::{AnySystem, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Time,
    Space,
}

impl StudyKind {
    fn label(self) -> &'static str {
        match self {
            StudyKind::Time => "dt",
            StudyKind::Space => "ds",
        }
    }
}

/// Outcome of every run of a study; failed runs keep their message.
#[derive(Clone, Debug)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub params: Vec<f64>,
    pub reference: f64,
    pub horizon: f64,
    pub errors: Vec<std::result::Result<f64, String>>,
}

impl StudyResult {
    /// Rates table when every run succeeded.
    pub fn report(&self) -> Result<ConvergenceReport> {
        let errors = self
            .errors
            .iter()
            .zip(&self.params)
            .map(|(e, p)| e.clone().map_err(|m| Error::Study(format!("{} = {p}: {m}", self.kind.label()))))
            .collect::<Result<Vec<f64>>>()?;
        convergence_rates(&self.params, &errors)
    }

    /// CSV table `param,error,rate`; failed runs leave the error empty and
    /// carry the message in a trailing column.
    pub fn to_csv(&self) -> String {
        let rates = self.report().ok().map(|r| r.rates);
        let mut out = format!("{},l2_error,rate,failure\n", self.kind.label());
        for (i, (p, e)) in self.params.iter().zip(&self.errors).enumerate() {
            let rate = match (&rates, i) {
                (Some(r), i) if i > 0 => format!("{:?}", r[i - 1]),
                _ => String::new(),
            };
            let (err, fail) = match e {
                Ok(v) => (format!("{v:?}"), String::new()),
                Err(m) => (String::new(), m.replace([',', '\n'], ";")),
            };
            let _ = writeln!(out, "{p:?},{err},{rate},{fail}");
        }
        out
    }

    /// Human-readable table.
    pub fn summary(&self) -> String {
        let rates = self.report().ok().map(|r| r.rates);
        let mut out = format!(
            "{} study, reference {} = {}, horizon {} s\n{:>12} {:>14} {:>8}\n",
            if self.kind == StudyKind::Time { "time" } else { "space" },
            self.kind.label(),
            self.reference,
            self.horizon,
            self.kind.label(),
            "L2 error",
            "rate"
        );
        for (i, (p, e)) in self.params.iter().zip(&self.errors).enumerate() {
            let rate = match (&rates, i) {
                (Some(r), i) if i > 0 => format!("{:.4}", r[i - 1]),
                _ => String::new(),
            };
            match e {
                Ok(v) => {
                    let _ = writeln!(out, "{p:>12e} {v:>14.6e} {rate:>8}");
                }
                Err(m) => {
                    let _ = writeln!(out, "{p:>12e} {:>14} {m}", "failed");
                }
            }
        }
        out
    }
}

fn is_halving(values: &[f64]) -> bool {
    values.windows(2).all(|w| ((w[0] / w[1]) - 2.0).abs() < 1e-9)
}

fn validate_common(params: &[f64], reference: f64, name: &str) -> Result<()> {
    if params.len() < 2 {
        return Err(Error::invalid(name, "need at least two entries"));
    }
    if params.iter().chain([&reference]).any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::invalid(name, "values must be positive"));
    }
    if !is_halving(params) {
        return Err(Error::invalid(name, "entries must halve from one to the next"));
    }
    let min = params.iter().copied().fold(f64::INFINITY, f64::min);
    if reference >= min {
        return Err(Error::invalid("ref", format!("reference {reference} must be below {min}")));
    }
    Ok(())
}

/// Final-position error of `run` against `reference`; with `common`, both
/// are first restricted to the nodes of that (coarser) lattice.
fn final_positions_error<const D: usize>(
    run: &System<D>,
    reference: &System<D>,
    common: Option<&System<D>>,
) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    if run.bodies.len() != reference.bodies.len() {
        return Err(Error::Study("runs have different bodies".into()));
    }
    let mut sq = 0.0;
    for (k, (a, b)) in run.bodies.iter().zip(&reference.bodies).enumerate() {
        let e = match common {
            Some(c) => {
                let mesh = &c.bodies[k].mesh;
                let xa: Vec<_> = injection_map(mesh, &a.mesh)?.iter().map(|&i| a.state.positions[i]).collect();
                let xb: Vec<_> = injection_map(mesh, &b.mesh)?.iter().map(|&i| b.state.positions[i]).collect();
                l2_error(&xa, &xb)?
            }
            None => l2_error(&a.state.positions, &b.state.positions)?,
        };
        sq += e * e;
    }
    Ok(sq.sqrt())
}

fn compare(run: &AnySystem, reference: &AnySystem, common: Option<&AnySystem>) -> Result<f64> {
    match (run, reference, common) {
        (AnySystem::Two(a), AnySystem::Two(b), None) => final_positions_error(a, b, None),
        (AnySystem::Two(a), AnySystem::Two(b), Some(AnySystem::Two(c))) => final_positions_error(a, b, Some(c)),
        (AnySystem::Three(a), AnySystem::Three(b), None) => final_positions_error(a, b, None),
        (AnySystem::Three(a), AnySystem::Three(b), Some(AnySystem::Three(c))) => final_positions_error(a, b, Some(c)),
        _ => Err(Error::Study("runs have different dimensions".into())),
    }
}

fn prepare(base: &Scenario, kind: StudyKind, value: f64, horizon: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match kind {
        StudyKind::Time => s.time.dt = value,
        StudyKind::Space => s.set_spacing(value)?,
    }
    s.set_horizon(horizon)?;
    Ok(s)
}

fn study(
    base: &Scenario,
    kind: StudyKind,
    params: &[f64],
    reference: f64,
    horizon: Option<f64>,
) -> Result<StudyResult> {
    validate_common(params, reference, kind.label())?;
    let horizon = horizon.unwrap_or_else(|| base.time.horizon());
    // Validate every configuration before spending time on runs.
    let configs =
        params.iter().chain([&reference]).map(|&v| prepare(base, kind, v, horizon)).collect::<Result<Vec<_>>>()?;
    if kind == StudyKind::Space {
        let min = params.iter().copied().fold(f64::INFINITY, f64::min);
        let ratio = (min / reference).round();
        if (min / reference - ratio).abs() > 1e-9 * ratio || (ratio as u64).count_ones() != 1 {
            return Err(Error::invalid("ref", "reference spacing must nest in the finest spacing by a power of two"));
        }
    }
    let runs: Vec<std::result::Result<AnySystem, String>> =
        configs.par_iter().map(|s| run_scenario(s, None).map(|o| o.system).map_err(|e| e.to_string())).collect();
    let (reference_run, runs) = runs.split_last().expect("reference run present");
    // The coarsest lattice, rebuilt from its configuration so a failed
    // coarse run does not prevent comparing the others.
    let common = match kind {
        StudyKind::Space => Some(configs[0].build()?),
        StudyKind::Time => None,
    };
    let errors = runs
        .iter()
        .map(|r| match (r, reference_run) {
            (Ok(run), Ok(refr)) => compare(run, refr, common.as_ref()).map_err(|e| e.to_string()),
            (Err(m), _) => Err(m.clone()),
            (_, Err(m)) => Err(format!("reference run failed: {m}")),
        })
        .collect();
    Ok(StudyResult { kind, params: params.to_vec(), reference, horizon, errors })
}

/// Runs the scenario at each time step and at `reference`, comparing final
/// positions on the same mesh.
pub fn converge_time(base: &Scenario, dts: &[f64], reference: f64, horizon: Option<f64>) -> Result<StudyResult> {
    study(base, StudyKind::Time, dts, reference, horizon)
}

/// Runs the scenario on each spacing and on `reference`, comparing final
/// positions at the nodes of the coarsest lattice.
pub fn converge_space(base: &Scenario, ds: &[f64], reference: f64, horizon: Option<f64>) -> Result<StudyResult> {
    study(base, StudyKind::Space, ds, reference, horizon)
}
