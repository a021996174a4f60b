//! Frame files (CSV and legacy VTK) and the diagnostics table.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! frame read back with [`read_frame_csv`] reproduces the state bit for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::Vector2;

use crate::diagnostics::{EnergyBreakdown, MomentumSE};
use crate::dim::{Dim, Lattice, Vector};
use crate::error::{Error, Result};
use crate::integrator::Body;

const AXES: [&str; 3] = ["a", "b", "c"];
const COORDS: [&str; 3] = ["x", "y", "z"];

/// Header `step,time,body,node,a,b[,c],x,y[,z],vx,vy[,vz]`.
pub fn frame_header(dim: usize) -> String {
    let mut cols = vec!["step".to_string(), "time".into(), "body".into(), "node".into()];
    cols.extend(AXES[..dim].iter().map(|s| s.to_string()));
    cols.extend(COORDS[..dim].iter().map(|s| s.to_string()));
    cols.extend(COORDS[..dim].iter().map(|s| format!("v{s}")));
    cols.join(",")
}

/// One CSV frame with a row per node of every body.
pub fn frame_csv<const D: usize>(bodies: &[Body<D>], step: usize, time: f64) -> String
where
    Dim<D>: Lattice<D>,
{
    let mut out = frame_header(D);
    out.push('\n');
    for b in bodies {
        for n in 0..b.mesh.num_nodes() {
            let _ = write!(out, "{step},{time:?},{},{n}", b.name);
            for i in b.mesh.node_coords(n) {
                let _ = write!(out, ",{i}");
            }
            for x in b.state.positions[n].iter().chain(b.state.velocities[n].iter()) {
                let _ = write!(out, ",{x:?}");
            }
            out.push('\n');
        }
    }
    out
}

/// A data row of a frame file.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameRow {
    pub step: usize,
    pub time: f64,
    pub body: String,
    pub node: usize,
    pub index: Vec<usize>,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// Parses a frame written by [`frame_csv`].
pub fn read_frame_csv(text: &str) -> Result<Vec<FrameRow>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Syntax { line: 1, message: "empty frame file".into() })?;
    let dim = match header.split(',').count() {
        10 => 2,
        13 => 3,
        _ => return Err(Error::Syntax { line: 1, message: "unrecognized frame header".into() }),
    };
    if header != frame_header(dim) {
        return Err(Error::Syntax { line: 1, message: "unrecognized frame header".into() });
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Syntax { line: i + 1, message: format!("cannot read {what}") };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 + 3 * dim {
            return Err(bad("row: wrong number of fields"));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad("number"));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad("integer"));
        rows.push(FrameRow {
            step: int(f[0])?,
            time: float(f[1])?,
            body: f[2].to_string(),
            node: int(f[3])?,
            index: f[4..4 + dim].iter().map(|s| int(s)).collect::<Result<_>>()?,
            position: f[4 + dim..4 + 2 * dim].iter().map(|s| float(s)).collect::<Result<_>>()?,
            velocity: f[4 + 2 * dim..].iter().map(|s| float(s)).collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

/// Corner slots in the cyclic order VTK expects for quads and hexahedra.
fn vtk_order(dim: usize) -> &'static [usize] {
    if dim == 2 {
        &[0, 1, 3, 2]
    } else {
        &[0, 1, 4, 2, 3, 6, 7, 5]
    }
}

/// Legacy-VTK unstructured grid of one body with velocities as point data.
pub fn body_vtk<const D: usize>(body: &Body<D>, step: usize, time: f64) -> String
where
    Dim<D>: Lattice<D>,
{
    let mesh = &body.mesh;
    let order = vtk_order(D);
    let (cell_type, k) = if D == 2 { (9, 4) } else { (12, 8) };
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "{} step {step} time {time:?}", body.name);
    let _ = writeln!(out, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.num_nodes());
    let xyz = |v: &Vector<D>| {
        let z = if D == 3 { v[2] } else { 0.0 };
        format!("{:?} {:?} {:?}", v[0], v[1], z)
    };
    for x in &body.state.positions {
        let _ = writeln!(out, "{}", xyz(x));
    }
    let _ = writeln!(out, "CELLS {} {}", mesh.num_cells(), mesh.num_cells() * (k + 1));
    for c in 0..mesh.num_cells() {
        let corners = mesh.cell_corners(c);
        let ids: Vec<String> = order.iter().map(|&s| corners[s].to_string()).collect();
        let _ = writeln!(out, "{k} {}", ids.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {}", mesh.num_cells());
    for _ in 0..mesh.num_cells() {
        let _ = writeln!(out, "{cell_type}");
    }
    let _ = writeln!(out, "POINT_DATA {}\nVECTORS velocity double", mesh.num_nodes());
    for v in &body.state.velocities {
        let _ = writeln!(out, "{}", xyz(v));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// One line of the diagnostics table.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    pub energy: EnergyBreakdown,
    pub relative_energy: f64,
    pub momentum: MomentumSE,
    /// Smallest gap over the current contact pairs, if any.
    pub min_psi: Option<f64>,
    /// Right and left pressure resultants of a 2D fluid.
    pub resultants: Option<[Vector2<f64>; 2]>,
}

/// Fixed column order of the diagnostics CSV.
pub fn diagnostics_header(dim: usize, resultants: bool) -> String {
    let mut cols: Vec<String> = [
        "step",
        "time",
        "kinetic",
        "stored_solid",
        "stored_fluid",
        "gravitational",
        "incompressibility",
        "contact",
        "total",
        "relative_energy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let n = if dim == 2 { 3 } else { 6 };
    cols.extend((1..=n).map(|i| format!("J{i}")));
    cols.push("min_psi".into());
    if resultants {
        cols.extend(["right_x", "right_y", "right_norm", "left_x", "left_y", "left_norm"].map(String::from));
    }
    cols.join(",")
}

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        let e = &self.energy;
        let mut vals: Vec<String> = vec![self.step.to_string(), format!("{:?}", self.time)];
        for v in [
            e.kinetic,
            e.stored_solid,
            e.stored_fluid,
            e.gravitational,
            e.incompressibility,
            e.contact,
            e.total,
            self.relative_energy,
        ] {
            vals.push(format!("{v:?}"));
        }
        vals.extend(self.momentum.components().iter().map(|v| format!("{v:?}")));
        vals.push(self.min_psi.map_or(String::new(), |v| format!("{v:?}")));
        if let Some(rs) = &self.resultants {
            for r in rs {
                vals.extend([r.x, r.y, r.norm()].iter().map(|v| format!("{v:?}")));
            }
        }
        vals.join(",")
    }
}

/// Streams diagnostics rows to a CSV file.
pub struct DiagnosticsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path, dim: usize, resultants: bool) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = DiagnosticsWriter { path: path.to_path_buf(), out: BufWriter::new(file) };
        w.line(&diagnostics_header(dim, resultants))?;
        Ok(w)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn write(&mut self, row: &DiagnosticsRow) -> Result<()> {
        self.line(&row.to_csv())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}
