//! Scenario files: an INI-style description of bodies, loads and run
//! control, parsed into a validated [`Scenario`] and built into a
//! [`System`].
//!
//! ```text
//! [time]
//! dt = 1e-4
//! horizon = 0.4          # or: steps = 4000
//!
//! [gravity]
//! g = 0, 9.81
//!
//! [solid.beam]
//! material = stvk        # or mooney_rivlin (3D)
//! density = 945
//! young = 2.5e6
//! poisson = 0.4999
//! penalty = 1e4
//! size = 0.8, 0.2        # or: counts = 33, 9
//! spacing = 0.025, 0.025
//! fixed = a == 0
//!
//! [fluid.water]
//! density = 997
//! gamma = 6
//! a_tilde = 3.041e4
//! b = 3.0397e4
//! counts = 21, 11
//! spacing = 0.025, 0.015
//! origin = 0.17, 0.101
//!
//! [contact]
//! stiffness = 1e9
//! families = 1, 2, 3, 4
//!
//! [output]
//! dir = out/container
//! formats = csv, vtk
//! stride = 100
//! ```

pub mod selector;

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::dim::{Dim, Lattice, Vector};
use crate::error::{Error, Result};
use crate::integrator::{Body, ContactSettings, System};
use crate::materials::{Law, Material, MooneyRivlinParams, StVKParams, TaitParams};
use crate::mesh::{GridSpec, Mesh};

pub use selector::Selector;

#[derive(Clone, Debug, PartialEq)]
pub struct TimeBlock {
    pub dt: f64,
    pub steps: usize,
}

impl TimeBlock {
    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Lattice of one body: node counts, spacings and the position of node 0.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBlock {
    pub counts: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl GridBlock {
    /// Reference side lengths `(n − 1)·Δs`.
    pub fn extent(&self) -> Vec<f64> {
        self.counts.iter().zip(&self.spacing).map(|(&n, &h)| (n - 1) as f64 * h).collect()
    }

    /// Same extent on a lattice with the given spacing on every axis.
    pub fn refit(&self, spacing: f64) -> Result<GridBlock> {
        let counts = self
            .extent()
            .iter()
            .enumerate()
            .map(|(k, &len)| {
                cells_for(len, spacing).map(|n| n + 1).ok_or_else(|| {
                    Error::invalid("spacing", format!("{spacing} does not divide the extent {len} along axis {k}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridBlock { counts, spacing: vec![spacing; self.counts.len()], origin: self.origin.clone() })
    }

    fn spec<const D: usize>(&self) -> GridSpec<D> {
        GridSpec::new(std::array::from_fn(|k| self.counts[k]), std::array::from_fn(|k| self.spacing[k]))
            .with_origin(to_vector(&self.origin))
    }
}

fn cells_for(length: f64, spacing: f64) -> Option<usize> {
    let r = length / spacing;
    let n = r.round();
    (n >= 1.0 && (r - n).abs() <= 1e-9 * n).then_some(n as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolidMaterial {
    StVenantKirchhoff { young: f64, poisson: f64 },
    MooneyRivlin { c1: f64, c2: f64, stiffness_scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolidSpec {
    pub name: String,
    pub grid: GridBlock,
    pub material: SolidMaterial,
    pub density: f64,
    pub penalty: f64,
    pub velocity: Vec<f64>,
    pub fixed: Option<Selector>,
    /// Cells (by lowest corner) left out of the lattice.
    pub remove: Option<Selector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluidSpec {
    pub name: String,
    pub grid: GridBlock,
    pub density: f64,
    pub gamma: f64,
    pub a_tilde: f64,
    pub b: f64,
    pub penalty: f64,
    pub velocity: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Vtk,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Vtk => "vtk",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Frames and diagnostics rows are written every `stride` steps.
    pub stride: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: None, formats: vec![Format::Csv], stride: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub time: TimeBlock,
    pub gravity: Vec<f64>,
    pub solids: Vec<SolidSpec>,
    pub fluid: Option<FluidSpec>,
    pub contact: ContactSettings,
    pub output: OutputBlock,
}

/// A built system of either dimension.
#[derive(Clone, Debug)]
pub enum AnySystem {
    Two(System<2>),
    Three(System<3>),
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.iter_mut().find(|e| e.key == key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse_f64(&v).map(Some).ok_or_else(|| Error::Syntax {
                line,
                message: format!("`{}` expects a number, found '{v}'", self.field(key)),
            }),
        }
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        self.opt_f64(key)?.ok_or_else(|| Error::invalid(self.field(key), "missing"))
    }

    fn opt_list<T>(&mut self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| parse(s.trim()))
                .collect::<Option<Vec<T>>>()
                .filter(|l| !l.is_empty())
                .map(Some)
                .ok_or_else(|| Error::Syntax {
                    line,
                    message: format!("`{}`: cannot read list '{v}'", self.field(key)),
                }),
        }
    }

    fn opt_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| Error::Syntax {
                line,
                message: format!("`{}` expects a nonnegative integer, found '{v}'", self.field(key)),
            }),
        }
    }

    fn opt_selector(&mut self, key: &str) -> Result<Option<Selector>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => Selector::parse(&v)
                .map(Some)
                .map_err(|m| Error::Syntax { line, message: format!("`{}`: {m}", self.field(key)) }),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|e| !e.used) {
            Some(e) => Err(Error::invalid(self.field(&e.key), format!("unknown key (line {})", e.line))),
            None => Ok(()),
        }
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() || content.starts_with(';') {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| Error::Syntax { line, message: format!("malformed section header '{content}'") })?;
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::Syntax { line, message: format!("section [{name}] appears twice") });
            }
            sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Syntax { line, message: format!("expected `key = value`, found '{content}'") })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Syntax { line, message: "key and value must be non-empty".into() });
        }
        let section =
            sections.last_mut().ok_or_else(|| Error::Syntax { line, message: "key outside of any section".into() })?;
        if section.has(key) {
            return Err(Error::Syntax { line, message: format!("`{}` set twice", section.field(key)) });
        }
        section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line, used: false });
    }
    Ok(sections)
}

fn body_name(section: &Section, prefix: &str) -> Result<String> {
    let name = &section.name[prefix.len()..];
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(Error::Syntax { line: section.line, message: format!("invalid body name in [{}]", section.name) });
    }
    Ok(name.to_string())
}

fn parse_grid(s: &mut Section) -> Result<GridBlock> {
    let spacing = s.opt_list("spacing", parse_f64)?.ok_or_else(|| Error::invalid(s.field("spacing"), "missing"))?;
    if spacing.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::invalid(s.field("spacing"), "must be positive"));
    }
    let counts = s.opt_list("counts", |v| v.parse::<usize>().ok())?;
    let size = s.opt_list("size", parse_f64)?;
    let counts = match (counts, size) {
        (Some(_), Some(_)) => return Err(Error::invalid(s.field("size"), "give either `size` or `counts`, not both")),
        (None, None) => return Err(Error::invalid(s.field("counts"), "missing (or give `size`)")),
        (Some(c), None) => c,
        (None, Some(size)) => {
            if size.len() != spacing.len() {
                return Err(Error::invalid(s.field("size"), "length differs from `spacing`"));
            }
            size.iter()
                .zip(&spacing)
                .map(|(&len, &h)| {
                    cells_for(len, h).map(|n| n + 1).ok_or_else(|| {
                        Error::invalid(s.field("size"), format!("{len} is not a multiple of the spacing {h}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if counts.len() != spacing.len() {
        return Err(Error::invalid(s.field("counts"), "length differs from `spacing`"));
    }
    if !(counts.len() == 2 || counts.len() == 3) {
        return Err(Error::invalid(s.field("spacing"), "bodies must be 2D or 3D"));
    }
    if counts.iter().any(|&n| n < 2) {
        return Err(Error::invalid(s.field("counts"), "need at least two nodes per axis"));
    }
    let origin = s.opt_list("origin", parse_f64)?.unwrap_or_else(|| vec![0.0; counts.len()]);
    if origin.len() != counts.len() {
        return Err(Error::invalid(s.field("origin"), "length differs from the body dimension"));
    }
    Ok(GridBlock { counts, spacing, origin })
}

fn parse_velocity(s: &mut Section, dim: usize) -> Result<Vec<f64>> {
    let v = s.opt_list("velocity", parse_f64)?.unwrap_or_else(|| vec![0.0; dim]);
    if v.len() != dim {
        return Err(Error::invalid(s.field("velocity"), "length differs from the body dimension"));
    }
    Ok(v)
}

fn parse_solid(s: &mut Section) -> Result<SolidSpec> {
    let name = body_name(s, "solid.")?;
    let grid = parse_grid(s)?;
    let dim = grid.counts.len();
    let (kind, line) = s.take("material").ok_or_else(|| Error::invalid(s.field("material"), "missing"))?;
    let material = match kind.as_str() {
        "stvk" => SolidMaterial::StVenantKirchhoff { young: s.f64("young")?, poisson: s.f64("poisson")? },
        "mooney_rivlin" => SolidMaterial::MooneyRivlin {
            c1: s.f64("c1")?,
            c2: s.f64("c2")?,
            stiffness_scale: s.opt_f64("stiffness_scale")?.unwrap_or(1.0),
        },
        other => {
            return Err(Error::Syntax {
                line,
                message: format!("`{}`: unknown material '{other}' (stvk, mooney_rivlin)", s.field("material")),
            })
        }
    };
    let spec = SolidSpec {
        density: s.f64("density")?,
        penalty: s.opt_f64("penalty")?.unwrap_or(0.0),
        velocity: parse_velocity(s, dim)?,
        fixed: s.opt_selector("fixed")?,
        remove: s.opt_selector("remove")?,
        name,
        grid,
        material,
    };
    s.finish()?;
    Ok(spec)
}

fn parse_fluid(s: &mut Section) -> Result<FluidSpec> {
    let name = body_name(s, "fluid.")?;
    let grid = parse_grid(s)?;
    let dim = grid.counts.len();
    let spec = FluidSpec {
        density: s.f64("density")?,
        gamma: s.f64("gamma")?,
        a_tilde: s.f64("a_tilde")?,
        b: s.f64("b")?,
        penalty: s.opt_f64("penalty")?.unwrap_or(0.0),
        velocity: parse_velocity(s, dim)?,
        name,
        grid,
    };
    s.finish()?;
    Ok(spec)
}

impl Scenario {
    /// Parses and validates scenario text.
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut time = None;
        let mut gravity = None;
        let mut solids = Vec::new();
        let mut fluid: Option<FluidSpec> = None;
        let mut contact = ContactSettings::default();
        let mut output = OutputBlock::default();

        for mut s in split_sections(text)? {
            match s.name.as_str() {
                "time" => {
                    let dt = s.opt_f64("dt")?.ok_or_else(|| Error::invalid("time.dt", "missing"))?;
                    if !(dt > 0.0) {
                        return Err(Error::invalid("time.dt", "must be positive"));
                    }
                    let steps = match (s.opt_usize("steps")?, s.opt_f64("horizon")?) {
                        (Some(_), Some(_)) => {
                            return Err(Error::invalid("time.horizon", "give either `steps` or `horizon`"))
                        }
                        (None, None) => return Err(Error::invalid("time.steps", "missing (or give `horizon`)")),
                        (Some(n), None) => n,
                        (None, Some(h)) => steps_for(h, dt).ok_or_else(|| {
                            Error::invalid("time.horizon", format!("{h} is not a positive multiple of dt = {dt}"))
                        })?,
                    };
                    if steps == 0 {
                        return Err(Error::invalid("time.steps", "must be positive"));
                    }
                    s.finish()?;
                    time = Some(TimeBlock { dt, steps });
                }
                "gravity" => {
                    gravity = Some(s.opt_list("g", parse_f64)?.ok_or_else(|| Error::invalid("gravity.g", "missing"))?);
                    s.finish()?;
                }
                "contact" => {
                    contact.stiffness = s.opt_f64("stiffness")?.unwrap_or(0.0);
                    if !(contact.stiffness >= 0.0) {
                        return Err(Error::invalid("contact.stiffness", "must be nonnegative"));
                    }
                    if let Some(f) = s.opt_list("families", |v| v.parse::<u8>().ok())? {
                        if f.iter().any(|&k| !(1..=4).contains(&k)) {
                            return Err(Error::invalid("contact.families", "families are numbered 1 to 4"));
                        }
                        contact.families = f;
                    }
                    s.finish()?;
                }
                "output" => {
                    output.dir = s.take("dir").map(|(v, _)| PathBuf::from(v));
                    if let Some((v, line)) = s.take("formats") {
                        output.formats = v
                            .split(',')
                            .map(|f| match f.trim() {
                                "csv" => Ok(Format::Csv),
                                "vtk" => Ok(Format::Vtk),
                                other => Err(Error::Syntax {
                                    line,
                                    message: format!("`output.formats`: unknown format '{other}' (csv, vtk)"),
                                }),
                            })
                            .collect::<Result<_>>()?;
                    }
                    output.stride = s.opt_usize("stride")?.unwrap_or(1);
                    if output.stride == 0 {
                        return Err(Error::invalid("output.stride", "must be positive"));
                    }
                    s.finish()?;
                }
                name if name.starts_with("solid.") => solids.push(parse_solid(&mut s)?),
                name if name.starts_with("fluid.") => {
                    if fluid.is_some() {
                        return Err(Error::invalid(name, "at most one fluid body is supported"));
                    }
                    fluid = Some(parse_fluid(&mut s)?);
                }
                other => return Err(Error::Syntax { line: s.line, message: format!("unknown section [{other}]") }),
            }
        }

        let time = time.ok_or_else(|| Error::invalid("time.dt", "missing [time] section"))?;
        let scenario = Scenario { time, gravity: gravity.unwrap_or_default(), solids, fluid, contact, output };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Checks everything that does not need a mesh.
    pub fn validate(&self) -> Result<()> {
        if !(self.time.dt > 0.0 && self.time.dt.is_finite()) {
            return Err(Error::invalid("time.dt", "must be positive"));
        }
        if self.time.steps == 0 {
            return Err(Error::invalid("time.steps", "must be positive"));
        }
        let dim = self.dimension().ok_or_else(|| Error::invalid("solid", "scenario has no bodies"))?;
        if !self.gravity.is_empty() && self.gravity.len() != dim {
            return Err(Error::invalid("gravity.g", format!("expected {dim} components")));
        }
        let mut names = Vec::new();
        for s in &self.solids {
            let field = |k: &str| format!("solid.{}.{k}", s.name);
            if s.grid.counts.len() != dim {
                return Err(Error::invalid(field("spacing"), "bodies have different dimensions"));
            }
            match s.material {
                SolidMaterial::StVenantKirchhoff { young, poisson } => {
                    if dim != 2 {
                        return Err(Error::invalid(field("material"), "stvk uses plane Lamé constants and is 2D only"));
                    }
                    StVKParams::new(s.density, young, poisson).map_err(|e| rename(e, &format!("solid.{}", s.name)))?;
                }
                SolidMaterial::MooneyRivlin { c1, c2, stiffness_scale } => {
                    if dim != 3 {
                        return Err(Error::invalid(field("material"), "mooney_rivlin is 3D only"));
                    }
                    MooneyRivlinParams::new(s.density, c1, c2, stiffness_scale)
                        .map_err(|e| rename(e, &format!("solid.{}", s.name)))?;
                }
            }
            if !(s.penalty >= 0.0) {
                return Err(Error::invalid(field("penalty"), "must be nonnegative"));
            }
            for (key, sel) in [("fixed", &s.fixed), ("remove", &s.remove)] {
                if sel.as_ref().is_some_and(|sel| sel.dimension_needed() > dim) {
                    return Err(Error::invalid(field(key), "refers to an axis the body does not have"));
                }
            }
            names.push(s.name.as_str());
        }
        if let Some(f) = &self.fluid {
            let prefix = format!("fluid.{}", f.name);
            if f.grid.counts.len() != dim {
                return Err(Error::invalid(format!("{prefix}.spacing"), "bodies have different dimensions"));
            }
            TaitParams::new(f.density, f.gamma, f.a_tilde, f.b).map_err(|e| rename(e, &prefix))?;
            if !(f.penalty >= 0.0) {
                return Err(Error::invalid(format!("{prefix}.penalty"), "must be nonnegative"));
            }
            names.push(f.name.as_str());
        }
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(w[0], "body names must be unique"));
        }
        if self.output.stride == 0 {
            return Err(Error::invalid("output.stride", "must be positive"));
        }
        Ok(())
    }

    /// Spatial dimension of the bodies.
    pub fn dimension(&self) -> Option<usize> {
        self.solids.first().map(|s| s.grid.counts.len()).or_else(|| self.fluid.as_ref().map(|f| f.grid.counts.len()))
    }

    /// Replaces the run length with `horizon`, which must be a multiple of
    /// the current time step.
    pub fn set_horizon(&mut self, horizon: f64) -> Result<()> {
        self.time.steps = steps_for(horizon, self.time.dt).ok_or_else(|| {
            Error::invalid("time.horizon", format!("{horizon} is not a positive multiple of dt = {}", self.time.dt))
        })?;
        Ok(())
    }

    /// Changes the time step keeping the horizon.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        let horizon = self.time.horizon();
        self.time.dt = dt;
        self.set_horizon(horizon)
    }

    /// Puts every body on a lattice with spacing `ds` on all axes, keeping
    /// the reference extents.
    pub fn set_spacing(&mut self, ds: f64) -> Result<()> {
        for s in &mut self.solids {
            s.grid = s.grid.refit(ds).map_err(|e| rename(e, &format!("solid.{}", s.name)))?;
        }
        if let Some(f) = &mut self.fluid {
            f.grid = f.grid.refit(ds).map_err(|e| rename(e, &format!("fluid.{}", f.name)))?;
        }
        Ok(())
    }

    /// Builds the system at step 0.
    pub fn build(&self) -> Result<AnySystem> {
        match self.dimension() {
            Some(2) => self.build_dim::<2>().map(AnySystem::Two),
            Some(3) => self.build_dim::<3>().map(AnySystem::Three),
            _ => Err(Error::invalid("solid", "scenario has no 2D or 3D bodies")),
        }
    }

    pub fn build_dim<const D: usize>(&self) -> Result<System<D>>
    where
        Dim<D>: Lattice<D>,
    {
        self.validate()?;
        if self.dimension() != Some(D) {
            return Err(Error::invalid("solid", format!("scenario is not {D}D")));
        }
        let mut bodies = Vec::new();
        for s in &self.solids {
            let prefix = format!("solid.{}", s.name);
            let spec = s.grid.spec::<D>();
            let mesh = match &s.remove {
                Some(sel) => {
                    let max = spec.max_index();
                    Mesh::with_cells(spec, |low| !sel.matches(&low, &max))
                }
                None => Mesh::new(spec),
            }
            .map_err(|e| rename(e, &prefix))?;
            let law = match s.material {
                SolidMaterial::StVenantKirchhoff { young, poisson } => {
                    Law::StVenantKirchhoff(StVKParams::new(s.density, young, poisson)?)
                }
                SolidMaterial::MooneyRivlin { c1, c2, stiffness_scale } => {
                    Law::MooneyRivlin(MooneyRivlinParams::new(s.density, c1, c2, stiffness_scale)?)
                }
            };
            let fixed = match &s.fixed {
                Some(sel) => {
                    let max = mesh.max_index();
                    let nodes: Vec<usize> =
                        (0..mesh.num_nodes()).filter(|&n| sel.matches(&mesh.node_coords(n), &max)).collect();
                    if nodes.is_empty() {
                        return Err(Error::invalid(format!("{prefix}.fixed"), "selects no nodes"));
                    }
                    nodes
                }
                None => Vec::new(),
            };
            let material = Material::new(law, s.penalty)?;
            bodies.push(Body::new(s.name.clone(), mesh, material, to_vector(&s.velocity), &fixed)?);
        }
        if let Some(f) = &self.fluid {
            let prefix = format!("fluid.{}", f.name);
            let mesh = Mesh::new(f.grid.spec::<D>()).map_err(|e| rename(e, &prefix))?;
            let law = Law::Tait(TaitParams::new(f.density, f.gamma, f.a_tilde, f.b)?);
            bodies.push(Body::new(f.name.clone(), mesh, Material::new(law, f.penalty)?, to_vector(&f.velocity), &[])?);
        }
        let gravity = if self.gravity.is_empty() { Vector::<D>::zeros() } else { to_vector(&self.gravity) };
        System::new(bodies, gravity, self.contact.clone(), self.time.dt)
    }

    /// Canonical text form; [`Scenario::parse`] reads it back unchanged.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let ilist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let grid = |out: &mut String, g: &GridBlock| {
            let _ = writeln!(out, "counts = {}", ilist(&g.counts));
            let _ = writeln!(out, "spacing = {}", list(&g.spacing));
            let _ = writeln!(out, "origin = {}", list(&g.origin));
        };
        let _ = writeln!(out, "[time]\ndt = {:?}\nsteps = {}\n", self.time.dt, self.time.steps);
        if !self.gravity.is_empty() {
            let _ = writeln!(out, "[gravity]\ng = {}\n", list(&self.gravity));
        }
        for s in &self.solids {
            let _ = writeln!(out, "[solid.{}]", s.name);
            match s.material {
                SolidMaterial::StVenantKirchhoff { young, poisson } => {
                    let _ = writeln!(out, "material = stvk\nyoung = {young:?}\npoisson = {poisson:?}");
                }
                SolidMaterial::MooneyRivlin { c1, c2, stiffness_scale } => {
                    let _ = writeln!(
                        out,
                        "material = mooney_rivlin\nc1 = {c1:?}\nc2 = {c2:?}\nstiffness_scale = {stiffness_scale:?}"
                    );
                }
            }
            let _ = writeln!(out, "density = {:?}\npenalty = {:?}", s.density, s.penalty);
            grid(&mut out, &s.grid);
            let _ = writeln!(out, "velocity = {}", list(&s.velocity));
            if let Some(sel) = &s.fixed {
                let _ = writeln!(out, "fixed = {sel}");
            }
            if let Some(sel) = &s.remove {
                let _ = writeln!(out, "remove = {sel}");
            }
            out.push('\n');
        }
        if let Some(f) = &self.fluid {
            let _ = writeln!(out, "[fluid.{}]", f.name);
            let _ = writeln!(
                out,
                "density = {:?}\ngamma = {:?}\na_tilde = {:?}\nb = {:?}\npenalty = {:?}",
                f.density, f.gamma, f.a_tilde, f.b, f.penalty
            );
            grid(&mut out, &f.grid);
            let _ = writeln!(out, "velocity = {}\n", list(&f.velocity));
        }
        let families = self.contact.families.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "[contact]\nstiffness = {:?}", self.contact.stiffness);
        if !families.is_empty() {
            let _ = writeln!(out, "families = {families}");
        }
        let _ = writeln!(out, "\n[output]");
        if let Some(dir) = &self.output.dir {
            let _ = writeln!(out, "dir = {}", dir.display());
        }
        let formats = self.output.formats.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ");
        if !formats.is_empty() {
            let _ = writeln!(out, "formats = {formats}");
        }
        let _ = writeln!(out, "stride = {}", self.output.stride);
        out
    }
}

fn steps_for(horizon: f64, dt: f64) -> Option<usize> {
    cells_for(horizon, dt)
}

fn to_vector<const D: usize>(v: &[f64]) -> Vector<D> {
    Vector::<D>::from_fn(|k, _| v[k])
}

/// Prefixes the field of a validation error with the section it came from.
fn rename(e: Error, prefix: &str) -> Error {
    match e {
        Error::Invalid { field, message } => Error::Invalid { field: format!("{prefix}.{field}"), message },
        Error::InvalidGrid(message) => Error::Invalid { field: format!("{prefix}.counts"), message },
        other => other,
    }
}
