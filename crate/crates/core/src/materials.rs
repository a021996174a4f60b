//! Stored energies and second Piola-Kirchhoff stresses.
//!
//! Solid energies are handled as densities per unit reference volume
//! (`ρ₀W`); the Tait fluid energy is per unit mass as usual for a barotropic
//! law, with [`Law::slot_response`] returning the volumetric form for all of
//! them.

use arrayvec::ArrayVec;

use crate::dim::{Dim, Lattice, Matrix};
use crate::error::{Error, Result};
use crate::kinematics::{right_cauchy_green, slot_gradient, slot_jacobian, CellJet};

/// St. Venant-Kirchhoff parameters with plane Lamé coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StVKParams {
    pub density: f64,
    pub young: f64,
    pub poisson: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl StVKParams {
    /// Derives `λ, μ` from `ν = λ/(λ+2μ)` and `E = 4μ(λ+μ)/(λ+2μ)`.
    pub fn new(density: f64, young: f64, poisson: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::invalid("density", "must be positive"));
        }
        if !(young > 0.0) {
            return Err(Error::invalid("young", "must be positive"));
        }
        if !(poisson > 0.0 && poisson < 0.5) {
            return Err(Error::invalid("poisson", "must lie in (0, 0.5)"));
        }
        let mu = young / (2.0 * (1.0 + poisson));
        let lambda = 2.0 * mu * poisson / (1.0 - poisson);
        Ok(StVKParams { density, young, poisson, lambda, mu })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MooneyRivlinParams {
    pub density: f64,
    pub c1: f64,
    pub c2: f64,
    /// Multiplies both energy and stress; 1 keeps the constants as given.
    pub stiffness_scale: f64,
}

impl MooneyRivlinParams {
    pub fn new(density: f64, c1: f64, c2: f64, stiffness_scale: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::invalid("density", "must be positive"));
        }
        if !(c1 > 0.0) || !(c2 > 0.0) {
            return Err(Error::invalid("c1/c2", "Mooney-Rivlin constants must be positive"));
        }
        if !(stiffness_scale > 0.0) {
            return Err(Error::invalid("stiffness_scale", "must be positive"));
        }
        Ok(MooneyRivlinParams { density, c1, c2, stiffness_scale })
    }
}

/// Tait barotropic law with `A = Ã ρ₀^{−γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaitParams {
    pub density: f64,
    pub gamma: f64,
    pub a_tilde: f64,
    pub b: f64,
}

impl TaitParams {
    pub fn new(density: f64, gamma: f64, a_tilde: f64, b: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::invalid("density", "must be positive"));
        }
        if !(gamma > 1.0) {
            return Err(Error::invalid("gamma", "must exceed 1"));
        }
        if !(a_tilde > 0.0) {
            return Err(Error::invalid("a_tilde", "must be positive"));
        }
        if !(b >= 0.0) {
            return Err(Error::invalid("b", "must be nonnegative"));
        }
        Ok(TaitParams { density, gamma, a_tilde, b })
    }

    pub fn a(&self) -> f64 {
        self.a_tilde * self.density.powf(-self.gamma)
    }

    /// Jacobian at which `P_W` vanishes.
    pub fn zero_pressure_jacobian(&self) -> f64 {
        (self.a_tilde / self.b).powf(1.0 / self.gamma)
    }
}

/// `E = ½(C − I)`.
pub fn green_strain<const D: usize>(c: &Matrix<D>) -> Matrix<D> {
    (c - Matrix::<D>::identity()) * 0.5
}

/// `ρ₀W = ½(λ Tr(E)² + 2μ Tr(E²))`, the energy whose `C`-derivative is
/// [`stvk_stress`].
pub fn stvk_energy_density<const D: usize>(c: &Matrix<D>, p: &StVKParams) -> f64 {
    let e = green_strain(c);
    let tr = e.trace();
    0.5 * (p.lambda * tr * tr + 2.0 * p.mu * (e * e).trace())
}

/// The same energy written as `½ 𝖤ᵀ𝖢𝖤` with `𝖤 = (E₁₁, E₂₂, 2E₁₂)`.
pub fn stvk_energy_density_vectorial(c: &Matrix<2>, p: &StVKParams) -> f64 {
    let e = green_strain(c);
    let v = nalgebra::Vector3::new(e[(0, 0)], e[(1, 1)], 2.0 * e[(0, 1)]);
    let (l, m) = (p.lambda, p.mu);
    let stiff = nalgebra::Matrix3::new(l + 2.0 * m, l, 0.0, l, l + 2.0 * m, 0.0, 0.0, 0.0, m);
    0.5 * v.dot(&(stiff * v))
}

/// `S = λ Tr(E) I + 2μ E`.
pub fn stvk_stress<const D: usize>(c: &Matrix<D>, p: &StVKParams) -> Matrix<D> {
    let e = green_strain(c);
    Matrix::<D>::identity() * (p.lambda * e.trace()) + e * (2.0 * p.mu)
}

/// `W = C₁(I₁ − 3) + C₂(I₂ − 3)` per unit mass.
pub fn mooney_rivlin_energy(i1: f64, i2: f64, p: &MooneyRivlinParams) -> f64 {
    p.stiffness_scale * (p.c1 * (i1 - 3.0) + p.c2 * (i2 - 3.0))
}

/// `S = 2ρ₀(C₁ I + C₂ I₂ C⁻¹ − C₂ I₃ C⁻²)`.
pub fn mooney_rivlin_stress<const D: usize>(c: &Matrix<D>, p: &MooneyRivlinParams) -> Result<Matrix<D>>
where
    Dim<D>: Lattice<D>,
{
    let inv = <Dim<D> as Lattice<D>>::inverse(c).ok_or(Error::Singular)?;
    let i1 = c.trace();
    let i2 = 0.5 * (i1 * i1 - (c * c).trace());
    let i3 = <Dim<D> as Lattice<D>>::jacobian(c);
    let s = Matrix::<D>::identity() * p.c1 + inv * (p.c2 * i2) - (inv * inv) * (p.c2 * i3);
    Ok(s * (2.0 * p.density * p.stiffness_scale))
}

fn inverted(j: f64) -> Error {
    Error::InvertedCell { body: String::new(), cell: None, slot: 0, step: None, jacobian: j }
}

/// `W^f = A/(γ−1) (J/ρ₀)^{1−γ} + B J/ρ₀` per unit mass.
pub fn tait_energy(j: f64, p: &TaitParams) -> Result<f64> {
    if !(j > 0.0) {
        return Err(inverted(j));
    }
    let x = j / p.density;
    Ok(p.a() / (p.gamma - 1.0) * x.powf(1.0 - p.gamma) + p.b * x)
}

/// `P_W = −ρ₀ ∂W^f/∂J = Ã J^{−γ} − B`.
pub fn tait_pressure(j: f64, p: &TaitParams) -> f64 {
    p.a_tilde * j.powf(-p.gamma) - p.b
}

/// `S = −P_W J C⁻¹`.
pub fn tait_stress<const D: usize>(j: f64, c: &Matrix<D>, p: &TaitParams) -> Result<Matrix<D>>
where
    Dim<D>: Lattice<D>,
{
    if !(j > 0.0) {
        return Err(inverted(j));
    }
    let inv = <Dim<D> as Lattice<D>>::inverse(c).ok_or(Error::Singular)?;
    Ok(inv * (-tait_pressure(j, p) * j))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Law {
    StVenantKirchhoff(StVKParams),
    MooneyRivlin(MooneyRivlinParams),
    Tait(TaitParams),
}

impl Law {
    pub fn density(&self) -> f64 {
        match self {
            Law::StVenantKirchhoff(p) => p.density,
            Law::MooneyRivlin(p) => p.density,
            Law::Tait(p) => p.density,
        }
    }

    pub fn is_fluid(&self) -> bool {
        matches!(self, Law::Tait(_))
    }

    /// Pointwise energy per unit mass on one slot.
    pub fn energy<const D: usize>(&self, c: &Matrix<D>, j: f64) -> Result<f64>
    where
        Dim<D>: Lattice<D>,
    {
        match self {
            Law::StVenantKirchhoff(p) => Ok(stvk_energy_density(c, p) / p.density),
            Law::MooneyRivlin(p) => {
                let i1 = c.trace();
                let i2 = 0.5 * (i1 * i1 - (c * c).trace());
                Ok(mooney_rivlin_energy(i1, i2, p))
            }
            Law::Tait(p) => tait_energy(j, p),
        }
    }

    /// Second Piola-Kirchhoff stress on one slot.
    pub fn stress<const D: usize>(&self, c: &Matrix<D>, j: f64) -> Result<Matrix<D>>
    where
        Dim<D>: Lattice<D>,
    {
        match self {
            Law::StVenantKirchhoff(p) => Ok(stvk_stress(c, p)),
            Law::MooneyRivlin(p) => mooney_rivlin_stress(c, p),
            Law::Tait(p) => tait_stress(j, c, p),
        }
    }

    /// Volumetric energy `ρ₀W` and first Piola-Kirchhoff stress `P = F S`
    /// for one slot's deformation gradient.
    pub fn slot_response<const D: usize>(&self, f: &Matrix<D>, slot: usize) -> Result<(f64, Matrix<D>)>
    where
        Dim<D>: Lattice<D>,
    {
        let j = slot_jacobian(f, slot)?;
        let c = right_cauchy_green(f);
        let w = self.energy(&c, j).map_err(|e| with_slot(e, slot))?;
        let s = self.stress(&c, j).map_err(|e| with_slot(e, slot))?;
        Ok((self.density() * w, f * s))
    }
}

fn with_slot(e: Error, slot: usize) -> Error {
    match e {
        Error::InvertedCell { jacobian, .. } => {
            Error::InvertedCell { body: String::new(), cell: None, slot, step: None, jacobian }
        }
        other => other,
    }
}

/// A body's constitutive law together with its incompressibility penalty `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub law: Law,
    pub penalty: f64,
}

impl Material {
    pub fn new(law: Law, penalty: f64) -> Result<Self> {
        if !(penalty >= 0.0 && penalty.is_finite()) {
            return Err(Error::invalid("penalty", "must be nonnegative"));
        }
        Ok(Material { law, penalty })
    }
}

/// Per-slot energies (per unit mass) of one cell.
pub fn slot_energies<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D], law: &Law) -> Result<ArrayVec<f64, 8>>
where
    Dim<D>: Lattice<D>,
{
    (0..<Dim<D> as Lattice<D>>::CORNERS)
        .map(|s| {
            let f = slot_gradient(jet, spacing, s);
            let j = slot_jacobian(&f, s)?;
            law.energy(&right_cauchy_green(&f), j).map_err(|e| with_slot(e, s))
        })
        .collect()
}

/// Average of the pointwise energy over the cell's slots, per unit mass.
pub fn cell_stored_energy<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D], law: &Law) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    let e = slot_energies(jet, spacing, law)?;
    Ok(e.iter().sum::<f64>() / e.len() as f64)
}

/// Average of `(r/2)(J − 1)²` over the cell's slots.
pub fn cell_penalty_energy<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D], r: f64) -> Result<f64>
where
    Dim<D>: Lattice<D>,
{
    let n = <Dim<D> as Lattice<D>>::CORNERS;
    let mut sum = 0.0;
    for s in 0..n {
        let j = slot_jacobian(&slot_gradient(jet, spacing, s), s)?;
        sum += 0.5 * r * (j - 1.0) * (j - 1.0);
    }
    Ok(sum / n as f64)
}
