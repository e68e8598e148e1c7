//! Refractive indices, wavevectors and their frequency derivatives for a bulk
//! crystal axis with an optional rectangular-waveguide correction.
//!
//! All wavelengths are vacuum wavelengths in micrometres, angular frequencies
//! in rad/s and wavevectors in rad/um. Derivatives are closed-form: the
//! Sellmeier law is differentiated analytically in wavelength and converted
//! to frequency derivatives via
//!
//! ```text
//! dk/domega     = (n - lambda dn/dlambda) / c
//! d2k/domega2   = lambda^3 / (2 pi c^2) * d2n/dlambda2
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{Axis, IndexJet, MaterialModel};
use crate::SPEED_OF_LIGHT_UM_PER_S as C;

/// How the waveguide cross-section modifies the bulk index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexCorrection {
    /// Perfectly conducting walls: `n_eff^2 = n^2 - (lambda (n1+1)/2h)^2 - (lambda (n2+1)/2w)^2`.
    #[default]
    Metallic,
    /// Same geometric terms added directly to the index:
    /// `n_eff = n + (lambda (n1+1)/2h)^2 + (lambda (n2+1)/2w)^2`.
    Additive,
    /// No geometric correction (bulk crystal).
    Bulk,
}

/// Rectangular channel waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideGeometry {
    pub width_um: f64,
    pub height_um: f64,
    #[serde(default)]
    pub mode_n1: u32,
    #[serde(default)]
    pub mode_n2: u32,
    pub length_mm: f64,
    #[serde(default = "default_propagation")]
    pub propagation_axis: Axis,
    #[serde(default = "default_cut")]
    pub cut_axis: Axis,
    #[serde(default)]
    pub correction: IndexCorrection,
}

fn default_propagation() -> Axis {
    Axis::X
}

fn default_cut() -> Axis {
    Axis::Z
}

impl WaveguideGeometry {
    /// Fundamental-mode waveguide, x-propagating in a z-cut crystal.
    pub fn new(width_um: f64, height_um: f64, length_mm: f64) -> Self {
        Self {
            width_um,
            height_um,
            mode_n1: 0,
            mode_n2: 0,
            length_mm,
            propagation_axis: Axis::X,
            cut_axis: Axis::Z,
            correction: IndexCorrection::Metallic,
        }
    }

    pub fn square(side_um: f64, length_mm: f64) -> Self {
        Self::new(side_um, side_um, length_mm)
    }

    pub fn with_correction(mut self, correction: IndexCorrection) -> Self {
        self.correction = correction;
        self
    }

    pub fn length_um(&self) -> f64 {
        self.length_mm * 1e3
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.width_um) || !ok(self.height_um) || !ok(self.length_mm) {
            return Err(Error::InvalidInput(format!(
                "waveguide dimensions must be positive (w = {}, h = {}, L = {})",
                self.width_um, self.height_um, self.length_mm
            )));
        }
        if self.propagation_axis == self.cut_axis {
            return Err(Error::InvalidInput(
                "propagation and cut axes must differ".into(),
            ));
        }
        Ok(())
    }

    /// `((n1+1)/2h)^2 + ((n2+1)/2w)^2`, in 1/um^2.
    fn geometric_factor(&self) -> f64 {
        let a = (self.mode_n1 as f64 + 1.0) / (2.0 * self.height_um);
        let b = (self.mode_n2 as f64 + 1.0) / (2.0 * self.width_um);
        a * a + b * b
    }
}

/// Polarization axes of pump, signal and idler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationTriple {
    pub pump: Axis,
    pub signal: Axis,
    pub idler: Axis,
}

impl PolarizationTriple {
    pub const fn new(pump: Axis, signal: Axis, idler: Axis) -> Self {
        Self {
            pump,
            signal,
            idler,
        }
    }

    /// Type-II process `(y -> z, y)` used for SGVM in x-propagating z-cut KTP.
    pub const fn ktp_type2() -> Self {
        Self::new(Axis::Y, Axis::Z, Axis::Y)
    }

    /// Contracted column index `l` (1-based) for the signal/idler pair.
    pub fn contracted_index(self) -> usize {
        use Axis::*;
        match (self.signal, self.idler) {
            (X, X) => 1,
            (Y, Y) => 2,
            (Z, Z) => 3,
            (Y, Z) | (Z, Y) => 4,
            (X, Z) | (Z, X) => 5,
            (X, Y) | (Y, X) => 6,
        }
    }
}

fn check_range(material: &MaterialModel, lambda_um: f64, temp_c: f64) -> Result<()> {
    let (lmin, lmax) = material.valid_wavelength_um;
    if !(lambda_um >= lmin && lambda_um <= lmax) {
        return Err(Error::OutOfValidityRange {
            material: material.name.clone(),
            quantity: "wavelength_um",
            value: lambda_um,
            min: lmin,
            max: lmax,
        });
    }
    let (tmin, tmax) = material.valid_temperature_c;
    if !(temp_c >= tmin && temp_c <= tmax) {
        return Err(Error::OutOfValidityRange {
            material: material.name.clone(),
            quantity: "temperature_c",
            value: temp_c,
            min: tmin,
            max: tmax,
        });
    }
    Ok(())
}

fn bulk_jet(material: &MaterialModel, axis: Axis, lambda_um: f64, temp_c: f64) -> Result<IndexJet> {
    check_range(material, lambda_um, temp_c)?;
    Ok(material
        .axis(axis)
        .jet(lambda_um, temp_c - material.reference_temperature_c))
}

/// Index of the guided mode and its wavelength derivatives.
pub fn guided_jet(
    material: &MaterialModel,
    axis: Axis,
    lambda_um: f64,
    temp_c: f64,
    geometry: &WaveguideGeometry,
) -> Result<IndexJet> {
    geometry.validate()?;
    let b = bulk_jet(material, axis, lambda_um, temp_c)?;
    let g = geometry.geometric_factor();
    let l = lambda_um;
    match geometry.correction {
        IndexCorrection::Bulk => Ok(b),
        IndexCorrection::Additive => Ok(IndexJet {
            n: b.n + g * l * l,
            dn: b.dn + 2.0 * g * l,
            d2n: b.d2n + 2.0 * g,
        }),
        IndexCorrection::Metallic => {
            let p = b.n * b.n - g * l * l;
            if p <= 1.0 {
                return Err(Error::ModeCutoff {
                    wavelength_um: l,
                    index_squared: p,
                });
            }
            let p1 = 2.0 * b.n * b.dn - 2.0 * g * l;
            let p2 = 2.0 * b.dn * b.dn + 2.0 * b.n * b.d2n - 2.0 * g;
            let n = p.sqrt();
            Ok(IndexJet {
                n,
                dn: p1 / (2.0 * n),
                d2n: p2 / (2.0 * n) - p1 * p1 / (4.0 * p * n),
            })
        }
    }
}

/// Temperature-dependent bulk index along `axis`.
pub fn bulk_index(material: &MaterialModel, axis: Axis, lambda_um: f64, temp_c: f64) -> Result<f64> {
    Ok(bulk_jet(material, axis, lambda_um, temp_c)?.n)
}

/// Effective index of the guided mode.
pub fn guided_index(
    material: &MaterialModel,
    axis: Axis,
    lambda_um: f64,
    temp_c: f64,
    geometry: &WaveguideGeometry,
) -> Result<f64> {
    Ok(guided_jet(material, axis, lambda_um, temp_c, geometry)?.n)
}

/// Propagation constant `k = 2 pi n / lambda`, rad/um.
pub fn wavevector(
    material: &MaterialModel,
    axis: Axis,
    lambda_um: f64,
    temp_c: f64,
    geometry: &WaveguideGeometry,
) -> Result<f64> {
    let n = guided_index(material, axis, lambda_um, temp_c, geometry)?;
    Ok(2.0 * PI * n / lambda_um)
}

/// dk/domega, s/um.
pub fn inverse_group_velocity(
    material: &MaterialModel,
    axis: Axis,
    lambda_um: f64,
    temp_c: f64,
    geometry: &WaveguideGeometry,
) -> Result<f64> {
    let j = guided_jet(material, axis, lambda_um, temp_c, geometry)?;
    Ok((j.n - lambda_um * j.dn) / C)
}

/// d^2k/domega^2, s^2/um.
pub fn group_velocity_dispersion(
    material: &MaterialModel,
    axis: Axis,
    lambda_um: f64,
    temp_c: f64,
    geometry: &WaveguideGeometry,
) -> Result<f64> {
    let j = guided_jet(material, axis, lambda_um, temp_c, geometry)?;
    Ok(lambda_um.powi(3) * j.d2n / (2.0 * PI * C * C))
}

/// Converts an angular frequency (rad/s) to a vacuum wavelength (um).
pub fn omega_to_lambda_um(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

/// Converts a vacuum wavelength (um) to an angular frequency (rad/s).
pub fn lambda_um_to_omega(lambda_um: f64) -> f64 {
    2.0 * PI * C / lambda_um
}

/// Nonlinear coefficient `d_il` coupling the given polarizations, in pm/V,
/// and whether the process is allowed (non-zero entry).
pub fn effective_nonlinearity(material: &MaterialModel, pol: PolarizationTriple) -> (f64, bool) {
    let d = material.d_matrix[pol.pump.index()][pol.contracted_index() - 1];
    (d, d != 0.0)
}
