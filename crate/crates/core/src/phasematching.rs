//! Collinear wavevector mismatch with first-order quasi-phasematching, its
//! Taylor coefficients around degeneracy, the SGVM wavelength search and the
//! higher-order mismatch residual.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    group_velocity_dispersion, inverse_group_velocity, lambda_um_to_omega, omega_to_lambda_um,
    wavevector, PolarizationTriple, WaveguideGeometry,
};
use crate::error::{Error, Result};
use crate::material::{Axis, MaterialModel};
use crate::numeric::{bracketed_root, fmt_sci};

/// Bare mismatch below which no poling is needed, rad/um.
pub const DEGENERATE_POLING_THRESHOLD: f64 = 1e-12;

/// Default SGVM search bracket (degenerate signal/idler wavelength), um.
pub const DEFAULT_SGVM_BRACKET_UM: (f64, f64) = (1.2, 1.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PdcType {
    Type0,
    TypeI,
    TypeII,
}

impl PdcType {
    pub fn of(pol: PolarizationTriple) -> Self {
        if pol.signal != pol.idler {
            PdcType::TypeII
        } else if pol.signal == pol.pump {
            PdcType::Type0
        } else {
            PdcType::TypeI
        }
    }
}

/// First-order poling grating. The mismatch gains `-sign * 2 pi / period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Poling {
    pub period_um: f64,
    /// +1 or -1: which Fourier component of the grating cancels the mismatch.
    pub sign: f64,
}

impl Poling {
    pub fn grating_wavevector(&self) -> f64 {
        self.sign * 2.0 * PI / self.period_um
    }
}

/// A degenerate PDC configuration: `omega_s0 = omega_i0 = omega_p0 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub material: Arc<MaterialModel>,
    pub geometry: WaveguideGeometry,
    pub temperature_c: f64,
    pub polarization: PolarizationTriple,
    pub pump_wavelength_um: f64,
    pub poling: Option<Poling>,
}

impl ProcessSpec {
    pub fn new(
        material: Arc<MaterialModel>,
        geometry: WaveguideGeometry,
        temperature_c: f64,
        polarization: PolarizationTriple,
        pump_wavelength_um: f64,
    ) -> Self {
        Self {
            material,
            geometry,
            temperature_c,
            polarization,
            pump_wavelength_um,
            poling: None,
        }
    }

    pub fn pdc_type(&self) -> PdcType {
        PdcType::of(self.polarization)
    }

    pub fn pump_omega(&self) -> f64 {
        lambda_um_to_omega(self.pump_wavelength_um)
    }

    /// Degenerate signal/idler angular frequency.
    pub fn center_omega(&self) -> f64 {
        0.5 * self.pump_omega()
    }

    pub fn center_wavelength_um(&self) -> f64 {
        2.0 * self.pump_wavelength_um
    }

    fn k(&self, axis: Axis, omega: f64) -> Result<f64> {
        wavevector(
            &self.material,
            axis,
            omega_to_lambda_um(omega),
            self.temperature_c,
            &self.geometry,
        )
    }

    pub fn k_pump(&self, omega: f64) -> Result<f64> {
        self.k(self.polarization.pump, omega)
    }

    pub fn k_signal(&self, omega: f64) -> Result<f64> {
        self.k(self.polarization.signal, omega)
    }

    pub fn k_idler(&self, omega: f64) -> Result<f64> {
        self.k(self.polarization.idler, omega)
    }

    pub fn grating_wavevector(&self) -> f64 {
        self.poling.map_or(0.0, |p| p.grating_wavevector())
    }

    /// Returns a copy with the poling period chosen to phasematch the
    /// central frequencies.
    pub fn phasematched(mut self) -> Result<Self> {
        let bare = self.bare_center_mismatch()?;
        if bare.abs() < DEGENERATE_POLING_THRESHOLD {
            return Err(Error::DegeneratePoling { mismatch: bare });
        }
        self.poling = Some(Poling {
            period_um: 2.0 * PI / bare.abs(),
            sign: bare.signum(),
        });
        Ok(self)
    }

    fn bare_center_mismatch(&self) -> Result<f64> {
        let wp = self.pump_omega();
        let w0 = self.center_omega();
        Ok(self.k_pump(wp)? - self.k_signal(w0)? - self.k_idler(w0)?)
    }
}

/// `kp - ks - ki - K_grating`, shared by every caller so cached and direct
/// evaluation agree bit for bit.
#[inline]
pub(crate) fn combine_mismatch(kp: f64, ks: f64, ki: f64, grating: f64) -> f64 {
    kp - ks - ki - grating
}

/// Collinear wavevector mismatch, rad/um.
pub fn mismatch(spec: &ProcessSpec, omega_s: f64, omega_i: f64) -> Result<f64> {
    let kp = spec.k_pump(omega_s + omega_i)?;
    let ks = spec.k_signal(omega_s)?;
    let ki = spec.k_idler(omega_i)?;
    Ok(combine_mismatch(kp, ks, ki, spec.grating_wavevector()))
}

/// Poling period (um) that cancels the mismatch at the central frequencies.
/// Any poling already present on `spec` is ignored.
pub fn poling_period(spec: &ProcessSpec) -> Result<f64> {
    let bare = spec.bare_center_mismatch()?;
    if bare.abs() < DEGENERATE_POLING_THRESHOLD {
        return Err(Error::DegeneratePoling { mismatch: bare });
    }
    Ok(2.0 * PI / bare.abs())
}

/// Linear and quadratic Taylor coefficients of the mismatch around
/// `(omega_p0/2, omega_p0/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    /// s/um
    pub gamma_s: f64,
    pub gamma_i: f64,
    /// s^2/um
    pub delta_s: f64,
    pub delta_i: f64,
    pub delta_p: f64,
    /// rad/s
    pub expansion_point: f64,
}

pub fn taylor_coefficients(spec: &ProcessSpec) -> Result<TaylorCoefficients> {
    let m = &spec.material;
    let g = &spec.geometry;
    let t = spec.temperature_c;
    let lp = spec.pump_wavelength_um;
    let l0 = spec.center_wavelength_um();
    let pol = spec.polarization;

    let kp1 = inverse_group_velocity(m, pol.pump, lp, t, g)?;
    let kp2 = group_velocity_dispersion(m, pol.pump, lp, t, g)?;
    let ks1 = inverse_group_velocity(m, pol.signal, l0, t, g)?;
    let ks2 = group_velocity_dispersion(m, pol.signal, l0, t, g)?;
    let ki1 = inverse_group_velocity(m, pol.idler, l0, t, g)?;
    let ki2 = group_velocity_dispersion(m, pol.idler, l0, t, g)?;
    Ok(TaylorCoefficients {
        gamma_s: kp1 - ks1,
        gamma_i: kp1 - ki1,
        delta_s: kp2 - ks2,
        delta_i: kp2 - ki2,
        delta_p: 2.0 * kp2,
        expansion_point: spec.pump_omega(),
    })
}

/// `gamma_s + gamma_i` (s/um) for a degenerate process at signal/idler
/// wavelength `lambda_um`.
pub fn sgvm_residual(
    material: &Arc<MaterialModel>,
    geometry: &WaveguideGeometry,
    temperature_c: f64,
    polarization: PolarizationTriple,
    lambda_um: f64,
) -> Result<f64> {
    let spec = ProcessSpec::new(
        Arc::clone(material),
        geometry.clone(),
        temperature_c,
        polarization,
        0.5 * lambda_um,
    );
    let c = taylor_coefficients(&spec)?;
    Ok(c.gamma_s + c.gamma_i)
}

/// Degenerate signal/idler wavelength (um) at which `gamma_s = -gamma_i`.
///
/// The root is refined until the bracket is narrower than 1e-9 um.
pub fn sgvm_wavelength(
    material: &Arc<MaterialModel>,
    geometry: &WaveguideGeometry,
    temperature_c: f64,
    polarization: PolarizationTriple,
    bracket_um: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = bracket_um;
    let f = |l: f64| sgvm_residual(material, geometry, temperature_c, polarization, l);
    bracketed_root(f, lo, hi, 1e-9, 0.0)?.ok_or(Error::NoSignChange {
        lo_um: lo.min(hi),
        hi_um: lo.max(hi),
    })
}

/// Mismatch, its first-order model and the remainder on a wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchResidual {
    pub lambda_s_um: Vec<f64>,
    pub lambda_i_um: Vec<f64>,
    /// Row-major `[s][i]`, rad/um.
    pub delta_k: Vec<f64>,
    pub first_order: Vec<f64>,
    pub remainder: Vec<f64>,
}

impl MismatchResidual {
    pub fn index(&self, s: usize, i: usize) -> usize {
        s * self.lambda_i_um.len() + i
    }

    /// `max|O| / max|F|` over the grid.
    pub fn max_ratio(&self) -> f64 {
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        max_abs(&self.remainder) / max_abs(&self.first_order)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_s_nm,lambda_i_nm,dk,F,O\n");
        for (s, ls) in self.lambda_s_um.iter().enumerate() {
            for (i, li) in self.lambda_i_um.iter().enumerate() {
                let k = self.index(s, i);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_sci(ls * 1e3),
                    fmt_sci(li * 1e3),
                    fmt_sci(self.delta_k[k]),
                    fmt_sci(self.first_order[k]),
                    fmt_sci(self.remainder[k])
                );
            }
        }
        out
    }
}

/// Tabulates `dk`, `F = gamma_s (ws - w0) + gamma_i (wi - w0)` and `O = dk - F`
/// on an `n x n` grid of wavelengths spanning `center +- half_width_nm`.
pub fn mismatch_residual(spec: &ProcessSpec, half_width_nm: f64, n: usize) -> Result<MismatchResidual> {
    if spec.poling.is_none() {
        return Err(Error::InvalidInput(
            "mismatch residual needs a phasematched process".into(),
        ));
    }
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "residual grid needs an odd point count >= 3, got {n}"
        )));
    }
    let coeffs = taylor_coefficients(spec)?;
    let l0 = spec.center_wavelength_um();
    let w0 = spec.center_omega();
    let half = (n / 2) as isize;
    let axis: Vec<f64> = (0..n as isize)
        .map(|k| {
            if k == half {
                l0
            } else {
                l0 + half_width_nm * 1e-3 * (k - half) as f64 / half as f64
            }
        })
        .collect();
    let omega: Vec<f64> = axis
        .iter()
        .enumerate()
        .map(|(k, &l)| if k as isize == half { w0 } else { lambda_um_to_omega(l) })
        .collect();

    let rows: Vec<Vec<(f64, f64)>> = omega
        .par_iter()
        .map(|&ws| {
            omega
                .iter()
                .map(|&wi| {
                    let dk = mismatch(spec, ws, wi)?;
                    let f = coeffs.gamma_s * (ws - w0) + coeffs.gamma_i * (wi - w0);
                    Ok((dk, f))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut delta_k = Vec::with_capacity(n * n);
    let mut first_order = Vec::with_capacity(n * n);
    let mut remainder = Vec::with_capacity(n * n);
    for (dk, f) in rows.into_iter().flatten() {
        delta_k.push(dk);
        first_order.push(f);
        remainder.push(dk - f);
    }
    Ok(MismatchResidual {
        lambda_s_um: axis.clone(),
        lambda_i_um: axis,
        delta_k,
        first_order,
        remainder,
    })
}
