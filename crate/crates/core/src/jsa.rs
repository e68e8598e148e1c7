//! Pump envelope, phasematching function and the joint spectral amplitude
//! on a square signal x idler frequency grid centred at degeneracy.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{lambda_um_to_omega, omega_to_lambda_um};
use crate::error::{Error, Result};
use crate::numeric::{fmt_sci, sinc};
use crate::phasematching::{combine_mismatch, mismatch, taylor_coefficients, ProcessSpec};
use crate::SPEED_OF_LIGHT_UM_PER_S as C;

/// Smallest accepted number of points per grid axis.
pub const MIN_GRID_POINTS: usize = 64;
/// Default number of points per grid axis.
pub const DEFAULT_GRID_POINTS: usize = 401;
/// Boundary amplitude (relative to the peak) above which the grid is flagged as too small.
pub const BOUNDARY_WARNING_LEVEL: f64 = 1e-3;

/// Uniform frequency axis shared by signal and idler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    /// rad/s
    pub center: f64,
    /// Half-width of each axis, rad/s.
    pub half_span: f64,
    pub axis: Vec<f64>,
    pub d_omega: f64,
}

impl FrequencyGrid {
    /// `n_points` samples on `center +- half_span`; the centre is always an
    /// exact sample, so `n_points` must be odd.
    pub fn new(center: f64, half_span: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_GRID_POINTS {
            return Err(Error::GridTooCoarse {
                n_points,
                min: MIN_GRID_POINTS,
            });
        }
        if n_points % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "grid point count must be odd, got {n_points}"
            )));
        }
        if !(half_span > 0.0 && half_span < center) {
            return Err(Error::InvalidInput(format!(
                "grid half-span {half_span:e} rad/s must be positive and below the centre frequency"
            )));
        }
        let half = (n_points / 2) as f64;
        let d_omega = half_span / half;
        let axis = (0..n_points)
            .map(|k| center + (k as f64 - half) * d_omega)
            .collect();
        Ok(Self {
            center,
            half_span,
            axis,
            d_omega,
        })
    }

    /// Builds a grid from an explicit (uniform, ascending or descending) axis.
    pub fn from_axis(axis: Vec<f64>) -> Result<Self> {
        let n = axis.len();
        if n < 2 {
            return Err(Error::InvalidInput("grid axis needs at least two samples".into()));
        }
        let d_omega = ((axis[n - 1] - axis[0]) / (n - 1) as f64).abs();
        Ok(Self {
            center: axis[n / 2],
            half_span: 0.5 * (axis[n - 1] - axis[0]).abs(),
            axis,
            d_omega,
        })
    }

    /// Default grid for a process: `max(6 w_p, 1.5 * first phasematching zero)`.
    pub fn auto(spec: &ProcessSpec, pump: &PumpSpec, n_points: usize) -> Result<Self> {
        let span = (6.0 * pump.width_omega()).max(1.5 * first_zero_offset(spec)?);
        Self::new(spec.center_omega(), span, n_points)
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Axis in wavelength, nm.
    pub fn wavelengths_nm(&self) -> Vec<f64> {
        self.axis.iter().map(|&w| omega_to_lambda_um(w) * 1e3).collect()
    }
}

/// Per-axis offset (rad/s) of the first zero of the linearised phasematching
/// function along the steeper diagonal: `2 pi / (L (|gamma_s| + |gamma_i|))`.
pub fn first_zero_offset(spec: &ProcessSpec) -> Result<f64> {
    let c = taylor_coefficients(spec)?;
    Ok(2.0 * PI / (spec.geometry.length_um() * (c.gamma_s.abs() + c.gamma_i.abs())))
}

/// Gaussian pump; the width is given as a wavelength bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub wavelength_um: f64,
    /// Amplitude width parameter `w_p` expressed in nm of pump wavelength.
    pub width_nm: f64,
}

impl PumpSpec {
    pub fn new(wavelength_um: f64, width_nm: f64) -> Self {
        Self {
            wavelength_um,
            width_nm,
        }
    }

    pub fn center_omega(&self) -> f64 {
        lambda_um_to_omega(self.wavelength_um)
    }

    /// `w_p` in rad/s: `2 pi c * dlambda / lambda^2`.
    pub fn width_omega(&self) -> f64 {
        2.0 * PI * C * self.width_nm * 1e-3 / (self.wavelength_um * self.wavelength_um)
    }
}

/// `alpha_p(omega_s + omega_i)`, square-normalised over the real line.
pub fn pump_envelope(pump: &PumpSpec, omega_sum: f64) -> f64 {
    let wp = pump.width_omega();
    let x = pump.center_omega() - omega_sum;
    (-(x * x) / (2.0 * wp * wp)).exp() / (PI.sqrt() * wp).sqrt()
}

/// `sinc(L dk / 2)`.
pub fn pm_function(spec: &ProcessSpec, omega_s: f64, omega_i: f64) -> Result<f64> {
    let dk = mismatch(spec, omega_s, omega_i)?;
    Ok(sinc(0.5 * spec.geometry.length_um() * dk))
}

/// Real JSA sampled on a square grid; `values[s * n + i]` holds
/// `J(omega_s = axis[s], omega_i = axis[i])`.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub pump: Option<PumpSpec>,
    pub spec: Option<ProcessSpec>,
    /// Set when the amplitude on the grid boundary exceeds 1e-3 of the peak.
    pub boundary_warning: bool,
}

impl JointSpectralAmplitude {
    /// Wraps an existing matrix (row-major, signal rows).
    pub fn from_values(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "JSA needs {} values for a {n}-point grid, got {}",
                n * n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("JSA contains non-finite values".into()));
        }
        let boundary_warning = boundary_exceeds(&values, n);
        Ok(Self {
            grid,
            values,
            pump: None,
            spec: None,
            boundary_warning,
        })
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn at(&self, s: usize, i: usize) -> f64 {
        self.values[s * self.n() + i]
    }

    /// `||J - J^T||_F / ||J||_F`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n();
        let mut diff = 0.0;
        let mut norm = 0.0;
        for s in 0..n {
            for i in 0..n {
                let a = self.at(s, i);
                let d = a - self.at(i, s);
                diff += d * d;
                norm += a * a;
            }
        }
        (diff / norm).sqrt()
    }

    /// Orientation (degrees, in `(-90, 90]`) of the principal axis of `|J|^2`
    /// in the `(omega_s, omega_i)` plane, from its second moments.
    pub fn principal_axis_deg(&self) -> f64 {
        let n = self.n();
        let (mut m0, mut ms, mut mi) = (0.0, 0.0, 0.0);
        for s in 0..n {
            for i in 0..n {
                let w = self.at(s, i).powi(2);
                m0 += w;
                ms += w * s as f64;
                mi += w * i as f64;
            }
        }
        let (cs, ci) = (ms / m0, mi / m0);
        let (mut sss, mut sii, mut ssi) = (0.0, 0.0, 0.0);
        for s in 0..n {
            for i in 0..n {
                let w = self.at(s, i).powi(2);
                let (x, y) = (s as f64 - cs, i as f64 - ci);
                sss += w * x * x;
                sii += w * y * y;
                ssi += w * x * y;
            }
        }
        let theta = 0.5 * (2.0 * ssi).atan2(sss - sii);
        theta.to_degrees()
    }

    /// Dense CSV: first row holds idler wavelengths (nm), first column signal
    /// wavelengths (nm).
    pub fn to_csv(&self) -> String {
        let lambdas = self.grid.wavelengths_nm();
        let n = self.n();
        let mut out = String::with_capacity(16 * (n + 1) * (n + 1));
        out.push_str("lambda_s_nm\\lambda_i_nm");
        for l in &lambdas {
            out.push(',');
            out.push_str(&fmt_sci(*l));
        }
        out.push('\n');
        for (s, ls) in lambdas.iter().enumerate() {
            out.push_str(&fmt_sci(*ls));
            for i in 0..n {
                out.push(',');
                out.push_str(&fmt_sci(self.at(s, i)));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the dense CSV written by [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidInput(format!("JSA CSV: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let idler: Vec<f64> = header
            .split(',')
            .skip(1)
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad(format!("bad header value '{v}'"))))
            .collect::<Result<_>>()?;
        let n = idler.len();
        let mut signal = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * n);
        for (row, line) in lines.enumerate() {
            let mut cells = line.split(',');
            let ls = cells.next().unwrap_or("");
            signal.push(ls.trim().parse::<f64>().map_err(|_| bad(format!("bad row label '{ls}'")))?);
            let before = values.len();
            for v in cells {
                values.push(v.trim().parse::<f64>().map_err(|_| bad(format!("bad value '{v}'")))?);
            }
            if values.len() - before != n {
                return Err(bad(format!("row {} has {} values, expected {n}", row + 1, values.len() - before)));
            }
        }
        if signal.len() != n {
            return Err(bad(format!("{} rows for {n} columns; JSA must be square", signal.len())));
        }
        let axis: Vec<f64> = signal.iter().map(|&l| lambda_um_to_omega(l * 1e-3)).collect();
        Self::from_values(FrequencyGrid::from_axis(axis)?, values)
    }

    /// Binary layout: `u32 rows`, `u32 cols`, then `rows*cols` f64 values,
    /// row-major, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.n() as u32;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&n.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads the binary layout written by [`JointSpectralAmplitude::write_binary`]:
/// returns `(rows, cols, values)`.
pub fn read_binary_matrix<R: Read>(mut r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let rows = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let cols = u32::from_le_bytes(b4) as usize;
    let mut values = Vec::with_capacity(rows * cols);
    let mut b8 = [0u8; 8];
    for _ in 0..rows * cols {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} trailing bytes after {rows}x{cols} matrix",
            rest.len()
        )));
    }
    Ok((rows, cols, values))
}

fn boundary_exceeds(values: &[f64], n: usize) -> bool {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return false;
    }
    let edge = (0..n)
        .flat_map(|k| [values[k], values[(n - 1) * n + k], values[k * n], values[k * n + n - 1]])
        .fold(0.0f64, |m, v| m.max(v.abs()));
    edge > BOUNDARY_WARNING_LEVEL * peak
}

/// `J(omega_s, omega_i) = alpha_p(omega_s + omega_i) * phi(omega_s, omega_i)`
/// on `grid`. Rows are filled in parallel; every element is computed
/// exactly as [`pump_envelope`] times [`pm_function`].
pub fn build_jsa(spec: &ProcessSpec, pump: &PumpSpec, grid: &FrequencyGrid) -> Result<JointSpectralAmplitude> {
    let n = grid.len();
    if n < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse {
            n_points: n,
            min: MIN_GRID_POINTS,
        });
    }
    if spec.poling.is_none() {
        return Err(Error::InvalidInput(
            "JSA needs a phasematched process (poling period unset)".into(),
        ));
    }
    let half_l = 0.5 * spec.geometry.length_um();
    let grating = spec.grating_wavevector();
    let ks: Vec<f64> = grid.axis.iter().map(|&w| spec.k_signal(w)).collect::<Result<_>>()?;
    let ki: Vec<f64> = grid.axis.iter().map(|&w| spec.k_idler(w)).collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = grid
        .axis
        .par_iter()
        .enumerate()
        .map(|(s, &ws)| {
            grid.axis
                .iter()
                .enumerate()
                .map(|(i, &wi)| {
                    let kp = spec.k_pump(ws + wi)?;
                    let dk = combine_mismatch(kp, ks[s], ki[i], grating);
                    Ok(pump_envelope(pump, ws + wi) * sinc(half_l * dk))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite JSA value".into()));
    }
    let boundary_warning = boundary_exceeds(&values, n);
    Ok(JointSpectralAmplitude {
        grid: grid.clone(),
        values,
        pump: Some(*pump),
        spec: Some(spec.clone()),
        boundary_warning,
    })
}

/// Summary line for logs and CLI output.
pub fn describe(jsa: &JointSpectralAmplitude) -> String {
    let mut s = String::new();
    let l = jsa.grid.wavelengths_nm();
    let _ = write!(
        s,
        "{}x{} JSA, {:.3}-{:.3} nm, d_omega = {:e} rad/s",
        jsa.n(),
        jsa.n(),
        l.iter().cloned().fold(f64::INFINITY, f64::min),
        l.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        jsa.grid.d_omega
    );
    if jsa.boundary_warning {
        s.push_str(" (warning: amplitude on grid boundary)");
    }
    s
}
