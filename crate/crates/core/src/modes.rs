//! Temporal-mode analysis: FWHM, signal/idler overlap and the Hermite-Gauss
//! overlap model.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decomposition::SchmidtDecomposition;
use crate::dispersion::omega_to_lambda_um;
use crate::error::{Error, Result};
use crate::numeric::integrate;

/// A sampled real mode function on a monotone axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub axis: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub order: usize,
}

impl ModeProfile {
    pub fn new(axis: Vec<f64>, amplitude: Vec<f64>, order: usize) -> Result<Self> {
        if axis.len() != amplitude.len() || axis.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "mode profile needs matching axis/amplitude of length >= 2 (got {} and {})",
                axis.len(),
                amplitude.len()
            )));
        }
        Ok(Self {
            axis,
            amplitude,
            order,
        })
    }

    /// Signal mode `h_k` of a decomposition on its frequency axis (rad/s).
    pub fn signal(d: &SchmidtDecomposition, k: usize) -> Result<Self> {
        Self::from_decomposition(d, k, &d.signal_modes)
    }

    /// Idler mode `g_k` of a decomposition on its frequency axis (rad/s).
    pub fn idler(d: &SchmidtDecomposition, k: usize) -> Result<Self> {
        Self::from_decomposition(d, k, &d.idler_modes)
    }

    fn from_decomposition(d: &SchmidtDecomposition, k: usize, modes: &[Vec<f64>]) -> Result<Self> {
        let axis = d
            .axis
            .clone()
            .ok_or_else(|| Error::InvalidInput("decomposition has no frequency axis".into()))?;
        let amp = modes.get(k).ok_or_else(|| {
            Error::InvalidInput(format!("mode {k} not retained ({} available)", modes.len()))
        })?;
        Self::new(axis, amp.clone(), k)
    }

    /// Same amplitudes on a wavelength axis in nm (`lambda = 2 pi c / omega`).
    pub fn to_wavelength_nm(&self) -> Self {
        Self {
            axis: self.axis.iter().map(|&w| omega_to_lambda_um(w) * 1e3).collect(),
            amplitude: self.amplitude.clone(),
            order: self.order,
        }
    }

    /// `integral |a|^2` by the trapezoidal rule.
    pub fn norm_squared(&self) -> f64 {
        let w = trapezoid_weights(&self.axis);
        w.iter().zip(&self.amplitude).map(|(w, a)| w * (a * a)).sum()
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    (0..n)
        .map(|i| {
            let lo = axis[i.saturating_sub(1)];
            let hi = axis[(i + 1).min(n - 1)];
            0.5 * (hi - lo).abs()
        })
        .collect()
}

/// Full width at half maximum of `|amplitude|`, with linear interpolation on
/// both flanks. Width is in axis units.
pub fn fwhm(mode: &ModeProfile) -> Result<f64> {
    let a: Vec<f64> = mode.amplitude.iter().map(|x| x.abs()).collect();
    let peak = a.iter().cloned().fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let half = 0.5 * peak;
    let mut regions = 0;
    let mut first = None;
    let mut last = 0;
    for i in 0..a.len() {
        if a[i] >= half {
            if i == 0 || a[i - 1] < half {
                regions += 1;
            }
            first.get_or_insert(i);
            last = i;
        }
    }
    if regions != 1 {
        return Err(Error::NotUnimodal { regions });
    }
    let first = first.expect("peak is above half maximum");
    let x = &mode.axis;
    let cross = |i_out: usize, i_in: usize| {
        let t = (half - a[i_out]) / (a[i_in] - a[i_out]);
        x[i_out] + t * (x[i_in] - x[i_out])
    };
    let left = if first == 0 { x[0] } else { cross(first - 1, first) };
    let right = if last == a.len() - 1 {
        x[last]
    } else {
        cross(last + 1, last)
    };
    Ok((right - left).abs())
}

/// FWHM in nm of a mode sampled on a frequency axis (rad/s).
pub fn fwhm_nm(mode: &ModeProfile) -> Result<f64> {
    fwhm(&mode.to_wavelength_nm())
}

/// `|integral a b| / sqrt(integral a^2 integral b^2)` on a common axis.
pub fn overlap(a: &ModeProfile, b: &ModeProfile) -> Result<f64> {
    if a.axis != b.axis {
        return Err(Error::InvalidInput("overlap needs profiles on a common axis".into()));
    }
    let w = trapezoid_weights(&a.axis);
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for ((w, x), y) in w.iter().zip(&a.amplitude).zip(&b.amplitude) {
        ab += w * (x * y);
        aa += w * (x * x);
        bb += w * (y * y);
    }
    if aa == 0.0 || bb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(ab.abs() / (aa * bb).sqrt())
}

/// Hermite-Gauss mode parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HGParams {
    pub order: usize,
    pub width: f64,
    pub center: f64,
}

/// Hermite polynomial scaled to `H_n(u) / sqrt(2^n n! sqrt(pi))`, by the
/// three-term recurrence in normalised form.
pub fn hermite_normalized(n: usize, u: f64) -> f64 {
    let mut p0 = PI.powf(-0.25);
    if n == 0 {
        return p0;
    }
    let mut p1 = 2f64.sqrt() * u * p0;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (2.0 / kf).sqrt() * u * p1 - ((kf - 1.0) / kf).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Normalised Hermite function `psi_n(u) = H_n(u) e^{-u^2/2} / sqrt(2^n n! sqrt(pi))`.
pub fn hermite_function(n: usize, u: f64) -> f64 {
    hermite_normalized(n, u) * (-0.5 * u * u).exp()
}

fn hg_value(p: &HGParams, x: f64) -> f64 {
    hermite_function(p.order, (x - p.center) / p.width) / p.width.sqrt()
}

/// Half-width of the axis needed around the centre for an order-`n` mode.
fn hg_support(order: usize, width: f64) -> f64 {
    ((2.0 * order as f64 + 1.0).sqrt() + 4.0) * width
}

/// Samples `HG_n(x) = H_n((x-x0)/w) exp(-(x-x0)^2/2w^2) / sqrt(n! sqrt(pi) 2^n w)`.
pub fn hg_profile(p: &HGParams, axis: &[f64]) -> Result<ModeProfile> {
    if !(p.width > 0.0) {
        return Err(Error::InvalidInput(format!("HG width must be positive, got {}", p.width)));
    }
    let lo = axis.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = axis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let reach = hg_support(p.order, p.width);
    let (need_lo, need_hi) = (p.center - reach, p.center + reach);
    if lo > need_lo || hi < need_hi {
        return Err(Error::AxisTooNarrow {
            lo,
            hi,
            need_lo,
            need_hi,
        });
    }
    let amplitude = axis.iter().map(|&x| hg_value(p, x)).collect();
    ModeProfile::new(axis.to_vec(), amplitude, p.order)
}

/// Overlap of two order-`n` Hermite-Gauss modes of widths `w`, `w2` sharing
/// the centre `x0`, as the ratio of three Gaussian-weighted Hermite integrals
/// `L(a, b) = integral H^2 e^{-a x^2 + b x}` with
///
/// ```text
/// a1 = (1/w^2 + 1/w2^2)/2   b1 = x0 (1/w^2 + 1/w2^2)
/// a2 = 1/w^2                b2 = 2 x0 / w^2
/// a3 = 1/w2^2               b3 = 2 x0 / w2^2
/// ```
///
/// The Hermite polynomials take their natural scaled arguments
/// `(x - x0)/w`, `(x - x0)/w2`. Integrals are evaluated by adaptive
/// Gauss-Kronrod quadrature in the shifted variable `u = x - x0`, where the
/// `e^{b x}` factors reduce to constants that cancel in the ratio.
pub fn hg_overlap_model(n: usize, w: f64, w2: f64, x0: f64) -> f64 {
    let a1 = 0.5 * (1.0 / (w * w) + 1.0 / (w2 * w2));
    let a2 = 1.0 / (w * w);
    let a3 = 1.0 / (w2 * w2);
    let reach = hg_support(n, w.max(w2)) + 6.0 * w.max(w2);
    let panels = 8 * (n + 1);
    let h = 2.0 * reach / panels as f64;
    let l = |a: f64, p: &dyn Fn(f64) -> f64| -> f64 {
        (0..panels)
            .map(|k| {
                let lo = x0 - reach + k as f64 * h;
                integrate(
                    |x| {
                        let u = x - x0;
                        p(u) * (-a * u * u).exp()
                    },
                    lo,
                    lo + h,
                    1e-16,
                    1e-13,
                )
            })
            .sum()
    };
    let l1 = l(a1, &|u| hermite_normalized(n, u / w) * hermite_normalized(n, u / w2));
    let l2 = l(a2, &|u| hermite_normalized(n, u / w).powi(2));
    let l3 = l(a3, &|u| hermite_normalized(n, u / w2).powi(2));
    l1.abs() / (l2 * l3).sqrt()
}
