//! Schmidt decomposition of a sampled JSA by singular value decomposition,
//! Schmidt number, supermodes and per-mode squeezing.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dispersion::omega_to_lambda_um;
use crate::error::{Error, Result};
use crate::jsa::JointSpectralAmplitude;
use crate::numeric::fmt_sci;

/// Modes with `lambda_k >= DEFAULT_TRUNCATION * lambda_1` are retained.
pub const DEFAULT_TRUNCATION: f64 = 0.1;

/// Mode functions stored beyond the retained set, so low-order overlaps stay
/// available when truncation is aggressive.
pub const MIN_STORED_MODES: usize = 8;

const SVD_MAX_ITERATIONS: usize = 10_000;

/// `J(ws, wi) = sum_k lambda_k h_k(ws) g_k(wi)` with `sum lambda_k^2 = 1` and
/// square-normalised mode functions (`d_omega * sum |h_k|^2 = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Every singular value after normalisation, descending.
    pub coefficients: Vec<f64>,
    /// Signal modes `h_k` on the grid axis: the retained modes, padded to at
    /// least `MIN_STORED_MODES` when the kernel has that many.
    pub signal_modes: Vec<Vec<f64>>,
    /// Idler modes `g_k`, stored alongside `signal_modes`.
    pub idler_modes: Vec<Vec<f64>>,
    pub d_omega: f64,
    pub num_retained: usize,
    pub truncation: f64,
    /// Frequency axis (rad/s) shared by signal and idler, when known.
    pub axis: Option<Vec<f64>>,
}

impl SchmidtDecomposition {
    /// `sum_k lambda_k h_k g_k^T d_omega` over the retained modes, row-major;
    /// equals `J / ||J||_F` when nothing is truncated.
    pub fn reconstruct(&self) -> Vec<f64> {
        let rows = self.signal_modes.first().map_or(0, Vec::len);
        let cols = self.idler_modes.first().map_or(0, Vec::len);
        let mut out = vec![0.0; rows * cols];
        for k in 0..self.num_retained {
            let scale = self.coefficients[k] * self.d_omega;
            let h = &self.signal_modes[k];
            let g = &self.idler_modes[k];
            for s in 0..rows {
                let hs = scale * h[s];
                for i in 0..cols {
                    out[s * cols + i] += hs * g[i];
                }
            }
        }
        out
    }

    /// JSON summary: coefficients, K, retained count and squeezing in dB.
    pub fn summary(&self, gain: f64) -> Result<DecompositionSummary> {
        let report = squeezing_report(self, gain)?;
        Ok(DecompositionSummary {
            coefficients: self.coefficients[..self.num_retained].to_vec(),
            all_coefficients: self.coefficients.clone(),
            schmidt_number: schmidt_number(self),
            num_retained: self.num_retained,
            truncation: self.truncation,
            gain,
            squeezing_db: report.squeezing_db[..self.num_retained].to_vec(),
        })
    }

    /// Mode functions against wavelength: `lambda_nm,h_0,g_0,h_1,g_1,...`.
    /// Requires a known frequency axis.
    pub fn modes_csv(&self) -> Result<String> {
        let axis = self
            .axis
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("decomposition has no frequency axis".into()))?;
        let mut out = String::from("lambda_nm");
        for k in 0..self.num_retained {
            let _ = write!(out, ",h_{k},g_{k}");
        }
        out.push('\n');
        for (j, &w) in axis.iter().enumerate() {
            out.push_str(&fmt_sci(omega_to_lambda_um(w) * 1e3));
            for k in 0..self.num_retained {
                out.push(',');
                out.push_str(&fmt_sci(self.signal_modes[k][j]));
                out.push(',');
                out.push_str(&fmt_sci(self.idler_modes[k][j]));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    /// Retained coefficients.
    pub coefficients: Vec<f64>,
    pub all_coefficients: Vec<f64>,
    pub schmidt_number: f64,
    pub num_retained: usize,
    pub truncation: f64,
    pub gain: f64,
    pub squeezing_db: Vec<f64>,
}

impl DecompositionSummary {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn check_truncation(truncation: f64) -> Result<()> {
    if truncation > 0.0 && truncation < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "truncation threshold must lie in (0, 1), got {truncation}"
        )))
    }
}

/// Decomposes a sampled JSA.
pub fn schmidt_decompose(jsa: &JointSpectralAmplitude, truncation: f64) -> Result<SchmidtDecomposition> {
    let n = jsa.n();
    let mut d = decompose_matrix(&jsa.values, n, n, jsa.grid.d_omega, truncation)?;
    d.axis = Some(jsa.grid.axis.clone());
    Ok(d)
}

/// Decomposes a row-major `rows x cols` kernel sampled with step `d_omega`
/// on both axes.
pub fn decompose_matrix(
    values: &[f64],
    rows: usize,
    cols: usize,
    d_omega: f64,
    truncation: f64,
) -> Result<SchmidtDecomposition> {
    check_truncation(truncation)?;
    if rows == 0 || cols == 0 || values.len() != rows * cols {
        return Err(Error::InvalidInput(format!(
            "matrix of {} values cannot be {rows}x{cols}",
            values.len()
        )));
    }
    if !(d_omega > 0.0 && d_omega.is_finite()) {
        return Err(Error::InvalidInput(format!("grid step must be positive, got {d_omega}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite kernel entry".into()));
    }
    let m = DMatrix::from_row_slice(rows, cols, values);
    let frob = m.norm();
    if frob == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let m = m / frob;
    let svd = nalgebra::SVD::try_new(m, true, true, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));
    let norm = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
    let coefficients: Vec<f64> = order.iter().map(|&k| sv[k] / norm).collect();

    let lead = coefficients[0];
    let num_retained = coefficients
        .iter()
        .take_while(|&&c| c > 0.0 && c >= truncation * lead)
        .count();

    let stored = num_retained.max(MIN_STORED_MODES.min(order.len()));
    let scale = 1.0 / d_omega.sqrt();
    let mut signal_modes = Vec::with_capacity(stored);
    let mut idler_modes = Vec::with_capacity(stored);
    for &k in order.iter().take(stored) {
        let mut h: Vec<f64> = u.column(k).iter().map(|x| x * scale).collect();
        let mut g: Vec<f64> = v_t.row(k).iter().map(|x| x * scale).collect();
        let pivot = h
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, &x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) })
            .0;
        if h[pivot] < 0.0 {
            h.iter_mut().for_each(|x| *x = -*x);
            g.iter_mut().for_each(|x| *x = -*x);
        }
        signal_modes.push(h);
        idler_modes.push(g);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        signal_modes,
        idler_modes,
        d_omega,
        num_retained,
        truncation,
        axis: None,
    })
}

/// `K = 1 / sum_k lambda_k^4` over all coefficients.
pub fn schmidt_number(d: &SchmidtDecomposition) -> f64 {
    schmidt_number_of(&d.coefficients)
}

/// `K` for an arbitrary coefficient list (normalised internally).
pub fn schmidt_number_of(coefficients: &[f64]) -> f64 {
    let s2: f64 = coefficients.iter().map(|c| c * c).sum();
    let s4: f64 = coefficients.iter().map(|c| (c * c) * (c * c)).sum();
    s2 * s2 / s4
}

/// `s_k+- = (h_k +- g_k) / sqrt(2)` for each retained mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SupermodeSet {
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
    pub d_omega: f64,
}

impl SupermodeSet {
    /// `d_omega * sum |s|^2` for mode `k`, as `(plus, minus)`.
    pub fn norms(&self, k: usize) -> (f64, f64) {
        let sq = |v: &[f64]| self.d_omega * v.iter().map(|x| x * x).sum::<f64>();
        (sq(&self.plus[k]), sq(&self.minus[k]))
    }
}

pub fn supermodes(d: &SchmidtDecomposition) -> SupermodeSet {
    let combine = |sign: f64| -> Vec<Vec<f64>> {
        d.signal_modes
            .iter()
            .zip(&d.idler_modes)
            .take(d.num_retained)
            .map(|(h, g)| h.iter().zip(g).map(|(a, b)| (a + sign * b) * FRAC_1_SQRT_2).collect())
            .collect()
    };
    SupermodeSet {
        plus: combine(1.0),
        minus: combine(-1.0),
        d_omega: d.d_omega,
    }
}

/// Per-mode squeezing for an overall gain `B`: `r_k = B lambda_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub gain: f64,
    pub squeezing_parameter: Vec<f64>,
    /// `exp(-2 r_k)`
    pub squeezed_variance: Vec<f64>,
    /// `exp(+2 r_k)`
    pub antisqueezed_variance: Vec<f64>,
    /// `-10 log10(exp(-2 r_k))`
    pub squeezing_db: Vec<f64>,
    /// `2 exp(-2 r_k)`
    pub epr_variance: Vec<f64>,
}

pub fn squeezing_report(d: &SchmidtDecomposition, gain: f64) -> Result<SqueezingReport> {
    if !(gain >= 0.0 && gain.is_finite()) {
        return Err(Error::InvalidInput(format!("gain must be non-negative, got {gain}")));
    }
    let r: Vec<f64> = d.coefficients.iter().map(|l| gain * l).collect();
    let squeezed: Vec<f64> = r.iter().map(|r| (-2.0 * r).exp()).collect();
    Ok(SqueezingReport {
        gain,
        antisqueezed_variance: r.iter().map(|r| (2.0 * r).exp()).collect(),
        squeezing_db: squeezed.iter().map(|v| -10.0 * v.log10()).collect(),
        epr_variance: squeezed.iter().map(|v| 2.0 * v).collect(),
        squeezed_variance: squeezed,
        squeezing_parameter: r,
    })
}
