//! Pinned configurations that regenerate each figure's data as CSV.
//!
//! Shared assumptions: KTP, type-II `(y -> z, y)`, x-propagating z-cut
//! waveguide, pump at 775 nm, 20 C, metallic-waveguide index correction.
//! Values not fixed by a figure itself default to a 9 x 9 um cross-section,
//! L = 10 mm and a 4 nm pump width. The K-versus-length and FWHM figures
//! over pump width and length use a 6 x 6 um cross-section; FWHM against
//! length uses a 3 nm pump, FWHM against cross-section 2 and 12 nm pumps.
//! K against pump width is drawn for 6 x 6 and 9 x 9 um cross-sections.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::dispersion::{PolarizationTriple, WaveguideGeometry};
use crate::error::{Error, Result};
use crate::jsa::{build_jsa, FrequencyGrid, PumpSpec};
use crate::material::{Axis, MaterialModel};
use crate::modes::hg_overlap_model;
use crate::numeric::fmt_sci;
use crate::phasematching::{mismatch_residual, sgvm_residual, taylor_coefficients, ProcessSpec};
use crate::sweep::{run_sweep_with_material, Observable, SweepAxis, SweepConfig, SweepVariable};

/// Figure name and one-line description.
pub const FIGURES: &[(&str, &str)] = &[
    ("taylor_coefficients", "gamma_s and -gamma_i against degenerate wavelength, 6x6 um"),
    ("sgvm_vs_temperature", "SGVM wavelength against temperature, 9x9 um"),
    ("sgvm_vs_dimensions", "SGVM wavelength over the (w, h) plane, 4-10 um"),
    ("jsa_type0", "JSA of type-0 (z -> z, z) PDC, 9x9 um, L = 10 mm, 4 nm pump"),
    ("jsa_type2", "JSA of type-II (y -> z, y) PDC, 9x9 um, L = 10 mm, 4 nm pump"),
    ("k_vs_pump_width", "Schmidt number and retained modes against pump width, 6x6 and 9x9 um, L = 10 mm"),
    ("k_vs_length", "Schmidt number against length for 1 and 4 nm pumps, 6x6 um"),
    ("fwhm_vs_pump_width", "first-mode FWHM against pump width, 6x6 um, L = 10 mm"),
    ("fwhm_vs_length", "first-mode FWHM against length, 6x6 um, 3 nm pump"),
    ("fwhm_vs_dimensions", "first-mode FWHM against square cross-section, L = 10 mm, 2 and 12 nm pumps"),
    ("overlap_vs_pump_width", "signal/idler overlaps o_0..o_5 against pump width, 9x9 um"),
    ("overlap_vs_length", "signal/idler overlaps o_0..o_5 against length, 9x9 um"),
    ("overlap_vs_dimensions", "signal/idler overlaps o_0..o_5 against square cross-section"),
    ("mismatch_residual", "mismatch, first-order model and remainder on a +-25 nm grid, 9x9 um"),
    ("hg_overlap", "Hermite-Gauss overlap model, w/w' = 0.95 shrinking 2% per order"),
];

const JSA_FIGURE_POINTS: usize = 201;
const RESIDUAL_FIGURE_POINTS: usize = 101;

fn overlaps() -> Vec<Observable> {
    (0..=5).map(Observable::Overlap).collect()
}

fn sweep_preset(name: &str) -> Option<SweepConfig> {
    use SweepVariable::*;
    let nine = WaveguideGeometry::square(9.0, 10.0);
    let six = WaveguideGeometry::square(6.0, 10.0);
    let (base, sweep, observables) = match name {
        "sgvm_vs_temperature" => (
            SweepConfig::base(nine, 4.0),
            vec![SweepAxis::new(TemperatureC, 20.0, 250.0, 24)],
            vec![Observable::LambdaSgvm],
        ),
        "sgvm_vs_dimensions" => (
            SweepConfig::base(nine, 4.0),
            vec![
                SweepAxis::new(WaveguideWUm, 4.0, 10.0, 13),
                SweepAxis::new(WaveguideHUm, 4.0, 10.0, 13),
            ],
            vec![Observable::LambdaSgvm],
        ),
        "k_vs_pump_width" => (
            SweepConfig::base(nine, 4.0),
            vec![
                SweepAxis::new(WaveguideWhUm, 6.0, 9.0, 2),
                SweepAxis::new(PumpWidthNm, 1.0, 12.0, 12),
            ],
            vec![Observable::SchmidtNumber, Observable::RetainedModeCount],
        ),
        "k_vs_length" => (
            SweepConfig::base(six.clone(), 4.0),
            vec![
                SweepAxis::new(PumpWidthNm, 1.0, 4.0, 2),
                SweepAxis::new(WaveguideLengthMm, 5.0, 30.0, 26),
            ],
            vec![Observable::SchmidtNumber, Observable::RetainedModeCount],
        ),
        "fwhm_vs_pump_width" => (
            SweepConfig::base(six.clone(), 4.0),
            vec![SweepAxis::new(PumpWidthNm, 1.0, 12.0, 12)],
            vec![Observable::FwhmSignal, Observable::FwhmIdler],
        ),
        "fwhm_vs_length" => (
            SweepConfig::base(six, 3.0),
            vec![SweepAxis::new(WaveguideLengthMm, 5.0, 30.0, 26)],
            vec![Observable::FwhmSignal, Observable::FwhmIdler],
        ),
        "fwhm_vs_dimensions" => (
            SweepConfig::base(nine, 4.0),
            vec![
                SweepAxis::new(PumpWidthNm, 2.0, 12.0, 2),
                SweepAxis::new(WaveguideWhUm, 4.0, 10.0, 25),
            ],
            vec![Observable::FwhmSignal, Observable::FwhmIdler],
        ),
        "overlap_vs_pump_width" => (
            SweepConfig::base(nine, 4.0),
            vec![SweepAxis::new(PumpWidthNm, 1.0, 12.0, 12)],
            overlaps(),
        ),
        "overlap_vs_length" => (
            SweepConfig::base(nine, 4.0),
            vec![SweepAxis::new(WaveguideLengthMm, 5.0, 30.0, 26)],
            overlaps(),
        ),
        "overlap_vs_dimensions" => (
            SweepConfig::base(nine, 4.0),
            vec![SweepAxis::new(WaveguideWhUm, 4.0, 10.0, 25)],
            overlaps(),
        ),
        _ => return None,
    };
    Some(SweepConfig {
        sweep,
        observables,
        ..base
    })
}

/// The sweep configuration behind a sweep-type figure, if `name` is one.
pub fn sweep_config(name: &str) -> Option<SweepConfig> {
    sweep_preset(name)
}

/// Regenerates the CSV for figure `name` with the built-in KTP data.
pub fn figure_csv(name: &str, workers: Option<usize>) -> Result<String> {
    figure_csv_with_material(name, workers, Arc::new(MaterialModel::ktp()))
}

pub fn figure_csv_with_material(name: &str, workers: Option<usize>, material: Arc<MaterialModel>) -> Result<String> {
    if let Some(mut cfg) = sweep_preset(name) {
        cfg.workers = workers;
        return Ok(run_sweep_with_material(&cfg, material)?.to_csv());
    }
    let run = |f: &(dyn Fn() -> Result<String> + Sync)| -> Result<String> {
        match workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(f),
            None => f(),
        }
    };
    match name {
        "taylor_coefficients" => taylor_csv(&material),
        "jsa_type0" => run(&|| jsa_csv(&material, PolarizationTriple::new(Axis::Z, Axis::Z, Axis::Z))),
        "jsa_type2" => run(&|| jsa_csv(&material, PolarizationTriple::ktp_type2())),
        "mismatch_residual" => run(&|| {
            let spec = ProcessSpec::new(
                Arc::clone(&material),
                WaveguideGeometry::square(9.0, 10.0),
                20.0,
                PolarizationTriple::ktp_type2(),
                0.775,
            )
            .phasematched()?;
            Ok(mismatch_residual(&spec, 25.0, RESIDUAL_FIGURE_POINTS)?.to_csv())
        }),
        "hg_overlap" => Ok(hg_csv()),
        other => Err(Error::Config(format!(
            "unknown figure '{other}'; available: {}",
            FIGURES.iter().map(|f| f.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn taylor_csv(material: &Arc<MaterialModel>) -> Result<String> {
    let geometry = WaveguideGeometry::square(6.0, 10.0);
    let pol = PolarizationTriple::ktp_type2();
    let mut out = String::from("lambda_nm,gamma_s,minus_gamma_i,gamma_sum\n");
    for k in 0..=140 {
        let l = 1.2 + 0.005 * k as f64;
        let spec = ProcessSpec::new(Arc::clone(material), geometry.clone(), 20.0, pol, 0.5 * l);
        let c = taylor_coefficients(&spec)?;
        let sum = sgvm_residual(material, &geometry, 20.0, pol, l)?;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sci(l * 1e3),
            fmt_sci(c.gamma_s),
            fmt_sci(-c.gamma_i),
            fmt_sci(sum)
        );
    }
    Ok(out)
}

fn jsa_csv(material: &Arc<MaterialModel>, pol: PolarizationTriple) -> Result<String> {
    let spec = ProcessSpec::new(
        Arc::clone(material),
        WaveguideGeometry::square(9.0, 10.0),
        20.0,
        pol,
        0.775,
    )
    .phasematched()?;
    let pump = PumpSpec::new(0.775, 4.0);
    let grid = FrequencyGrid::auto(&spec, &pump, JSA_FIGURE_POINTS)?;
    Ok(build_jsa(&spec, &pump, &grid)?.to_csv())
}

/// Width ratio used for order `n` in the Hermite-Gauss overlap figure.
pub fn hg_width_ratio(n: usize) -> f64 {
    0.95 * 0.98f64.powi(n as i32)
}

fn hg_csv() -> String {
    let mut out = String::from("order,width_ratio,overlap\n");
    for n in 0..=5 {
        let r = hg_width_ratio(n);
        let _ = writeln!(out, "{n},{},{}", fmt_sci(r), fmt_sci(hg_overlap_model(n, r, 1.0, 0.0)));
    }
    out
}
