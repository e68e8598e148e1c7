//! Parameter sweeps over pump width, waveguide length, cross-section and
//! temperature, with JSON configuration and deterministic CSV output.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{schmidt_decompose, schmidt_number, DEFAULT_TRUNCATION};
use crate::dispersion::{PolarizationTriple, WaveguideGeometry};
use crate::error::{Error, Result};
use crate::jsa::{build_jsa, FrequencyGrid, PumpSpec, DEFAULT_GRID_POINTS};
use crate::material::MaterialModel;
use crate::modes::{fwhm_nm, overlap, ModeProfile};
use crate::numeric::{fmt_sci, golden_section_min};
use crate::phasematching::{sgvm_wavelength, ProcessSpec, DEFAULT_SGVM_BRACKET_UM};

/// Documented physical bounds for swept and base values.
pub const PUMP_WIDTH_BOUNDS_NM: (f64, f64) = (1.0, 12.0);
pub const DIMENSION_BOUNDS_UM: (f64, f64) = (4.0, 10.0);
pub const LENGTH_BOUNDS_MM: (f64, f64) = (5.0, 30.0);
/// Highest overlap order exposed as an observable.
pub const MAX_OVERLAP_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PumpWidthNm,
    WaveguideLengthMm,
    WaveguideWUm,
    WaveguideHUm,
    /// Square cross-section: sets width and height together.
    WaveguideWhUm,
    #[serde(rename = "temperature_C", alias = "temperature_c")]
    TemperatureC,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::PumpWidthNm => "pump_width_nm",
            SweepVariable::WaveguideLengthMm => "waveguide_length_mm",
            SweepVariable::WaveguideWUm => "waveguide_w_um",
            SweepVariable::WaveguideHUm => "waveguide_h_um",
            SweepVariable::WaveguideWhUm => "waveguide_wh_um",
            SweepVariable::TemperatureC => "temperature_C",
        }
    }

    fn bounds(self) -> Option<(f64, f64)> {
        match self {
            SweepVariable::PumpWidthNm => Some(PUMP_WIDTH_BOUNDS_NM),
            SweepVariable::WaveguideLengthMm => Some(LENGTH_BOUNDS_MM),
            SweepVariable::WaveguideWUm | SweepVariable::WaveguideHUm | SweepVariable::WaveguideWhUm => {
                Some(DIMENSION_BOUNDS_UM)
            }
            // checked against the material's validity window per point
            SweepVariable::TemperatureC => None,
        }
    }
}

/// Output quantities a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    SchmidtNumber,
    RetainedModeCount,
    FwhmSignal,
    FwhmIdler,
    Overlap(usize),
    LambdaSgvm,
    /// Expands to `lambda_k_count` coefficient columns.
    LambdaK,
}

impl Observable {
    fn needs_decomposition(self) -> bool {
        !matches!(self, Observable::LambdaSgvm)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::SchmidtNumber => f.write_str("K"),
            Observable::RetainedModeCount => f.write_str("retained_mode_count"),
            Observable::FwhmSignal => f.write_str("fwhm_signal"),
            Observable::FwhmIdler => f.write_str("fwhm_idler"),
            Observable::Overlap(n) => write!(f, "overlap_{n}"),
            Observable::LambdaSgvm => f.write_str("lambda_sgvm"),
            Observable::LambdaK => f.write_str("lambda_k"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "K" | "k" => Observable::SchmidtNumber,
            "retained_mode_count" => Observable::RetainedModeCount,
            "fwhm_signal" => Observable::FwhmSignal,
            "fwhm_idler" => Observable::FwhmIdler,
            "lambda_sgvm" => Observable::LambdaSgvm,
            "lambda_k" => Observable::LambdaK,
            other => match other.strip_prefix("overlap_").map(str::parse::<usize>) {
                Some(Ok(n)) if n <= MAX_OVERLAP_ORDER => Observable::Overlap(n),
                _ => return Err(Error::Config(format!("unknown observable '{other}'"))),
            },
        })
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    #[serde(default = "PolarizationTriple::ktp_type2")]
    pub polarization: PolarizationTriple,
    #[serde(default = "default_pump_wavelength")]
    pub pump_wavelength_um: f64,
    #[serde(default = "default_temperature")]
    pub temperature_c: f64,
    pub waveguide: WaveguideGeometry,
}

fn default_pump_wavelength() -> f64 {
    0.775
}

fn default_temperature() -> f64 {
    20.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub width_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid_points")]
    pub n_points: usize,
    /// Fixed per-axis half-span in rad/s; automatic when absent.
    #[serde(default)]
    pub half_span_rad_s: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_GRID_POINTS,
            half_span_rad_s: None,
        }
    }
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

/// One swept variable; `range = [min, max, n_steps]`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub range: [f64; 3],
}

impl SweepAxis {
    pub fn new(variable: SweepVariable, min: f64, max: f64, steps: usize) -> Self {
        Self {
            variable,
            range: [min, max, steps as f64],
        }
    }

    pub fn steps(&self) -> usize {
        self.range[2] as usize
    }

    pub fn values(&self) -> Vec<f64> {
        let [lo, hi, _] = self.range;
        let n = self.steps();
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Built-in name, file path or name under `$PDC_MATERIAL_DIR`.
    #[serde(default = "default_material")]
    pub material: String,
    pub process: ProcessConfig,
    pub pump: PumpConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    /// Overall squeezing gain `B`; reported for provenance.
    #[serde(default = "default_gain")]
    pub gain: f64,
    pub sweep: Vec<SweepAxis>,
    pub observables: Vec<Observable>,
    #[serde(default = "default_lambda_k_count")]
    pub lambda_k_count: usize,
    #[serde(default = "default_bracket")]
    pub sgvm_bracket_um: (f64, f64),
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_material() -> String {
    "ktp".into()
}

fn default_truncation() -> f64 {
    DEFAULT_TRUNCATION
}

fn default_gain() -> f64 {
    1.0
}

fn default_lambda_k_count() -> usize {
    6
}

fn default_bracket() -> (f64, f64) {
    DEFAULT_SGVM_BRACKET_UM
}

fn in_bounds(name: &str, v: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if v.is_finite() && v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {v} outside the supported range [{lo}, {hi}]")))
    }
}

impl SweepConfig {
    /// Single-variable sweep from the standard base configuration.
    pub fn base(geometry: WaveguideGeometry, pump_width_nm: f64) -> Self {
        Self {
            material: default_material(),
            process: ProcessConfig {
                polarization: PolarizationTriple::ktp_type2(),
                pump_wavelength_um: default_pump_wavelength(),
                temperature_c: default_temperature(),
                waveguide: geometry,
            },
            pump: PumpConfig {
                width_nm: pump_width_nm,
            },
            grid: GridConfig::default(),
            truncation: DEFAULT_TRUNCATION,
            gain: 1.0,
            sweep: Vec::new(),
            observables: Vec::new(),
            lambda_k_count: default_lambda_k_count(),
            sgvm_bracket_um: DEFAULT_SGVM_BRACKET_UM,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.is_empty() || self.sweep.len() > 2 {
            return Err(Error::Config(format!(
                "one or two swept variables required, got {}",
                self.sweep.len()
            )));
        }
        if self.sweep.len() == 2 && self.sweep[0].variable == self.sweep[1].variable {
            return Err(Error::Config("swept variables must differ".into()));
        }
        if self.observables.is_empty() {
            return Err(Error::Config("no observables requested".into()));
        }
        for axis in &self.sweep {
            let [lo, hi, n] = axis.range;
            if !(n >= 1.0 && n.fract() == 0.0) {
                return Err(Error::Config(format!(
                    "{}: step count must be a positive integer, got {n}",
                    axis.variable.column()
                )));
            }
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!(
                    "{}: range [{lo}, {hi}] is not ordered",
                    axis.variable.column()
                )));
            }
            if let Some(b) = axis.variable.bounds() {
                in_bounds(axis.variable.column(), lo, b)?;
                in_bounds(axis.variable.column(), hi, b)?;
            }
        }
        let swept = |v: SweepVariable| self.sweep.iter().any(|a| a.variable == v);
        let square = swept(SweepVariable::WaveguideWhUm);
        if square && (swept(SweepVariable::WaveguideWUm) || swept(SweepVariable::WaveguideHUm)) {
            return Err(Error::Config(
                "waveguide_wh_um cannot be combined with waveguide_w_um or waveguide_h_um".into(),
            ));
        }
        let g = &self.process.waveguide;
        if !swept(SweepVariable::PumpWidthNm) {
            in_bounds("pump.width_nm", self.pump.width_nm, PUMP_WIDTH_BOUNDS_NM)?;
        }
        if !swept(SweepVariable::WaveguideLengthMm) {
            in_bounds("waveguide.length_mm", g.length_mm, LENGTH_BOUNDS_MM)?;
        }
        if !swept(SweepVariable::WaveguideWUm) && !square {
            in_bounds("waveguide.width_um", g.width_um, DIMENSION_BOUNDS_UM)?;
        }
        if !swept(SweepVariable::WaveguideHUm) && !square {
            in_bounds("waveguide.height_um", g.height_um, DIMENSION_BOUNDS_UM)?;
        }
        g.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.truncation > 0.0 && self.truncation < 1.0) {
            return Err(Error::Config(format!("truncation must lie in (0, 1), got {}", self.truncation)));
        }
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::Config(format!("gain must be non-negative, got {}", self.gain)));
        }
        if !(self.process.pump_wavelength_um > 0.0) {
            return Err(Error::Config("pump wavelength must be positive".into()));
        }
        if self.grid.n_points % 2 == 0 {
            return Err(Error::Config(format!("grid.n_points must be odd, got {}", self.grid.n_points)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.lambda_k_count == 0 && self.observables.contains(&Observable::LambdaK) {
            return Err(Error::Config("lambda_k requested with lambda_k_count = 0".into()));
        }
        Ok(())
    }

    /// Output column names after the swept variables and `status`.
    pub fn observable_columns(&self) -> Vec<String> {
        self.observables
            .iter()
            .flat_map(|o| match o {
                Observable::LambdaK => (0..self.lambda_k_count).map(|k| format!("lambda_{k}")).collect(),
                other => vec![other.to_string()],
            })
            .collect()
    }

    /// Every sweep point in output order (first variable outermost).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let first = self.sweep[0].values();
        match self.sweep.get(1) {
            None => first.into_iter().map(|v| vec![v]).collect(),
            Some(second) => {
                let second = second.values();
                first
                    .iter()
                    .flat_map(|&a| second.iter().map(move |&b| vec![a, b]))
                    .collect()
            }
        }
    }
}

/// Fully resolved inputs for one sweep point.
#[derive(Debug, Clone)]
pub struct PointInputs {
    pub geometry: WaveguideGeometry,
    pub temperature_c: f64,
    pub pump_width_nm: f64,
}

fn point_inputs(cfg: &SweepConfig, values: &[f64]) -> PointInputs {
    let mut p = PointInputs {
        geometry: cfg.process.waveguide.clone(),
        temperature_c: cfg.process.temperature_c,
        pump_width_nm: cfg.pump.width_nm,
    };
    for (axis, &v) in cfg.sweep.iter().zip(values) {
        match axis.variable {
            SweepVariable::PumpWidthNm => p.pump_width_nm = v,
            SweepVariable::WaveguideLengthMm => p.geometry.length_mm = v,
            SweepVariable::WaveguideWUm => p.geometry.width_um = v,
            SweepVariable::WaveguideHUm => p.geometry.height_um = v,
            SweepVariable::WaveguideWhUm => {
                p.geometry.width_um = v;
                p.geometry.height_um = v;
            }
            SweepVariable::TemperatureC => p.temperature_c = v,
        }
    }
    p
}

/// Evaluates the requested observables for one point; values are in
/// `observable_columns` order.
pub fn evaluate_point(cfg: &SweepConfig, material: &Arc<MaterialModel>, inputs: &PointInputs) -> Result<Vec<f64>> {
    let mut decomposition = None;
    if cfg.observables.iter().any(|o| o.needs_decomposition()) {
        let spec = ProcessSpec::new(
            Arc::clone(material),
            inputs.geometry.clone(),
            inputs.temperature_c,
            cfg.process.polarization,
            cfg.process.pump_wavelength_um,
        )
        .phasematched()?;
        let pump = PumpSpec::new(cfg.process.pump_wavelength_um, inputs.pump_width_nm);
        let grid = match cfg.grid.half_span_rad_s {
            Some(span) => FrequencyGrid::new(spec.center_omega(), span, cfg.grid.n_points)?,
            None => FrequencyGrid::auto(&spec, &pump, cfg.grid.n_points)?,
        };
        let jsa = build_jsa(&spec, &pump, &grid)?;
        decomposition = Some(schmidt_decompose(&jsa, cfg.truncation)?);
    }
    let mut out = Vec::new();
    for obs in &cfg.observables {
        let d = decomposition.as_ref();
        match *obs {
            Observable::SchmidtNumber => out.push(schmidt_number(d.expect("decomposed"))),
            Observable::RetainedModeCount => out.push(d.expect("decomposed").num_retained as f64),
            Observable::FwhmSignal => out.push(fwhm_nm(&ModeProfile::signal(d.expect("decomposed"), 0)?)?),
            Observable::FwhmIdler => out.push(fwhm_nm(&ModeProfile::idler(d.expect("decomposed"), 0)?)?),
            Observable::Overlap(n) => {
                let d = d.expect("decomposed");
                out.push(overlap(&ModeProfile::signal(d, n)?, &ModeProfile::idler(d, n)?)?)
            }
            Observable::LambdaSgvm => out.push(
                sgvm_wavelength(
                    material,
                    &inputs.geometry,
                    inputs.temperature_c,
                    cfg.process.polarization,
                    cfg.sgvm_bracket_um,
                )? * 1e3,
            ),
            Observable::LambdaK => {
                let c = &d.expect("decomposed").coefficients;
                out.extend((0..cfg.lambda_k_count).map(|k| c.get(k).copied().unwrap_or(0.0)));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub inputs: Vec<f64>,
    /// `ok` or the error tag of a failed point.
    pub status: String,
    /// Failure message for failed points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub material: String,
    pub material_citation: String,
    pub code_version: String,
    pub timestamp_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub provenance: Provenance,
    pub input_columns: Vec<String>,
    pub observable_columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Deterministic CSV: inputs, status, observables; NaN for failed points.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<&str> = self.input_columns.iter().map(String::as_str).collect();
        header.push("status");
        header.extend(self.observable_columns.iter().map(String::as_str));
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = row.inputs.iter().map(|v| fmt_sci(*v)).collect();
            cells.push(row.status.clone());
            cells.extend(row.values.iter().map(|v| fmt_sci(*v)));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Values of one observable column across rows.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.observable_columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    /// Values of one input column across rows.
    pub fn input(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.input_columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.inputs[k]).collect())
    }
}

/// Runs every point of the sweep. Configuration errors abort; per-point
/// failures are recorded in the row.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let material = Arc::new(MaterialModel::resolve(&cfg.material)?);
    run_sweep_with_material(cfg, material)
}

pub fn run_sweep_with_material(cfg: &SweepConfig, material: Arc<MaterialModel>) -> Result<SweepResult> {
    cfg.validate()?;
    let columns = cfg.observable_columns();
    let points = cfg.points();
    let evaluate = || -> Vec<SweepRow> {
        points
            .par_iter()
            .map(|values| {
                let inputs = point_inputs(cfg, values);
                match evaluate_point(cfg, &material, &inputs) {
                    Ok(v) => SweepRow {
                        inputs: values.clone(),
                        status: "ok".into(),
                        message: None,
                        values: v,
                    },
                    Err(e) => SweepRow {
                        inputs: values.clone(),
                        status: e.tag().into(),
                        message: Some(e.to_string()),
                        values: vec![f64::NAN; columns.len()],
                    },
                }
            })
            .collect()
    };
    let rows = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(evaluate),
        None => evaluate(),
    };
    Ok(SweepResult {
        config: cfg.clone(),
        provenance: Provenance {
            material: material.name.clone(),
            material_citation: material.source_citation.clone(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        },
        input_columns: cfg.sweep.iter().map(|a| a.variable.column().to_string()).collect(),
        observable_columns: columns,
        rows,
    })
}

/// Schmidt number for the base configuration at pump width `wp_nm` and
/// length `length_mm`.
pub fn schmidt_number_at(cfg: &SweepConfig, material: &Arc<MaterialModel>, wp_nm: f64, length_mm: f64) -> Result<f64> {
    let mut probe = cfg.clone();
    probe.observables = vec![Observable::SchmidtNumber];
    let mut inputs = point_inputs(&probe, &[]);
    inputs.pump_width_nm = wp_nm;
    inputs.geometry.length_mm = length_mm;
    Ok(evaluate_point(&probe, material, &inputs)?[0])
}

/// Golden-section search of `K(L)` on `bracket_mm` at fixed pump width.
/// Returns `(L_at_min_mm, K_min)`.
pub fn find_k_minimum(
    base: &SweepConfig,
    wp_nm: f64,
    bracket_mm: (f64, f64),
    xtol_mm: f64,
) -> Result<(f64, f64)> {
    let material = Arc::new(MaterialModel::resolve(&base.material)?);
    golden_section_min(
        |l| schmidt_number_at(base, &material, wp_nm, l),
        bracket_mm.0,
        bracket_mm.1,
        xtol_mm,
    )
}
