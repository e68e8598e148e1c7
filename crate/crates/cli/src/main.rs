//! `pdcmodes`: SGVM search, JSA export, Schmidt analysis, parameter sweeps
//! and figure regeneration.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 physics-range
//! error (out-of-validity wavelength/temperature, no SGVM crossing, ...).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdc_core::decomposition::{schmidt_decompose, DEFAULT_TRUNCATION};
use pdc_core::dispersion::{bulk_index, IndexCorrection, PolarizationTriple, WaveguideGeometry};
use pdc_core::figures::{figure_csv_with_material, FIGURES};
use pdc_core::jsa::{build_jsa, describe, read_binary_matrix, FrequencyGrid, JointSpectralAmplitude, PumpSpec};
use pdc_core::material::{Axis, MaterialModel};
use pdc_core::phasematching::{
    mismatch_residual, poling_period, sgvm_wavelength, taylor_coefficients, ProcessSpec,
};
use pdc_core::sweep::{run_sweep_with_material, SweepConfig};
use pdc_core::{Error, Result};

#[derive(Parser)]
#[command(name = "pdcmodes", version, about = "Multimode PDC design in periodically poled waveguides")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Material data files.
    Material {
        #[command(subcommand)]
        action: MaterialAction,
    },
    /// Symmetric group-velocity matching.
    Sgvm {
        #[command(subcommand)]
        action: SgvmAction,
    },
    /// Joint spectral amplitudes.
    Jsa {
        #[command(subcommand)]
        action: JsaAction,
    },
    /// Schmidt-decompose a JSA file into a JSON summary (and optional mode CSV).
    Schmidt(SchmidtArgs),
    /// Parameter sweeps.
    Sweep {
        #[command(subcommand)]
        action: SweepAction,
    },
    /// Regenerate the data behind a named figure (`figures list` for names).
    Figures(FiguresArgs),
}

#[derive(Subcommand)]
enum MaterialAction {
    /// Parse and check a material file.
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum SgvmAction {
    /// Find the SGVM wavelength and report the operating point.
    Find(SgvmArgs),
}

#[derive(Subcommand)]
enum JsaAction {
    /// Build a JSA and write it as CSV or binary.
    Build(JsaArgs),
}

#[derive(Subcommand)]
enum SweepAction {
    /// Run a sweep from a JSON configuration; writes `<stem>.csv` and `<stem>.json`.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the configured worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Correction {
    Metallic,
    Additive,
    Bulk,
}

impl From<Correction> for IndexCorrection {
    fn from(c: Correction) -> Self {
        match c {
            Correction::Metallic => IndexCorrection::Metallic,
            Correction::Additive => IndexCorrection::Additive,
            Correction::Bulk => IndexCorrection::Bulk,
        }
    }
}

#[derive(Args)]
struct WaveguideArgs {
    /// Material name, or path to a material file.
    #[arg(long, default_value = "ktp")]
    material: String,
    /// Waveguide width, um.
    #[arg(long, default_value_t = 9.0)]
    w: f64,
    /// Waveguide height, um.
    #[arg(long, default_value_t = 9.0)]
    h: f64,
    /// Temperature, C.
    #[arg(long, default_value_t = 20.0)]
    temp: f64,
    /// Waveguide length, mm.
    #[arg(long, default_value_t = 10.0)]
    length: f64,
    /// Polarization of pump, signal and idler, e.g. `yzy`.
    #[arg(long, default_value = "yzy", value_parser = parse_polarization)]
    pol: PolarizationTriple,
    /// Waveguide index correction.
    #[arg(long, value_enum, default_value = "metallic")]
    correction: Correction,
}

impl WaveguideArgs {
    fn geometry(&self) -> WaveguideGeometry {
        WaveguideGeometry::new(self.w, self.h, self.length).with_correction(self.correction.into())
    }
}

#[derive(Args)]
struct SgvmArgs {
    #[command(flatten)]
    guide: WaveguideArgs,
    /// Search bracket for the degenerate wavelength, um.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1.2, 1.9])]
    bracket: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum JsaFormat {
    Csv,
    Bin,
}

#[derive(Args)]
struct JsaArgs {
    #[command(flatten)]
    guide: WaveguideArgs,
    /// Central pump wavelength, nm.
    #[arg(long, default_value_t = 775.0)]
    pump_nm: f64,
    /// Pump width, nm.
    #[arg(long, default_value_t = 4.0)]
    wp: f64,
    /// Grid points per axis (odd).
    #[arg(long, default_value_t = 401)]
    points: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: JsaFormat,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SchmidtArgs {
    /// JSA file (`.csv` with wavelength headers or `.bin`).
    file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: f64,
    /// Overall squeezing gain B.
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    /// JSON summary destination; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Mode-function CSV destination (CSV input only).
    #[arg(long)]
    modes: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Figure name, or `list`.
    name: String,
    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "ktp")]
    material: String,
}

fn parse_polarization(s: &str) -> std::result::Result<PolarizationTriple, String> {
    let axes: Vec<Axis> = s
        .chars()
        .map(|c| c.to_string().parse::<Axis>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match axes[..] {
        [p, s, i] => Ok(PolarizationTriple::new(p, s, i)),
        _ => Err(format!("expected three axis letters (pump, signal, idler), got '{s}'")),
    }
}

fn load_material(name: &str) -> Result<Arc<MaterialModel>> {
    Ok(Arc::new(MaterialModel::resolve(name)?))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn material_validate(file: &Path) -> Result<()> {
    let m = MaterialModel::load(file)?;
    println!("material: {}", m.name);
    println!("citation: {}", m.source_citation);
    println!(
        "validity: {}-{} um, {}-{} C",
        m.valid_wavelength_um.0, m.valid_wavelength_um.1, m.valid_temperature_c.0, m.valid_temperature_c.1
    );
    let probe = 1.55f64.clamp(m.valid_wavelength_um.0, m.valid_wavelength_um.1);
    for axis in Axis::ALL {
        println!(
            "n_{axis}({probe} um, {} C) = {:.6}",
            m.reference_temperature_c,
            bulk_index(&m, axis, probe, m.reference_temperature_c)?
        );
    }
    Ok(())
}

fn sgvm_find(args: &SgvmArgs) -> Result<()> {
    let start = Instant::now();
    let material = load_material(&args.guide.material)?;
    let geometry = args.guide.geometry();
    let lambda = sgvm_wavelength(
        &material,
        &geometry,
        args.guide.temp,
        args.guide.pol,
        (args.bracket[0], args.bracket[1]),
    )?;
    let spec = ProcessSpec::new(Arc::clone(&material), geometry, args.guide.temp, args.guide.pol, 0.5 * lambda);
    let period = poling_period(&spec)?;
    let coeffs = taylor_coefficients(&spec)?;
    let residual = mismatch_residual(&spec.phasematched()?, 25.0, 201)?;
    println!("lambda_sgvm_nm = {:.4}", lambda * 1e3);
    println!("pump_wavelength_nm = {:.4}", 0.5 * lambda * 1e3);
    println!("poling_period_um = {period:.4}");
    println!("gamma_s_s_per_um = {:.6e}", coeffs.gamma_s);
    println!("gamma_i_s_per_um = {:.6e}", coeffs.gamma_i);
    println!("delta_s_s2_per_um = {:.6e}", coeffs.delta_s);
    println!("delta_i_s2_per_um = {:.6e}", coeffs.delta_i);
    println!("delta_p_s2_per_um = {:.6e}", coeffs.delta_p);
    println!("residual_ratio_25nm = {:.6e}", residual.max_ratio());
    eprintln!("sgvm find: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn jsa_build(args: &JsaArgs) -> Result<()> {
    let material = load_material(&args.guide.material)?;
    let pump_um = args.pump_nm * 1e-3;
    let spec = ProcessSpec::new(material, args.guide.geometry(), args.guide.temp, args.guide.pol, pump_um)
        .phasematched()?;
    let pump = PumpSpec::new(pump_um, args.wp);
    let grid = FrequencyGrid::auto(&spec, &pump, args.points)?;
    let jsa = build_jsa(&spec, &pump, &grid)?;
    match args.format {
        JsaFormat::Csv => fs::write(&args.out, jsa.to_csv())?,
        JsaFormat::Bin => jsa.write_binary(std::io::BufWriter::new(fs::File::create(&args.out)?))?,
    }
    eprintln!("{}", describe(&jsa));
    Ok(())
}

fn schmidt(args: &SchmidtArgs) -> Result<()> {
    let is_bin = args.file.extension().is_some_and(|e| e == "bin");
    let jsa = if is_bin {
        if args.modes.is_some() {
            return Err(Error::InvalidInput(
                "binary JSA files carry no frequency axis; mode CSV export needs a CSV input".into(),
            ));
        }
        let (rows, cols, values) = read_binary_matrix(std::io::BufReader::new(fs::File::open(&args.file)?))?;
        if rows != cols {
            return Err(Error::InvalidInput(format!("JSA must be square, got {rows}x{cols}")));
        }
        // unit-step index axis: coefficients and K do not depend on the step
        let axis = (0..rows).map(|k| (k + 1) as f64).collect();
        JointSpectralAmplitude::from_values(FrequencyGrid::from_axis(axis)?, values)?
    } else {
        JointSpectralAmplitude::from_csv(&fs::read_to_string(&args.file)?)?
    };
    let d = schmidt_decompose(&jsa, args.truncation)?;
    let summary = d.summary(args.gain)?;
    let json = summary.to_json()?;
    if let Some(path) = &args.modes {
        fs::write(path, d.modes_csv()?)?;
    }
    write_output(args.out.as_deref(), &json)
}

fn sweep_run(config: &Path, out_dir: &Path, workers: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = SweepConfig::from_json(&text)?;
    if workers.is_some() {
        cfg.workers = workers;
        cfg.validate()?;
    }
    let material = load_material(&cfg.material)?;
    let result = run_sweep_with_material(&cfg, material)?;
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(format!("{stem}.csv")), result.to_csv())?;
    fs::write(out_dir.join(format!("{stem}.json")), result.to_json()?)?;
    let failed = result.rows.iter().filter(|r| r.status != "ok").count();
    eprintln!("{} points, {failed} failed", result.rows.len());
    Ok(())
}

fn figures(args: &FiguresArgs) -> Result<()> {
    if args.name == "list" {
        for (name, about) in FIGURES {
            println!("{name:24} {about}");
        }
        return Ok(());
    }
    if args.workers == Some(0) {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let material = load_material(&args.material)?;
    let csv = figure_csv_with_material(&args.name, args.workers, material)?;
    write_output(args.out.as_deref(), &csv)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Material {
            action: MaterialAction::Validate { file },
        } => material_validate(&file),
        Command::Sgvm {
            action: SgvmAction::Find(args),
        } => sgvm_find(&args),
        Command::Jsa {
            action: JsaAction::Build(args),
        } => jsa_build(&args),
        Command::Schmidt(args) => schmidt(&args),
        Command::Sweep {
            action: SweepAction::Run {
                config,
                out_dir,
                workers,
            },
        } => sweep_run(&config, &out_dir, workers),
        Command::Figures(args) => figures(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_physics() { 2 } else { 1 })
        }
    }
}
