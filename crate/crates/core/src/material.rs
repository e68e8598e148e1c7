//! Material data: per-axis refractive-index laws, thermo-optic terms and the
//! contracted nonlinear d-matrix.
//!
//! Materials are loaded from plain `key = value` text files (see
//! `data/materials/ktp.mat` and the README for the schema). KTP ships
//! embedded in the crate; further files can be placed in the directory named
//! by the `PDC_MATERIAL_DIR` environment variable.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT_UM_PER_S;

/// Environment variable naming a directory of additional `*.mat` files.
pub const MATERIAL_DIR_ENV: &str = "PDC_MATERIAL_DIR";

const KTP_DATA: &str = include_str!("../data/materials/ktp.mat");

/// Principal dielectric axis of a crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidInput(format!("unknown crystal axis '{other}'"))),
        }
    }
}

/// Wavelength dependence of the index along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IndexLaw {
    /// `n^2 = a + sum b_i/(lambda^2 - c_i) - ir*lambda^2`, lambda in um.
    Sellmeier {
        a: f64,
        terms: Vec<(f64, f64)>,
        ir: f64,
    },
    /// Dispersionless index.
    Constant(f64),
    /// `n = a + b*omega`, omega in rad/s. Mostly useful as a test material.
    LinearFrequency { a: f64, b: f64 },
}

/// Index law plus thermo-optic polynomial for one crystal axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDispersion {
    pub law: IndexLaw,
    /// Coefficients `t_m` of `dn/dT = sum_m t_m * lambda^-m` (per degC).
    pub thermo_optic: Vec<f64>,
}

/// Index and its first two wavelength derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexJet {
    pub n: f64,
    /// dn/dlambda, 1/um
    pub dn: f64,
    /// d^2n/dlambda^2, 1/um^2
    pub d2n: f64,
}

impl AxisDispersion {
    pub fn constant(n: f64) -> Self {
        Self {
            law: IndexLaw::Constant(n),
            thermo_optic: Vec::new(),
        }
    }

    /// Closed-form index and wavelength derivatives at `lambda_um` and a
    /// temperature offset `dt` from the reference temperature.
    pub fn jet(&self, lambda_um: f64, dt: f64) -> IndexJet {
        let l = lambda_um;
        let mut jet = match &self.law {
            IndexLaw::Sellmeier { a, terms, ir } => {
                let l2 = l * l;
                let mut s = a - ir * l2;
                let mut s1 = -2.0 * ir * l;
                let mut s2 = -2.0 * ir;
                for &(b, c) in terms {
                    let q = l2 - c;
                    s += b / q;
                    s1 -= 2.0 * l * b / (q * q);
                    s2 += -2.0 * b / (q * q) + 8.0 * l2 * b / (q * q * q);
                }
                let n = s.sqrt();
                IndexJet {
                    n,
                    dn: s1 / (2.0 * n),
                    d2n: s2 / (2.0 * n) - s1 * s1 / (4.0 * s * n),
                }
            }
            IndexLaw::Constant(n) => IndexJet {
                n: *n,
                dn: 0.0,
                d2n: 0.0,
            },
            IndexLaw::LinearFrequency { a, b } => {
                let w = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_UM_PER_S;
                IndexJet {
                    n: a + b * w / l,
                    dn: -b * w / (l * l),
                    d2n: 2.0 * b * w / (l * l * l),
                }
            }
        };
        if dt != 0.0 && !self.thermo_optic.is_empty() {
            let (mut t0, mut t1, mut t2) = (0.0, 0.0, 0.0);
            for (m, &t) in self.thermo_optic.iter().enumerate() {
                let m = m as f64;
                t0 += t * l.powf(-m);
                t1 += -m * t * l.powf(-m - 1.0);
                t2 += m * (m + 1.0) * t * l.powf(-m - 2.0);
            }
            jet.n += t0 * dt;
            jet.dn += t1 * dt;
            jet.d2n += t2 * dt;
        }
        jet
    }
}

/// A chi(2) material: three principal-axis dispersion laws, validity window
/// and the Kleinman d-matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub name: String,
    pub source_citation: String,
    pub axes: [AxisDispersion; 3],
    /// d_il in pm/V, rows i = x, y, z; columns l = 1..6 (xx, yy, zz, yz, xz, xy).
    pub d_matrix: [[f64; 6]; 3],
    pub valid_wavelength_um: (f64, f64),
    pub valid_temperature_c: (f64, f64),
    pub reference_temperature_c: f64,
}

impl MaterialModel {
    /// The embedded KTP data set.
    pub fn ktp() -> Self {
        KTP_DATA.parse().expect("embedded KTP data is valid")
    }

    pub fn axis(&self, axis: Axis) -> &AxisDispersion {
        &self.axes[axis.index()]
    }

    /// Isotropic dispersionless material, handy for analytic checks.
    pub fn constant_index(n: [f64; 3]) -> Self {
        Self {
            name: "constant".into(),
            source_citation: "synthetic".into(),
            axes: n.map(AxisDispersion::constant),
            d_matrix: [[1.0; 6]; 3],
            valid_wavelength_um: (0.1, 100.0),
            valid_temperature_c: (-273.15, 1000.0),
            reference_temperature_c: 20.0,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        text.parse().map_err(|e| match e {
            Error::MaterialFormat(msg) => {
                Error::MaterialFormat(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    /// Resolves a material by file path, then by `<name>.mat` inside
    /// `PDC_MATERIAL_DIR`, then among the embedded materials.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        let as_path = Path::new(name_or_path);
        if as_path.is_file() {
            return Self::load(as_path);
        }
        if let Ok(dir) = std::env::var(MATERIAL_DIR_ENV) {
            let candidate = Path::new(&dir).join(format!("{name_or_path}.mat"));
            if candidate.is_file() {
                return Self::load(candidate);
            }
        }
        match name_or_path.to_ascii_lowercase().as_str() {
            "ktp" => Ok(Self::ktp()),
            other => Err(Error::Config(format!("unknown material '{other}'"))),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::MaterialFormat(m.to_string()));
        let (lmin, lmax) = self.valid_wavelength_um;
        if !(lmin > 0.0 && lmax > lmin) {
            return bad("wavelength range must satisfy 0 < min < max");
        }
        let (tmin, tmax) = self.valid_temperature_c;
        if !(tmax > tmin) {
            return bad("temperature range must satisfy min < max");
        }
        for (axis, disp) in Axis::ALL.iter().zip(&self.axes) {
            match &disp.law {
                IndexLaw::Sellmeier { terms, .. } => {
                    for &(_, c) in terms {
                        if c > 0.0 && c.sqrt() >= lmin && c.sqrt() <= lmax {
                            return Err(Error::MaterialFormat(format!(
                                "axis {axis}: Sellmeier pole at {} um inside the validity range",
                                c.sqrt()
                            )));
                        }
                    }
                }
                IndexLaw::Constant(n) if !n.is_finite() => {
                    return Err(Error::MaterialFormat(format!("axis {axis}: index not finite")));
                }
                _ => {}
            }
            // n > 1 over the validity window
            for i in 0..=32 {
                let l = lmin + (lmax - lmin) * i as f64 / 32.0;
                for t in [tmin, tmax] {
                    let n = disp.jet(l, t - self.reference_temperature_c).n;
                    if !(n > 1.0) {
                        return Err(Error::MaterialFormat(format!(
                            "axis {axis}: index {n} <= 1 at {l} um, {t} C"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::MaterialFormat(format!("{key}: cannot parse number '{v}'")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split_whitespace().map(|x| parse_f64(key, x)).collect()
}

impl FromStr for MaterialModel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        use std::collections::BTreeMap;

        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::MaterialFormat(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::MaterialFormat(format!("duplicate key '{k}'")));
            }
        }
        let get = |k: &str| -> Result<&str> {
            kv.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::MaterialFormat(format!("missing field '{k}'")))
        };
        let num = |k: &str| -> Result<f64> { parse_f64(k, get(k)?) };

        let format = get("format")?;
        if format != "1" {
            return Err(Error::MaterialFormat(format!("unsupported format '{format}'")));
        }

        let mut axes = Vec::with_capacity(3);
        for axis in Axis::ALL {
            let p = axis.label();
            let law_key = format!("{p}.law");
            let law = match get(&law_key)? {
                "sellmeier" => {
                    let terms_key = format!("{p}.terms");
                    let mut terms = Vec::new();
                    for chunk in get(&terms_key)?.split(',') {
                        let pair = parse_list(&terms_key, chunk)?;
                        if pair.len() != 2 {
                            return Err(Error::MaterialFormat(format!(
                                "{terms_key}: each term needs 'b c'"
                            )));
                        }
                        terms.push((pair[0], pair[1]));
                    }
                    IndexLaw::Sellmeier {
                        a: num(&format!("{p}.a"))?,
                        terms,
                        ir: num(&format!("{p}.ir"))?,
                    }
                }
                "constant" => IndexLaw::Constant(num(&format!("{p}.n"))?),
                "linear_frequency" => IndexLaw::LinearFrequency {
                    a: num(&format!("{p}.a"))?,
                    b: num(&format!("{p}.b"))?,
                },
                other => {
                    return Err(Error::MaterialFormat(format!(
                        "{law_key}: unknown law '{other}'"
                    )))
                }
            };
            let thermo_key = format!("{p}.thermo_optic");
            let thermo_optic = parse_list(&thermo_key, get(&thermo_key)?)?;
            axes.push(AxisDispersion { law, thermo_optic });
        }

        let mut d_matrix = [[0.0; 6]; 3];
        for (i, row) in d_matrix.iter_mut().enumerate() {
            let key = format!("d.{}", i + 1);
            let vals = parse_list(&key, get(&key)?)?;
            if vals.len() != 6 {
                return Err(Error::MaterialFormat(format!("{key}: expected 6 entries")));
            }
            row.copy_from_slice(&vals);
        }

        let model = MaterialModel {
            name: get("name")?.to_string(),
            source_citation: get("citation")?.to_string(),
            axes: axes.try_into().expect("three axes"),
            d_matrix,
            valid_wavelength_um: (num("lambda_min_um")?, num("lambda_max_um")?),
            valid_temperature_c: (num("temp_min_c")?, num("temp_max_c")?),
            reference_temperature_c: num("temp_ref_c")?,
        };
        model.validate()?;
        Ok(model)
    }
}
